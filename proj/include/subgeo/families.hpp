#pragma once

#include "subgeo/tracial.hpp"

#include <string>
#include <vector>

namespace subgeo {

struct BuiltinFamily {
  std::string name;
  double lambda = 0.0;
  std::string description;
};

/// tensor(1,2), tensor(1,3), tensor(2,2), group_flip(scalars), group_flip(M2,flip).
std::vector<BuiltinFamily> builtin_families();

/// Throws DomainError for unknown names.
Inclusion make_builtin_family(const std::string& name);

}  // namespace subgeo
