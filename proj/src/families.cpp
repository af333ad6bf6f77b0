#include "subgeo/families.hpp"

#include "subgeo/errors.hpp"

namespace subgeo {

std::vector<BuiltinFamily> builtin_families() {
  return {
      {"tensor(1,2)", 0.25, "C ⊂ M2"},
      {"tensor(1,3)", 1.0 / 9.0, "C ⊂ M3"},
      {"tensor(2,2)", 0.25, "M2 ⊗ 1 ⊂ M2 ⊗ M2"},
      {"group_flip(scalars)", 0.5, "C ⊂ C ⊕ C"},
      {"group_flip(M2,flip)", 0.5, "M2 ⊂ M2 ⋊ Z2, θ = Ad diag(1, -1)"},
  };
}

Inclusion make_builtin_family(const std::string& name) {
  if (name == "tensor(1,2)") return make_tensor_inclusion(1, 2);
  if (name == "tensor(1,3)") return make_tensor_inclusion(1, 3);
  if (name == "tensor(2,2)") return make_tensor_inclusion(2, 2);
  if (name == "group_flip(scalars)") {
    Inclusion inc = make_group_flip_inclusion({{1}, {1.0}}, Theta{});
    inc.family.label = name;
    return inc;
  }
  if (name == "group_flip(M2,flip)") {
    Theta t;
    t.kind = Theta::Kind::conjugation;
    t.signs = {1.0, -1.0};
    Inclusion inc = make_group_flip_inclusion({{2}, {0.5}}, t);
    inc.family.label = name;
    return inc;
  }
  throw DomainError("unknown family '" + name + "'");
}

}  // namespace subgeo
