#pragma once

// Local cross sections, the local Riemannian logarithm of O(p) and
// polygonal (piecewise geodesic) shortening of sampled curves.

#include "subgeo/curves.hpp"

#include <vector>

namespace subgeo {

/// x = ½ log((2p2 - 1)(2p1 - 1)): p1-codiagonal, ||x|| < π/2, e^x p1 e^{-x} = p2.
/// Throws RadiusError when ||p1 - p2|| >= 1.
ComplexMatrix grassmann_section(const ComplexMatrix& p1, const ComplexMatrix& p2);

/// θ_p(q) = (1/λ) E1(s_p(q) p), a unitary of M with θ p θ* = q. Throws RadiusError when ||q - p|| >= 1.
ComplexMatrix orbit_section_theta(const BasicConstruction& bc, const OrbitPoint& q);

struct LogResult {
  ComplexMatrix z;  // horizontal at q0
  double residual = 0.0;  // ||e^z q0 e^{-z} - q1||_2
  int iterations = 0;
};

/// Damped fixed-point iteration z ← z + κ(Π(e^{-z} q1 e^{z} - q0)) in the frame of q0.
/// Throws RadiusError when ||q0 - q1|| > 0.5 and ConvergenceError after max_iter steps.
LogResult orbit_log(const BasicConstruction& bc, const OrbitPoint& q0, const OrbitPoint& q1, double tol = 1e-8,
                    int max_iter = 100);

struct GeodesicArc {
  double t_start = 0.0;
  double t_end = 0.0;
  OrbitPoint base;
  ComplexMatrix z;
  double l2 = 0.0;  // √(2λ) ||z||_2
};

struct PolygonalResult {
  std::vector<GeodesicArc> arcs;
  double polygonal_length = 0.0;
  double curve_length = 0.0;
};

/// Greedy partition with gaps below min(segment_bound, 0.5), joined by orbit_log arcs.
/// Throws DomainError when two consecutive samples are already too far apart and
/// RefinementError when a segment logarithm fails.
PolygonalResult shorten_to_polygonal(const BasicConstruction& bc, const DiscreteCurve& curve, double segment_bound);

/// ||[z_out - z_in, q]||_2 at a corner q of a piecewise geodesic.
double corner_jump(const BasicConstruction& bc, const OrbitPoint& corner, const ComplexMatrix& z_in,
                   const ComplexMatrix& z_out);

}  // namespace subgeo
