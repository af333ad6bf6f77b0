#pragma once

// Points and tangent vectors of the unitary orbit O(p) = {u p u* : u ∈ U_M}.

#include "subgeo/basic_construction.hpp"

namespace subgeo {

/// q = L(u) p L(u)* together with its witness unitary u ∈ M.
struct OrbitPoint {
  ComplexMatrix q;          // D x D projection in M1
  ComplexMatrix witness_u;  // n x n unitary in M
};

/// z ∈ H_q and its ambient form zq - qz.
struct TangentVector {
  ComplexMatrix z;
  ComplexMatrix ambient;
};

OrbitPoint base_point(const BasicConstruction& bc);
/// Throws DomainError if u is not a unitary of M.
OrbitPoint orbit_point(const BasicConstruction& bc, const ComplexMatrix& u);
/// Worst violation of q² = q = q*, τ1(q) = λ, E1(q) = λ and L(u)pL(u)* = q.
double orbit_point_defect(const BasicConstruction& bc, const OrbitPoint& point);
/// Conjugation of a point by a unitary w ∈ M (new witness w u).
OrbitPoint translate(const BasicConstruction& bc, const ComplexMatrix& w, const OrbitPoint& point);

/// E_q(x) = u E(u* x u) u*.
ComplexMatrix translated_expectation(const BasicConstruction& bc, const OrbitPoint& point,
                                     const ComplexMatrix& x);
/// Component of (x - x*)/2 in H_q = ker E_q ∩ M_ah.
ComplexMatrix horizontal_projection_at(const BasicConstruction& bc, const OrbitPoint& point,
                                       const ComplexMatrix& x);
/// max(||z + z*||_2, ||E_q(z)||_2).
double horizontal_defect_at(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& z);
ComplexMatrix random_horizontal_at(const BasicConstruction& bc, const OrbitPoint& point, Rng& rng);

/// δ_q(z) = zq - qz. Throws DomainError if z is not horizontal at q.
TangentVector delta_q(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& z);

/// Π_q(x) = (1/2λ)[E1(xq - qx), q]. Throws DomainError on non-Hermitian x.
ComplexMatrix tangent_projection(const BasicConstruction& bc, const OrbitPoint& point,
                                 const ComplexMatrix& x);

/// The horizontal z with δ_q(z) = v. Throws DomainError if v is not tangent at q.
ComplexMatrix kappa_q(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& v);

/// κ_q(Π_q(x)) without the tangency check; x Hermitian in M1.
ComplexMatrix kappa_projected(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& x);

/// e^{tz} q e^{-tz} with witness e^{tz} u.
OrbitPoint geodesic_at(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& z, double t);

/// Scale z so that its operator norm equals `norm` (z = 0 stays 0).
ComplexMatrix with_op_norm(const ComplexMatrix& z, double norm);

}  // namespace subgeo
