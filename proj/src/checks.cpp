#include "subgeo/checks.hpp"

#include "subgeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace subgeo {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

CheckRecord record(std::string name, std::string anchor) {
  CheckRecord r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.passed = true;
  return r;
}

// Fold one sample into a record: `defect` must stay <= tol.
void absorb(CheckRecord& r, double defect, double tol) {
  r.worst_defect = std::max(r.worst_defect, defect);
  if (!(defect <= tol)) r.passed = false;
  ++r.samples;
}

void fail(CheckRecord& r, const std::string& why) {
  r.passed = false;
  if (r.detail.empty()) r.detail = why;
}

Rng trial_rng(const CheckContext& ctx, int i) { return Rng(trial_seed(ctx.seed, static_cast<std::uint64_t>(i))); }

ComplexMatrix random_n_perp(const Inclusion& inc, Rng& rng) {
  const ComplexMatrix x = inc.m_algebra.random_element(rng);
  return x - expectation_E(inc, x);
}

ComplexMatrix random_n_perp_ah(const Inclusion& inc, Rng& rng) {
  const ComplexMatrix x = inc.m_algebra.random_antihermitian(rng);
  return linalg::antihermitian_part(ComplexMatrix(x - expectation_E(inc, x)));
}

ComplexMatrix normalized1(const BasicConstruction& bc, const ComplexMatrix& y) {
  const double n = bc.two_norm1(y);
  return n > 0.0 ? ComplexMatrix(y / n) : y;
}

}  // namespace

// ---------------------------------------------------------------------------

Tolerances Tolerances::defaults() {
  Tolerances t;
  t.values = {
      {"construction", 1e-10},   {"recovery", 1e-8},       {"isometry", 1e-10},
      {"projection", 1e-10},     {"geodesic", 1e-8},       {"lift_reconstruction", 1e-6},
      {"lift_slack", 1e-5},      {"lift_equality", 1e-6}, {"energy", 1e-6},
      {"norm_bounds", 1e-10},    {"log_roundtrip", 1e-7},  {"log_distance", 1e-9},
      {"minimality", 1e-8},      {"convexity", 1e-8},      {"polygonal", 1e-6},
      {"block_exp", 1e-10},      {"effectiveness", 1e-8},  {"splitting", 1e-9},
      {"membership", 1e-9},      {"forward", 1e-9},        {"closed_form", 1e-10},
  };
  return t;
}

double Tolerances::operator[](const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw DomainError("unknown tolerance '" + key + "'");
  return it->second;
}

void Tolerances::set(const std::string& key, double value) {
  if (!values.count(key)) throw DomainError("unknown tolerance '" + key + "'");
  if (!(value > 0.0)) throw DomainError("tolerance '" + key + "' must be positive");
  values[key] = value;
}

std::function<ComplexMatrix(double)> random_witness_path(const Inclusion& inc, Rng& rng, double scale) {
  const TracialAlgebra& m = inc.m_algebra;
  const ComplexMatrix a0 = with_op_norm(m.random_antihermitian(rng), rng.uniform(0.2, 1.0));
  const ComplexMatrix a1 = with_op_norm(m.random_antihermitian(rng), scale * rng.uniform(0.05, 0.3));
  const ComplexMatrix a2 = with_op_norm(m.random_antihermitian(rng), scale * rng.uniform(0.05, 0.2));
  const ComplexMatrix a3 = with_op_norm(m.random_antihermitian(rng), scale * rng.uniform(0.0, 0.15));
  const ComplexMatrix e0 = linalg::expm_antihermitian(a0);
  return [=](double t) -> ComplexMatrix {
    const ComplexMatrix g = t * a1 + t * t * a2 + std::sin(std::numbers::pi * t) * a3;
    return linalg::expm_antihermitian(linalg::antihermitian_part(g)) * e0;
  };
}

ComplexMatrix random_orbit_preserving(const BasicConstruction& bc, Rng& rng) {
  const TracialAlgebra& m = bc.inclusion().m_algebra;
  const ComplexMatrix& p = bc.jones_p();
  const ComplexMatrix q = bc.identity1() - p;
  const ComplexMatrix v = linalg::expm_antihermitian(with_op_norm(m.random_antihermitian(rng), rng.uniform(0.1, 2.0)));
  const ComplexMatrix h1 = bc.m1().random_hermitian(rng);
  const ComplexMatrix h2 = bc.m1().random_hermitian(rng);
  const ComplexMatrix h = with_op_norm(linalg::hermitian_part(ComplexMatrix(p * h1 * p + q * h2 * q)), 1.5);
  return bc.left_rep(v) * linalg::expm_antihermitian(ComplexMatrix(Complex(0.0, 1.0) * h));
}

// ---------------------------------------------------------------------------
// construction

std::vector<CheckRecord> check_construction(const CheckContext& ctx, int n) {
  const ConstructionReport rep = verify_construction_properties(ctx.bc, n, ctx.seed);
  const double tol = ctx.tol["construction"];
  std::vector<CheckRecord> out;
  for (const PropertyCheck& p : rep.properties) {
    CheckRecord r = record("property_" + std::to_string(p.index), p.anchor);
    r.worst_defect = p.worst_defect;
    r.samples = p.samples;
    r.passed = p.passed && p.worst_defect <= tol;
    if (!p.passed) r.detail = "property check failed";
    out.push_back(r);
  }
  CheckRecord dims = record("dimensions", "{p}′ ∩ M = N");
  dims.samples = 1;
  dims.passed = rep.commutant_dimension == rep.n_dimension;
  dims.detail = "dim N = " + std::to_string(rep.n_dimension) + ", dim {p}' ∩ M = " +
                std::to_string(rep.commutant_dimension) + ", dim M1 = " + std::to_string(rep.m1_dimension) +
                ", dim Z(M1) = " + std::to_string(rep.center_dimension);
  out.push_back(dims);
  CheckRecord sharp = record("lambda_sharp", "E(x*x) ≥ λ x*x");
  sharp.samples = 1;
  sharp.worst_defect = std::max(0.0, rep.sharpness_margin);
  sharp.passed = rep.lambda_sharp;
  sharp.detail = "margin at λ + 1e-3: " + fmt(rep.sharpness_margin);
  out.push_back(sharp);
  return out;
}

CheckRecord check_unitary_recovery(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  CheckRecord r = record("unitary_recovery", "up = ωp");
  const double tol = ctx.tol["recovery"];
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const ComplexMatrix omega = random_orbit_preserving(bc, rng);
    try {
      const ComplexMatrix u = recover_unitary(bc, omega);
      const ComplexMatrix& p = bc.jones_p();
      absorb(r, std::max(linalg::unitary_defect(u), linalg::op_norm(bc.left_rep(u) * p - omega * p)), tol);
    } catch (const Error& e) {
      ++r.samples;
      fail(r, e.what());
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// metric

CheckRecord check_isometry(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const TracialAlgebra& m = bc.inclusion().m_algebra;
  const double s = std::sqrt(2.0 * bc.lambda());
  CheckRecord r = record("isometry", "‖δ_q(z)‖₂ = √(2λ)‖z‖₂");
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const OrbitPoint q = random_orbit_point(bc, rng);
    const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q, rng), rng.uniform(0.1, 2.0));
    const TangentVector v = delta_q(bc, q, z);
    absorb(r, std::abs(bc.two_norm1(v.ambient) - s * m.two_norm(z)), ctx.tol["isometry"]);
  }
  return r;
}

std::vector<CheckRecord> check_tangent_projection(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const Inclusion& inc = bc.inclusion();
  const double tol = ctx.tol["projection"];
  CheckRecord idem = record("projection_idempotent", "[E₁(xp − px), p]");
  CheckRecord sym = record("projection_symmetric", "[E₁(xp − px), p]");
  CheckRecord fix = record("projection_fixes_tangent", "{xq−qx : x ∈ M_ah}");
  CheckRecord kill = record("projection_kills_normal", "[E₁(xp − px), p]");
  const ComplexMatrix& p = bc.jones_p();
  const ComplexMatrix one = bc.identity1();
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const OrbitPoint q = random_orbit_point(bc, rng);
    const ComplexMatrix x = normalized1(bc, bc.m1().random_hermitian(rng));
    const ComplexMatrix y = normalized1(bc, bc.m1().random_hermitian(rng));
    const ComplexMatrix px = tangent_projection(bc, q, x);
    const ComplexMatrix py = tangent_projection(bc, q, y);
    absorb(idem, bc.two_norm1(tangent_projection(bc, q, px) - px), tol);
    absorb(sym, std::abs(bc.tau1(px * y) - bc.tau1(x * py)), tol);

    const ComplexMatrix lz = bc.left_rep(with_op_norm(random_horizontal_at(bc, q, rng), 1.0));
    const ComplexMatrix v = lz * q.q - q.q * lz;
    absorb(fix, bc.two_norm1(tangent_projection(bc, q, v) - v), tol);

    const ComplexMatrix a = bc.m1().random_hermitian(rng);
    const ComplexMatrix b = bc.m1().random_hermitian(rng);
    const ComplexMatrix hh = inc.m_algebra.random_hermitian(rng);
    const ComplexMatrix lh = bc.left_rep(linalg::hermitian_part(ComplexMatrix(hh - expectation_E(inc, hh))));
    const ComplexMatrix nu0 = p * a * p + (one - p) * b * (one - p) + lh * p + p * lh;
    const ComplexMatrix lu = bc.left_rep(q.witness_u);
    const ComplexMatrix nu = normalized1(bc, linalg::hermitian_part(ComplexMatrix(lu * nu0 * lu.adjoint())));
    absorb(kill, bc.two_norm1(tangent_projection(bc, q, nu)), tol);
  }
  return {idem, sym, fix, kill};
}

CheckRecord check_commutator_bound(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const ComplexMatrix& p = bc.jones_p();
  const OrbitPoint base = base_point(bc);
  CheckRecord r = record("commutator_lower_bound", "‖zp − pz‖ ≥ √λ‖z‖");
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, base, rng), rng.uniform(0.1, 2.0));
    const ComplexMatrix lz = bc.left_rep(z);
    const double lhs = linalg::op_norm(lz * p - p * lz);
    const double rhs = std::sqrt(bc.lambda()) * linalg::op_norm(z);
    absorb(r, std::max(0.0, rhs - lhs), ctx.tol["norm_bounds"]);
  }
  return r;
}

CheckRecord check_displacement_bound(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const ComplexMatrix& p = bc.jones_p();
  const OrbitPoint base = base_point(bc);
  const double sl = std::sqrt(bc.lambda());
  CheckRecord r = record("orbit_displacement_lower_bound", "‖e^z p e^{−z} − p‖ ≥ ‖z‖(√λ − ‖z‖)");
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, base, rng), rng.uniform(0.0, 1.0) * sl);
    const double nz = linalg::op_norm(z);
    const ComplexMatrix lw = bc.left_rep(linalg::expm_antihermitian(z));
    const double lhs = linalg::op_norm(lw * p * lw.adjoint() - p);
    absorb(r, std::max(0.0, nz * (sl - nz) - lhs), ctx.tol["norm_bounds"]);
  }
  return r;
}

CheckRecord check_geodesic_equation(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  CheckRecord r = record("geodesic_equation", "DX/dt = Π_γ(Ẋ)");
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const OrbitPoint q = random_orbit_point(bc, rng);
    const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q, rng), rng.uniform(0.1, 1.0));
    absorb(r, geodesic_residual(bc, sample_geodesic(bc, q, z, ctx.grid_n)), ctx.tol["geodesic"]);
  }
  return r;
}

std::vector<CheckRecord> check_orbit_log(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const TracialAlgebra& m = bc.inclusion().m_algebra;
  const double s = std::sqrt(2.0 * bc.lambda());
  CheckRecord trip = record("log_roundtrip", "e^z q0 e^{−z} = q1");
  CheckRecord dist = record("log_distance_bound", "d_M(p₁,p₂) ≥ ‖p₁ − p₂‖₂");
  double ratio_max = 0.0;
  int iter_max = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const OrbitPoint q0 = random_orbit_point(bc, rng);
    const ComplexMatrix z0 = with_op_norm(random_horizontal_at(bc, q0, rng), rng.uniform(0.01, 0.3));
    const OrbitPoint q1 = geodesic_at(bc, q0, z0, 1.0);
    try {
      const LogResult lg = orbit_log(bc, q0, q1);
      iter_max = std::max(iter_max, lg.iterations);
      absorb(trip, m.two_norm(lg.z - z0), ctx.tol["log_roundtrip"]);
      const double dm = s * m.two_norm(lg.z);
      const double d2 = bc.two_norm1(q0.q - q1.q);
      ratio_max = std::max(ratio_max, d2 > 0.0 ? dm / d2 : 1.0);
      absorb(dist, std::max(0.0, d2 - dm), ctx.tol["log_distance"]);
    } catch (const Error& e) {
      ++trip.samples;
      fail(trip, e.what());
    }
  }
  trip.detail = trip.detail.empty() ? "max iterations " + std::to_string(iter_max) : trip.detail;
  dist.detail = "max d_M / ||.||_2 ratio " + fmt(ratio_max);
  return {trip, dist};
}

// ---------------------------------------------------------------------------
// lifts

std::vector<CheckRecord> check_lifts(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const Inclusion& inc = bc.inclusion();
  const double lambda = bc.lambda();
  const double slack = ctx.tol["lift_slack"];
  CheckRecord recon = record("lift_reconstruction", "Γ̇ = κ_γ(γ̇)Γ");
  CheckRecord ident = record("lift_length_identity", "L₂(γ) = √(2λ) L₂(Γ)");
  CheckRecord endpoint = record("lift_endpoint_bound", "‖Γ(1) − 1‖ ≤ L_∞(γ)/√λ");
  CheckRecord min_l2 = record("horizontal_lift_minimal_l2", "L₂(Γ) ≤ L₂(u)");
  CheckRecord min_linf = record("horizontal_lift_minimal_linf", "L_∞(Γ) ≤ 2L_∞(u)");
  CheckRecord equality = record("horizontal_lift_equality_case", "u(t) = Γ(t)v₀");
  CheckRecord m1_lift = record("lift_versus_m1_lift", "L₂(Γ) ≤ L₂(ω)/√λ");
  CheckRecord energy = record("energy_length", "L₂(γ)² ≤ F₂(γ)");

  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const auto u_of_t = random_witness_path(inc, rng);
    try {
      const DiscreteCurve curve = sample_witness_path(bc, u_of_t, ctx.grid_n);
      const LiftResult lift = horizontal_lift(bc, curve);
      const int m = curve.grid_n() + 1;
      absorb(recon, std::max({lift.reconstruction_defect, lift.horizontality_defect, lift.unitarity_defect}),
             ctx.tol["lift_reconstruction"]);

      const double l2g = curve_length(bc, curve, LengthMetric::two_norm);
      const double linfg = curve_length(bc, curve, LengthMetric::op_norm);
      const double f2g = curve_length(bc, curve, LengthMetric::energy);
      const double l2G = lift_length(inc, lift.gamma, LengthMetric::two_norm);
      const double linfG = lift_length(inc, lift.gamma, LengthMetric::op_norm);
      absorb(ident, std::abs(l2g - std::sqrt(2.0 * lambda) * l2G), slack);
      const ComplexMatrix one = ComplexMatrix::Identity(inc.ambient_dim(), inc.ambient_dim());
      absorb(endpoint, std::max(0.0, linalg::op_norm(lift.gamma.back() - one) - linfg / std::sqrt(lambda)), slack);

      // Any other lift of the same curve starting at 1.
      const ComplexMatrix u0s = curve.samples.front().witness_u.adjoint();
      std::vector<ComplexMatrix> other(m);
      for (int k = 0; k < m; ++k) other[k] = curve.samples[k].witness_u * u0s;
      absorb(min_l2, std::max(0.0, l2G - lift_length(inc, other, LengthMetric::two_norm)), slack);
      absorb(min_linf, std::max(0.0, linfG - 2.0 * lift_length(inc, other, LengthMetric::op_norm)), slack);

      // Equality case: a lift Γ v0 with v0 commuting with γ(0) is horizontal again.
      const OrbitPoint& q0 = curve.samples.front();
      const ComplexMatrix nn = with_op_norm(inc.n_image.random_antihermitian(rng), 0.5);
      const ComplexMatrix v0 = q0.witness_u * linalg::expm_antihermitian(nn) * q0.witness_u.adjoint();
      std::vector<OrbitPoint> pts(m);
      std::vector<ComplexMatrix> shifted(m);
      for (int k = 0; k < m; ++k) {
        shifted[k] = lift.gamma[k] * v0;
        pts[k] = orbit_point(bc, shifted[k] * q0.witness_u);
      }
      const LiftResult again = horizontal_lift(bc, make_curve(std::move(pts)));
      double drift = 0.0;
      const ComplexMatrix v_start = again.gamma.front().adjoint() * shifted.front();
      for (int k = 0; k < m; ++k) drift = std::max(drift, linalg::op_norm(again.gamma[k].adjoint() * shifted[k] - v_start));
      const ComplexMatrix lv = bc.left_rep(v_start);
      drift = std::max(drift, linalg::op_norm(lv * q0.q - q0.q * lv));
      drift = std::max(drift, std::abs(lift_length(inc, shifted, LengthMetric::two_norm) - l2G));
      absorb(equality, drift, ctx.tol["lift_equality"]);

      // Lifts in U_{M1}: Γ times a path commuting with γ(0).
      const ComplexMatrix qq = q0.q;
      const ComplexMatrix qc = bc.identity1() - qq;
      const ComplexMatrix h1 = bc.m1().random_hermitian(rng);
      const ComplexMatrix h2 = bc.m1().random_hermitian(rng);
      const ComplexMatrix h = with_op_norm(linalg::hermitian_part(ComplexMatrix(qq * h1 * qq + qc * h2 * qc)),
                                           rng.uniform(0.1, 1.0));
      std::vector<ComplexMatrix> omega(m);
      double lifts_curve = 0.0;
      for (int k = 0; k < m; ++k) {
        const double t = static_cast<double>(k) / (m - 1);
        omega[k] = bc.left_rep(lift.gamma[k]) * linalg::expm_antihermitian(ComplexMatrix(Complex(0.0, t) * h));
        lifts_curve = std::max(lifts_curve, linalg::op_norm(omega[k] * qq * omega[k].adjoint() - curve.samples[k].q));
      }
      const double l2w = m1_path_length(bc, omega, LengthMetric::two_norm);
      absorb(m1_lift, std::max(lifts_curve, std::max(0.0, l2G - l2w / std::sqrt(lambda))), slack);

      // Energy against length, and equality on a constant-speed geodesic.
      double e_defect = std::max(0.0, l2g * l2g - f2g);
      const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q0, rng), rng.uniform(0.1, 1.0));
      const DiscreteCurve geo = sample_geodesic(bc, q0, z, ctx.grid_n);
      const double l2a = curve_length(bc, geo, LengthMetric::two_norm);
      e_defect = std::max(e_defect, std::abs(l2a * l2a - curve_length(bc, geo, LengthMetric::energy)));
      absorb(energy, e_defect, ctx.tol["energy"]);
    } catch (const Error& e) {
      for (CheckRecord* r : {&recon, &ident, &endpoint, &min_l2, &min_linf, &equality, &m1_lift, &energy}) {
        ++r->samples;
        fail(*r, e.what());
      }
    }
  }
  return {recon, ident, endpoint, min_l2, min_linf, equality, m1_lift, energy};
}

// ---------------------------------------------------------------------------
// variation

std::vector<CheckRecord> check_first_variation(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const Inclusion& inc = bc.inclusion();
  const TracialAlgebra& m = inc.m_algebra;
  CheckRecord gen = record("first_variation", "⟨x₀,y₀⟩|₀¹ − ∫⟨ẋ₀,y₀⟩");
  CheckRecord crit = record("first_variation_at_geodesic", "⟨x₀,y₀⟩|₀¹ − ∫⟨ẋ₀,y₀⟩");
  const int grid = ctx.grid_n;
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const ComplexMatrix w = with_op_norm(m.random_antihermitian(rng), 1.0);
    const double c0 = rng.normal(), c1 = rng.normal(), c2 = rng.normal();
    {
      const auto u_of_t = random_witness_path(inc, rng);
      VariationFamily fam;
      for (int k = 0; k <= grid; ++k) {
        const double t = static_cast<double>(k) / grid;
        const double phi = c0 + c1 * t + c2 * t * t;
        const ComplexMatrix g = u_of_t(t);
        fam.zero.push_back(g);
        fam.plus.push_back(g * linalg::expm_antihermitian(ComplexMatrix(fam.h * phi * w)));
        fam.minus.push_back(g * linalg::expm_antihermitian(ComplexMatrix(-fam.h * phi * w)));
      }
      const FirstVariationResult r = first_variation(inc, fam);
      absorb(gen, std::abs(r.formula - r.finite_difference), r.tolerance);
    }
    {
      const ComplexMatrix a = with_op_norm(m.random_antihermitian(rng), rng.uniform(0.1, 1.0));
      const ComplexMatrix u0 = linalg::expm_antihermitian(with_op_norm(m.random_antihermitian(rng), 1.0));
      VariationFamily fam;
      for (int k = 0; k <= grid; ++k) {
        const double t = static_cast<double>(k) / grid;
        const double phi = t * (1.0 - t) * (c0 + c1 * t);
        const ComplexMatrix g = linalg::expm_antihermitian(ComplexMatrix(t * a)) * u0;
        fam.zero.push_back(g);
        fam.plus.push_back(g * linalg::expm_antihermitian(ComplexMatrix(fam.h * phi * w)));
        fam.minus.push_back(g * linalg::expm_antihermitian(ComplexMatrix(-fam.h * phi * w)));
      }
      const FirstVariationResult r = first_variation(inc, fam);
      absorb(crit, std::max({std::abs(r.formula), std::abs(r.finite_difference), std::abs(r.formula - r.finite_difference)}),
             r.tolerance);
    }
  }
  return {gen, crit};
}

// ---------------------------------------------------------------------------
// minimality

std::vector<CheckRecord> check_minimality(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  Rng rng(ctx.seed ^ 0x6d696e696dULL);
  const OrbitPoint q0 = random_orbit_point(bc, rng);
  const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q0, rng), 0.3);
  const MinimalityReport rep =
      minimality_experiment(bc, q0, z, n, ctx.perturbation_scale, ctx.seed, ctx.grid_n, ctx.probe_radius);
  CheckRecord l2 = record("geodesic_minimal_l2", "L₂(γ) ≥ L₂(α)");
  CheckRecord dich = record("geodesic_length_dichotomy", "either L_∞(γ) ≥ L_∞(α), or L₂(γ) ≥ L₂(α)");
  for (const MinimalityTrial& t : rep.trials) {
    if (!t.admissible) continue;
    absorb(l2, std::max(0.0, rep.geodesic_l2 - t.l2), ctx.tol["minimality"]);
    dich.worst_defect = std::max(dich.worst_defect, std::min(std::max(0.0, rep.geodesic_l2 - t.l2),
                                                             std::max(0.0, rep.geodesic_linf - t.linf)));
    ++dich.samples;
  }
  l2.passed = rep.violations == 0;
  dich.passed = rep.dichotomy_violations == 0;
  l2.detail = std::to_string(rep.admissible) + " of " + std::to_string(n) + " trials admissible, " +
              std::to_string(rep.violations) + " violations";
  dich.detail = std::to_string(rep.dichotomy_violations) + " violations";
  return {l2, dich};
}

std::vector<CheckRecord> check_polygonal(const CheckContext& ctx) {
  const BasicConstruction& bc = ctx.bc;
  const TracialAlgebra& m = bc.inclusion().m_algebra;
  Rng rng(ctx.seed ^ 0x706f6c79ULL);
  const double tol = ctx.tol["polygonal"];
  CheckRecord geo = record("polygonal_geodesic", "∑ L₂(α_i) ≤ L₂(γ)");
  CheckRecord wig = record("polygonal_shortens", "∑ L₂(α_i) ≤ L₂(γ)");
  CheckRecord corner = record("polygonal_corner", "‖[z⁺ − z⁻, q_i]‖₂");
  try {
    const OrbitPoint q0 = random_orbit_point(bc, rng);
    const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q0, rng), 0.2);
    const PolygonalResult a = shorten_to_polygonal(bc, sample_geodesic(bc, q0, z, ctx.grid_n), 0.25);
    absorb(geo, std::abs(a.polygonal_length - a.curve_length), tol);
    if (a.arcs.size() != 1) fail(geo, std::to_string(a.arcs.size()) + " arcs for a single geodesic");

    const ComplexMatrix w = with_op_norm(m.random_antihermitian(rng), 1.0);
    auto lift = [&](double t) -> ComplexMatrix {
      const double b = 16.0 * t * t * (1.0 - t) * (1.0 - t);
      return linalg::expm_antihermitian(ComplexMatrix(t * z)) *
             linalg::expm_antihermitian(ComplexMatrix(ctx.perturbation_scale * b * w)) * q0.witness_u;
    };
    const PolygonalResult b = shorten_to_polygonal(bc, sample_witness_path(bc, lift, ctx.grid_n), 0.25);
    absorb(wig, std::max(0.0, b.polygonal_length - b.curve_length), tol);
    // A one-dimensional orbit only admits reparametrized geodesics here, so equality is expected.
    const bool one_dim = bc.dim() - bc.inclusion().n_image.dim() == 1;
    if (!one_dim && !(b.polygonal_length < b.curve_length)) fail(wig, "polygonal is not strictly shorter");
    wig.detail = "curve " + fmt(b.curve_length) + ", polygonal " + fmt(b.polygonal_length) + ", " +
                 std::to_string(b.arcs.size()) + " arcs" + (one_dim ? ", one-dimensional orbit" : "");

    const ComplexMatrix z1 = with_op_norm(random_horizontal_at(bc, q0, rng), 0.15);
    const OrbitPoint mid = geodesic_at(bc, q0, z1, 1.0);
    // On a one-dimensional orbit the only corner is a turn back.
    const ComplexMatrix z2 =
        one_dim ? ComplexMatrix(-0.5 * z1) : with_op_norm(random_horizontal_at(bc, mid, rng), 0.15);
    const int half = ctx.grid_n / 2;
    std::vector<OrbitPoint> pts;
    for (int k = 0; k <= half; ++k) pts.push_back(geodesic_at(bc, q0, z1, static_cast<double>(k) / half));
    for (int k = 1; k <= half; ++k) pts.push_back(geodesic_at(bc, mid, z2, static_cast<double>(k) / half));
    const double s = std::sqrt(2.0 * bc.lambda());
    const double two_arcs = s * (m.two_norm(z1) + m.two_norm(z2));
    const PolygonalResult c = shorten_to_polygonal(bc, make_curve(std::move(pts)), 0.5);
    const double jump = corner_jump(bc, mid, z1, z2);
    absorb(corner, std::max(0.0, c.polygonal_length - two_arcs), tol);
    if (!(c.polygonal_length < two_arcs) || !(jump > 1e-8)) fail(corner, "corner was not shortened");
    corner.detail = "two arcs " + fmt(two_arcs) + ", re-shortened " + fmt(c.polygonal_length) + ", jump " + fmt(jump);
  } catch (const Error& e) {
    for (CheckRecord* r : {&geo, &wig, &corner}) fail(*r, e.what());
  }
  return {geo, wig, corner};
}

// ---------------------------------------------------------------------------
// convexity

CheckRecord check_convexity(const CheckContext& ctx, int n) {
  const Inclusion& inc = ctx.bc.inclusion();
  CheckRecord r = record("convexity", "f(s) = d₂(u₀, δ(s))²");
  int failures = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const UnitaryTriple t = random_admissible_triple(inc, rng);
    const ConvexityReport c = convexity_probe(inc, t.u0, t.u1, t.u2, 64);
    absorb(r, std::max(0.0, -c.min_second_difference), ctx.tol["convexity"]);
    failures += c.passed ? 0 : 1;
  }
  r.detail = std::to_string(failures) + " negative second differences";
  return r;
}

// ---------------------------------------------------------------------------
// grassmann

std::vector<CheckRecord> check_block_exponential(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const Inclusion& inc = bc.inclusion();
  CheckRecord block = record("block_exponential", "cos²(√(E(|x|²)))p");
  CheckRecord eff = record("block_exponential_effective", "effective if ‖x‖ < π");
  double min_comm = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const ComplexMatrix x = with_op_norm(random_n_perp(inc, rng), rng.uniform(0.05, std::numbers::pi - 0.1));
    const double t = rng.uniform(0.0, 1.0);
    absorb(block, linalg::op_norm(grassmann_exp_block(bc, x, t) - grassmann_exp_dense(bc, x, t)),
           ctx.tol["block_exp"]);
    const double c = effectiveness_commutator(bc, x);
    min_comm = std::min(min_comm, c);
    ++eff.samples;
    if (!(c > ctx.tol["effectiveness"])) eff.passed = false;
  }
  eff.worst_defect = n > 0 ? min_comm : 0.0;
  eff.detail = "smallest commutator " + fmt(eff.worst_defect);
  return {block, eff};
}

CheckRecord check_tangent_splitting(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const Inclusion& inc = bc.inclusion();
  const ComplexMatrix& p = bc.jones_p();
  CheckRecord r = record("tangent_splitting", "(T P(M₁))_p = {xp + px* : x ∈ N^⊥}");
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const ComplexMatrix x = with_op_norm(random_n_perp(inc, rng), 1.0);
    const ComplexMatrix lx = bc.left_rep(x);
    const ComplexMatrix v = lx * p + p * lx.adjoint();
    const GrassmannTangent g = tangent_decompose(bc, v);
    const ComplexMatrix la = bc.left_rep(g.orbit_part);
    const ComplexMatrix lh = bc.left_rep(g.normal_part);
    const ComplexMatrix va = la * p + p * la.adjoint();
    const ComplexMatrix vh = lh * p + p * lh.adjoint();
    const double nv = bc.two_norm1(v);
    const double pyth = std::abs(nv * nv - std::pow(bc.two_norm1(va), 2) - std::pow(bc.two_norm1(vh), 2));
    absorb(r, std::max({inc.m_algebra.two_norm(g.x - x), pyth, std::abs(bc.tau1(va * vh).real())}),
           ctx.tol["splitting"]);
  }
  return r;
}

CheckRecord check_tangent_membership(const CheckContext& ctx) {
  CheckRecord r = record("tangent_membership", "E₁(y)=0");
  const TangentMembershipReport t = tangent_membership_check(ctx.bc, ctx.tol["membership"]);
  r.samples = 1;
  r.worst_defect = t.span_defect;
  r.passed = t.agrees;
  r.detail = "dim ker E1 = " + std::to_string(t.kernel_dimension) + ", dim T O(p) = " + std::to_string(t.orbit_dimension);
  return r;
}

// ---------------------------------------------------------------------------
// degeneracy

CheckRecord check_audit(const CheckContext& ctx, TotallyGeodesicReport* out) {
  const Inclusion& inc = ctx.bc.inclusion();
  const TotallyGeodesicReport a = totally_geodesic_audit(inc);
  CheckRecord r = record("totally_geodesic_audit", "(N^⊥)² ⊂ N");
  r.samples = a.basis_size;
  r.worst_defect = a.max_defect;
  r.passed = a.degeneracy_agrees;
  if (!a.holds) {
    if (!a.witness) {
      fail(r, "audit failed without a witness");
    } else {
      const auto& [wa, wb] = *a.witness;
      const ComplexMatrix s = wa * wb + wb * wa;
      if (!(inc.m_algebra.two_norm(s - expectation_E(inc, s)) > a.tolerance)) fail(r, "witness does not verify");
    }
  }
  r.detail = std::string(a.holds ? "holds" : "fails with witness") +
             (a.degeneracy_agrees ? "" : "; degeneracy test disagrees");
  if (out) *out = a;
  return r;
}

std::vector<CheckRecord> check_degeneracy(const CheckContext& ctx, int n) {
  const BasicConstruction& bc = ctx.bc;
  const Inclusion& inc = bc.inclusion();
  TotallyGeodesicReport audit;
  CheckRecord aud = check_audit(ctx, &audit);
  CheckRecord fwd = record("degenerate_forward", "x* = −x and x² ∈ N");
  CheckRecord closed = record("degenerate_closed_form", "p cos²(t|x|) + upu* sin²(t|x|) + ½[u, p]sin(2t|x|)");
  CheckRecord conv = record("degenerate_converse", "x* = −x and x² ∈ N");
  const int grid = 32;

  bool any = false;
  for (int i = 0; i < n; ++i) {
    Rng rng = trial_rng(ctx, i);
    const std::optional<ComplexMatrix> xo = random_degenerate_direction(inc, audit.holds, rng);
    if (!xo) break;
    any = true;
    const ComplexMatrix& x = *xo;
    if (!degeneracy_test(inc, x).degenerate) fail(fwd, "generated direction is not degenerate");
    absorb(fwd, orbit_grassmann_divergence(bc, x, grid), ctx.tol["forward"]);
    double d = 0.0;
    for (int k = 0; k <= grid; ++k) {
      const double t = static_cast<double>(k) / grid;
      const ComplexMatrix cf = degenerate_geodesic_closed_form(bc, x, t);
      d = std::max({d, linalg::op_norm(cf - orbit_curve_point(bc, x, t)),
                    linalg::op_norm(cf - grassmann_exp_block(bc, x, t))});
    }
    absorb(closed, d, ctx.tol["closed_form"]);
  }
  if (!any) {
    const ComplexMatrix zero = ComplexMatrix::Zero(inc.ambient_dim(), inc.ambient_dim());
    absorb(fwd, orbit_grassmann_divergence(bc, zero, grid), ctx.tol["forward"]);
    absorb(closed, linalg::op_norm(degenerate_geodesic_closed_form(bc, zero, 1.0) - bc.jones_p()),
           ctx.tol["closed_form"]);
    fwd.detail = closed.detail = "no nonzero degenerate direction in N^⊥; checked x = 0";
  }

  if (audit.holds) {
    conv.detail = "vacuous: every anti-Hermitian x in N^⊥ has x² ∈ N";
  } else {
    double smallest = std::numeric_limits<double>::infinity();
    const double threshold = 10.0 * ctx.tol["forward"];
    for (int i = 0; i < n; ++i) {
      Rng rng = trial_rng(ctx, i);
      ComplexMatrix x;
      do {
        x = with_op_norm(random_n_perp_ah(inc, rng), rng.uniform(0.3, 1.5));
      } while (degeneracy_test(inc, x).degenerate);
      const double div = orbit_grassmann_divergence(bc, x, grid);
      smallest = std::min(smallest, div);
      ++conv.samples;
      if (!(div > threshold)) conv.passed = false;
    }
    conv.worst_defect = n > 0 ? smallest : 0.0;
    conv.detail = "smallest divergence " + fmt(conv.worst_defect);
  }
  return {aud, fwd, closed, conv};
}

}  // namespace subgeo
