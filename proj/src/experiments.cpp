#include "subgeo/experiments.hpp"

#include "subgeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subgeo {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

ComplexMatrix random_ah_with_norm(const TracialAlgebra& m, Rng& rng, double norm) {
  return with_op_norm(m.random_antihermitian(rng), norm);
}

}  // namespace

OrbitPoint random_orbit_point(const BasicConstruction& bc, Rng& rng, double spread) {
  const TracialAlgebra& m = bc.inclusion().m_algebra;
  const ComplexMatrix a = random_ah_with_norm(m, rng, spread * rng.uniform(0.1, 1.0));
  return orbit_point(bc, linalg::expm_antihermitian(a));
}

// ---------------------------------------------------------------------------

namespace {

// Richardson on the 4th-order length rule: the curve is sampled at 2n, the n-grid uses every other sample.
double extrapolated_length(const BasicConstruction& bc, const DiscreteCurve& fine, LengthMetric metric) {
  const std::vector<ComplexMatrix> pf = fine.projections();
  std::vector<ComplexMatrix> pc;
  for (std::size_t k = 0; k < pf.size(); k += 2) pc.push_back(pf[k]);
  const double lf = m1_path_length(bc, pf, metric);
  const double lc = m1_path_length(bc, pc, metric);
  return (16.0 * lf - lc) / 15.0;
}

}  // namespace

MinimalityReport minimality_experiment(const BasicConstruction& bc, const OrbitPoint& q0, const ComplexMatrix& z,
                                       int n_trials, double scale, std::uint64_t seed, int grid_n,
                                       double probe_radius) {
  const double end_distance = linalg::op_norm(geodesic_at(bc, q0, z, 1.0).q - q0.q);
  if (end_distance > probe_radius) {
    throw RadiusError("minimality_experiment: geodesic end point at distance " + fmt(end_distance) +
                      " exceeds the probe radius " + fmt(probe_radius));
  }
  if (grid_n < 2) throw DomainError("minimality_experiment: grid_n must be at least 2");
  const TracialAlgebra& m = bc.inclusion().m_algebra;
  const DiscreteCurve geo = sample_geodesic(bc, q0, z, 2 * grid_n);

  MinimalityReport rep;
  rep.geodesic_l2 = extrapolated_length(bc, geo, LengthMetric::two_norm);
  rep.geodesic_linf = extrapolated_length(bc, geo, LengthMetric::op_norm);

  for (int i = 0; i < n_trials; ++i) {
    Rng rng(trial_seed(seed, static_cast<std::uint64_t>(i)));
    const ComplexMatrix w = random_ah_with_norm(m, rng, 1.0);
    const int a = rng.uniform_int(1, 3);
    const int b = rng.uniform_int(1, 3);
    const double t_peak = static_cast<double>(a) / (a + b);
    const double peak = std::pow(t_peak, a) * std::pow(1.0 - t_peak, b);
    auto bump = [=](double t) { return std::pow(t, a) * std::pow(1.0 - t, b) / peak; };

    const ComplexMatrix& u0 = q0.witness_u;
    auto lift = [&](double t) -> ComplexMatrix {
      const ComplexMatrix et = linalg::expm_antihermitian(linalg::antihermitian_part(ComplexMatrix(t * z)));
      const ComplexMatrix ew = linalg::expm_antihermitian(ComplexMatrix(scale * bump(t) * w));
      return et * ew * u0;
    };
    const DiscreteCurve c = sample_witness_path(bc, lift, 2 * grid_n);

    MinimalityTrial tr;
    tr.index = i;
    tr.l2 = extrapolated_length(bc, c, LengthMetric::two_norm);
    tr.linf = extrapolated_length(bc, c, LengthMetric::op_norm);
    for (const OrbitPoint& s : c.samples) tr.max_distance = std::max(tr.max_distance, linalg::op_norm(s.q - q0.q));
    tr.admissible = tr.max_distance <= probe_radius;
    tr.l2_violation = tr.admissible && tr.l2 < rep.geodesic_l2 - 1e-8;
    tr.dichotomy_violation = tr.l2_violation && tr.linf < rep.geodesic_linf - 1e-8;
    rep.admissible += tr.admissible ? 1 : 0;
    rep.violations += tr.l2_violation ? 1 : 0;
    rep.dichotomy_violations += tr.dichotomy_violation ? 1 : 0;
    rep.trials.push_back(tr);
  }
  return rep;
}

// ---------------------------------------------------------------------------

double convexity_radius() { return std::sqrt(2.0 - std::sqrt(2.0)); }

ConvexityReport convexity_probe(const Inclusion& inc, const ComplexMatrix& u0, const ComplexMatrix& u1,
                                const ComplexMatrix& u2, int grid_n) {
  if (grid_n < 2) throw DomainError("convexity_probe: grid_n must be at least 2");
  const double r = convexity_radius();
  const double d01 = linalg::op_norm(u0 - u1);
  const double d02 = linalg::op_norm(u0 - u2);
  const double d12 = linalg::op_norm(u1 - u2);
  if (std::max({d01, d02, d12}) >= r) {
    throw RadiusError("convexity_probe: pairwise distances (" + fmt(d01) + ", " + fmt(d02) + ", " + fmt(d12) +
                      ") must stay below " + fmt(r));
  }
  const TracialAlgebra& m = inc.m_algebra;
  const ComplexMatrix l12 = linalg::log_unitary_principal(u1.adjoint() * u2);

  ConvexityReport rep;
  const double h = 1.0 / grid_n;
  for (int k = 0; k <= grid_n; ++k) {
    const double s = k * h;
    const ComplexMatrix delta = u1 * linalg::expm_antihermitian(ComplexMatrix(s * l12));
    const double d = m.two_norm(linalg::log_unitary_principal(u0.adjoint() * delta));
    rep.s.push_back(s);
    rep.f.push_back(d * d);
  }
  rep.min_second_difference = 0.0;
  for (int k = 1; k < grid_n; ++k) {
    const double dd = (rep.f[k - 1] - 2.0 * rep.f[k] + rep.f[k + 1]) / (h * h);
    rep.second_differences.push_back(dd);
    if (k == 1 || dd < rep.min_second_difference) rep.min_second_difference = dd;
  }
  rep.passed = rep.min_second_difference >= -1e-8;
  return rep;
}

UnitaryTriple random_admissible_triple(const Inclusion& inc, Rng& rng) {
  const TracialAlgebra& m = inc.m_algebra;
  const double r = convexity_radius();
  for (;;) {
    UnitaryTriple t;
    t.u0 = linalg::expm_antihermitian(random_ah_with_norm(m, rng, rng.uniform(0.05, 0.35)));
    t.u1 = linalg::expm_antihermitian(random_ah_with_norm(m, rng, rng.uniform(0.05, 0.35)));
    t.u2 = linalg::expm_antihermitian(random_ah_with_norm(m, rng, rng.uniform(0.05, 0.35)));
    if (linalg::op_norm(t.u0 - t.u1) < r && linalg::op_norm(t.u0 - t.u2) < r && linalg::op_norm(t.u1 - t.u2) < r) {
      return t;
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<double> default_probe_radii() { return {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}; }

RadiusProbeReport radius_probe(const BasicConstruction& bc, const std::vector<double>& radii, int n_trials,
                               std::uint64_t seed, double tol) {
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  const TracialAlgebra& m = bc.inclusion().m_algebra;

  RadiusProbeReport rep;
  std::vector<bool> all_pass(sorted.size(), true);
  for (int i = 0; i < n_trials; ++i) {
    Rng rng(trial_seed(seed, static_cast<std::uint64_t>(i)));
    const OrbitPoint q0 = random_orbit_point(bc, rng);
    const ComplexMatrix d = with_op_norm(random_horizontal_at(bc, q0, rng), 1.0);
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      RadiusProbeRow row;
      row.trial = i;
      row.radius = sorted[k];
      const ComplexMatrix z0 = sorted[k] * d;
      const OrbitPoint q1 = geodesic_at(bc, q0, z0, 1.0);
      row.distance = linalg::op_norm(q1.q - q0.q);
      try {
        const LogResult lg = orbit_log(bc, q0, q1, 1e-10);
        row.residual = lg.residual;
        row.iterations = lg.iterations;
        row.recovered_error = m.two_norm(lg.z - z0);
        row.passed = row.recovered_error <= tol;
        if (!row.passed) row.error = "converged to a different logarithm";
      } catch (const ConvergenceError& e) {
        row.residual = e.residual();
        row.error = e.what();
      } catch (const RadiusError& e) {
        row.error = e.what();
      }
      if (!row.passed) all_pass[k] = false;
      rep.rows.push_back(std::move(row));
    }
  }
  if (n_trials > 0) {
    for (std::size_t k = 0; k < sorted.size() && all_pass[k]; ++k) rep.largest_passing_radius = sorted[k];
  }
  return rep;
}

}  // namespace subgeo
