#include "subgeo/harness.hpp"

#include "subgeo/errors.hpp"
#include "subgeo/families.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace subgeo {

using json = nlohmann::json;

namespace {

std::string fmt(double v, const char* spec = "%.3e") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + key + "' in " + where + " is missing or has the wrong type");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
  return obj.at(key).get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer()) {
    throw ConfigError("'" + key + "' in " + where + " must be an integer");
  }
  return obj.at(key).get<int>();
}

std::vector<int> get_int_list(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_array() || obj.at(key).empty()) {
    throw ConfigError("'" + key + "' in " + where + " must be a non-empty list of integers");
  }
  std::vector<int> out;
  for (const auto& v : obj.at(key)) {
    if (!v.is_number_integer() || v.get<int>() < 1) throw ConfigError("'" + key + "' entries must be positive integers");
    out.push_back(v.get<int>());
  }
  return out;
}

std::vector<double> get_double_list(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.at(key).is_array()) throw ConfigError("'" + key + "' in " + where + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& v : obj.at(key)) {
    if (!v.is_number()) throw ConfigError("'" + key + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

AlgebraDescriptor descriptor(const json& obj, const std::string& blocks_key, const std::string& weights_key,
                             const std::string& where) {
  AlgebraDescriptor d;
  d.block_dims = get_int_list(obj, blocks_key, where);
  if (obj.contains(weights_key)) {
    d.trace_weights = get_double_list(obj, weights_key, where);
  } else {
    double s = 0.0;
    for (int n : d.block_dims) s += static_cast<double>(n) * n;
    for (int n : d.block_dims) d.trace_weights.push_back(n / s);
  }
  if (d.trace_weights.size() != d.block_dims.size()) throw ConfigError(weights_key + " must match " + blocks_key);
  try {
    d.validate();
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return d;
}

Complex parse_complex(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError("expected a number or a [re, im] pair");
}

ComplexMatrix parse_matrix(const json& v) {
  require_keys(v, {"re", "im"}, "generator");
  const json& re = v.at("re");
  if (!re.is_array() || re.empty()) throw ConfigError("generator 're' must be a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = static_cast<Eigen::Index>(re[0].size());
  ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
  for (const char* part : {"re", "im"}) {
    if (!v.contains(part)) continue;
    const json& a = v.at(part);
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != rows) throw ConfigError("generator rows mismatch");
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (!a[i].is_array() || static_cast<Eigen::Index>(a[i].size()) != cols) throw ConfigError("generator columns mismatch");
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (!a[i][j].is_number()) throw ConfigError("generator entries must be numbers");
        const double x = a[i][j].get<double>();
        m(i, j) += part[0] == 'r' ? Complex(x, 0.0) : Complex(0.0, x);
      }
    }
  }
  return m;
}

// Validates the inclusion block and fills defaults.
json normalize_inclusion(const json& in) {
  const std::string where = "inclusion";
  if (!in.is_object() || !in.contains("family") || !in.at("family").is_string()) {
    throw ConfigError("inclusion.family must be a string");
  }
  const std::string family = in.at("family").get<std::string>();
  json out = json::object();
  out["family"] = family;
  std::set<std::string> allowed = {"family", "lambda"};
  if (family == "tensor") {
    allowed.insert({"m", "k"});
    require_keys(in, allowed, where);
    const int m = get_int(in, "m", where);
    const int k = get_int(in, "k", where);
    if (m < 1 || k < 2) throw ConfigError("tensor requires m >= 1 and k >= 2");
    out["m"] = m;
    out["k"] = k;
  } else if (family == "group_flip") {
    allowed.insert({"n_blocks", "n_weights", "theta"});
    require_keys(in, allowed, where);
    const AlgebraDescriptor d = descriptor(in, "n_blocks", "n_weights", where);
    out["n_blocks"] = d.block_dims;
    out["n_weights"] = d.trace_weights;
    json theta = {{"kind", "identity"}};
    if (in.contains("theta")) {
      const json& t = in.at("theta");
      require_keys(t, {"kind", "signs"}, "inclusion.theta");
      const std::string kind = get_as<std::string>(t, "kind", "inclusion.theta");
      if (kind != "identity" && kind != "conjugation" && kind != "block_swap") {
        throw ConfigError("theta.kind must be identity, conjugation or block_swap");
      }
      theta["kind"] = kind;
      if (kind == "conjugation") {
        if (!t.contains("signs") || !t.at("signs").is_array()) throw ConfigError("conjugation needs a signs list");
        json signs = json::array();
        for (const auto& s : t.at("signs")) {
          const Complex c = parse_complex(s);
          signs.push_back(json::array({c.real(), c.imag()}));
        }
        theta["signs"] = signs;
      } else if (t.contains("signs")) {
        throw ConfigError("signs are only used by conjugation");
      }
    }
    out["theta"] = theta;
  } else if (family == "custom") {
    allowed.insert({"m_blocks", "m_weights", "generators"});
    require_keys(in, allowed, where);
    const AlgebraDescriptor d = descriptor(in, "m_blocks", "m_weights", where);
    out["m_blocks"] = d.block_dims;
    out["m_weights"] = d.trace_weights;
    if (!in.contains("lambda")) throw ConfigError("custom inclusions need an explicit lambda");
    if (!in.contains("generators") || !in.at("generators").is_array()) {
      throw ConfigError("custom inclusions need a generators list");
    }
    json gens = json::array();
    for (const auto& g : in.at("generators")) {
      const ComplexMatrix m = parse_matrix(g);
      json re = json::array(), im = json::array();
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rr = json::array(), ii = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          rr.push_back(m(i, j).real());
          ii.push_back(m(i, j).imag());
        }
        re.push_back(rr);
        im.push_back(ii);
      }
      gens.push_back({{"re", re}, {"im", im}});
    }
    out["generators"] = gens;
  } else {
    require_keys(in, allowed, where);
    bool known = false;
    for (const auto& b : builtin_families()) known = known || b.name == family;
    if (!known) throw ConfigError("unknown inclusion family '" + family + "'");
  }
  if (in.contains("lambda")) {
    const double l = get_number(in, "lambda", where);
    if (!(l > 0.0 && l <= 1.0)) throw ConfigError("lambda must lie in (0, 1]");
    out["lambda"] = l;
  }
  return out;
}

json record_json(const CheckRecord& r) {
  json j;
  j["name"] = r.name;
  j["paper_anchor"] = r.anchor;
  j["status"] = r.passed ? "pass" : "fail";
  j["worst_defect"] = r.worst_defect;
  j["samples"] = r.samples;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

std::string csv_number(double v) { return fmt(v, "%.17g"); }

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw ConfigError("a seed is required for this command");
  return *cfg.seed;
}

json header(const RunConfig& cfg, const Inclusion& inc) {
  json j;
  j["schema"] = 1;
  j["config_hash"] = config_hash(cfg);
  j["family"] = inc.family.label;
  j["lambda"] = inc.lambda;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& suite_order() {
  static const std::vector<std::string> order = {"construction", "metric",     "lifts",     "variation",
                                                 "minimality",   "convexity",  "grassmann", "degeneracy"};
  return order;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(j, {"inclusion", "seed", "suites", "grid", "tolerances", "output_dir", "probe_radius", "trials",
                   "perturbation_scale"},
               "config");
  RunConfig cfg;
  if (!j.contains("inclusion")) throw ConfigError("config needs an inclusion block");
  cfg.inclusion = normalize_inclusion(j.at("inclusion")).dump();
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("suites")) {
    if (!j.at("suites").is_array()) throw ConfigError("suites must be a list");
    std::set<std::string> chosen;
    for (const auto& s : j.at("suites")) {
      if (!s.is_string()) throw ConfigError("suite names must be strings");
      const std::string name = s.get<std::string>();
      const auto& order = suite_order();
      if (std::find(order.begin(), order.end(), name) == order.end()) throw ConfigError("unknown suite '" + name + "'");
      chosen.insert(name);
    }
    for (const auto& name : suite_order()) {
      if (chosen.count(name)) cfg.suites.push_back(name);
    }
  } else {
    cfg.suites = suite_order();
  }
  if (j.contains("grid")) {
    cfg.grid = get_int(j, "grid", "config");
    if (cfg.grid < 8) throw ConfigError("grid must be at least 8");
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    Tolerances probe = Tolerances::defaults();
    for (const auto& [key, value] : t.items()) {
      if (!value.is_number()) throw ConfigError("tolerance '" + key + "' must be a number");
      try {
        probe.set(key, value.get<double>());
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
      cfg.tolerances.emplace_back(key, value.get<double>());
    }
    std::sort(cfg.tolerances.begin(), cfg.tolerances.end());
  }
  if (j.contains("output_dir")) cfg.output_dir = get_as<std::string>(j, "output_dir", "config");
  if (j.contains("probe_radius")) {
    cfg.probe_radius = get_number(j, "probe_radius", "config");
    if (!(cfg.probe_radius > 0.0)) throw ConfigError("probe_radius must be positive");
  }
  if (j.contains("trials")) {
    cfg.trials = get_int(j, "trials", "config");
    if (cfg.trials < 0) throw ConfigError("trials must be non-negative");
  }
  if (j.contains("perturbation_scale")) {
    cfg.perturbation_scale = get_number(j, "perturbation_scale", "config");
    if (!(cfg.perturbation_scale >= 0.0)) throw ConfigError("perturbation_scale must be non-negative");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return parse_config(s.str());
}

std::string canonical_config(const RunConfig& cfg) {
  json j;
  j["inclusion"] = json::parse(cfg.inclusion);
  j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  j["suites"] = cfg.suites;
  j["grid"] = cfg.grid;
  json t = json::object();
  for (const auto& [k, v] : cfg.tolerances) t[k] = v;
  j["tolerances"] = t;
  j["probe_radius"] = cfg.probe_radius;
  j["trials"] = cfg.trials;
  j["perturbation_scale"] = cfg.perturbation_scale;
  j["spectral_tol"] = linalg::settings().spectral_tol;
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Inclusion make_inclusion(const RunConfig& cfg) {
  const json spec = json::parse(cfg.inclusion);
  const std::string family = spec.at("family").get<std::string>();
  Inclusion inc;
  try {
    if (family == "tensor") {
      inc = make_tensor_inclusion(spec.at("m").get<int>(), spec.at("k").get<int>());
    } else if (family == "group_flip") {
      AlgebraDescriptor d;
      d.block_dims = spec.at("n_blocks").get<std::vector<int>>();
      d.trace_weights = spec.at("n_weights").get<std::vector<double>>();
      Theta theta;
      const std::string kind = spec.at("theta").at("kind").get<std::string>();
      theta.kind = kind == "conjugation" ? Theta::Kind::conjugation
                   : kind == "block_swap" ? Theta::Kind::block_swap
                                          : Theta::Kind::identity;
      if (spec.at("theta").contains("signs")) {
        for (const auto& s : spec.at("theta").at("signs")) theta.signs.emplace_back(s[0].get<double>(), s[1].get<double>());
      }
      inc = make_group_flip_inclusion(d, theta);
    } else if (family == "custom") {
      AlgebraDescriptor d;
      d.block_dims = spec.at("m_blocks").get<std::vector<int>>();
      d.trace_weights = spec.at("m_weights").get<std::vector<double>>();
      std::vector<ComplexMatrix> gens;
      for (const auto& g : spec.at("generators")) gens.push_back(parse_matrix(g));
      inc = make_custom_inclusion(d, gens, spec.at("lambda").get<double>());
    } else {
      inc = make_builtin_family(family);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const ConstructionError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid inclusion: ") + e.what());
  }
  if (spec.contains("lambda")) inc = with_lambda(std::move(inc), spec.at("lambda").get<double>());
  return inc;
}

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& r) { return r.passed; });
}

// ---------------------------------------------------------------------------

namespace {

std::vector<CheckRecord> run_suite(const std::string& name, const CheckContext& ctx, int n) {
  std::vector<CheckRecord> out;
  auto add = [&](std::vector<CheckRecord> rs) { out.insert(out.end(), rs.begin(), rs.end()); };
  if (name == "construction") {
    add(check_construction(ctx, n));
    out.push_back(check_unitary_recovery(ctx, n));
  } else if (name == "metric") {
    out.push_back(check_isometry(ctx, n));
    add(check_tangent_projection(ctx, n));
    out.push_back(check_commutator_bound(ctx, n));
    out.push_back(check_displacement_bound(ctx, n));
    out.push_back(check_geodesic_equation(ctx, n));
    add(check_orbit_log(ctx, n));
  } else if (name == "lifts") {
    add(check_lifts(ctx, n));
  } else if (name == "variation") {
    add(check_first_variation(ctx, n));
  } else if (name == "minimality") {
    add(check_minimality(ctx, n));
    add(check_polygonal(ctx));
  } else if (name == "convexity") {
    out.push_back(check_convexity(ctx, n));
  } else if (name == "grassmann") {
    add(check_block_exponential(ctx, n));
    out.push_back(check_tangent_splitting(ctx, n));
    out.push_back(check_tangent_membership(ctx));
  } else if (name == "degeneracy") {
    add(check_degeneracy(ctx, n));
  }
  return out;
}

bool is_numerical(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConvergenceError&) {
    return true;
  } catch (const BranchError&) {
    return true;
  } catch (const RefinementError&) {
    return true;
  } catch (const ConsistencyError&) {
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace

VerifyOutcome cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  VerifyOutcome res;
  res.config_hash = config_hash(cfg);
  const Inclusion inc = make_inclusion(cfg);
  if (!cfg.suites.empty()) require_seed(cfg);

  json report = header(cfg, inc);
  report["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  report["suites"] = json::array();

  if (!cfg.suites.empty()) {
    try {
      const BasicConstruction bc = build_basic_construction(inc);
      CheckContext ctx{bc, *cfg.seed};
      for (const auto& [k, v] : cfg.tolerances) ctx.tol.set(k, v);
      ctx.grid_n = cfg.grid;
      ctx.probe_radius = cfg.probe_radius;
      ctx.perturbation_scale = cfg.perturbation_scale;
      for (const std::string& name : cfg.suites) {
        SuiteResult s;
        s.name = name;
        try {
          s.checks = run_suite(name, ctx, cfg.trials);
        } catch (const Error& e) {
          CheckRecord r;
          r.name = name + "_aborted";
          r.anchor = "";
          r.detail = e.what();
          s.checks.push_back(r);
          if (is_numerical(std::current_exception())) res.exit_code = exit_numerical_error;
        }
        res.suites.push_back(std::move(s));
      }
    } catch (const ConstructionError& e) {
      res.error = std::string("construction failed at property ") + std::to_string(e.property()) + ": " + e.what();
      res.exit_code = exit_check_failure;
    }
  }
  bool all = res.error.empty();
  for (const SuiteResult& s : res.suites) {
    json sj;
    sj["name"] = s.name;
    sj["status"] = s.passed() ? "pass" : "fail";
    sj["checks"] = json::array();
    for (const CheckRecord& r : s.checks) sj["checks"].push_back(record_json(r));
    report["suites"].push_back(sj);
    all = all && s.passed();
  }
  if (!res.error.empty()) report["error"] = res.error;
  report["status"] = all ? "pass" : (res.error.empty() ? "fail" : "error");
  if (res.exit_code == exit_pass && !all) res.exit_code = exit_check_failure;

  const std::filesystem::path path = std::filesystem::path(cfg.output_dir) / "report.json";
  write_text(path, report.dump(2) + "\n");

  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "family " << inc.family.label << "  lambda " << fmt(inc.lambda, "%.6g") << "  config " << res.config_hash
      << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-13s %-36s %-6s %12s %8s\n", "suite", "check", "status", "worst", "samples");
  out << line;
  for (const SuiteResult& s : res.suites) {
    for (const CheckRecord& r : s.checks) {
      std::snprintf(line, sizeof line, "%-13s %-36s %-6s %12.3e %8d\n", s.name.c_str(), r.name.c_str(),
                    r.passed ? "pass" : "FAIL", r.worst_defect, r.samples);
      out << line;
      if (!r.passed && !r.detail.empty()) out << "    " << r.detail << "\n";
    }
  }
  if (!res.error.empty()) out << "error: " << res.error << "\n";
  out << "status " << (all ? "pass" : "fail") << "  report " << path.string() << "  wall time "
      << fmt(res.wall_seconds, "%.2f") << " s\n";
  return res;
}

// ---------------------------------------------------------------------------

int cmd_geodesic(const RunConfig& cfg, const GeodesicOptions& opts, std::ostream& out) {
  if (cfg.grid < 1) throw ConfigError("the time grid needs at least 2 points");
  const Inclusion inc = make_inclusion(cfg);
  const BasicConstruction bc = build_basic_construction(inc);
  const TracialAlgebra& m = inc.m_algebra;

  OrbitPoint q0 = base_point(bc);
  if (opts.q0_witness_path) q0 = orbit_point(bc, linalg::read_matrix_file(*opts.q0_witness_path));
  ComplexMatrix z;
  if (opts.z_path) {
    z = linalg::read_matrix_file(*opts.z_path);
    if (z.rows() != inc.ambient_dim() || z.cols() != inc.ambient_dim()) throw ConfigError("z has the wrong shape");
  } else {
    Rng rng(require_seed(cfg));
    z = random_horizontal_at(bc, q0, rng);
    const double nz = m.two_norm(z);
    z = nz > 0.0 ? ComplexMatrix(z * (opts.z_norm / nz)) : z;
  }
  delta_q(bc, q0, z);  // validates horizontality

  const DiscreteCurve curve = sample_geodesic(bc, q0, z, cfg.grid);
  json side = header(cfg, inc);
  side["grid"] = cfg.grid;
  side["z_two_norm"] = m.two_norm(z);
  side["l2"] = curve_length(bc, curve, LengthMetric::two_norm);
  side["linf"] = curve_length(bc, curve, LengthMetric::op_norm);
  side["energy"] = curve_length(bc, curve, LengthMetric::energy);
  side["geodesic_residual"] = cfg.grid >= 5 ? json(geodesic_residual(bc, curve)) : json(nullptr);

  std::ostringstream csv;
  const Eigen::Index d = bc.dim();
  csv << "t";
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) csv << ",q_" << i << "_" << j << "_re,q_" << i << "_" << j << "_im";
  csv << "\n";
  for (int k = 0; k <= cfg.grid; ++k) {
    csv << csv_number(static_cast<double>(k) / cfg.grid);
    const ComplexMatrix& q = curve.samples[k].q;
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) csv << "," << csv_number(q(i, j).real()) << "," << csv_number(q(i, j).imag());
    csv << "\n";
  }
  const std::filesystem::path dir(cfg.output_dir);
  write_text(dir / "geodesic.csv", csv.str());
  write_text(dir / "geodesic.json", side.dump(2) + "\n");
  out << "L2 " << fmt(side["l2"].get<double>(), "%.10g") << "  Linf " << fmt(side["linf"].get<double>(), "%.10g")
      << "  F2 " << fmt(side["energy"].get<double>(), "%.10g") << "\n";
  out << "wrote " << (dir / "geodesic.csv").string() << " and " << (dir / "geodesic.json").string() << "\n";
  return exit_pass;
}

namespace {

OrbitPoint read_orbit_point(const BasicConstruction& bc, const std::string& path) {
  const ComplexMatrix a = linalg::read_matrix_file(path);
  const Eigen::Index n = bc.inclusion().ambient_dim();
  if (a.rows() == n && a.cols() == n && linalg::unitary_defect(a) <= 1e-8) return orbit_point(bc, a);
  if (a.rows() == bc.dim() && a.cols() == bc.dim()) {
    const OrbitPoint guess{a, ComplexMatrix::Identity(n, n)};
    const ComplexMatrix u = orbit_section_theta(bc, guess);
    const OrbitPoint q = orbit_point(bc, u);
    const double miss = linalg::op_norm(q.q - a);
    if (miss > 1e-8) throw DomainError(path + ": projection is not in O(p) (defect " + fmt(miss) + ")");
    return q;
  }
  throw DomainError(path + ": expected an " + std::to_string(n) + "x" + std::to_string(n) + " witness or a " +
                    std::to_string(bc.dim()) + "x" + std::to_string(bc.dim()) + " projection");
}

}  // namespace

int cmd_log(const RunConfig& cfg, const std::string& q0_path, const std::string& q1_path, std::ostream& out) {
  const Inclusion inc = make_inclusion(cfg);
  const BasicConstruction bc = build_basic_construction(inc);
  const OrbitPoint q0 = read_orbit_point(bc, q0_path);
  const OrbitPoint q1 = read_orbit_point(bc, q1_path);
  LogResult lg;
  try {
    lg = orbit_log(bc, q0, q1);
  } catch (const RadiusError& e) {
    throw ConvergenceError(std::string(e.what()) + "; try a smaller radius", bc.two_norm1(q0.q - q1.q));
  }
  json j = header(cfg, inc);
  j["residual"] = lg.residual;
  j["iterations"] = lg.iterations;
  j["z_two_norm"] = inc.m_algebra.two_norm(lg.z);
  j["z"] = linalg::to_text(lg.z);
  const std::filesystem::path dir(cfg.output_dir);
  write_text(dir / "log.json", j.dump(2) + "\n");
  std::filesystem::create_directories(dir);
  linalg::write_matrix_file((dir / "z.txt").string(), lg.z);
  out << "residual " << fmt(lg.residual) << "  iterations " << lg.iterations << "  ||z||_2 "
      << fmt(inc.m_algebra.two_norm(lg.z), "%.10g") << "\n";
  out << "wrote " << (dir / "z.txt").string() << " and " << (dir / "log.json").string() << "\n";
  return exit_pass;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const RunConfig& cfg, const std::string& experiment, int n_trials, std::ostream& out) {
  if (experiment != "minimality" && experiment != "convexity" && experiment != "radius_probe") {
    throw ConfigError("unknown experiment '" + experiment + "' (minimality, convexity, radius_probe)");
  }
  if (n_trials < 0) throw ConfigError("trials must be non-negative");
  const std::uint64_t seed = require_seed(cfg);
  const Inclusion inc = make_inclusion(cfg);
  const BasicConstruction bc = build_basic_construction(inc);

  json summary = header(cfg, inc);
  summary["experiment"] = experiment;
  summary["trials"] = n_trials;
  std::ostringstream csv;
  int violations = 0;

  if (experiment == "minimality") {
    csv << "trial,l2,linf,max_distance,admissible,l2_violation,dichotomy_violation\n";
    if (n_trials > 0) {
      Rng rng(seed ^ 0x6d696e696dULL);
      const OrbitPoint q0 = random_orbit_point(bc, rng);
      const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q0, rng), 0.3);
      const MinimalityReport rep =
          minimality_experiment(bc, q0, z, n_trials, cfg.perturbation_scale, seed, cfg.grid, cfg.probe_radius);
      for (const MinimalityTrial& t : rep.trials) {
        csv << t.index << "," << csv_number(t.l2) << "," << csv_number(t.linf) << "," << csv_number(t.max_distance)
            << "," << t.admissible << "," << t.l2_violation << "," << t.dichotomy_violation << "\n";
      }
      violations = rep.violations;
      summary["geodesic_l2"] = rep.geodesic_l2;
      summary["geodesic_linf"] = rep.geodesic_linf;
      summary["admissible"] = rep.admissible;
      summary["dichotomy_violations"] = rep.dichotomy_violations;
    }
  } else if (experiment == "convexity") {
    csv << "trial,min_second_difference,passed\n";
    for (int i = 0; i < n_trials; ++i) {
      Rng rng(trial_seed(seed, static_cast<std::uint64_t>(i)));
      const UnitaryTriple t = random_admissible_triple(inc, rng);
      const ConvexityReport c = convexity_probe(inc, t.u0, t.u1, t.u2, 64);
      csv << i << "," << csv_number(c.min_second_difference) << "," << c.passed << "\n";
      violations += c.passed ? 0 : 1;
    }
  } else {
    csv << "trial,radius,distance,residual,iterations,recovered_error,passed\n";
    const RadiusProbeReport rep = radius_probe(bc, default_probe_radii(), n_trials, seed);
    for (const RadiusProbeRow& r : rep.rows) {
      csv << r.trial << "," << csv_number(r.radius) << "," << csv_number(r.distance) << "," << csv_number(r.residual)
          << "," << r.iterations << "," << csv_number(r.recovered_error) << "," << r.passed << "\n";
    }
    summary["largest_passing_radius"] =
        rep.largest_passing_radius ? json(*rep.largest_passing_radius) : json(nullptr);
    int failed = 0;
    for (const RadiusProbeRow& r : rep.rows) failed += r.passed ? 0 : 1;
    summary["failed_rows"] = failed;
  }
  summary["violations"] = violations;
  summary["status"] = n_trials == 0 ? "no data" : (violations == 0 ? "pass" : "fail");

  const std::filesystem::path dir(cfg.output_dir);
  write_text(dir / ("sweep_" + experiment + ".csv"), n_trials == 0 ? std::string() : csv.str());
  write_text(dir / ("sweep_" + experiment + ".json"), summary.dump(2) + "\n");
  out << experiment << ": " << n_trials << " trials, " << violations << " violations, status "
      << summary["status"].get<std::string>() << "\n";
  if (summary.contains("largest_passing_radius") && !summary["largest_passing_radius"].is_null()) {
    out << "largest passing radius " << fmt(summary["largest_passing_radius"].get<double>(), "%.3g") << "\n";
  }
  return violations == 0 ? exit_pass : exit_check_failure;
}

int cmd_families(std::ostream& out) {
  for (const BuiltinFamily& f : builtin_families()) {
    char line[160];
    std::snprintf(line, sizeof line, "%-22s lambda %-10.6g %s\n", f.name.c_str(), f.lambda, f.description.c_str());
    out << line;
  }
  return exit_pass;
}

// ---------------------------------------------------------------------------

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const ConstructionError& e) {
    err << "construction failed at property " << e.property() << ": " << e.what() << "\n";
    return exit_check_failure;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << " (final residual " << fmt(e.residual()) << ")\n";
    return exit_numerical_error;
  } catch (const BranchError& e) {
    err << "numerical error: " << e.what() << "\n";
    return exit_numerical_error;
  } catch (const RefinementError& e) {
    err << "numerical error: " << e.what() << "\n";
    return exit_numerical_error;
  } catch (const ConsistencyError& e) {
    err << "numerical error: " << e.what() << "\n";
    return exit_numerical_error;
  } catch (const Error& e) {
    err << "validation error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const json::exception& e) {
    err << "configuration error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical_error;
  }
}

void apply_environment() {
  const char* v = std::getenv("SUBFACTOR_GEO_TOL");
  if (!v || !*v) return;
  char* end = nullptr;
  const double t = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(t > 0.0)) throw ConfigError(std::string("SUBFACTOR_GEO_TOL is not a positive number: ") + v);
  linalg::settings().spectral_tol = t;
}

}  // namespace subgeo
