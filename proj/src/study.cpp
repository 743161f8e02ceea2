// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/study.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "pumice/localspace.hpp"
#include "pumice/norms.hpp"
#include "pumice/quadrature.hpp"

namespace pumice {

namespace {

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("bad numeric value for " + what + ": '" + s + "'");
  }
}

long to_long(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("bad integer value for " + what + ": '" + s + "'");
  }
}

}  // namespace

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> lx, ly;
  for (const auto& [h, e] : points) {
    if (h <= 0 || e <= 0 || !std::isfinite(h) || !std::isfinite(e)) continue;
    lx.push_back(std::log(h));
    ly.push_back(std::log(e));
  }
  const int n = (int)lx.size();
  if (n < 3) throw Error("fit_rate: need at least 3 positive points");
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0) throw Error("fit_rate: abscissae coincide");
  RateFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - (out.intercept + out.slope * lx[i]);
    ss += r * r;
  }
  out.residual = std::sqrt(ss / n);
  out.n_used = n;
  return out;
}

namespace {

// Concordant minus discordant pairs of v against the index order.
long kendall_T(const std::vector<double>& v) {
  long T = 0;
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = i + 1; j < v.size(); ++j) {
      if (v[j] > v[i]) ++T;
      else if (v[j] < v[i]) --T;
    }
  return T;
}

}  // namespace

TrendTest kendall_trend(const std::vector<double>& values) {
  TrendTest out;
  out.n = (int)values.size();
  const int n = out.n;
  if (n < 2) return out;
  const long T = kendall_T(values);
  out.tau = 2.0 * T / (double(n) * (n - 1));
  if (n <= 8) {
    // Exact permutation distribution of T, respecting ties in the data.
    std::vector<double> perm(values);
    std::sort(perm.begin(), perm.end());
    long total = 0, ge = 0;
    do {
      ++total;
      if (kendall_T(perm) >= T) ++ge;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.p_increasing = double(ge) / double(total);
  } else {
    const double var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
    const double z = (T - 0.5) / std::sqrt(var);
    out.p_increasing = 0.5 * std::erfc(z / std::sqrt(2.0));
  }
  return out;
}

BoundaryCase parse_data(const std::string& spec, int n_series) {
  const std::string s = trim(spec);
  static const std::regex atom_re(
      R"(^(dirac|dipole)\s*(?:\(\s*([^,()]+?)\s*(?:,\s*([^,()]+?)\s*)?\))?$)");
  std::smatch m;
  if (std::regex_match(s, m, atom_re)) {
    const double th0 = m[2].matched ? to_double(m[2], "atom angle") : 0.8;
    const double w = m[3].matched ? to_double(m[3], "atom weight") : 1.0;
    return m[1] == "dirac" ? log_pole(th0, w, n_series)
                           : dipole(th0, w, n_series);
  }

  // Trigonometric polynomial in t: signed terms c, c*cos(n t), c*sin(n t).
  std::string flat;
  for (char c : s)
    if (!std::isspace((unsigned char)c)) flat.push_back(c);
  if (flat.empty()) throw Error("empty data spec");
  std::vector<std::string> terms;
  size_t start = 0;
  int depth = 0;
  for (size_t i = 0; i < flat.size(); ++i) {
    const char c = flat[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if ((c == '+' || c == '-') && depth == 0 && i > start) {
      terms.push_back(flat.substr(start, i - start));
      start = i;
    }
  }
  terms.push_back(flat.substr(start));

  static const std::regex term_re(
      R"(^([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\*?(?:(cos|sin)\((?:(\d+)\*?)?t\))?$)");
  double c0 = 0;
  std::vector<double> pc(1, 0.0), qs(1, 0.0);
  for (const std::string& t : terms) {
    std::smatch tm;
    if (!std::regex_match(t, tm, term_re) || (!tm[2].matched && !tm[3].matched))
      throw Error("unparsable data term: '" + t + "'");
    const double sign = tm[1] == "-" ? -1.0 : 1.0;
    const double coef = tm[2].matched ? to_double(tm[2], "coefficient") : 1.0;
    if (!tm[3].matched) {
      c0 += sign * coef;
      continue;
    }
    const int n = tm[4].matched ? (int)to_long(tm[4], "mode number") : 1;
    if (n < 1) throw Error("mode number must be positive in '" + t + "'");
    if (n >= (int)pc.size()) {
      pc.resize(n + 1, 0.0);
      qs.resize(n + 1, 0.0);
    }
    if (tm[3] == "cos") pc[n] += sign * coef;
    else qs[n] += sign * coef;
  }

  BoundaryCase out;
  out.data.density = [c0, pc, qs](double th) {
    double v = c0;
    for (int n = 1; n < (int)pc.size(); ++n)
      v += pc[n] * std::cos(n * th) + qs[n] * std::sin(n * th);
    return v;
  };
  out.exact = neumann_solution(out.data, n_series);
  out.roughness = 0;
  return out;
}

AdmissibleSet admissible_hull(const PartitionOfUnity& pu, Vec2 c, double r,
                              double pitch) {
  const Covering& cov = pu.covering();
  std::vector<int> J;
  for (int j = 0; j < (int)cov.size(); ++j) {
    const Patch& p = cov.patch(j);
    if ((p.x - c).norm() < r + p.R) J.push_back(j);
  }
  return admissible_from_indices(pu, std::move(J), pitch);
}

double ExperimentConfig::nan_marker() { return nan_value(); }

void ExperimentConfig::validate() const {
  if (domain != "disk" && domain != "cusp")
    throw InfeasibleParameters("unknown domain kind: " + domain);
  if (radius <= 0) throw InfeasibleParameters("domain radius must be positive");
  if (ladder.empty()) throw InfeasibleParameters("empty h ladder");
  for (size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] <= 0) throw InfeasibleParameters("h must be positive");
    if (i && ladder[i] >= ladder[i - 1])
      throw InfeasibleParameters("h ladder must be strictly decreasing");
  }
  if (degree < 1 || degree > 5)
    throw InfeasibleParameters("local degree must lie in [1, 5]");
  for (int s : dual_orders)
    if (s < 0 || s > 2)
      throw InfeasibleParameters("dual orders must lie in {0, 1, 2}");
  if (region_radius <= 0)
    throw InfeasibleParameters("region radius must be positive");
  if (region_depth < 0)
    throw InfeasibleParameters("region depth must be nonnegative");
  if (n_series < 8 || n_series > 4096)
    throw InfeasibleParameters("n_series must lie in [8, 4096]");
}

ExperimentConfig load_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error("config line " + std::to_string(lineno) +
                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "domain" && section != "pu" && section != "data" &&
          section != "regions" && section != "study")
        throw Error("unknown config section [" + section + "]");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string where = "[" + section + "] " + key;

    if (section == "domain") {
      if (key == "kind") cfg.domain = val;
      else if (key == "radius") cfg.radius = to_double(val, where);
      else throw Error("unknown config key " + where);
    } else if (section == "pu") {
      if (key == "sigma") cfg.cover.sigma = to_double(val, where);
      else if (key == "flat_factor") cfg.cover.flat_factor = to_double(val, where);
      else if (key == "ring_depth") cfg.cover.ring_depth = to_double(val, where);
      else if (key == "ring_spacing") cfg.cover.ring_spacing = to_double(val, where);
      else if (key == "interior_spacing")
        cfg.cover.interior_spacing = to_double(val, where);
      else if (key == "seed") cfg.cover.seed = (uint64_t)to_long(val, where);
      else throw Error("unknown config key " + where);
    } else if (section == "data") {
      if (key == "g") cfg.data = val;
      else if (key == "n_series") cfg.n_series = (int)to_long(val, where);
      else throw Error("unknown config key " + where);
    } else if (section == "regions") {
      if (key == "center") {
        const auto xy = split(val, ',');
        if (xy.size() != 2) throw Error("bad center for " + where);
        cfg.region_center = {to_double(xy[0], where), to_double(xy[1], where)};
      } else if (key == "radius") cfg.region_radius = to_double(val, where);
      else if (key == "depth") cfg.region_depth = (int)to_long(val, where);
      else throw Error("unknown config key " + where);
    } else if (section == "study") {
      if (key == "ladder") {
        cfg.ladder.clear();
        for (const auto& t : split(val, ','))
          cfg.ladder.push_back(to_double(t, where));
      } else if (key == "degree") cfg.degree = (int)to_long(val, where);
      else if (key == "dual_orders") {
        cfg.dual_orders.clear();
        for (const auto& t : split(val, ','))
          cfg.dual_orders.push_back((int)to_long(t, where));
      } else if (key == "quad") {
        if (val == "accurate") cfg.quad = AssemblyOptions::accurate();
        else if (val == "default") cfg.quad = AssemblyOptions{};
        else throw Error("quad preset must be default or accurate");
      } else if (key == "threads") cfg.quad.threads = (int)to_long(val, where);
      else if (key == "seed") cfg.seed = (uint64_t)to_long(val, where);
      else if (key == "out") cfg.out_dir = val;
      else if (key == "target_interior_rate")
        cfg.target_interior_rate = to_double(val, where);
      else if (key == "target_h1_rate") cfg.target_h1_rate = to_double(val, where);
      else if (key == "target_dual_rate")
        cfg.target_dual_rate = to_double(val, where);
      else throw Error("unknown config key " + where);
    } else {
      throw Error("config line " + std::to_string(lineno) +
                  ": key outside any section");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  return load_config(in);
}

std::vector<std::pair<double, double>> StudyReport::series(
    const std::string& col) const {
  const auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw Error("no such column: " + col);
  const size_t k = it - columns.begin();
  std::vector<std::pair<double, double>> out;
  for (const LadderRow& r : rows)
    if (r.ok && k < r.values.size() && std::isfinite(r.values[k]))
      out.emplace_back(r.h, r.values[k]);
  return out;
}

std::vector<double> StudyReport::column(const std::string& col) const {
  std::vector<double> out;
  for (const auto& [h, v] : series(col)) out.push_back(v);
  return out;
}

std::string StudyReport::csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "h,dofs,ok";
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (const LadderRow& r : rows) {
    os << r.h << ',' << r.dofs << ',' << (r.ok ? 1 : 0);
    for (size_t k = 0; k < columns.size(); ++k)
      os << ',' << (k < r.values.size() ? r.values[k] : nan_value());
    os << '\n';
  }
  return os.str();
}

namespace {

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["domain"] = {{"kind", cfg.domain}, {"radius", cfg.radius}};
  j["pu"] = {{"sigma", cfg.cover.sigma},
             {"flat_factor", cfg.cover.flat_factor},
             {"ring_depth", cfg.cover.ring_depth},
             {"ring_spacing", cfg.cover.ring_spacing},
             {"interior_spacing", cfg.cover.interior_spacing},
             {"seed", cfg.cover.seed}};
  j["data"] = {{"g", cfg.data}, {"n_series", cfg.n_series}};
  j["regions"] = {{"center", {cfg.region_center.x, cfg.region_center.y}},
                  {"radius", cfg.region_radius},
                  {"depth", cfg.region_depth}};
  j["study"] = {{"ladder", cfg.ladder},
                {"degree", cfg.degree},
                {"dual_orders", cfg.dual_orders},
                {"seed", cfg.seed},
                {"quad",
                 {{"leaf_factor", cfg.quad.leaf_factor},
                  {"gauss_1d", cfg.quad.gauss_1d},
                  {"ring_refine", cfg.quad.ring_refine},
                  {"threads", cfg.quad.threads}}}};
  return j;
}

}  // namespace

std::string StudyReport::json(const ExperimentConfig& cfg) const {
  nlohmann::json j;
  j["kind"] = kind;
  j["config"] = config_json(cfg);
  j["columns"] = columns;
  auto& rws = j["rows"] = nlohmann::json::array();
  for (const LadderRow& r : rows) {
    nlohmann::json row = {{"h", r.h}, {"dofs", r.dofs}, {"ok", r.ok}};
    if (!r.error.empty()) row["error"] = r.error;
    auto& vals = row["values"] = nlohmann::json::array();
    for (size_t k = 0; k < columns.size(); ++k) {
      const double v = k < r.values.size() ? r.values[k] : nan_value();
      if (std::isfinite(v)) vals.push_back(v);
      else vals.push_back(nullptr);
    }
    rws.push_back(std::move(row));
  }
  for (const auto& [name, f] : rates)
    j["rates"][name] = {{"slope", f.slope},
                        {"intercept", f.intercept},
                        {"residual", f.residual},
                        {"n_used", f.n_used}};
  for (const auto& [name, t] : trends)
    j["trends"][name] = {{"tau", t.tau},
                         {"p_increasing", t.p_increasing},
                         {"n", t.n}};
  for (const auto& [name, v] : scalars) {
    if (std::isfinite(v)) j["scalars"][name] = v;
    else j["scalars"][name] = nullptr;
  }
  j["notes"] = notes;
  j["checks_passed"] = checks_passed;
  return j.dump(2) + "\n";
}

std::string StudyReport::plot_script(const std::string& csv_name) const {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set key outside\n"
     << "set xlabel 'h'\n"
     << "set ylabel 'value'\n"
     << "plot ";
  bool first = true;
  for (size_t k = 0; k < columns.size(); ++k) {
    if (!first) os << ", \\\n     ";
    first = false;
    os << "'" << csv_name << "' using 1:" << (k + 4) << " with linespoints title '"
       << columns[k] << "'";
  }
  os << '\n';
  return os.str();
}

void StudyReport::write(const ExperimentConfig& cfg,
                        const std::string& stem) const {
  if (cfg.out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string base = (fs::path(cfg.out_dir) / stem).string();
  std::ofstream(base + ".csv") << csv();
  std::ofstream(base + ".json") << json(cfg);
  std::ofstream(base + ".gp") << plot_script(stem + ".csv");
}

namespace {

std::shared_ptr<Domain> make_domain(const ExperimentConfig& cfg) {
  if (cfg.domain == "disk") return Domain::disk(cfg.radius);
  return Domain::cusp();
}

std::shared_ptr<GfemSpace> build_space(const ExperimentConfig& cfg, double h) {
  auto cov = std::make_shared<Covering>(
      build_covering(make_domain(cfg), h, cfg.cover));
  auto pu = std::make_shared<PartitionOfUnity>(cov);
  return std::make_shared<GfemSpace>(pu, cfg.degree);
}

void need_unit_disk(const ExperimentConfig& cfg) {
  if (cfg.domain != "disk" || cfg.radius != 1.0)
    throw InfeasibleParameters("solution oracles exist on the unit disk only");
}

Box2 tight_box(const AdmissibleSet& A) {
  Box2 out{{1e300, 1e300}, {-1e300, -1e300}};
  for (const Box2& b : A.region.cell_boxes()) {
    out.lo.x = std::min(out.lo.x, b.lo.x);
    out.lo.y = std::min(out.lo.y, b.lo.y);
    out.hi.x = std::max(out.hi.x, b.hi.x);
    out.hi.y = std::max(out.hi.y, b.hi.y);
  }
  if (out.lo.x > out.hi.x) throw Error("empty admissible region");
  return out;
}

// Measurement rule over the whole domain, finer than the assembly rule is
// not needed: the integrands are solution errors, smooth at scale h.
QuadRule measure_rule(const Domain& dom, double h) {
  return domain_rule(dom, h / 6, 4);
}

void annotate(LadderRow& row, const std::exception& e) {
  row.ok = false;
  row.error = e.what();
}

double spread(const std::vector<double>& v) {
  if (v.empty()) return nan_value();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*lo <= 0) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

}  // namespace

StudyReport run_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  StudyReport rep;
  rep.kind = "verify";
  rep.columns = {"n_patches", "kappa",        "radius_ratio", "eta_min",
                 "pu_defect", "grad_defect",  "flat_defect",  "support_leak",
                 "deriv0",    "deriv1",       "deriv2"};
  const auto dom = make_domain(cfg);
  double flat_ratio = 0;
  for (double h : cfg.ladder) {
    LadderRow row;
    row.h = h;
    try {
      auto cov = std::make_shared<Covering>(build_covering(dom, h, cfg.cover));
      PartitionOfUnity pu(cov);
      const auto q = pu.verify();
      flat_ratio = cov->flat_radius() / (h / 2);
      row.dofs = q.n_patches * monomial_count(cfg.degree);
      row.values = {(double)q.n_patches, (double)q.max_overlap,
                    q.radius_ratio,      q.eta_min,
                    q.partition_defect,  q.gradient_defect,
                    q.flat_defect,       q.support_leak,
                    q.deriv_bounds[0],   q.deriv_bounds[1],
                    q.deriv_bounds[2]};
      row.ok = q.ok();
      if (!q.ok()) {
        row.error = q.failures.front();
        rep.checks_passed = false;
      }
    } catch (const std::exception& e) {
      annotate(row, e);
      rep.checks_passed = false;
    }
    rep.rows.push_back(std::move(row));
  }

  if (flat_ratio > 0) {
    const auto eq = measure_equivalence(cfg.degree, flat_ratio);
    rep.scalars["flat_ratio"] = flat_ratio;
    rep.scalars["l2_full_over_flat"] = eq.l2_full_over_flat;
    rep.scalars["h1_full_over_flat"] = eq.h1_full_over_flat;
    rep.scalars["inverse_h1"] = eq.inverse_h1;
    rep.scalars["inverse_h2"] = eq.inverse_h2;
  }
  for (const char* c : {"kappa", "deriv0", "deriv1", "deriv2"}) {
    const auto vals = rep.column(c);
    rep.trends[c] = kendall_trend(vals);
    rep.scalars[std::string(c) + "_spread"] = spread(vals);
  }
  for (const char* c : {"deriv1", "deriv2"})
    if (rep.scalars[std::string(c) + "_spread"] > 2) {
      rep.checks_passed = false;
      rep.notes.push_back(std::string("scaled derivative bound ") + c +
                          " varies by more than a factor 2 across the ladder");
    }
  return rep;
}

StudyReport run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  need_unit_disk(cfg);
  const BoundaryCase bc = parse_data(cfg.data, cfg.n_series);
  if (std::isfinite(cfg.target_interior_rate) && bc.roughness > 0) {
    const int gamma = (int)std::ceil(cfg.target_interior_rate);
    if (cfg.degree < bc.roughness + gamma + 1)
      throw InfeasibleParameters(
          "declared interior rate needs local degree >= k + gamma + 1");
  }

  StudyReport rep;
  rep.kind = "convergence";
  rep.columns = {"kappa", "residual", "h1_interior"};
  const bool global_ok = bc.roughness == 0;
  if (global_ok) {
    rep.columns.push_back("l2_global");
    rep.columns.push_back("h1_global");
  }
  for (int s : cfg.dual_orders) rep.columns.push_back("dual" + std::to_string(s));

  for (double h : cfg.ladder) {
    LadderRow row;
    row.h = h;
    try {
      auto space = build_space(cfg, h);
      row.dofs = space->size();
      const System sys = assemble(*space, cfg.quad);
      const Eigen::VectorXd b = assemble_rhs(*space, bc.data);
      SolveInfo info;
      const GfemFunction uS = solve_neumann(space, sys, b, &info);

      const AdmissibleSet A =
          admissible_hull(*space->pu_ptr(), cfg.region_center, cfg.region_radius);
      row.values = {(double)space->covering().max_overlap(), info.residual,
                    interior_h1_error(bc.exact, uS, A)};

      const QuadRule glob = measure_rule(space->covering().domain(), h);
      if (global_ok) {
        const ErrorNorms en = error_norms(uS, bc.exact, glob);
        row.values.push_back(en.l2);
        row.values.push_back(en.h1());
      }
      const Box2 bbox = space->covering().domain().bbox();
      for (int s : cfg.dual_orders) {
        SobolevGram gram(glob, bbox, s);
        row.values.push_back(gram.dual_norm(
            [&](Vec2 x) { return bc.exact.value(x) - uS.value(x); }));
      }
      row.ok = true;
    } catch (const std::exception& e) {
      annotate(row, e);
    }
    rep.rows.push_back(std::move(row));
  }

  auto fit_col = [&](const std::string& c) {
    try {
      rep.rates[c] = fit_rate(rep.series(c));
    } catch (const std::exception& e) {
      rep.notes.push_back("rate fit for " + c + " skipped: " + e.what());
    }
  };
  fit_col("h1_interior");
  if (global_ok) {
    fit_col("l2_global");
    fit_col("h1_global");
  }
  for (int s : cfg.dual_orders) fit_col("dual" + std::to_string(s));

  auto check_target = [&](const std::string& col, double target) {
    if (!std::isfinite(target)) return;
    const auto it = rep.rates.find(col);
    if (it == rep.rates.end()) {
      rep.checks_passed = false;
      rep.notes.push_back("declared target for " + col + " but no fit");
      return;
    }
    if (it->second.slope + 1e-12 < target) {
      rep.checks_passed = false;
      rep.notes.push_back(col + " slope " + std::to_string(it->second.slope) +
                          " misses declared target " + std::to_string(target));
    }
  };
  check_target("h1_interior", cfg.target_interior_rate);
  check_target("h1_global", cfg.target_h1_rate);
  if (!cfg.dual_orders.empty())
    check_target("dual" + std::to_string(cfg.dual_orders.front()),
                 cfg.target_dual_rate);
  for (const LadderRow& r : rep.rows)
    if (!r.ok) {
      rep.checks_passed = false;
      rep.notes.push_back("rung h = " + std::to_string(r.h) + " failed: " + r.error);
    }
  return rep;
}

StudyReport run_interior_estimate_check(const ExperimentConfig& cfg) {
  cfg.validate();
  need_unit_disk(cfg);
  if (cfg.region_depth < 1)
    throw InfeasibleParameters(
        "interior estimate check needs region depth >= 1 so the outer set "
        "strictly contains the inner one");
  const BoundaryCase bc = parse_data(cfg.data, cfg.n_series);

  StudyReport rep;
  rep.kind = "interior";
  rep.columns = {"lhs", "best_h1_B", "dual_B", "rhs", "ratio"};
  const int s_dual = std::min(cfg.degree, 2);
  rep.scalars["dual_order"] = s_dual;

  for (double h : cfg.ladder) {
    LadderRow row;
    row.h = h;
    try {
      auto space = build_space(cfg, h);
      row.dofs = space->size();
      const auto lad = admissible_ladder(*space->pu_ptr(), cfg.region_center,
                                         cfg.region_radius, cfg.region_depth);
      const AdmissibleSet& A = lad.front();
      const AdmissibleSet& B = lad[cfg.region_depth];
      if (A.J == B.J)
        throw InfeasibleParameters(
            "inner and outer admissible sets coincide at this h");

      const System sys = assemble(*space, cfg.quad);
      const Eigen::VectorXd b = assemble_rhs(*space, bc.data);
      const GfemFunction uS = solve_neumann(space, sys, b);

      const double lhs = interior_h1_error(bc.exact, uS, A);
      const GfemFunction chi = quasi_interpolant(space, bc.exact);
      const QuadRule ruleB = region_rule(B);
      const double best = error_norms(chi, bc.exact, ruleB).h1();
      SobolevGram gram(ruleB, tight_box(B), s_dual);
      const double dual = gram.dual_norm(
          [&](Vec2 x) { return bc.exact.value(x) - uS.value(x); });
      const double rhs = best + dual;
      row.values = {lhs, best, dual, rhs, lhs / rhs};
      row.ok = true;
    } catch (const std::exception& e) {
      annotate(row, e);
    }
    rep.rows.push_back(std::move(row));
  }

  const auto ratios = rep.column("ratio");
  rep.trends["ratio"] = kendall_trend(ratios);
  rep.scalars["ratio_spread"] = spread(ratios);
  if (ratios.size() >= 3) {
    const auto& t = rep.trends["ratio"];
    if (t.tau > 0 && t.p_increasing < 0.05) {
      rep.checks_passed = false;
      rep.notes.push_back("interior ratio trends upward across the ladder");
    }
    if (rep.scalars["ratio_spread"] > 3) {
      rep.checks_passed = false;
      rep.notes.push_back("interior ratio varies by more than a factor 3");
    }
  } else {
    rep.notes.push_back("fewer than 3 usable rungs; trend not assessed");
  }
  for (const LadderRow& r : rep.rows)
    if (!r.ok)
      rep.notes.push_back("rung h = " + std::to_string(r.h) + " failed: " + r.error);
  return rep;
}

StudyReport run_stability_check(const ExperimentConfig& cfg) {
  cfg.validate();
  need_unit_disk(cfg);
  const BoundaryCase bc = parse_data(cfg.data, cfg.n_series);
  const int k = bc.roughness;

  StudyReport rep;
  rep.kind = "stability";
  rep.columns = {"residual", "dual0", "trace", "h1"};
  rep.scalars["roughness"] = k;
  rep.scalars["trace_order"] = 0.5 - k;

  for (double h : cfg.ladder) {
    LadderRow row;
    row.h = h;
    try {
      auto space = build_space(cfg, h);
      row.dofs = space->size();
      const System sys = assemble(*space, cfg.quad);
      const Eigen::VectorXd b = assemble_rhs(*space, bc.data);
      SolveInfo info;
      const GfemFunction uS = solve_neumann(space, sys, b, &info);

      const QuadRule glob = measure_rule(space->covering().domain(), h);
      SobolevGram gram(glob, space->covering().domain().bbox(), 0);
      const double dual0 =
          gram.dual_norm([&](Vec2 x) { return uS.value(x); });
      const double trace = boundary_fourier_norm(
          [&](double th) {
            return uS.value({std::cos(th), std::sin(th)});
          },
          0.5 - k, 128, 2048);
      const double h1 = hs_norm(uS, glob, 1);
      row.values = {info.residual, dual0, trace, h1};
      row.ok = true;
    } catch (const std::exception& e) {
      annotate(row, e);
    }
    rep.rows.push_back(std::move(row));
  }

  rep.scalars["dual0_spread"] = spread(rep.column("dual0"));
  rep.scalars["trace_spread"] = spread(rep.column("trace"));
  try {
    const RateFit f = fit_rate(rep.series("h1"));
    rep.rates["h1"] = f;
    rep.scalars["h1_growth"] = -f.slope;
  } catch (const std::exception& e) {
    rep.notes.push_back(std::string("h1 growth fit skipped: ") + e.what());
  }

  if (rep.scalars["dual0_spread"] > 3) {
    rep.checks_passed = false;
    rep.notes.push_back("dual-flavor norm varies by more than a factor 3");
  }
  if (rep.scalars["trace_spread"] > 3) {
    rep.checks_passed = false;
    rep.notes.push_back("boundary trace norm varies by more than a factor 3");
  }
  if (rep.scalars.count("h1_growth") && rep.scalars["h1_growth"] > k + 0.25) {
    rep.checks_passed = false;
    rep.notes.push_back("H1 norm grows faster than h^-k allows");
  }
  for (const LadderRow& r : rep.rows)
    if (!r.ok) {
      rep.checks_passed = false;
      rep.notes.push_back("rung h = " + std::to_string(r.h) + " failed: " + r.error);
    }
  return rep;
}

StudyReport run_cusp_check(const ExperimentConfig& cfg) {
  cfg.validate();
  StudyReport rep;
  rep.kind = "cusp";
  rep.columns = {"covered", "witness_x", "witness_y", "witness_r"};
  const auto dom = Domain::cusp();
  for (double h : cfg.ladder) {
    if (h > 0.05) continue;
    LadderRow row;
    row.h = h;
    try {
      build_covering(dom, h, cfg.cover);
      row.values = {1, nan_value(), nan_value(), nan_value()};
      row.ok = true;
      rep.checks_passed = false;
      rep.notes.push_back("covering unexpectedly succeeded at h = " +
                          std::to_string(h));
    } catch (const CoverageFailure& e) {
      row.values = {0, e.witness.x, e.witness.y, e.witness.norm()};
      row.ok = true;
    } catch (const std::exception& e) {
      annotate(row, e);
      rep.checks_passed = false;
      rep.notes.push_back("rung h = " + std::to_string(h) +
                          " failed outside coverage: " + e.what());
    }
    rep.rows.push_back(std::move(row));
  }
  if (rep.rows.empty())
    throw InfeasibleParameters("cusp check needs ladder rungs at h <= 0.05");

  const auto wr = rep.column("witness_r");
  rep.trends["witness_r"] = kendall_trend(wr);
  if (wr.size() >= 3 && rep.trends["witness_r"].tau > 0) {
    rep.checks_passed = false;
    rep.notes.push_back("uncovered witness does not approach the cusp tip");
  }
  return rep;
}

}  // namespace pumice
