#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "kplateau/barrier.hpp"
#include "kplateau/shapes.hpp"
#include "kplateau_app/app.hpp"
#include "kplateau_app/detail.hpp"

namespace kplateau::app {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  json cfg;
  fs::path base;   // directory of the config file
  fs::path out;
  ArtifactMeta meta;
  int threads = 1;
  EventLog log{nullptr};
  json metrics = json::object();
  json artifacts = json::array();
  std::string status;
  int exit_code = exit_ok;
  bool executing = false;  // false while the config is being interpreted

  std::ofstream create(const std::string& name) {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out / name).string());
    artifacts.push_back(name);
    return f;
  }
};

std::uint64_t config_seed(const json& cfg) {
  if (!cfg.contains("seed")) return 0;
  const auto& s = cfg["seed"];
  if (s.is_number_unsigned()) return s.get<std::uint64_t>();
  if (s.is_number_integer() && s.get<long long>() >= 0) return static_cast<std::uint64_t>(s.get<long long>());
  throw ParseError("seed must be a non-negative integer");
}

double sup_error(const GraphSolution& sol, const ScalarField& exact) {
  double e = 0;
  for (int i = 0; i < sol.disc->size(); ++i) e = std::max(e, std::abs(sol.f(i) - exact(sol.disc->coord(i))));
  return e;
}

// ---------------------------------------------------------------- solve

void run_dirichlet(Context& c) {
  check_keys(c.cfg, {"kind", "seed", "n", "domain", "h", "phi", "G", "barrier", "tol"}, "scenario");
  const DirichletSetup s = dirichlet_setup(c.cfg, c.base);
  c.executing = true;
  c.log.emit("solve_start", {{"n", s.problem.n}, {"h", s.problem.h}, {"domain", s.problem.domain.description()}});
  const auto t0 = std::chrono::steady_clock::now();
  const GraphSolution sol = solve_dirichlet(s.problem);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const BoundsReport b = verify_bounds(sol, s.problem);
  c.log.emit("solve_done", {{"seconds", secs},
                            {"newton_iterations", sol.diag.newton_iterations},
                            {"residual", sol.diag.residual_norm}});

  json& m = c.metrics;
  m["n"] = s.problem.n;
  m["h"] = s.problem.h;
  m["unknowns"] = sol.disc->size();
  m["newton_iterations"] = sol.diag.newton_iterations;
  m["residual_norm"] = sol.diag.residual_norm;
  m["tol"] = sol.diag.tol;
  m["sup_f"] = sol.diag.sup_f;
  m["sup_grad"] = sol.diag.sup_grad;
  m["pogorelov"] = sol.diag.pogorelov;
  m["barrier_margin"] = sol.diag.barrier_margin;
  m["bounds_ok"] = b.ok();
  if (s.oracle) m["sup_error"] = sup_error(sol, *s.oracle);

  auto csv = c.create("solution.csv");
  write_solution_csv(csv, sol, c.meta);
  write_grid(c.out / "solution_grid.json", sol.to_grid_field(), &c.meta);
  c.artifacts.push_back("solution_grid.json");
  c.artifacts.push_back("solution_grid.bin");
  c.status = "converged";
}

// ---------------------------------------------------------------- study

void run_study(Context& c) {
  check_keys(c.cfg, {"kind", "seed", "h_list", "problem"}, "scenario");
  if (!c.cfg.contains("problem")) throw ParseError("scenario.problem is required (table or file path)");
  json problem = c.cfg["problem"];
  fs::path base = c.base;
  if (problem.is_string()) {
    const fs::path p = c.base / problem.get<std::string>();
    problem = load_config(p, p.extension() == ".json");
    base = p.parent_path();
  }
  if (!c.cfg.contains("h_list") || !c.cfg["h_list"].is_array()) throw ParseError("scenario.h_list must be an array");
  std::vector<double> hs;
  for (const auto& h : c.cfg["h_list"]) {
    if (!h.is_number()) throw ParseError("scenario.h_list entries must be numbers");
    hs.push_back(h.get<double>());
  }
  if (hs.size() < 3) throw ParseError("scenario.h_list needs at least 3 grid levels");
  dirichlet_setup(problem, base);  // validate before solving
  c.executing = true;
  const auto rows = convergence_study(problem, hs, base);
  const bool oracle = !rows.empty() && std::isfinite(rows.front().sup_error);

  auto csv = c.create("study.csv");
  std::vector<std::string> head = oracle ? std::vector<std::string>{"h", "sup_error", "observed_order"}
                                         : std::vector<std::string>{"h", "residual_norm"};
  for (auto& mcol : meta_columns()) head.push_back(mcol);
  write_csv_row(csv, head);
  json table = json::array();
  bool monotone = true;
  double min_order = INFINITY;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::vector<std::string> row{format_double(r.h)};
    json jr = {{"h", r.h}, {"residual_norm", r.residual_norm}};
    if (oracle) {
      row.push_back(format_double(r.sup_error));
      row.push_back(r.observed_order ? format_double(*r.observed_order) : "");
      jr["sup_error"] = r.sup_error;
      if (r.observed_order) {
        jr["observed_order"] = *r.observed_order;
        min_order = std::min(min_order, *r.observed_order);
      }
      if (i > 0 && !(r.sup_error < rows[i - 1].sup_error)) monotone = false;
    } else {
      row.push_back(format_double(r.residual_norm));
    }
    for (auto& v : meta_values(c.meta)) row.push_back(v);
    write_csv_row(csv, row);
    table.push_back(jr);
    c.log.emit("study_level", jr);
  }
  c.metrics["rows"] = table;
  c.metrics["oracle"] = oracle;
  if (oracle) {
    c.metrics["monotone_error_decrease"] = monotone;
    c.metrics["min_observed_order"] = min_order;
  }
  c.status = "completed";
}

// ---------------------------------------------------------------- plateau

struct BodySpec {
  ConvexBody body;
  bool unit_centred = false;  // builtin unit ball or disk about the origin
};

BodySpec parse_body(const json& cfg, const fs::path& base) {
  const std::string b = get_string(cfg, "body", "scenario", "");
  if (b.empty()) throw ParseError("scenario.body is required");
  if (b.rfind("builtin:", 0) != 0) return {read_body(base / b), false};
  const Spec s = parse_spec(b.substr(8), "scenario.body");
  const double r = s.number("r", 1.0);
  if (!(r > 0)) throw ParseError("scenario.body: radius must be positive");
  if (s.name == "ball") {
    s.allow({"subdivisions", "r"});
    const double sub = s.number("subdivisions", 5);
    if (sub < 0 || sub > 8 || sub != std::floor(sub)) throw ParseError("scenario.body: subdivisions must be 0..8");
    return {ball(static_cast<int>(sub), r), r == 1.0};
  }
  if (s.name == "disk") {
    s.allow({"count", "r"});
    const double n = s.number("count", 2048);
    if (n < 3 || n != std::floor(n)) throw ParseError("scenario.body: count must be an integer >= 3");
    return {disk(static_cast<int>(n), r), r == 1.0};
  }
  throw ParseError("scenario.body: unknown builtin '" + s.name + "'");
}

FrozenSet parse_frozen(const json& cfg, const ConvexBody& k, const fs::path& base, bool& hemisphere) {
  hemisphere = false;
  if (!cfg.contains("frozen_set")) throw ParseError("scenario.frozen_set is required");
  const json& f = cfg["frozen_set"];
  if (f.is_string()) {
    if (f.get<std::string>() != "hemisphere") throw ParseError("scenario.frozen_set: unknown set '" + f.get<std::string>() + "'");
    hemisphere = true;
    return FrozenSet::lower_half(k);
  }
  if (!f.is_object()) throw ParseError("scenario.frozen_set must be \"hemisphere\" or a table");
  const std::string kind = get_string(f, "kind", "frozen_set", "");
  if (kind == "cap") {
    check_keys(f, {"kind", "normal", "offset"}, "frozen_set");
    if (!f.contains("normal") || !f["normal"].is_array() || static_cast<int>(f["normal"].size()) != k.dim())
      throw ParseError("frozen_set.normal must have one entry per ambient dimension");
    Vec3 nrm = Vec3::Zero();
    for (int i = 0; i < k.dim(); ++i) {
      if (!f["normal"][i].is_number()) throw ParseError("frozen_set.normal must be numeric");
      nrm[i] = f["normal"][i].get<double>();
    }
    if (!(nrm.norm() > 0)) throw ParseError("frozen_set.normal must be nonzero");
    return FrozenSet::halfspace(k, nrm.normalized(), get_number(f, "offset", "frozen_set"));
  }
  if (kind == "samples") {
    check_keys(f, {"kind", "file"}, "frozen_set");
    const fs::path p = base / get_string(f, "file", "frozen_set", "");
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ParseError("cannot open frozen-set samples " + p.string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ParseError(p.string() + ": " + e.what());
    }
    if (get_int(j, "dim", "samples") != k.dim()) throw ParseError("frozen-set samples have the wrong dimension");
    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty())
      throw ParseError("frozen-set samples need a nonempty 'points' array");
    std::vector<Point> pts;
    for (const auto& row : j["points"]) {
      if (!row.is_array() || static_cast<int>(row.size()) != k.dim()) throw ParseError("frozen-set sample of the wrong length");
      Point q = Point::Zero();
      for (int i = 0; i < k.dim(); ++i) q[i] = row[i].get<double>();
      pts.push_back(q);
    }
    return FrozenSet::from_samples(pts);
  }
  throw ParseError("frozen_set.kind must be \"cap\" or \"samples\"");
}

json counts_json(const std::map<PointClass, int>& counts) {
  json j = json::object();
  for (auto c : {PointClass::frozen, PointClass::smooth_constant_k, PointClass::needs_excision, PointClass::lgp_singular}) {
    const auto it = counts.find(c);
    j[to_string(c)] = it == counts.end() ? 0 : it->second;
  }
  return j;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(); }

void run_plateau(Context& c) {
  check_keys(c.cfg, {"kind", "seed", "body", "frozen_set", "k", "tol_H", "tol_kappa", "max_iters", "max_attempts",
                     "min_delta", "h", "ma_h", "lgp_remedy"},
             "scenario");
  const BodySpec body = parse_body(c.cfg, c.base);
  bool hemisphere = false;
  const FrozenSet X = parse_frozen(c.cfg, body.body, c.base, hemisphere);
  const double k = get_number(c.cfg, "k", "scenario");
  if (!(k > 0)) throw ParseError("scenario.k must be positive");
  PlateauOptions o;
  o.tol_H = get_number(c.cfg, "tol_H", "scenario", o.tol_H);
  o.tol_kappa = get_number(c.cfg, "tol_kappa", "scenario", o.tol_kappa);
  o.max_iters = static_cast<int>(get_int(c.cfg, "max_iters", "scenario", o.max_iters));
  o.max_attempts = static_cast<int>(get_int(c.cfg, "max_attempts", "scenario", o.max_attempts));
  o.min_delta = get_number(c.cfg, "min_delta", "scenario", o.min_delta);
  o.h = get_number(c.cfg, "h", "scenario", o.h);
  o.ma_h = get_number(c.cfg, "ma_h", "scenario", o.ma_h);
  o.lgp_remedy = get_bool(c.cfg, "lgp_remedy", "scenario", o.lgp_remedy);
  o.threads = c.threads;
  if (!(o.tol_H > 0) || !(o.tol_kappa > 0) || o.max_iters < 0 || o.max_attempts < 1 || !(o.h > 0) || !(o.ma_h > 0))
    throw ParseError("scenario: tolerances, h and ma_h must be positive; max_iters >= 0; max_attempts >= 1");

  c.executing = true;
  c.log.emit("plateau_start", {{"dim", body.body.dim()}, {"vertices", body.body.vertices().size()}, {"k", k}});
  const auto t0 = std::chrono::steady_clock::now();
  const BarrierState st = solve_plateau(body.body, X, k, o);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  auto jl = c.create("iterations.jsonl");
  for (const auto& l : st.log) {
    const json j = {{"iteration", l.iteration},
                    {"volume", l.volume},
                    {"hausdorff_increment", l.hausdorff_increment},
                    {"counts", counts_json(l.counts)},
                    {"min_free_curvature", finite_or_null(l.min_free_curvature)},
                    {"max_free_curvature", finite_or_null(l.max_free_curvature)},
                    {"attempts", l.attempts},
                    {"meta", meta_json(c.meta)}};
    jl << json_text(j, -1) << '\n';
    c.log.emit("iteration", j);
  }
  json hist = json::array();
  for (const auto& e : st.history) {
    hist.push_back({{"base", {e.base.x(), e.base.y(), e.base.z()}},
                    {"axis", {e.axis.x(), e.axis.y(), e.axis.z()}},
                    {"delta", e.delta},
                    {"omega_vertices", e.omega_vertices},
                    {"omega_inradius", e.omega_inradius},
                    {"omega_radius", e.omega_radius},
                    {"h", e.h},
                    {"circumscribed", e.circumscribed},
                    {"unknowns", e.unknowns},
                    {"newton_iterations", e.newton_iterations},
                    {"residual", e.residual},
                    {"max_clamp", e.max_clamp},
                    {"volume_before", e.volume_before},
                    {"volume_after", e.volume_after},
                    {"hausdorff", e.hausdorff},
                    {"changed", e.changed}});
  }
  c.create("excisions.json") << json_text({{"excisions", hist}, {"meta", meta_json(c.meta)}}) << '\n';
  c.create("body.json") << body_to_json(st.body, &c.meta) << '\n';
  if (st.dim() == 3) {
    auto obj = c.create("surface.obj");
    write_obj(obj, st.body, c.meta);
  } else {
    auto csv = c.create("surface.csv");
    write_polyline_csv(csv, st.body, c.meta);
  }

  bool decreasing = true;
  for (std::size_t i = 1; i < st.volumes.size(); ++i) decreasing = decreasing && st.volumes[i] < st.volumes[i - 1];
  const auto& last = st.log.back();
  json& m = c.metrics;
  m["status"] = st.status;
  m["iterations"] = st.log.size();
  m["excisions"] = st.history.size();
  m["volume_initial"] = st.volumes.front();
  m["volume_final"] = st.body.volume();
  m["volumes_strictly_decreasing"] = decreasing;
  m["final_counts"] = counts_json(last.counts);
  m["lgp_singular_final"] = last.counts.count(PointClass::lgp_singular) ? last.counts.at(PointClass::lgp_singular) : 0;
  m["min_free_curvature"] = finite_or_null(last.min_free_curvature);
  m["max_free_curvature"] = finite_or_null(last.max_free_curvature);
  m["target_curvature"] = target_gauss_curvature(st.dim(), k);
  const double R = 1.0 / std::sqrt(k);
  if (body.unit_centred && hemisphere && R >= 1.0) m["hausdorff_to_oracle"] = equator_cap_hausdorff(st, R);
  c.log.emit("plateau_done", {{"seconds", secs}, {"status", st.status}});
  c.status = st.status;
}

// ---------------------------------------------------------------- suite

void run_suite(Context& c) {
  check_keys(c.cfg, {"kind", "seed", "cases", "duality_cases", "angular_res_deg"}, "scenario");
  SuiteOptions o;
  o.seed = c.meta.seed;
  o.cases = static_cast<int>(get_int(c.cfg, "cases", "scenario", o.cases));
  o.duality_cases = static_cast<int>(get_int(c.cfg, "duality_cases", "scenario", o.duality_cases));
  o.angular_res_deg = get_number(c.cfg, "angular_res_deg", "scenario", o.angular_res_deg);
  o.threads = c.threads;
  if (o.cases < 1 || o.duality_cases < 1 || !(o.angular_res_deg > 0) || o.angular_res_deg > 10)
    throw ParseError("scenario: case counts must be positive and angular_res_deg in (0, 10]");
  c.executing = true;
  const auto t0 = std::chrono::steady_clock::now();
  const auto groups = geometry_suite(o);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  auto csv = c.create("suite.csv");
  std::vector<std::string> head{"group", "status", "cases", "failures", "worst", "tolerance"};
  for (auto& mcol : meta_columns()) head.push_back(mcol);
  write_csv_row(csv, head);
  json jg = json::object();
  bool all = true;
  for (const auto& g : groups) {
    const std::string status = g.pass() ? "pass" : "fail";
    all = all && g.pass();
    jg[g.name] = {{"status", status}, {"cases", g.cases}, {"failures", g.failures}, {"worst", g.worst},
                  {"tolerance", g.tolerance}};
    std::vector<std::string> row{g.name, status, std::to_string(g.cases), std::to_string(g.failures),
                                 format_double(g.worst), format_double(g.tolerance)};
    for (auto& v : meta_values(c.meta)) row.push_back(v);
    write_csv_row(csv, row);
    c.log.emit("group", {{"group", g.name}, {"status", status}, {"failures", g.failures}});
  }
  c.log.emit("suite_done", {{"seconds", secs}});
  c.metrics["groups"] = jg;
  c.metrics["all_pass"] = all;
  c.status = all ? "pass" : "fail";
  if (!all) c.exit_code = exit_failure;
}

void write_human(std::ostream& os, const json& s) {
  os << s["kind"].get<std::string>() << ": " << s["status"].get<std::string>() << '\n';
  if (s.contains("error")) os << "  error: " << s["error"].get<std::string>() << '\n';
  for (auto it = s["metrics"].begin(); it != s["metrics"].end(); ++it) {
    if (it.value().is_structured()) continue;
    os << "  " << it.key() << " = " << (it.value().is_number_float() ? format_double(it.value().get<double>())
                                                                   : it.value().dump())
       << '\n';
  }
  if (s["metrics"].contains("groups"))
    for (auto it = s["metrics"]["groups"].begin(); it != s["metrics"]["groups"].end(); ++it)
      os << "  " << it.key() << ": " << it.value()["status"].get<std::string>() << " (" << it.value()["cases"]
         << " cases)\n";
  if (s["metrics"].contains("rows"))
    for (const auto& r : s["metrics"]["rows"]) os << "  " << json_text(r, -1) << '\n';
  if (!s["artifacts"].empty()) os << "  artifacts: " << s["artifacts"].size() << " files\n";
}

}  // namespace

Report run(const std::string& command, const RunOptions& opts) {
  static const std::map<std::string, std::string> kinds{
      {"solve", "dirichlet"}, {"plateau", "plateau"}, {"suite", "geometry_suite"}, {"study", "convergence_study"}};
  Context c;
  c.out = opts.out;
  c.threads = std::max(1, opts.threads);
  c.log = EventLog(opts.log);
  c.meta.version = version_string();
  Report rep;
  const auto kind_it = kinds.find(command);
  const std::string kind = kind_it == kinds.end() ? command : kind_it->second;
  std::string error;
  try {
    if (kind_it == kinds.end()) throw ParseError("unknown command '" + command + "'");
    c.cfg = load_config(opts.config, opts.json);
    c.base = opts.config.parent_path();
    const std::string declared = get_string(c.cfg, "kind", "scenario", kind);
    if (declared != kind) throw ParseError("scenario kind '" + declared + "' does not match command '" + command + "'");
    c.meta.seed = opts.seed ? *opts.seed : config_seed(c.cfg);
    c.meta.scenario_hash = scenario_hash(c.cfg);
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec || !fs::is_directory(c.out)) throw ParseError("output directory not writable: " + c.out.string());
    c.log.emit("start", {{"command", command}, {"config", opts.config.string()}, {"meta", meta_json(c.meta)}});
    if (kind == "dirichlet") run_dirichlet(c);
    else if (kind == "convergence_study") run_study(c);
    else if (kind == "plateau") run_plateau(c);
    else run_suite(c);
  } catch (const ParseError& e) {
    c.exit_code = exit_parse;
    c.status = "parse_error";
    error = e.what();
  } catch (const std::exception& e) {
    // Invalid geometry while reading the scenario is an input error; anything
    // raised by the solvers is a failure.
    c.exit_code = c.executing ? exit_failure : exit_parse;
    c.status = c.executing ? "solver_failure" : "parse_error";
    error = e.what();
  }
  json& s = rep.summary;
  s["kind"] = kind;
  s["status"] = c.status;
  s["metrics"] = c.metrics;
  s["artifacts"] = c.artifacts;
  s["meta"] = meta_json(c.meta);
  if (!error.empty()) {
    s["error"] = error;
    c.log.emit("error", {{"status", c.status}, {"message", error}});
  }
  if (fs::is_directory(c.out)) {
    std::ofstream f(c.out / "summary.json", std::ios::binary);
    f << json_text(s) << '\n';
  }
  c.log.emit("done", {{"status", c.status}, {"exit_code", c.exit_code}});
  if (opts.human) write_human(*opts.human, s);
  rep.exit_code = c.exit_code;
  return rep;
}

}  // namespace kplateau::app
