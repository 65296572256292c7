#include <cmath>

#include "kplateau_app/app.hpp"
#include "kplateau_app/detail.hpp"

namespace kplateau::app {

namespace {

using nlohmann::json;

GraphDomain parse_domain(const json& d, int n) {
  if (d.is_array()) {
    if (n != 2) throw ParseError("problem.domain: polygon vertices need n = 2");
    std::vector<Point> pts;
    for (const auto& row : d) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
        throw ParseError("problem.domain: polygon vertices must be [x, y] pairs");
      pts.emplace_back(row[0].get<double>(), row[1].get<double>(), 0.0);
    }
    const ConvexBody poly(2, pts);
    if (!poly.full_dimensional()) throw ParseError("problem.domain: polygon has empty interior");
    return GraphDomain::polygon(poly);
  }
  if (!d.is_string()) throw ParseError("problem.domain: expected a string or a vertex array");
  const Spec s = parse_spec(d.get<std::string>(), "problem.domain");
  if (s.name == "disk") {
    s.allow({"r", "cx", "cy"});
    const double r = s.number("r"), cx = s.number("cx", 0.0), cy = s.number("cy", 0.0);
    if (!(r > 0)) throw ParseError("problem.domain: disk radius must be positive");
    return n == 1 ? GraphDomain::interval(cx - r, cx + r) : GraphDomain::disk(Vec2(cx, cy), r);
  }
  if (s.name == "interval") {
    s.allow({"a", "b"});
    if (n != 1) throw ParseError("problem.domain: interval needs n = 1");
    const double a = s.number("a"), b = s.number("b");
    if (!(b > a)) throw ParseError("problem.domain: interval needs a < b");
    return GraphDomain::interval(a, b);
  }
  throw ParseError("problem.domain: unknown domain '" + s.name + "'");
}

// Largest |x|^2 over the domain's bounding box.
double max_sq_radius(const GraphDomain& d) {
  double m = 0;
  for (double x : {d.lower().x(), d.upper().x()})
    for (double y : {d.lower().y(), d.upper().y()}) m = std::max(m, x * x + (d.n() == 2 ? y * y : 0.0));
  return m;
}

}  // namespace

std::optional<ScalarField> dirichlet_oracle(const GraphDomain& domain, double phi, bool g0, int n) {
  if (!domain.round() || !(phi > 0)) return std::nullopt;
  const Vec2 c = domain.center();
  const double r = domain.radius();
  const auto sq = [c, n](const Vec2& x) {
    return n == 1 ? (x.x() - c.x()) * (x.x() - c.x()) : (x - c).squaredNorm();
  };
  if (!g0) return ScalarField([=](const Vec2& x) { return 0.5 * phi * (sq(x) - r * r); });
  const double R = 1.0 / phi;
  if (R < r) return std::nullopt;
  return ScalarField([=](const Vec2& x) { return std::sqrt(R * R - r * r) - std::sqrt(std::max(R * R - sq(x), 0.0)); });
}

DirichletSetup dirichlet_setup(const json& p, const std::filesystem::path& base) {
  if (!p.is_object()) throw ParseError("problem: expected a table");
  check_keys(p, {"kind", "seed", "n", "domain", "h", "phi", "G", "barrier", "tol"}, "problem");
  DirichletSetup s;
  GraphProblem& prob = s.problem;
  prob.n = static_cast<int>(get_int(p, "n", "problem"));
  if (prob.n != 1 && prob.n != 2) throw ParseError("problem.n must be 1 or 2");
  if (!p.contains("domain")) throw ParseError("problem.domain is required");
  prob.domain = parse_domain(p["domain"], prob.n);
  prob.h = get_number(p, "h", "problem", 1.0 / 64);
  if (!(prob.h > 0)) throw ParseError("problem.h must be positive");
  prob.tol = get_number(p, "tol", "problem", -1.0);

  bool constant = true;
  double phi_c = 0;
  const json phi = p.contains("phi") ? p["phi"] : json();
  if (phi.is_number()) {
    phi_c = phi.get<double>();
    s.phi_max = phi_c;
  } else if (phi.is_string()) {
    const Spec sp = parse_spec(phi.get<std::string>(), "problem.phi");
    if (sp.name == "curvature") {
      sp.allow({"k"});
      phi_c = phi_for_curvature(sp.number("k"));
      s.phi_max = phi_c;
    } else if (sp.name == "radial") {
      sp.allow({"a", "b"});
      const double a = sp.number("a"), b = sp.number("b");
      if (!(a > 0) || b < 0) throw ParseError("problem.phi: radial needs a > 0 and b >= 0");
      constant = false;
      prob.phi = [a, b](const Vec2& x) { return a + b * x.squaredNorm(); };
      s.phi_max = a + b * max_sq_radius(prob.domain);
    } else {
      throw ParseError("problem.phi: unknown expression id '" + sp.name + "'");
    }
  } else {
    throw ParseError("problem.phi is required (number or expression id)");
  }
  if (constant) {
    if (!(phi_c > 0)) throw ParseError("problem.phi must be positive");
    prob.phi = [phi_c](const Vec2&) { return phi_c; };
  }

  const std::string G = get_string(p, "G", "problem", "g0");
  if (G != "g0" && G != "one") throw ParseError("problem.G must be \"one\" or \"g0\"");
  prob.G = G == "g0" ? GradientWeight::g0(prob.n) : GradientWeight::one(prob.n);

  const std::string barrier = get_string(p, "barrier", "problem", "auto-cap scale=1");
  if (barrier.rfind("auto-cap", 0) == 0) {
    const Spec b = parse_spec(barrier, "problem.barrier");
    b.allow({"scale"});
    if (!prob.domain.round()) throw ParseError("problem.barrier: auto-cap needs a disk or interval domain");
    prob.barrier = auto_cap_barrier(prob.domain, s.phi_max, b.number("scale", 1.0));
  } else {
    // Grid file (header JSON); sampled multilinearly.
    auto g = std::make_shared<GridField>(read_grid(base / barrier));
    prob.barrier = [g](const Vec2& x) { return g->sample(Point(x.x(), x.y(), g->spec.origin.z())); };
  }
  if (constant) s.oracle = dirichlet_oracle(prob.domain, phi_c, G == "g0", prob.n);
  return s;
}

std::vector<ConvergenceRow> convergence_study(const json& problem, const std::vector<double>& h_list,
                                              const std::filesystem::path& base) {
  if (h_list.size() < 3) throw ParseError("study.h_list needs at least 3 grid levels");
  DirichletSetup s = dirichlet_setup(problem, base);
  std::vector<ConvergenceRow> rows;
  for (double h : h_list) {
    if (!(h > 0)) throw ParseError("study.h_list entries must be positive");
    s.problem.h = h;
    const GraphSolution sol = solve_dirichlet(s.problem);
    ConvergenceRow r;
    r.h = h;
    r.residual_norm = sol.diag.residual_norm;
    r.sup_error = std::nan("");
    if (s.oracle) {
      r.sup_error = 0;
      for (int i = 0; i < sol.disc->size(); ++i)
        r.sup_error = std::max(r.sup_error, std::abs(sol.f(i) - (*s.oracle)(sol.disc->coord(i))));
    }
    // Order relative to the previous level: log(e_prev / e) / log(h_prev / h),
    // which is log2(e_{2h} / e_h) for halving sequences.
    if (!rows.empty() && s.oracle && r.sup_error > 0 && rows.back().sup_error > 0)
      r.observed_order = std::log(rows.back().sup_error / r.sup_error) / std::log(rows.back().h / h);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace kplateau::app
