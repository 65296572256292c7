#include "kplateau/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kplateau {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Point point_of(const json& row, int dim) {
  if (!row.is_array() || static_cast<int>(row.size()) != dim) throw ParseError("coordinate row of the wrong length");
  Point p = Point::Zero();
  for (int i = 0; i < dim; ++i) {
    if (!row[i].is_number()) throw ParseError("non-numeric coordinate");
    p[i] = row[i].get<double>();
  }
  return p;
}

json row_of(const Vec3& p, int dim) {
  json r = json::array();
  for (int i = 0; i < dim; ++i) r.push_back(p[i]);
  return r;
}

int dim_of(const json& j) {
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw ParseError("missing integer field 'dim'");
  const int d = j["dim"].get<int>();
  if (d != 2 && d != 3) throw ParseError("dim must be 2 or 3");
  return d;
}

void emit(std::string& out, const json& j, int indent, int level) {
  const auto newline = [&](int l) {
    if (indent < 0) return;
    out += '\n';
    out.append(std::size_t(indent * l), ' ');
  };
  switch (j.type()) {
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        emit(out, it.value(), indent, level + 1);
      }
      newline(level);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric rows stay on one line.
      const bool flat = j.size() <= 3 && std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(level + 1);
        emit(out, e, indent, level + 1);
      }
      if (!flat) newline(level);
      out += ']';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string json_text(const json& j, int indent) {
  std::string out;
  emit(out, j, indent, 0);
  return out;
}

json meta_json(const ArtifactMeta& m) {
  return {{"version", m.version}, {"seed", m.seed}, {"scenario_hash", m.scenario_hash}};
}

std::string body_to_json(const ConvexBody& k, const ArtifactMeta* meta) {
  json j;
  j["dim"] = k.dim();
  json rows = json::array();
  for (const auto& v : k.vertices()) rows.push_back(row_of(v, k.dim()));
  j["vertices"] = rows;
  if (meta) j["meta"] = meta_json(*meta);
  return json_text(j);
}

ConvexBody body_from_json(const std::string& text) {
  const json j = parse(text);
  const int dim = dim_of(j);
  if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].empty())
    throw ParseError("missing vertex array 'vertices'");
  std::vector<Point> pts;
  for (const auto& row : j["vertices"]) pts.push_back(point_of(row, dim));
  return ConvexBody(dim, pts);
}

ConvexBody read_body(const std::filesystem::path& path) { return body_from_json(slurp(path)); }

std::string direction_set_to_json(const DirectionSet& s) {
  json j;
  j["dim"] = s.dim;
  j["kind"] = to_string(s.kind);
  json rows = json::array();
  for (const auto& u : s.directions) rows.push_back(row_of(u, s.dim));
  j["directions"] = rows;
  return json_text(j);
}

DirectionSet direction_set_from_json(const std::string& text) {
  const json j = parse(text);
  const int dim = dim_of(j);
  DirectionSet s(dim, DirectionKind::generic);
  const std::string kind = j.value("kind", "generic");
  bool known = false;
  for (auto k : {DirectionKind::supporting_normals, DirectionKind::link, DirectionKind::dual, DirectionKind::generic}) {
    if (to_string(k) == kind) {
      s.kind = k;
      known = true;
    }
  }
  if (!known) throw ParseError("unknown direction set kind '" + kind + "'");
  if (!j.contains("directions") || !j["directions"].is_array()) throw ParseError("missing array 'directions'");
  for (const auto& row : j["directions"]) {
    const Point u = point_of(row, dim);
    if (!(u.norm() > 0)) throw ParseError("zero direction");
    s.add(u);
  }
  return s;
}

void write_grid(const std::filesystem::path& header, const GridField& g, const ArtifactMeta* meta) {
  static_assert(std::endian::native == std::endian::little, "grid files are little-endian");
  std::filesystem::path bin = header;
  bin.replace_extension(".bin");
  json j;
  j["dim"] = g.spec.dim;
  j["origin"] = row_of(g.spec.origin, 3);
  j["spacing"] = g.spec.spacing;
  j["shape"] = {g.spec.shape[0], g.spec.shape[1], g.spec.shape[2]};
  j["dtype"] = "float64";
  j["order"] = "row-major";
  j["data"] = bin.filename().string();
  if (meta) j["meta"] = meta_json(*meta);
  std::ofstream h(header, std::ios::binary);
  h << json_text(j) << '\n';
  std::ofstream b(bin, std::ios::binary);
  b.write(reinterpret_cast<const char*>(g.values.data()), std::streamsize(g.values.size() * sizeof(double)));
  if (!h || !b) throw std::runtime_error("cannot write grid " + header.string());
}

GridField read_grid(const std::filesystem::path& header) {
  const json j = parse(slurp(header));
  GridSpec spec;
  spec.dim = dim_of(j);
  try {
    spec.origin = point_of(j.at("origin"), 3);
    spec.spacing = j.at("spacing").get<double>();
    for (int i = 0; i < 3; ++i) spec.shape[i] = j.at("shape").at(i).get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid header: ") + e.what());
  }
  if (!(spec.spacing > 0) || spec.shape[0] < 1 || spec.shape[1] < 1 || spec.shape[2] < 1)
    throw ParseError("grid header: non-positive spacing or shape");
  if (j.value("dtype", "float64") != "float64") throw ParseError("grid header: dtype must be float64");
  const std::filesystem::path bin = header.parent_path() / j.value("data", header.stem().string() + ".bin");
  const std::string raw = slurp(bin);
  if (raw.size() != spec.size() * sizeof(double)) throw ParseError("grid data size does not match the header shape");
  GridField g(spec);
  std::copy_n(raw.data(), raw.size(), reinterpret_cast<char*>(g.values.data()));
  return g;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << "\r\n";
}

std::vector<std::string> meta_columns() { return {"version", "seed", "scenario_hash"}; }

std::vector<std::string> meta_values(const ArtifactMeta& m) {
  return {m.version, std::to_string(m.seed), m.scenario_hash};
}

void write_obj(std::ostream& os, const ConvexBody& k, const ArtifactMeta& meta) {
  require(k.dim() == 3, "OBJ export needs a spatial body");
  os << "# version " << meta.version << "\n# seed " << meta.seed << "\n# scenario_hash " << meta.scenario_hash << '\n';
  const auto& V = k.vertices();
  for (const auto& v : V) os << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
  for (const auto& f : k.facets()) {
    auto t = f.v;
    if ((V[t[1]] - V[t[0]]).cross(V[t[2]] - V[t[0]]).dot(f.normal) < 0) std::swap(t[1], t[2]);
    os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void write_polyline_csv(std::ostream& os, const ConvexBody& k, const ArtifactMeta& meta) {
  require(k.dim() == 2, "polyline export needs a planar body");
  std::vector<Point> V = k.vertices();
  const Point c = k.centroid();
  std::sort(V.begin(), V.end(), [&](const Point& a, const Point& b) {
    return std::atan2(a.y() - c.y(), a.x() - c.x()) < std::atan2(b.y() - c.y(), b.x() - c.x());
  });
  std::vector<std::string> head{"x", "y"};
  for (auto& m : meta_columns()) head.push_back(m);
  write_csv_row(os, head);
  const auto mv = meta_values(meta);
  for (const auto& v : V) {
    std::vector<std::string> row{format_double(v.x()), format_double(v.y())};
    row.insert(row.end(), mv.begin(), mv.end());
    write_csv_row(os, row);
  }
}

void write_solution_csv(std::ostream& os, const GraphSolution& sol, const ArtifactMeta& meta) {
  std::vector<std::string> head{"x", "y", "f", "kappa", "residual"};
  for (auto& m : meta_columns()) head.push_back(m);
  write_csv_row(os, head);
  const auto mv = meta_values(meta);
  for (int i = 0; i < sol.disc->size(); ++i) {
    const Vec2& x = sol.disc->coord(i);
    std::string kappa;
    if (sol.disc->stencil(i).full) kappa = format_double(gaussian_curvature_of_graph(sol, i));
    std::vector<std::string> row{format_double(x.x()), format_double(x.y()), format_double(sol.f(i)), kappa,
                                 format_double(sol.residual(i))};
    row.insert(row.end(), mv.begin(), mv.end());
    write_csv_row(os, row);
  }
}

}  // namespace kplateau
