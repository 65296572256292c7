#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <cstring>
#include <numbers>
#include <sstream>

#include "kplateau/io.hpp"
#include "kplateau/shapes.hpp"

using namespace kplateau;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("kplateau_io_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

// Minimal RFC 4180 reader used only to check the writer.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows(1);
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') field += '"', ++i;
      else if (c == '"') quoted = false;
      else field += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rows.back().push_back(field), field.clear();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      rows.back().push_back(field), field.clear();
      rows.emplace_back();
      ++i;
    } else {
      field += c;
    }
  }
  rows.pop_back();
  return rows;
}

}  // namespace

TEST_CASE("doubles print with 17 significant digits and round-trip") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  char ref[64];
  for (double x : {2.0 / 3, -1e-300, 123456789.123456789, 5e-324}) {
    std::snprintf(ref, sizeof ref, "%.17g", x);
    CHECK(format_double(x) == ref);
  }
  CHECK(format_double(std::nan("")) == "nan");
  for (double x : {std::numbers::pi, 1.0 / 3, 6.02214076e23, -1e-17})
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("json text prints floats through the 17-digit formatter") {
  nlohmann::json j = {{"a", 0.1}, {"b", {1, 2.5}}, {"c", "x,y"}, {"d", std::nan("")}};
  const std::string s = json_text(j, -1);
  CHECK(s == R"({"a":0.10000000000000001,"b":[1, 2.5],"c":"x,y","d":null})");
  CHECK(nlohmann::json::parse(s)["a"].get<double>() == 0.1);
}

TEST_CASE("body json round-trips") {
  const ConvexBody b = ball(2, 1.5, Point(0.1, -0.2, 0.3));
  const ConvexBody c = body_from_json(body_to_json(b));
  REQUIRE(c.vertices().size() == b.vertices().size());
  for (std::size_t i = 0; i < b.vertices().size(); ++i) CHECK(c.vertices()[i] == b.vertices()[i]);
  const ConvexBody d = body_from_json(R"({"dim": 2, "vertices": [[0,0],[1,0],[0,1],[0.2,0.2]]})");
  CHECK(d.vertices().size() == 3);
  CHECK(d.volume() == doctest::Approx(0.5));
}

TEST_CASE("malformed body json is a parse error") {
  CHECK_THROWS_AS(body_from_json("{"), ParseError);
  CHECK_THROWS_AS(body_from_json(R"({"vertices": [[0,0]]})"), ParseError);
  CHECK_THROWS_AS(body_from_json(R"({"dim": 4, "vertices": [[0,0,0,0]]})"), ParseError);
  CHECK_THROWS_AS(body_from_json(R"({"dim": 2, "vertices": [[0,0,1]]})"), ParseError);
  CHECK_THROWS_AS(body_from_json(R"({"dim": 2, "vertices": [[0,"a"]]})"), ParseError);
}

TEST_CASE("direction set json round-trips") {
  DirectionSet s(3, DirectionKind::link);
  s.add(Vec3(1, 2, 3));
  s.add(Vec3(0, 0, -1));
  const DirectionSet t = direction_set_from_json(direction_set_to_json(s));
  CHECK(t.dim == 3);
  CHECK(t.kind == DirectionKind::link);
  REQUIRE(t.size() == 2);
  CHECK((t.directions[0] - s.directions[0]).norm() == 0.0);
  CHECK_THROWS_AS(direction_set_from_json(R"({"dim":2,"kind":"bogus","directions":[]})"), ParseError);
}

TEST_CASE("grid files round-trip bit for bit") {
  const auto dir = scratch_dir("grid");
  GridSpec spec;
  spec.dim = 3;
  spec.origin = Vec3(-1, -0.5, 0.25);
  spec.spacing = 0.125;
  spec.shape = {3, 4, 5};
  GridField g(spec);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = std::sin(double(i)) / 3;
  g.values[7] = std::nan("");
  const ArtifactMeta meta{"v0-test", 42, "abc"};
  write_grid(dir / "f.json", g, &meta);
  CHECK(std::filesystem::file_size(dir / "f.bin") == g.values.size() * 8);
  const GridField r = read_grid(dir / "f.json");
  CHECK(r.spec.shape == spec.shape);
  CHECK(r.spec.origin == spec.origin);
  CHECK(r.spec.spacing == spec.spacing);
  CHECK(std::memcmp(r.values.data(), g.values.data(), g.values.size() * 8) == 0);
  // Row-major: the last index is fastest.
  CHECK(r.at(1, 2, 3) == g.values[(1 * 4 + 2) * 5 + 3]);
  std::filesystem::resize_file(dir / "f.bin", 16);
  CHECK_THROWS_AS(read_grid(dir / "f.json"), ParseError);
}

TEST_CASE("csv output follows RFC 4180") {
  std::ostringstream os;
  write_csv_row(os, {"plain", "with,comma", "with \"quote\"", "multi\nline", ""});
  CHECK(os.str() == "plain,\"with,comma\",\"with \"\"quote\"\"\",\"multi\nline\",\r\n");
  const auto rows = parse_csv(os.str());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][2] == "with \"quote\"");
  CHECK(rows[0][3] == "multi\nline");
}

TEST_CASE("polyline csv is a closed counter-clockwise boundary") {
  const ConvexBody d = disk(64);
  std::ostringstream os;
  write_polyline_csv(os, d, {"v", 1, "h"});
  const auto rows = parse_csv(os.str());
  REQUIRE(rows.size() == 65);
  CHECK(rows[0] == std::vector<std::string>{"x", "y", "version", "seed", "scenario_hash"});
  double area = 0;
  for (int i = 1; i <= 64; ++i) {
    const auto& a = rows[i];
    const auto& b = rows[i % 64 + 1];
    area += std::stod(a[0]) * std::stod(b[1]) - std::stod(b[0]) * std::stod(a[1]);
    CHECK(a[3] == "1");
  }
  CHECK(0.5 * area == doctest::Approx(d.volume()).epsilon(1e-12));
}

TEST_CASE("obj export has outward triangles and the metadata") {
  const ConvexBody b = ball(2);
  std::ostringstream os;
  write_obj(os, b, {"v1", 7, "deadbeef"});
  std::istringstream in(os.str());
  std::string line;
  std::vector<Point> v;
  double vol6 = 0;
  int faces = 0;
  bool seed = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "#") seed = seed || line == "# seed 7";
    if (tag == "v") {
      Point p;
      ls >> p.x() >> p.y() >> p.z();
      v.push_back(p);
    }
    if (tag == "f") {
      int i, j, k;
      ls >> i >> j >> k;
      vol6 += v[i - 1].dot(v[j - 1].cross(v[k - 1]));
      ++faces;
    }
  }
  CHECK(seed);
  CHECK(faces == static_cast<int>(b.facets().size()));
  CHECK(vol6 / 6 == doctest::Approx(b.volume()).epsilon(1e-12));
}
