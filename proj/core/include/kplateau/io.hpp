#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kplateau/convex_body.hpp"
#include "kplateau/convex_kernel.hpp"
#include "kplateau/grid.hpp"
#include "kplateau/ma_solver.hpp"

namespace kplateau {

// Malformed input files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Provenance stamped into every written artifact.
struct ArtifactMeta {
  std::string version;
  std::uint64_t seed = 0;
  std::string scenario_hash;
};

// 17 significant digits, locale independent. Non-finite values print as
// nan, inf, -inf.
std::string format_double(double x);

// JSON text with every floating-point number printed by format_double
// (non-finite numbers become null). indent < 0 gives a single line.
std::string json_text(const nlohmann::json& j, int indent = 2);
nlohmann::json meta_json(const ArtifactMeta& m);

// Body JSON {dim, vertices: [[x, y(, z)], ...]}.
std::string body_to_json(const ConvexBody& k, const ArtifactMeta* meta = nullptr);
ConvexBody body_from_json(const std::string& text);
ConvexBody read_body(const std::filesystem::path& path);

// DirectionSet JSON {dim, directions: [[...]], kind}.
std::string direction_set_to_json(const DirectionSet& s);
DirectionSet direction_set_from_json(const std::string& text);

// Grid field as a JSON header {origin, spacing, shape, dim, data} next to a
// flat little-endian float64 file in row-major order. `header` names the JSON
// file; the binary file is the header path with extension ".bin".
void write_grid(const std::filesystem::path& header, const GridField& g, const ArtifactMeta* meta = nullptr);
GridField read_grid(const std::filesystem::path& header);

// RFC 4180 output: CRLF records, fields quoted when they contain a comma,
// quote, CR or LF.
std::string csv_field(const std::string& s);
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

// Metadata columns appended to every CSV artifact.
std::vector<std::string> meta_columns();
std::vector<std::string> meta_values(const ArtifactMeta& m);

// Boundary of a spatial body as an OBJ triangle mesh (1-based, outward order).
void write_obj(std::ostream& os, const ConvexBody& k, const ArtifactMeta& meta);
// Boundary of a planar body as a closed counter-clockwise polyline (x, y).
void write_polyline_csv(std::ostream& os, const ConvexBody& k, const ArtifactMeta& meta);
// Nodal values with curvature and residual: x, y, f, kappa, residual. kappa is
// empty where the stencil is cut by the boundary.
void write_solution_csv(std::ostream& os, const GraphSolution& sol, const ArtifactMeta& meta);

}  // namespace kplateau
