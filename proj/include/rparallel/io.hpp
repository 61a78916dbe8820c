#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rparallel/complex.hpp"
#include "rparallel/measures.hpp"
#include "rparallel/scene.hpp"
#include "rparallel/summary.hpp"

namespace rparallel::io {

/// Polygon soup as stored in OFF or PLY files.
struct MeshData {
  std::vector<Vec3> vertices;
  std::vector<std::vector<Index>> faces;
};

MeshData read_off(std::istream& in);
MeshData read_ply(std::istream& in);
/// Dispatches on the file extension (.off or .ply).
MeshData read_mesh_data(const std::filesystem::path& path);

/// Interior tessellation file:
///
///     SIMPLICES <dim> <count>
///     i0 i1 ... id        (one d-simplex per line, indices into the mesh vertices)
///
/// Blank lines and lines starting with '#' are ignored.
std::vector<Index> read_interior(std::istream& in, int dim);
void write_interior(std::ostream& out, const SimplicialComplex& complex);

/// Boundary mesh plus optional interior file into a complex.
SimplicialComplex read_complex(const std::filesystem::path& boundary, int dim,
                               const std::optional<std::filesystem::path>& interior = std::nullopt);

/// Every vertex (interior ones included) and the boundary simplices as faces.
void write_off(std::ostream& out, const SimplicialComplex& complex);
void write_ply(std::ostream& out, const SimplicialComplex& complex);

/// Reads a scene description; mesh paths are relative to the scene file.
/// Throws ValidationError listing every problem found by check_scene.
GermGrainScene parse_scene(const std::filesystem::path& path);
/// Writes the scene JSON and one OFF (+ interior) file per distinct mesh next to it.
void write_scene(const GermGrainScene& scene, const std::filesystem::path& path);

/// "%.17g", or an empty string for kMissing.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  /// Numeric column; empty cells become kMissing.
  std::vector<double> numbers(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

inline const std::vector<std::string> kMeasureColumns{"r",  "mu00", "mu01", "mu10", "mu11", "N0",
                                                      "N1", "nu00", "nu01", "nu10", "nu11"};
inline const std::vector<std::string> kSummaryColumns{"r",     "value", "kind",  "pair",         "n_ref",
                                                      "n_obs", "rho_x", "rho_y", "window_volume"};

void write_measure_csv(std::ostream& out, const MeasureTable& table);
void write_summary_csv(std::ostream& out, const SummaryCurve& curve);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rparallel::io
