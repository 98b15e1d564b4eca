#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "torsionlab/decomposition.hpp"
#include "torsionlab/field.hpp"
#include "torsionlab/grid.hpp"

namespace torsionlab::io {

using Json = nlohmann::json;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// A CSV table with a header row; cells are written verbatim.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string str() const;
};

/// "x,y,value" on planar grids, "r,value" on radial grids.
CsvTable field_table(const ScalarField& field);

/// 16-bit gray image, row-major from the top row.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint16_t> pixels;
};

/// Binary PGM (P5), big-endian samples, maxval 65535.
std::string encode_pgm(const GrayImage& image);

/// Heatmap of a planar field scaled linearly from min to max; lattice points
/// outside the grid are 0. Throws PreconditionError on radial grids.
GrayImage heatmap(const ScalarField& field);
/// S and points outside the grid are 0; component i is i + 1.
GrayImage label_image(const DecompositionResult& decomposition);

Json grid_descriptor(const Grid& grid);

/// Writes files under a root directory without overwriting: a colliding
/// name gets a numeric suffix (name.1.csv) and a warning on standard error.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root);

  std::filesystem::path write(const std::string& name, const std::string& bytes);
  std::filesystem::path write_csv(const std::string& name, const CsvTable& table);
  std::filesystem::path write_json(const std::string& name, const Json& value);
  std::filesystem::path write_pgm(const std::string& name, const GrayImage& image);

  const std::filesystem::path& root() const noexcept { return root_; }
  const std::vector<std::filesystem::path>& written() const noexcept { return written_; }

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> written_;
};

/// Pretty JSON with sorted keys and a trailing newline.
std::string dump_json(const Json& value);

}  // namespace torsionlab::io
