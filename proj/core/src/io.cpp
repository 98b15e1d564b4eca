#include "torsionlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>

#include "torsionlab/error.hpp"

namespace torsionlab::io {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw PreconditionError("CSV row width does not match the header");
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  const auto append = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append(header);
  for (const auto& row : rows) append(row);
  return out;
}

CsvTable field_table(const ScalarField& field) {
  const Grid& grid = *field.grid();
  CsvTable table;
  const bool radial = grid.mode() == GridMode::radial;
  table.header = radial ? std::vector<std::string>{"r", "value"} : std::vector<std::string>{"x", "y", "value"};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Node& node = grid.nodes()[k];
    if (radial) {
      table.rows.push_back({format_double(node.x), format_double(field[k])});
    } else {
      table.rows.push_back({format_double(node.x), format_double(node.y), format_double(field[k])});
    }
  }
  return table;
}

std::string encode_pgm(const GrayImage& image) {
  if (image.pixels.size() != image.width * image.height) throw PreconditionError("PGM pixel count mismatch");
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n65535\n";
  out.reserve(out.size() + 2 * image.pixels.size());
  for (std::uint16_t p : image.pixels) {
    out += static_cast<char>(p >> 8);
    out += static_cast<char>(p & 0xff);
  }
  return out;
}

namespace {

template <class F>
GrayImage lattice_image(const Grid& grid, F&& pixel) {
  if (grid.mode() != GridMode::planar) throw PreconditionError("images need a planar grid");
  GrayImage image;
  image.width = static_cast<std::size_t>(grid.i_max() - grid.i_min() + 1);
  image.height = static_cast<std::size_t>(grid.j_max() - grid.j_min() + 1);
  image.pixels.assign(image.width * image.height, 0);
  for (int j = grid.j_max(); j >= grid.j_min(); --j) {
    const std::size_t row = static_cast<std::size_t>(grid.j_max() - j);
    for (int i = grid.i_min(); i <= grid.i_max(); ++i) {
      const auto node = grid.node_at(i, j);
      if (node) image.pixels[row * image.width + static_cast<std::size_t>(i - grid.i_min())] = pixel(*node);
    }
  }
  return image;
}

}  // namespace

GrayImage heatmap(const ScalarField& field) {
  const double lo = field.min(), hi = field.max();
  const double span = hi - lo;
  return lattice_image(*field.grid(), [&](std::size_t k) {
    if (!(span > 0.0)) return std::uint16_t{0};
    return static_cast<std::uint16_t>(std::lround((field[k] - lo) / span * 65535.0));
  });
}

GrayImage label_image(const DecompositionResult& decomposition) {
  if (decomposition.component_count > 65534) throw PreconditionError("too many components for a 16-bit label image");
  return lattice_image(*decomposition.grid, [&](std::size_t k) {
    const int label = decomposition.labels.empty() ? -1 : decomposition.labels[k];
    return static_cast<std::uint16_t>(label < 0 ? 0 : label + 1);
  });
}

Json grid_descriptor(const Grid& grid) {
  Json spec;
  std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Rectangle>) {
          spec = {{"type", "rectangle"}, {"x0", shape.x0}, {"x1", shape.x1}, {"y0", shape.y0}, {"y1", shape.y1}};
        } else if constexpr (std::is_same_v<T, Disk>) {
          spec = {{"type", "disk"}, {"center", {shape.center.x, shape.center.y}}, {"radius", shape.radius}};
        } else {
          spec = {{"type", "radial_ball"},
                  {"dimension", shape.dimension},
                  {"radius", shape.radius},
                  {"include_origin", shape.include_origin}};
        }
      },
      grid.spec().shape);
  if (grid.spec().inner_region) {
    const Disk& d = *grid.spec().inner_region;
    spec["inner_region"] = {{"center", {d.center.x, d.center.y}}, {"radius", d.radius}};
  }
  return {{"spec", spec},
          {"h", grid.h()},
          {"node_count", grid.size()},
          {"edge_count", grid.edges().size()},
          {"mode", grid.mode() == GridMode::planar ? "planar" : "radial"}};
}

std::string dump_json(const Json& value) { return value.dump(2) + "\n"; }

ArtifactWriter::ArtifactWriter(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) throw PreconditionError("cannot create output directory " + root_.string());
}

fs::path ArtifactWriter::write(const std::string& name, const std::string& bytes) {
  fs::path target = root_ / name;
  if (fs::exists(target)) {
    const fs::path stem = target.stem(), ext = target.extension();
    for (int n = 1;; ++n) {
      fs::path candidate = target.parent_path() / (stem.string() + "." + std::to_string(n) + ext.string());
      if (!fs::exists(candidate)) {
        std::cerr << "warning: " << target.string() << " exists; writing " << candidate.string() << "\n";
        target = candidate;
        break;
      }
    }
  }
  fs::create_directories(target.parent_path());
  std::ofstream out(target, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PreconditionError("cannot write " + target.string());
  written_.push_back(target);
  return target;
}

fs::path ArtifactWriter::write_csv(const std::string& name, const CsvTable& table) { return write(name, table.str()); }

fs::path ArtifactWriter::write_json(const std::string& name, const Json& value) { return write(name, dump_json(value)); }

fs::path ArtifactWriter::write_pgm(const std::string& name, const GrayImage& image) {
  return write(name, encode_pgm(image));
}

}  // namespace torsionlab::io
