#include <filesystem>
#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "torsionlab/decomposition.hpp"
#include "torsionlab/io.hpp"
#include "torsionlab/variational.hpp"

namespace tl = torsionlab;
namespace io = torsionlab::io;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("torsionlab_io_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3, 1e-300, -2.5e17, 0.0}) EXPECT_EQ(std::stod(io::format_double(v)), v);
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(Io, CsvHasHeader) {
  io::CsvTable t;
  t.header = {"a", "b"};
  t.add_row({"1", "2"});
  EXPECT_EQ(t.str(), "a,b\n1,2\n");
  EXPECT_THROW(t.add_row({"1"}), std::exception);
}

TEST(Io, FieldTableColumns) {
  const auto planar = tl::Grid::build(tl::DomainSpec::rectangle(0, 1, 0, 1), 0.25);
  EXPECT_EQ(io::field_table(tl::ScalarField(planar)).header, (std::vector<std::string>{"x", "y", "value"}));
  const auto radial = tl::Grid::build(tl::DomainSpec::radial_ball(3, 1.0), 0.25);
  const auto table = io::field_table(tl::ScalarField(radial));
  EXPECT_EQ(table.header, (std::vector<std::string>{"r", "value"}));
  EXPECT_EQ(table.rows.size(), 3u);
}

TEST(Io, PgmEncoding) {
  io::GrayImage img{2, 1, {0x0102, 0xffff}};
  const std::string bytes = io::encode_pgm(img);
  const std::string header = "P5\n2 1\n65535\n";
  ASSERT_EQ(bytes.size(), header.size() + 4);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size()]), 0x01);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 1]), 0x02);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 3]), 0xff);
}

TEST(Io, LabelImageMarksComponents) {
  const auto g = tl::Grid::build(tl::DomainSpec::disk({0, 0}, 1.0), 1.0 / 8);
  const auto split = tl::evaluate(tl::PotentialSpec{tl::InversePowerAxis{1.5}}, g);
  const auto dec = tl::decompose(tl::torsion(tl::SchroedingerOperator::positive_part(split)), split.hard_mask);
  const auto img = io::label_image(dec);
  EXPECT_EQ(img.width, static_cast<std::size_t>(g->i_max() - g->i_min() + 1));
  EXPECT_EQ(*std::max_element(img.pixels.begin(), img.pixels.end()), 2);
  EXPECT_THROW(io::heatmap(tl::ScalarField(tl::Grid::build(tl::DomainSpec::radial_ball(3, 1.0), 0.1))),
               std::exception);
}

TEST(Io, JsonKeysSorted) {
  const std::string text = io::dump_json({{"zeta", 1}, {"alpha", 2}});
  EXPECT_LT(text.find("alpha"), text.find("zeta"));
  EXPECT_EQ(text.back(), '\n');
}

TEST(Io, WriterNeverOverwrites) {
  const fs::path dir = fresh_dir("writer");
  io::ArtifactWriter w(dir);
  w.write("a.csv", "one");
  const fs::path second = w.write("a.csv", "two");
  EXPECT_EQ(second.filename(), "a.1.csv");
  EXPECT_EQ(slurp(dir / "a.csv"), "one");
  EXPECT_EQ(slurp(second), "two");
  EXPECT_EQ(w.written().size(), 2u);
  fs::remove_all(dir);
}
