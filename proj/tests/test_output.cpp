#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "qbm/csv.hpp"
#include "qbm/scenario.hpp"
#include "qbm/svg.hpp"

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() /
                   ("qbm-test-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("doubles survive a text round trip") {
  for (double v : {0.1, -2.5e-308, 1.7976931348623157e308, 3.0,
                   0.6102862555505467, -0.0}) {
    const std::string s = qbm::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(qbm::format_double(std::nan("")) == "nan");
  CHECK(qbm::format_double(qbm::unbounded) == "inf");
  CHECK(qbm::format_double(-qbm::unbounded) == "-inf");
}

TEST_CASE("csv rendering layout") {
  qbm::CsvTable table;
  table.comments = {"made by a test"};
  table.columns = {"t", "value"};
  table.rows = {{0.0, 1.0}, {0.5, 0.25}};
  const std::string body = qbm::render_csv(table);
  CHECK(body == "# made by a test\nt,value\n0,1\n0.5,0.25\n");

  table.rows.push_back({1.0});
  CHECK_THROWS_AS(qbm::render_csv(table), qbm::io_error);
}

TEST_CASE("csv rendering is deterministic") {
  qbm::CsvTable table;
  table.columns = {"x", "y", "z"};
  for (int i = 0; i < 50; ++i) {
    const double x = -2.0 + 0.08123 * i;
    table.rows.push_back({x, std::exp(-x * x), std::cos(17.0 * x)});
  }
  CHECK(qbm::render_csv(table) == qbm::render_csv(table));
}

TEST_CASE("csv files land atomically in fresh directories") {
  const auto dir = temp_dir();
  qbm::CsvTable table;
  table.columns = {"a"};
  table.rows = {{1.0}};
  const auto target = dir / "nested" / "deeper" / "out.csv";
  qbm::write_csv(target, table);
  CHECK(slurp(target) == qbm::render_csv(table));
  CHECK_FALSE(fs::exists(target.string() + ".tmp"));

  // a directory path blocked by a regular file must raise io_error
  std::ofstream(dir / "blocker").put('x');
  CHECK_THROWS_AS(qbm::write_csv(dir / "blocker" / "x.csv", table),
                  qbm::io_error);
  fs::remove_all(dir);
}

TEST_CASE("line charts render all series and survive data gaps") {
  qbm::SvgChart chart;
  chart.title = "attenuation";
  chart.x_label = "t";
  chart.y_label = "a";
  qbm::SvgSeries a;
  a.label = "first";
  a.color = "#205080";
  for (int i = 0; i <= 20; ++i) {
    a.x.push_back(0.1 * i);
    a.y.push_back(std::exp(-0.1 * i));
  }
  a.y[7] = std::nan("");  // must split the polyline, not kill the chart
  qbm::SvgSeries b = a;
  b.label = "second";
  b.dashed = true;
  for (auto& v : b.y) v *= 0.5;
  chart.series = {a, b};
  const std::string svg = qbm::render_svg(chart);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("first") != std::string::npos);
  CHECK(svg.find("second") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg == qbm::render_svg(chart));
}

TEST_CASE("log charts drop nonpositive points instead of failing") {
  qbm::SvgChart chart;
  chart.log_y = true;
  qbm::SvgSeries s;
  s.x = {1.0, 2.0, 3.0, 4.0};
  s.y = {1e-3, 0.0, 1e-5, 1e-9};
  chart.series = {s};
  CHECK(qbm::render_svg(chart).find("polyline") != std::string::npos);
}

TEST_CASE("charts with nothing to draw are rejected") {
  qbm::SvgChart chart;
  CHECK_THROWS_AS(qbm::render_svg(chart), qbm::validation_error);
  qbm::SvgSeries s;
  s.x = {1.0};
  s.y = {std::nan("")};
  chart.series = {s};
  CHECK_THROWS_AS(qbm::render_svg(chart), qbm::validation_error);
}

TEST_CASE("heatmaps validate their shape and render cells") {
  qbm::SvgHeatmap map;
  map.n = 3;
  map.values = {0.0, 0.2, 0.0, 0.2, 1.0, 0.2, 0.0, 0.2, 0.0};
  map.half_span = 2.0;
  const std::string svg = qbm::render_svg(map);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("rgb(0,0,255)") != std::string::npos);  // peak cell is full blue

  map.values.pop_back();
  CHECK_THROWS_AS(qbm::render_svg(map), qbm::validation_error);
}

TEST_CASE("svg files are written atomically") {
  const auto dir = temp_dir();
  qbm::SvgHeatmap map;
  map.n = 2;
  map.values = {1.0, 0.5, 0.5, 1.0};
  const auto target = dir / "map.svg";
  qbm::write_svg(target, map);
  CHECK(slurp(target) == qbm::render_svg(map));
  fs::remove_all(dir);
}
