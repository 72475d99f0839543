#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "envl0/io.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

using namespace envl0;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / "envl0_test_io";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path &p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(1e-4) == "1e-04");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    double v = u(rng) * std::pow(10.0, i % 20 - 10);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv round trip") {
  fs::path p = scratch_dir() / "t.csv";
  CsvTable t;
  t.header = {"row_index", "re", "im"};
  t.rows = {{"2", "0.25", "-1"}, {"3", "1e-3", "0"}};
  write_csv(p, t);
  CHECK(slurp(p) == "row_index,re,im\n2,0.25,-1\n3,1e-3,0\n");
  CsvTable back = read_csv(p);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.column("im") == 2);
  CHECK(back.numeric("re") == std::vector<double>{0.25, 1e-3});
  CHECK_THROWS_AS(back.column("nope"), IoError);

  write_text(p, "a,b\r\n1,2\r\n\r\n");
  CHECK(read_csv(p).rows.size() == 1);
  write_text(p, "a,b\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(p), IoError);
  write_text(p, "a\nx\n");
  CHECK_THROWS_AS(read_csv(p).numeric("a"), IoError);
  CHECK_THROWS_AS(read_csv(scratch_dir() / "missing.csv"), IoError);
}

TEST_CASE("columns and grids") {
  fs::path p = scratch_dir() / "c.csv";
  Vector t(3), u(3);
  t << 0, 0.5, 1;
  u << 1, -2, 3;
  write_columns(p, {"t", "u"}, {t, u});
  auto back = read_csv(p);
  CHECK(back.numeric("u") == std::vector<double>{1, -2, 3});
  CHECK_THROWS(write_columns(p, {"t", "u"}, {t, Vector::Zero(2)}));

  Eigen::MatrixXd g(2, 3);
  g << 1, 2, 3, 4, 5, 6;
  write_grid_csv(p, g);
  CHECK(slurp(p).find("4,5,6") != std::string::npos);
}

TEST_CASE("pgm") {
  fs::path p = scratch_dir() / "img.pgm";
  Eigen::MatrixXd img(2, 3);
  img << -2, 0, 2, 1, -1, 0;
  write_pgm(p, img);
  std::string s = slurp(p);
  const std::string head = "P5\n3 2\n255\n";
  REQUIRE(s.size() == head.size() + 6);
  CHECK(s.substr(0, head.size()) == head);
  auto px = [&](int k) { return static_cast<unsigned char>(s[head.size() + k]); };
  CHECK(px(0) == 0);
  CHECK(px(1) == 128);
  CHECK(px(2) == 255);
  CHECK(px(3) == 191);
  CHECK(slurp(fs::path(p.string() + ".txt")).find("black -2") != std::string::npos);

  write_pgm_magnitude(p, img.cwiseAbs());
  s = slurp(p);
  CHECK(px(0) == 255);
  CHECK(px(1) == 0);
  CHECK_THROWS_AS(write_pgm(p, Eigen::MatrixXd()), DimensionError);
}

TEST_CASE("svg") {
  fs::path p = scratch_dir() / "s.svg";
  Vector t = Vector::LinSpaced(5, 0, 1);
  write_svg(p, "demo", t, {{"orig", t}, {"reco", 2 * t}});
  std::string s = slurp(p);
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.find("reco") != std::string::npos);
  CHECK(s.find("</svg>") != std::string::npos);
}

TEST_CASE("unwritable path") {
  CHECK_THROWS_AS(write_text("/proc/envl0/nope.txt", "x"), IoError);
}
