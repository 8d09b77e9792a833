#include "bdc/errors.hpp"
#include "bdc/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

using namespace bdc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() /
                       ("bdc_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

}  // namespace

TEST(Io, DoublesRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    EXPECT_EQ(std::stod(io::fmt_double(x)), x);
  }
  EXPECT_EQ(io::fmt_double(kInfinity), "inf");
  EXPECT_EQ(io::fmt_double(0.1), "0.10000000000000001");
}

TEST(Io, CsvRoundTripIsExact) {
  const fs::path dir = temp_dir();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::MatrixXd M(7, 3);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = g(rng);
  io::write_csv_matrix(dir / "m.csv", M, {"x", "y", "z"});
  EXPECT_EQ(io::read_csv_matrix(dir / "m.csv"), M);
  io::write_csv_matrix(dir / "n.csv", io::read_csv_matrix(dir / "m.csv"), {"x", "y", "z"});
  EXPECT_EQ(slurp(dir / "m.csv"), slurp(dir / "n.csv"));
}

TEST(Io, CsvErrorsNameTheLine) {
  const fs::path dir = temp_dir();
  spit(dir / "bad.csv", "1,2\n3,oops\n");
  try {
    io::read_csv_matrix(dir / "bad.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:2"), std::string::npos) << e.what();
  }
  spit(dir / "ragged.csv", "1,2\n3\n");
  EXPECT_THROW(io::read_csv_matrix(dir / "ragged.csv"), InputError);
}

TEST(Io, PgmAsciiAndBinaryAgree) {
  const fs::path dir = temp_dir();
  spit(dir / "a.pgm", "P2\n# comment\n3 2\n255\n0 128 255\n10 20 30\n");
  std::string bin = "P5\n3 2\n255\n";
  for (int v : {0, 128, 255, 10, 20, 30}) bin.push_back(static_cast<char>(v));
  spit(dir / "b.pgm", bin);
  const Eigen::MatrixXd a = io::read_image(dir / "a.pgm"), b = io::read_image(dir / "b.pgm");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a(0, 2), 1.0);
  EXPECT_EQ(io::read_image(dir / "a.pgm", true)(0, 2), 0.0);
  io::write_pgm(dir / "c.pgm", a);
  EXPECT_EQ(io::read_image(dir / "c.pgm"), a);
}

TEST(Io, CsvImageRange) {
  const fs::path dir = temp_dir();
  spit(dir / "img.csv", "0,0.5\n1,0.25\n");
  EXPECT_EQ(io::read_image(dir / "img.csv")(1, 1), 0.25);
  spit(dir / "out.csv", "0,1.5\n");
  EXPECT_THROW(io::read_image(dir / "out.csv"), InputError);
}

TEST(Io, BarcodeCsvDegreeFilter) {
  const fs::path dir = temp_dir();
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 1, 0, 1, 1, 0, 1;
  const Barcode bc = compute_persistence(build_vr(X, Euclidean{}, 2, kInfinity), 1);
  io::write_barcode_csv(dir / "all.csv", bc);
  io::write_barcode_csv(dir / "h0.csv", bc, 0);
  const std::string all = slurp(dir / "all.csv"), h0 = slurp(dir / "h0.csv");
  EXPECT_EQ(all.rfind("degree,birth,death,birth_simplex,death_simplex\n", 0), 0u);
  EXPECT_NE(all.find("1,1,1.4142135623730951,"), std::string::npos);
  std::istringstream lines(h0);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(line[0], '0');
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST(Io, ComplexJson) {
  const fs::path dir = temp_dir();
  spit(dir / "c.json",
       R"([{"vertices":[0],"f":0},{"vertices":[1],"f":0},{"vertices":[0,1],"f":0.5}])");
  const FilteredComplex fc = io::read_complex_json(dir / "c.json");
  EXPECT_EQ(fc.size(), 3u);
  EXPECT_EQ(fc.value_of(Simplex{0, 1}), 0.5);
  spit(dir / "bad.json", R"([{"vertices":[0,1],"f":0.5}])");
  EXPECT_THROW(io::read_complex_json(dir / "bad.json"), InputError);
}

TEST(Io, Sha256) {
  const fs::path dir = temp_dir();
  spit(dir / "abc.txt", "abc");
  EXPECT_EQ(io::sha256_file(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, ManifestFields) {
  const fs::path dir = temp_dir();
  io::RunManifest m;
  m.command = "bdc barcode x.csv";
  m.config = {{"gamma", "0.02"}};
  m.seed = 9;
  m.outputs = {"barcode.csv"};
  m.write(dir / "manifest.json");
  const auto j = io::Json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(j["command"], "bdc barcode x.csv");
  EXPECT_EQ(j["config"]["gamma"], "0.02");
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["outputs"][0], "barcode.csv");
}
