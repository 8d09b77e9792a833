#pragma once

#include "bdc/content.hpp"
#include "bdc/optimize.hpp"
#include "bdc/persistence.hpp"

#include <Eigen/Dense>

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bdc::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

/// Shortest text that round-trips: 17 significant digits.
std::string fmt_double(double x);

/// Numeric CSV, one row per line; a non-numeric first line is taken as a
/// header. Throws InputError naming the offending line.
Eigen::MatrixXd read_csv_matrix(const fs::path& path);
void write_csv_matrix(const fs::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});

/// Grayscale image from PGM (P2 or P5) or numeric CSV, scaled to [0, 1].
Eigen::MatrixXd read_image(const fs::path& path, bool invert = false);
/// Binary PGM (P5), values rounded to 0..255.
void write_pgm(const fs::path& path, const Eigen::MatrixXd& image);

/// JSON list of {"vertices": [...], "f": value}.
FilteredComplex read_complex_json(const fs::path& path);

/// degree,birth,death,birth_simplex,death_simplex; vertices joined by spaces.
void write_barcode_csv(const fs::path& path, const Barcode& bc, std::optional<int> degree = {});
Json barcode_json(const Barcode& bc, std::optional<int> degree = {}, bool representatives = true);

Json simplex_json(const Simplex& s);
Json cochain_json(const Cochain& c);
Json content_report_json(const ContentReport& r);

/// iteration,loss,birth,death,normalized_persistence,min_gap
void write_trace_csv(const fs::path& path, const OptRun& run);
Json trace_summary_json(const OptRun& run);
/// iteration,birth,death,min_gap,t_0..t_k,f_0..f_m (ragged rows padded empty)
void write_stability_csv(const fs::path& path, const OptRun& run);

struct Series {
  std::string name;
  std::vector<double> y;
};
/// Minimal line chart, x = index.
void write_svg_lines(const fs::path& path, const std::string& title, const std::vector<Series>& series);
/// Filtration values as dots per iteration with b, d and b +- e, d +- e lines.
void write_stability_svg(const fs::path& path, const OptRun& run);

std::string sha256_file(const fs::path& path);

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_hashes;  // path -> sha256
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;

  Json to_json() const;
  void write(const fs::path& path) const;
};

}  // namespace bdc::io
