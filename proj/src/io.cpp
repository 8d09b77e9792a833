#include "bdc/io.hpp"

#include "bdc/errors.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bdc::io {

namespace {

std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  return out;
}

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
  return in;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data(), end, out);
  return ec == std::errc() && p == end;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string join_vertices(const Simplex& s) {
  return fmt::format("{}", fmt::join(s.vertices(), " "));
}

}  // namespace

std::string fmt_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

Eigen::MatrixXd read_csv_matrix(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    std::vector<double> row;
    bool numeric = true;
    for (const auto& c : cells) {
      double v;
      if (!parse_double(c, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (!seen_data && rows.empty()) {
        seen_data = true;  // header
        continue;
      }
      throw InputError(fmt::format("{}:{}: non-numeric value", path.string(), lineno));
    }
    seen_data = true;
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), lineno,
                                   rows.front().size(), row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(fmt::format("{}: no data rows", path.string()));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_csv_matrix(const fs::path& path, const Eigen::MatrixXd& m, const std::vector<std::string>& header) {
  std::ofstream out = open_out(path);
  if (!header.empty()) out << fmt::format("{}\n", fmt::join(header, ","));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt_double(m(i, j));
    out << '\n';
  }
}

Eigen::MatrixXd read_image(const fs::path& path, bool invert) {
  std::ifstream in = open_in(path, true);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  Eigen::MatrixXd img;
  if (in && magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) {
    // Header tokens, skipping comments.
    auto token = [&]() {
      std::string t;
      char c;
      while (in.get(c)) {
        if (c == '#') {
          std::string rest;
          std::getline(in, rest);
          continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
          if (!t.empty()) break;
          continue;
        }
        t.push_back(c);
      }
      if (t.empty()) throw InputError(fmt::format("{}: truncated PGM header", path.string()));
      return std::stoi(t);
    };
    const int w = token(), h = token(), maxval = token();
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
      throw InputError(fmt::format("{}: bad PGM header", path.string()));
    img.resize(h, w);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        int v = 0;
        if (magic[1] == '2') {
          if (!(in >> v)) throw InputError(fmt::format("{}: truncated PGM data", path.string()));
        } else if (maxval < 256) {
          const int b = in.get();
          if (b == EOF) throw InputError(fmt::format("{}: truncated PGM data", path.string()));
          v = b;
        } else {
          const int hi = in.get(), lo = in.get();
          if (lo == EOF) throw InputError(fmt::format("{}: truncated PGM data", path.string()));
          v = hi * 256 + lo;
        }
        img(r, c) = static_cast<double>(v) / maxval;
      }
    }
  } else {
    in.close();
    img = read_csv_matrix(path);
    if (img.minCoeff() < 0.0 || img.maxCoeff() > 1.0)
      throw InputError(fmt::format("{}: image values must lie in [0, 1]", path.string()));
  }
  if (invert) img = (1.0 - img.array()).matrix();
  return img;
}

void write_pgm(const fs::path& path, const Eigen::MatrixXd& image) {
  std::ofstream out = open_out(path, true);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    for (Eigen::Index c = 0; c < image.cols(); ++c)
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(image(r, c), 0.0, 1.0) * 255.0))));
}

FilteredComplex read_complex_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
  if (!j.is_array()) throw InputError(fmt::format("{}: expected a JSON list of simplices", path.string()));
  std::vector<std::pair<Simplex, double>> simplices;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_object() || !e.contains("vertices") || !e.contains("f") || !e["f"].is_number())
      throw InputError(fmt::format("{}: entry {} needs \"vertices\" and numeric \"f\"", path.string(), i));
    simplices.emplace_back(Simplex(e["vertices"].get<std::vector<Vertex>>()), e["f"].get<double>());
  }
  return FilteredComplex::from_simplices(std::move(simplices));
}

void write_barcode_csv(const fs::path& path, const Barcode& bc, std::optional<int> degree) {
  std::ofstream out = open_out(path);
  out << "degree,birth,death,birth_simplex,death_simplex\n";
  for (int k = 0; k <= bc.max_degree(); ++k) {
    if (degree && *degree != k) continue;
    for (const Bar& b : bc.degree(k))
      out << fmt::format("{},{},{},{},{}\n", k, fmt_double(b.birth), fmt_double(b.death),
                         join_vertices(b.birth_simplex), b.death_simplex ? join_vertices(*b.death_simplex) : "");
  }
}

Json simplex_json(const Simplex& s) {
  return Json(std::vector<Vertex>(s.vertices().begin(), s.vertices().end()));
}

Json cochain_json(const Cochain& c) {
  Json j = Json::array();
  for (const auto& [s, v] : c.coeffs()) j.push_back({{"simplex", simplex_json(s)}, {"value", v}});
  return j;
}

Json barcode_json(const Barcode& bc, std::optional<int> degree, bool representatives) {
  Json bars = Json::array();
  for (int k = 0; k <= bc.max_degree(); ++k) {
    if (degree && *degree != k) continue;
    for (const Bar& b : bc.degree(k)) {
      Json e{{"degree", k},
             {"birth", b.birth},
             {"death", b.finite() ? Json(b.death) : Json(nullptr)},
             {"birth_simplex", simplex_json(b.birth_simplex)},
             {"death_simplex", b.death_simplex ? simplex_json(*b.death_simplex) : Json(nullptr)}};
      if (representatives) e["representative"] = cochain_json(b.representative);
      bars.push_back(std::move(e));
    }
  }
  return Json{{"bars", bars}};
}

Json content_report_json(const ContentReport& r) {
  auto weights = [](const std::map<Simplex, double>& m) {
    Json j = Json::array();
    for (const auto& [s, w] : m) j.push_back({{"simplex", simplex_json(s)}, {"weight", w}});
    return j;
  };
  Json grad = Json::array();
  for (const auto& [s, g] : r.grad_f) grad.push_back({{"simplex", simplex_json(s)}, {"grad", g}});
  auto num = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
  return Json{{"B", r.B},
              {"D", num(r.D)},
              {"B_relaxed", r.B_relaxed},
              {"D_relaxed", num(r.D_relaxed)},
              {"objective", r.objective},
              {"generic", r.generic},
              {"birth_weights", weights(r.birth_weights)},
              {"death_weights", weights(r.death_weights)},
              {"grad_f", grad}};
}

void write_trace_csv(const fs::path& path, const OptRun& run) {
  std::ofstream out = open_out(path);
  out << "iteration,loss,birth,death,normalized_persistence,min_gap\n";
  for (const auto& r : run.records)
    out << fmt::format("{},{},{},{},{},{}\n", r.iteration, fmt_double(r.loss), fmt_double(r.birth),
                       fmt_double(r.death), fmt_double(r.normalized_persistence), fmt_double(r.min_gap));
}

Json trace_summary_json(const OptRun& run) {
  Json j{{"status", run.status}, {"records", run.records.size()}, {"events", run.events}};
  if (!run.records.empty()) {
    const auto& a = run.records.front();
    const auto& b = run.records.back();
    j["initial"] = {{"loss", a.loss}, {"normalized_persistence", a.normalized_persistence}, {"min_gap", a.min_gap}};
    j["final"] = {{"loss", b.loss}, {"normalized_persistence", b.normalized_persistence}, {"min_gap", b.min_gap}};
  }
  return j;
}

void write_stability_csv(const fs::path& path, const OptRun& run) {
  std::size_t nt = 0, nf = 0;
  for (const auto& r : run.records) {
    nt = std::max(nt, r.thresholds.size());
    nf = std::max(nf, r.filtration_values.size());
  }
  std::ofstream out = open_out(path);
  out << "iteration,birth,death,min_gap";
  for (std::size_t i = 0; i < nt; ++i) out << ",t_" << i;
  for (std::size_t i = 0; i < nf; ++i) out << ",f_" << i;
  out << '\n';
  for (const auto& r : run.records) {
    out << r.iteration << ',' << fmt_double(r.birth) << ',' << fmt_double(r.death) << ',' << fmt_double(r.min_gap);
    for (std::size_t i = 0; i < nt; ++i) out << ',' << (i < r.thresholds.size() ? fmt_double(r.thresholds[i]) : "");
    for (std::size_t i = 0; i < nf; ++i)
      out << ',' << (i < r.filtration_values.size() ? fmt_double(r.filtration_values[i]) : "");
    out << '\n';
  }
}

namespace {

constexpr double kW = 640, kH = 400, kPad = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kPad + (x - x0) / std::max(x1 - x0, 1e-300) * (kW - 2 * kPad); }
  double py(double y) const { return kH - kPad - (y - y0) / std::max(y1 - y0, 1e-300) * (kH - 2 * kPad); }
};

void svg_open(std::ostream& out, const std::string& title, const Frame& f) {
  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)",
                     kW, kH)
      << '\n';
  out << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", kW, kH) << '\n';
  out << fmt::format(R"(<text x="{}" y="20" text-anchor="middle">{}</text>)", kW / 2, title) << '\n';
  out << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", kPad, kPad,
                     kW - 2 * kPad, kH - 2 * kPad)
      << '\n';
  out << fmt::format(R"(<text x="{}" y="{}">{:.4g}</text>)", 4, f.py(f.y1) + 4, f.y1) << '\n';
  out << fmt::format(R"(<text x="{}" y="{}">{:.4g}</text>)", 4, f.py(f.y0) + 4, f.y0) << '\n';
  out << fmt::format(R"(<text x="{}" y="{}">{:.4g}</text>)", f.px(f.x1) - 10, kH - kPad + 16, f.x1) << '\n';
}

void polyline(std::ostream& out, const Frame& f, const std::vector<double>& y, const char* color, double width = 1.5) {
  std::string pts;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (std::isfinite(y[i])) pts += fmt::format("{:.2f},{:.2f} ", f.px(static_cast<double>(i)), f.py(y[i]));
  out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="{}" points="{}"/>)", color, width, pts) << '\n';
}

}  // namespace

void write_svg_lines(const fs::path& path, const std::string& title, const std::vector<Series>& series) {
  Frame f{0, 1, kInfinity, -kInfinity};
  for (const auto& s : series) {
    f.x1 = std::max(f.x1, static_cast<double>(s.y.size()) - 1);
    for (double v : s.y)
      if (std::isfinite(v)) f.y0 = std::min(f.y0, v), f.y1 = std::max(f.y1, v);
  }
  if (!(f.y0 <= f.y1)) f.y0 = 0, f.y1 = 1;
  if (f.y0 == f.y1) f.y0 -= 0.5, f.y1 += 0.5;
  std::ofstream out = open_out(path);
  svg_open(out, title, f);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    polyline(out, f, series[i].y, color);
    out << fmt::format(R"(<text x="{}" y="{}" fill="{}">{}</text>)", kW - kPad - 140, kPad + 16 * (i + 1), color,
                       series[i].name)
        << '\n';
  }
  out << "</svg>\n";
}

void write_stability_svg(const fs::path& path, const OptRun& run) {
  Frame f{0, std::max<double>(1.0, static_cast<double>(run.records.size()) - 1), kInfinity, -kInfinity};
  for (const auto& r : run.records) {
    for (double v : r.thresholds) f.y0 = std::min(f.y0, v), f.y1 = std::max(f.y1, v);
    f.y0 = std::min(f.y0, r.birth);
    if (std::isfinite(r.death)) f.y1 = std::max(f.y1, r.death);
  }
  if (!(f.y0 < f.y1)) f.y0 = 0, f.y1 = 1;
  const double margin = 0.1 * (f.y1 - f.y0);
  f.y0 -= margin;
  f.y1 += margin;
  std::ofstream out = open_out(path);
  svg_open(out, "filtration values and tracked thresholds", f);
  const std::size_t stride = std::max<std::size_t>(1, run.records.size() / 200);
  for (std::size_t i = 0; i < run.records.size(); i += stride)
    for (double v : run.records[i].filtration_values)
      if (v >= f.y0 && v <= f.y1)
        out << fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="0.8" fill="#888"/>)", f.px(static_cast<double>(i)), f.py(v))
            << '\n';
  std::vector<double> b, d;
  for (const auto& r : run.records) b.push_back(r.birth), d.push_back(r.death);
  polyline(out, f, b, kColors[0], 2.0);
  polyline(out, f, d, kColors[1], 2.0);
  std::size_t nt = 0;
  for (const auto& r : run.records) nt = std::max(nt, r.thresholds.size());
  for (std::size_t k = 0; k < nt; ++k) {
    std::vector<double> t;
    for (const auto& r : run.records) t.push_back(k < r.thresholds.size() ? r.thresholds[k] : kInfinity);
    polyline(out, f, t, k % 4 < 2 ? kColors[0] : kColors[1], 0.7);
  }
  out << "</svg>\n";
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in = open_in(path, true);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

Json RunManifest::to_json() const {
  return Json{{"command", command},   {"config", config},   {"seed", seed},
              {"inputs", input_hashes}, {"outputs", outputs}, {"wall_seconds", wall_seconds}};
}

void RunManifest::write(const fs::path& path) const {
  std::ofstream out = open_out(path);
  out << to_json().dump(2) << '\n';
}

}  // namespace bdc::io
