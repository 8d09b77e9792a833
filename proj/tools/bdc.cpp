// bdc: command-line front end for barcodes, the three optimisation
// experiments and the verification suites.

#include "bdc/content.hpp"
#include "bdc/errors.hpp"
#include "bdc/experiments.hpp"
#include "bdc/io.hpp"
#include "bdc/optimize.hpp"
#include "bdc/persistence.hpp"
#include "bdc/verify.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace bdc;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kParse = 3, kPrecondition = 4, kInternal = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  fs::path out_dir = ".";
  std::uint64_t seed = 0;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "flat key=value file; command-line flags take precedence");
  sub->add_option("--out-dir,-o", c.out_dir, "directory for artifacts");
  sub->add_option("--seed", c.seed, "random seed")->envname("BDC_SEED");
  sub->add_flag("--quiet,-q", c.quiet, "only warnings and errors");
}

// Flat key=value lines become --key=value arguments placed before the user's
// own, so that the user's (later) occurrence wins.
std::vector<std::string> config_arguments(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("{}: cannot open config file", path.string()));
  std::vector<std::string> args;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError(fmt::format("{}:{}: expected key=value", path.string(), n));
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r\"");
      const auto b = s.find_last_not_of(" \t\r\"");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config") continue;
    if (key == "input") args.push_back(value);  // positional
    else args.push_back(fmt::format("--{}={}", key, value));
  }
  return args;
}

std::map<std::string, std::string> effective_config(const CLI::App* sub) {
  std::map<std::string, std::string> out;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config" || name == "quiet") continue;
    if (opt->count() > 0) {
      std::vector<std::string> r = opt->results();
      out[name] = r.empty() ? "true" : (opt->get_expected_max() > 1 ? fmt::format("{}", fmt::join(r, ",")) : r.back());
    } else if (opt->get_expected_max() == 0) {
      out[name] = "false";
    } else {
      std::string d = opt->get_default_str();
      if (d.size() >= 2 && d.front() == '[' && d.back() == ']') d = d.substr(1, d.size() - 2);
      out[name] = d;
    }
  }
  return out;
}

class Artifacts {
 public:
  Artifacts(const Common& c, const CLI::App* sub, std::string command)
      : dir_(c.out_dir), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
    manifest_.command = std::move(command);
    manifest_.config = effective_config(sub);
    manifest_.seed = c.seed;
  }
  fs::path path(const std::string& name) {
    manifest_.outputs.push_back(name);
    return dir_ / name;
  }
  void input(const fs::path& p) { manifest_.input_hashes[p.string()] = io::sha256_file(p); }
  // run.cfg replays the run: bdc <command> --config run.cfg
  void finish() {
    std::ofstream cfg(path("run.cfg"));
    for (const auto& [k, v] : manifest_.config)
      if (k != "out-dir" && !v.empty()) cfg << k << " = " << v << '\n';
    cfg.close();
    manifest_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    manifest_.write(dir_ / "manifest.json");
  }

 private:
  fs::path dir_;
  io::RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

void write_json(const fs::path& p, const io::Json& j) {
  std::ofstream out(p);
  out << j.dump(2) << '\n';
}

void require_nonempty(const fs::path& p) {
  if (!fs::exists(p)) throw InputError(fmt::format("{}: no such file", p.string()));
  if (fs::file_size(p) == 0) throw UsageError(fmt::format("{}: input file is empty", p.string()));
}

// ---------------------------------------------------------------- barcode

struct BarcodeArgs {
  Common common;
  fs::path input;
  std::string type = "auto";
  int max_degree = 1;
  std::optional<int> degree;
  double max_radius = kInfinity;
  bool invert = false;
};

int cmd_barcode(const BarcodeArgs& a, const CLI::App* sub, const std::string& cmdline) {
  require_nonempty(a.input);
  std::string type = a.type;
  if (type == "auto") {
    const std::string ext = a.input.extension().string();
    type = ext == ".json" ? "complex" : ext == ".pgm" ? "image" : "points";
  }
  FilteredComplex fc;
  if (type == "complex") {
    fc = io::read_complex_json(a.input);
  } else if (type == "image") {
    const Eigen::MatrixXd img = io::read_image(a.input, a.invert);
    std::vector<double> vals(static_cast<std::size_t>(img.size()));
    for (Eigen::Index r = 0; r < img.rows(); ++r)
      for (Eigen::Index c = 0; c < img.cols(); ++c) vals[static_cast<std::size_t>(r * img.cols() + c)] = img(r, c);
    fc = build_lower_star(triangulate_grid(static_cast<int>(img.rows()), static_cast<int>(img.cols())),
                          std::span<const double>(vals));
  } else {
    const Eigen::MatrixXd X = io::read_csv_matrix(a.input);
    if (X.rows() == 0) throw UsageError(fmt::format("{}: no points", a.input.string()));
    fc = build_vr(X, Euclidean{}, a.max_degree + 1, a.max_radius);
  }
  const Barcode bc = compute_persistence(fc, a.max_degree);
  Artifacts art(a.common, sub, cmdline);
  art.input(a.input);
  io::write_barcode_csv(art.path("barcode.csv"), bc, a.degree);
  write_json(art.path("barcode.json"), io::barcode_json(bc, a.degree));
  art.finish();
  for (int k = 0; k <= bc.max_degree(); ++k) {
    if (a.degree && *a.degree != k) continue;
    for (const Bar& b : bc.degree(k)) std::cout << fmt::format("H{} [{}, {})\n", k, io::fmt_double(b.birth), io::fmt_double(b.death));
  }
  return kOk;
}

// ------------------------------------------------------------ vr-optimize

struct VrArgs {
  Common common;
  fs::path input;
  bool synthetic = false;
  int n = 10;
  double sigma = 0.1;
  std::string method = "cochains";
  bool multi = false;
  double epsilon0 = kDefaultRelativeEpsilon;
  std::vector<double> eps_set = kDefaultEpsilonSet;
  double gamma = 0.02;
  int iters = 1000;
  bool no_penalty = false;
};

int cmd_vr_optimize(const VrArgs& a, const CLI::App* sub, const std::string& cmdline) {
  Eigen::MatrixXd X;
  if (a.synthetic) {
    Rng rng(a.common.seed);
    X = noisy_circle(a.n, a.sigma, rng);
  } else {
    if (a.input.empty()) throw UsageError("vr-optimize: give an input CSV or --synthetic");
    require_nonempty(a.input);
    X = io::read_csv_matrix(a.input);
  }
  OptConfig cfg;
  cfg.method = a.multi ? Method::kMultiCochains : parse_method(a.method);
  cfg.eps0 = a.epsilon0;
  cfg.eps_set = a.eps_set;
  cfg.gamma = a.gamma;
  cfg.iterations = a.iters;
  cfg.penalty = !a.no_penalty;
  cfg.seed = a.common.seed;
  const OptRun run = run_point_cloud(X, cfg);

  Artifacts art(a.common, sub, cmdline);
  if (a.synthetic) io::write_csv_matrix(art.path("points_initial.csv"), X);
  else art.input(a.input);
  io::write_csv_matrix(art.path("points_final.csv"), run.final_variables);
  io::write_trace_csv(art.path("trace.csv"), run);
  io::write_stability_csv(art.path("stability.csv"), run);
  write_json(art.path("summary.json"), io::trace_summary_json(run));
  std::vector<double> np;
  for (const auto& r : run.records) np.push_back(r.normalized_persistence);
  io::write_svg_lines(art.path("persistence.svg"), "normalized persistence", {{to_string(cfg.method), np}});
  io::write_stability_svg(art.path("stability.svg"), run);
  art.finish();
  const auto& last = run.records.back();
  std::cout << fmt::format("{}: {} iterations, status {}, normalized persistence {:.6g}\n", to_string(cfg.method),
                           last.iteration, run.status, last.normalized_persistence);
  return kOk;
}

// ----------------------------------------------------------- image-repair

struct ImageArgs {
  Common common;
  fs::path input;
  bool synthetic = false;
  double epsilon = 0.1;
  double gamma = 0.1;
  int iters = 500;
  std::string method = "cochains";
  std::string corrupt;
  int band_row = -1;
  int band_height = 2;
  bool invert = false;
  double threshold = 0.2;
};

int cmd_image_repair(const ImageArgs& a, const CLI::App* sub, const std::string& cmdline) {
  Eigen::MatrixXd img;
  if (a.synthetic) {
    img = two_blob_image();
  } else {
    if (a.input.empty()) throw UsageError("image-repair: give an input image or --synthetic");
    require_nonempty(a.input);
    img = io::read_image(a.input, a.invert);
  }
  Eigen::MatrixXd start = img;
  if (!a.corrupt.empty()) {
    Corruption c;
    c.band_row = a.band_row;
    c.band_height = a.band_height;
    char comma = 0;
    std::istringstream ss(a.corrupt);
    if (!(ss >> c.band_value >> comma >> c.noise) || comma != ',')
      throw UsageError(fmt::format("--corrupt expects band,noise (got '{}')", a.corrupt));
    Rng rng(a.common.seed);
    start = corrupt_image(img, c, rng);
  }
  ImageRepairConfig cfg;
  cfg.epsilon = a.epsilon;
  cfg.gamma = a.gamma;
  cfg.iterations = a.iters;
  cfg.method = parse_method(a.method);
  if (cfg.method != Method::kCochains && cfg.method != Method::kSimplices)
    throw UsageError("image-repair supports --method cochains or simplices");
  const OptRun run = run_image_repair(start, cfg);

  Artifacts art(a.common, sub, cmdline);
  if (!a.synthetic) art.input(a.input);
  io::write_pgm(art.path("input.pgm"), img);
  io::write_pgm(art.path("corrupted.pgm"), start);
  io::write_pgm(art.path("repaired.pgm"), run.final_variables);
  io::write_csv_matrix(art.path("repaired.csv"), run.final_variables);
  io::write_trace_csv(art.path("trace.csv"), run);
  const int before = count_long_bars(start, a.threshold);
  const int after = count_long_bars(run.final_variables, a.threshold);
  io::Json summary = io::trace_summary_json(run);
  summary["long_bars_before"] = before;
  summary["long_bars_after"] = after;
  summary["long_bar_threshold"] = a.threshold;
  write_json(art.path("summary.json"), summary);
  art.finish();
  std::cout << fmt::format("degree-0 bars with persistence > {}: {} -> {} ({})\n", a.threshold, before, after,
                           run.status);
  return kOk;
}

// --------------------------------------------------------- feature-weights

struct FeatureArgs {
  Common common;
  fs::path input;
  bool synthetic = false;
  std::string method = "one-step";
  int window = 250;
  double gamma = 1.0 / 640.0;  // 2^-6 / 10
  int iters = -1;              // method default: 1000 simplices, 100 cochains
  std::vector<double> eps_set = kDefaultEpsilonSet;
};

int cmd_feature_weights(const FeatureArgs& a, const CLI::App* sub, const std::string& cmdline) {
  Eigen::MatrixXd series;
  if (a.synthetic) {
    Rng rng(a.common.seed);
    series = periodic_series(rng);
  } else {
    if (a.input.empty()) throw UsageError("feature-weights: give an input CSV (features x time) or --synthetic");
    require_nonempty(a.input);
    series = io::read_csv_matrix(a.input);
  }
  const SlidingWindow sw = sliding_window(series, a.window);
  OptConfig cfg;
  cfg.gamma = a.gamma;
  cfg.eps_set = a.eps_set;
  cfg.seed = a.common.seed;
  if (a.method == "simplices") {
    cfg.method = Method::kSimplices;
  } else if (a.method == "cochains" || a.method == "multi" || a.method == "multi-cochains") {
    cfg.method = Method::kMultiCochains;
  } else if (a.method == "one-step") {
    cfg.method = Method::kOneStep;
  } else {
    throw UsageError(fmt::format("unknown method '{}'", a.method));
  }
  cfg.iterations = a.iters >= 0 ? a.iters : cfg.method == Method::kSimplices ? 1000 : 100;

  Artifacts art(a.common, sub, cmdline);
  if (a.synthetic) io::write_csv_matrix(art.path("series.csv"), series);
  else art.input(a.input);

  Eigen::VectorXd w;
  io::Json summary;
  summary["method"] = a.method;
  if (cfg.method == Method::kOneStep) {
    const std::uint64_t before = persistence_computation_count();
    w = one_step_weights(sw, cfg);
    summary["persistence_computations"] = persistence_computation_count() - before;
  } else {
    const std::uint64_t before = persistence_computation_count();
    const OptRun run = run_feature_weights(sw, cfg);
    summary["persistence_computations"] = persistence_computation_count() - before;
    summary["status"] = run.status;
    w = run.final_variables;
    std::ofstream tr(art.path("weights_trace.csv"));
    tr << "iteration,persistence";
    for (Eigen::Index b = 0; b < w.size(); ++b) tr << ",w_" << b + 1;
    tr << '\n';
    for (const auto& r : run.records) {
      tr << r.iteration << ',' << io::fmt_double(r.normalized_persistence);
      for (double x : r.weights) tr << ',' << io::fmt_double(x);
      tr << '\n';
    }
  }
  {
    std::ofstream out(art.path("weights.csv"));
    out << "feature,weight\n";
    for (Eigen::Index b = 0; b < w.size(); ++b) out << b + 1 << ',' << io::fmt_double(w[b]) << '\n';
  }
  summary["weights"] = std::vector<double>(w.data(), w.data() + w.size());
  summary["weight_sum"] = w.sum();
  write_json(art.path("summary.json"), summary);
  art.finish();
  std::cout << fmt::format("weights: {:.4f}\n", fmt::join(std::vector<double>(w.data(), w.data() + w.size()), " "));
  return kOk;
}

// ----------------------------------------------------------------- verify

struct VerifyArgs {
  Common common;
  std::vector<std::string> suites;
  bool inject_failure = false;
};

int cmd_verify(const VerifyArgs& a, const CLI::App* sub, const std::string& cmdline) {
  verify::Options o;
  if (sub->get_option("--seed")->count() > 0) o.seed = a.common.seed;
  o.inject_failure = a.inject_failure;
  const std::vector<std::string> suites = a.suites.empty() ? verify::suite_names() : a.suites;
  Artifacts art(a.common, sub, cmdline);
  io::Json report = io::Json::array();
  bool ok = true;
  for (const auto& name : suites) {
    const verify::SuiteReport r = verify::run_suite(name, o);
    for (const auto& c : r.checks) {
      std::cout << fmt::format("{:<9} {} {}: residual {:.3e} (tolerance {:.1e}); {}\n", name,
                               c.passed ? "PASS" : "FAIL", c.name, c.residual, c.tolerance, c.detail);
      report.push_back({{"suite", name},
                        {"check", c.name},
                        {"passed", c.passed},
                        {"residual", c.residual},
                        {"tolerance", c.tolerance},
                        {"detail", c.detail}});
    }
    ok = ok && r.passed();
  }
  write_json(art.path("verify.json"), report);
  art.finish();
  return ok ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Birth and death cochains, persistence content and topological optimisation"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  BarcodeArgs ba;
  auto* barcode = app.add_subcommand("barcode", "persistence barcode of a point cloud, image or complex");
  add_common(barcode, ba.common);
  barcode->add_option("input", ba.input, "points CSV, PGM/CSV image, or complex JSON")->required();
  barcode->add_option("--type", ba.type)->check(CLI::IsMember({"auto", "points", "image", "complex"}));
  barcode->add_option("--max-degree", ba.max_degree)->check(CLI::Range(0, 3));
  barcode->add_option("--degree", ba.degree, "only write bars of this degree");
  barcode->add_option("--max-radius", ba.max_radius);
  barcode->add_flag("--invert", ba.invert, "image: white pixels get value 0");

  VrArgs va;
  auto* vr = app.add_subcommand("vr-optimize", "gradient ascent on a point cloud's degree-1 bar");
  add_common(vr, va.common);
  vr->add_option("input", va.input, "points CSV");
  vr->add_flag("--synthetic", va.synthetic, "noisy circle from --seed");
  vr->add_option("--n", va.n);
  vr->add_option("--sigma", va.sigma);
  vr->add_option("--method", va.method)->check(CLI::IsMember({"simplices", "cochains", "multi", "multi-cochains"}));
  vr->add_flag("--multi", va.multi, "multi-cochain method over --eps-set");
  vr->add_option("--epsilon0", va.epsilon0, "relative epsilon");
  vr->add_option("--eps-set", va.eps_set, "relative epsilons for --multi")->delimiter(',');
  vr->add_option("--gamma", va.gamma);
  vr->add_option("--iters", va.iters)->check(CLI::NonNegativeNumber);
  vr->add_flag("--no-penalty", va.no_penalty);

  ImageArgs ia;
  auto* image = app.add_subcommand("image-repair", "lower-star repair of a grayscale image");
  add_common(image, ia.common);
  image->add_option("input", ia.input, "PGM or CSV image");
  image->add_flag("--synthetic", ia.synthetic, "two-blob test image");
  image->add_option("--epsilon", ia.epsilon);
  image->add_option("--gamma", ia.gamma);
  image->add_option("--iters", ia.iters)->check(CLI::NonNegativeNumber);
  image->add_option("--method", ia.method)->check(CLI::IsMember({"simplices", "cochains"}));
  image->add_option("--corrupt", ia.corrupt, "band,noise: band value and noise amplitude");
  image->add_option("--band-row", ia.band_row);
  image->add_option("--band-height", ia.band_height);
  image->add_flag("--invert", ia.invert, "white pixels get value 0");
  image->add_option("--threshold", ia.threshold, "persistence counted as a long bar");

  FeatureArgs fa;
  auto* feature = app.add_subcommand("feature-weights", "feature weights for a sliding-window embedding");
  add_common(feature, fa.common);
  feature->add_option("input", fa.input, "series CSV, one feature per row");
  feature->add_flag("--synthetic", fa.synthetic, "periodic test series from --seed");
  feature->add_option("--method", fa.method)->check(CLI::IsMember({"simplices", "cochains", "one-step"}));
  feature->add_option("--window", fa.window);
  feature->add_option("--gamma", fa.gamma);
  feature->add_option("--iters", fa.iters);
  feature->add_option("--eps-set", fa.eps_set)->delimiter(',');

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
  add_common(verify_cmd, ver.common);
  verify_cmd->add_option("--suite", ver.suites, "solvers, content, symmetry, critical, oracle (default all)")
      ->check(CLI::IsMember(verify::suite_names()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->delimiter(',');
  verify_cmd->add_flag("--inject-failure", ver.inject_failure);

  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cmdline = "bdc";
  for (const auto& s : args) cmdline += " " + s;

  try {
    // Splice config-file arguments in right after the subcommand name.
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
      if (path.empty()) continue;
      std::vector<std::string> extra;
      for (const auto& kv : config_arguments(path)) {
        const std::string key = kv.substr(0, kv.find('='));
        if (key.rfind("--", 0) != 0) {
          // positional input: only when the command line has none
          const bool has_positional = std::any_of(args.begin() + 1, args.end(), [](const std::string& s) {
            return !s.empty() && s[0] != '-';
          });
          if (!has_positional) extra.push_back(kv);
          continue;
        }
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& s) {
          return s == key || s.rfind(key + "=", 0) == 0;
        });
        if (!given) extra.push_back(kv);
      }
      args.insert(args.begin() + 1, extra.begin(), extra.end());
      break;
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  }

  for (const Common* c : {&ba.common, &va.common, &ia.common, &fa.common, &ver.common})
    if (c->quiet) spdlog::set_level(spdlog::level::warn);

  try {
    if (*barcode) return cmd_barcode(ba, barcode, cmdline);
    if (*vr) return cmd_vr_optimize(va, vr, cmdline);
    if (*image) return cmd_image_repair(ia, image, cmdline);
    if (*feature) return cmd_feature_weights(fa, feature, cmdline);
    if (*verify_cmd) return cmd_verify(ver, verify_cmd, cmdline);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kParse;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const DomainError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
