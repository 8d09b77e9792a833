// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "bdc/experiments.hpp"
#include "bdc/io.hpp"
#include "bdc/optimize.hpp"
#include "bdc/verify.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <functional>
#include <fstream>
#include <iostream>

using namespace bdc;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail, double seconds) {
  if (!ok) ++failures;
  std::cout << fmt::format("criterion {:>2}: {} {} [{}] ({:.1f}s)\n", n, ok ? "PASS" : "FAIL", what, detail, seconds)
            << std::flush;
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check(int n, const std::function<verify::Check()>& run) {
  verify::Check c;
  const double s = timed([&] { c = run(); });
  report(n, c.passed, c.name, fmt::format("{}; worst {:.3e}, tolerance {:.1e}", c.detail, c.residual, c.tolerance), s);
}

// Noisy 10-point circle with at least one finite degree-1 bar; redraws otherwise.
Eigen::MatrixXd circle_with_loop(Rng& rng, int& redraws) {
  for (;;) {
    Eigen::MatrixXd X = noisy_circle(10, 0.1, rng);
    const Barcode bc = compute_persistence(build_vr(X, Euclidean{}, 2, kInfinity), 1);
    if (!select_bar(bc, 1, Longest{}).empty()) return X;
    ++redraws;
  }
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const verify::Options o;

  check(1, [&] { return verify::barcode_oracle(o, 200); });
  check(2, [&] { return verify::content_sandwich(o, 50); });
  check(3, [&] { return verify::dirichlet(o, 100); });
  check(4, [&] { return verify::schur_identity(o, 100); });
  check(5, [&] { return verify::degree_zero(o, 20); });
  check(6, [&] { return verify::gradients(o, 50); });
  check(7, [&] { return verify::dihedral(o, 5, 9, 0.05); });
  check(8, [&] { return verify::critical(o, 10, 0.05); });

  // Point clouds: multi-cochain against simplices, and the stability report
  // from the same multi-cochain runs.
  constexpr int kCloudTrials = 20;
  int improved = 0;
  {
    constexpr int kTrials = kCloudTrials;
    int wins = 0, redraws = 0;
    std::ofstream csv("stability_report.csv");
    csv << "trial,seed,simplices_np,multi_np,multi_status,initial_gap,final_gap,gap_increased\n";
    const double s = timed([&] {
      for (int t = 0; t < kTrials; ++t) {
        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(t);
        Rng rng(seed);
        const Eigen::MatrixXd X = circle_with_loop(rng, redraws);
        OptConfig simp;
        simp.method = Method::kSimplices;
        simp.gamma = 0.02;
        simp.iterations = 1000;
        OptConfig multi = simp;
        multi.method = Method::kMultiCochains;
        const OptRun rs = run_point_cloud(X, simp);
        const OptRun rm = run_point_cloud(X, multi);
        const double ns = rs.records.back().normalized_persistence;
        const double nm = rm.records.back().normalized_persistence;
        wins += nm >= ns;
        const StabilitySummary g = stability_summary(rm);
        improved += g.final_gap > g.initial_gap;
        csv << fmt::format("{},{},{},{},{},{},{},{}\n", t, seed, io::fmt_double(ns), io::fmt_double(nm), rm.status,
                           io::fmt_double(g.initial_gap), io::fmt_double(g.final_gap),
                           g.final_gap > g.initial_gap ? 1 : 0);
      }
    });
    report(9, wins * 5 >= kTrials * 4, "multi-cochain persistence matches or beats simplices in >= 80% of trials",
           fmt::format("{}/{} trials, {} bar-less clouds redrawn", wins, kTrials, redraws), s);
  }

  {
    int before = 0, after = 0;
    std::size_t iterations = 0;
    const double s = timed([&] {
      Rng rng(20240521);
      const Eigen::MatrixXd img = corrupt_image(two_blob_image(), Corruption{}, rng);
      before = count_long_bars(img, 0.2);
      ImageRepairConfig cfg;  // epsilon 0.1, gamma 0.1, 500 iterations, cochains
      const OptRun run = run_image_repair(img, cfg);
      iterations = run.records.size() - 1;
      after = count_long_bars(run.final_variables, 0.2);
    });
    report(10, after == 1, "image repair leaves exactly one degree-0 bar longer than 0.2",
           fmt::format("{} -> {} bars after {} iterations", before, after, iterations), s);
  }

  {
    constexpr int kTrials = 10;
    int good = 0;
    bool one_call = true;
    const double s = timed([&] {
      for (int t = 0; t < kTrials; ++t) {
        Rng rng(500 + static_cast<std::uint64_t>(t));
        const SlidingWindow sw = sliding_window(periodic_series(rng), 250);
        OptConfig cfg;
        cfg.method = Method::kOneStep;
        const auto c0 = persistence_computation_count();
        const Eigen::VectorXd w = one_step_weights(sw, cfg);
        one_call = one_call && persistence_computation_count() - c0 == 1;
        const bool signal = (w.head(3).array() > 0.1).all();
        const int quiet = static_cast<int>((w.tail(7).array() < 0.1).count());
        good += signal && quiet >= 5;
      }
    });
    report(11, good >= 8 && one_call, "one-step weights select the periodic features",
           fmt::format("{}/{} trials, one persistence computation per trial: {}", good, kTrials, one_call ? "yes" : "no"),
           s);
  }

  report(12, improved * 2 > kCloudTrials, "final threshold gap exceeds initial gap in a majority of multi-cochain runs",
         fmt::format("{}/{} criterion-9 runs; per-trial gaps in stability_report.csv", improved, kCloudTrials), 0.0);

  std::cout << (failures == 0 ? "all criteria pass\n" : fmt::format("{} criteria fail\n", failures));
  return failures == 0 ? 0 : 1;
}
