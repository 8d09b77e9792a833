#include "bdc/experiments.hpp"

#include "bdc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace bdc {

Eigen::MatrixXd noisy_circle(int n, double sigma, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, sigma);
  Eigen::MatrixXd X(n, 2);
  for (int i = 0; i < n; ++i) {
    const double a = angle(rng);
    X(i, 0) = std::cos(a) + noise(rng);
    X(i, 1) = std::sin(a) + noise(rng);
  }
  return X;
}

Eigen::MatrixXd regular_polygon(int n) {
  Eigen::MatrixXd X(n, 2);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    X(i, 0) = std::cos(a);
    X(i, 1) = std::sin(a);
  }
  return X;
}

Eigen::MatrixXd two_blob_image(int rows, int cols) {
  Eigen::MatrixXd img = Eigen::MatrixXd::Ones(rows, cols);
  const double cx = (cols - 1) / 2.0;
  const double r = std::min(rows, cols) / 7.0;
  const double top = rows * 0.25, bottom = rows * 0.75;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double dx = j - cx;
      const bool disc = std::hypot(dx, i - top) <= r || std::hypot(dx, i - bottom) <= r;
      const bool stroke = i >= top && i <= bottom && std::abs(dx) <= 1.0;
      if (disc || stroke) img(i, j) = 0.0;
    }
  }
  return img;
}

Eigen::MatrixXd corrupt_image(const Eigen::MatrixXd& image, const Corruption& c, Rng& rng) {
  Eigen::MatrixXd out = image;
  const int rows = static_cast<int>(image.rows());
  const int start = c.band_row >= 0 ? c.band_row : (rows - c.band_height) / 2;
  for (int i = std::max(0, start); i < std::min(rows, start + c.band_height); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = std::max(out(i, j), c.band_value);
  if (c.noise > 0.0) {
    std::uniform_real_distribution<double> u(-c.noise, c.noise);
    for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += u(rng);
  }
  return out.cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::MatrixXd periodic_series(Rng& rng, int d, int T, int periodic, double sigma, double period) {
  std::uniform_real_distribution<double> phase(0.0, period);
  std::normal_distribution<double> noise(0.0, sigma);
  Eigen::MatrixXd S(d, T);
  for (int i = 0; i < d; ++i) {
    const double K = phase(rng);
    for (int t = 0; t < T; ++t) S(i, t) = std::sin(2.0 * std::numbers::pi * ((t + 1) - K) / period);
  }
  for (int i = periodic; i < d; ++i) {
    Eigen::RowVectorXd row = S.row(i);
    std::shuffle(row.begin(), row.end(), rng);
    S.row(i) = row;
  }
  for (Eigen::Index k = 0; k < S.size(); ++k) S.data()[k] += noise(rng);
  return S;
}

Eigen::MatrixXd loop_dataset(int n, int D, int signal, double noise, Rng& rng) {
  if (signal < 2 || signal > D) throw PreconditionError("need 2 <= signal <= D");
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> eps(0.0, noise);
  const int first = (signal + 1) / 2;  // cosine block, larger half
  Eigen::MatrixXd X(n, D);
  for (int i = 0; i < n; ++i) {
    const double a = angle(rng);
    for (int c = 0; c < D; ++c) {
      double v = 0.0;
      if (c < first) v = 1.0 * std::cos(a);
      else if (c < signal) v = 0.6 * std::sin(a);
      X(i, c) = v + eps(rng);
    }
  }
  return X;
}

Eigen::MatrixXd pca2(const Eigen::MatrixXd& data, int iterations) {
  const Eigen::MatrixXd C = data.rowwise() - data.colwise().mean();
  Eigen::MatrixXd cov = C.transpose() * C;
  Eigen::MatrixXd dirs(data.cols(), 2);
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(data.cols()).normalized();
    for (int it = 0; it < iterations; ++it) {
      Eigen::VectorXd next = cov * v;
      const double n = next.norm();
      if (n == 0.0) break;
      v = next / n;
    }
    dirs.col(k) = v;
    cov -= (v.dot(cov * v)) * v * v.transpose();
  }
  return C * dirs;
}

}  // namespace bdc
