#pragma once

#include "bdc/optimize.hpp"

#include <Eigen/Dense>

namespace bdc {

/// n points at uniformly random angles on the unit circle plus N(0, sigma^2) noise.
Eigen::MatrixXd noisy_circle(int n, double sigma, Rng& rng);

/// Vertices of the regular n-gon on the unit circle, first vertex at (1, 0).
Eigen::MatrixXd regular_polygon(int n);

/// Inverted digit-like test image: background 1, two discs of value 0 joined
/// by a vertical stroke.
Eigen::MatrixXd two_blob_image(int rows = 28, int cols = 28);

struct Corruption {
  int band_row = -1;       ///< first row of the band (-1: centred)
  int band_height = 2;
  double band_value = 0.6;  ///< dark-gray band after inversion
  double noise = 1e-3;      ///< uniform noise amplitude
};
/// Horizontal band across the full width (pixels lowered to band_value only
/// where they were darker), then uniform noise in [-noise, noise], clamped to [0, 1].
Eigen::MatrixXd corrupt_image(const Eigen::MatrixXd& image, const Corruption& c, Rng& rng);

/// d x T series f_i(t) = sin(2 pi (t - K_i) / period), t = 1..T, random phases;
/// features with index >= periodic are shuffled; then N(0, sigma^2) noise everywhere.
Eigen::MatrixXd periodic_series(Rng& rng, int d = 10, int T = 300, int periodic = 3, double sigma = 1.5,
                                double period = 50.0);

/// n observations in R^D: a noisy loop carried by two coordinate blocks of
/// unequal size and amplitude (one per half-cycle direction), Gaussian noise
/// elsewhere. The first `signal` coordinates carry the loop.
Eigen::MatrixXd loop_dataset(int n, int D, int signal, double noise, Rng& rng);

/// Top two principal directions via power iteration with deflation; returns
/// the n x 2 scores of the centred data.
Eigen::MatrixXd pca2(const Eigen::MatrixXd& data, int iterations = 500);

}  // namespace bdc
