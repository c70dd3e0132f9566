/**
 * Copyright 2026, the coalmap authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COALMAP_SPECTRAL_STATS_HPP
#define COALMAP_SPECTRAL_STATS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coalmap/band_map.hpp"

namespace coalmap {

using Spectrum6 = Eigen::Matrix<double, kNumSemanticBands, 1>;

/// Labeled per-class pixel spectra (blue, green, red, NIR, SWIR1, SWIR2).
struct ClassSampleSet {
    std::string class_name;
    std::vector<Spectrum6> spectra;
};

/// Per-band five-number summary plus Gaussian summary of a class.
struct ClassStats {
    std::string class_name;
    Spectrum6 min, p25, p50, p75, max;
    Spectrum6 mean;
    Eigen::Matrix<double, kNumSemanticBands, kNumSemanticBands> covariance;
    int n_samples = 0;
};

/// Linear-interpolation percentile (type-7 convention) of unsorted data.
double percentile(std::vector<double> values, double q);

/// Percentiles, sample mean, unbiased covariance. Requires >= 2 spectra;
/// throws DataError otherwise.
ClassStats class_stats(const ClassSampleSet& samples);

/// Bhattacharyya distance between Gaussian summaries (mean/covariance
/// form), dimension-general. Covariances are regularized with 1e-8 on the
/// diagonal when badly conditioned; regularized_out reports whether that
/// happened. Throws DataError if still not positive definite.
double bhattacharyya_distance(const Eigen::VectorXd& mean_a, const Eigen::MatrixXd& cov_a,
                              const Eigen::VectorXd& mean_b, const Eigen::MatrixXd& cov_b,
                              bool* regularized_out = nullptr);

/// Jeffries-Matusita separability 2*(1 - exp(-B)) in [0, 2]; symmetric
/// in its arguments, 0 for identical summaries, saturating to 2.
double jm_separability(const Eigen::VectorXd& mean_a, const Eigen::MatrixXd& cov_a,
                       const Eigen::VectorXd& mean_b, const Eigen::MatrixXd& cov_b,
                       bool* regularized_out = nullptr);

double jm_separability(const ClassStats& a, const ClassStats& b,
                       bool* regularized_out = nullptr);

}  // namespace coalmap

#endif  // COALMAP_SPECTRAL_STATS_HPP
