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

#include "coalmap/spectral_stats.hpp"

#include <algorithm>
#include <cmath>

#include "coalmap/errors.hpp"

namespace coalmap {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kRidge = 1e-8;

// Adds a small ridge when the matrix is singular or badly conditioned.
Eigen::MatrixXd conditioned(Eigen::MatrixXd cov, bool* regularized) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kConditionLimit) {
        cov.diagonal().array() += kRidge;
        if (regularized) *regularized = true;
    }
    return cov;
}

double log_det_pd(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw DataError("covariance matrix is not positive definite");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    return 2.0 * L.diagonal().array().log().sum();
}

}  // namespace

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("percentile of an empty sample");
    if (!(q >= 0.0 && q <= 100.0)) throw DataError("percentile rank must be in [0, 100]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * (q / 100.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

ClassStats class_stats(const ClassSampleSet& samples) {
    const std::size_t n = samples.spectra.size();
    if (n < 2) throw DataError("class statistics need at least 2 spectra");

    ClassStats s;
    s.class_name = samples.class_name;
    s.n_samples = static_cast<int>(n);

    std::vector<double> band(n);
    for (int b = 0; b < kNumSemanticBands; ++b) {
        for (std::size_t i = 0; i < n; ++i) band[i] = samples.spectra[i](b);
        s.min(b) = percentile(band, 0.0);
        s.p25(b) = percentile(band, 25.0);
        s.p50(b) = percentile(band, 50.0);
        s.p75(b) = percentile(band, 75.0);
        s.max(b) = percentile(band, 100.0);
    }

    s.mean.setZero();
    for (const Spectrum6& x : samples.spectra) s.mean += x;
    s.mean /= static_cast<double>(n);

    s.covariance.setZero();
    for (const Spectrum6& x : samples.spectra) {
        const Spectrum6 d = x - s.mean;
        s.covariance += d * d.transpose();
    }
    s.covariance /= static_cast<double>(n - 1);
    return s;
}

double bhattacharyya_distance(const Eigen::VectorXd& mean_a, const Eigen::MatrixXd& cov_a,
                              const Eigen::VectorXd& mean_b, const Eigen::MatrixXd& cov_b,
                              bool* regularized_out) {
    const Eigen::Index dim = mean_a.size();
    if (mean_b.size() != dim || cov_a.rows() != dim || cov_a.cols() != dim ||
        cov_b.rows() != dim || cov_b.cols() != dim || dim == 0) {
        throw DataError("mean/covariance dimensions are inconsistent");
    }
    if (regularized_out) *regularized_out = false;

    const Eigen::MatrixXd a = conditioned(cov_a, regularized_out);
    const Eigen::MatrixXd b = conditioned(cov_b, regularized_out);
    const Eigen::MatrixXd pooled = (a + b) / 2.0;

    Eigen::LLT<Eigen::MatrixXd> llt(pooled);
    if (llt.info() != Eigen::Success) {
        throw DataError("pooled covariance is not positive definite");
    }
    const Eigen::VectorXd d = mean_a - mean_b;
    const double mahalanobis = d.dot(llt.solve(d)) / 8.0;

    const Eigen::MatrixXd L = llt.matrixL();
    const double log_det_pooled = 2.0 * L.diagonal().array().log().sum();
    const double shape =
        0.5 * (log_det_pooled - 0.5 * (log_det_pd(a) + log_det_pd(b)));
    return mahalanobis + shape;
}

double jm_separability(const Eigen::VectorXd& mean_a, const Eigen::MatrixXd& cov_a,
                       const Eigen::VectorXd& mean_b, const Eigen::MatrixXd& cov_b,
                       bool* regularized_out) {
    const double B = bhattacharyya_distance(mean_a, cov_a, mean_b, cov_b, regularized_out);
    return 2.0 * (1.0 - std::exp(-B));
}

double jm_separability(const ClassStats& a, const ClassStats& b, bool* regularized_out) {
    return jm_separability(Eigen::VectorXd(a.mean), Eigen::MatrixXd(a.covariance),
                           Eigen::VectorXd(b.mean), Eigen::MatrixXd(b.covariance),
                           regularized_out);
}

}  // namespace coalmap
