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

#ifndef COALMAP_INDICES_HPP
#define COALMAP_INDICES_HPP

#include "coalmap/grid.hpp"
#include "coalmap/scene.hpp"

namespace coalmap {

/// ACMI coefficients and decision thresholds. Defaults are the published
/// form: 4.75*blue - green - 4.5*NIR + 0.25*SWIR1 + SWIR2 + 0.1, with
/// water suppressed at MNDWI > 0 and bright pixels at max(vis) > 0.075.
/// All math is float32.
struct AcmiParams {
    float c_blue = 4.75f;
    float c_green = -1.0f;
    float c_nir = -4.5f;
    float c_swir1 = 0.25f;
    float c_swir2 = 1.0f;
    float c_const = 0.1f;
    float bright_threshold = 0.075f;
    float mndwi_threshold = 0.0f;
    float suppressed_value = -1.0f;
    float classify_threshold = 0.0f;

    void validate() const;  // bright_threshold > 0, everything finite
};

/// Real-valued per-pixel index with explicit nodata. Values at nodata
/// pixels are NaN.
struct IndexRaster {
    GridF values;
    GridB nodata;

    Eigen::Index height() const { return values.rows(); }
    Eigen::Index width() const { return values.cols(); }
};

/// (green - SWIR1) / (green + SWIR1); nodata where the source is nodata
/// or the denominator is exactly zero.
IndexRaster compute_mndwi(const ReflectanceScene& scene, int threads = 1);

/// Piecewise coal index: suppressed_value where MNDWI > mndwi_threshold
/// or max(blue, green, red) > bright_threshold, otherwise the linear
/// band combination. Nodata where the source is nodata or the MNDWI
/// denominator is exactly zero.
IndexRaster compute_acmi(const ReflectanceScene& scene, const AcmiParams& params = {},
                         int threads = 1);

/// EC where value > threshold (strict), NON_EC at or below, NODATA
/// propagated.
BinaryMask classify(const IndexRaster& index, float threshold = 0.0f);

/// Rule-based baseline: EC iff NIR < SWIR1 < SWIR2 < 0.15 (strict chain).
BinaryMask compute_bci(const ReflectanceScene& scene, int threads = 1);

}  // namespace coalmap

#endif  // COALMAP_INDICES_HPP
