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

#include "coalmap/scene.hpp"

#include <cmath>
#include <string>

#include "coalmap/errors.hpp"

namespace coalmap {

GeoTransform invert_geo_transform(const GeoTransform& gt) {
    const double det = gt[1] * gt[5] - gt[2] * gt[4];
    if (det == 0.0 || !std::isfinite(det)) {
        throw DataError("geo transform is singular, cannot invert");
    }
    GeoTransform inv;
    inv[1] = gt[5] / det;
    inv[2] = -gt[2] / det;
    inv[4] = -gt[4] / det;
    inv[5] = gt[1] / det;
    inv[0] = -(inv[1] * gt[0] + inv[2] * gt[3]);
    inv[3] = -(inv[4] * gt[0] + inv[5] * gt[3]);
    return inv;
}

const GridF& ReflectanceScene::band(SemanticBand which) const {
    const int src = band_map.source_band(which);
    if (src < 1 || src > static_cast<int>(bands.size())) {
        throw DataError(std::string("semantic band '") + to_string(which) +
                        "' resolves to source band " + std::to_string(src) +
                        " outside the " + std::to_string(bands.size()) + "-band stack");
    }
    return bands[static_cast<size_t>(src - 1)];
}

void ReflectanceScene::validate() const {
    if (bands.empty()) throw DataError("scene has no bands");
    const Eigen::Index h = bands.front().rows();
    const Eigen::Index w = bands.front().cols();
    if (h <= 0 || w <= 0) throw DataError("scene has empty dimensions");
    for (const auto& b : bands) {
        if (b.rows() != h || b.cols() != w) {
            throw DataError("band grids have mismatched dimensions");
        }
    }
    if (nodata.rows() != h || nodata.cols() != w) {
        throw DataError("nodata mask dimensions do not match the bands");
    }
    band_map.validate(static_cast<int>(bands.size()));

    for (int i = 0; i < kNumSemanticBands; ++i) {
        const GridF& g = band(static_cast<SemanticBand>(i));
        for (Eigen::Index r = 0; r < h; ++r) {
            for (Eigen::Index c = 0; c < w; ++c) {
                if (nodata(r, c)) continue;
                const float v = g(r, c);
                if (!std::isfinite(v) || v < kReflectanceMin || v > kReflectanceMax) {
                    throw DataError("valid pixel with implausible reflectance " +
                                    std::to_string(v) + " at row " + std::to_string(r) +
                                    ", col " + std::to_string(c));
                }
            }
        }
    }
}

}  // namespace coalmap
