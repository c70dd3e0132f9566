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

#include "coalmap/indices.hpp"

#include <cmath>
#include <limits>

#include "coalmap/errors.hpp"

namespace coalmap {

namespace {

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

// Reflectance ceiling of the BCI chain rule.
constexpr float kBciCeiling = 0.15f;

void check_scene(const ReflectanceScene& scene) {
    if (scene.bands.empty()) throw DataError("scene has no bands");
    if (scene.nodata.rows() != scene.height() || scene.nodata.cols() != scene.width()) {
        throw DataError("scene nodata mask dimensions do not match the bands");
    }
}

}  // namespace

void AcmiParams::validate() const {
    if (!(bright_threshold > 0.0f)) {
        throw DataError("bright_threshold must be positive");
    }
    for (float v : {c_blue, c_green, c_nir, c_swir1, c_swir2, c_const, bright_threshold,
                    mndwi_threshold, suppressed_value, classify_threshold}) {
        if (!std::isfinite(v)) throw DataError("ACMI parameters must be finite");
    }
}

IndexRaster compute_mndwi(const ReflectanceScene& scene, int threads) {
    check_scene(scene);
    const GridF& green = scene.band(SemanticBand::Green);
    const GridF& swir1 = scene.band(SemanticBand::Swir1);

    IndexRaster out;
    out.values.resize(scene.height(), scene.width());
    out.nodata.resize(scene.height(), scene.width());

    for_each_row_block(scene.height(), threads, [&](Eigen::Index r0, Eigen::Index r1) {
        const Eigen::Index n = r1 - r0;
        auto g = green.middleRows(r0, n);
        auto s1 = swir1.middleRows(r0, n);
        GridF den = g + s1;
        GridB bad = scene.nodata.middleRows(r0, n) || (den == 0.0f);
        out.values.middleRows(r0, n) = bad.select(kNaN, (g - s1) / den);
        out.nodata.middleRows(r0, n) = bad;
    });
    return out;
}

IndexRaster compute_acmi(const ReflectanceScene& scene, const AcmiParams& params,
                         int threads) {
    check_scene(scene);
    params.validate();
    const GridF& blue = scene.band(SemanticBand::Blue);
    const GridF& green = scene.band(SemanticBand::Green);
    const GridF& red = scene.band(SemanticBand::Red);
    const GridF& nir = scene.band(SemanticBand::Nir);
    const GridF& swir1 = scene.band(SemanticBand::Swir1);
    const GridF& swir2 = scene.band(SemanticBand::Swir2);

    IndexRaster out;
    out.values.resize(scene.height(), scene.width());
    out.nodata.resize(scene.height(), scene.width());

    for_each_row_block(scene.height(), threads, [&](Eigen::Index r0, Eigen::Index r1) {
        const Eigen::Index n = r1 - r0;
        auto b = blue.middleRows(r0, n);
        auto g = green.middleRows(r0, n);
        auto r = red.middleRows(r0, n);
        auto nr = nir.middleRows(r0, n);
        auto s1 = swir1.middleRows(r0, n);
        auto s2 = swir2.middleRows(r0, n);

        GridF den = g + s1;
        GridF mndwi = (g - s1) / den;
        GridF linear = params.c_blue * b + params.c_green * g + params.c_nir * nr +
                       params.c_swir1 * s1 + params.c_swir2 * s2 + params.c_const;
        GridB suppressed = (mndwi > params.mndwi_threshold) ||
                           (b.max(g).max(r) > params.bright_threshold);
        GridB bad = scene.nodata.middleRows(r0, n) || (den == 0.0f);

        out.values.middleRows(r0, n) =
            bad.select(kNaN, suppressed.select(params.suppressed_value, linear));
        out.nodata.middleRows(r0, n) = bad;
    });
    return out;
}

BinaryMask classify(const IndexRaster& index, float threshold) {
    BinaryMask out(index.height(), index.width());
    out.values = index.nodata.select(
        static_cast<std::uint8_t>(MaskValue::Nodata),
        (index.values > threshold).cast<std::uint8_t>());
    return out;
}

BinaryMask compute_bci(const ReflectanceScene& scene, int threads) {
    check_scene(scene);
    const GridF& nir = scene.band(SemanticBand::Nir);
    const GridF& swir1 = scene.band(SemanticBand::Swir1);
    const GridF& swir2 = scene.band(SemanticBand::Swir2);

    BinaryMask out(scene.height(), scene.width());
    for_each_row_block(scene.height(), threads, [&](Eigen::Index r0, Eigen::Index r1) {
        const Eigen::Index n = r1 - r0;
        auto nr = nir.middleRows(r0, n);
        auto s1 = swir1.middleRows(r0, n);
        auto s2 = swir2.middleRows(r0, n);
        GridB ec = (nr < s1) && (s1 < s2) && (s2 < kBciCeiling);
        out.values.middleRows(r0, n) = scene.nodata.middleRows(r0, n).select(
            static_cast<std::uint8_t>(MaskValue::Nodata), ec.cast<std::uint8_t>());
    });
    return out;
}

}  // namespace coalmap
