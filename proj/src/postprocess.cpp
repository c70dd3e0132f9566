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

#include "coalmap/postprocess.hpp"

#include <set>

#include "coalmap/errors.hpp"

namespace coalmap {

std::uint16_t QaBitConfig::bit_mask() const {
    std::vector<int> bits = {cloud_bit, shadow_bit};
    bits.insert(bits.end(), extra_bits.begin(), extra_bits.end());
    std::set<int> seen;
    std::uint16_t mask = 0;
    for (int bit : bits) {
        if (bit < 0 || bit > 15) throw ConfigError("QA bit index out of range [0, 15]");
        if (!seen.insert(bit).second) throw ConfigError("duplicate QA bit index");
        mask = static_cast<std::uint16_t>(mask | (1u << bit));
    }
    return mask;
}

BinaryMask median_filter_3x3(const BinaryMask& mask, int threads) {
    const Eigen::Index h = mask.height();
    const Eigen::Index w = mask.width();
    BinaryMask out(h, w);

    for_each_row_block(h, threads, [&](Eigen::Index r0, Eigen::Index r1) {
        for (Eigen::Index row = r0; row < r1; ++row) {
            for (Eigen::Index col = 0; col < w; ++col) {
                const std::uint8_t center = mask.values(row, col);
                if (center == static_cast<std::uint8_t>(MaskValue::Nodata)) {
                    out.values(row, col) = center;
                    continue;
                }
                // Median of a binary 3x3 window is its majority vote. Pixels
                // beyond the border and NODATA neighbours count as non-EC.
                int ones = 0;
                for (Eigen::Index dr = -1; dr <= 1; ++dr) {
                    for (Eigen::Index dc = -1; dc <= 1; ++dc) {
                        const Eigen::Index rr = row + dr;
                        const Eigen::Index cc = col + dc;
                        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                        if (mask.values(rr, cc) == static_cast<std::uint8_t>(MaskValue::Ec)) {
                            ++ones;
                        }
                    }
                }
                out.values(row, col) = static_cast<std::uint8_t>(
                    ones >= 5 ? MaskValue::Ec : MaskValue::NonEc);
            }
        }
    });
    return out;
}

BinaryMask apply_qa_mask(const BinaryMask& mask, const GridU16& qa, const QaBitConfig& config) {
    if (qa.rows() != mask.height() || qa.cols() != mask.width()) {
        throw DataError("QA band dimensions do not match the mask");
    }
    const std::uint16_t bits = config.bit_mask();
    GridB flagged = qa.unaryExpr([bits](std::uint16_t v) -> bool { return (v & bits) != 0; });
    BinaryMask out(mask.height(), mask.width());
    out.values =
        flagged.select(static_cast<std::uint8_t>(MaskValue::Nodata), mask.values);
    return out;
}

void apply_qa_mask(ReflectanceScene& scene, const GridU16& qa, const QaBitConfig& config) {
    if (qa.rows() != scene.height() || qa.cols() != scene.width()) {
        throw DataError("QA band dimensions do not match the scene");
    }
    const std::uint16_t bits = config.bit_mask();
    GridB flagged = qa.unaryExpr([bits](std::uint16_t v) -> bool { return (v & bits) != 0; });
    scene.nodata = scene.nodata || flagged;
}

}  // namespace coalmap
