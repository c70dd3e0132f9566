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

#ifndef COALMAP_POSTPROCESS_HPP
#define COALMAP_POSTPROCESS_HPP

#include <vector>

#include "coalmap/grid.hpp"
#include "coalmap/scene.hpp"

namespace coalmap {

/// Which QA-word bits flag a pixel as unusable. Defaults follow the
/// Landsat Collection-2 QA_PIXEL layout: bit 3 cloud, bit 4 cloud shadow.
struct QaBitConfig {
    int cloud_bit = 3;
    int shadow_bit = 4;
    std::vector<int> extra_bits;

    /// Combined bit mask; validates indices in [0, 15], pairwise distinct.
    std::uint16_t bit_mask() const;
};

/// 3x3 median of the EC(1)/non-EC(0) values, which for binary input is
/// the majority of the 9-pixel window. Out-of-image and NODATA neighbors
/// count as non-EC; output is NODATA exactly where the input is.
BinaryMask median_filter_3x3(const BinaryMask& mask, int threads = 1);

/// Pixels whose QA word has any configured bit set become NODATA; all
/// others pass through. Throws DataError on dimension mismatch.
BinaryMask apply_qa_mask(const BinaryMask& mask, const GridU16& qa_band,
                         const QaBitConfig& cfg);

/// Scene-level variant: folds QA hits into the scene nodata mask so
/// flagged pixels never reach classification.
void apply_qa_mask(ReflectanceScene& scene, const GridU16& qa_band,
                   const QaBitConfig& cfg);

}  // namespace coalmap

#endif  // COALMAP_POSTPROCESS_HPP
