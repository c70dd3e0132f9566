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

#ifndef COALMAP_GRID_HPP
#define COALMAP_GRID_HPP

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace coalmap {

/// Raster grid: rows = image rows (top-down), cols = image columns.
/// Row-major so a row is one contiguous scanline.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using GridF = Grid<float>;
using GridD = Grid<double>;
using GridU8 = Grid<std::uint8_t>;
using GridU16 = Grid<std::uint16_t>;
using GridB = Grid<bool>;

/// Pixel classes of a binary EC mask. Codes double as the on-disk encoding.
enum class MaskValue : std::uint8_t {
    NonEc = 0,
    Ec = 1,
    Nodata = 255,
};

/// Per-pixel 3-state classification raster.
struct BinaryMask {
    GridU8 values;

    BinaryMask() = default;
    BinaryMask(Eigen::Index height, Eigen::Index width, MaskValue fill = MaskValue::NonEc)
        : values(GridU8::Constant(height, width, static_cast<std::uint8_t>(fill))) {}

    Eigen::Index height() const { return values.rows(); }
    Eigen::Index width() const { return values.cols(); }

    MaskValue at(Eigen::Index row, Eigen::Index col) const {
        return static_cast<MaskValue>(values(row, col));
    }
    void set(Eigen::Index row, Eigen::Index col, MaskValue v) {
        values(row, col) = static_cast<std::uint8_t>(v);
    }

    Eigen::Index count(MaskValue v) const {
        return (values == static_cast<std::uint8_t>(v)).count();
    }
};

/// Runs fn(row_begin, row_end) over disjoint contiguous row blocks.
/// threads <= 1 runs inline; output is identical for any partitioning as
/// long as fn writes only rows in its block.
void for_each_row_block(Eigen::Index rows, int threads,
                        const std::function<void(Eigen::Index, Eigen::Index)>& fn);

}  // namespace coalmap

#endif  // COALMAP_GRID_HPP
