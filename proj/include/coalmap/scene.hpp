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

#ifndef COALMAP_SCENE_HPP
#define COALMAP_SCENE_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "coalmap/band_map.hpp"
#include "coalmap/grid.hpp"

namespace coalmap {

/// 6-term affine pixel-to-world map, GDAL ordering:
///   x = gt[0] + col*gt[1] + row*gt[2]
///   y = gt[3] + col*gt[4] + row*gt[5]
/// (col, row) are fractional pixel coordinates with (0, 0) at the
/// top-left corner of the top-left pixel.
using GeoTransform = std::array<double, 6>;

/// Inverts the affine map; throws DataError if it is singular.
GeoTransform invert_geo_transform(const GeoTransform& gt);

/// Applies the map to fractional pixel coordinates.
inline void apply_geo_transform(const GeoTransform& gt, double col, double row,
                                double& x, double& y) {
    x = gt[0] + col * gt[1] + row * gt[2];
    y = gt[3] + col * gt[4] + row * gt[5];
}

/// Multi-band surface-reflectance raster, immutable after load.
/// All band grids share dimensions, values are float32 reflectance,
/// and the nodata mask is absorbing for every derived product.
struct ReflectanceScene {
    std::vector<GridF> bands;  // assembled stack, 0-based internally
    BandMap band_map;          // resolves semantic bands to 1-based stack slots
    GridB nodata;              // true = pixel invalid in some required band
    std::optional<GeoTransform> geo_transform;
    std::optional<std::string> crs_id;

    Eigen::Index height() const { return bands.empty() ? 0 : bands.front().rows(); }
    Eigen::Index width() const { return bands.empty() ? 0 : bands.front().cols(); }

    /// Grid for a semantic band, resolved through the band map.
    /// Throws DataError if unresolved or out of range.
    const GridF& band(SemanticBand which) const;

    /// Checks grid dimensions, band-map validity, and the reflectance
    /// plausibility range on valid pixels. Throws DataError.
    void validate() const;
};

}  // namespace coalmap

#endif  // COALMAP_SCENE_HPP
