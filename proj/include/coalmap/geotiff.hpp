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

#ifndef COALMAP_GEOTIFF_HPP
#define COALMAP_GEOTIFF_HPP

#include <optional>
#include <string>
#include <vector>

#include "coalmap/grid.hpp"
#include "coalmap/scene.hpp"

namespace coalmap::geotiff {

/// Georeferencing carried in GeoTIFF tags. crs holds "EPSG:<code>" when
/// the file has a recognized EPSG geokey, otherwise the citation text.
struct GeoInfo {
    std::optional<GeoTransform> transform;
    std::optional<std::string> crs;
    std::optional<std::string> nodata_text;  // GDAL_NODATA tag, verbatim
};

enum class SampleType {
    UInt8,
    UInt16,
    Int16,
    UInt32,
    Int32,
    Float32,
};

/// Decoded raster. Samples are widened to float32 per band plane; for
/// integer inputs up to 16 bits this is lossless.
struct Image {
    Eigen::Index height = 0;
    Eigen::Index width = 0;
    std::vector<GridF> bands;
    SampleType source_type = SampleType::Float32;
    GeoInfo geo;
};

/// Reads a single- or multi-sample GeoTIFF (stripped or tiled, contiguous
/// or separate planes). Throws IoError on open/format failures.
Image read(const std::string& path);

/// Header-only peek: dimensions, sample count, sample type.
struct FileInfo {
    Eigen::Index height = 0;
    Eigen::Index width = 0;
    int samples = 0;
    SampleType type = SampleType::Float32;
};
FileInfo probe(const std::string& path);

/// 8-bit single-band writer used for masks. Tags GDAL_NODATA with
/// nodata_value when given.
void write_u8(const std::string& path, const GridU8& grid, const GeoInfo& geo,
              std::optional<int> nodata_value = std::nullopt);

/// Float32 writer; one or more bands, contiguous planar layout.
void write_f32(const std::string& path, const std::vector<GridF>& bands,
               const GeoInfo& geo, std::optional<std::string> nodata_text = std::nullopt);

}  // namespace coalmap::geotiff

#endif  // COALMAP_GEOTIFF_HPP
