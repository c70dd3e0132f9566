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

#ifndef COALMAP_RASTER_IO_HPP
#define COALMAP_RASTER_IO_HPP

#include <string>
#include <vector>

#include "coalmap/band_map.hpp"
#include "coalmap/geotiff.hpp"
#include "coalmap/scene.hpp"

namespace coalmap {

/// Assembles a reflectance scene from one multiband file or several
/// band-per-file rasters (samples stack in argument order). Applies
/// reflectance = DN*scale + offset per pixel; DN equal to the nodata
/// sentinel, NaN samples, and out-of-range results become nodata.
/// Throws IoError (missing file) or DataError (band-count or dimension
/// mismatch).
ReflectanceScene load_scene(const std::vector<std::string>& paths,
                            const BandMap& band_map,
                            const ScaleOffset& scale_offset);

/// Number of sample planes the file would contribute to a stack.
int count_file_bands(const std::string& path);

/// True when the file stores floating-point samples (drives the CLI's
/// default scaling choice).
bool file_is_float(const std::string& path);

/// Writes a mask as 8-bit GeoTIFF: 0 = non-EC, 1 = EC, 255 = nodata,
/// georeferencing copied from geo.
void write_mask(const BinaryMask& mask, const std::string& path,
                const geotiff::GeoInfo& geo);

/// Read-back of write_mask output (roundtrip checks, assess input).
BinaryMask read_mask(const std::string& path, geotiff::GeoInfo* geo_out = nullptr);

/// Geo metadata of a loaded scene in writer form.
geotiff::GeoInfo scene_geo(const ReflectanceScene& scene);

/// Reads a 16-bit QA band; values are validated to be integral.
GridU16 read_qa_band(const std::string& path);

}  // namespace coalmap

#endif  // COALMAP_RASTER_IO_HPP
