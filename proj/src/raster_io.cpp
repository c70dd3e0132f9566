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

#include "coalmap/raster_io.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "coalmap/errors.hpp"

namespace coalmap {

namespace {

void require_exists(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("missing file: " + path);
    }
}

}  // namespace

ReflectanceScene load_scene(const std::vector<std::string>& paths,
                            const BandMap& band_map,
                            const ScaleOffset& scale_offset) {
    if (paths.empty()) throw ConfigError("no input rasters given");
    scale_offset.validate();

    ReflectanceScene scene;
    scene.band_map = band_map;

    Eigen::Index h = 0, w = 0;
    for (const auto& path : paths) {
        require_exists(path);
        geotiff::Image img = geotiff::read(path);
        if (scene.bands.empty()) {
            h = img.height;
            w = img.width;
        } else if (img.height != h || img.width != w) {
            throw DataError("dimension mismatch: " + path + " is " +
                            std::to_string(img.width) + "x" + std::to_string(img.height) +
                            ", expected " + std::to_string(w) + "x" + std::to_string(h));
        }
        if (!scene.geo_transform && img.geo.transform) {
            scene.geo_transform = img.geo.transform;
            scene.crs_id = img.geo.crs;
        }
        for (auto& b : img.bands) {
            scene.bands.push_back(std::move(b));
        }
    }

    band_map.validate(static_cast<int>(scene.bands.size()));

    // Which stack slots feed the indices; only these decide nodata.
    std::set<int> required;
    for (int i = 0; i < kNumSemanticBands; ++i) {
        required.insert(band_map.assignments[static_cast<size_t>(i)]);
    }

    scene.nodata = GridB::Constant(h, w, false);
    const float nan = std::numeric_limits<float>::quiet_NaN();
    for (size_t bi = 0; bi < scene.bands.size(); ++bi) {
        GridF& grid = scene.bands[bi];
        const bool is_required = required.count(static_cast<int>(bi) + 1) > 0;
        for (Eigen::Index r = 0; r < h; ++r) {
            for (Eigen::Index c = 0; c < w; ++c) {
                const double dn = static_cast<double>(grid(r, c));
                bool invalid = !std::isfinite(dn);
                if (!invalid && scale_offset.nodata_dn && dn == *scale_offset.nodata_dn) {
                    invalid = true;
                }
                float refl = nan;
                if (!invalid) {
                    refl = static_cast<float>(dn * scale_offset.scale + scale_offset.offset);
                    if (refl < kReflectanceMin || refl > kReflectanceMax ||
                        !std::isfinite(refl)) {
                        invalid = true;
                        refl = nan;
                    }
                }
                grid(r, c) = refl;
                if (invalid && is_required) scene.nodata(r, c) = true;
            }
        }
    }
    return scene;
}

int count_file_bands(const std::string& path) {
    require_exists(path);
    return geotiff::probe(path).samples;
}

bool file_is_float(const std::string& path) {
    require_exists(path);
    return geotiff::probe(path).type == geotiff::SampleType::Float32;
}

void write_mask(const BinaryMask& mask, const std::string& path,
                const geotiff::GeoInfo& geo) {
    if (mask.height() <= 0 || mask.width() <= 0) {
        throw DataError("mask is empty");
    }
    geotiff::write_u8(path, mask.values, geo, 255);
}

BinaryMask read_mask(const std::string& path, geotiff::GeoInfo* geo_out) {
    require_exists(path);
    geotiff::Image img = geotiff::read(path);
    if (img.bands.size() != 1) {
        throw DataError("mask raster must be single-band: " + path);
    }
    BinaryMask mask(img.height, img.width);
    for (Eigen::Index r = 0; r < img.height; ++r) {
        for (Eigen::Index c = 0; c < img.width; ++c) {
            const float v = img.bands[0](r, c);
            if (v != 0.0f && v != 1.0f && v != 255.0f) {
                throw DataError("mask raster holds value " + std::to_string(v) +
                                ", expected 0, 1 or 255: " + path);
            }
            mask.values(r, c) = static_cast<std::uint8_t>(v);
        }
    }
    if (geo_out) *geo_out = img.geo;
    return mask;
}

geotiff::GeoInfo scene_geo(const ReflectanceScene& scene) {
    geotiff::GeoInfo geo;
    geo.transform = scene.geo_transform;
    geo.crs = scene.crs_id;
    return geo;
}

GridU16 read_qa_band(const std::string& path) {
    require_exists(path);
    geotiff::Image img = geotiff::read(path);
    if (img.bands.size() != 1) {
        throw DataError("QA raster must be single-band: " + path);
    }
    GridU16 qa(img.height, img.width);
    for (Eigen::Index r = 0; r < img.height; ++r) {
        for (Eigen::Index c = 0; c < img.width; ++c) {
            const float v = img.bands[0](r, c);
            if (!(v >= 0.0f && v <= 65535.0f) || v != std::floor(v)) {
                throw DataError("QA raster holds non-16-bit value " + std::to_string(v) +
                                ": " + path);
            }
            qa(r, c) = static_cast<std::uint16_t>(v);
        }
    }
    return qa;
}

}  // namespace coalmap
