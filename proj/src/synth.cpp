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

#include "coalmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <nlohmann/json.hpp>

#include "coalmap/errors.hpp"
#include "coalmap/rng.hpp"

namespace coalmap {

namespace {

ClassSpectrum make_spectrum(const char* name, std::initializer_list<double> mean,
                            std::initializer_list<double> stddev, bool is_coal) {
    ClassSpectrum s;
    s.class_name = name;
    s.is_coal = is_coal;
    int i = 0;
    for (double v : mean) s.mean(i++) = v;
    i = 0;
    for (double v : stddev) s.stddev(i++) = v;
    return s;
}

void check_known_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys,
                      const char* what) {
    for (const auto& item : obj.items()) {
        if (std::find_if(keys.begin(), keys.end(), [&](const char* k) {
                return item.key() == k;
            }) == keys.end()) {
            throw ConfigError(std::string("unknown key \"") + item.key() + "\" in " + what);
        }
    }
}

Eigen::Index json_index(const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_number_integer()) {
        throw ConfigError(std::string("layout field \"") + key + "\" must be an integer");
    }
    return obj[key].get<std::int64_t>();
}

Spectrum6 json_spectrum6(const nlohmann::json& arr, const char* what) {
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(kNumSemanticBands)) {
        throw ConfigError(std::string(what) + " must be an array of 6 numbers");
    }
    Spectrum6 out;
    for (int i = 0; i < kNumSemanticBands; ++i) {
        if (!arr[static_cast<std::size_t>(i)].is_number()) {
            throw ConfigError(std::string(what) + " must be an array of 6 numbers");
        }
        out(i) = arr[static_cast<std::size_t>(i)].get<double>();
    }
    return out;
}

}  // namespace

void ClassSpectrum::validate() const {
    if (class_name.empty()) throw DataError("class spectrum needs a name");
    for (int i = 0; i < kNumSemanticBands; ++i) {
        if (!std::isfinite(mean(i)) || !std::isfinite(stddev(i))) {
            throw DataError("class spectrum of \"" + class_name + "\" is not finite");
        }
        if (mean(i) < 0.0 || mean(i) > 1.0) {
            throw DataError("class mean of \"" + class_name + "\" is outside [0, 1]");
        }
        if (stddev(i) < 0.0) {
            throw DataError("class stddev of \"" + class_name + "\" is negative");
        }
    }
}

const std::vector<ClassSpectrum>& builtin_spectra() {
    static const std::vector<ClassSpectrum> presets = {
        make_spectrum("ec", {0.030, 0.035, 0.040, 0.050, 0.065, 0.080},
                      {0.004, 0.004, 0.004, 0.005, 0.006, 0.007}, true),
        make_spectrum("ec_swir_down", {0.035, 0.040, 0.045, 0.055, 0.085, 0.070},
                      {0.004, 0.004, 0.004, 0.005, 0.006, 0.006}, true),
        make_spectrum("water", {0.035, 0.045, 0.035, 0.015, 0.008, 0.005},
                      {0.002, 0.0025, 0.002, 0.0015, 0.0015, 0.0012}, false),
        make_spectrum("vegetation", {0.025, 0.045, 0.030, 0.450, 0.250, 0.120},
                      {0.004, 0.005, 0.004, 0.020, 0.012, 0.008}, false),
        make_spectrum("bright_soil", {0.180, 0.220, 0.260, 0.300, 0.350, 0.300},
                      {0.012, 0.012, 0.012, 0.012, 0.012, 0.012}, false),
        make_spectrum("dark_soil", {0.040, 0.055, 0.065, 0.110, 0.130, 0.110},
                      {0.003, 0.003, 0.003, 0.004, 0.005, 0.004}, false),
        make_spectrum("bright_bus", {0.300, 0.320, 0.340, 0.360, 0.380, 0.360},
                      {0.015, 0.015, 0.015, 0.015, 0.015, 0.015}, false),
        make_spectrum("dark_bus", {0.040, 0.050, 0.060, 0.100, 0.115, 0.095},
                      {0.003, 0.003, 0.003, 0.004, 0.004, 0.004}, false),
        make_spectrum("red_bus", {0.060, 0.080, 0.150, 0.180, 0.200, 0.170},
                      {0.005, 0.006, 0.010, 0.010, 0.010, 0.010}, false),
    };
    return presets;
}

const ClassSpectrum& builtin_spectrum(const std::string& name) {
    for (const ClassSpectrum& s : builtin_spectra()) {
        if (s.class_name == name) return s;
    }
    throw DataError("unknown built-in class \"" + name + "\"");
}

void SceneLayout::validate() const {
    if (width <= 0 || height <= 0) throw DataError("layout dimensions must be positive");
    if (regions.empty()) throw DataError("layout has no regions");
    GridU8 covered = GridU8::Zero(height, width);
    for (const RegionRect& r : regions) {
        if (r.class_name.empty()) throw DataError("layout region needs a class name");
        if (r.w <= 0 || r.h <= 0) throw DataError("layout region extent must be positive");
        if (r.x < 0 || r.y < 0 || r.x + r.w > width || r.y + r.h > height) {
            throw DataError("layout region \"" + r.class_name + "\" exceeds the raster");
        }
        if ((covered.block(r.y, r.x, r.h, r.w) != 0).any()) {
            throw DataError("layout regions overlap at \"" + r.class_name + "\"");
        }
        covered.block(r.y, r.x, r.h, r.w).setConstant(1);
    }
    if (!(covered != 0).all()) throw DataError("layout regions do not cover the raster");
}

SynthResult generate_scene(const SceneLayout& layout,
                           const std::vector<ClassSpectrum>& spectra) {
    layout.validate();
    std::map<std::string, const ClassSpectrum*> by_name;
    for (const ClassSpectrum& s : spectra) {
        s.validate();
        if (!by_name.emplace(s.class_name, &s).second) {
            throw DataError("duplicate class spectrum \"" + s.class_name + "\"");
        }
    }

    Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> region_id(
        layout.height, layout.width);
    for (std::size_t i = 0; i < layout.regions.size(); ++i) {
        const RegionRect& r = layout.regions[i];
        if (by_name.find(r.class_name) == by_name.end()) {
            throw DataError("layout uses unknown class \"" + r.class_name + "\"");
        }
        region_id.block(r.y, r.x, r.h, r.w).setConstant(static_cast<int>(i));
    }

    SynthResult out;
    out.scene.bands.assign(static_cast<std::size_t>(kNumSemanticBands),
                           GridF(layout.height, layout.width));
    out.scene.band_map = BandMap::custom({1, 2, 3, 4, 5, 6});
    out.scene.nodata = GridB::Constant(layout.height, layout.width, false);
    out.scene.geo_transform = GeoTransform{0.0, 1.0, 0.0, 0.0, 0.0, -1.0};
    out.ground_truth = BinaryMask(layout.height, layout.width);

    // Row-major pixel order, semantic band order within a pixel, one RNG
    // stream: the output is a pure function of (layout, spectra).
    Rng rng(layout.rng_seed);
    for (Eigen::Index row = 0; row < layout.height; ++row) {
        for (Eigen::Index col = 0; col < layout.width; ++col) {
            const RegionRect& r = layout.regions[static_cast<std::size_t>(region_id(row, col))];
            const ClassSpectrum& s = *by_name.at(r.class_name);
            for (int b = 0; b < kNumSemanticBands; ++b) {
                const double v = s.mean(b) + s.stddev(b) * rng.gaussian();
                out.scene.bands[static_cast<std::size_t>(b)](row, col) =
                    static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
            out.ground_truth.values(row, col) = static_cast<std::uint8_t>(
                s.is_coal ? MaskValue::Ec : MaskValue::NonEc);
        }
    }
    return out;
}

SceneLayout parse_layout_json(const std::string& text,
                              std::vector<ClassSpectrum>* spectra_out) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("layout JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("layout JSON must be an object");
    check_known_keys(doc, {"width", "height", "seed", "regions", "spectra"}, "layout");

    SceneLayout layout;
    layout.width = json_index(doc, "width");
    layout.height = json_index(doc, "height");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
            throw ConfigError("layout field \"seed\" must be an integer");
        }
        layout.rng_seed = doc["seed"].get<std::uint64_t>();
    }

    if (!doc.contains("regions") || !doc["regions"].is_array()) {
        throw ConfigError("layout field \"regions\" must be an array");
    }
    for (const nlohmann::json& r : doc["regions"]) {
        if (!r.is_object()) throw ConfigError("layout regions must be objects");
        check_known_keys(r, {"x", "y", "w", "h", "class"}, "region");
        if (!r.contains("class") || !r["class"].is_string()) {
            throw ConfigError("region field \"class\" must be a string");
        }
        layout.regions.push_back({json_index(r, "x"), json_index(r, "y"), json_index(r, "w"),
                                  json_index(r, "h"), r["class"].get<std::string>()});
    }

    if (spectra_out) *spectra_out = builtin_spectra();
    if (doc.contains("spectra")) {
        if (!doc["spectra"].is_array()) throw ConfigError("layout field \"spectra\" must be an array");
        for (const nlohmann::json& s : doc["spectra"]) {
            if (!s.is_object()) throw ConfigError("layout spectra must be objects");
            check_known_keys(s, {"class", "mean", "stddev", "is_coal"}, "spectrum");
            if (!s.contains("class") || !s["class"].is_string()) {
                throw ConfigError("spectrum field \"class\" must be a string");
            }
            ClassSpectrum cs;
            cs.class_name = s["class"].get<std::string>();
            if (!s.contains("mean") || !s.contains("stddev")) {
                throw ConfigError("spectrum \"" + cs.class_name + "\" needs mean and stddev");
            }
            cs.mean = json_spectrum6(s["mean"], "spectrum mean");
            cs.stddev = json_spectrum6(s["stddev"], "spectrum stddev");
            if (s.contains("is_coal")) {
                if (!s["is_coal"].is_boolean()) {
                    throw ConfigError("spectrum field \"is_coal\" must be a boolean");
                }
                cs.is_coal = s["is_coal"].get<bool>();
            }
            if (!spectra_out) continue;
            auto hit = std::find_if(spectra_out->begin(), spectra_out->end(),
                                    [&](const ClassSpectrum& e) {
                                        return e.class_name == cs.class_name;
                                    });
            if (hit != spectra_out->end()) {
                *hit = std::move(cs);
            } else {
                spectra_out->push_back(std::move(cs));
            }
        }
    }
    return layout;
}

}  // namespace coalmap
