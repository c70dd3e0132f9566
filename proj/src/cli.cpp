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

#include "coalmap/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "coalmap/assessment.hpp"
#include "coalmap/band_map.hpp"
#include "coalmap/errors.hpp"
#include "coalmap/geotiff.hpp"
#include "coalmap/indices.hpp"
#include "coalmap/postprocess.hpp"
#include "coalmap/raster_io.hpp"
#include "coalmap/spectral_stats.hpp"
#include "coalmap/synth.hpp"

namespace coalmap::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out.flush()) throw IoError("cannot write " + path);
}

std::string fnv1a64_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016" PRIx64, h);
    return out;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const std::size_t a = token.find_first_not_of(" \t");
        const std::size_t b = token.find_last_not_of(" \t");
        if (a == std::string::npos) throw ConfigError(std::string(what) + ": empty entry");
        token = token.substr(a, b - a + 1);
        char* end = nullptr;
        const long v = std::strtol(token.c_str(), &end, 10);
        if (end == token.c_str() || *end != '\0') {
            throw ConfigError(std::string(what) + ": \"" + token + "\" is not an integer");
        }
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
    return out;
}

double parse_double(const std::string& token, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw ConfigError(std::string(what) + ": \"" + token + "\" is not a number");
    }
    return v;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

const char* sensor_name(Sensor s) {
    switch (s) {
        case Sensor::Tm: return "tm";
        case Sensor::EtmPlus: return "etm";
        case Sensor::Oli: return "oli";
        case Sensor::Custom: return "custom";
    }
    return "custom";
}

void require_known_keys(const json& obj, std::initializer_list<const char*> keys,
                        const char* what) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : keys) {
            if (item.key() == k) { known = true; break; }
        }
        if (!known) {
            throw ConfigError(std::string("unknown key \"") + item.key() + "\" in " + what);
        }
    }
}

json parse_json_file(const std::string& path, const char* what) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Scene ingestion shared by classify and compare.

struct SceneCliOptions {
    std::vector<std::string> inputs;
    std::string sensor;
    std::string bands_csv;
    double scale = 0.0;
    double offset = 0.0;
    double nodata_dn = 0.0;
    bool no_nodata_dn = false;
    std::string config_path;
    std::string qa_path;
    std::string qa_bits_csv = "3,4";
    int threads = 1;

    CLI::Option* scale_opt = nullptr;
    CLI::Option* offset_opt = nullptr;
    CLI::Option* nodata_opt = nullptr;
};

void add_scene_options(CLI::App* cmd, SceneCliOptions& o) {
    cmd->add_option("inputs", o.inputs,
                    "Input reflectance GeoTIFF(s); bands stack in argument order")
        ->required();
    cmd->add_option("--sensor", o.sensor,
                    "Band-position preset for full Landsat stacks: tm, etm, oli")
        ->check(CLI::IsMember({"tm", "etm", "oli"}));
    cmd->add_option("--bands", o.bands_csv,
                    "Six 1-based stack positions: blue,green,red,nir,swir1,swir2");
    o.scale_opt = cmd->add_option(
        "--scale", o.scale,
        "DN-to-reflectance scale (defaults: Landsat L2SP for integer samples, 1 for float)");
    o.offset_opt = cmd->add_option("--offset", o.offset,
                                   "DN-to-reflectance offset (defaults as for --scale)");
    o.nodata_opt = cmd->add_option("--nodata-dn", o.nodata_dn,
                                   "DN sentinel marking nodata (default 0 for integer samples)");
    cmd->add_flag("--no-nodata-dn", o.no_nodata_dn, "Disable the DN nodata sentinel");
    cmd->add_option("--config", o.config_path,
                    "JSON file with band map / scaling overrides (flags win)");
    cmd->add_option("--qa", o.qa_path, "16-bit QA bit-flag raster; flagged pixels become nodata");
    cmd->add_option("--qa-bits", o.qa_bits_csv,
                    "QA bits to mask as cloud,shadow[,extra...] (default 3,4)");
    cmd->add_option("--threads", o.threads, "Worker threads for raster math")
        ->check(CLI::PositiveNumber);
}

struct IngestResult {
    ReflectanceScene scene;
    json provenance;
};

QaBitConfig qa_config_from_csv(const std::string& csv) {
    const std::vector<int> bits = parse_int_list(csv, "--qa-bits");
    if (bits.size() < 2) {
        throw ConfigError("--qa-bits needs at least the cloud and shadow bits");
    }
    QaBitConfig cfg;
    cfg.cloud_bit = bits[0];
    cfg.shadow_bit = bits[1];
    cfg.extra_bits.assign(bits.begin() + 2, bits.end());
    cfg.bit_mask();  // validate range and uniqueness before any I/O
    return cfg;
}

IngestResult ingest_scene(const SceneCliOptions& o, int verbosity) {
    // Config-file overrides (lowest precedence above the defaults).
    std::optional<std::string> cfg_sensor;
    std::optional<std::vector<int>> cfg_bands;
    std::optional<double> cfg_scale;
    std::optional<double> cfg_offset;
    bool cfg_has_nodata = false;
    std::optional<double> cfg_nodata;
    if (!o.config_path.empty()) {
        const json cfg = parse_json_file(o.config_path, "config file");
        if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
        require_known_keys(cfg, {"sensor", "bands", "scale", "offset", "nodata_dn"},
                           "config file");
        if (cfg.contains("sensor")) {
            if (!cfg["sensor"].is_string()) throw ConfigError("config sensor must be a string");
            cfg_sensor = cfg["sensor"].get<std::string>();
        }
        if (cfg.contains("bands")) {
            if (!cfg["bands"].is_array() || cfg["bands"].size() != 6) {
                throw ConfigError("config bands must be an array of 6 integers");
            }
            std::vector<int> v;
            for (const json& e : cfg["bands"]) {
                if (!e.is_number_integer()) {
                    throw ConfigError("config bands must be an array of 6 integers");
                }
                v.push_back(e.get<int>());
            }
            cfg_bands = v;
        }
        if (cfg.contains("scale")) {
            if (!cfg["scale"].is_number()) throw ConfigError("config scale must be a number");
            cfg_scale = cfg["scale"].get<double>();
        }
        if (cfg.contains("offset")) {
            if (!cfg["offset"].is_number()) throw ConfigError("config offset must be a number");
            cfg_offset = cfg["offset"].get<double>();
        }
        if (cfg.contains("nodata_dn")) {
            cfg_has_nodata = true;
            if (cfg["nodata_dn"].is_null()) {
                cfg_nodata = std::nullopt;
            } else if (cfg["nodata_dn"].is_number()) {
                cfg_nodata = cfg["nodata_dn"].get<double>();
            } else {
                throw ConfigError("config nodata_dn must be a number or null");
            }
        }
    }

    const QaBitConfig qa_cfg = qa_config_from_csv(o.qa_bits_csv);
    if (o.qa_path.empty() && o.qa_bits_csv != "3,4") {
        throw ConfigError("--qa-bits requires --qa");
    }

    int stack = 0;
    for (const std::string& p : o.inputs) stack += count_file_bands(p);
    const bool float_samples = file_is_float(o.inputs.front());

    auto preset = [](const std::string& name) {
        if (name == "tm") return BandMap::tm();
        if (name == "etm") return BandMap::etm_plus();
        if (name == "oli") return BandMap::oli();
        throw ConfigError("unknown sensor \"" + name + "\" (expected tm, etm, oli)");
    };
    BandMap map;
    if (!o.bands_csv.empty()) {
        const std::vector<int> v = parse_int_list(o.bands_csv, "--bands");
        if (v.size() != 6) throw ConfigError("--bands needs exactly 6 entries");
        std::array<int, kNumSemanticBands> a{};
        std::copy(v.begin(), v.end(), a.begin());
        map = BandMap::custom(a);
    } else if (!o.sensor.empty()) {
        map = preset(o.sensor);
    } else if (cfg_bands) {
        std::array<int, kNumSemanticBands> a{};
        std::copy(cfg_bands->begin(), cfg_bands->end(), a.begin());
        map = BandMap::custom(a);
    } else if (cfg_sensor) {
        map = preset(*cfg_sensor);
    } else if (stack == kNumSemanticBands) {
        map = BandMap::custom({1, 2, 3, 4, 5, 6});
    } else {
        throw ConfigError("cannot infer a band mapping for a " + std::to_string(stack) +
                          "-band stack; pass --sensor or --bands");
    }

    ScaleOffset so = float_samples ? ScaleOffset::identity() : ScaleOffset::landsat_l2sp();
    if (cfg_scale) so.scale = *cfg_scale;
    if (cfg_offset) so.offset = *cfg_offset;
    if (cfg_has_nodata) so.nodata_dn = cfg_nodata;
    if (o.scale_opt->count() > 0) so.scale = o.scale;
    if (o.offset_opt->count() > 0) so.offset = o.offset;
    if (o.nodata_opt->count() > 0) so.nodata_dn = o.nodata_dn;
    if (o.no_nodata_dn) so.nodata_dn.reset();
    try {
        so.validate();
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }

    IngestResult out;
    out.scene = load_scene(o.inputs, map, so);
    if (verbosity > 0) {
        std::cerr << "loaded " << stack << " band(s), " << out.scene.height() << "x"
                  << out.scene.width() << ", nodata=" << out.scene.nodata.count() << "\n";
    }

    json qa_prov = nullptr;
    if (!o.qa_path.empty()) {
        const GridU16 qa = read_qa_band(o.qa_path);
        apply_qa_mask(out.scene, qa, qa_cfg);
        std::vector<int> bits = {qa_cfg.cloud_bit, qa_cfg.shadow_bit};
        bits.insert(bits.end(), qa_cfg.extra_bits.begin(), qa_cfg.extra_bits.end());
        qa_prov = json{{"path", o.qa_path}, {"fnv1a64", fnv1a64_hex(o.qa_path)}, {"bits", bits}};
        if (verbosity > 0) {
            std::cerr << "qa mask applied, nodata=" << out.scene.nodata.count() << "\n";
        }
    }

    json inputs = json::array();
    for (const std::string& p : o.inputs) {
        inputs.push_back({{"path", p}, {"fnv1a64", fnv1a64_hex(p)}});
    }
    json assignments;
    for (int i = 0; i < kNumSemanticBands; ++i) {
        assignments[to_string(static_cast<SemanticBand>(i))] = map.assignments[static_cast<std::size_t>(i)];
    }
    out.provenance = json{
        {"inputs", inputs},
        {"band_map", {{"sensor", sensor_name(map.sensor)}, {"assignments", assignments}}},
        {"scaling",
         {{"scale", so.scale},
          {"offset", so.offset},
          {"nodata_dn", so.nodata_dn ? json(*so.nodata_dn) : json(nullptr)}}},
        {"qa", qa_prov},
        {"threads", o.threads},
        {"version", kVersion},
    };
    return out;
}

AcmiParams acmi_params_from_file(const std::string& path) {
    const json j = parse_json_file(path, "--params file");
    if (!j.is_object()) throw ConfigError("--params file must hold a JSON object");
    require_known_keys(j,
                       {"c_blue", "c_green", "c_nir", "c_swir1", "c_swir2", "c_const",
                        "bright_threshold", "mndwi_threshold", "suppressed_value",
                        "classify_threshold"},
                       "--params file");
    AcmiParams p;
    auto grab = [&j](const char* key, float& field) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) {
            throw ConfigError(std::string("--params field \"") + key + "\" must be a number");
        }
        field = j[key].get<float>();
    };
    grab("c_blue", p.c_blue);
    grab("c_green", p.c_green);
    grab("c_nir", p.c_nir);
    grab("c_swir1", p.c_swir1);
    grab("c_swir2", p.c_swir2);
    grab("c_const", p.c_const);
    grab("bright_threshold", p.bright_threshold);
    grab("mndwi_threshold", p.mndwi_threshold);
    grab("suppressed_value", p.suppressed_value);
    grab("classify_threshold", p.classify_threshold);
    try {
        p.validate();
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    return p;
}

json acmi_params_json(const AcmiParams& p) {
    return json{
        {"c_blue", p.c_blue},
        {"c_green", p.c_green},
        {"c_nir", p.c_nir},
        {"c_swir1", p.c_swir1},
        {"c_swir2", p.c_swir2},
        {"c_const", p.c_const},
        {"bright_threshold", p.bright_threshold},
        {"mndwi_threshold", p.mndwi_threshold},
        {"suppressed_value", p.suppressed_value},
        {"classify_threshold", p.classify_threshold},
    };
}

// ---------------------------------------------------------------------------
// Reference polygons: GeoJSON or the pixel-space schema
//   {"coordinate_space": "pixel"|"geo", "polygons": [[[x,y], ...], ...]}

Ring ring_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) throw ConfigError(std::string(what) + ": ring must be an array");
    Ring ring;
    for (const json& v : arr) {
        if (!v.is_array() || v.size() < 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ConfigError(std::string(what) + ": vertices must be [x, y] numbers");
        }
        ring.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    // Stored rings drop a repeated closing vertex.
    if (ring.size() >= 2 && ring.front().x == ring.back().x &&
        ring.front().y == ring.back().y) {
        ring.pop_back();
    }
    if (ring.size() < 3) throw ConfigError(std::string(what) + ": ring needs 3 vertices");
    return ring;
}

void append_geojson_polygon(const json& coords, PolygonSet& set) {
    if (!coords.is_array() || coords.empty()) {
        throw ConfigError("GeoJSON polygon has no rings");
    }
    if (coords.size() > 1) {
        throw ConfigError("GeoJSON polygons with interior rings (holes) are not supported");
    }
    set.polygons.push_back(ring_from_json(coords[0], "GeoJSON"));
}

void append_geojson_geometry(const json& geom, PolygonSet& set) {
    if (!geom.is_object() || !geom.contains("type") || !geom["type"].is_string()) {
        throw ConfigError("GeoJSON geometry needs a type");
    }
    const std::string type = geom["type"].get<std::string>();
    if (type == "Polygon") {
        append_geojson_polygon(geom["coordinates"], set);
    } else if (type == "MultiPolygon") {
        if (!geom.contains("coordinates") || !geom["coordinates"].is_array()) {
            throw ConfigError("GeoJSON MultiPolygon needs coordinates");
        }
        for (const json& poly : geom["coordinates"]) append_geojson_polygon(poly, set);
    } else {
        throw ConfigError("unsupported GeoJSON geometry \"" + type + "\"");
    }
}

PolygonSet load_polygon_file(const std::string& path) {
    const json doc = parse_json_file(path, "polygon file");
    PolygonSet set;
    if (doc.is_object() && doc.contains("polygons")) {
        require_known_keys(doc, {"coordinate_space", "polygons"}, "polygon file");
        set.coordinate_space = CoordinateSpace::Pixel;
        if (doc.contains("coordinate_space")) {
            if (!doc["coordinate_space"].is_string()) {
                throw ConfigError("coordinate_space must be \"pixel\" or \"geo\"");
            }
            const std::string space = doc["coordinate_space"].get<std::string>();
            if (space == "pixel") set.coordinate_space = CoordinateSpace::Pixel;
            else if (space == "geo") set.coordinate_space = CoordinateSpace::Geo;
            else throw ConfigError("coordinate_space must be \"pixel\" or \"geo\"");
        }
        if (!doc["polygons"].is_array()) throw ConfigError("polygons must be an array");
        for (const json& ring : doc["polygons"]) {
            set.polygons.push_back(ring_from_json(ring, "polygon file"));
        }
    } else if (doc.is_object() && doc.contains("type") && doc["type"].is_string()) {
        set.coordinate_space = CoordinateSpace::Geo;
        const std::string type = doc["type"].get<std::string>();
        if (type == "FeatureCollection") {
            if (!doc.contains("features") || !doc["features"].is_array()) {
                throw ConfigError("GeoJSON FeatureCollection needs features");
            }
            for (const json& f : doc["features"]) {
                if (!f.is_object() || !f.contains("geometry")) {
                    throw ConfigError("GeoJSON feature needs a geometry");
                }
                append_geojson_geometry(f["geometry"], set);
            }
        } else if (type == "Feature") {
            if (!doc.contains("geometry")) throw ConfigError("GeoJSON feature needs a geometry");
            append_geojson_geometry(doc["geometry"], set);
        } else {
            append_geojson_geometry(doc, set);
        }
    } else {
        throw ConfigError("polygon file is neither GeoJSON nor the pixel-space schema");
    }
    try {
        set.validate();
    } catch (const DataError& e) {
        throw ConfigError(std::string("polygon file: ") + e.what());
    }
    return set;
}

PolygonSet pixel_space_polygons(const PolygonSet& set, const geotiff::GeoInfo& geo) {
    if (set.coordinate_space == CoordinateSpace::Pixel) return set;
    if (!geo.transform) {
        throw ConfigError("geo-space polygons need a georeferenced raster to map against");
    }
    return set.to_pixel_space(*geo.transform);
}

// ---------------------------------------------------------------------------
// Accuracy reports (CSV + JSON, full config echo).

json report_json(const AccuracyReport& r, const json& config) {
    return json{
        {"metrics",
         {{"ua_pct", r.ua_defined ? json(r.ua) : json(nullptr)},
          {"ua_defined", r.ua_defined},
          {"pa_pct", r.pa},
          {"oa_pct", r.oa},
          {"f1_pct", 100.0 * r.f1}}},
        {"matrix",
         {{"tp", r.matrix.tp},
          {"fp", r.matrix.fp},
          {"fn", r.matrix.fn},
          {"tn", r.matrix.tn},
          {"nodata_skipped", r.matrix.nodata_skipped}}},
        {"config", config},
    };
}

std::string report_csv(const AccuracyReport& r, const json& config) {
    std::string csv =
        "ua_pct,pa_pct,oa_pct,f1_pct,ua_defined,tp,fp,fn,tn,nodata_skipped,config\n";
    csv += r.ua_defined ? fmt("%.6f", r.ua) : std::string();
    csv += "," + fmt("%.6f", r.pa);
    csv += "," + fmt("%.6f", r.oa);
    csv += "," + fmt("%.6f", 100.0 * r.f1);
    csv += std::string(",") + (r.ua_defined ? "true" : "false");
    csv += "," + std::to_string(r.matrix.tp);
    csv += "," + std::to_string(r.matrix.fp);
    csv += "," + std::to_string(r.matrix.fn);
    csv += "," + std::to_string(r.matrix.tn);
    csv += "," + std::to_string(r.matrix.nodata_skipped);
    csv += "," + csv_escape(config.dump());
    csv += "\n";
    return csv;
}

void write_report_files(const std::string& base, const AccuracyReport& r, const json& config,
                        std::vector<fs::path>& outputs) {
    outputs.push_back(base + ".csv");
    write_text_file(base + ".csv", report_csv(r, config));
    outputs.push_back(base + ".json");
    write_text_file(base + ".json", report_json(r, config).dump(2) + "\n");
}

std::string report_line(const char* label, const AccuracyReport& r) {
    std::string line = label;
    line += ": ua=" + (r.ua_defined ? fmt("%.2f", r.ua) : std::string("-"));
    line += " pa=" + fmt("%.2f", r.pa);
    line += " oa=" + fmt("%.2f", r.oa);
    line += " f1=" + fmt("%.2f", 100.0 * r.f1);
    line += " (tp=" + std::to_string(r.matrix.tp) + " fp=" + std::to_string(r.matrix.fp) +
            " fn=" + std::to_string(r.matrix.fn) + " tn=" + std::to_string(r.matrix.tn) +
            " skipped=" + std::to_string(r.matrix.nodata_skipped) + ")";
    return line;
}

// Samples a mask against reference polygons or scores it against a truth
// raster; exactly one of truth_path / truth_raster is set.
AccuracyReport assess_mask(const BinaryMask& mask, const geotiff::GeoInfo& geo,
                           const std::string& truth_path, const std::string& truth_raster,
                           int n_ec, int n_bg, std::uint64_t seed,
                           std::vector<SamplePoint>* samples_cache) {
    if (!truth_raster.empty()) {
        const BinaryMask truth = read_mask(truth_raster);
        return metrics(evaluate_against_truth(mask, truth));
    }
    if (samples_cache && !samples_cache->empty()) {
        return metrics(evaluate(mask, *samples_cache));
    }
    const PolygonSet polys = pixel_space_polygons(load_polygon_file(truth_path), geo);
    std::vector<SamplePoint> samples =
        stratified_sample(mask.width(), mask.height(), polys, n_ec, n_bg, seed);
    AccuracyReport r = metrics(evaluate(mask, samples));
    if (samples_cache) *samples_cache = std::move(samples);
    return r;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyOptions {
    SceneCliOptions scene;
    std::string out;
    std::string emit_index;
    std::string params_path;
    std::string index = "acmi";
    double threshold = 0.0;
    bool no_median = false;
    CLI::Option* threshold_opt = nullptr;
};

void cmd_classify(const ClassifyOptions& o, std::vector<fs::path>& outputs, int verbosity) {
    AcmiParams params;
    if (!o.params_path.empty()) params = acmi_params_from_file(o.params_path);
    if (o.index == "bci") {
        if (o.threshold_opt->count() > 0) throw ConfigError("--threshold applies to the acmi index");
        if (!o.emit_index.empty()) throw ConfigError("--emit-index applies to the acmi index");
        if (!o.params_path.empty()) throw ConfigError("--params applies to the acmi index");
    }

    IngestResult ing = ingest_scene(o.scene, verbosity);
    const geotiff::GeoInfo geo = scene_geo(ing.scene);

    BinaryMask mask;
    if (o.index == "acmi") {
        const float threshold = o.threshold_opt->count() > 0
                                    ? static_cast<float>(o.threshold)
                                    : params.classify_threshold;
        const IndexRaster acmi = compute_acmi(ing.scene, params, o.scene.threads);
        if (!o.emit_index.empty()) {
            outputs.push_back(o.emit_index);
            geotiff::write_f32(o.emit_index, {acmi.values}, geo, "nan");
        }
        mask = classify(acmi, threshold);
    } else {
        mask = compute_bci(ing.scene, o.scene.threads);
    }
    if (!o.no_median) mask = median_filter_3x3(mask, o.scene.threads);

    outputs.push_back(o.out);
    write_mask(mask, o.out, geo);
    std::cout << "classified " << o.out << ": ec=" << mask.count(MaskValue::Ec)
              << " non_ec=" << mask.count(MaskValue::NonEc)
              << " nodata=" << mask.count(MaskValue::Nodata) << "\n";
}

// ---------------------------------------------------------------------------
// compare

struct CompareOptions {
    SceneCliOptions scene;
    std::string out_acmi;
    std::string out_bci;
    std::string out_diff;
    std::string params_path;
    double threshold = 0.0;
    bool no_median = false;
    std::string truth_path;
    std::string truth_raster;
    std::string report_base;
    int n_ec = 300;
    int n_bg = 450;
    std::uint64_t seed = 0;
    CLI::Option* threshold_opt = nullptr;
};

void cmd_compare(const CompareOptions& o, std::vector<fs::path>& outputs, int verbosity) {
    if (!o.report_base.empty() && o.truth_path.empty() && o.truth_raster.empty()) {
        throw ConfigError("--report needs --truth or --truth-raster");
    }
    AcmiParams params;
    if (!o.params_path.empty()) params = acmi_params_from_file(o.params_path);
    const float threshold = o.threshold_opt->count() > 0 ? static_cast<float>(o.threshold)
                                                         : params.classify_threshold;

    IngestResult ing = ingest_scene(o.scene, verbosity);
    const geotiff::GeoInfo geo = scene_geo(ing.scene);

    BinaryMask acmi_mask = classify(compute_acmi(ing.scene, params, o.scene.threads), threshold);
    BinaryMask bci_mask = compute_bci(ing.scene, o.scene.threads);
    // Identical post-processing for both methods, for fairness.
    if (!o.no_median) {
        acmi_mask = median_filter_3x3(acmi_mask, o.scene.threads);
        bci_mask = median_filter_3x3(bci_mask, o.scene.threads);
    }

    ing.provenance["command"] = "compare";
    ing.provenance["threshold"] = threshold;
    ing.provenance["acmi_params"] = acmi_params_json(params);
    ing.provenance["median_filter"] = !o.no_median;

    outputs.push_back(o.out_acmi);
    write_mask(acmi_mask, o.out_acmi, geo);
    outputs.push_back(o.out_bci);
    write_mask(bci_mask, o.out_bci, geo);

    // Agreement codes: 0 both non-EC, 1 both EC, 2 ACMI-only, 3 BCI-only,
    // 255 nodata in either mask.
    std::int64_t both_ec = 0, both_non = 0, acmi_only = 0, bci_only = 0, nodata = 0;
    GridU8 agreement(acmi_mask.height(), acmi_mask.width());
    for (Eigen::Index row = 0; row < acmi_mask.height(); ++row) {
        for (Eigen::Index col = 0; col < acmi_mask.width(); ++col) {
            const std::uint8_t a = acmi_mask.values(row, col);
            const std::uint8_t b = bci_mask.values(row, col);
            std::uint8_t code;
            if (a == 255 || b == 255) { code = 255; ++nodata; }
            else if (a == 1 && b == 1) { code = 1; ++both_ec; }
            else if (a == 1) { code = 2; ++acmi_only; }
            else if (b == 1) { code = 3; ++bci_only; }
            else { code = 0; ++both_non; }
            agreement(row, col) = code;
        }
    }
    if (!o.out_diff.empty()) {
        outputs.push_back(o.out_diff);
        geotiff::write_u8(o.out_diff, agreement, geo, 255);
    }
    std::cout << "agreement: both_ec=" << both_ec << " both_non_ec=" << both_non
              << " acmi_only=" << acmi_only << " bci_only=" << bci_only
              << " nodata=" << nodata << "\n";

    if (o.truth_path.empty() && o.truth_raster.empty()) return;

    json config = ing.provenance;
    config["sampling"] = {{"n_ec", o.n_ec}, {"n_bg", o.n_bg}, {"seed", o.seed}};
    if (!o.truth_path.empty()) {
        config["truth"] = {{"path", o.truth_path}, {"fnv1a64", fnv1a64_hex(o.truth_path)}};
    } else {
        config["truth"] = {{"path", o.truth_raster}, {"fnv1a64", fnv1a64_hex(o.truth_raster)}};
    }

    // One sample draw scores both methods.
    std::vector<SamplePoint> samples;
    const AccuracyReport acmi_report = assess_mask(acmi_mask, geo, o.truth_path,
                                                   o.truth_raster, o.n_ec, o.n_bg, o.seed,
                                                   &samples);
    const AccuracyReport bci_report = assess_mask(bci_mask, geo, o.truth_path, o.truth_raster,
                                                  o.n_ec, o.n_bg, o.seed, &samples);
    std::cout << report_line("acmi", acmi_report) << "\n";
    std::cout << report_line("bci", bci_report) << "\n";
    if (!o.report_base.empty()) {
        json acmi_cfg = config;
        acmi_cfg["method"] = "acmi";
        json bci_cfg = config;
        bci_cfg["method"] = "bci";
        write_report_files(o.report_base + "_acmi", acmi_report, acmi_cfg, outputs);
        write_report_files(o.report_base + "_bci", bci_report, bci_cfg, outputs);
    }
}

// ---------------------------------------------------------------------------
// assess

struct AssessOptions {
    std::string mask_path;
    std::string truth_path;
    std::string truth_raster;
    std::string report_base;
    int n_ec = 300;
    int n_bg = 450;
    std::uint64_t seed = 0;
};

void cmd_assess(const AssessOptions& o, std::vector<fs::path>& outputs, int /*verbosity*/) {
    geotiff::GeoInfo geo;
    const BinaryMask mask = read_mask(o.mask_path, &geo);
    const AccuracyReport r = assess_mask(mask, geo, o.truth_path, o.truth_raster, o.n_ec,
                                         o.n_bg, o.seed, nullptr);

    json config = {
        {"command", "assess"},
        {"mask", {{"path", o.mask_path}, {"fnv1a64", fnv1a64_hex(o.mask_path)}}},
        {"sampling", {{"n_ec", o.n_ec}, {"n_bg", o.n_bg}, {"seed", o.seed}}},
        {"version", kVersion},
    };
    const std::string& truth = o.truth_path.empty() ? o.truth_raster : o.truth_path;
    config["truth"] = {{"path", truth}, {"fnv1a64", fnv1a64_hex(truth)}};

    std::cout << report_line("assess", r) << "\n";
    write_report_files(o.report_base, r, config, outputs);
}

// ---------------------------------------------------------------------------
// stats

struct StatsOptions {
    std::string samples_path;
    std::string out_base;
};

std::vector<ClassSampleSet> read_samples_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    std::vector<ClassSampleSet> sets;
    std::stringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 1 + kNumSemanticBands) {
            throw ConfigError("samples CSV line " + std::to_string(line_no) +
                              ": expected class plus 6 reflectance columns");
        }
        if (line_no == 1) {
            // Header row: the first reflectance column is not numeric.
            char* end = nullptr;
            std::strtod(fields[1].c_str(), &end);
            if (end == fields[1].c_str()) continue;
        }
        Spectrum6 s;
        for (int b = 0; b < kNumSemanticBands; ++b) {
            s(b) = parse_double(fields[static_cast<std::size_t>(b) + 1],
                                "samples CSV reflectance");
        }
        auto hit = std::find_if(sets.begin(), sets.end(), [&](const ClassSampleSet& c) {
            return c.class_name == fields[0];
        });
        if (hit == sets.end()) {
            sets.push_back({fields[0], {s}});
        } else {
            hit->spectra.push_back(s);
        }
    }
    if (sets.empty()) throw ConfigError("samples CSV holds no spectra");
    return sets;
}

const char* kBandNames[kNumSemanticBands] = {"blue", "green", "red", "nir", "swir1", "swir2"};

void cmd_stats(const StatsOptions& o, std::vector<fs::path>& outputs, int /*verbosity*/) {
    const std::vector<ClassSampleSet> sets = read_samples_csv(o.samples_path);
    std::vector<ClassStats> stats;
    stats.reserve(sets.size());
    for (const ClassSampleSet& s : sets) stats.push_back(class_stats(s));

    std::string table = "class,band,min,p25,p50,p75,max,mean,n_samples\n";
    for (const ClassStats& s : stats) {
        for (int b = 0; b < kNumSemanticBands; ++b) {
            table += csv_escape(s.class_name);
            table += std::string(",") + kBandNames[b];
            table += "," + fmt("%.6f", s.min(b));
            table += "," + fmt("%.6f", s.p25(b));
            table += "," + fmt("%.6f", s.p50(b));
            table += "," + fmt("%.6f", s.p75(b));
            table += "," + fmt("%.6f", s.max(b));
            table += "," + fmt("%.6f", s.mean(b));
            table += "," + std::to_string(s.n_samples) + "\n";
        }
    }
    const std::string stats_path = o.out_base + "_stats.csv";
    outputs.push_back(stats_path);
    write_text_file(stats_path, table);

    std::string jm = "class";
    for (const ClassStats& s : stats) jm += "," + csv_escape(s.class_name);
    jm += "\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
        jm += csv_escape(stats[i].class_name);
        for (std::size_t j = 0; j < stats.size(); ++j) {
            double v = 0.0;
            if (i != j) {
                bool regularized = false;
                v = jm_separability(stats[i], stats[j], &regularized);
                if (regularized && j > i) {
                    std::cerr << "note: regularized covariance for pair "
                              << stats[i].class_name << "," << stats[j].class_name << "\n";
                }
            }
            jm += "," + fmt("%.6f", v);
        }
        jm += "\n";
    }
    const std::string jm_path = o.out_base + "_jm.csv";
    outputs.push_back(jm_path);
    write_text_file(jm_path, jm);

    std::cout << "classes=" << stats.size() << " -> " << stats_path << " " << jm_path << "\n";
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
    std::string layout_path;
    std::string out_scene;
    std::string out_truth;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

void cmd_synth(const SynthOptions& o, std::vector<fs::path>& outputs, int /*verbosity*/) {
    std::vector<ClassSpectrum> spectra;
    SceneLayout layout = parse_layout_json(read_text_file(o.layout_path), &spectra);
    if (o.seed_opt->count() > 0) layout.rng_seed = o.seed;

    const SynthResult result = generate_scene(layout, spectra);
    outputs.push_back(o.out_scene);
    geotiff::write_f32(o.out_scene, result.scene.bands, scene_geo(result.scene));
    if (!o.out_truth.empty()) {
        outputs.push_back(o.out_truth);
        write_mask(result.ground_truth, o.out_truth, scene_geo(result.scene));
    }
    std::cout << "wrote " << o.out_scene << " (" << layout.height << "x" << layout.width
              << ", 6 bands, seed=" << layout.rng_seed << ")"
              << (o.out_truth.empty() ? "" : " truth=" + o.out_truth) << "\n";
}

void remove_partial_outputs(const std::vector<fs::path>& outputs) {
    for (const fs::path& p : outputs) {
        std::error_code ec;
        fs::remove(p, ec);
    }
}

}  // namespace

int run(const std::vector<std::string>& args) {
    std::vector<fs::path> outputs;
    try {
        CLI::App app{"Maps exposed coal in multispectral surface-reflectance imagery"};
        app.set_version_flag("--version", std::string("coalmap ") + kVersion);
        int verbosity = 0;
        app.add_flag("-v,--verbose", verbosity, "Progress notes on stderr");
        app.require_subcommand(1);

        ClassifyOptions classify_opts;
        CLI::App* classify_cmd =
            app.add_subcommand("classify", "Classify a scene into an EC mask");
        add_scene_options(classify_cmd, classify_opts.scene);
        classify_cmd->add_option("--out", classify_opts.out, "Output mask GeoTIFF")->required();
        classify_cmd->add_option("--index", classify_opts.index, "Index to apply: acmi or bci")
            ->check(CLI::IsMember({"acmi", "bci"}));
        classify_opts.threshold_opt = classify_cmd->add_option(
            "--threshold", classify_opts.threshold, "EC decision threshold (default 0)");
        classify_cmd->add_option("--params", classify_opts.params_path,
                                 "JSON file overriding index parameters");
        classify_cmd->add_option("--emit-index", classify_opts.emit_index,
                                 "Also write the raw index raster (float32)");
        classify_cmd->add_flag("--no-median-filter", classify_opts.no_median,
                               "Skip the 3x3 median post-filter");

        CompareOptions compare_opts;
        CLI::App* compare_cmd =
            app.add_subcommand("compare", "Run ACMI and BCI side by side");
        add_scene_options(compare_cmd, compare_opts.scene);
        compare_cmd->add_option("--out-acmi", compare_opts.out_acmi, "ACMI mask GeoTIFF")
            ->required();
        compare_cmd->add_option("--out-bci", compare_opts.out_bci, "BCI mask GeoTIFF")
            ->required();
        compare_cmd->add_option("--out-diff", compare_opts.out_diff,
                                "Agreement raster (0/1 agree, 2 ACMI-only, 3 BCI-only)");
        compare_opts.threshold_opt = compare_cmd->add_option(
            "--threshold", compare_opts.threshold, "ACMI decision threshold (default 0)");
        compare_cmd->add_option("--params", compare_opts.params_path,
                                "JSON file overriding ACMI parameters");
        compare_cmd->add_flag("--no-median-filter", compare_opts.no_median,
                              "Skip the 3x3 median post-filter (both methods)");
        CLI::Option* cmp_truth = compare_cmd->add_option(
            "--truth", compare_opts.truth_path, "Reference EC polygons (GeoJSON or pixel JSON)");
        CLI::Option* cmp_truth_raster = compare_cmd->add_option(
            "--truth-raster", compare_opts.truth_raster, "Ground-truth mask raster");
        cmp_truth->excludes(cmp_truth_raster);
        compare_cmd->add_option("--report", compare_opts.report_base,
                                "Report base path; writes <base>_{acmi,bci}.{csv,json}");
        compare_cmd->add_option("--n-ec", compare_opts.n_ec, "EC samples (default 300)");
        compare_cmd->add_option("--n-bg", compare_opts.n_bg, "Background samples (default 450)");
        compare_cmd->add_option("--seed", compare_opts.seed, "Sampling seed");

        AssessOptions assess_opts;
        CLI::App* assess_cmd =
            app.add_subcommand("assess", "Score a mask against reference truth");
        assess_cmd->add_option("--mask", assess_opts.mask_path, "Mask GeoTIFF to score")
            ->required();
        CLI::Option* truth_opt = assess_cmd->add_option(
            "--truth", assess_opts.truth_path, "Reference EC polygons (GeoJSON or pixel JSON)");
        CLI::Option* truth_raster_opt = assess_cmd->add_option(
            "--truth-raster", assess_opts.truth_raster, "Ground-truth mask raster");
        truth_opt->excludes(truth_raster_opt);
        assess_cmd->add_option("--report", assess_opts.report_base,
                               "Report base path; writes <base>.csv and <base>.json")
            ->required();
        assess_cmd->add_option("--n-ec", assess_opts.n_ec, "EC samples (default 300)");
        assess_cmd->add_option("--n-bg", assess_opts.n_bg, "Background samples (default 450)");
        assess_cmd->add_option("--seed", assess_opts.seed, "Sampling seed");

        StatsOptions stats_opts;
        CLI::App* stats_cmd = app.add_subcommand(
            "stats", "Class spectral statistics and JM separability from a CSV");
        stats_cmd->add_option("--samples", stats_opts.samples_path,
                              "CSV rows: class,blue,green,red,nir,swir1,swir2")
            ->required();
        stats_cmd->add_option("--out", stats_opts.out_base,
                              "Output base path; writes <base>_stats.csv and <base>_jm.csv")
            ->required();

        SynthOptions synth_opts;
        CLI::App* synth_cmd =
            app.add_subcommand("synth", "Generate a synthetic scene with ground truth");
        synth_cmd->add_option("--layout", synth_opts.layout_path, "Scene layout JSON")
            ->required();
        synth_cmd->add_option("--out", synth_opts.out_scene, "Output scene GeoTIFF (float32)")
            ->required();
        synth_cmd->add_option("--truth", synth_opts.out_truth, "Output ground-truth mask");
        synth_opts.seed_opt =
            synth_cmd->add_option("--seed", synth_opts.seed, "Overrides the layout seed");

        std::vector<const char*> argv;
        argv.push_back("coalmap");
        for (const std::string& a : args) argv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForVersion& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            std::cerr << "error: BAD_CONFIG: " << e.what() << "\n";
            return kExitBadConfig;
        }

        if (assess_cmd->parsed() &&
            assess_opts.truth_path.empty() && assess_opts.truth_raster.empty()) {
            throw ConfigError("assess needs --truth or --truth-raster");
        }

        if (classify_cmd->parsed()) cmd_classify(classify_opts, outputs, verbosity);
        else if (compare_cmd->parsed()) cmd_compare(compare_opts, outputs, verbosity);
        else if (assess_cmd->parsed()) cmd_assess(assess_opts, outputs, verbosity);
        else if (stats_cmd->parsed()) cmd_stats(stats_opts, outputs, verbosity);
        else if (synth_cmd->parsed()) cmd_synth(synth_opts, outputs, verbosity);
        return kExitOk;
    } catch (const ConfigError& e) {
        remove_partial_outputs(outputs);
        std::cerr << "error: BAD_CONFIG: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const IoError& e) {
        remove_partial_outputs(outputs);
        std::cerr << "error: IO_FAILURE: " << e.what() << "\n";
        return kExitIoFailure;
    } catch (const DataError& e) {
        remove_partial_outputs(outputs);
        std::cerr << "error: DATA_INVARIANT: " << e.what() << "\n";
        return kExitDataInvariant;
    } catch (const std::exception& e) {
        remove_partial_outputs(outputs);
        std::cerr << "error: INTERNAL: " << e.what() << "\n";
        return kExitDataInvariant;
    }
}

int main(int argc, char** argv) {
    return run(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace coalmap::cli
