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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coalmap/cli.hpp"
#include "coalmap/geotiff.hpp"
#include "coalmap/raster_io.hpp"
#include "test_util.hpp"

using namespace coalmap;
using coalmap::testutil::TempDir;
using coalmap::testutil::slurp;
using coalmap::testutil::write_file;
namespace fs = std::filesystem;

namespace {

// 48x48 scene: coal square top-left, soil top-right, water across the
// bottom half. Stddevs come from the built-in class models.
const char* kLayout48 = R"({
    "width": 48, "height": 48, "seed": 31,
    "regions": [
        {"x": 0,  "y": 0,  "w": 24, "h": 24, "class": "ec"},
        {"x": 24, "y": 0,  "w": 24, "h": 24, "class": "dark_soil"},
        {"x": 0,  "y": 24, "w": 48, "h": 24, "class": "water"}
    ]
})";

// Same footprint but with the coal variant whose SWIR1 exceeds SWIR2.
const char* kLayoutSwirDown = R"({
    "width": 48, "height": 48, "seed": 31,
    "regions": [
        {"x": 0,  "y": 0,  "w": 24, "h": 24, "class": "ec_swir_down"},
        {"x": 24, "y": 0,  "w": 24, "h": 24, "class": "dark_soil"},
        {"x": 0,  "y": 24, "w": 48, "h": 24, "class": "water"}
    ]
})";

int synth_scene(const TempDir& td, const char* layout_text, const std::string& scene,
                const std::string& truth) {
    write_file(td.file("layout.json"), layout_text);
    std::vector<std::string> args = {"synth", "--layout", td.file("layout.json"),
                                     "--out", scene};
    if (!truth.empty()) {
        args.push_back("--truth");
        args.push_back(truth);
    }
    return cli::run(args);
}

nlohmann::json read_json(const std::string& path) {
    return nlohmann::json::parse(slurp(path));
}

}  // namespace

TEST_CASE("synth, classify, assess round trip") {
    TempDir td;
    const std::string scene = td.file("scene.tif");
    const std::string truth = td.file("truth.tif");
    REQUIRE(synth_scene(td, kLayout48, scene, truth) == 0);
    REQUIRE(fs::exists(scene));
    REQUIRE(fs::exists(truth));

    const geotiff::FileInfo info = geotiff::probe(scene);
    CHECK(info.width == 48);
    CHECK(info.height == 48);
    CHECK(info.samples == 6);
    CHECK(info.type == geotiff::SampleType::Float32);

    const std::string mask_path = td.file("mask.tif");
    REQUIRE(cli::run({"classify", scene, "--out", mask_path}) == 0);
    const BinaryMask mask = read_mask(mask_path);
    CHECK(mask.count(MaskValue::Ec) > 500);  // 576-pixel coal square

    REQUIRE(cli::run({"assess", "--mask", mask_path, "--truth-raster", truth,
                      "--report", td.file("rep")}) == 0);
    REQUIRE(fs::exists(td.file("rep.json")));
    REQUIRE(fs::exists(td.file("rep.csv")));

    const nlohmann::json rep = read_json(td.file("rep.json"));
    CHECK(rep["metrics"]["f1_pct"].get<double>() > 90.0);
    CHECK(rep["metrics"]["oa_pct"].get<double>() > 95.0);
    CHECK(rep["matrix"]["tp"].get<long>() > 0);
    CHECK(rep["config"]["mask"]["path"].is_string());

    const std::string csv = slurp(td.file("rep.csv"));
    CHECK(csv.rfind("ua_pct,pa_pct,oa_pct,f1_pct,ua_defined,tp,fp,fn,tn,nodata_skipped,config",
                    0) == 0);
}

TEST_CASE("polygon sampling is reproducible byte for byte") {
    TempDir td;
    const std::string scene = td.file("scene.tif");
    REQUIRE(synth_scene(td, kLayout48, scene, "") == 0);
    const std::string mask_path = td.file("mask.tif");
    REQUIRE(cli::run({"classify", scene, "--out", mask_path}) == 0);

    // The coal square in pixel coordinates.
    write_file(td.file("truth.json"), R"({
        "coordinate_space": "pixel",
        "polygons": [[[0, 0], [24, 0], [24, 24], [0, 24]]]
    })");

    const std::vector<std::string> assess = {
        "assess", "--mask", mask_path, "--truth", td.file("truth.json"),
        "--n-ec", "60", "--n-bg", "90", "--seed", "42",
        "--report", td.file("rep")};
    REQUIRE(cli::run(assess) == 0);
    const std::string first_json = slurp(td.file("rep.json"));
    const std::string first_csv = slurp(td.file("rep.csv"));
    REQUIRE(cli::run(assess) == 0);
    CHECK(slurp(td.file("rep.json")) == first_json);
    CHECK(slurp(td.file("rep.csv")) == first_csv);

    const nlohmann::json rep = nlohmann::json::parse(first_json);
    CHECK(rep["matrix"]["tp"].get<long>() + rep["matrix"]["fn"].get<long>() == 60);
    CHECK(rep["config"]["sampling"]["seed"].get<long>() == 42);

    // A different seed draws different pixels.
    std::vector<std::string> reseeded = assess;
    reseeded[10] = "43";           // --seed value
    reseeded[12] = td.file("rep2");  // --report value
    REQUIRE(cli::run(reseeded) == 0);
    CHECK(read_json(td.file("rep2.json"))["config"]["sampling"]["seed"].get<long>() == 43);
}

TEST_CASE("compare separates the two indices on downward-swir coal") {
    TempDir td;
    const std::string scene = td.file("scene.tif");
    const std::string truth = td.file("truth.tif");
    REQUIRE(synth_scene(td, kLayoutSwirDown, scene, truth) == 0);

    REQUIRE(cli::run({"compare", scene, "--out-acmi", td.file("acmi.tif"),
                      "--out-bci", td.file("bci.tif"), "--out-diff", td.file("diff.tif"),
                      "--truth-raster", truth, "--report", td.file("cmp")}) == 0);

    const nlohmann::json acmi = read_json(td.file("cmp_acmi.json"));
    const nlohmann::json bci = read_json(td.file("cmp_bci.json"));
    CHECK(acmi["metrics"]["pa_pct"].get<double>() > 90.0);
    CHECK(bci["metrics"]["pa_pct"].get<double>() < 1.0);
    CHECK(acmi["metrics"]["f1_pct"].get<double>() > 90.0);

    // The chain index finds nothing here, so its user's accuracy is
    // undefined and serialized as null.
    if (bci["matrix"]["tp"].get<long>() + bci["matrix"]["fp"].get<long>() == 0) {
        CHECK(bci["metrics"]["ua_pct"].is_null());
        CHECK_FALSE(bci["metrics"]["ua_defined"].get<bool>());
    }

    // Agreement raster: 0/1 both agree, 2 ACMI only, 3 BCI only, 255 nodata.
    const geotiff::Image diff = geotiff::read(td.file("diff.tif"));
    REQUIRE(diff.bands.size() == 1);
    int acmi_only = 0, bci_only = 0;
    for (Eigen::Index r = 0; r < diff.height; ++r) {
        for (Eigen::Index c = 0; c < diff.width; ++c) {
            const float v = diff.bands[0](r, c);
            REQUIRE((v == 0.0f || v == 1.0f || v == 2.0f || v == 3.0f || v == 255.0f));
            if (v == 2.0f) ++acmi_only;
            if (v == 3.0f) ++bci_only;
        }
    }
    CHECK(acmi_only > 400);  // most of the 576-pixel coal square
    CHECK(bci_only < 10);
}

TEST_CASE("classify options: emit-index, threshold, median toggle") {
    TempDir td;
    const std::string scene = td.file("scene.tif");
    REQUIRE(synth_scene(td, kLayout48, scene, "") == 0);

    REQUIRE(cli::run({"classify", scene, "--out", td.file("mask.tif"),
                      "--emit-index", td.file("acmi.tif"), "--no-median-filter"}) == 0);
    const geotiff::Image index = geotiff::read(td.file("acmi.tif"));
    REQUIRE(index.bands.size() == 1);
    CHECK(index.bands[0].block(4, 4, 16, 16).mean() > 0.04f);  // coal square core
    CHECK(index.bands[0](36, 24) == -1.0f);                    // water row, suppressed
    CHECK(index.geo.nodata_text.value_or("") == "nan");

    // An impossible threshold empties the mask.
    REQUIRE(cli::run({"classify", scene, "--out", td.file("none.tif"),
                      "--threshold", "10"}) == 0);
    CHECK(read_mask(td.file("none.tif")).count(MaskValue::Ec) == 0);

    // bci takes no ACMI-specific options.
    CHECK(cli::run({"classify", scene, "--out", td.file("x.tif"),
                    "--index", "bci", "--threshold", "0.1"}) == 2);
    CHECK(cli::run({"classify", scene, "--out", td.file("x.tif"),
                    "--index", "bci", "--emit-index", td.file("y.tif")}) == 2);
    REQUIRE(cli::run({"classify", scene, "--out", td.file("bci.tif"),
                      "--index", "bci"}) == 0);

    // Same command, same bytes: the writer embeds no timestamps.
    REQUIRE(cli::run({"classify", scene, "--out", td.file("again.tif")}) == 0);
    REQUIRE(cli::run({"classify", scene, "--out", td.file("again2.tif")}) == 0);
    CHECK(slurp(td.file("again.tif")) == slurp(td.file("again2.tif")));
}

TEST_CASE("acmi parameters load from a file") {
    TempDir td;
    const std::string scene = td.file("scene.tif");
    REQUIRE(synth_scene(td, kLayout48, scene, "") == 0);

    // Raising the classification threshold beyond the coal signal empties
    // the mask; the file value is used when no flag overrides it.
    write_file(td.file("params.json"), R"({"classify_threshold": 10.0})");
    REQUIRE(cli::run({"classify", scene, "--out", td.file("a.tif"),
                      "--params", td.file("params.json")}) == 0);
    CHECK(read_mask(td.file("a.tif")).count(MaskValue::Ec) == 0);

    // An explicit --threshold beats the file.
    REQUIRE(cli::run({"classify", scene, "--out", td.file("b.tif"),
                      "--params", td.file("params.json"), "--threshold", "0"}) == 0);
    CHECK(read_mask(td.file("b.tif")).count(MaskValue::Ec) > 500);

    write_file(td.file("bad.json"), R"({"classify_threshold": 0, "c_red": 1})");
    CHECK(cli::run({"classify", scene, "--out", td.file("c.tif"),
                    "--params", td.file("bad.json")}) == 2);
    write_file(td.file("neg.json"), R"({"bright_threshold": -1})");
    CHECK(cli::run({"classify", scene, "--out", td.file("c.tif"),
                    "--params", td.file("neg.json")}) == 2);
}

TEST_CASE("band order flags beat the config file") {
    TempDir td;
    const std::string scene = td.file("scene.tif");
    REQUIRE(synth_scene(td, kLayout48, scene, "") == 0);

    REQUIRE(cli::run({"classify", scene, "--out", td.file("plain.tif")}) == 0);

    // The config asks for a reversed band order; the flag restores the
    // true order and must win.
    write_file(td.file("cfg.json"), R"({"bands": [6, 5, 4, 3, 2, 1]})");
    REQUIRE(cli::run({"classify", scene, "--out", td.file("flagged.tif"),
                      "--config", td.file("cfg.json"), "--bands", "1,2,3,4,5,6"}) == 0);
    CHECK(slurp(td.file("flagged.tif")) == slurp(td.file("plain.tif")));

    REQUIRE(cli::run({"classify", scene, "--out", td.file("reversed.tif"),
                      "--config", td.file("cfg.json")}) == 0);
    CHECK(slurp(td.file("reversed.tif")) != slurp(td.file("plain.tif")));

    write_file(td.file("unknown.json"), R"({"bands": [1,2,3,4,5,6], "gain": 2})");
    CHECK(cli::run({"classify", scene, "--out", td.file("x.tif"),
                    "--config", td.file("unknown.json")}) == 2);
}

TEST_CASE("qa raster turns flagged pixels into nodata") {
    TempDir td;
    const std::string scene = td.file("scene.tif");
    REQUIRE(synth_scene(td, kLayout48, scene, "") == 0);

    // Cloud bit (3) over the top-left quadrant, clear elsewhere.
    GridF qa = GridF::Zero(48, 48);
    qa.block(0, 0, 24, 24).setConstant(8.0f);  // 1 << 3
    geotiff::write_f32(td.file("qa.tif"), {qa}, geotiff::GeoInfo{});

    REQUIRE(cli::run({"classify", scene, "--out", td.file("masked.tif"),
                      "--qa", td.file("qa.tif")}) == 0);
    const BinaryMask masked = read_mask(td.file("masked.tif"));
    CHECK(masked.count(MaskValue::Nodata) == 24 * 24);
    CHECK(masked.at(0, 0) == MaskValue::Nodata);
    CHECK(masked.at(30, 30) != MaskValue::Nodata);

    // Same raster read under different bits: value 8 has neither bit 1
    // nor bit 2 set, so nothing is masked.
    REQUIRE(cli::run({"classify", scene, "--out", td.file("open.tif"),
                      "--qa", td.file("qa.tif"), "--qa-bits", "1,2"}) == 0);
    CHECK(read_mask(td.file("open.tif")).count(MaskValue::Nodata) == 0);

    CHECK(cli::run({"classify", scene, "--out", td.file("x.tif"),
                    "--qa-bits", "1,2"}) == 2);  // bits without a raster
    CHECK(cli::run({"classify", scene, "--out", td.file("x.tif"),
                    "--qa", td.file("qa.tif"), "--qa-bits", "3"}) == 2);
    CHECK(cli::run({"classify", scene, "--out", td.file("x.tif"),
                    "--qa", td.file("qa.tif"), "--qa-bits", "3,3"}) == 2);
}

TEST_CASE("stats writes summaries and a jm matrix") {
    TempDir td;
    std::string csv = "class,blue,green,red,nir,swir1,swir2\n";
    for (int i = 0; i < 12; ++i) {
        const double d = 0.0005 * i;
        csv += "coal," + std::to_string(0.030 + d) + "," + std::to_string(0.035 + d) + "," +
               std::to_string(0.040 + d) + "," + std::to_string(0.050 + d) + "," +
               std::to_string(0.065 + d) + "," + std::to_string(0.080 + d) + "\n";
        csv += "soil," + std::to_string(0.040 + d) + "," + std::to_string(0.055 + d) + "," +
               std::to_string(0.065 + d) + "," + std::to_string(0.110 + d) + "," +
               std::to_string(0.130 + d) + "," + std::to_string(0.110 + d) + "\n";
    }
    write_file(td.file("samples.csv"), csv);

    REQUIRE(cli::run({"stats", "--samples", td.file("samples.csv"),
                      "--out", td.file("spectra")}) == 0);

    const std::string table = slurp(td.file("spectra_stats.csv"));
    CHECK(table.rfind("class,band,min,p25,p50,p75,max,mean,n_samples", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 1 + 2 * 6);
    CHECK(table.find("coal,blue,") != std::string::npos);
    CHECK(table.find("soil,swir2,") != std::string::npos);

    const std::string jm = slurp(td.file("spectra_jm.csv"));
    CHECK(std::count(jm.begin(), jm.end(), '\n') == 3);
    std::stringstream lines(jm);
    std::string header, row1, row2;
    std::getline(lines, header);
    std::getline(lines, row1);
    std::getline(lines, row2);
    CHECK(header == "class,coal,soil");
    CHECK(row1.rfind("coal,0.000000,", 0) == 0);
    const std::string cross = row1.substr(row1.rfind(',') + 1);
    CHECK(row2 == "soil," + cross + ",0.000000");  // symmetric
    CHECK(std::stod(cross) > 0.0);
    CHECK(std::stod(cross) <= 2.0);

    // One lone spectrum cannot give a covariance.
    write_file(td.file("lone.csv"), "a,0.1,0.1,0.1,0.1,0.1,0.1\n"
                                    "a,0.2,0.2,0.2,0.2,0.2,0.2\n"
                                    "b,0.3,0.3,0.3,0.3,0.3,0.3\n");
    CHECK(cli::run({"stats", "--samples", td.file("lone.csv"),
                    "--out", td.file("x")}) == 4);

    write_file(td.file("short.csv"), "a,0.1,0.2\n");
    CHECK(cli::run({"stats", "--samples", td.file("short.csv"),
                    "--out", td.file("x")}) == 2);
    write_file(td.file("word.csv"), "a,0.1,0.1,0.1,oops,0.1,0.1\n");
    CHECK(cli::run({"stats", "--samples", td.file("word.csv"),
                    "--out", td.file("x")}) == 2);
}

TEST_CASE("synth seeds and reruns") {
    TempDir td;
    write_file(td.file("layout.json"), kLayout48);

    REQUIRE(cli::run({"synth", "--layout", td.file("layout.json"),
                      "--out", td.file("a.tif")}) == 0);
    REQUIRE(cli::run({"synth", "--layout", td.file("layout.json"),
                      "--out", td.file("b.tif")}) == 0);
    CHECK(slurp(td.file("a.tif")) == slurp(td.file("b.tif")));

    REQUIRE(cli::run({"synth", "--layout", td.file("layout.json"),
                      "--out", td.file("c.tif"), "--seed", "99"}) == 0);
    CHECK(slurp(td.file("c.tif")) != slurp(td.file("a.tif")));

    write_file(td.file("broken.json"), R"({"width": 8})");
    CHECK(cli::run({"synth", "--layout", td.file("broken.json"),
                    "--out", td.file("d.tif")}) == 2);
    CHECK_FALSE(fs::exists(td.file("d.tif")));

    // Valid JSON, impossible tiling: caught at generation, exit code 4.
    write_file(td.file("gap.json"),
               R"({"width":8,"height":8,"regions":[{"x":0,"y":0,"w":4,"h":8,"class":"ec"}]})");
    CHECK(cli::run({"synth", "--layout", td.file("gap.json"),
                    "--out", td.file("e.tif")}) == 4);
    CHECK_FALSE(fs::exists(td.file("e.tif")));
}

TEST_CASE("failures remove partial outputs") {
    TempDir td;
    const std::string scene = td.file("scene.tif");
    REQUIRE(synth_scene(td, kLayout48, scene, "") == 0);

    // The masks are written before the truth raster is opened; the
    // missing file must roll them back.
    CHECK(cli::run({"compare", scene, "--out-acmi", td.file("acmi.tif"),
                    "--out-bci", td.file("bci.tif"),
                    "--truth-raster", td.file("absent.tif"),
                    "--report", td.file("cmp")}) == 3);
    CHECK_FALSE(fs::exists(td.file("acmi.tif")));
    CHECK_FALSE(fs::exists(td.file("bci.tif")));
    CHECK_FALSE(fs::exists(td.file("cmp_acmi.json")));
}

TEST_CASE("exit codes map error classes") {
    TempDir td;
    const std::string scene = td.file("scene.tif");
    REQUIRE(synth_scene(td, kLayout48, scene, "") == 0);

    CHECK(cli::run({"classify", td.file("missing.tif"), "--out", td.file("m.tif")}) == 3);
    CHECK(cli::run({"classify", scene, "--out", td.file("m.tif"), "--wat"}) == 2);
    CHECK(cli::run({"classify", scene}) == 2);                       // --out required
    CHECK(cli::run({"assess", "--mask", scene, "--report", td.file("r")}) == 2);
    CHECK(cli::run({}) == 2);                                        // no subcommand
    CHECK(cli::run({"classify", scene, "--out", td.file("m.tif"),
                    "--bands", "1,2,3,4,5,9"}) == 4);                // past the stack
    CHECK(cli::run({"classify", scene, "--out", td.file("m.tif"),
                    "--bands", "1,2,3"}) == 2);
    CHECK(cli::run({"classify", scene, "--out", td.file("m.tif"),
                    "--sensor", "aster"}) == 2);

    // A truth raster of mismatched size is a data error.
    write_file(td.file("layout_small.json"), R"({
        "width": 8, "height": 8, "seed": 1,
        "regions": [{"x":0,"y":0,"w":8,"h":8,"class":"ec"}]
    })");
    REQUIRE(cli::run({"synth", "--layout", td.file("layout_small.json"),
                      "--out", td.file("small.tif"), "--truth", td.file("small_truth.tif")}) == 0);
    REQUIRE(cli::run({"classify", scene, "--out", td.file("m.tif")}) == 0);
    CHECK(cli::run({"assess", "--mask", td.file("m.tif"),
                    "--truth-raster", td.file("small_truth.tif"),
                    "--report", td.file("r")}) == 4);
}

TEST_CASE("help and version exit cleanly") {
    CHECK(cli::run({"--version"}) == 0);
    CHECK(cli::run({"--help"}) == 0);
    CHECK(cli::run({"classify", "--help"}) == 0);
    CHECK(cli::run({"compare", "--help"}) == 0);
    CHECK(cli::run({"synth", "--help"}) == 0);
}
