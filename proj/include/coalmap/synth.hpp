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

#ifndef COALMAP_SYNTH_HPP
#define COALMAP_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coalmap/grid.hpp"
#include "coalmap/scene.hpp"
#include "coalmap/spectral_stats.hpp"

namespace coalmap {

/// Gaussian band model of one land-cover class. Preset means are chosen
/// so the class decision under the ACMI and BCI rules is provable by
/// substituting the mean, and mean +/- 3*stddev stays inside [0, 1].
struct ClassSpectrum {
    std::string class_name;
    Spectrum6 mean;
    Spectrum6 stddev;
    bool is_coal = false;  // drives the ground-truth label

    void validate() const;
};

/// Built-in class models: ec, ec_swir_down (EC with SWIR1 > SWIR2, the
/// spectral shape the BCI chain cannot match), water, vegetation,
/// bright_soil, dark_soil, bright_bus, dark_bus, red_bus.
const std::vector<ClassSpectrum>& builtin_spectra();
const ClassSpectrum& builtin_spectrum(const std::string& name);

/// Axis-aligned rectangle in pixel units.
struct RegionRect {
    Eigen::Index x = 0, y = 0, w = 0, h = 0;
    std::string class_name;
};

/// Rectangular regions that must tile the raster exactly with no overlap.
struct SceneLayout {
    Eigen::Index width = 0, height = 0;
    std::vector<RegionRect> regions;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Scene plus ground truth: every pixel draws per-band from the truncated
/// (clamped to [0,1]) Gaussian of its region's class; the truth mask is
/// EC exactly over coal-class regions. Bit-identical for identical
/// (layout, spectra, seed). Throws DataError on unknown class names or an
/// invalid layout.
struct SynthResult {
    ReflectanceScene scene;
    BinaryMask ground_truth;
};

SynthResult generate_scene(const SceneLayout& layout,
                           const std::vector<ClassSpectrum>& spectra);

/// Layout JSON:
///   {"width":W, "height":H, "seed":S,
///    "regions":[{"x":..,"y":..,"w":..,"h":..,"class":"ec"}, ...],
///    "spectra":[{"class":"...","mean":[6],"stddev":[6],"is_coal":bool}, ...]}
/// The optional spectra array extends/overrides the built-ins.
SceneLayout parse_layout_json(const std::string& text, std::vector<ClassSpectrum>* spectra_out);

}  // namespace coalmap

#endif  // COALMAP_SYNTH_HPP
