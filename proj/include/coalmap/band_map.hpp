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

#ifndef COALMAP_BAND_MAP_HPP
#define COALMAP_BAND_MAP_HPP

#include <array>
#include <optional>
#include <string>

namespace coalmap {

/// The six reflective bands the indices consume.
enum class SemanticBand : int {
    Blue = 0,
    Green = 1,
    Red = 2,
    Nir = 3,
    Swir1 = 4,
    Swir2 = 5,
};

inline constexpr int kNumSemanticBands = 6;

const char* to_string(SemanticBand b);

enum class Sensor {
    Tm,
    EtmPlus,
    Oli,
    Custom,
};

/// Maps each semantic band to a 1-based position in the assembled band
/// stack. Presets follow the standard Landsat band numbering, so they
/// expect the stack to be the full band sequence of the product.
struct BandMap {
    Sensor sensor = Sensor::Custom;
    /// 1-based stack positions indexed by SemanticBand; 0 = unassigned.
    std::array<int, kNumSemanticBands> assignments{};

    /// blue,green,red,NIR,SWIR1,SWIR2 -> 1,2,3,4,5,7
    static BandMap tm();
    /// Same layout as TM.
    static BandMap etm_plus();
    /// blue,green,red,NIR,SWIR1,SWIR2 -> 2,3,4,5,6,7
    static BandMap oli();
    /// Explicit 1-based assignments in semantic order.
    static BandMap custom(const std::array<int, kNumSemanticBands>& assignments);

    int source_band(SemanticBand b) const {
        return assignments[static_cast<int>(b)];
    }

    /// Throws DataError unless the mapping is total and injective over the
    /// six semantic bands and every index fits in [1, stack_size]
    /// (stack_size < 0 skips the range check).
    void validate(int stack_size = -1) const;
};

/// Affine DN-to-reflectance conversion plus the integer nodata sentinel.
/// reflectance = DN * scale + offset. A disengaged nodata_dn means no DN
/// sentinel applies (NaN samples are still nodata).
struct ScaleOffset {
    double scale = 2.75e-5;
    double offset = -0.2;
    std::optional<double> nodata_dn = 0.0;

    static ScaleOffset landsat_l2sp() { return {}; }
    static ScaleOffset identity() { return {1.0, 0.0, std::nullopt}; }

    void validate() const;

    /// Inverse of the affine map; computed in double.
    double to_dn(double reflectance) const { return (reflectance - offset) / scale; }
};

/// Reflectance outside this range is physically implausible and flagged
/// nodata on load (Collection-2 products legitimately carry slight
/// negatives and values above 1).
inline constexpr float kReflectanceMin = -0.2f;
inline constexpr float kReflectanceMax = 1.6f;

}  // namespace coalmap

#endif  // COALMAP_BAND_MAP_HPP
