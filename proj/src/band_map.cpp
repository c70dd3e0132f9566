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

#include "coalmap/band_map.hpp"

#include <cmath>
#include <set>
#include <string>

#include "coalmap/errors.hpp"

namespace coalmap {

const char* to_string(SemanticBand b) {
    switch (b) {
        case SemanticBand::Blue: return "blue";
        case SemanticBand::Green: return "green";
        case SemanticBand::Red: return "red";
        case SemanticBand::Nir: return "nir";
        case SemanticBand::Swir1: return "swir1";
        case SemanticBand::Swir2: return "swir2";
    }
    return "?";
}

BandMap BandMap::tm() {
    BandMap m;
    m.sensor = Sensor::Tm;
    m.assignments = {1, 2, 3, 4, 5, 7};
    return m;
}

BandMap BandMap::etm_plus() {
    BandMap m = tm();
    m.sensor = Sensor::EtmPlus;
    return m;
}

BandMap BandMap::oli() {
    BandMap m;
    m.sensor = Sensor::Oli;
    m.assignments = {2, 3, 4, 5, 6, 7};
    return m;
}

BandMap BandMap::custom(const std::array<int, kNumSemanticBands>& assignments) {
    BandMap m;
    m.sensor = Sensor::Custom;
    m.assignments = assignments;
    return m;
}

void BandMap::validate(int stack_size) const {
    std::set<int> seen;
    for (int i = 0; i < kNumSemanticBands; ++i) {
        const int src = assignments[i];
        if (src < 1) {
            throw DataError(std::string("band map does not resolve semantic band '") +
                            to_string(static_cast<SemanticBand>(i)) + "'");
        }
        if (!seen.insert(src).second) {
            throw DataError("band map assignments are not injective (source band " +
                            std::to_string(src) + " used twice)");
        }
        if (stack_size >= 0 && src > stack_size) {
            throw DataError("band map references source band " + std::to_string(src) +
                            " but the stack has only " + std::to_string(stack_size) + " bands");
        }
    }
}

void ScaleOffset::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DataError("scale must be positive and finite");
    }
    if (!std::isfinite(offset)) {
        throw DataError("offset must be finite");
    }
}

}  // namespace coalmap
