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

#ifndef COALMAP_ASSESSMENT_HPP
#define COALMAP_ASSESSMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coalmap/grid.hpp"
#include "coalmap/scene.hpp"

namespace coalmap {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Closed simple ring, stored without the repeated closing vertex.
using Ring = std::vector<Point2>;

enum class CoordinateSpace { Pixel, Geo };

/// Reference EC polygons. In pixel space, coordinates are fractional
/// pixel units with (0,0) at the top-left corner of pixel (0,0), so the
/// center of pixel (col,row) is (col+0.5, row+0.5). Geo-space rings are
/// converted through a scene geo transform before sampling.
struct PolygonSet {
    std::vector<Ring> polygons;
    CoordinateSpace coordinate_space = CoordinateSpace::Pixel;

    /// Ring validity: >= 3 distinct vertices, simple. Throws DataError.
    void validate() const;

    /// Returns a pixel-space copy, mapping geo coordinates through the
    /// inverse of gt. No-op for pixel-space sets.
    PolygonSet to_pixel_space(const GeoTransform& gt) const;
};

enum class TruthLabel : std::uint8_t { Ec = 1, Background = 0 };

struct SamplePoint {
    Eigen::Index col = 0;
    Eigen::Index row = 0;
    TruthLabel truth = TruthLabel::Background;
};

/// Even-odd ray-casting membership. Boundary points (on an edge or
/// vertex) are outside. Throws DataError on degenerate rings.
bool point_in_polygon(const Point2& p, const Ring& ring);

/// True if p lies exactly on some edge of the ring.
bool point_on_boundary(const Point2& p, const Ring& ring);

/// Per-pixel stratum of the sampling design.
enum class PixelStratum : std::uint8_t {
    Interior,   // strictly inside some polygon
    Exterior,   // strictly outside all polygons
    Boundary,   // pixel center on a ring boundary: excluded from both strata
};

PixelStratum classify_pixel(Eigen::Index col, Eigen::Index row, const PolygonSet& polygons);

/// Draws n_ec EC points strictly inside the polygons and n_bg background
/// points strictly outside, without replacement, reproducibly for a
/// fixed seed. Boundary pixels belong to neither stratum. Throws
/// DataError when a stratum has too few pixels.
std::vector<SamplePoint> stratified_sample(Eigen::Index width, Eigen::Index height,
                                           const PolygonSet& polygons,
                                           int n_ec = 300, int n_bg = 450,
                                           std::uint64_t rng_seed = 0);

/// Binary confusion counts. Samples that fall on mask NODATA are not
/// counted in the matrix; they are tallied separately.
struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;
    std::int64_t nodata_skipped = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
};

/// Scores mask predictions at the sample points. Throws DataError on an
/// out-of-bounds sample.
ConfusionMatrix evaluate(const BinaryMask& mask, const std::vector<SamplePoint>& samples);

/// Full-raster variant: every pixel where both masks carry a class is
/// scored, truth EC = positive.
ConfusionMatrix evaluate_against_truth(const BinaryMask& mask, const BinaryMask& truth);

/// UA/PA/OA as percentages, F1 as a fraction. UA is undefined when no
/// pixel was predicted EC (ua_defined = false, ua = 0); F1 is 0 whenever
/// PA is 0 or UA is undefined.
struct AccuracyReport {
    double ua = 0.0;   // percent
    double pa = 0.0;   // percent
    double oa = 0.0;   // percent
    double f1 = 0.0;   // fraction in [0, 1]
    bool ua_defined = true;
    ConfusionMatrix matrix;
};

/// Computes the report. Requires tp+fn > 0 (PA defined) and a nonzero
/// total; throws DataError otherwise.
AccuracyReport metrics(const ConfusionMatrix& m);

}  // namespace coalmap

#endif  // COALMAP_ASSESSMENT_HPP
