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

#include "coalmap/assessment.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "coalmap/errors.hpp"
#include "coalmap/rng.hpp"

namespace coalmap {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
    if (cross(a, b, p) != 0.0) return false;
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
           p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

// Whether segments (p1,p2) and (q1,q2) share any point.
bool segments_touch(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    return (d1 == 0 && on_segment(p1, q1, q2)) || (d2 == 0 && on_segment(p2, q1, q2)) ||
           (d3 == 0 && on_segment(q1, p1, p2)) || (d4 == 0 && on_segment(q2, p1, p2));
}

void validate_ring(const Ring& ring) {
    if (ring.size() < 3) throw DataError("polygon ring needs at least 3 vertices");
    const std::size_t n = ring.size();
    for (const Point2& v : ring) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
            throw DataError("polygon vertex is not finite");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = ring[i];
        const Point2& b = ring[(i + 1) % n];
        if (a.x == b.x && a.y == b.y) throw DataError("polygon ring has a zero-length edge");
    }
    // Simplicity: non-adjacent edges must not meet. Adjacent edges share a
    // vertex by construction and are skipped.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_touch(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) {
                throw DataError("polygon ring is self-intersecting");
            }
        }
    }
}

}  // namespace

void PolygonSet::validate() const {
    if (polygons.empty()) throw DataError("polygon set is empty");
    for (const Ring& ring : polygons) validate_ring(ring);
}

PolygonSet PolygonSet::to_pixel_space(const GeoTransform& gt) const {
    if (coordinate_space == CoordinateSpace::Pixel) return *this;
    const GeoTransform inv = invert_geo_transform(gt);
    PolygonSet out;
    out.coordinate_space = CoordinateSpace::Pixel;
    out.polygons.reserve(polygons.size());
    for (const Ring& ring : polygons) {
        Ring mapped;
        mapped.reserve(ring.size());
        for (const Point2& v : ring) {
            double px = 0.0;
            double py = 0.0;
            apply_geo_transform(inv, v.x, v.y, px, py);
            mapped.push_back({px, py});
        }
        out.polygons.push_back(std::move(mapped));
    }
    return out;
}

bool point_on_boundary(const Point2& p, const Ring& ring) {
    if (ring.size() < 3) throw DataError("degenerate polygon ring");
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (on_segment(p, ring[i], ring[(i + 1) % n])) return true;
    }
    return false;
}

bool point_in_polygon(const Point2& p, const Ring& ring) {
    if (ring.size() < 3) throw DataError("degenerate polygon ring");
    if (point_on_boundary(p, ring)) return false;
    // Even-odd rule with a half-open edge convention so vertices on the
    // test ray are counted once.
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2& a = ring[i];
        const Point2& b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

PixelStratum classify_pixel(Eigen::Index col, Eigen::Index row, const PolygonSet& polygons) {
    if (polygons.coordinate_space != CoordinateSpace::Pixel) {
        throw DataError("pixel classification requires pixel-space polygons");
    }
    const Point2 center{static_cast<double>(col) + 0.5, static_cast<double>(row) + 0.5};
    for (const Ring& ring : polygons.polygons) {
        if (point_on_boundary(center, ring)) return PixelStratum::Boundary;
    }
    for (const Ring& ring : polygons.polygons) {
        if (point_in_polygon(center, ring)) return PixelStratum::Interior;
    }
    return PixelStratum::Exterior;
}

std::vector<SamplePoint> stratified_sample(Eigen::Index width, Eigen::Index height,
                                           const PolygonSet& polygons, int n_ec, int n_bg,
                                           std::uint64_t rng_seed) {
    if (width <= 0 || height <= 0) throw DataError("raster dimensions must be positive");
    if (n_ec < 0 || n_bg < 0) throw DataError("sample counts must be non-negative");
    polygons.validate();
    if (polygons.coordinate_space != CoordinateSpace::Pixel) {
        throw DataError("stratified sampling requires pixel-space polygons");
    }

    std::vector<std::int64_t> interior;
    std::vector<std::int64_t> exterior;
    for (Eigen::Index row = 0; row < height; ++row) {
        for (Eigen::Index col = 0; col < width; ++col) {
            switch (classify_pixel(col, row, polygons)) {
                case PixelStratum::Interior:
                    interior.push_back(row * width + col);
                    break;
                case PixelStratum::Exterior:
                    exterior.push_back(row * width + col);
                    break;
                case PixelStratum::Boundary:
                    break;
            }
        }
    }
    if (std::cmp_less(interior.size(), n_ec)) {
        throw DataError("not enough interior pixels for the EC stratum");
    }
    if (std::cmp_less(exterior.size(), n_bg)) {
        throw DataError("not enough exterior pixels for the background stratum");
    }

    Rng rng(rng_seed);
    auto draw = [&rng](std::vector<std::int64_t>& pool, int n) {
        for (int i = 0; i < n; ++i) {
            const std::uint64_t j =
                static_cast<std::uint64_t>(i) + rng.bounded(pool.size() - static_cast<std::size_t>(i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(n));
    };
    // EC stratum first, then background, from one RNG stream.
    draw(interior, n_ec);
    draw(exterior, n_bg);

    std::vector<SamplePoint> samples;
    samples.reserve(static_cast<std::size_t>(n_ec + n_bg));
    for (std::int64_t idx : interior) {
        samples.push_back({idx % width, idx / width, TruthLabel::Ec});
    }
    for (std::int64_t idx : exterior) {
        samples.push_back({idx % width, idx / width, TruthLabel::Background});
    }
    return samples;
}

ConfusionMatrix evaluate(const BinaryMask& mask, const std::vector<SamplePoint>& samples) {
    ConfusionMatrix m;
    for (const SamplePoint& s : samples) {
        if (s.col < 0 || s.col >= mask.width() || s.row < 0 || s.row >= mask.height()) {
            throw DataError("sample point outside the mask");
        }
        const std::uint8_t v = mask.values(s.row, s.col);
        if (v == static_cast<std::uint8_t>(MaskValue::Nodata)) {
            ++m.nodata_skipped;
            continue;
        }
        const bool predicted = v == static_cast<std::uint8_t>(MaskValue::Ec);
        const bool truth = s.truth == TruthLabel::Ec;
        if (truth && predicted) ++m.tp;
        else if (truth && !predicted) ++m.fn;
        else if (!truth && predicted) ++m.fp;
        else ++m.tn;
    }
    return m;
}

ConfusionMatrix evaluate_against_truth(const BinaryMask& mask, const BinaryMask& truth) {
    if (mask.height() != truth.height() || mask.width() != truth.width()) {
        throw DataError("mask and truth dimensions differ");
    }
    ConfusionMatrix m;
    for (Eigen::Index row = 0; row < mask.height(); ++row) {
        for (Eigen::Index col = 0; col < mask.width(); ++col) {
            const std::uint8_t pv = mask.values(row, col);
            const std::uint8_t tv = truth.values(row, col);
            if (pv == static_cast<std::uint8_t>(MaskValue::Nodata) ||
                tv == static_cast<std::uint8_t>(MaskValue::Nodata)) {
                ++m.nodata_skipped;
                continue;
            }
            const bool predicted = pv == static_cast<std::uint8_t>(MaskValue::Ec);
            const bool is_ec = tv == static_cast<std::uint8_t>(MaskValue::Ec);
            if (is_ec && predicted) ++m.tp;
            else if (is_ec && !predicted) ++m.fn;
            else if (!is_ec && predicted) ++m.fp;
            else ++m.tn;
        }
    }
    return m;
}

AccuracyReport metrics(const ConfusionMatrix& m) {
    if (m.total() == 0) throw DataError("confusion matrix is empty");
    if (m.tp + m.fn == 0) throw DataError("no EC reference samples: PA undefined");

    AccuracyReport r;
    r.matrix = m;
    const double tp = static_cast<double>(m.tp);
    const double pa_frac = tp / static_cast<double>(m.tp + m.fn);
    double ua_frac = 0.0;
    r.ua_defined = (m.tp + m.fp) > 0;
    if (r.ua_defined) ua_frac = tp / static_cast<double>(m.tp + m.fp);

    r.pa = 100.0 * pa_frac;
    r.ua = 100.0 * ua_frac;
    r.oa = 100.0 * static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
    if (r.ua_defined && ua_frac + pa_frac > 0.0) {
        r.f1 = 2.0 * ua_frac * pa_frac / (ua_frac + pa_frac);
    }
    return r;
}

}  // namespace coalmap
