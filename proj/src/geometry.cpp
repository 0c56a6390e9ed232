#include "apexmr/geometry.hpp"

#include <algorithm>
#include <limits>

namespace apexmr {

double distPointSegment(const Vec2 &p, const Vec2 &a, const Vec2 &b) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 <= 0.0) return (p - a).norm();
    double t = (p - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

namespace {

bool segmentsIntersect(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d) {
    const auto orient = [](const Vec2 &p, const Vec2 &q, const Vec2 &r) {
        const double v = (q - p).cross(r - p);
        if (v > 0) return 1;
        if (v < 0) return -1;
        return 0;
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    const auto onSeg = [](const Vec2 &p, const Vec2 &q, const Vec2 &r) {
        return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
               std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
    };
    if (o1 == 0 && onSeg(a, c, b)) return true;
    if (o2 == 0 && onSeg(a, d, b)) return true;
    if (o3 == 0 && onSeg(c, a, d)) return true;
    if (o4 == 0 && onSeg(c, b, d)) return true;
    return false;
}

}  // namespace

double distSegmentSegment(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d) {
    if (segmentsIntersect(a, b, c, d)) return 0.0;
    double best = distPointSegment(a, c, d);
    best = std::min(best, distPointSegment(b, c, d));
    best = std::min(best, distPointSegment(c, a, b));
    best = std::min(best, distPointSegment(d, a, b));
    return best;
}

bool pointInPolygon(const Vec2 &p, const std::vector<Vec2> &poly) {
    bool inside = false;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 &pi = poly[i], &pj = poly[j];
        if ((pi.y > p.y) != (pj.y > p.y)) {
            const double xint = pj.x + (pi.x - pj.x) * (p.y - pj.y) / (pi.y - pj.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

double distSegmentPolygon(const Vec2 &a, const Vec2 &b, const std::vector<Vec2> &poly) {
    if (pointInPolygon(a, poly) || pointInPolygon(b, poly)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        best = std::min(best, distSegmentSegment(a, b, poly[j], poly[i]));
        if (best == 0.0) return 0.0;
    }
    return best;
}

double distPolygonPolygon(const std::vector<Vec2> &p1, const std::vector<Vec2> &p2) {
    if (!p1.empty() && pointInPolygon(p1[0], p2)) return 0.0;
    if (!p2.empty() && pointInPolygon(p2[0], p1)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const size_t n = p1.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        best = std::min(best, distSegmentPolygon(p1[j], p1[i], p2));
        if (best == 0.0) return 0.0;
    }
    return best;
}

double geomDistance(const Geom &g1, const Geom &g2) {
    double d;
    if (g1.kind == Geom::Kind::Capsule && g2.kind == Geom::Kind::Capsule) {
        d = distSegmentSegment(g1.a, g1.b, g2.a, g2.b);
    } else if (g1.kind == Geom::Kind::Capsule) {
        d = distSegmentPolygon(g1.a, g1.b, g2.pts);
    } else if (g2.kind == Geom::Kind::Capsule) {
        d = distSegmentPolygon(g2.a, g2.b, g1.pts);
    } else {
        d = distPolygonPolygon(g1.pts, g2.pts);
    }
    return std::max(0.0, d - g1.r - g2.r);
}

BoundingCircle boundGeoms(const std::vector<Geom> &gs) {
    if (gs.empty()) return {};
    // centroid of all defining points, radius to the farthest inflated point
    Vec2 c{0, 0};
    int count = 0;
    for (const auto &g : gs) {
        if (g.kind == Geom::Kind::Capsule) {
            c = c + g.a + g.b;
            count += 2;
        } else {
            for (const auto &p : g.pts) c = c + p;
            count += static_cast<int>(g.pts.size());
        }
    }
    c = c * (1.0 / std::max(1, count));
    double r = 0.0;
    for (const auto &g : gs) {
        if (g.kind == Geom::Kind::Capsule) {
            r = std::max(r, std::max((g.a - c).norm(), (g.b - c).norm()) + g.r);
        } else {
            for (const auto &p : g.pts) r = std::max(r, (p - c).norm() + g.r);
        }
    }
    return {c, r};
}

}  // namespace apexmr
