#pragma once

#include <cmath>
#include <vector>

// Planar geometry primitives shared by the collision oracle and the
// kinematics code. All collision queries reduce to distances between
// circle-swept segments (capsules) and convex polygons.

namespace apexmr {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2 &o) const { return x * o.x + y * o.y; }
    double cross(const Vec2 &o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
};

struct Pose2 {
    Vec2 p;
    double theta = 0.0;

    Vec2 apply(const Vec2 &local) const {
        const double c = std::cos(theta), s = std::sin(theta);
        return {p.x + c * local.x - s * local.y, p.y + s * local.x + c * local.y};
    }
    // this^-1 * other
    Pose2 inverseTimes(const Pose2 &other) const {
        const double c = std::cos(theta), s = std::sin(theta);
        const Vec2 d = other.p - p;
        return {{c * d.x + s * d.y, -s * d.x + c * d.y}, other.theta - theta};
    }
    Pose2 times(const Pose2 &local) const {
        return {apply(local.p), theta + local.theta};
    }
};

inline double wrapAngle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a <= 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

// A collision primitive: a capsule (segment a-b swept by radius r) or a
// convex polygon with counterclockwise vertices (r adds an outward margin).
struct Geom {
    enum class Kind { Capsule, Polygon };
    Kind kind = Kind::Capsule;
    Vec2 a, b;
    double r = 0.0;
    std::vector<Vec2> pts;

    static Geom capsule(Vec2 a, Vec2 b, double r) { return {Kind::Capsule, a, b, r, {}}; }
    static Geom circle(Vec2 c, double r) { return {Kind::Capsule, c, c, r, {}}; }
    static Geom polygon(std::vector<Vec2> pts) {
        Geom g;
        g.kind = Kind::Polygon;
        g.pts = std::move(pts);
        return g;
    }
};

double distPointSegment(const Vec2 &p, const Vec2 &a, const Vec2 &b);
double distSegmentSegment(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d);
bool pointInPolygon(const Vec2 &p, const std::vector<Vec2> &poly);
double distSegmentPolygon(const Vec2 &a, const Vec2 &b, const std::vector<Vec2> &poly);
double distPolygonPolygon(const std::vector<Vec2> &p1, const std::vector<Vec2> &p2);

// Signed-free distance between two primitives (0 when overlapping).
double geomDistance(const Geom &g1, const Geom &g2);

inline bool geomsOverlap(const Geom &g1, const Geom &g2, double margin) {
    return geomDistance(g1, g2) <= margin;
}

// Loose bounding circle, used for fast rejection in pairwise scans.
struct BoundingCircle {
    Vec2 c;
    double r = 0.0;
};
BoundingCircle boundGeoms(const std::vector<Geom> &gs);

}  // namespace apexmr
