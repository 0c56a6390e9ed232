#include "apexmr/world.hpp"

#include <algorithm>
#include <cmath>

namespace apexmr {

// Revolute joints wrap: distances and interpolation always take the shorter
// way around the circle, so configurations are points on a torus.
double l1Distance(const Configuration &a, const Configuration &b) {
    double d = 0.0;
    for (size_t i = 0; i < a.joints.size(); ++i) d += std::abs(wrapAngle(b.joints[i] - a.joints[i]));
    return d;
}

Configuration lerp(const Configuration &a, const Configuration &b, double t) {
    Configuration c;
    c.joints.resize(a.joints.size());
    for (size_t i = 0; i < a.joints.size(); ++i)
        c.joints[i] = wrapAngle(a.joints[i] + t * wrapAngle(b.joints[i] - a.joints[i]));
    return c;
}

Configuration twistOf(const Configuration &q) {
    Configuration t = q;
    double &last = t.joints.back();
    last += (last + 0.1 <= M_PI) ? 0.1 : -0.1;
    return t;
}

Geom ObjectShape::geomAt(const Pose2 &p) const {
    if (kind == Kind::Disc) return Geom::circle(p.p, dimensions.at(0));
    const double hx = dimensions.at(0), hy = dimensions.at(1);
    return Geom::polygon({p.apply({-hx, -hy}), p.apply({hx, -hy}),
                          p.apply({hx, hy}), p.apply({-hx, hy})});
}

Geom Rect::geom() const {
    return Geom::polygon({pose.apply({-half_x, -half_y}), pose.apply({half_x, -half_y}),
                          pose.apply({half_x, half_y}), pose.apply({-half_x, half_y})});
}

FkResult forwardKinematics(const RobotModel &robot, const Configuration &q) {
    if (q.dof() != robot.dof())
        throw std::invalid_argument("forwardKinematics: configuration dof " +
                                    std::to_string(q.dof()) + " != robot dof " +
                                    std::to_string(robot.dof()));
    FkResult out;
    out.links.reserve(robot.dof());
    Vec2 p = robot.base;
    double angle = 0.0;
    for (size_t i = 0; i < robot.dof(); ++i) {
        angle += q.joints[i];
        const Vec2 next{p.x + robot.link_lengths[i] * std::cos(angle),
                        p.y + robot.link_lengths[i] * std::sin(angle)};
        out.links.push_back(Geom::capsule(p, next, robot.link_radius));
        p = next;
    }
    out.ee = {p, angle};
    return out;
}

bool WorldState::isAttached(int object_id) const {
    for (const auto &a : attachments)
        if (a && a->object == object_id) return true;
    return false;
}

const ObjectShape &WorldState::object(int object_id) const {
    for (const auto &o : objects)
        if (o.id == object_id) return o;
    throw std::out_of_range("unknown object id " + std::to_string(object_id));
}

ObjectShape &WorldState::object(int object_id) {
    for (auto &o : objects)
        if (o.id == object_id) return o;
    throw std::out_of_range("unknown object id " + std::to_string(object_id));
}

std::vector<Geom> robotGeometry(const RobotModel &robot, const Configuration &q,
                                const WorldState &world,
                                const std::optional<Attachment> &attach) {
    FkResult fk = forwardKinematics(robot, q);
    std::vector<Geom> geoms = std::move(fk.links);
    if (attach) {
        const ObjectShape &obj = world.object(attach->object);
        geoms.push_back(obj.geomAt(fk.ee.times(attach->ee_to_object)));
    }
    return geoms;
}

namespace {

bool setsOverlap(const std::vector<Geom> &a, const std::vector<Geom> &b, double margin) {
    for (const auto &ga : a)
        for (const auto &gb : b)
            if (geomsOverlap(ga, gb, margin)) return true;
    return false;
}

bool againstStatics(const WorldState &world, const std::vector<Geom> &geoms, double margin,
                    int ignore_object, const std::optional<Attachment> &attach) {
    for (const auto &obs : world.static_obstacles) {
        const Geom g = obs.geom();
        for (const auto &ga : geoms)
            if (geomsOverlap(ga, g, margin)) return true;
    }
    for (const auto &obj : world.objects) {
        if (obj.id == ignore_object) continue;
        if (attach && attach->object == obj.id) continue;
        if (world.isAttached(obj.id)) continue;
        const Geom g = obj.geom();
        for (const auto &ga : geoms)
            if (geomsOverlap(ga, g, margin)) return true;
    }
    return false;
}

}  // namespace

bool inCollision(const WorldState &world, int robot_a, const Configuration &q_a,
                 const std::optional<Attachment> &attach_a, int robot_b,
                 const Configuration &q_b, const std::optional<Attachment> &attach_b,
                 double margin) {
    const auto ga = robotGeometry(world.robots[robot_a], q_a, world, attach_a);
    const auto gb = robotGeometry(world.robots[robot_b], q_b, world, attach_b);
    if (setsOverlap(ga, gb, margin)) return true;
    if (againstStatics(world, ga, margin, attach_b ? attach_b->object : -1, attach_a))
        return true;
    if (againstStatics(world, gb, margin, attach_a ? attach_a->object : -1, attach_b))
        return true;
    return false;
}

bool robotsCollide(const WorldState &world, int robot_a, const Configuration &q_a,
                   const std::optional<Attachment> &attach_a, int robot_b,
                   const Configuration &q_b, const std::optional<Attachment> &attach_b,
                   double margin) {
    const auto ga = robotGeometry(world.robots[robot_a], q_a, world, attach_a);
    const auto gb = robotGeometry(world.robots[robot_b], q_b, world, attach_b);
    return setsOverlap(ga, gb, margin);
}

bool configBlocked(const WorldState &world, int robot, const Configuration &q,
                   const std::optional<Attachment> &attach, double margin,
                   int ignore_object, bool check_other_robots) {
    const auto geoms = robotGeometry(world.robots[robot], q, world, attach);
    if (againstStatics(world, geoms, margin, ignore_object, attach)) return true;
    if (check_other_robots) {
        for (size_t i = 0; i < world.robots.size(); ++i) {
            if (static_cast<int>(i) == robot) continue;
            const auto other =
                robotGeometry(world.robots[i], world.configs[i], world, world.attachments[i]);
            if (setsOverlap(geoms, other, margin)) return true;
        }
    }
    return false;
}

bool pathClear(const WorldState &world, int robot, const Configuration &q_from,
               const Configuration &q_to, double resolution, double margin,
               int ignore_object, bool check_other_robots) {
    double max_delta = 0.0;
    for (size_t i = 0; i < q_from.joints.size(); ++i)
        max_delta = std::max(max_delta, std::abs(wrapAngle(q_to.joints[i] - q_from.joints[i])));
    const int steps = std::max(1, static_cast<int>(std::ceil(max_delta / resolution)));
    for (int s = 0; s <= steps; ++s) {
        const Configuration q = lerp(q_from, q_to, static_cast<double>(s) / steps);
        if (configBlocked(world, robot, q, world.attachments[robot], margin, ignore_object,
                          check_other_robots))
            return false;
    }
    return true;
}

}  // namespace apexmr
