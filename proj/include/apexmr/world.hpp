#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apexmr/geometry.hpp"

// Planar robot kinematics, attachable-object geometry, and the collision
// oracle used by every downstream module. World snapshots are immutable
// values; collision queries are pure functions and safe to run concurrently.

namespace apexmr {

struct Configuration {
    std::vector<double> joints;

    size_t dof() const { return joints.size(); }
    bool operator==(const Configuration &o) const { return joints == o.joints; }
};

// L1 joint-space distance over the joint torus (each revolute joint takes the
// shorter way around), the metric used for velocity bounds and costs.
double l1Distance(const Configuration &a, const Configuration &b);
Configuration lerp(const Configuration &a, const Configuration &b, double t);

// End pose of the wrist twist that attach-twist skills append to their goal.
Configuration twistOf(const Configuration &q);

struct RobotModel {
    Vec2 base;
    std::vector<double> link_lengths;
    double link_radius = 0.04;
    Configuration home;
    double v_max = 1.0;  // rad/s, L1 joint-speed bound

    size_t dof() const { return link_lengths.size(); }
    double reach() const {
        double s = 0.0;
        for (double l : link_lengths) s += l;
        return s;
    }
};

struct ObjectShape {
    enum class Kind { Disc, Rectangle };
    int id = -1;
    Kind kind = Kind::Disc;
    std::vector<double> dimensions;  // disc: {radius}; rectangle: {half_x, half_y}
    std::string type_tag;
    Pose2 pose;

    Geom geomAt(const Pose2 &p) const;
    Geom geom() const { return geomAt(pose); }
};

struct Rect {
    Pose2 pose;
    double half_x = 0.0;
    double half_y = 0.0;

    Geom geom() const;
};

// Rigid transform from the end-effector frame to the object frame,
// recorded at attach time.
struct Attachment {
    int object = -1;
    Pose2 ee_to_object;
};

struct FkResult {
    std::vector<Geom> links;  // one capsule per link
    Pose2 ee;                 // end-effector pose (tip of last link)
};

FkResult forwardKinematics(const RobotModel &robot, const Configuration &q);

struct WorldState {
    std::vector<RobotModel> robots;
    std::vector<Configuration> configs;  // current pose per robot
    std::vector<ObjectShape> objects;    // current object poses
    std::vector<Rect> static_obstacles;
    std::vector<std::optional<Attachment>> attachments;  // per robot

    bool isAttached(int object_id) const;
    const ObjectShape &object(int object_id) const;
    ObjectShape &object(int object_id);
};

// Collision geometry of one robot at configuration q, including the
// attached object if any.
std::vector<Geom> robotGeometry(const RobotModel &robot, const Configuration &q,
                                const WorldState &world,
                                const std::optional<Attachment> &attach);

// True iff robot_a at q_a and robot_b at q_b overlap each other, or either
// overlaps a static obstacle or an unattached object. Symmetric. `margin`
// inflates every primitive pair to absorb discretization.
bool inCollision(const WorldState &world, int robot_a, const Configuration &q_a,
                 const std::optional<Attachment> &attach_a, int robot_b,
                 const Configuration &q_b, const std::optional<Attachment> &attach_b,
                 double margin);

// Pure robot-pair check: links plus attachments of the two robots only,
// no static scene. The inter-robot safety audits use this, since manipulated
// objects legitimately sit in the gripper during skills.
bool robotsCollide(const WorldState &world, int robot_a, const Configuration &q_a,
                   const std::optional<Attachment> &attach_a, int robot_b,
                   const Configuration &q_b, const std::optional<Attachment> &attach_b,
                   double margin);

// Single-robot check against the static scene (obstacles + unattached
// objects, minus `ignore_object`) and all other robots held at their
// current world configurations.
bool configBlocked(const WorldState &world, int robot, const Configuration &q,
                   const std::optional<Attachment> &attach, double margin,
                   int ignore_object = -1, bool check_other_robots = true);

// Linear joint-space sweep from q_from to q_to, sampled at most `resolution`
// radians per joint. True iff every sample is free per configBlocked.
bool pathClear(const WorldState &world, int robot, const Configuration &q_from,
               const Configuration &q_to, double resolution, double margin,
               int ignore_object = -1, bool check_other_robots = true);

}  // namespace apexmr
