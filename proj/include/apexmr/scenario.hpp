#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apexmr/world.hpp"

// Data model and file ingestion for assembly problems: robots, objects,
// assembly sequence, skill catalog. A loaded Scenario is immutable and
// shareable between threads.

namespace apexmr {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssemblyStep {
    int index = 0;  // contiguous 1..N_a
    std::string required_type;
    Pose2 target_pose;
    bool needs_support = false;
    bool needs_handover = false;  // implies needs_support
    std::optional<Pose2> support_region;
};

struct JitterSpec {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

struct SkillSpec {
    enum class Generator { AttachTwist, GoalReach };
    std::string name;
    double nominal_duration = 1.0;
    JitterSpec duration_jitter;
    Generator generator = Generator::AttachTwist;
};

// One precomputed assignment option for (step, robot, object): the grasp
// configuration at the object's initial pose and the matching placement
// configuration at the step target. For handover steps `pick` belongs to
// the designated giver robot and `receive` is the primary robot's
// configuration at the handover point.
struct GraspCandidate {
    Configuration pick;
    Configuration place;
    Configuration receive;           // handover steps only
    Configuration receive_approach;  // standoff the receiver waits at until the giver releases
};

struct SupportCandidate {
    Configuration support;
    Configuration give;          // handover steps only: giver at the handover point
    Configuration give_retreat;  // giver pulled back after releasing the object
};

struct Scenario {
    WorldState world;  // load-time snapshot, robots at home
    std::vector<AssemblyStep> steps;
    std::map<std::string, SkillSpec> skills;
    double dt = 0.05;
    std::optional<double> lambda;  // load-balance weight; defaulted by the solver
    int P = 4;                     // max candidates per (step, robot, object)
    std::uint64_t rng_seed = 0;
    double margin = 0.0;  // collision inflation used by planning-side checks

    // grasp[j][i][k] -> candidate list (empty when infeasible); indices are
    // 0-based positions into steps/robots/objects.
    std::vector<std::vector<std::vector<std::vector<GraspCandidate>>>> grasp_candidates;
    // support[j][i] -> candidate list
    std::vector<std::vector<std::vector<SupportCandidate>>> support_candidates;

    size_t numRobots() const { return world.robots.size(); }
    const SkillSpec &skill(const std::string &name) const;

    // Designated robot that picks and hands over for handover steps: the
    // other robot for N=2, otherwise the robot whose base is nearest the
    // primary's base.
    int giverFor(int primary) const;
    Vec2 handoverPoint(int primary) const;
    Vec2 supportPoint(const AssemblyStep &step) const;
};

// Analytic inverse kinematics for the built-in planar arms. 2-link arms
// solve for the target position (heading unconstrained); 3-link arms use
// the target heading to locate the wrist. Elbow-up listed first.
std::vector<Configuration> planarIk(const RobotModel &robot, const Pose2 &target);

Scenario loadScenario(const std::string &path);
Scenario parseScenario(const std::string &json_text);
std::string serializeScenario(const Scenario &s);  // canonical form, round-trips

}  // namespace apexmr
