#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "apexmr/taskplan.hpp"

// Sequential single-robot motion planning: RRT-Connect, randomized path
// shortcutting, discretization and timestamping. The global timeline is
// turn-based; exactly one robot moves at any instant.

namespace apexmr {

struct PlanningFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimedPath {
    int robot = -1;
    int task = 0;  // m (1-based) within the robot's sequence
    TaskKind kind = TaskKind::Transit;
    std::vector<Configuration> poses;
    std::vector<double> stamps;  // t_n = t_{n-1} + d(C_n, C_{n-1}) / v_max
    // global time at which the task completes; equals stamps.back() for
    // transit tasks and start + nominal skill duration for skill tasks
    double global_end = 0.0;

    double startTime() const { return stamps.front(); }
    double endTime() const { return stamps.back(); }
};

// Skill catalog name for a manipulation task kind ("" for transits).
std::string skillNameFor(TaskKind kind);

struct RrtParams {
    double extend_step = 0.1;     // rad
    double resolution = 0.05;     // collision-check resolution along edges
    int max_iterations = 10000;
};

using ValidityFn = std::function<bool(const Configuration &)>;

// Generic RRT-Connect over a joint-space box [-pi, pi]^dof. Deterministic
// given the seed. Throws PlanningFailure after the iteration budget.
std::vector<Configuration> rrtConnect(const ValidityFn &valid, const Configuration &q_start,
                                      const Configuration &q_goal, std::uint64_t seed,
                                      const RrtParams &params = {});

// Randomized shortcutting: output L1 length <= input length, endpoints
// unchanged, every accepted cut revalidated against `valid`.
std::vector<Configuration> shortcutPath(const std::vector<Configuration> &path, int iterations,
                                        std::uint64_t seed, const ValidityFn &valid,
                                        double resolution);

double pathLengthL1(const std::vector<Configuration> &path);

// Arc-length resampling at per-step L1 displacement <= v_max*dt, with the
// quoted timestamp recurrence and first stamp at t_start.
TimedPath discretizeAndTimestamp(const std::vector<Configuration> &path, double dt, double v_max,
                                 double t_start);

struct SequentialPlan {
    std::vector<std::vector<TimedPath>> paths;  // per robot, per task (m-1)
    double makespan = 0.0;
    // world evolution snapshots are not stored; the final world is returned
    // for inspection
    WorldState final_world;
};

// Plans every task in the task graph's global turn-based order. Transit
// tasks run RRT-Connect + shortcutting; skill tasks get reference paths from
// their SkillSpec generator. Throws PlanningFailure naming the task.
SequentialPlan planSequential(const Scenario &scenario, const TaskGraph &graph);

// Per-robot CSV dump (t, q_1..q_d, task_id, kind); bit-exact re-import.
std::string planToCsv(const std::vector<TimedPath> &robot_paths);
std::vector<TimedPath> planFromCsv(const std::string &csv, int robot);

}  // namespace apexmr
