#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "apexmr/motion.hpp"

// Synchronized-execution baseline: the sequential task plan is greedily
// parallelized into rounds, every robot in a round starts together, and the
// round ends when the slowest member finishes. Motion inside a round is
// planned in the composite (stacked) configuration space.

namespace apexmr {

struct SyncRound {
    // task picked this round per robot (nullopt = robot idles)
    std::vector<std::optional<TaskRef>> tasks;
    double start = 0.0;
    double end = 0.0;
};

struct SyncTaskPlan {
    std::vector<SyncRound> rounds;
};

// Greedy conversion: a task joins the current round when all its inter-robot
// dependencies finished in earlier rounds and its goal pose is collision-free
// against every goal already in the round and every permanently parked robot.
// On a goal-pose conflict the later-indexed robot defers. Deterministic.
SyncTaskPlan toSynchronous(const Scenario &scenario, const TaskGraph &graph);

// One RRT-Connect query over the stacked joint space of the round's moving
// robots; idle robots are static obstacles. Returns per-robot paths sharing
// the composite timestamps.
std::vector<std::vector<Configuration>> planComposite(
    const WorldState &world, const std::vector<int> &robots,
    const std::vector<Configuration> &starts, const std::vector<Configuration> &goals,
    double margin, std::uint64_t seed,
    const std::vector<std::vector<int>> &ignore_objects);

struct SyncPlan {
    SyncTaskPlan schedule;
    // same shape as SequentialPlan::paths: [robot][task position]
    std::vector<std::vector<TimedPath>> paths;
    double makespan = 0.0;
    WorldState final_world;

    SequentialPlan asSequentialPlan() const {
        return SequentialPlan{paths, makespan, final_world};
    }
};

// Full baseline: convert to rounds, plan every round, timestamp with a
// synchronous barrier between rounds.
SyncPlan planSynchronous(const Scenario &scenario, const TaskGraph &graph);

// Plan dump matching the module-motion CSV with a leading round column.
std::string syncPlanToCsv(const SyncPlan &plan, int robot);

}  // namespace apexmr
