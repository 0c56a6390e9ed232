#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "apexmr/scenario.hpp"

// Assignment of assembly steps to robots, objects, and grasp/support poses,
// solved as an exact branch-and-bound over the binary assignment variables,
// followed by expansion into the sequential task plan and task graph.

namespace apexmr {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();

enum class TaskKind {
    Transit,
    Pick,
    PlaceDown,
    PlaceUp,
    HandoverGive,
    HandoverReceive,
    SupportBottom,
    SupportTop,
    Home,
};

const char *taskKindName(TaskKind k);
bool isSkill(TaskKind k);

struct Task {
    int robot = -1;
    int index = 0;  // m, contiguous 1..M^i per robot
    TaskKind kind = TaskKind::Transit;
    Configuration goal;
    int step = -1;           // owning assembly step (0-based), -1 if none
    int attach_object = -1;  // object id attached when this task ends
    int detach_object = -1;  // object id detached when this task ends
    // second subgoal for handover-give: the giver pulls back here after
    // releasing the object
    std::optional<Configuration> aux_goal;
    // object the goal deliberately sits close to (support poses hover next to
    // the placed part); adjacent transits skip it in clearance checks
    int near_object = -1;
};

struct TaskRef {
    int robot = -1;
    int index = 0;  // 0-based position in tasks[robot]

    bool operator==(const TaskRef &o) const { return robot == o.robot && index == o.index; }
};

struct TaskGraph {
    std::vector<std::vector<Task>> tasks;  // per robot, in execution order
    std::vector<std::pair<TaskRef, TaskRef>> edges;  // inter-robot precedence
    std::vector<std::pair<int, TaskRef>> attach_edges;  // object id -> task
    std::vector<std::pair<TaskRef, int>> detach_edges;  // task -> object id
    std::vector<TaskRef> global_order;  // turn-based sequential order

    size_t totalTasks() const;
    bool isAcyclic() const;
    // true iff `from` precedes `to` through type-1 order and precedence edges
    bool precedes(const TaskRef &from, const TaskRef &to) const;
};

struct Assignment {
    struct Choice {
        int robot = -1;
        int object = -1;  // 0-based index into world.objects
        int grasp = -1;
    };
    struct SupportChoice {
        int robot = -1;
        int grasp = -1;
    };
    std::vector<Choice> x;                         // per step
    std::vector<std::optional<SupportChoice>> y;   // per step
    double objective = 0.0;
    std::vector<double> z_max, z_min;  // per window
};

struct CostTensors {
    // c[j][i][k][g]; infeasible combinations hold kInfeasible
    std::vector<std::vector<std::vector<std::vector<double>>>> c;
    // cs[j][i][g]
    std::vector<std::vector<std::vector<double>>> cs;

    double minFiniteMean() const;
};

// C_{ijkg} = d(home_i, grasp) + d(grasp, place) in L1 joint space; handover
// steps use the composite pick/receive/place split. C^s_{ijg} = d(home, support)
// (plus the give leg for handover steps).
CostTensors buildCosts(const Scenario &scenario);

double defaultLambda(const CostTensors &costs);

// Provably optimal assignment; deterministic tie-break by lexicographic
// smallest (j, i, k, g). Throws InfeasibilityError naming the violated
// constraint family when no feasible assignment exists.
Assignment solveAssignment(const Scenario &scenario, const CostTensors &costs);

// Independent post-solve re-check of every ILP constraint. Returns an empty
// string when all constraints hold, else a description of the violation.
std::string checkAssignmentConstraints(const Scenario &scenario, const Assignment &a);

// Objective re-evaluation (costs + load-balance term) independent of the solver.
double evaluateObjective(const Scenario &scenario, const CostTensors &costs,
                         const Assignment &a);

TaskGraph expandToTaskPlan(const Scenario &scenario, const Assignment &a);

// LP text format dump of the ILP instance, for cross-checking with external
// solvers.
std::string dumpLp(const Scenario &scenario, const CostTensors &costs);

}  // namespace apexmr
