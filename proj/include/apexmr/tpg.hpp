#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apexmr/motion.hpp"

// Temporal plan graph: converts a valid sequential (or synchronous) plan into
// a partial execution order that is safe under arbitrary per-node delays.
// Type-1 edges are the implicit per-robot chains; type-2 edges carry
// inter-robot precedence with provenance.

namespace apexmr {

struct TpgError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EdgeKind { TaskDependency, MotionDependency };

struct TpgNode {
    int robot = -1;
    int chain_pos = 0;  // position within the robot's type-1 chain
    int task = 0;       // owning task m (1-based)
    TaskKind task_kind = TaskKind::Transit;
    bool is_skill = false;
    // pose nodes: path = {config}; skill nodes: the full reference path with
    // config = path.back() (where the robot rests afterwards)
    Configuration config;
    std::vector<Configuration> path;
    double t = 0.0;         // sequential-plan timestamp, construction only
    double duration = 0.0;  // traversal time from the chain predecessor
    // attachment carried while traversing this node (drives both collision
    // geometry and trace reconstruction)
    std::optional<Attachment> attach;
    // objects pinned at a fixed pose for the span of this node (skill
    // transition poses: pre-pick, placement target, handover point)
    std::vector<std::pair<int, Pose2>> static_objects;

    // cached collision footprint; geom_objects tags each primitive with the
    // object id it renders (-1 for robot links) so an object is never
    // collision-checked against itself across two nodes
    std::vector<Geom> geoms;
    std::vector<int> geom_objects;
    BoundingCircle bound;
};

struct TpgEdge {
    int from = -1;
    int to = -1;
    EdgeKind kind = EdgeKind::MotionDependency;

    bool operator==(const TpgEdge &o) const {
        return from == o.from && to == o.to && kind == o.kind;
    }
};

// Attach/detach events per object, resolved to node ids; lets shortcutting
// decide which static object poses a new segment must clear.
struct ObjectTimeline {
    int object = -1;
    Pose2 initial_pose;
    Pose2 final_pose;               // placement target
    std::optional<Pose2> handover_pose;
    int pickup_node = -1;           // pick or handover-give skill node
    int putdown_node = -1;          // place skill node
    int handover_give_node = -1;    // -1 when the object is not handed over
    int handover_receive_node = -1;
};

struct Tpg {
    std::vector<TpgNode> nodes;            // grouped per robot, chain order
    std::vector<std::vector<int>> chains;  // node ids per robot
    std::vector<TpgEdge> edges;            // type-2 only
    std::vector<ObjectTimeline> objects;
    double dt = 0.05;
    double margin = 0.0;

    size_t numRobots() const { return chains.size(); }
    // true iff `from` reaches `to` through type-1 chains and type-2 edges
    bool precedes(int from, int to) const;
    bool isAcyclic() const;
    // per-robot index of the deepest ancestor of `node` (-1 when none)
    std::vector<int> ancestorFrontier(int node) const;
};

struct BuildOptions {
    int threads = 1;
    bool naive = false;  // brute-force reference: no skip rules
};

// Algorithm: drop wait nodes, add one type-2 edge per task-graph dependency,
// then scan cross-robot node pairs ordered by sequential timestamp and add a
// motion-dependency edge from the earlier node's successor wherever the two
// footprints overlap. Ends with a transitive reduction. Throws TpgError if a
// cycle appears (inconsistent input timestamps).
Tpg buildTpg(const Scenario &scenario, const TaskGraph &graph, const SequentialPlan &plan,
             const BuildOptions &options = {});

// Removes every type-2 edge implied by the remaining graph. Reachability is
// preserved exactly; type-1 edges are never touched.
Tpg transitiveReduce(const Tpg &tpg);

struct RolloutResult {
    std::vector<double> start;   // earliest start per node
    std::vector<double> finish;  // start + duration
    double makespan = 0.0;
    double wait_time = 0.0;      // summed over robots, counted from t = 0
    std::vector<double> robot_finish;
    std::vector<double> robot_wait;
};

RolloutResult rollout(const Tpg &tpg, const Scenario &scenario);

// Anytime shortcutting: repeatedly samples node pairs inside a transit task
// (consecutive transits through HOME count as one task), replaces the chain
// between them with a straight resampled interpolation when it clears all
// independent nodes and every object pose possible in that window, and
// rewires edges so no ordering constraint is lost. Budget of zero returns
// the input unchanged.
Tpg shortcutTpg(const Tpg &tpg, const Scenario &scenario, double seconds, std::uint64_t seed);

struct AuditViolation {
    int node_a = -1;
    int node_b = -1;
};

// Exhaustive simultaneity audit: every cross-robot node pair not ordered by
// the partial order must have non-overlapping footprints.
std::optional<AuditViolation> auditTpg(const Tpg &tpg);

// Footprint overlap of two nodes at the graph's margin (same predicate the
// audit and the construction scan use).
bool nodesOverlap(const Tpg &tpg, int a, int b);

std::string tpgToDot(const Tpg &tpg);
std::string tpgToEdgeList(const Tpg &tpg);

}  // namespace apexmr
