#include "apexmr/tpg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace apexmr {

namespace {

// strict total order over nodes: sequential timestamp, then robot index,
// then chain position; every type-2 edge added by the scan follows it
bool keyLess(const TpgNode &a, const TpgNode &b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.robot != b.robot) return a.robot < b.robot;
    return a.chain_pos < b.chain_pos;
}

void computeFootprint(const Scenario &scenario, TpgNode &node) {
    node.geoms.clear();
    node.geom_objects.clear();
    const RobotModel &robot = scenario.world.robots[node.robot];
    for (const Configuration &q : node.path) {
        FkResult fk = forwardKinematics(robot, q);
        for (auto &g : fk.links) {
            node.geoms.push_back(std::move(g));
            node.geom_objects.push_back(-1);
        }
        if (node.attach) {
            const ObjectShape &obj = scenario.world.object(node.attach->object);
            node.geoms.push_back(obj.geomAt(fk.ee.times(node.attach->ee_to_object)));
            node.geom_objects.push_back(node.attach->object);
        }
    }
    for (const auto &[id, pose] : node.static_objects) {
        node.geoms.push_back(scenario.world.object(id).geomAt(pose));
        node.geom_objects.push_back(id);
    }
    node.bound = boundGeoms(node.geoms);
}

bool nodesCollide(const TpgNode &a, const TpgNode &b, double margin) {
    const double d = (a.bound.c - b.bound.c).norm();
    if (d > a.bound.r + b.bound.r + margin) return false;
    for (size_t i = 0; i < a.geoms.size(); ++i)
        for (size_t j = 0; j < b.geoms.size(); ++j) {
            if (a.geom_objects[i] >= 0 && a.geom_objects[i] == b.geom_objects[j])
                continue;  // one object cannot collide with itself
            if (geomsOverlap(a.geoms[i], b.geoms[j], margin)) return true;
        }
    return false;
}

std::vector<std::vector<int>> incomingLists(const Tpg &tpg) {
    std::vector<std::vector<int>> in(tpg.nodes.size());
    for (const auto &e : tpg.edges) in[e.to].push_back(e.from);
    return in;
}

// per-node ancestor frontier over the whole graph: anc[v][r] = deepest chain
// position on robot r that must finish before v starts (-1 = none). Exact
// because type-1 chains make each robot's ancestor set a prefix.
std::vector<std::vector<int>> allAncestors(const Tpg &tpg) {
    const size_t V = tpg.nodes.size();
    const int N = static_cast<int>(tpg.numRobots());
    const auto in = incomingLists(tpg);

    // Kahn topological order over chain + type-2 edges
    std::vector<int> indeg(V, 0);
    for (const auto &chain : tpg.chains)
        for (size_t p = 1; p < chain.size(); ++p) indeg[chain[p]]++;
    for (const auto &e : tpg.edges) indeg[e.to]++;
    std::deque<int> ready;
    for (size_t v = 0; v < V; ++v)
        if (indeg[v] == 0) ready.push_back(static_cast<int>(v));

    std::vector<std::vector<int>> anc(V, std::vector<int>(N, -1));
    std::vector<std::vector<int>> out(V);
    for (const auto &chain : tpg.chains)
        for (size_t p = 1; p < chain.size(); ++p) out[chain[p - 1]].push_back(chain[p]);
    for (const auto &e : tpg.edges) out[e.from].push_back(e.to);

    size_t seen = 0;
    while (!ready.empty()) {
        const int v = ready.front();
        ready.pop_front();
        ++seen;
        for (int w : out[v]) {
            for (int r = 0; r < N; ++r) anc[w][r] = std::max(anc[w][r], anc[v][r]);
            anc[w][tpg.nodes[v].robot] =
                std::max(anc[w][tpg.nodes[v].robot], tpg.nodes[v].chain_pos);
            if (--indeg[w] == 0) ready.push_back(w);
        }
    }
    if (seen != V) throw TpgError("TPG contains a cycle");
    return anc;
}

bool orderedPair(const std::vector<std::vector<int>> &anc, const Tpg &tpg, int a, int b) {
    return anc[b][tpg.nodes[a].robot] >= tpg.nodes[a].chain_pos ||
           anc[a][tpg.nodes[b].robot] >= tpg.nodes[b].chain_pos;
}

}  // namespace

bool Tpg::isAcyclic() const {
    try {
        allAncestors(*this);
    } catch (const TpgError &) {
        return false;
    }
    return true;
}

std::vector<int> Tpg::ancestorFrontier(int node) const {
    const int N = static_cast<int>(numRobots());
    const auto in = incomingLists(*this);
    std::vector<int> frontier(N, -1);
    std::vector<char> visited(nodes.size(), 0);
    std::vector<int> stack;
    const auto push = [&](int v) {
        if (v >= 0 && !visited[v]) {
            visited[v] = 1;
            stack.push_back(v);
        }
    };
    push(node);
    visited[node] = 1;
    stack.assign(1, node);
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (v != node) {
            const int r = nodes[v].robot;
            frontier[r] = std::max(frontier[r], nodes[v].chain_pos);
        }
        if (nodes[v].chain_pos > 0) push(chains[nodes[v].robot][nodes[v].chain_pos - 1]);
        for (int src : in[v]) push(src);
    }
    return frontier;
}

bool Tpg::precedes(int from, int to) const {
    if (from == to) return false;
    const auto f = ancestorFrontier(to);
    return f[nodes[from].robot] >= nodes[from].chain_pos;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

struct TaskAnchors {
    int first = -1;  // first node created by this task (-1 when degenerate)
    int last = -1;   // chain node marking this task's completion
};

struct Skeleton {
    Tpg tpg;
    std::vector<std::vector<TaskAnchors>> anchors;  // [robot][task position]
};

Skeleton buildSkeleton(const Scenario &scenario, const TaskGraph &graph,
                       const SequentialPlan &plan) {
    const int N = static_cast<int>(scenario.numRobots());
    Skeleton sk;
    Tpg &tpg = sk.tpg;
    tpg.dt = scenario.dt;
    tpg.margin = scenario.margin;
    tpg.chains.resize(N);
    sk.anchors.resize(N);

    for (int i = 0; i < N; ++i) {
        const RobotModel &robot = scenario.world.robots[i];
        const auto addNode = [&](TpgNode node) {
            node.robot = i;
            node.chain_pos = static_cast<int>(tpg.chains[i].size());
            const int id = static_cast<int>(tpg.nodes.size());
            computeFootprint(scenario, node);
            tpg.nodes.push_back(std::move(node));
            tpg.chains[i].push_back(id);
            return id;
        };

        TpgNode start;
        start.task = 0;
        start.task_kind = TaskKind::Transit;
        start.config = robot.home;
        start.path = {robot.home};
        start.t = 0.0;
        start.duration = 0.0;
        addNode(std::move(start));

        std::optional<Attachment> held;
        for (size_t mi = 0; mi < graph.tasks[i].size(); ++mi) {
            const Task &task = graph.tasks[i][mi];
            const TimedPath &tp = plan.paths[i][mi];
            TaskAnchors ta;

            if (!isSkill(task.kind)) {
                for (size_t n = 0; n < tp.poses.size(); ++n) {
                    const int last = tpg.chains[i].back();
                    if (tp.poses[n] == tpg.nodes[last].config) continue;  // wait node
                    TpgNode node;
                    node.task = task.index;
                    node.task_kind = task.kind;
                    node.config = tp.poses[n];
                    node.path = {tp.poses[n]};
                    node.t = tp.stamps[n];
                    node.duration =
                        l1Distance(tpg.nodes[last].config, tp.poses[n]) / robot.v_max;
                    node.attach = held;
                    const int id = addNode(std::move(node));
                    if (ta.first < 0) ta.first = id;
                }
            } else {
                TpgNode node;
                node.task = task.index;
                node.task_kind = task.kind;
                node.is_skill = true;
                node.path = tp.poses;
                node.config = tp.poses.back();
                node.t = tp.global_end;
                node.duration = scenario.skill(skillNameFor(task.kind)).nominal_duration;

                const Pose2 ee_goal = forwardKinematics(robot, task.goal).ee;
                switch (task.kind) {
                    case TaskKind::Pick: {
                        const Pose2 initial = scenario.world.object(task.attach_object).pose;
                        held = Attachment{task.attach_object, ee_goal.inverseTimes(initial)};
                        node.attach = held;
                        node.static_objects.emplace_back(task.attach_object, initial);
                        break;
                    }
                    case TaskKind::PlaceDown:
                    case TaskKind::PlaceUp: {
                        node.attach = held;
                        node.static_objects.emplace_back(
                            task.detach_object, scenario.steps[task.step].target_pose);
                        held.reset();
                        break;
                    }
                    case TaskKind::HandoverGive: {
                        // object pinned at the handover point for the whole
                        // skill; the retreat sweep happens empty-handed
                        node.static_objects.emplace_back(task.detach_object,
                                                         Pose2{ee_goal.p, 0.0});
                        held.reset();
                        break;
                    }
                    case TaskKind::HandoverReceive: {
                        const Pose2 hand{ee_goal.p, 0.0};
                        node.static_objects.emplace_back(task.attach_object, hand);
                        held = Attachment{task.attach_object, ee_goal.inverseTimes(hand)};
                        break;
                    }
                    default:
                        break;  // support skills carry no object
                }
                const int id = addNode(std::move(node));
                ta.first = id;
            }
            ta.last = tpg.chains[i].back();
            sk.anchors[i].push_back(ta);
        }
    }

    // object timelines for shortcutting
    for (const auto &obj : scenario.world.objects) {
        ObjectTimeline ot;
        ot.object = obj.id;
        ot.initial_pose = obj.pose;
        ot.final_pose = obj.pose;
        for (int i = 0; i < N; ++i)
            for (size_t mi = 0; mi < graph.tasks[i].size(); ++mi) {
                const Task &task = graph.tasks[i][mi];
                const int node = sk.anchors[i][mi].first;
                if (task.attach_object == obj.id && task.kind == TaskKind::Pick)
                    ot.pickup_node = node;
                if (task.detach_object == obj.id &&
                    (task.kind == TaskKind::PlaceDown || task.kind == TaskKind::PlaceUp)) {
                    ot.putdown_node = node;
                    ot.final_pose = scenario.steps[task.step].target_pose;
                }
                if (task.detach_object == obj.id && task.kind == TaskKind::HandoverGive) {
                    ot.handover_give_node = node;
                    ot.handover_pose = tpg.nodes[node].static_objects.front().second;
                }
                if (task.attach_object == obj.id && task.kind == TaskKind::HandoverReceive)
                    ot.handover_receive_node = node;
            }
        tpg.objects.push_back(std::move(ot));
    }

    // one type-2 edge per task-graph dependency: source marks the completion
    // of the prerequisite task, target is the first node that does the
    // dependent task's work
    const auto firstNodeFrom = [&](const TaskRef &ref) {
        for (size_t mi = ref.index; mi < sk.anchors[ref.robot].size(); ++mi)
            if (sk.anchors[ref.robot][mi].first >= 0) return sk.anchors[ref.robot][mi].first;
        return -1;
    };
    for (const auto &[from, to] : graph.edges) {
        const int src = sk.anchors[from.robot][from.index].last;
        const int dst = firstNodeFrom(to);
        if (dst < 0 || src == dst) continue;
        tpg.edges.push_back({src, dst, EdgeKind::TaskDependency});
    }
    return sk;
}

void dedupeEdges(std::vector<TpgEdge> &edges) {
    std::vector<TpgEdge> out;
    std::set<std::pair<int, int>> seen;
    for (const auto &e : edges)
        if (seen.insert({e.from, e.to}).second) out.push_back(e);
    edges = std::move(out);
}

// collision candidates per target node: all earlier cross-robot nodes whose
// footprints overlap. Pure geometry, so the row partition can fan out to any
// number of workers without changing the result.
namespace {

// The give/receive handshake of a handover deliberately meets at the handover
// point; the task edges already serialize it, so their overlap is not a
// motion conflict.
bool handoverHandshake(const TpgNode &a, const TpgNode &b) {
    const TpgNode *give = nullptr, *recv = nullptr;
    if (a.task_kind == TaskKind::HandoverGive) give = &a;
    if (b.task_kind == TaskKind::HandoverGive) give = &b;
    if (a.task_kind == TaskKind::HandoverReceive) recv = &a;
    if (b.task_kind == TaskKind::HandoverReceive) recv = &b;
    if (!give || !recv || !give->is_skill || !recv->is_skill) return false;
    return !give->static_objects.empty() && !recv->static_objects.empty() &&
           give->static_objects.front().first == recv->static_objects.front().first;
}

}  // namespace

std::vector<std::vector<int>> scanCandidates(const Tpg &tpg, const std::vector<int> &order,
                                             int threads) {
    const size_t V = order.size();
    std::vector<std::vector<int>> cands(tpg.nodes.size());
    const auto worker = [&](size_t lo, size_t hi) {
        for (size_t bi = lo; bi < hi; ++bi) {
            const int b = order[bi];
            auto &row = cands[b];
            for (size_t ai = 0; ai < bi; ++ai) {
                const int a = order[ai];
                if (tpg.nodes[a].robot == tpg.nodes[b].robot) continue;
                if (handoverHandshake(tpg.nodes[a], tpg.nodes[b])) continue;
                if (nodesCollide(tpg.nodes[a], tpg.nodes[b], tpg.margin)) row.push_back(a);
            }
        }
    };
    threads = std::max(1, threads);
    if (threads == 1) {
        worker(0, V);
    } else {
        std::vector<std::thread> pool;
        const size_t chunk = (V + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const size_t lo = std::min(V, w * chunk);
            const size_t hi = std::min(V, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto &th : pool) th.join();
    }
    return cands;
}

}  // namespace

Tpg buildTpg(const Scenario &scenario, const TaskGraph &graph, const SequentialPlan &plan,
             const BuildOptions &options) {
    Skeleton sk = buildSkeleton(scenario, graph, plan);
    Tpg &tpg = sk.tpg;
    const int N = static_cast<int>(tpg.numRobots());

    std::vector<int> order(tpg.nodes.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return keyLess(tpg.nodes[a], tpg.nodes[b]); });

    const auto succOf = [&](int a) {
        const TpgNode &n = tpg.nodes[a];
        const auto &chain = tpg.chains[n.robot];
        if (n.chain_pos + 1 >= static_cast<int>(chain.size()))
            throw TpgError(
                "collision against a robot's final node: the plan's timestamps are "
                "inconsistent");
        return chain[n.chain_pos + 1];
    };

    // A skill node is an arrival event at the skill's end: its transient sweep
    // (and pre-skill object snapshot) is cleared the moment the node is
    // reached. Only a conflict with the parked end pose forces the later node
    // to wait for the robot's next departure.
    const auto edgeSourceFor = [&](int a, int b) {
        const TpgNode &na = tpg.nodes[a];
        if (!na.is_skill) return succOf(a);
        TpgNode end;
        end.robot = na.robot;
        end.path = {na.config};
        end.attach = na.attach;
        computeFootprint(scenario, end);
        return nodesCollide(end, tpg.nodes[b], tpg.margin) ? succOf(a) : a;
    };

    const auto cands = scanCandidates(tpg, order, options.threads);

    if (options.naive) {
        for (int b : order)
            for (int a : cands[b])
                tpg.edges.push_back({edgeSourceFor(a, b), b, EdgeKind::MotionDependency});
        dedupeEdges(tpg.edges);
        allAncestors(tpg);  // throws on cycle
        return transitiveReduce(tpg);
    }

    // merge candidates in deterministic order, skipping edges already implied
    std::vector<std::vector<int>> in(tpg.nodes.size());
    for (const auto &e : tpg.edges) in[e.to].push_back(e.from);
    std::vector<char> visited(tpg.nodes.size(), 0);
    std::vector<int> stack;
    const auto frontierOf = [&](int node, std::vector<int> &f) {
        f.assign(N, -1);
        std::fill(visited.begin(), visited.end(), 0);
        stack.assign(1, node);
        visited[node] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            if (v != node) {
                const int r = tpg.nodes[v].robot;
                f[r] = std::max(f[r], tpg.nodes[v].chain_pos);
            }
            const auto push = [&](int u) {
                if (!visited[u]) {
                    visited[u] = 1;
                    stack.push_back(u);
                }
            };
            if (tpg.nodes[v].chain_pos > 0)
                push(tpg.chains[tpg.nodes[v].robot][tpg.nodes[v].chain_pos - 1]);
            for (int src : in[v]) push(src);
        }
    };

    std::vector<int> frontier, src_frontier;
    for (int b : order) {
        if (cands[b].empty()) continue;
        // scan earlier nodes latest-first, mirroring the backward sweep of
        // the sequential reference
        std::vector<int> row = cands[b];
        std::sort(row.begin(), row.end(),
                  [&](int x, int y) { return keyLess(tpg.nodes[y], tpg.nodes[x]); });
        frontierOf(b, frontier);
        for (int a : row) {
            const int src = edgeSourceFor(a, b);
            const TpgNode &sn = tpg.nodes[src];
            if (frontier[sn.robot] >= sn.chain_pos) continue;  // already waits for it
            frontierOf(src, src_frontier);
            if (src_frontier[tpg.nodes[b].robot] >= tpg.nodes[b].chain_pos)
                throw TpgError(
                    "collision edge would close a cycle: inconsistent plan (robot " +
                    std::to_string(tpg.nodes[a].robot) + " task " +
                    std::to_string(tpg.nodes[a].task) + " node " + std::to_string(a) +
                    " vs robot " + std::to_string(tpg.nodes[b].robot) + " task " +
                    std::to_string(tpg.nodes[b].task) + " node " + std::to_string(b) + ")");
            tpg.edges.push_back({src, b, EdgeKind::MotionDependency});
            in[b].push_back(src);
            for (int r = 0; r < N; ++r) frontier[r] = std::max(frontier[r], src_frontier[r]);
            frontier[sn.robot] = std::max(frontier[sn.robot], sn.chain_pos);
        }
    }
    dedupeEdges(tpg.edges);
    allAncestors(tpg);  // throws on cycle
    return transitiveReduce(tpg);
}

Tpg transitiveReduce(const Tpg &tpg) {
    Tpg out = tpg;
    dedupeEdges(out.edges);
    const auto anc = allAncestors(out);
    const auto in = incomingLists(out);

    std::vector<TpgEdge> kept;
    for (const auto &e : out.edges) {
        bool redundant = false;
        const auto implies = [&](int p) {
            return p != e.from && anc[p][out.nodes[e.from].robot] >= out.nodes[e.from].chain_pos;
        };
        const TpgNode &to = out.nodes[e.to];
        if (to.chain_pos > 0 && implies(out.chains[to.robot][to.chain_pos - 1]))
            redundant = true;
        if (!redundant)
            for (int p : in[e.to])
                if (implies(p)) {
                    redundant = true;
                    break;
                }
        if (!redundant) kept.push_back(e);
    }
    out.edges = std::move(kept);
    return out;
}

// ---------------------------------------------------------------------------
// Rollout

RolloutResult rollout(const Tpg &tpg, const Scenario &scenario) {
    (void)scenario;
    const size_t V = tpg.nodes.size();
    RolloutResult r;
    r.start.assign(V, 0.0);
    r.finish.assign(V, 0.0);

    const auto in = incomingLists(tpg);
    std::vector<int> indeg(V, 0);
    std::vector<std::vector<int>> out(V);
    for (const auto &chain : tpg.chains)
        for (size_t p = 1; p < chain.size(); ++p) {
            indeg[chain[p]]++;
            out[chain[p - 1]].push_back(chain[p]);
        }
    for (const auto &e : tpg.edges) {
        indeg[e.to]++;
        out[e.from].push_back(e.to);
    }
    std::deque<int> ready;
    for (size_t v = 0; v < V; ++v)
        if (indeg[v] == 0) ready.push_back(static_cast<int>(v));
    size_t seen = 0;
    while (!ready.empty()) {
        const int v = ready.front();
        ready.pop_front();
        ++seen;
        double s = 0.0;
        const TpgNode &n = tpg.nodes[v];
        if (n.chain_pos > 0) s = std::max(s, r.finish[tpg.chains[n.robot][n.chain_pos - 1]]);
        for (int src : in[v]) s = std::max(s, r.finish[src]);
        r.start[v] = s;
        r.finish[v] = s + n.duration;
        for (int w : out[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    if (seen != V) throw TpgError("rollout: TPG contains a cycle");

    r.robot_finish.assign(tpg.numRobots(), 0.0);
    r.robot_wait.assign(tpg.numRobots(), 0.0);
    for (size_t i = 0; i < tpg.numRobots(); ++i) {
        if (tpg.chains[i].empty()) continue;
        double busy = 0.0;
        for (int id : tpg.chains[i]) busy += tpg.nodes[id].duration;
        r.robot_finish[i] = r.finish[tpg.chains[i].back()];
        r.robot_wait[i] = r.robot_finish[i] - busy;
        r.makespan = std::max(r.makespan, r.robot_finish[i]);
        r.wait_time += r.robot_wait[i];
    }
    return r;
}

// ---------------------------------------------------------------------------
// Shortcutting

namespace {

// renumber after a splice and remap all edges
Tpg rebuildAfterSplice(const Tpg &tpg, const Scenario &scenario, int robot, int keep_lo,
                       int keep_hi, const std::vector<Configuration> &interior,
                       const std::vector<TpgEdge> &rewired) {
    Tpg out;
    out.dt = tpg.dt;
    out.margin = tpg.margin;
    out.chains.assign(tpg.numRobots(), {});

    std::vector<int> remap(tpg.nodes.size(), -1);
    const auto copyNode = [&](int old_id) {
        TpgNode n = tpg.nodes[old_id];
        n.chain_pos = static_cast<int>(out.chains[n.robot].size());
        const int id = static_cast<int>(out.nodes.size());
        remap[old_id] = id;
        out.nodes.push_back(std::move(n));
        out.chains[out.nodes.back().robot].push_back(id);
    };

    for (size_t i = 0; i < tpg.numRobots(); ++i) {
        for (int old_id : tpg.chains[i]) {
            const TpgNode &n = tpg.nodes[old_id];
            const bool is_interior = static_cast<int>(i) == robot &&
                                     n.chain_pos > keep_lo && n.chain_pos < keep_hi;
            if (is_interior) continue;
            copyNode(old_id);
            if (static_cast<int>(i) == robot && n.chain_pos == keep_lo) {
                const TpgNode &lo = tpg.nodes[tpg.chains[robot][keep_lo]];
                const TpgNode &hi = tpg.nodes[tpg.chains[robot][keep_hi]];
                const double span = hi.t - lo.t;
                Configuration prev = lo.config;
                for (size_t k = 0; k < interior.size(); ++k) {
                    TpgNode fresh;
                    fresh.robot = robot;
                    fresh.task = lo.task;
                    fresh.task_kind = lo.task_kind;
                    fresh.config = interior[k];
                    fresh.path = {interior[k]};
                    fresh.t = lo.t + span * static_cast<double>(k + 1) /
                                         static_cast<double>(interior.size() + 2);
                    fresh.duration = l1Distance(prev, interior[k]) /
                                     scenario.world.robots[robot].v_max;
                    fresh.attach = lo.attach;
                    prev = interior[k];
                    computeFootprint(scenario, fresh);
                    fresh.chain_pos = static_cast<int>(out.chains[robot].size());
                    const int id = static_cast<int>(out.nodes.size());
                    out.nodes.push_back(std::move(fresh));
                    out.chains[robot].push_back(id);
                }
            }
        }
    }
    // fix the hop into the far endpoint
    const int hi_new = remap[tpg.chains[robot][keep_hi]];
    const int hi_prev = out.chains[robot][out.nodes[hi_new].chain_pos - 1];
    out.nodes[hi_new].duration = l1Distance(out.nodes[hi_prev].config, out.nodes[hi_new].config) /
                                 scenario.world.robots[robot].v_max;

    for (const auto &e : rewired) out.edges.push_back({remap[e.from], remap[e.to], e.kind});
    dedupeEdges(out.edges);

    out.objects = tpg.objects;
    for (auto &ot : out.objects) {
        const auto fix = [&](int &n) {
            if (n >= 0) n = remap[n];
        };
        fix(ot.pickup_node);
        fix(ot.putdown_node);
        fix(ot.handover_give_node);
        fix(ot.handover_receive_node);
    }
    return out;
}

}  // namespace

Tpg shortcutTpg(const Tpg &tpg, const Scenario &scenario, double seconds, std::uint64_t seed) {
    Tpg cur = tpg;
    if (seconds <= 0.0) return cur;
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(seconds);
    std::mt19937_64 rng(seed);
    double best_makespan = rollout(cur, scenario).makespan;

    while (std::chrono::steady_clock::now() < deadline) {
        // transit groups: maximal runs of non-skill nodes per robot, which
        // merges consecutive transit tasks passing through HOME
        std::vector<std::pair<int, std::pair<int, int>>> groups;  // robot, [lo,hi] chain pos
        for (size_t i = 0; i < cur.numRobots(); ++i) {
            int lo = -1;
            const auto &chain = cur.chains[i];
            for (size_t p = 0; p <= chain.size(); ++p) {
                const bool transit = p < chain.size() && !cur.nodes[chain[p]].is_skill;
                if (transit && lo < 0) lo = static_cast<int>(p);
                if (!transit && lo >= 0) {
                    if (static_cast<int>(p) - lo >= 3)
                        groups.push_back({static_cast<int>(i), {lo, static_cast<int>(p) - 1}});
                    lo = -1;
                }
            }
        }
        if (groups.empty()) break;

        const auto &g = groups[std::uniform_int_distribution<size_t>(0, groups.size() - 1)(rng)];
        const int robot = g.first;
        std::uniform_int_distribution<int> pickPos(g.second.first, g.second.second);
        int lo = pickPos(rng), hi = pickPos(rng);
        if (lo > hi) std::swap(lo, hi);
        if (hi - lo < 2) continue;

        const auto &chain = cur.chains[robot];
        const TpgNode &a = cur.nodes[chain[lo]];
        const TpgNode &b = cur.nodes[chain[hi]];
        double old_len = 0.0;
        for (int p = lo + 1; p <= hi; ++p)
            old_len += l1Distance(cur.nodes[chain[p - 1]].config, cur.nodes[chain[p]].config);
        const double new_len = l1Distance(a.config, b.config);
        if (new_len >= old_len - 1e-9) continue;

        const double h = scenario.world.robots[robot].v_max * scenario.dt;
        const int steps = std::max(1, static_cast<int>(std::ceil(new_len / h - 1e-12)));
        std::vector<Configuration> interior;
        for (int k = 1; k < steps; ++k)
            interior.push_back(lerp(a.config, b.config, static_cast<double>(k) / steps));

        // candidate edge rewiring: sources of interior out-edges move to the
        // near endpoint, targets of interior in-edges to the far endpoint
        std::vector<TpgEdge> rewired;
        rewired.reserve(cur.edges.size());
        const auto isInterior = [&](int id) {
            return cur.nodes[id].robot == robot && cur.nodes[id].chain_pos > lo &&
                   cur.nodes[id].chain_pos < hi;
        };
        for (auto e : cur.edges) {
            if (isInterior(e.from)) e.from = chain[lo];
            if (isInterior(e.to)) e.to = chain[hi];
            if (e.from != e.to) rewired.push_back(e);
        }

        // validity: the new sweep must clear statics, every object pose
        // possible in this window, and every node that may run concurrently
        Tpg cand = cur;
        cand.edges = rewired;
        dedupeEdges(cand.edges);
        const auto anc = allAncestors(cand);
        const auto before = [&](int u, int v) {  // u surely finished before v starts
            return u >= 0 && anc[v][cand.nodes[u].robot] >= cand.nodes[u].chain_pos;
        };

        std::vector<Geom> sweep;
        std::vector<int> sweep_obj;
        for (const auto &q : interior) {
            FkResult fk = forwardKinematics(scenario.world.robots[robot], q);
            for (auto &gg : fk.links) {
                sweep.push_back(std::move(gg));
                sweep_obj.push_back(-1);
            }
            if (a.attach) {
                const ObjectShape &obj = scenario.world.object(a.attach->object);
                sweep.push_back(obj.geomAt(fk.ee.times(a.attach->ee_to_object)));
                sweep_obj.push_back(a.attach->object);
            }
        }
        bool ok = true;
        for (const auto &obs : scenario.world.static_obstacles) {
            const Geom og = obs.geom();
            for (const auto &sg : sweep)
                if (geomsOverlap(sg, og, cur.margin)) {
                    ok = false;
                    break;
                }
            if (!ok) break;
        }
        if (ok)
            for (const auto &ot : cur.objects) {
                if (a.attach && a.attach->object == ot.object) continue;
                std::vector<Pose2> poses;
                if (!before(ot.pickup_node, chain[lo]) &&
                    !before(ot.handover_give_node, chain[lo]))
                    poses.push_back(ot.initial_pose);
                if (ot.putdown_node >= 0 && !before(chain[hi], ot.putdown_node))
                    poses.push_back(ot.final_pose);
                if (ot.handover_pose && !before(ot.handover_receive_node, chain[lo]) &&
                    !before(chain[hi], ot.handover_give_node))
                    poses.push_back(*ot.handover_pose);
                for (const auto &pose : poses) {
                    const Geom og = scenario.world.object(ot.object).geomAt(pose);
                    for (const auto &sg : sweep)
                        if (geomsOverlap(sg, og, cur.margin)) {
                            ok = false;
                            break;
                        }
                    if (!ok) break;
                }
                if (!ok) break;
            }
        if (ok) {
            TpgNode probe;  // footprint holder for the sweep
            probe.robot = robot;
            probe.geoms = sweep;
            probe.geom_objects = sweep_obj;
            probe.bound = boundGeoms(sweep);
            for (size_t x = 0; x < cand.nodes.size() && ok; ++x) {
                if (cand.nodes[x].robot == robot) continue;
                if (isInterior(static_cast<int>(x))) continue;
                const bool ordered =
                    orderedPair(anc, cand, static_cast<int>(x), chain[lo]) ||
                    before(chain[hi], static_cast<int>(x));
                // independent = could overlap the sweep's execution window
                const bool independent =
                    !before(static_cast<int>(x), chain[lo]) &&
                    !before(chain[hi], static_cast<int>(x));
                (void)ordered;
                if (!independent) continue;
                if (nodesCollide(probe, cand.nodes[x], cur.margin)) ok = false;
            }
        }
        if (!ok) continue;

        Tpg next = rebuildAfterSplice(cur, scenario, robot, lo, hi, interior, rewired);
        const double m = rollout(next, scenario).makespan;
        if (m <= best_makespan + 1e-9) {
            best_makespan = std::min(best_makespan, m);
            cur = std::move(next);
        }
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Audit and export

std::optional<AuditViolation> auditTpg(const Tpg &tpg) {
    const auto anc = allAncestors(tpg);
    for (size_t a = 0; a < tpg.nodes.size(); ++a)
        for (size_t b = a + 1; b < tpg.nodes.size(); ++b) {
            if (tpg.nodes[a].robot == tpg.nodes[b].robot) continue;
            if (orderedPair(anc, tpg, static_cast<int>(a), static_cast<int>(b))) continue;
            if (nodesCollide(tpg.nodes[a], tpg.nodes[b], tpg.margin))
                return AuditViolation{static_cast<int>(a), static_cast<int>(b)};
        }
    return std::nullopt;
}

bool nodesOverlap(const Tpg &tpg, int a, int b) {
    return nodesCollide(tpg.nodes[a], tpg.nodes[b], tpg.margin);
}

std::string tpgToDot(const Tpg &tpg) {
    std::ostringstream out;
    out << "digraph tpg {\n  rankdir=LR;\n";
    for (size_t i = 0; i < tpg.numRobots(); ++i) {
        out << "  subgraph cluster_r" << i << " {\n    label=\"robot " << i << "\";\n";
        for (int id : tpg.chains[i]) {
            const TpgNode &n = tpg.nodes[id];
            out << "    n" << id << " [label=\"" << n.robot << ":" << n.task << ":"
                << n.chain_pos << "\"" << (n.is_skill ? ", shape=box" : "") << "];\n";
        }
        for (size_t p = 1; p < tpg.chains[i].size(); ++p)
            out << "    n" << tpg.chains[i][p - 1] << " -> n" << tpg.chains[i][p] << ";\n";
        out << "  }\n";
    }
    for (const auto &e : tpg.edges)
        out << "  n" << e.from << " -> n" << e.to << " [style=dashed, color="
            << (e.kind == EdgeKind::TaskDependency ? "blue" : "red") << "];\n";
    out << "}\n";
    return out.str();
}

std::string tpgToEdgeList(const Tpg &tpg) {
    std::ostringstream out;
    out << "# node id robot task chain_pos kind\n";
    for (size_t id = 0; id < tpg.nodes.size(); ++id) {
        const TpgNode &n = tpg.nodes[id];
        out << "node " << id << " " << n.robot << " " << n.task << " " << n.chain_pos << " "
            << (n.is_skill ? "skill" : "pose") << "\n";
    }
    for (size_t i = 0; i < tpg.numRobots(); ++i)
        for (size_t p = 1; p < tpg.chains[i].size(); ++p)
            out << "edge1 " << tpg.chains[i][p - 1] << " " << tpg.chains[i][p] << "\n";
    for (const auto &e : tpg.edges)
        out << "edge2 " << e.from << " " << e.to << " "
            << (e.kind == EdgeKind::TaskDependency ? "task" : "motion") << "\n";
    return out.str();
}

}  // namespace apexmr
