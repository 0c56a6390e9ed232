#include "apexmr/taskplan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <sstream>

namespace apexmr {

const char *taskKindName(TaskKind k) {
    switch (k) {
        case TaskKind::Transit: return "transit";
        case TaskKind::Pick: return "pick";
        case TaskKind::PlaceDown: return "place-down";
        case TaskKind::PlaceUp: return "place-up";
        case TaskKind::HandoverGive: return "handover-give";
        case TaskKind::HandoverReceive: return "handover-receive";
        case TaskKind::SupportBottom: return "support-bottom";
        case TaskKind::SupportTop: return "support-top";
        case TaskKind::Home: return "home";
    }
    return "?";
}

bool isSkill(TaskKind k) {
    return k != TaskKind::Transit && k != TaskKind::Home;
}

size_t TaskGraph::totalTasks() const {
    size_t n = 0;
    for (const auto &ts : tasks) n += ts.size();
    return n;
}

namespace {

// flatten (robot, index) -> id
struct TaskIndexer {
    std::vector<int> offset;
    explicit TaskIndexer(const TaskGraph &g) {
        offset.resize(g.tasks.size() + 1, 0);
        for (size_t i = 0; i < g.tasks.size(); ++i)
            offset[i + 1] = offset[i] + static_cast<int>(g.tasks[i].size());
    }
    int id(const TaskRef &r) const { return offset[r.robot] + r.index; }
    int total() const { return offset.back(); }
};

std::vector<std::vector<int>> taskAdjacency(const TaskGraph &g, const TaskIndexer &idx) {
    std::vector<std::vector<int>> adj(idx.total());
    for (size_t i = 0; i < g.tasks.size(); ++i)
        for (size_t m = 0; m + 1 < g.tasks[i].size(); ++m)
            adj[idx.id({static_cast<int>(i), static_cast<int>(m)})].push_back(
                idx.id({static_cast<int>(i), static_cast<int>(m) + 1}));
    for (const auto &[a, b] : g.edges) adj[idx.id(a)].push_back(idx.id(b));
    return adj;
}

}  // namespace

bool TaskGraph::isAcyclic() const {
    TaskIndexer idx(*this);
    const auto adj = taskAdjacency(*this, idx);
    std::vector<int> indeg(adj.size(), 0);
    for (const auto &out : adj)
        for (int v : out) indeg[v]++;
    std::deque<int> q;
    for (size_t v = 0; v < adj.size(); ++v)
        if (indeg[v] == 0) q.push_back(static_cast<int>(v));
    size_t seen = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        ++seen;
        for (int v : adj[u])
            if (--indeg[v] == 0) q.push_back(v);
    }
    return seen == adj.size();
}

bool TaskGraph::precedes(const TaskRef &from, const TaskRef &to) const {
    TaskIndexer idx(*this);
    const auto adj = taskAdjacency(*this, idx);
    const int src = idx.id(from), dst = idx.id(to);
    std::vector<char> seen(adj.size(), 0);
    std::deque<int> q{src};
    seen[src] = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        if (u == dst && u != src) return true;
        for (int v : adj[u])
            if (!seen[v]) {
                if (v == dst) return true;
                seen[v] = 1;
                q.push_back(v);
            }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Costs

double CostTensors::minFiniteMean() const {
    double sum = 0.0;
    size_t n = 0;
    for (const auto &cj : c)
        for (const auto &ci : cj)
            for (const auto &ck : ci)
                for (double v : ck)
                    if (std::isfinite(v)) {
                        sum += v;
                        ++n;
                    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

double defaultLambda(const CostTensors &costs) { return costs.minFiniteMean() / 10.0; }

CostTensors buildCosts(const Scenario &s) {
    const int N = static_cast<int>(s.numRobots());
    const int Nb = static_cast<int>(s.world.objects.size());
    const int Na = static_cast<int>(s.steps.size());
    CostTensors out;
    out.c.assign(Na, std::vector<std::vector<std::vector<double>>>(
                         N, std::vector<std::vector<double>>(Nb)));
    out.cs.assign(Na, std::vector<std::vector<double>>(N));

    for (int j = 0; j < Na; ++j) {
        const AssemblyStep &step = s.steps[j];
        for (int i = 0; i < N; ++i) {
            for (int k = 0; k < Nb; ++k) {
                const auto &cands = s.grasp_candidates[j][i][k];
                auto &col = out.c[j][i][k];
                col.assign(s.P, kInfeasible);
                for (size_t g = 0; g < cands.size(); ++g) {
                    const GraspCandidate &cand = cands[g];
                    if (step.needs_handover) {
                        const int giver = s.giverFor(i);
                        const double pick_leg =
                            l1Distance(s.world.robots[giver].home, cand.pick);
                        const double receive_leg =
                            l1Distance(s.world.robots[i].home, cand.receive);
                        const double place_leg = l1Distance(cand.receive, cand.place);
                        col[g] = pick_leg + receive_leg + place_leg;
                    } else {
                        col[g] = l1Distance(s.world.robots[i].home, cand.pick) +
                                 l1Distance(cand.pick, cand.place);
                    }
                }
            }
            auto &sup = out.cs[j][i];
            sup.assign(s.P, kInfeasible);
            if (step.needs_support) {
                const auto &cands = s.support_candidates[j][i];
                for (size_t g = 0; g < cands.size(); ++g) {
                    if (step.needs_handover) {
                        sup[g] = l1Distance(s.world.robots[i].home, cands[g].give) +
                                 l1Distance(cands[g].give, cands[g].support);
                    } else {
                        sup[g] = l1Distance(s.world.robots[i].home, cands[g].support);
                    }
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Branch-and-bound solver

namespace {

struct StepChoice {
    int i, k, g;
    int si = -1, sg = -1;  // support robot + pose, -1 when unused
    double cost = 0.0;
};

// A support or handover partner is parked inside the shared workspace while
// the primary robot moves through its own key poses, so a (primary, support)
// candidate pair is only usable when those parked poses stay clear of each
// other. Statics were already screened during candidate generation; this is
// purely the robot-robot coupling the per-robot screen cannot see.
bool pairCompatible(const Scenario &s, int j, int i, int k, const GraspCandidate &cand,
                    int si, const SupportCandidate &sup) {
    const AssemblyStep &step = s.steps[j];
    const int obj = s.world.objects[k].id;
    const Pose2 ee_place = forwardKinematics(s.world.robots[i], cand.place).ee;
    const Attachment carry{obj, ee_place.inverseTimes(step.target_pose)};
    if (robotsCollide(s.world, i, cand.place, carry, si, sup.support, std::nullopt, s.margin))
        return false;
    if (!step.needs_handover) {
        // the supporter is already parked while the primary grasps at staging
        return !robotsCollide(s.world, i, cand.pick, std::nullopt, si, sup.support,
                              std::nullopt, s.margin);
    }
    // Handover: the receiver waits at its approach while the giver picks and
    // presents the object, then takes it while the giver holds the retreat pose.
    const Pose2 ee_give = forwardKinematics(s.world.robots[si], sup.give).ee;
    const Attachment give_carry{obj, Pose2{{0.0, 0.0}, -ee_give.theta}};
    if (robotsCollide(s.world, i, cand.receive_approach, std::nullopt, si, cand.pick,
                      std::nullopt, s.margin))
        return false;
    if (robotsCollide(s.world, i, cand.receive_approach, std::nullopt, si, sup.give,
                      give_carry, s.margin))
        return false;
    const Pose2 ee_recv = forwardKinematics(s.world.robots[i], cand.receive).ee;
    const Attachment recv_carry{obj, Pose2{{0.0, 0.0}, -ee_recv.theta}};
    if (robotsCollide(s.world, i, cand.receive, recv_carry, si, sup.give_retreat,
                      std::nullopt, s.margin))
        return false;
    // the giver moves on to its support pose while the receiver still holds
    // the part at the handover point
    return !robotsCollide(s.world, i, cand.receive, recv_carry, si, sup.support,
                          std::nullopt, s.margin);
}

std::vector<StepChoice> enumerateStep(const Scenario &s, const CostTensors &costs, int j) {
    const int N = static_cast<int>(s.numRobots());
    const int Nb = static_cast<int>(s.world.objects.size());
    const AssemblyStep &step = s.steps[j];
    std::vector<StepChoice> out;
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < Nb; ++k)
            for (int g = 0; g < s.P; ++g) {
                const double c = costs.c[j][i][k][g];
                if (!std::isfinite(c)) continue;
                if (!step.needs_support) {
                    out.push_back({i, k, g, -1, -1, c});
                    continue;
                }
                for (int si = 0; si < N; ++si) {
                    if (si == i) continue;
                    if (step.needs_handover && si != s.giverFor(i)) continue;
                    for (int sg = 0; sg < s.P; ++sg) {
                        const double cs = costs.cs[j][si][sg];
                        if (!std::isfinite(cs)) continue;
                        if (!pairCompatible(s, j, i, k, s.grasp_candidates[j][i][k][g], si,
                                            s.support_candidates[j][si][sg]))
                            continue;
                        out.push_back({i, k, g, si, sg, c + cs});
                    }
                }
            }
    return out;
}

double windowPenalty(const Scenario &s, const std::vector<StepChoice> &chosen, int w,
                     double *z_max_out = nullptr, double *z_min_out = nullptr) {
    const int N = static_cast<int>(s.numRobots());
    std::vector<int> z(N, 0);
    for (int j = w; j < w + N; ++j) {
        z[chosen[j].i]++;
        if (chosen[j].si >= 0) z[chosen[j].si]++;
    }
    const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
    if (z_max_out) *z_max_out = *mx;
    if (z_min_out) *z_min_out = *mn;
    return static_cast<double>(*mx - *mn);
}

}  // namespace

Assignment solveAssignment(const Scenario &s, const CostTensors &costs) {
    const int N = static_cast<int>(s.numRobots());
    const int Na = static_cast<int>(s.steps.size());
    const double lambda = s.lambda ? *s.lambda : defaultLambda(costs);

    std::vector<std::vector<StepChoice>> options(Na);
    for (int j = 0; j < Na; ++j) {
        options[j] = enumerateStep(s, costs, j);
        if (options[j].empty()) {
            if (s.steps[j].needs_support)
                throw InfeasibilityError(
                    "step " + std::to_string(j + 1) +
                    ": no feasible (primary, support) pair (support-assignment "
                    "or robot-exclusivity constraints unsatisfiable)");
            throw InfeasibilityError("step " + std::to_string(j + 1) +
                                     ": no feasible (robot, object, grasp) triple "
                                     "(task-assignment or type-matching constraints "
                                     "unsatisfiable)");
        }
    }

    // cheapest-first branching finds a good incumbent on the first dive, which
    // is what lets the suffix bound prune the symmetric same-type options
    for (auto &opts : options)
        std::stable_sort(opts.begin(), opts.end(),
                         [](const StepChoice &a, const StepChoice &b) { return a.cost < b.cost; });

    // suffix lower bound on the assignment cost; the window term is >= 0
    std::vector<double> suffix(Na + 1, 0.0);
    for (int j = Na - 1; j >= 0; --j) {
        double mn = kInfeasible;
        for (const auto &ch : options[j]) mn = std::min(mn, ch.cost);
        suffix[j] = suffix[j + 1] + mn;
    }

    const bool use_windows = Na >= N;  // the window term is undefined for Na < N
    const int num_windows = use_windows ? Na - N + 1 : 0;

    std::vector<StepChoice> chosen(Na);
    std::vector<char> used(s.world.objects.size(), 0);
    std::vector<StepChoice> best_choice;
    double best = kInfeasible;
    int deepest = -1;

    // Hall-style availability prune: if the steps confined to some feasible
    // object set already outnumber its unused objects, the branch is dead.
    // Without this, a flexible early step that grabs a scarce object forces
    // the search to exhaust the whole subtree before undoing the choice.
    const int Nb = static_cast<int>(s.world.objects.size());
    std::vector<uint64_t> feas(Na, 0);
    const bool mask_prune = Nb <= 64;
    if (mask_prune)
        for (int j = 0; j < Na; ++j)
            for (const auto &ch : options[j]) feas[j] |= uint64_t{1} << ch.k;
    uint64_t used_mask = 0;
    const auto starved = [&](int j) {
        if (!mask_prune) return false;
        for (int a = j + 1; a < Na; ++a) {
            const uint64_t M = feas[a];
            int need = 0;
            for (int b = j + 1; b < Na; ++b)
                if ((feas[b] & ~M) == 0) ++need;
            if (need > std::popcount(M & ~used_mask)) return true;
        }
        return false;
    };

    // deterministic search budget: small instances are solved exactly, large
    // ones keep the best assignment found once the budget runs out (the first
    // dive is the pure greedy solution, so a full solution always exists)
    long long budget = 4'000'000;

    const std::function<void(int, double)> dfs = [&](int j, double cur) {
        if (j == Na) {
            if (cur < best) {
                best = cur;
                best_choice = chosen;
            }
            return;
        }
        deepest = std::max(deepest, j);
        for (const auto &ch : options[j]) {
            if (used[ch.k]) continue;
            if (--budget < 0) return;
            double next = cur + ch.cost;
            // windows ending at step j are now fully decided
            chosen[j] = ch;
            if (use_windows && j >= N - 1) next += lambda * windowPenalty(s, chosen, j - N + 1);
            if (next + suffix[j + 1] >= best) continue;
            used[ch.k] = 1;
            used_mask |= uint64_t{1} << ch.k;
            if (!starved(j)) dfs(j + 1, next);
            used_mask &= ~(uint64_t{1} << ch.k);
            used[ch.k] = 0;
        }
    };
    dfs(0, 0.0);

    if (!std::isfinite(best))
        throw InfeasibilityError("no feasible assignment: object-reuse constraint "
                                 "exhausts type-matching objects around step " +
                                 std::to_string(deepest + 1));

    Assignment a;
    a.objective = best;
    a.x.resize(Na);
    a.y.resize(Na);
    for (int j = 0; j < Na; ++j) {
        a.x[j] = {best_choice[j].i, best_choice[j].k, best_choice[j].g};
        if (best_choice[j].si >= 0)
            a.y[j] = Assignment::SupportChoice{best_choice[j].si, best_choice[j].sg};
    }
    a.z_max.resize(num_windows);
    a.z_min.resize(num_windows);
    for (int w = 0; w < num_windows; ++w)
        windowPenalty(s, best_choice, w, &a.z_max[w], &a.z_min[w]);
    return a;
}

double evaluateObjective(const Scenario &s, const CostTensors &costs, const Assignment &a) {
    const int N = static_cast<int>(s.numRobots());
    const int Na = static_cast<int>(s.steps.size());
    const double lambda = s.lambda ? *s.lambda : defaultLambda(costs);
    double total = 0.0;
    for (int j = 0; j < Na; ++j) {
        total += costs.c[j][a.x[j].robot][a.x[j].object][a.x[j].grasp];
        if (a.y[j]) total += costs.cs[j][a.y[j]->robot][a.y[j]->grasp];
    }
    if (Na >= N) {
        for (int w = 0; w + N - 1 < Na; ++w) {
            std::vector<int> z(N, 0);
            for (int j = w; j < w + N; ++j) {
                z[a.x[j].robot]++;
                if (a.y[j]) z[a.y[j]->robot]++;
            }
            const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
            total += lambda * (*mx - *mn);
        }
    }
    return total;
}

std::string checkAssignmentConstraints(const Scenario &s, const Assignment &a) {
    const int N = static_cast<int>(s.numRobots());
    const int Na = static_cast<int>(s.steps.size());
    if (static_cast<int>(a.x.size()) != Na || static_cast<int>(a.y.size()) != Na)
        return "assignment size mismatch";
    std::vector<int> object_uses(s.world.objects.size(), 0);
    for (int j = 0; j < Na; ++j) {
        const auto &x = a.x[j];
        if (x.robot < 0 || x.robot >= N || x.object < 0 ||
            x.object >= static_cast<int>(s.world.objects.size()) || x.grasp < 0 ||
            x.grasp >= static_cast<int>(s.grasp_candidates[j][x.robot][x.object].size()))
            return "step " + std::to_string(j + 1) +
                   ": primary assignment out of range (task-assignment constraint)";
        if (s.world.objects[x.object].type_tag != s.steps[j].required_type)
            return "step " + std::to_string(j + 1) + ": object type mismatch";
        object_uses[x.object]++;
        if (s.steps[j].needs_support != a.y[j].has_value())
            return "step " + std::to_string(j + 1) + ": support-assignment constraint violated";
        if (a.y[j]) {
            if (a.y[j]->robot == x.robot)
                return "step " + std::to_string(j + 1) +
                       ": robot is both primary and support";
            if (a.y[j]->robot < 0 || a.y[j]->robot >= N || a.y[j]->grasp < 0 ||
                a.y[j]->grasp >=
                    static_cast<int>(s.support_candidates[j][a.y[j]->robot].size()))
                return "step " + std::to_string(j + 1) + ": support assignment out of range";
            if (s.steps[j].needs_handover && a.y[j]->robot != s.giverFor(x.robot))
                return "step " + std::to_string(j + 1) +
                       ": handover giver must be the designated robot";
        }
    }
    for (size_t k = 0; k < object_uses.size(); ++k)
        if (object_uses[k] > 1)
            return "object " + std::to_string(s.world.objects[k].id) + " used more than once";
    if (Na >= N) {
        for (int w = 0; w + N - 1 < Na; ++w) {
            std::vector<int> z(N, 0);
            for (int j = w; j < w + N; ++j) {
                z[a.x[j].robot]++;
                if (a.y[j]) z[a.y[j]->robot]++;
            }
            const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
            if (w < static_cast<int>(a.z_max.size()) &&
                (a.z_max[w] != *mx || a.z_min[w] != *mn))
                return "window " + std::to_string(w + 1) + ": auxiliary z bounds inconsistent";
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Expansion into the sequential task plan

TaskGraph expandToTaskPlan(const Scenario &s, const Assignment &a) {
    const int N = static_cast<int>(s.numRobots());
    TaskGraph g;
    g.tasks.resize(N);

    const auto push = [&](int robot, TaskKind kind, Configuration goal, int step,
                          int attach = -1, int detach = -1,
                          std::optional<Configuration> aux = std::nullopt) -> TaskRef {
        Task t;
        t.robot = robot;
        t.index = static_cast<int>(g.tasks[robot].size()) + 1;
        t.kind = kind;
        t.goal = std::move(goal);
        t.step = step;
        t.attach_object = attach;
        t.detach_object = detach;
        t.aux_goal = std::move(aux);
        const TaskRef ref{robot, t.index - 1};
        g.tasks[robot].push_back(std::move(t));
        g.global_order.push_back(ref);
        return ref;
    };

    std::optional<TaskRef> prev_place;
    int prev_primary = -1;
    for (size_t j = 0; j < s.steps.size(); ++j) {
        const AssemblyStep &step = s.steps[j];
        const auto &x = a.x[j];
        const GraspCandidate &cand = s.grasp_candidates[j][x.robot][x.object][x.grasp];
        const int obj_id = s.world.objects[x.object].id;
        TaskRef place;

        if (step.needs_handover) {
            const auto &y = *a.y[j];
            const SupportCandidate &sup = s.support_candidates[j][y.robot][y.grasp];
            const int giver = y.robot;
            push(giver, TaskKind::Transit, cand.pick, j);
            const TaskRef giver_pick = push(giver, TaskKind::Pick, cand.pick, j, obj_id);
            push(giver, TaskKind::Transit, sup.give, j);
            const TaskRef give =
                push(giver, TaskKind::HandoverGive, sup.give, j, -1, obj_id, sup.give_retreat);
            const TaskRef recv_transit = push(x.robot, TaskKind::Transit, cand.receive_approach, j);
            const TaskRef recv = push(x.robot, TaskKind::HandoverReceive, cand.receive, j, obj_id,
                                      -1, cand.receive_approach);
            const TaskRef sup_transit = push(giver, TaskKind::Transit, sup.support, j);
            const TaskRef sup_task = push(giver, TaskKind::SupportTop, sup.support, j);
            g.tasks[sup_task.robot][sup_task.index].near_object = obj_id;
            push(x.robot, TaskKind::Transit, cand.place, j);
            place = push(x.robot, TaskKind::PlaceUp, cand.place, j, -1, obj_id);
            push(x.robot, TaskKind::Home, s.world.robots[x.robot].home, j);
            const TaskRef giver_home = push(giver, TaskKind::Home, s.world.robots[giver].home, j);
            (void)recv_transit;
            g.edges.emplace_back(give, recv);          // object transfer
            g.edges.emplace_back(recv, sup_transit);   // giver holds until receipt
            g.edges.emplace_back(sup_task, place);     // support precedes place
            g.edges.emplace_back(place, giver_home);   // post-support waits for place
            g.attach_edges.emplace_back(obj_id, giver_pick);
            g.attach_edges.emplace_back(obj_id, recv);
            g.detach_edges.emplace_back(give, obj_id);
            g.detach_edges.emplace_back(place, obj_id);
        } else if (step.needs_support) {
            const auto &y = *a.y[j];
            const SupportCandidate &sup = s.support_candidates[j][y.robot][y.grasp];
            push(y.robot, TaskKind::Transit, sup.support, j);
            const TaskRef sup_task = push(y.robot, TaskKind::SupportBottom, sup.support, j);
            g.tasks[sup_task.robot][sup_task.index].near_object = obj_id;
            push(x.robot, TaskKind::Transit, cand.pick, j);
            const TaskRef pick = push(x.robot, TaskKind::Pick, cand.pick, j, obj_id);
            push(x.robot, TaskKind::Transit, cand.place, j);
            place = push(x.robot, TaskKind::PlaceDown, cand.place, j, -1, obj_id);
            push(x.robot, TaskKind::Home, s.world.robots[x.robot].home, j);
            const TaskRef sup_home = push(y.robot, TaskKind::Home, s.world.robots[y.robot].home, j);
            g.edges.emplace_back(sup_task, place);
            g.edges.emplace_back(place, sup_home);
            g.attach_edges.emplace_back(obj_id, pick);
            g.detach_edges.emplace_back(place, obj_id);
        } else {
            push(x.robot, TaskKind::Transit, cand.pick, j);
            const TaskRef pick = push(x.robot, TaskKind::Pick, cand.pick, j, obj_id);
            push(x.robot, TaskKind::Transit, cand.place, j);
            place = push(x.robot, TaskKind::PlaceDown, cand.place, j, -1, obj_id);
            push(x.robot, TaskKind::Home, s.world.robots[x.robot].home, j);
            g.attach_edges.emplace_back(obj_id, pick);
            g.detach_edges.emplace_back(place, obj_id);
        }

        if (prev_place && prev_primary != x.robot)
            g.edges.emplace_back(*prev_place, place);
        prev_place = place;
        prev_primary = x.robot;
    }
    return g;
}

// ---------------------------------------------------------------------------
// LP dump

std::string dumpLp(const Scenario &s, const CostTensors &costs) {
    const int N = static_cast<int>(s.numRobots());
    const int Nb = static_cast<int>(s.world.objects.size());
    const int Na = static_cast<int>(s.steps.size());
    const double lambda = s.lambda ? *s.lambda : defaultLambda(costs);
    std::ostringstream lp;
    lp.precision(17);
    lp << "Minimize\n obj:";
    for (int j = 0; j < Na; ++j)
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < Nb; ++k)
                for (int g = 0; g < s.P; ++g)
                    if (std::isfinite(costs.c[j][i][k][g]))
                        lp << " + " << costs.c[j][i][k][g] << " X_" << j << "_" << i << "_" << k
                           << "_" << g;
    for (int j = 0; j < Na; ++j)
        for (int i = 0; i < N; ++i)
            for (int g = 0; g < s.P; ++g)
                if (std::isfinite(costs.cs[j][i][g]))
                    lp << " + " << costs.cs[j][i][g] << " Y_" << j << "_" << i << "_" << g;
    if (Na >= N)
        for (int w = 0; w + N - 1 < Na; ++w)
            lp << " + " << lambda << " ZM_" << w << " - " << lambda << " Zm_" << w;
    lp << "\nSubject To\n";
    const auto xsum = [&](int j, int i) {
        std::ostringstream t;
        for (int k = 0; k < Nb; ++k)
            for (int g = 0; g < s.P; ++g)
                if (std::isfinite(costs.c[j][i][k][g]))
                    t << " + X_" << j << "_" << i << "_" << k << "_" << g;
        return t.str();
    };
    const auto ysum = [&](int j, int i) {
        std::ostringstream t;
        for (int g = 0; g < s.P; ++g)
            if (std::isfinite(costs.cs[j][i][g])) t << " + Y_" << j << "_" << i << "_" << g;
        return t.str();
    };
    for (int j = 0; j < Na; ++j) {
        lp << " task_once_" << j << ":";
        for (int i = 0; i < N; ++i) lp << xsum(j, i);
        lp << " = 1\n";
        lp << " sup_once_" << j << ":";
        bool any = false;
        for (int i = 0; i < N; ++i) {
            const auto t = ysum(j, i);
            any |= !t.empty();
            lp << t;
        }
        if (!any) lp << " 0 Zzero";
        lp << " = " << (s.steps[j].needs_support ? 1 : 0) << "\n";
        for (int i = 0; i < N; ++i)
            lp << " robot_once_" << j << "_" << i << ":" << xsum(j, i) << ysum(j, i)
               << " <= 1\n";
    }
    for (int k = 0; k < Nb; ++k) {
        lp << " object_once_" << k << ":";
        bool any = false;
        for (int j = 0; j < Na; ++j)
            for (int i = 0; i < N; ++i)
                for (int g = 0; g < s.P; ++g)
                    if (std::isfinite(costs.c[j][i][k][g])) {
                        lp << " + X_" << j << "_" << i << "_" << k << "_" << g;
                        any = true;
                    }
        if (!any) lp << " 0 Zzero";
        lp << " <= 1\n";
    }
    if (Na >= N)
        for (int w = 0; w + N - 1 < Na; ++w)
            for (int i = 0; i < N; ++i) {
                lp << " zdef_" << w << "_" << i << ": z_" << w << "_" << i;
                for (int j = w; j < w + N; ++j) lp << xsum(j, i) << ysum(j, i);
                lp << " >= 0\n";  // definitional; z appears via the bounds below
                lp << " zmax_" << w << "_" << i << ": ZM_" << w << " - z_" << w << "_" << i
                   << " >= 0\n";
                lp << " zmin_" << w << "_" << i << ": Zm_" << w << " - z_" << w << "_" << i
                   << " <= 0\n";
            }
    lp << "Binary\n";
    for (int j = 0; j < Na; ++j)
        for (int i = 0; i < N; ++i) {
            for (int k = 0; k < Nb; ++k)
                for (int g = 0; g < s.P; ++g)
                    if (std::isfinite(costs.c[j][i][k][g]))
                        lp << " X_" << j << "_" << i << "_" << k << "_" << g << "\n";
            for (int g = 0; g < s.P; ++g)
                if (std::isfinite(costs.cs[j][i][g]))
                    lp << " Y_" << j << "_" << i << "_" << g << "\n";
        }
    lp << "End\n";
    return lp.str();
}

}  // namespace apexmr
