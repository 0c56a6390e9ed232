#include "apexmr/motion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace apexmr {

std::string skillNameFor(TaskKind kind) {
    switch (kind) {
        case TaskKind::Pick: return "pick";
        case TaskKind::PlaceDown: return "place-down";
        case TaskKind::PlaceUp: return "place-up";
        case TaskKind::HandoverGive:
        case TaskKind::HandoverReceive: return "handover";
        case TaskKind::SupportBottom: return "support-bottom";
        case TaskKind::SupportTop: return "support-top";
        default: return "";
    }
}

double pathLengthL1(const std::vector<Configuration> &path) {
    double len = 0.0;
    for (size_t i = 1; i < path.size(); ++i) len += l1Distance(path[i - 1], path[i]);
    return len;
}

// ---------------------------------------------------------------------------
// RRT-Connect

namespace {

bool edgeValid(const ValidityFn &valid, const Configuration &a, const Configuration &b,
               double resolution) {
    double max_delta = 0.0;
    for (size_t i = 0; i < a.joints.size(); ++i)
        max_delta = std::max(max_delta, std::abs(wrapAngle(b.joints[i] - a.joints[i])));
    const int steps = std::max(1, static_cast<int>(std::ceil(max_delta / resolution)));
    for (int s = 1; s <= steps; ++s)
        if (!valid(lerp(a, b, static_cast<double>(s) / steps))) return false;
    return true;
}

struct Tree {
    std::vector<Configuration> nodes;
    std::vector<int> parent;

    int nearest(const Configuration &q) const {
        int best = 0;
        double best_d = l1Distance(nodes[0], q);
        for (size_t i = 1; i < nodes.size(); ++i) {
            const double d = l1Distance(nodes[i], q);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        return best;
    }

    std::vector<Configuration> pathFrom(int node) const {
        std::vector<Configuration> out;
        for (int v = node; v >= 0; v = parent[v]) out.push_back(nodes[v]);
        std::reverse(out.begin(), out.end());
        return out;
    }
};

enum class ExtendResult { Trapped, Advanced, Reached };

ExtendResult extend(Tree &tree, const Configuration &target, const ValidityFn &valid,
                    const RrtParams &p, int *new_node) {
    const int near = tree.nearest(target);
    const Configuration &q_near = tree.nodes[near];
    const double d = l1Distance(q_near, target);
    Configuration q_new;
    bool reached = false;
    if (d <= p.extend_step) {
        q_new = target;
        reached = true;
    } else {
        q_new = lerp(q_near, target, p.extend_step / d);
    }
    if (!valid(q_new) || !edgeValid(valid, q_near, q_new, p.resolution))
        return ExtendResult::Trapped;
    tree.nodes.push_back(q_new);
    tree.parent.push_back(near);
    *new_node = static_cast<int>(tree.nodes.size()) - 1;
    return reached ? ExtendResult::Reached : ExtendResult::Advanced;
}

}  // namespace

std::vector<Configuration> rrtConnect(const ValidityFn &valid, const Configuration &q_start,
                                      const Configuration &q_goal, std::uint64_t seed,
                                      const RrtParams &params) {
    if (q_start == q_goal) return {q_start};
    if (!valid(q_start)) throw PlanningFailure("rrtConnect: start configuration in collision");
    if (!valid(q_goal)) throw PlanningFailure("rrtConnect: goal configuration in collision");
    if (edgeValid(valid, q_start, q_goal, params.resolution)) return {q_start, q_goal};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-M_PI, M_PI);
    const size_t dof = q_start.dof();

    Tree ta{{q_start}, {-1}};
    Tree tb{{q_goal}, {-1}};
    bool swapped = false;  // true when ta grows from the goal

    for (int it = 0; it < params.max_iterations; ++it) {
        Configuration q_rand;
        q_rand.joints.resize(dof);
        for (size_t i = 0; i < dof; ++i) q_rand.joints[i] = uni(rng);

        int na = -1;
        if (extend(ta, q_rand, valid, params, &na) != ExtendResult::Trapped) {
            const Configuration &q_new = ta.nodes[na];
            int nb = -1;
            ExtendResult r;
            do {
                r = extend(tb, q_new, valid, params, &nb);
            } while (r == ExtendResult::Advanced);
            if (r == ExtendResult::Reached) {
                auto path_a = ta.pathFrom(na);
                auto path_b = tb.pathFrom(nb);
                if (swapped) std::swap(path_a, path_b);
                // path_a runs start->meet, path_b goal->meet
                std::reverse(path_b.begin(), path_b.end());
                path_a.insert(path_a.end(), path_b.begin() + 1, path_b.end());
                return path_a;
            }
        }
        std::swap(ta, tb);
        swapped = !swapped;
    }
    throw PlanningFailure("rrtConnect: iteration budget exhausted");
}

std::vector<Configuration> shortcutPath(const std::vector<Configuration> &path, int iterations,
                                        std::uint64_t seed, const ValidityFn &valid,
                                        double resolution) {
    if (path.size() < 3) return path;
    std::vector<Configuration> out = path;
    std::mt19937_64 rng(seed);
    for (int it = 0; it < iterations && out.size() >= 3; ++it) {
        std::uniform_int_distribution<size_t> pick(0, out.size() - 1);
        size_t i = pick(rng), j = pick(rng);
        if (i > j) std::swap(i, j);
        if (j - i < 2) continue;
        double sub_len = 0.0;
        for (size_t k = i; k < j; ++k) sub_len += l1Distance(out[k], out[k + 1]);
        const double direct = l1Distance(out[i], out[j]);
        if (direct >= sub_len - 1e-12) continue;
        if (!edgeValid(valid, out[i], out[j], resolution)) continue;
        out.erase(out.begin() + static_cast<long>(i) + 1, out.begin() + static_cast<long>(j));
    }
    return out;
}

TimedPath discretizeAndTimestamp(const std::vector<Configuration> &path, double dt, double v_max,
                                 double t_start) {
    TimedPath out;
    if (path.empty()) return out;
    out.poses.push_back(path.front());
    out.stamps.push_back(t_start);
    const double h = v_max * dt;  // max L1 displacement per step
    double t = t_start;
    for (size_t seg = 1; seg < path.size(); ++seg) {
        const double len = l1Distance(path[seg - 1], path[seg]);
        if (len <= 0.0) continue;
        const int steps = std::max(1, static_cast<int>(std::ceil(len / h - 1e-12)));
        for (int k = 1; k <= steps; ++k) {
            // keep segment endpoints bit-exact so task boundaries dedupe
            const Configuration q =
                k == steps ? path[seg]
                           : lerp(path[seg - 1], path[seg], static_cast<double>(k) / steps);
            t += l1Distance(out.poses.back(), q) / v_max;
            out.poses.push_back(q);
            out.stamps.push_back(t);
        }
    }
    out.global_end = out.stamps.back();
    return out;
}

// ---------------------------------------------------------------------------
// Sequential planning

namespace {

std::uint64_t taskSeed(std::uint64_t base, int robot, int m) {
    // splitmix64 over (base, robot, m)
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(robot + 1) *
                                                      1000003ULL +
                                                      static_cast<std::uint64_t>(m));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

SequentialPlan planSequential(const Scenario &scenario, const TaskGraph &graph) {
    SequentialPlan plan;
    WorldState world = scenario.world;
    plan.paths.resize(scenario.numRobots());

    double clock = 0.0;
    for (const TaskRef &ref : graph.global_order) {
        const Task &task = graph.tasks[ref.robot][ref.index];
        const RobotModel &robot = world.robots[ref.robot];
        TimedPath tp;
        tp.robot = ref.robot;
        tp.task = task.index;
        tp.kind = task.kind;

        if (!isSkill(task.kind)) {
            // Grasp, receive, and support goals sit flush against the part
            // they manipulate, so transits bordering those tasks must not
            // treat that part as an obstacle. Attached objects stay.
            std::vector<int> skip;
            const auto &seq = graph.tasks[ref.robot];
            if (ref.index + 1 < static_cast<int>(seq.size())) {
                skip.push_back(seq[ref.index + 1].attach_object);
                skip.push_back(seq[ref.index + 1].near_object);
            }
            if (ref.index > 0) {
                skip.push_back(seq[ref.index - 1].detach_object);
                skip.push_back(seq[ref.index - 1].near_object);
            }
            WorldState scene = world;
            std::erase_if(scene.objects, [&](const ObjectShape &o) {
                return !scene.isAttached(o.id) &&
                       std::find(skip.begin(), skip.end(), o.id) != skip.end();
            });
            const auto attach = scene.attachments[ref.robot];
            const ValidityFn valid = [&](const Configuration &q) {
                return !configBlocked(scene, ref.robot, q, attach, scenario.margin, -1, true);
            };
            const std::uint64_t seed = taskSeed(scenario.rng_seed, ref.robot, task.index);
            std::vector<Configuration> path;
            try {
                path = rrtConnect(valid, world.configs[ref.robot], task.goal, seed);
            } catch (const PlanningFailure &e) {
                throw PlanningFailure(std::string(e.what()) + " (robot " +
                                      std::to_string(ref.robot) + ", task " +
                                      std::to_string(task.index) + " " +
                                      taskKindName(task.kind) + ")");
            }
            path = shortcutPath(path, 200, seed ^ 0x5bf0fb53c1b0a5d5ULL, valid, 0.05);
            tp = discretizeAndTimestamp(path, scenario.dt, robot.v_max, clock);
            tp.robot = ref.robot;
            tp.task = task.index;
            tp.kind = task.kind;
            clock = tp.global_end;
        } else {
            const SkillSpec &spec = scenario.skill(skillNameFor(task.kind));
            std::vector<Configuration> ref_path;
            if (task.kind == TaskKind::HandoverGive) {
                // release at the handover point, then pull back
                ref_path = {task.goal, task.aux_goal ? *task.aux_goal : twistOf(task.goal)};
            } else if (task.kind == TaskKind::HandoverReceive) {
                // sweep in from the staging standoff to the object
                ref_path = {task.aux_goal ? *task.aux_goal : task.goal, task.goal};
            } else if (spec.generator == SkillSpec::Generator::AttachTwist) {
                ref_path = {task.goal, twistOf(task.goal)};
            } else {
                ref_path = {task.goal};
            }
            tp = discretizeAndTimestamp(ref_path, scenario.dt, robot.v_max, clock);
            tp.robot = ref.robot;
            tp.task = task.index;
            tp.kind = task.kind;
            tp.global_end = clock + spec.nominal_duration;
            clock = tp.global_end;
        }

        world.configs[ref.robot] = tp.poses.back();

        // attachment bookkeeping at task end
        if (task.attach_object >= 0) {
            ObjectShape &obj = world.object(task.attach_object);
            const Pose2 ee = forwardKinematics(robot, task.goal).ee;
            world.attachments[ref.robot] = Attachment{task.attach_object, ee.inverseTimes(obj.pose)};
            // object now rides the arm through the remaining skill motion
            const Pose2 ee_end = forwardKinematics(robot, tp.poses.back()).ee;
            obj.pose = ee_end.times(world.attachments[ref.robot]->ee_to_object);
        }
        if (task.detach_object >= 0) {
            ObjectShape &obj = world.object(task.detach_object);
            if (task.kind == TaskKind::PlaceDown || task.kind == TaskKind::PlaceUp) {
                obj.pose = scenario.steps[task.step].target_pose;
            } else if (task.kind == TaskKind::HandoverGive) {
                // snapped to the canonical handover pose the receiver's
                // attachment transform was computed against
                obj.pose = {forwardKinematics(robot, task.goal).ee.p, 0.0};
            }
            world.attachments[ref.robot] = std::nullopt;
        }

        plan.paths[ref.robot].push_back(std::move(tp));
    }
    plan.makespan = clock;
    plan.final_world = std::move(world);
    return plan;
}

// ---------------------------------------------------------------------------
// CSV round-trip

std::string planToCsv(const std::vector<TimedPath> &robot_paths) {
    std::ostringstream out;
    out.precision(17);
    size_t dof = 0;
    for (const auto &tp : robot_paths)
        if (!tp.poses.empty()) dof = tp.poses[0].dof();
    out << "t";
    for (size_t d = 0; d < dof; ++d) out << ",q_" << d + 1;
    out << ",task_id,kind,global_end\n";
    for (const auto &tp : robot_paths)
        for (size_t n = 0; n < tp.poses.size(); ++n) {
            out << tp.stamps[n];
            for (double q : tp.poses[n].joints) out << "," << q;
            out << "," << tp.task << "," << taskKindName(tp.kind) << "," << tp.global_end << "\n";
        }
    return out.str();
}

std::vector<TimedPath> planFromCsv(const std::string &csv, int robot) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    std::vector<TimedPath> out;
    const auto kindFromName = [](const std::string &name) {
        for (TaskKind k : {TaskKind::Transit, TaskKind::Pick, TaskKind::PlaceDown,
                           TaskKind::PlaceUp, TaskKind::HandoverGive, TaskKind::HandoverReceive,
                           TaskKind::SupportBottom, TaskKind::SupportTop, TaskKind::Home})
            if (name == taskKindName(k)) return k;
        throw ParseError("unknown task kind in plan CSV: " + name);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() < 4) throw ParseError("malformed plan CSV row: " + line);
        const double t = std::stod(cells[0]);
        Configuration q;
        for (size_t c = 1; c + 3 < cells.size(); ++c) q.joints.push_back(std::stod(cells[c]));
        const int task_id = std::stoi(cells[cells.size() - 3]);
        const TaskKind kind = kindFromName(cells[cells.size() - 2]);
        const double global_end = std::stod(cells[cells.size() - 1]);
        if (out.empty() || out.back().task != task_id) {
            TimedPath tp;
            tp.robot = robot;
            tp.task = task_id;
            tp.kind = kind;
            out.push_back(std::move(tp));
        }
        out.back().poses.push_back(std::move(q));
        out.back().stamps.push_back(t);
        out.back().global_end = global_end;
    }
    return out;
}

}  // namespace apexmr
