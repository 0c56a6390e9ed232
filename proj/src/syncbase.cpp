#include "apexmr/syncbase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace apexmr {

namespace {

// attachment held while a robot sits at each task's goal, derived from the
// task kinds alone (transforms use the snapped object poses)
std::vector<std::vector<std::optional<Attachment>>> attachmentsAtGoals(
    const Scenario &s, const TaskGraph &graph) {
    std::vector<std::vector<std::optional<Attachment>>> at(s.numRobots());
    for (size_t i = 0; i < s.numRobots(); ++i) {
        std::optional<Attachment> held;
        for (const Task &task : graph.tasks[i]) {
            std::optional<Attachment> during = held;
            const Pose2 ee = isSkill(task.kind)
                                 ? forwardKinematics(s.world.robots[i], task.goal).ee
                                 : Pose2{};
            switch (task.kind) {
                case TaskKind::Pick:
                    held = Attachment{task.attach_object,
                                      ee.inverseTimes(s.world.object(task.attach_object).pose)};
                    during = held;
                    break;
                case TaskKind::HandoverReceive:
                    held = Attachment{task.attach_object, ee.inverseTimes({ee.p, 0.0})};
                    during = held;
                    break;
                case TaskKind::PlaceDown:
                case TaskKind::PlaceUp:
                case TaskKind::HandoverGive:
                    during = held;
                    held.reset();
                    break;
                default:
                    break;
            }
            at[i].push_back(during);
        }
    }
    return at;
}

}  // namespace

SyncTaskPlan toSynchronous(const Scenario &scenario, const TaskGraph &graph) {
    const int N = static_cast<int>(scenario.numRobots());
    const auto goal_attach = attachmentsAtGoals(scenario, graph);

    std::vector<size_t> next(N, 0);  // next unstarted task per robot
    std::vector<std::vector<bool>> done(N);
    for (int i = 0; i < N; ++i) done[i].assign(graph.tasks[i].size(), false);

    const auto depsDone = [&](int robot, size_t mi) {
        for (const auto &[from, to] : graph.edges)
            if (to.robot == robot && to.index == static_cast<int>(mi) &&
                !done[from.robot][from.index])
                return false;
        return true;
    };
    const auto remaining = [&] {
        for (int i = 0; i < N; ++i)
            if (next[i] < graph.tasks[i].size()) return true;
        return false;
    };

    SyncTaskPlan out;
    while (remaining()) {
        SyncRound round;
        round.tasks.assign(N, std::nullopt);
        std::vector<int> chosen;
        for (int i = 0; i < N; ++i) {
            if (next[i] >= graph.tasks[i].size()) continue;
            if (!depsDone(i, next[i])) continue;
            const Task &cand = graph.tasks[i][next[i]];
            const auto &cand_attach = goal_attach[i][next[i]];
            bool clear = true;
            for (int j : chosen) {
                const Task &other = graph.tasks[j][round.tasks[j]->index];
                if (robotsCollide(scenario.world, i, cand.goal, cand_attach, j, other.goal,
                                  goal_attach[j][round.tasks[j]->index], scenario.margin)) {
                    clear = false;  // later-indexed robot defers
                    break;
                }
            }
            if (!clear) continue;
            round.tasks[i] = TaskRef{i, static_cast<int>(next[i])};
            chosen.push_back(i);
        }
        if (chosen.empty()) {
            // forced progress: the lowest-indexed robot with satisfied
            // dependencies proceeds alone
            for (int i = 0; i < N && chosen.empty(); ++i) {
                if (next[i] >= graph.tasks[i].size() || !depsDone(i, next[i])) continue;
                round.tasks[i] = TaskRef{i, static_cast<int>(next[i])};
                chosen.push_back(i);
            }
            if (chosen.empty())
                throw PlanningFailure("toSynchronous: no eligible task (dependency cycle?)");
        }
        for (int i : chosen) {
            done[i][next[i]] = true;
            ++next[i];
        }
        out.rounds.push_back(std::move(round));
    }
    return out;
}

std::vector<std::vector<Configuration>> planComposite(
    const WorldState &world, const std::vector<int> &robots,
    const std::vector<Configuration> &starts, const std::vector<Configuration> &goals,
    double margin, std::uint64_t seed,
    const std::vector<std::vector<int>> &ignore_objects) {
    const size_t K = robots.size();
    std::vector<size_t> offset(K + 1, 0);
    for (size_t k = 0; k < K; ++k)
        offset[k + 1] = offset[k] + world.robots[robots[k]].dof();

    // per-robot world copies with that robot's pass-through objects removed
    std::vector<WorldState> scenes(K, world);
    for (size_t k = 0; k < K; ++k)
        std::erase_if(scenes[k].objects, [&](const ObjectShape &o) {
            return !world.isAttached(o.id) &&
                   std::find(ignore_objects[k].begin(), ignore_objects[k].end(), o.id) !=
                       ignore_objects[k].end();
        });

    std::vector<bool> moving(world.robots.size(), false);
    for (int r : robots) moving[r] = true;

    const auto split = [&](const Configuration &q, size_t k) {
        Configuration out;
        out.joints.assign(q.joints.begin() + static_cast<long>(offset[k]),
                          q.joints.begin() + static_cast<long>(offset[k + 1]));
        return out;
    };

    const ValidityFn valid = [&](const Configuration &q) {
        std::vector<Configuration> qs(K);
        for (size_t k = 0; k < K; ++k) qs[k] = split(q, k);
        for (size_t k = 0; k < K; ++k) {
            if (configBlocked(scenes[k], robots[k], qs[k], world.attachments[robots[k]], margin,
                              -1, false))
                return false;
            // idle robots hold their pose and act as static obstacles
            for (size_t r = 0; r < world.robots.size(); ++r)
                if (!moving[r] &&
                    robotsCollide(world, robots[k], qs[k], world.attachments[robots[k]],
                                  static_cast<int>(r), world.configs[r], world.attachments[r],
                                  margin))
                    return false;
        }
        for (size_t k = 0; k < K; ++k)
            for (size_t l = k + 1; l < K; ++l)
                if (robotsCollide(world, robots[k], qs[k], world.attachments[robots[k]],
                                  robots[l], qs[l], world.attachments[robots[l]], margin))
                    return false;
        return true;
    };

    Configuration q0, q1;
    for (size_t k = 0; k < K; ++k) {
        q0.joints.insert(q0.joints.end(), starts[k].joints.begin(), starts[k].joints.end());
        q1.joints.insert(q1.joints.end(), goals[k].joints.begin(), goals[k].joints.end());
    }
    std::vector<Configuration> stacked = rrtConnect(valid, q0, q1, seed);
    stacked = shortcutPath(stacked, 200, seed ^ 0x9d2c5680f8657ea3ULL, valid, 0.05);

    std::vector<std::vector<Configuration>> per_robot(K);
    for (const auto &q : stacked)
        for (size_t k = 0; k < K; ++k) per_robot[k].push_back(split(q, k));
    return per_robot;
}

SyncPlan planSynchronous(const Scenario &scenario, const TaskGraph &graph) {
    const int N = static_cast<int>(scenario.numRobots());
    SyncPlan plan;
    plan.schedule = toSynchronous(scenario, graph);
    plan.paths.resize(N);
    WorldState world = scenario.world;

    double clock = 0.0;
    int round_no = 0;
    for (auto &round : plan.schedule.rounds) {
        round.start = clock;
        double round_end = clock;

        // composite transit planning for the movers
        std::vector<int> movers;
        std::vector<Configuration> starts, goals;
        std::vector<std::vector<int>> ignore;
        for (int i = 0; i < N; ++i) {
            if (!round.tasks[i]) continue;
            const Task &task = graph.tasks[i][round.tasks[i]->index];
            if (isSkill(task.kind)) continue;
            movers.push_back(i);
            starts.push_back(world.configs[i]);
            goals.push_back(task.goal);
            std::vector<int> skip;
            const auto &seq = graph.tasks[i];
            const int mi = round.tasks[i]->index;
            if (mi + 1 < static_cast<int>(seq.size())) {
                skip.push_back(seq[mi + 1].attach_object);
                skip.push_back(seq[mi + 1].near_object);
            }
            if (mi > 0) {
                skip.push_back(seq[mi - 1].detach_object);
                skip.push_back(seq[mi - 1].near_object);
            }
            ignore.push_back(std::move(skip));
        }

        if (!movers.empty()) {
            double v_comp = world.robots[movers[0]].v_max;
            for (int r : movers) v_comp = std::min(v_comp, world.robots[r].v_max);
            std::vector<std::vector<Configuration>> split;
            try {
                // stack into one configuration space and plan once
                std::vector<Configuration> mstarts = starts, mgoals = goals;
                split = planComposite(world, movers, mstarts, mgoals, scenario.margin,
                                      scenario.rng_seed * 1000003ULL +
                                          static_cast<std::uint64_t>(round_no),
                                      ignore);
            } catch (const PlanningFailure &e) {
                throw PlanningFailure(std::string(e.what()) + " (sync round " +
                                      std::to_string(round_no) + ")");
            }
            // shared composite timestamps: re-stack to measure hop lengths
            std::vector<Configuration> stacked(split[0].size());
            for (size_t n = 0; n < stacked.size(); ++n)
                for (size_t k = 0; k < movers.size(); ++k)
                    stacked[n].joints.insert(stacked[n].joints.end(),
                                             split[k][n].joints.begin(),
                                             split[k][n].joints.end());
            TimedPath composite = discretizeAndTimestamp(stacked, scenario.dt, v_comp, clock);
            for (size_t k = 0; k < movers.size(); ++k) {
                const int i = movers[k];
                const Task &task = graph.tasks[i][round.tasks[i]->index];
                TimedPath tp;
                tp.robot = i;
                tp.task = task.index;
                tp.kind = task.kind;
                size_t off = 0;
                for (size_t l = 0; l < k; ++l) off += world.robots[movers[l]].dof();
                const size_t dof = world.robots[i].dof();
                for (size_t n = 0; n < composite.poses.size(); ++n) {
                    Configuration q;
                    q.joints.assign(
                        composite.poses[n].joints.begin() + static_cast<long>(off),
                        composite.poses[n].joints.begin() + static_cast<long>(off + dof));
                    tp.poses.push_back(std::move(q));
                    tp.stamps.push_back(composite.stamps[n]);
                }
                tp.global_end = composite.global_end;
                world.configs[i] = tp.poses.back();
                plan.paths[i].push_back(std::move(tp));
            }
            round_end = std::max(round_end, composite.global_end);
        }

        // skill tasks run in place
        for (int i = 0; i < N; ++i) {
            if (!round.tasks[i]) continue;
            const Task &task = graph.tasks[i][round.tasks[i]->index];
            if (!isSkill(task.kind)) continue;
            const SkillSpec &spec = scenario.skill(skillNameFor(task.kind));
            std::vector<Configuration> ref;
            if (task.kind == TaskKind::HandoverGive)
                ref = {task.goal, task.aux_goal ? *task.aux_goal : task.goal};
            else if (task.kind == TaskKind::HandoverReceive)
                ref = {task.aux_goal ? *task.aux_goal : task.goal, task.goal};
            else if (spec.generator == SkillSpec::Generator::AttachTwist) {
                Configuration twist = task.goal;
                twist.joints.back() += twist.joints.back() + 0.1 <= M_PI ? 0.1 : -0.1;
                ref = {task.goal, twist};
            } else {
                ref = {task.goal};
            }
            TimedPath tp = discretizeAndTimestamp(ref, scenario.dt,
                                                  world.robots[i].v_max, clock);
            tp.robot = i;
            tp.task = task.index;
            tp.kind = task.kind;
            tp.global_end = clock + spec.nominal_duration;
            world.configs[i] = tp.poses.back();

            const RobotModel &robot = world.robots[i];
            if (task.attach_object >= 0) {
                ObjectShape &obj = world.object(task.attach_object);
                const Pose2 ee = forwardKinematics(robot, task.goal).ee;
                world.attachments[i] = Attachment{task.attach_object, ee.inverseTimes(obj.pose)};
                const Pose2 ee_end = forwardKinematics(robot, tp.poses.back()).ee;
                obj.pose = ee_end.times(world.attachments[i]->ee_to_object);
            }
            if (task.detach_object >= 0) {
                ObjectShape &obj = world.object(task.detach_object);
                if (task.kind == TaskKind::PlaceDown || task.kind == TaskKind::PlaceUp)
                    obj.pose = scenario.steps[task.step].target_pose;
                else if (task.kind == TaskKind::HandoverGive)
                    obj.pose = {forwardKinematics(robot, task.goal).ee.p, 0.0};
                world.attachments[i] = std::nullopt;
            }
            round_end = std::max(round_end, tp.global_end);
            plan.paths[i].push_back(std::move(tp));
        }

        round.end = round_end;
        clock = round_end;  // synchronous barrier
        ++round_no;
    }
    plan.makespan = clock;
    plan.final_world = std::move(world);
    return plan;
}

std::string syncPlanToCsv(const SyncPlan &plan, int robot) {
    std::ostringstream out;
    out.precision(17);
    const auto &paths = plan.paths[robot];
    size_t dof = 0;
    for (const auto &tp : paths)
        if (!tp.poses.empty()) dof = tp.poses[0].dof();
    out << "round,t";
    for (size_t d = 0; d < dof; ++d) out << ",q_" << d + 1;
    out << ",task_id,kind\n";
    for (const auto &tp : paths) {
        // recover the owning round from the start stamp
        int round_idx = 0;
        for (size_t r = 0; r < plan.schedule.rounds.size(); ++r)
            if (plan.schedule.rounds[r].start <= tp.stamps.front() + 1e-12 &&
                tp.stamps.front() <= plan.schedule.rounds[r].end + 1e-12)
                round_idx = static_cast<int>(r);
        for (size_t n = 0; n < tp.poses.size(); ++n) {
            out << round_idx << "," << tp.stamps[n];
            for (double q : tp.poses[n].joints) out << "," << q;
            out << "," << tp.task << "," << taskKindName(tp.kind) << "\n";
        }
    }
    return out.str();
}

}  // namespace apexmr
