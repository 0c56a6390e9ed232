#include "apexmr/exec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace apexmr {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double sampleTriangular(const JitterSpec &spec, std::mt19937_64 &rng) {
    double lo = spec.min, mode = spec.median, hi = spec.max;
    if (!(hi > lo)) return mode;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double u = uni(rng);
    double fc = (mode - lo) / (hi - lo);
    if (u < fc) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
    return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
}

double realizedDuration(const Tpg &tpg, const Scenario &scenario, int node_id,
                        const JitterModel &jitter, std::uint64_t seed) {
    const TpgNode &node = tpg.nodes[node_id];
    if (!node.is_skill || !jitter.enabled) return node.duration;
    const SkillSpec &spec = scenario.skill(skillNameFor(node.task_kind));
    if (!(spec.duration_jitter.max > spec.duration_jitter.min)) return node.duration;
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(node_id) + 1)));
    return sampleTriangular(spec.duration_jitter, rng);
}

double applyPauses(double t, int robot, const std::vector<PauseInterval> &pauses) {
    // pauses can chain back to back, so iterate to a fixed point
    bool moved = true;
    while (moved) {
        moved = false;
        for (const PauseInterval &p : pauses) {
            if (p.robot != robot) continue;
            if (t >= p.from && t < p.until) {
                t = p.until;
                moved = true;
            }
        }
    }
    return t;
}

}  // namespace

ExecTrace simulate(const Tpg &tpg, const Scenario &scenario, const JitterModel &jitter,
                   std::uint64_t seed, const std::vector<PauseInterval> &pauses) {
    const size_t n = tpg.nodes.size();
    std::vector<std::vector<int>> in_sources(n);
    for (const TpgEdge &e : tpg.edges) in_sources[e.to].push_back(e.from);

    ExecTrace trace;
    trace.start.assign(n, 0.0);
    trace.finish.assign(n, 0.0);
    std::vector<double> enqueued(n, 0.0);

    // The dispatch rule is a DAG recurrence: a node is enqueued once its chain
    // predecessor is enqueued and every type-2 source has finished; with FIFO
    // queues and one action in flight, it starts at
    // max(enqueue time, chain predecessor finish), shifted past any pause.
    // Chains are stored in order, so a per-robot cursor walk that retries
    // until no node advances is a correct (and simple) topological sweep.
    std::vector<size_t> cursor(tpg.numRobots(), 0);
    std::vector<char> done(n, 0);
    bool progress = true;
    size_t resolved = 0;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < tpg.numRobots(); ++i) {
            while (cursor[i] < tpg.chains[i].size()) {
                int id = tpg.chains[i][cursor[i]];
                bool ready = true;
                for (int src : in_sources[id])
                    if (!done[src]) ready = false;
                if (!ready) break;
                double enq = 0.0;
                double prev_finish = 0.0;
                if (cursor[i] > 0) {
                    int prev = tpg.chains[i][cursor[i] - 1];
                    enq = enqueued[prev];
                    prev_finish = trace.finish[prev];
                }
                for (int src : in_sources[id]) enq = std::max(enq, trace.finish[src]);
                enqueued[id] = enq;
                double start = applyPauses(std::max(enq, prev_finish), static_cast<int>(i), pauses);
                trace.start[id] = start;
                trace.finish[id] = start + realizedDuration(tpg, scenario, id, jitter, seed);
                done[id] = 1;
                ++cursor[i];
                ++resolved;
                progress = true;
            }
        }
    }
    if (resolved != n) throw TpgError("simulate: execution deadlocked (graph has a cycle)");

    for (size_t id = 0; id < n; ++id) {
        int r = tpg.nodes[id].robot;
        trace.events.push_back({enqueued[id], r, static_cast<int>(id), ExecPhase::Enqueued});
        trace.events.push_back({trace.start[id], r, static_cast<int>(id), ExecPhase::Started});
        trace.events.push_back({trace.finish[id], r, static_cast<int>(id), ExecPhase::Finished});
    }
    std::sort(trace.events.begin(), trace.events.end(), [](const ExecEvent &a, const ExecEvent &b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.phase != b.phase) return static_cast<int>(a.phase) < static_cast<int>(b.phase);
        if (a.robot != b.robot) return a.robot < b.robot;
        return a.node < b.node;
    });

    for (size_t i = 0; i < tpg.numRobots(); ++i) {
        double busy = 0.0;
        double fin = 0.0;
        for (int id : tpg.chains[i]) {
            busy += trace.finish[id] - trace.start[id];
            fin = std::max(fin, trace.finish[id]);
        }
        trace.makespan = std::max(trace.makespan, fin);
        trace.wait_time += fin - busy;
    }
    return trace;
}

std::vector<PauseInterval> randomPauses(const Tpg &tpg, const Scenario &scenario, int count,
                                        double max_pause, std::uint64_t seed) {
    RolloutResult nominal = rollout(tpg, scenario);
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> at(0.0, std::max(1e-9, nominal.makespan));
    std::uniform_real_distribution<double> len(0.0, max_pause);
    std::vector<PauseInterval> out;
    for (size_t i = 0; i < tpg.numRobots(); ++i) {
        for (int k = 0; k < count; ++k) {
            double from = at(rng);
            out.push_back({static_cast<int>(i), from, from + len(rng)});
        }
    }
    return out;
}

namespace {

// Robot state at global time t as realized by the trace: while a node runs the
// robot moves along the node's geometry (linear hop for pose nodes, arc-length
// progress along the reference path for skills); between nodes it parks at the
// last finished node's configuration with that node's attachment.
struct RobotSample {
    Configuration q;
    std::optional<Attachment> attach;
    int node = -1;
};

Configuration alongPath(const std::vector<Configuration> &path, double alpha) {
    if (path.size() < 2) return path.back();
    double total = 0.0;
    for (size_t k = 1; k < path.size(); ++k) total += l1Distance(path[k - 1], path[k]);
    if (total <= 0.0) return path.back();
    double want = alpha * total;
    for (size_t k = 1; k < path.size(); ++k) {
        double seg = l1Distance(path[k - 1], path[k]);
        if (want <= seg || k + 1 == path.size()) {
            double u = seg > 0.0 ? std::min(1.0, want / seg) : 1.0;
            return lerp(path[k - 1], path[k], u);
        }
        want -= seg;
    }
    return path.back();
}

RobotSample sampleRobot(const Tpg &tpg, const ExecTrace &trace, int robot, double t) {
    const std::vector<int> &chain = tpg.chains[robot];
    // last node with start <= t (home starts at 0, so there always is one)
    int active = chain.front();
    for (int id : chain) {
        if (trace.start[id] <= t) active = id;
        else break;
    }
    const TpgNode &node = tpg.nodes[active];
    RobotSample s;
    s.node = active;
    s.attach = node.attach;
    double dur = trace.finish[active] - trace.start[active];
    if (t >= trace.finish[active] || dur <= 0.0) {
        s.q = node.config;
        return s;
    }
    double alpha = (t - trace.start[active]) / dur;
    if (node.is_skill) {
        s.q = alongPath(node.path, alpha);
    } else {
        int pos = node.chain_pos;
        const Configuration &from =
            pos > 0 ? tpg.nodes[chain[pos - 1]].config : node.config;
        s.q = lerp(from, node.config, alpha);
    }
    return s;
}

}  // namespace

std::optional<Violation> verifyTrace(const Scenario &scenario, const Tpg &tpg,
                                     const ExecTrace &trace, double sample_dt) {
    const double step = sample_dt / 4.0;
    const size_t nr = tpg.numRobots();
    const long samples = static_cast<long>(std::ceil(trace.makespan / step)) + 1;
    for (long k = 0; k <= samples; ++k) {
        double t = std::min(trace.makespan, k * step);
        std::vector<RobotSample> at(nr);
        for (size_t i = 0; i < nr; ++i) at[i] = sampleRobot(tpg, trace, static_cast<int>(i), t);
        for (size_t a = 0; a < nr; ++a) {
            for (size_t b = a + 1; b < nr; ++b) {
                if (robotsCollide(scenario.world, static_cast<int>(a), at[a].q, at[a].attach,
                                  static_cast<int>(b), at[b].q, at[b].attach, 0.0)) {
                    return Violation{t, at[a].node, at[b].node};
                }
            }
        }
        if (t >= trace.makespan) break;
    }
    return std::nullopt;
}

std::string traceToCsv(const ExecTrace &trace) {
    std::ostringstream out;
    out << "time,robot,node,phase\n";
    char buf[64];
    for (const ExecEvent &e : trace.events) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.time);
        const char *phase = e.phase == ExecPhase::Enqueued   ? "enqueued"
                            : e.phase == ExecPhase::Started ? "started"
                                                            : "finished";
        out << buf << ',' << e.robot << ',' << e.node << ',' << phase << '\n';
    }
    return out.str();
}

std::string traceSummary(const ExecTrace &trace) {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", trace.makespan);
    out << "makespan=" << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", trace.wait_time);
    out << "wait_time=" << buf << '\n';
    out << "events=" << trace.events.size() << '\n';
    out << "verified=" << (trace.verified ? "yes" : "no") << '\n';
    out << "safe=" << (trace.safe ? "yes" : "no") << '\n';
    return out.str();
}

}  // namespace apexmr
