#include "apexmr/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

namespace apexmr {
namespace {

struct StageClock {
    std::map<std::string, double> &sink;
    std::string name;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    ~StageClock() {
        sink[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

}  // namespace

double PipelineResult::tpgMakespan(const Scenario &s) const {
    return rollout(shortcutted, s).makespan;
}

PipelineResult runPipeline(const Scenario &scenario, const PipelineOptions &options) {
    PipelineResult r;
    r.scenario = scenario;

    {
        StageClock c{r.stage_seconds, "assignment"};
        r.costs = buildCosts(r.scenario);
        r.assignment = solveAssignment(r.scenario, r.costs);
        r.graph = expandToTaskPlan(r.scenario, r.assignment);
    }
    {
        StageClock c{r.stage_seconds, "sequential_plan"};
        r.sequential = planSequential(r.scenario, r.graph);
    }

    if (options.with_sync || options.sync_execution) {
        StageClock c{r.stage_seconds, "sync_baseline"};
        r.sync = planSynchronous(r.scenario, r.graph);
    }

    {
        StageClock c{r.stage_seconds, "tpg_build"};
        BuildOptions bo;
        bo.threads = options.threads;
        const SequentialPlan &source =
            options.sync_execution ? r.sync->asSequentialPlan() : r.sequential;
        r.tpg = buildTpg(r.scenario, r.graph, source, bo);
    }
    if (options.sync_execution && r.sync) {
        // keep the sync-sourced graph available separately as well
        r.sync_tpg = r.tpg;
    } else if (options.with_sync && r.sync) {
        StageClock c{r.stage_seconds, "sync_tpg_build"};
        BuildOptions bo;
        bo.threads = options.threads;
        r.sync_tpg = buildTpg(r.scenario, r.graph, r.sync->asSequentialPlan(), bo);
    }

    {
        StageClock c{r.stage_seconds, "shortcut"};
        r.shortcutted = options.shortcut_seconds > 0.0
                            ? shortcutTpg(r.tpg, r.scenario, options.shortcut_seconds, options.seed)
                            : r.tpg;
    }
    return r;
}

std::string metricsReport(const PipelineResult &result) {
    std::ostringstream out;
    char buf[64];
    auto put = [&](const char *key, double v) {
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        out << key << '=' << buf << '\n';
    };

    const double seq = result.sequential.makespan;
    RolloutResult tpg = rollout(result.tpg, result.scenario);
    RolloutResult cut = rollout(result.shortcutted, result.scenario);
    put("sequential_makespan", seq);
    put("tpg_makespan", tpg.makespan);
    put("tpg_makespan_norm", seq > 0.0 ? tpg.makespan / seq : 0.0);
    put("shortcut_makespan", cut.makespan);
    put("shortcut_makespan_norm", seq > 0.0 ? cut.makespan / seq : 0.0);
    put("tpg_wait_time", tpg.wait_time);
    if (result.sync) {
        put("sync_makespan", result.sync->makespan);
        put("sync_makespan_norm", seq > 0.0 ? result.sync->makespan / seq : 0.0);
    }
    if (result.sync_tpg) {
        RolloutResult st = rollout(*result.sync_tpg, result.scenario);
        put("sync_tpg_makespan", st.makespan);
    }
    out << "tpg_nodes=" << result.tpg.nodes.size() << '\n';
    out << "tpg_edges=" << result.tpg.edges.size() << '\n';
    for (const auto &[stage, seconds] : result.stage_seconds)
        put(("seconds_" + stage).c_str(), seconds);
    return out.str();
}

}  // namespace apexmr
