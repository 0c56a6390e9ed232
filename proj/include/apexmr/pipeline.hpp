#pragma once

#include <map>
#include <optional>
#include <string>

#include "apexmr/exec.hpp"
#include "apexmr/syncbase.hpp"
#include "apexmr/taskplan.hpp"
#include "apexmr/tpg.hpp"

// End-to-end driver: scenario -> assignment -> task plan -> sequential motion
// plan -> TPG (-> shortcut / synchronous baseline). Collects wall-clock
// timings per stage so the CLI and benchmarks share one code path.

namespace apexmr {

struct PipelineOptions {
    std::uint64_t seed = 0;
    int threads = 1;
    double shortcut_seconds = 0.0;
    bool with_sync = false;       // also build the synchronized baseline
    bool sync_execution = false;  // build the TPG from the sync plan instead
};

struct PipelineResult {
    Scenario scenario;
    CostTensors costs;
    Assignment assignment;
    TaskGraph graph;
    SequentialPlan sequential;
    Tpg tpg;            // from the sequential plan (or sync plan, see options)
    Tpg shortcutted;    // equals tpg when shortcut_seconds == 0
    std::optional<SyncPlan> sync;
    std::optional<Tpg> sync_tpg;

    std::map<std::string, double> stage_seconds;

    double sequentialMakespan() const { return sequential.makespan; }
    double tpgMakespan(const Scenario &s) const;
};

PipelineResult runPipeline(const Scenario &scenario, const PipelineOptions &options = {});

// One-line metrics block used by `apexmr bench`: makespans normalized by the
// sequential baseline plus stage timings.
std::string metricsReport(const PipelineResult &result);

}  // namespace apexmr
