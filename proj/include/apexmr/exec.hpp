#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apexmr/tpg.hpp"

// Semi-centralized execution: a discrete-event loop in which a central
// scheduler enqueues a node to a robot's action queue once every incoming
// type-2 source has finished, and per-robot agents consume their queues with
// at most one action in flight. Skill durations are drawn from the skill's
// jitter envelope; pause scripts model emergency stops between actions.

namespace apexmr {

enum class ExecPhase { Enqueued, Started, Finished };

struct ExecEvent {
    double time = 0.0;
    int robot = -1;
    int node = -1;
    ExecPhase phase = ExecPhase::Enqueued;
};

struct PauseInterval {
    int robot = -1;
    double from = 0.0;
    double until = 0.0;
};

struct JitterModel {
    bool enabled = false;
};

struct ExecTrace {
    std::vector<ExecEvent> events;  // time-ordered
    double makespan = 0.0;
    double wait_time = 0.0;
    // filled by verifyTrace
    bool verified = false;
    bool safe = true;
    double violation_time = 0.0;
    int violation_a = -1;
    int violation_b = -1;

    // realized start/finish per node
    std::vector<double> start;
    std::vector<double> finish;
};

ExecTrace simulate(const Tpg &tpg, const Scenario &scenario, const JitterModel &jitter,
                   std::uint64_t seed, const std::vector<PauseInterval> &pauses = {});

// Random pause script: each robot gets `count` pauses of up to `max_pause`
// seconds at uniform times within the nominal makespan.
std::vector<PauseInterval> randomPauses(const Tpg &tpg, const Scenario &scenario, int count,
                                        double max_pause, std::uint64_t seed);

struct Violation {
    double time = 0.0;
    int node_a = -1;
    int node_b = -1;
};

// Reconstructs every robot's continuous motion from the trace, samples the
// global timeline at sample_dt/4, and checks all robot pairs (links plus
// attachments) for overlap. Returns the first violation, if any.
std::optional<Violation> verifyTrace(const Scenario &scenario, const Tpg &tpg,
                                     const ExecTrace &trace, double sample_dt);

std::string traceToCsv(const ExecTrace &trace);
std::string traceSummary(const ExecTrace &trace);

}  // namespace apexmr
