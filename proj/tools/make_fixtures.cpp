// Regenerates the bundled benchmark fixtures. Geometry is chosen so every
// step has feasible grasp/support candidates and placed parts keep enough
// clearance (object radii + link radius + planning margin) that later
// placements stay reachable.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "apexmr/scenario.hpp"

using namespace apexmr;
namespace fs = std::filesystem;

namespace {

std::map<std::string, SkillSpec> skillCatalog() {
    std::map<std::string, SkillSpec> skills;
    auto add = [&](const std::string &name, double nominal, JitterSpec jitter,
                   SkillSpec::Generator gen) {
        skills[name] = SkillSpec{name, nominal, jitter, gen};
    };
    // jitter envelope: up to +2 s over nominal, median +23%
    add("pick", 1.0, {0.8, 1.23, 3.0}, SkillSpec::Generator::AttachTwist);
    add("place-down", 1.0, {0.8, 1.23, 3.0}, SkillSpec::Generator::AttachTwist);
    add("place-up", 1.2, {0.9, 1.48, 3.2}, SkillSpec::Generator::AttachTwist);
    add("handover", 1.5, {1.2, 1.85, 3.5}, SkillSpec::Generator::AttachTwist);
    add("support-bottom", 1.0, {0.8, 1.23, 3.0}, SkillSpec::Generator::GoalReach);
    add("support-top", 1.0, {0.8, 1.23, 3.0}, SkillSpec::Generator::GoalReach);
    return skills;
}

RobotModel makeArm(Vec2 base, std::vector<double> links, Configuration home, double v_max = 1.0) {
    RobotModel r;
    r.base = base;
    r.link_lengths = std::move(links);
    r.link_radius = 0.04;
    r.home = std::move(home);
    r.v_max = v_max;
    return r;
}

Scenario baseScenario() {
    Scenario s;
    s.skills = skillCatalog();
    s.dt = 0.05;
    s.P = 4;
    s.rng_seed = 7;
    s.margin = 0.0;  // <= 0 lets the loader pick the default
    return s;
}

void addDisc(Scenario &s, const std::string &type, Vec2 at, double radius = 0.035) {
    ObjectShape o;
    o.id = static_cast<int>(s.world.objects.size());
    o.kind = ObjectShape::Kind::Disc;
    o.dimensions = {radius};
    o.type_tag = type;
    o.pose = {at, 0.0};
    s.world.objects.push_back(o);
}

AssemblyStep &addStep(Scenario &s, const std::string &type, Vec2 target) {
    AssemblyStep st;
    st.index = static_cast<int>(s.steps.size()) + 1;
    st.required_type = type;
    st.target_pose = {target, 0.0};
    s.steps.push_back(st);
    return s.steps.back();
}

// staging arc on the outer side of a base: radius r, `count` points spread
// over `spread_deg`, rotated downward by `down_deg` (mirrored for the right
// robot so both sides stay symmetric)
std::vector<Vec2> stagingArc(Vec2 base, double r, int count, double spread_deg = 110.0,
                             double down_deg = 0.0) {
    std::vector<Vec2> out;
    const double away_angle = base.x < 0.0 ? M_PI : 0.0;
    const double down = (base.x < 0.0 ? 1.0 : -1.0) * down_deg * M_PI / 180.0;
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : (i / double(count - 1) - 0.5);
        const double a = away_angle + down + f * spread_deg * M_PI / 180.0;
        out.push_back(base + Vec2{r * std::cos(a), r * std::sin(a)});
    }
    return out;
}

// --------------------------------------------------------------------------
// dual-arm fixtures (bases +-0.85, 2-link arms, reach 1.15)

Scenario dualArmBase(double base_x = 0.85) {
    Scenario s = baseScenario();
    s.world.robots.push_back(makeArm({-base_x, 0.0}, {0.6, 0.55}, {{1.571, 2.6}}));
    s.world.robots.push_back(makeArm({base_x, 0.0}, {0.6, 0.55}, {{1.571, -2.6}}));
    s.world.configs = {s.world.robots[0].home, s.world.robots[1].home};
    s.world.attachments = {std::nullopt, std::nullopt};
    return s;
}

void stageAround(Scenario &s, const std::string &type, int robot, int count) {
    // near full extension the 2-link arm is almost radial, so neighbors on
    // the ring stay clear of the forearm; 21 degrees keeps chords >= 0.39
    for (Vec2 p :
         stagingArc(s.world.robots[robot].base, 1.08, count, 21.0 * (count - 1)))
        addDisc(s, type, p);
}

void stageSplit(Scenario &s, const std::string &type, int left_count, int right_count) {
    stageAround(s, type, 0, left_count);
    stageAround(s, type, 1, right_count);
}

Scenario makeCliff() {
    // 11 steps: staircase profile, two low supported steps first
    Scenario s = dualArmBase();
    stageSplit(s, "brick", 6, 5);

    addStep(s, "brick", {-0.175, 0.15}).needs_support = true;
    s.steps.back().support_region = Pose2{{-0.175, -0.2}, 0.0};
    addStep(s, "brick", {0.175, 0.15}).needs_support = true;
    s.steps.back().support_region = Pose2{{0.175, -0.2}, 0.0};

    // fill top-down and center-out: every placement keeps the elbow-up
    // forearm clear of the parts already on the wall
    for (double x : {-0.2, 0.2, -0.55, 0.55}) addStep(s, "brick", {x, 0.85});
    for (double x : {0.0, -0.35, 0.35, -0.7, 0.7}) addStep(s, "brick", {x, 0.5});
    return s;
}

Scenario makeStairs() {
    // 14 steps: two supported basement pieces, then three rows
    Scenario s = dualArmBase();
    stageSplit(s, "tread", 7, 7);

    // pyramid staircase; every tread stays well outside the first-link sweep
    // of both bases, otherwise a placed tread would pin an arm forever
    addStep(s, "tread", {-0.1, 0.12}).needs_support = true;
    s.steps.back().support_region = Pose2{{-0.1, -0.18}, 0.0};
    addStep(s, "tread", {0.1, 0.12}).needs_support = true;
    s.steps.back().support_region = Pose2{{0.1, -0.18}, 0.0};

    // upper tiers go in first, widest row at the top
    for (double x : {-0.85, 0.85, -0.55, 0.55}) addStep(s, "tread", {x, 1.0});
    for (double x : {-0.65, 0.65}) addStep(s, "tread", {x, 0.85});
    for (double x : {-1.05, 1.05}) addStep(s, "tread", {x, 0.75});
    for (double x : {-0.42, 0.42}) addStep(s, "tread", {x, 0.66});
    for (double x : {-0.15, 0.15}) addStep(s, "tread", {x, 0.35});
    return s;
}

Scenario makeFaucet() {
    // 14 steps, two of them handovers: the spouts are staged on the left but
    // mount on the right side, so the left arm feeds the right arm
    Scenario s = dualArmBase();
    stageSplit(s, "pipe", 6, 6);
    for (Vec2 p : stagingArc(s.world.robots[0].base, 0.8, 2, 20.0, 90.0)) addDisc(s, "spout", p);

    // the manifold rows stay outside the first-link sweep of both bases so no
    // placed pipe ever pinches the corridor to the handover point
    for (double x : {-0.2, 0.2, -0.55, 0.55, -0.9, 0.9}) addStep(s, "pipe", {x, 0.85});
    for (double x : {0.0, -0.28, 0.28}) addStep(s, "pipe", {x, 0.5});
    // the drain run sits low, clear of the parked home forearms and of the
    // corridor the receiver's approach config sweeps near y = 0
    addStep(s, "pipe", {-0.35, -0.6});
    addStep(s, "pipe", {0.35, -0.6});
    addStep(s, "pipe", {0.0, -0.45});

    auto &h1 = addStep(s, "spout", {0.5, -0.5});
    h1.needs_handover = true;
    h1.needs_support = true;
    h1.support_region = Pose2{{0.2, -0.35}, 0.0};
    auto &h2 = addStep(s, "spout", {0.6, 0.15});
    h2.needs_handover = true;
    h2.needs_support = true;
    h2.support_region = Pose2{{-0.1, 0.3}, 0.0};
    return s;
}

// --------------------------------------------------------------------------
// large fixtures (bases +-1.5, 3-link arms, reach 1.95)

Scenario wideArmBase() {
    Scenario s = baseScenario();
    s.margin = 0.06;
    // 4 approach headings line up with the staging grid axes; 8 gives the
    // 3-link arms diagonal approaches into the grid
    s.P = 8;
    s.world.robots.push_back(makeArm({-1.5, 0.0}, {0.7, 0.65, 0.6}, {{-1.571, -0.1, -0.1}}));
    s.world.robots.push_back(makeArm({1.5, 0.0}, {0.7, 0.65, 0.6}, {{-1.571, 0.1, 0.1}}));
    s.world.configs = {s.world.robots[0].home, s.world.robots[1].home};
    s.world.attachments = {std::nullopt, std::nullopt};
    return s;
}

void stageWide(Scenario &s, const std::string &type, int left_count, int right_count) {
    // Staggered grid below each base. Rows offset by half the spacing so no
    // point sits radially behind another: the wrist twist at the end of a
    // pick sweeps the forearm sideways, and aligned neighbors would block it.
    // Two hard keep-outs: the column under the base (the home arm hangs
    // straight down), and the disc r < 0.85 around the base (anything closer
    // sits inside the first link's sweep plus clearance and would pin the
    // shoulder joint until removed).
    std::vector<Vec2> offs;
    for (double x : {-0.84, 0.84, -1.26, 1.26}) offs.push_back({x, -0.50});
    for (double x : {-0.42, 0.42, -0.84, 0.84}) offs.push_back({x, -0.92});
    for (double x : {0.21, -0.63, 0.63, -1.05, 1.05}) offs.push_back({x, -1.34});
    for (double x : {-1.47, 1.26}) offs.push_back({x, -0.08});
    offs.push_back({-1.05, 0.06});
    const Vec2 bl = s.world.robots[0].base, br = s.world.robots[1].base;
    for (int i = 0; i < left_count; ++i) addDisc(s, type, bl + offs[i]);
    for (int j = 0; j < right_count; ++j) addDisc(s, type, {br.x - offs[j].x, br.y + offs[j].y});
}

Scenario makeBridge() {
    // 32 steps: two deck rows plus a top chord
    Scenario s = wideArmBase();
    stageWide(s, "girder", 16, 16);
    auto row = [&](double y, double x0, double dx, int n) {
        // center-out fill order
        std::vector<double> xs;
        for (int k = 0; k < n; ++k) xs.push_back(x0 + dx * k);
        std::sort(xs.begin(), xs.end(),
                  [](double a, double b) { return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b); });
        for (double x : xs) addStep(s, "girder", {x, y});
    };
    for (double x : {-0.6, 0.6, -1.0, 1.0, -1.4, 1.4})
        addStep(s, "girder", {x, 1.25});
    row(0.85, -2.8, 0.4, 15);
    for (double x : {0.0, -0.4, 0.4, -0.8, 0.8, -1.2, 1.2, -1.6, 1.6,
                     -2.0, 2.0})
        addStep(s, "girder", {x, 0.45});
    return s;
}

Scenario makeFish() {
    // 29 steps: supported keel piece first, then body, tail, dorsal outline
    Scenario s = wideArmBase();
    stageWide(s, "scale", 15, 14);

    addStep(s, "scale", {0.0, 0.6}).needs_support = true;
    s.steps.back().support_region = Pose2{{0.0, 0.25}, 0.0};

    for (double x : {-0.5, 0.5, -0.95, 0.95, -1.4, 1.4}) addStep(s, "scale", {x, 1.25});
    for (double x : {0.0, -0.45, 0.45, -0.9, 0.9, -1.35, 1.35, -1.8, 1.8})
        addStep(s, "scale", {x, 0.85});
    for (double x : {-0.45, 0.45, -0.9, 0.9, -1.35, 1.35, -1.8, 1.8})
        addStep(s, "scale", {x, 0.45});
    addStep(s, "scale", {-2.3, 0.65});
    addStep(s, "scale", {2.7, 0.65});
    addStep(s, "scale", {2.4, 1.25});
    addStep(s, "scale", {2.4, 0.85});
    addStep(s, "scale", {2.4, 0.45});
    return s;
}

// --------------------------------------------------------------------------
// independent-workspace fixtures

Scenario towersAt(double base_x) {
    Scenario s = dualArmBase(base_x);
    stageSplit(s, "block", 5, 5);
    // one L-shaped tower per side, strictly inside each arm's exclusive
    // reach. Steps alternate sides: each step's place only waits for the
    // previous step's place, so alternation keeps both arms pipelined.
    for (double y : {0.65, 0.35})
        for (int side : {-1, 1}) addStep(s, "block", {side * base_x - side * 0.75, y});
    for (double y : {0.8, 0.5, 0.2})
        for (int side : {-1, 1}) addStep(s, "block", {side * base_x - side * 0.45, y});
    return s;
}

Scenario makeTowers() { return towersAt(0.95); }
Scenario makeTowersWide() { return towersAt(1.45); }

// --------------------------------------------------------------------------
// special fixtures

Scenario makeMicro() {
    // tiny two-step scene kept coarse (dt = 1.0) so the full TPG has at most
    // 12 nodes and every linear extension can be enumerated
    Scenario s = dualArmBase();
    s.dt = 2.0;
    s.margin = 0.08;
    for (auto &r : s.world.robots) r.v_max = 2.0;
    addDisc(s, "block", {-1.45, 0.0});
    addDisc(s, "block", {1.45, 0.0});
    addStep(s, "block", {-0.5, 0.45});
    addStep(s, "block", {0.5, 0.45});
    return s;
}

Scenario makeCorridor() {
    // 5 steps: the last part threads a gap between two walls
    Scenario s = dualArmBase();
    s.world.static_obstacles.push_back({{{-0.5, 0.45}, 0.0}, 0.2, 0.04});
    s.world.static_obstacles.push_back({{{0.5, 0.45}, 0.0}, 0.2, 0.04});
    stageSplit(s, "crate", 3, 2);
    addStep(s, "crate", {0.0, 0.65});  // through the gap, before anything blocks it
    for (double x : {0.0, -0.45, 0.45}) addStep(s, "crate", {x, 0.2});
    addStep(s, "crate", {-0.75, 0.25});
    return s;
}

Scenario makeTrio() {
    Scenario s = baseScenario();
    s.world.robots.push_back(makeArm({-1.05, 0.0}, {0.6, 0.55}, {{1.571, 2.6}}));
    s.world.robots.push_back(makeArm({1.05, 0.0}, {0.6, 0.55}, {{1.571, -2.6}}));
    s.world.robots.push_back(makeArm({0.0, -1.05}, {0.6, 0.55}, {{-1.571, 2.6}}));
    for (const auto &r : s.world.robots) s.world.configs.push_back(r.home);
    s.world.attachments.assign(3, std::nullopt);

    for (int i = 0; i < 3; ++i)
        for (Vec2 p : stagingArc(s.world.robots[i].base, 1.0, 2, 30.0)) addDisc(s, "plate", p);

    // every plate keeps >= 0.78 from all three bases: two placed plates closer
    // in would encircle a base's first-link sweep and disconnect its C-space
    addStep(s, "plate", {-0.45, 0.55});
    addStep(s, "plate", {0.45, 0.55});
    addStep(s, "plate", {-0.8, -0.8});
    addStep(s, "plate", {0.8, -0.8});
    addStep(s, "plate", {0.0, 0.35});
    addStep(s, "plate", {0.0, -0.25});
    return s;
}

Scenario makeQuad() {
    Scenario s = baseScenario();
    s.world.robots.push_back(makeArm({-1.15, 0.0}, {0.6, 0.55}, {{1.571, 2.6}}));
    s.world.robots.push_back(makeArm({1.15, 0.0}, {0.6, 0.55}, {{1.571, -2.6}}));
    s.world.robots.push_back(makeArm({0.0, -1.15}, {0.6, 0.55}, {{-1.571, 2.6}}));
    s.world.robots.push_back(makeArm({0.0, 1.15}, {0.6, 0.55}, {{1.571, 2.6}}));
    for (const auto &r : s.world.robots) s.world.configs.push_back(r.home);
    s.world.attachments.assign(4, std::nullopt);

    for (int i = 0; i < 4; ++i)
        for (Vec2 p : stagingArc(s.world.robots[i].base, 1.0, 2, 30.0)) addDisc(s, "tile", p);

    addStep(s, "tile", {-0.6, 0.35});
    addStep(s, "tile", {0.6, 0.35});
    addStep(s, "tile", {-0.6, -0.35});
    addStep(s, "tile", {0.6, -0.35});
    addStep(s, "tile", {-0.25, 0.6});
    addStep(s, "tile", {0.25, 0.6});
    addStep(s, "tile", {-0.25, -0.6});
    addStep(s, "tile", {0.25, -0.6});
    return s;
}

void emit(const fs::path &dir, const std::string &name, const Scenario &s) {
    const std::string text = serializeScenario(s);
    // validate: parsing regenerates candidates and throws on infeasibility
    Scenario parsed = parseScenario(text);
    std::ofstream out(dir / (name + ".scn"), std::ios::binary);
    out << text;
    std::cout << name << ": " << parsed.steps.size() << " steps, "
              << parsed.world.objects.size() << " objects, margin " << parsed.margin << "\n";
}

}  // namespace

int main(int argc, char **argv) {
    fs::path dir = argc > 1 ? argv[1] : "fixtures";
    fs::create_directories(dir);
    int failures = 0;
    auto tryEmit = [&](const std::string &name, auto maker) {
        try {
            emit(dir, name, maker());
        } catch (const std::exception &e) {
            std::cerr << name << " failed: " << e.what() << "\n";
            ++failures;
        }
    };
    tryEmit("cliff", makeCliff);
    tryEmit("stairs", makeStairs);
    tryEmit("faucet", makeFaucet);
    tryEmit("bridge", makeBridge);
    tryEmit("fish", makeFish);
    tryEmit("towers", makeTowers);
    tryEmit("towers_wide", makeTowersWide);
    tryEmit("micro", makeMicro);
    tryEmit("corridor", makeCorridor);
    tryEmit("trio", makeTrio);
    tryEmit("quad", makeQuad);
    return failures == 0 ? 0 : 1;
}
