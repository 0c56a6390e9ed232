#include "apexmr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace apexmr {

using nlohmann::json;

const SkillSpec &Scenario::skill(const std::string &name) const {
    auto it = skills.find(name);
    if (it == skills.end()) throw ValidationError("missing skill spec: " + name);
    return it->second;
}

int Scenario::giverFor(int primary) const {
    const int n = static_cast<int>(numRobots());
    if (n == 2) return 1 - primary;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (i == primary) continue;
        const double d = (world.robots[i].base - world.robots[primary].base).norm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

Vec2 Scenario::handoverPoint(int primary) const {
    const int giver = giverFor(primary);
    return (world.robots[primary].base + world.robots[giver].base) * 0.5;
}

Vec2 Scenario::supportPoint(const AssemblyStep &step) const {
    if (step.support_region) return step.support_region->p;
    return step.target_pose.p + Vec2{0.0, -0.15};
}

// ---------------------------------------------------------------------------
// Inverse kinematics

namespace {

std::vector<Configuration> ik2Link(const Vec2 &base, double l1, double l2, const Vec2 &target) {
    const Vec2 d = target - base;
    const double r2 = d.dot(d);
    double c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    if (c2 > 1.0 + 1e-9 || c2 < -1.0 - 1e-9) return {};
    c2 = std::clamp(c2, -1.0, 1.0);
    const double q2 = std::acos(c2);
    const double base_angle = std::atan2(d.y, d.x);
    std::vector<Configuration> out;
    // elbow-up (positive q2) listed before elbow-down
    for (const double s : {+1.0, -1.0}) {
        const double q2s = s * q2;
        const double q1 = base_angle - std::atan2(l2 * std::sin(q2s), l1 + l2 * std::cos(q2s));
        out.push_back({{wrapAngle(q1), wrapAngle(q2s)}});
        if (q2 < 1e-9) break;  // straight arm: both branches coincide
    }
    return out;
}

}  // namespace

std::vector<Configuration> planarIk(const RobotModel &robot, const Pose2 &target) {
    if (robot.dof() == 2) {
        return ik2Link(robot.base, robot.link_lengths[0], robot.link_lengths[1], target.p);
    }
    if (robot.dof() == 3) {
        const Vec2 wrist{target.p.x - robot.link_lengths[2] * std::cos(target.theta),
                         target.p.y - robot.link_lengths[2] * std::sin(target.theta)};
        auto sols = ik2Link(robot.base, robot.link_lengths[0], robot.link_lengths[1], wrist);
        for (auto &q : sols) {
            q.joints.push_back(wrapAngle(target.theta - q.joints[0] - q.joints[1]));
        }
        return sols;
    }
    throw ValidationError("planarIk supports 2- and 3-link arms only");
}

// ---------------------------------------------------------------------------
// JSON parsing

namespace {

Vec2 parseVec2(const json &j) {
    if (!j.is_array() || j.size() != 2) throw ParseError("expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Pose2 parsePose(const json &j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected [x, y, theta]");
    return {{j[0].get<double>(), j[1].get<double>()}, j[2].get<double>()};
}

json dumpPose(const Pose2 &p) { return json::array({p.p.x, p.p.y, p.theta}); }

Configuration parseConfig(const json &j) {
    Configuration q;
    for (const auto &v : j) q.joints.push_back(v.get<double>());
    return q;
}

void requireFinite(double v, const std::string &what) {
    if (!std::isfinite(v)) throw ValidationError(what + " is not finite");
}

// IK candidates at a workspace point, ordered deterministically. For 3-link
// arms, P evenly spaced approach headings are tried.
std::vector<Configuration> ikCandidatesAt(const RobotModel &robot, const Vec2 &point,
                                          double base_heading, int P) {
    if (robot.dof() == 2) return planarIk(robot, {point, 0.0});
    std::vector<Configuration> out;
    for (int g = 0; g < P; ++g) {
        const double heading = base_heading + 2.0 * M_PI * g / P;
        for (auto &q : planarIk(robot, {point, heading})) out.push_back(std::move(q));
    }
    return out;
}

}  // namespace

Scenario parseScenario(const std::string &json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception &e) {
        throw ParseError(std::string("scenario parse error: ") + e.what());
    }

    Scenario s;
    try {
        for (const auto &jr : doc.at("robots")) {
            RobotModel r;
            r.base = parseVec2(jr.at("base"));
            r.link_lengths = jr.at("link_lengths").get<std::vector<double>>();
            r.link_radius = jr.at("link_radius").get<double>();
            r.home = parseConfig(jr.at("home"));
            r.v_max = jr.at("v_max").get<double>();
            s.world.robots.push_back(std::move(r));
        }
        for (const auto &jo : doc.at("objects")) {
            ObjectShape o;
            o.id = jo.at("id").get<int>();
            const std::string kind = jo.at("kind").get<std::string>();
            if (kind == "disc")
                o.kind = ObjectShape::Kind::Disc;
            else if (kind == "rectangle")
                o.kind = ObjectShape::Kind::Rectangle;
            else
                throw ParseError("object kind must be 'disc' or 'rectangle', got " + kind);
            o.dimensions = jo.at("dimensions").get<std::vector<double>>();
            o.type_tag = jo.at("type_tag").get<std::string>();
            o.pose = parsePose(jo.at("pose"));
            s.world.objects.push_back(std::move(o));
        }
        if (doc.contains("obstacles")) {
            for (const auto &jb : doc.at("obstacles")) {
                Rect r;
                r.pose = parsePose(jb.at("pose"));
                r.half_x = jb.at("half_x").get<double>();
                r.half_y = jb.at("half_y").get<double>();
                s.world.static_obstacles.push_back(r);
            }
        }
        for (const auto &js : doc.at("steps")) {
            AssemblyStep st;
            st.index = js.at("index").get<int>();
            st.required_type = js.at("required_type").get<std::string>();
            st.target_pose = parsePose(js.at("target_pose"));
            st.needs_support = js.at("needs_support").get<bool>();
            st.needs_handover = js.at("needs_handover").get<bool>();
            if (js.contains("support_region")) st.support_region = parsePose(js.at("support_region"));
            s.steps.push_back(std::move(st));
        }
        for (const auto &jk : doc.at("skills")) {
            SkillSpec sp;
            sp.name = jk.at("name").get<std::string>();
            sp.nominal_duration = jk.at("nominal_duration").get<double>();
            const auto &jj = jk.at("duration_jitter");
            sp.duration_jitter = {jj.at("min").get<double>(), jj.at("median").get<double>(),
                                  jj.at("max").get<double>()};
            const std::string gen = jk.at("reference_path_generator").get<std::string>();
            if (gen == "attach-twist")
                sp.generator = SkillSpec::Generator::AttachTwist;
            else if (gen == "goal-reach")
                sp.generator = SkillSpec::Generator::GoalReach;
            else
                throw ParseError("reference_path_generator must be 'attach-twist' or 'goal-reach'");
            s.skills.emplace(sp.name, std::move(sp));
        }
        const auto &jp = doc.at("params");
        s.dt = jp.at("dt").get<double>();
        if (jp.contains("lambda")) s.lambda = jp.at("lambda").get<double>();
        s.P = jp.at("P").get<int>();
        s.rng_seed = jp.at("seed").get<std::uint64_t>();
        if (jp.contains("margin")) s.margin = jp.at("margin").get<double>();
    } catch (const json::exception &e) {
        throw ParseError(std::string("scenario parse error: ") + e.what());
    }

    // -------------------- validation --------------------
    if (s.dt <= 0.0) throw ValidationError("params.dt must be > 0");
    if (s.P < 1) throw ValidationError("params.P must be >= 1");
    for (size_t i = 0; i < s.world.robots.size(); ++i) {
        const auto &r = s.world.robots[i];
        if (r.link_lengths.empty() || r.dof() > 3)
            throw ValidationError("robot " + std::to_string(i) + ": need 1..3 links");
        for (double l : r.link_lengths)
            if (!(l > 0.0)) throw ValidationError("robot " + std::to_string(i) +
                                                  ": link lengths must be > 0");
        if (!(r.link_radius > 0.0))
            throw ValidationError("robot " + std::to_string(i) + ": link_radius must be > 0");
        if (!(r.v_max > 0.0))
            throw ValidationError("robot " + std::to_string(i) + ": v_max must be > 0");
        if (r.home.dof() != r.dof())
            throw ValidationError("robot " + std::to_string(i) + ": home dof mismatch");
        for (double q : r.home.joints) requireFinite(q, "home joint");
    }
    for (const auto &o : s.world.objects) {
        for (double d : o.dimensions)
            if (!(d > 0.0)) throw ValidationError("object " + std::to_string(o.id) +
                                                  ": dimensions must be > 0");
        requireFinite(o.pose.p.x, "object pose");
        requireFinite(o.pose.p.y, "object pose");
        const size_t want = o.kind == ObjectShape::Kind::Disc ? 1 : 2;
        if (o.dimensions.size() != want)
            throw ValidationError("object " + std::to_string(o.id) + ": wrong dimension count");
    }
    for (size_t j = 0; j < s.steps.size(); ++j) {
        if (s.steps[j].index != static_cast<int>(j) + 1)
            throw ValidationError("step indices must be contiguous 1..N_a (step " +
                                  std::to_string(j) + " has index " +
                                  std::to_string(s.steps[j].index) + ")");
        if (s.steps[j].needs_handover && !s.steps[j].needs_support)
            throw ValidationError("step " + std::to_string(s.steps[j].index) +
                                  ": needs_handover implies needs_support");
    }
    for (const auto &[name, sp] : s.skills) {
        if (!(sp.nominal_duration > 0.0))
            throw ValidationError("skill " + name + ": nominal_duration must be > 0");
        const auto &jj = sp.duration_jitter;
        if (!(jj.min > 0.0) || jj.min > jj.median || jj.median > jj.max)
            throw ValidationError("skill " + name + ": jitter must satisfy 0 < min <= median <= max");
    }
    if (!s.steps.empty()) {
        for (const char *name :
             {"pick", "place-down", "place-up", "handover", "support-bottom", "support-top"})
            s.skill(name);
    }

    // Normalize joint angles and set the world's initial robot state.
    for (auto &r : s.world.robots)
        for (auto &q : r.home.joints) q = wrapAngle(q);
    for (const auto &r : s.world.robots) s.world.configs.push_back(r.home);
    s.world.attachments.assign(s.world.robots.size(), std::nullopt);

    if (s.margin <= 0.0) {
        // Default inflation: covers the workspace displacement of the two
        // largest arms over half a discretization step, plus 1 cm.
        std::vector<double> sweep;
        for (const auto &r : s.world.robots) sweep.push_back(r.v_max * s.dt * r.reach());
        std::sort(sweep.rbegin(), sweep.rend());
        const double two = sweep.size() >= 2 ? sweep[0] + sweep[1] : (sweep.empty() ? 0.0 : sweep[0]);
        s.margin = 0.5 * two + 0.01;
    }

    for (size_t i = 0; i < s.world.robots.size(); ++i)
        if (configBlocked(s.world, static_cast<int>(i), s.world.robots[i].home, std::nullopt,
                          s.margin, -1, false))
            throw ValidationError("robot " + std::to_string(i) +
                                  ": home pose collides with the static scene");
    for (size_t i = 0; i < s.world.robots.size(); ++i)
        for (size_t j = i + 1; j < s.world.robots.size(); ++j)
            if (robotsCollide(s.world, static_cast<int>(i), s.world.robots[i].home, std::nullopt,
                              static_cast<int>(j), s.world.robots[j].home, std::nullopt, s.margin))
                throw ValidationError("home poses of robots " + std::to_string(i) + " and " +
                                      std::to_string(j) + " collide");

    // -------------------- candidate precomputation --------------------
    const int N = static_cast<int>(s.numRobots());
    const int Nb = static_cast<int>(s.world.objects.size());
    const int Na = static_cast<int>(s.steps.size());
    s.grasp_candidates.assign(Na, std::vector<std::vector<std::vector<GraspCandidate>>>(
                                      N, std::vector<std::vector<GraspCandidate>>(Nb)));
    s.support_candidates.assign(Na, std::vector<std::vector<SupportCandidate>>(N));

    // Candidates for step j must stay valid once steps 1..j-1 are assembled,
    // whichever objects the assignment consumes. Ghost copies of the earlier
    // targets are added as extra obstacles; staged objects all stay in place,
    // which over-approximates every reachable mid-assembly world.
    WorldState ghost_world = s.world;
    const auto ghostShapeFor = [&](const AssemblyStep &st) -> ObjectShape {
        for (const auto &o : s.world.objects)
            if (o.type_tag == st.required_type) {
                ObjectShape g = o;
                g.id = 1000000 + st.index;
                g.pose = st.target_pose;
                return g;
            }
        ObjectShape g;
        g.id = 1000000 + st.index;
        g.pose = st.target_pose;
        g.dimensions = {0.01};
        return g;
    };

    const auto freeConfig = [&](int robot, const Configuration &q,
                                const std::optional<Attachment> &attach, int ignore_object) {
        return !configBlocked(ghost_world, robot, q, attach, s.margin, ignore_object, true);
    };
    const auto firstFree = [&](int robot, const Vec2 &point, int ignore_object,
                               const std::optional<Attachment> &attach) -> std::optional<Configuration> {
        for (const auto &q : ikCandidatesAt(s.world.robots[robot], point, 0.0, s.P))
            if (freeConfig(robot, q, attach, ignore_object)) return q;
        return std::nullopt;
    };

    for (int j = 0; j < Na; ++j) {
        const AssemblyStep &step = s.steps[j];
        if (j > 0) ghost_world.objects.push_back(ghostShapeFor(s.steps[j - 1]));
        bool any = false;
        for (int i = 0; i < N; ++i) {
            if (step.needs_handover) {
                const int giver = s.giverFor(i);
                const Vec2 h = s.handoverPoint(i);
                const auto receive = firstFree(i, h, -1, std::nullopt);
                if (!receive) continue;
                // the receiver stages at a standoff so it never crowds the
                // giver's hand before the object is released
                const Vec2 rdir = s.world.robots[i].base - h;
                const Vec2 approach_pt = h + rdir * (0.3 / std::max(1e-9, rdir.norm()));
                const auto approach = firstFree(i, approach_pt, -1, std::nullopt);
                if (!approach) continue;
                for (int k = 0; k < Nb; ++k) {
                    const ObjectShape &obj = s.world.objects[k];
                    if (obj.type_tag != step.required_type) continue;
                    std::vector<GraspCandidate> cands;
                    const auto picks = ikCandidatesAt(s.world.robots[giver], obj.pose.p,
                                                      obj.pose.theta, s.P);
                    const auto places = ikCandidatesAt(s.world.robots[i], step.target_pose.p,
                                                       step.target_pose.theta, s.P);
                    for (const auto &qp : picks) {
                        if (static_cast<int>(cands.size()) >= s.P) break;
                        // the pick skill ends on a wrist twist, so the twisted
                        // pose must be free as well
                        if (!freeConfig(giver, qp, std::nullopt, obj.id)) continue;
                        if (!freeConfig(giver, twistOf(qp), std::nullopt, obj.id)) continue;
                        for (const auto &ql : places) {
                            if (static_cast<int>(cands.size()) >= s.P) break;
                            // object rides on the receiver's end-effector
                            const Pose2 ee_r = forwardKinematics(s.world.robots[i], *receive).ee;
                            const Attachment a{obj.id, ee_r.inverseTimes({h, 0.0})};
                            if (!freeConfig(i, ql, a, obj.id)) continue;
                            if (!freeConfig(i, twistOf(ql), a, obj.id)) continue;
                            cands.push_back({qp, ql, *receive, *approach});
                        }
                    }
                    if (!cands.empty()) any = true;
                    s.grasp_candidates[j][i][k] = std::move(cands);
                }
            } else {
                for (int k = 0; k < Nb; ++k) {
                    const ObjectShape &obj = s.world.objects[k];
                    if (obj.type_tag != step.required_type) continue;
                    std::vector<GraspCandidate> cands;
                    const auto picks =
                        ikCandidatesAt(s.world.robots[i], obj.pose.p, obj.pose.theta, s.P);
                    const auto places = ikCandidatesAt(s.world.robots[i], step.target_pose.p,
                                                       step.target_pose.theta, s.P);
                    for (const auto &qp : picks) {
                        if (static_cast<int>(cands.size()) >= s.P) break;
                        // pick and place skills end on a wrist twist; require
                        // the twisted poses to be free too
                        if (!freeConfig(i, qp, std::nullopt, obj.id)) continue;
                        if (!freeConfig(i, twistOf(qp), std::nullopt, obj.id)) continue;
                        const Pose2 ee = forwardKinematics(s.world.robots[i], qp).ee;
                        const Attachment a{obj.id, ee.inverseTimes(obj.pose)};
                        for (const auto &ql : places) {
                            if (static_cast<int>(cands.size()) >= s.P) break;
                            if (!freeConfig(i, ql, a, obj.id)) continue;
                            if (!freeConfig(i, twistOf(ql), a, obj.id)) continue;
                            cands.push_back({qp, ql, {}, {}});
                        }
                    }
                    if (!cands.empty()) any = true;
                    s.grasp_candidates[j][i][k] = std::move(cands);
                }
            }
            if (step.needs_support) {
                // i here is the candidate *support* robot
                std::vector<SupportCandidate> sup;
                const Vec2 sp = step.needs_handover
                                    ? (step.support_region ? step.support_region->p
                                                           : step.target_pose.p + Vec2{0.0, 0.15})
                                    : s.supportPoint(step);
                Configuration give, give_retreat;
                bool give_ok = true;
                if (step.needs_handover) {
                    // treat robot i as the giver; the handover point pairs it
                    // with its nearest primary
                    int primary = -1;
                    for (int p = 0; p < N; ++p)
                        if (p != i && s.giverFor(p) == i) {
                            primary = p;
                            break;
                        }
                    if (primary < 0) give_ok = false;
                    if (give_ok) {
                        const Vec2 h = s.handoverPoint(primary);
                        const Vec2 dir = s.world.robots[i].base - h;
                        const double dn = std::max(1e-9, dir.norm());
                        const Vec2 retreat_pt = h + dir * (0.25 / dn);
                        const auto g1 = firstFree(i, h, -1, std::nullopt);
                        const auto g2 = firstFree(i, retreat_pt, -1, std::nullopt);
                        if (g1 && g2) {
                            give = *g1;
                            give_retreat = *g2;
                        } else {
                            give_ok = false;
                        }
                    }
                }
                if (give_ok) {
                    for (const auto &q :
                         ikCandidatesAt(s.world.robots[i], sp, step.target_pose.theta, s.P)) {
                        if (static_cast<int>(sup.size()) >= s.P) break;
                        if (!freeConfig(i, q, std::nullopt, -1)) continue;
                        sup.push_back({q, give, give_retreat});
                    }
                }
                s.support_candidates[j][i] = std::move(sup);
            }
        }
        if (!any && Na > 0)
            throw InfeasibilityError("step " + std::to_string(step.index) +
                                     " (type '" + step.required_type +
                                     "') has no feasible grasp candidate");
        if (step.needs_support) {
            bool any_sup = false;
            for (int i = 0; i < N; ++i) any_sup |= !s.support_candidates[j][i].empty();
            if (!any_sup)
                throw InfeasibilityError("step " + std::to_string(step.index) +
                                         " has no feasible support candidate");
        }
    }
    return s;
}

Scenario loadScenario(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parseScenario(ss.str());
}

std::string serializeScenario(const Scenario &s) {
    json doc;
    doc["robots"] = json::array();
    for (const auto &r : s.world.robots) {
        json jr;
        jr["base"] = json::array({r.base.x, r.base.y});
        jr["link_lengths"] = r.link_lengths;
        jr["link_radius"] = r.link_radius;
        jr["home"] = r.home.joints;
        jr["v_max"] = r.v_max;
        doc["robots"].push_back(jr);
    }
    doc["objects"] = json::array();
    for (const auto &o : s.world.objects) {
        json jo;
        jo["id"] = o.id;
        jo["kind"] = o.kind == ObjectShape::Kind::Disc ? "disc" : "rectangle";
        jo["dimensions"] = o.dimensions;
        jo["type_tag"] = o.type_tag;
        jo["pose"] = dumpPose(o.pose);
        doc["objects"].push_back(jo);
    }
    doc["obstacles"] = json::array();
    for (const auto &b : s.world.static_obstacles) {
        json jb;
        jb["pose"] = dumpPose(b.pose);
        jb["half_x"] = b.half_x;
        jb["half_y"] = b.half_y;
        doc["obstacles"].push_back(jb);
    }
    doc["steps"] = json::array();
    for (const auto &st : s.steps) {
        json js;
        js["index"] = st.index;
        js["required_type"] = st.required_type;
        js["target_pose"] = dumpPose(st.target_pose);
        js["needs_support"] = st.needs_support;
        js["needs_handover"] = st.needs_handover;
        if (st.support_region) js["support_region"] = dumpPose(*st.support_region);
        doc["steps"].push_back(js);
    }
    doc["skills"] = json::array();
    for (const auto &[name, sp] : s.skills) {
        json jk;
        jk["name"] = name;
        jk["nominal_duration"] = sp.nominal_duration;
        jk["duration_jitter"] = {{"min", sp.duration_jitter.min},
                                 {"median", sp.duration_jitter.median},
                                 {"max", sp.duration_jitter.max}};
        jk["reference_path_generator"] =
            sp.generator == SkillSpec::Generator::AttachTwist ? "attach-twist" : "goal-reach";
        doc["skills"].push_back(jk);
    }
    doc["params"]["dt"] = s.dt;
    if (s.lambda) doc["params"]["lambda"] = *s.lambda;
    doc["params"]["P"] = s.P;
    doc["params"]["seed"] = s.rng_seed;
    doc["params"]["margin"] = s.margin;
    return doc.dump(2);
}

}  // namespace apexmr
