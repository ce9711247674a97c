// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any of them fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "arena/core/assets.hpp"
#include "arena/env/dynamics.hpp"
#include "arena/env/environment.hpp"
#include "arena/eval/evaluation.hpp"
#include "arena/grounding/grounding.hpp"
#include "arena/llm/mock.hpp"
#include "arena/policies/policies.hpp"
#include "arena/policies/tabular.hpp"
#include "arena/ppo/train.hpp"
#include "arena/scenario/scenario.hpp"
#include "golden/cartpole_observations.hpp"

using namespace arena;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void fail(Outcome& o, const std::string& why) {
    if (o.pass) o.detail.clear();
    o.pass = false;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += why;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double total(const Trajectory& t) {
    double r = 0.0;
    for (const auto& s : t.steps) r += s.reward;
    return r;
}

std::vector<eval::BlackjackEpisode> play_blackjack(int hands, std::uint64_t seed, const policies::TabularPolicy& p) {
    std::vector<eval::BlackjackEpisode> episodes;
    for (int h = 0; h < hands; ++h) {
        auto [env, obs] = reset(EnvId::blackjack, mix_seed(seed, static_cast<std::uint64_t>(h)));
        eval::BlackjackEpisode ep;
        while (!env.done()) {
            const auto& b = std::get<BlackjackObs>(obs);
            const int a = p.action_for(b);
            ep.emplace_back(b, a);
            obs = env.step(discrete(a)).observation;
        }
        episodes.push_back(ep);
    }
    return episodes;
}

// --- criteria -------------------------------------------------------------

Outcome cliff_optimality() {
    Outcome o;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto t = policies::rollout(EnvId::cliffwalking, seed, [](const Observation& obs) {
            return policies::expert_action(EnvId::cliffwalking, obs);
        });
        if (total(t) != -13.0) fail(o, "seed " + std::to_string(seed) + " returned " + fmt("%g", total(t)));
    }
    if (o.pass) o.detail = "-13 on seeds 0..99";
    return o;
}

Outcome threshold_table() {
    Outcome o;
    const auto t = eval::default_thresholds();
    const std::vector<std::tuple<std::string, double, double>> table = {
        {"blackjack", 10, 20},   {"cartpole", 40, 200},          {"cliffwalking", -200, -13},
        {"mountaincar", -200, -87}, {"mountaincar_continuous", 0, 94.53}, {"acrobot", -200, -72},
        {"taxi", 0, 7.52},       {"lunarlander", 120, 261}};
    for (const auto& [env, lo, hi] : table) {
        if (t.at(env).solvable != lo || t.at(env).sota != hi) fail(o, env + " differs");
    }
    const auto shipped = eval::load_thresholds(default_asset_dir() / "thresholds.csv");
    for (const auto& [env, th] : t.rows()) {
        if (shipped.at(env).solvable != th.solvable || shipped.at(env).sota != th.sota)
            fail(o, "shipped file differs for " + env);
    }
    const double n = eval::normalize(-118, t.at(EnvId::cliffwalking));
    if (std::abs(n - 0.4385) > 1e-4) fail(o, "normalize(-118) = " + fmt("%.6f", n));
    if (o.pass) o.detail = "8 envs match, normalize(-118) = " + fmt("%.4f", n);
    return o;
}

Outcome ppo_parameter_count() {
    const auto p = ppo::init_params<float>(2, 3, 0);
    const auto count = p.parameter_count();
    Outcome o{count == 8964, "init_params(2,3) has " + std::to_string(count) + " parameters"};
    return o;
}

Outcome ppo_env(EnvId env, const std::function<bool(const ppo::TrainResult<float>&, const ppo::PpoConfig&,
                                                    std::string&)>& judge) {
    Outcome o;
    int passed = 0;
    std::string per_seed;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto cfg = ppo::tuned_config(env);
        cfg.seed = seed;
        const auto result = ppo::train(env, cfg);
        std::string note;
        const bool ok = judge(result, cfg, note);
        passed += ok ? 1 : 0;
        per_seed += (seed ? ", " : "") + std::string("seed ") + std::to_string(seed) + " " + note + " in " +
                    std::to_string(result.curve.size()) + " epochs";
    }
    o.pass = passed >= 3;
    o.detail = std::to_string(passed) + "/5 seeds (" + per_seed + ")";
    return o;
}

Outcome ppo_cartpole() {
    return ppo_env(EnvId::cartpole, [](const auto& r, const auto&, std::string& note) {
        note = fmt("best %.1f", r.best_rolling_mean);
        return r.curve.size() <= 400 && r.best_rolling_mean >= 195.0;
    });
}

Outcome ppo_cliff() {
    return ppo_env(EnvId::cliffwalking, [](const auto& r, const auto& cfg, std::string& note) {
        const double g = ppo::greedy_return(r.params, EnvId::cliffwalking, cfg.seed, cfg.step_cap);
        note = fmt("greedy %g", g);
        return r.curve.size() <= 400 && g == -13.0;
    });
}

ppo::RolloutBatch<double> random_batch(const ppo::MlpParams<double>& p, int n, std::uint64_t seed) {
    Rng rng(seed);
    ppo::RolloutBatch<double> b;
    b.observations.resize(p.obs_dim, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < p.obs_dim; ++i) b.observations(i, j) = rng.uniform(-1, 1);
    const ppo::Mat<double> logp = ppo::log_softmax(ppo::forward(p, b.observations).logits);
    b.actions.resize(static_cast<std::size_t>(n));
    b.rewards = ppo::Vec<double>::Zero(n);
    b.values = ppo::Vec<double>::Zero(n);
    b.log_probs.resize(n);
    b.advantages.resize(n);
    b.returns.resize(n);
    for (int j = 0; j < n; ++j) {
        const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(p.action_num)));
        b.actions[static_cast<std::size_t>(j)] = a;
        const double shift = j % 3 == 0 ? rng.uniform(0.4, 0.6) * (j % 2 ? 1 : -1) : rng.uniform(-0.1, 0.1);
        b.log_probs(j) = logp(a, j) + shift;
        b.advantages(j) = rng.normal();
        b.returns(j) = rng.normal();
    }
    return b;
}

Outcome ppo_gradient_check() {
    using ppo::Dense;
    const auto p = ppo::init_params<double>(2, 3, 17);
    const auto batch = random_batch(p, 32, 99);
    const ppo::LossWeights w{0.2, 0.05};
    ppo::MlpParams<double> grad;
    ppo::ppo_loss(p, batch, w, &grad);

    const double h = 1e-5;
    auto numeric = p.zeros_like();
    auto probe = p;
    probe.zip(
        [&](Dense<double>& layer, Dense<double>& out) {
            auto perturb = [&](double& x, double& slot) {
                const double keep = x;
                x = keep + h;
                const double up = ppo::ppo_loss(probe, batch, w).total;
                x = keep - h;
                const double down = ppo::ppo_loss(probe, batch, w).total;
                x = keep;
                slot = (up - down) / (2 * h);
            };
            for (Eigen::Index i = 0; i < layer.weight.size(); ++i) perturb(layer.weight.data()[i], out.weight.data()[i]);
            for (Eigen::Index i = 0; i < layer.bias.size(); ++i) perturb(layer.bias.data()[i], out.bias.data()[i]);
        },
        numeric);

    double worst = 0.0;
    int tensors = 0;
    auto rel = [](const ppo::Mat<double>& a, const ppo::Mat<double>& b) {
        return (a - b).norm() / std::max(a.norm() + b.norm(), 1e-12);
    };
    grad.zip(
        [&](Dense<double>& analytic, Dense<double>& approx) {
            worst = std::max({worst, rel(analytic.weight, approx.weight), rel(analytic.bias, approx.bias)});
            tensors += 2;
        },
        numeric);
    return {worst < 1e-4 && tensors == 12, std::to_string(tensors) + " tensors, worst relative error " +
                                               fmt("%.2e", worst)};
}

Outcome blackjack_scorer() {
    Outcome o;
    const auto& oracle = policies::optimal_policy(EnvId::blackjack);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto hands = play_blackjack(20, seed, oracle);
        const int s = eval::blackjack_agreement_score(hands, oracle);
        if (s != 20) fail(o, "seed " + std::to_string(seed) + " scored " + std::to_string(s));
    }
    if (oracle.action_for(BlackjackObs{12, 6, false}) != 0) fail(o, "(12,6,no) should stick");
    if (oracle.action_for(BlackjackObs{17, 10, false}) != 0) fail(o, "(17,10,no) should stick");
    if (oracle.action_for(BlackjackObs{14, 1, false}) != 1) fail(o, "(14,1,no) should hit");
    if (o.pass) o.detail = "20/20 on seeds 0..49, three known decisions match";
    return o;
}

Outcome env_dynamics() {
    Outcome o;
    const auto c = dynamics::cartpole_update(CartPoleObs{}, 10.0);
    if (c.x != 0.0 || std::abs(c.v - 0.19512) > 1e-5 || c.theta != 0.0 || std::abs(c.omega + 0.29268) > 1e-5)
        fail(o, "cartpole zero-state step is off");

    const auto wall = dynamics::mountaincar_update(MountainCarObs{-1.19, -0.05}, 0);
    if (wall.x != -1.2 || wall.v != 0.0) fail(o, "mountaincar left wall does not stop the car");
    Rng policy(3);
    int mc_violations = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        auto [env, obs] = reset(EnvId::mountaincar, seed);
        while (!env.done()) {
            const auto m = std::get<MountainCarObs>(env.step(discrete(static_cast<int>(policy.below(3)))).observation);
            if (std::abs(m.v) > 0.07 || m.x < -1.2 || m.x > 0.6) ++mc_violations;
        }
    }
    if (mc_violations) fail(o, std::to_string(mc_violations) + " mountaincar clipping violations");

    constexpr int n = 100000;
    std::map<int, int> landed;
    for (int seed = 0; seed < n; ++seed) {
        auto [env, obs] = reset(EnvId::frozenlake, static_cast<std::uint64_t>(seed));
        ++landed[std::get<FrozenLakeObs>(env.step(discrete(1)).observation).cell];
    }
    double worst = 0.0;
    for (int cell : {0, 1, 4}) worst = std::max(worst, std::abs(landed[cell] / double(n) - 1.0 / 3.0));
    if (landed.size() != 3 || worst >= 0.01) fail(o, "frozenlake slip frequencies off by " + fmt("%.4f", worst));
    if (o.pass) o.detail = "cartpole step within 1e-5, mountaincar clipped, slip deviation " + fmt("%.4f", worst);
    return o;
}

Outcome translator_golden() {
    int matched = 0;
    for (const auto& g : golden::kCartPoleObservations)
        matched += grounding::translate_observation(EnvId::cartpole, g.state) == g.text ? 1 : 0;
    return {matched == 20, std::to_string(matched) + "/20 cartpole sentences byte-identical"};
}

bool is_actor_prompt(const llm::ChatRequest& r) {
    return llm::joined_content(r).find("Current Game State:") != std::string::npos;
}

struct MockCell {
    MockCell(agents::AgentKind kind, llm::MockBackend::Responder responder, std::uint64_t seed)
        : mock({}, std::move(responder)),
          tag(scenario::cell_tag(kind, EnvId::cliffwalking, scenario::Level::lv3, seed)),
          gateway(mock, ledger, tag),
          agent(kind, EnvId::cliffwalking, gateway, {.seed = seed}) {}
    llm::MockBackend mock;
    llm::UsageLedger ledger;
    llm::CallTag tag;
    llm::Gateway gateway;
    agents::Agent agent;
};

llm::MockBackend::Responder cliff_path_actor() {
    auto step = std::make_shared<int>(0);
    return [step](const llm::ChatRequest& r) {
        if (!is_actor_prompt(r)) return std::string("Go up once, then right along the edge.");
        const int k = (*step)++ % 13;
        const int index = k == 0 ? 0 : (k == 12 ? 2 : 1);
        return "{\"action\": " + std::to_string(grounding::valid_action_numbers(EnvId::cliffwalking)[index]) + "}";
    };
}

Outcome mock_end_to_end() {
    Outcome o;
    auto run_exe = [] {
        MockCell cell(agents::AgentKind::exe, cliff_path_actor(), 11);
        scenario::ScenarioConfig config;
        config.level = scenario::Level::lv3;
        config.env = EnvId::cliffwalking;
        config.seed = 11;
        auto result = scenario::run_scenario(cell.agent, config);
        scenario::fill_usage(result.record, cell.ledger.records(), cell.tag, nullptr);
        std::string bodies;
        for (const auto& r : cell.mock.requests()) bodies += llm::request_body(r, "mock") + "\n";
        return std::pair{result, bodies};
    };
    const auto [a, bodies_a] = run_exe();
    const auto [b, bodies_b] = run_exe();
    if (a.record.status != eval::RunStatus::completed) fail(o, "exe run failed: " + a.record.note);
    if (a.episodes.size() != 5) fail(o, std::to_string(a.episodes.size()) + " trajectories");
    for (std::size_t i = 1; i < a.knowledge_sizes.size(); ++i)
        if (a.knowledge_sizes[i] != a.knowledge_sizes[i - 1] + 1) fail(o, "knowledge did not grow by one");
    if (a.knowledge_sizes.size() != 5) fail(o, "knowledge tracked over " + std::to_string(a.knowledge_sizes.size()));
    if (a.record.returns.empty() || a.record.returns.back() != -13.0) fail(o, "final return is not -13");
    if (eval::serialize_record(a.record) != eval::serialize_record(b.record) || bodies_a != bodies_b)
        fail(o, "reruns differ");

    auto count = std::make_shared<int>(0);
    MockCell refl(agents::AgentKind::reflexion,
                  [count](const llm::ChatRequest& r) {
                      if (is_actor_prompt(r)) return std::string("{\"action\": 2}");
                      return "reflection " + std::to_string((*count)++);
                  },
                  7);
    scenario::run_self_guided(refl.agent, 3, 7, 20);
    std::string last;
    for (const auto& r : refl.mock.requests())
        if (is_actor_prompt(r)) last = llm::joined_content(r);
    const auto p0 = last.find("reflection 0");
    const auto p1 = last.find("reflection 1");
    if (p0 == std::string::npos || p1 == std::string::npos || p0 > p1) fail(o, "reflexion memory out of order");
    if (o.pass) o.detail = "exe: 5 trajectories, +1 knowledge per episode, final -13, identical rerun; reflexion order ok";
    return o;
}

Outcome scenario_budgets() {
    Outcome o;
    const auto assets = default_asset_dir();
    for (scenario::Level level : scenario::kAllLevels) {
        auto config = scenario::make_scenario(level, EnvId::cliffwalking, assets, 7);
        config.step_cap = 20;
        llm::MockBackend mock({}, [](const llm::ChatRequest&) { return std::string("{\"action\": 2}"); });
        llm::UsageLedger ledger;
        llm::Gateway gateway(mock, ledger, scenario::cell_tag(agents::AgentKind::naive, EnvId::cliffwalking, level, 7));
        agents::Agent agent(agents::AgentKind::naive, EnvId::cliffwalking, gateway);
        const auto result = scenario::run_scenario(agent, config);
        const std::size_t expected = level == scenario::Level::lv3 ? 5 : 1;
        if (result.episodes.size() != expected)
            fail(o, std::string(scenario::to_string(level)) + " played " + std::to_string(result.episodes.size()));
    }
    for (EnvId env : kAllEnvs) {
        for (scenario::Level level : {scenario::Level::lv2, scenario::Level::lv4}) {
            const auto config = scenario::make_scenario(level, env, assets, 0);
            if (!config.dataset || config.dataset->episodes.size() != 5)
                fail(o, std::string(to_string(env)) + " " + std::string(scenario::to_string(level)) +
                            " dataset is not 5 trajectories");
        }
    }
    if (o.pass) o.detail = "lv1/2/4/5 one episode, lv3 five; 14 shipped datasets hold 5 trajectories";
    return o;
}

Outcome expert_goal_reaching() {
    Outcome o;
    auto expert = [](EnvId env) {
        return [env](const Observation& obs) { return policies::expert_action(env, obs); };
    };
    double mc_worst = -1e9, mcc_lo = 1e9, mcc_hi = -1e9;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const double mc = total(policies::rollout(EnvId::mountaincar, seed, expert(EnvId::mountaincar)));
        mc_worst = seed == 0 ? mc : std::min(mc_worst, mc);
        const double mcc =
            total(policies::rollout(EnvId::mountaincar_continuous, seed, expert(EnvId::mountaincar_continuous)));
        mcc_lo = std::min(mcc_lo, mcc);
        mcc_hi = std::max(mcc_hi, mcc);
    }
    if (!(mc_worst > -200.0)) fail(o, "mountaincar worst " + fmt("%g", mc_worst));
    if (mcc_lo < 85.0 || mcc_hi > 96.0 || mcc_lo < 0.0)
        fail(o, "mountaincar_continuous range " + fmt("%.2f", mcc_lo) + ".." + fmt("%.2f", mcc_hi));
    double taxi = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) taxi += total(policies::rollout(EnvId::taxi, seed, expert(EnvId::taxi))) / 100.0;
    if (taxi < 5.0) fail(o, "taxi mean " + fmt("%.2f", taxi));
    if (o.pass)
        o.detail = "mountaincar worst " + fmt("%g", mc_worst) + ", continuous " + fmt("%.2f", mcc_lo) + ".." +
                   fmt("%.2f", mcc_hi) + ", taxi mean " + fmt("%.2f", taxi);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"cliffwalking expert optimality", cliff_optimality},
        {"threshold table", threshold_table},
        {"ppo parameter count", ppo_parameter_count},
        {"ppo cartpole", ppo_cartpole},
        {"ppo cliffwalking", ppo_cliff},
        {"ppo gradient check", ppo_gradient_check},
        {"blackjack scorer", blackjack_scorer},
        {"environment dynamics", env_dynamics},
        {"cartpole translator golden", translator_golden},
        {"mock end-to-end", mock_end_to_end},
        {"scenario budgets", scenario_budgets},
        {"expert goal-reaching", expert_goal_reaching},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& ex) {
            o = {false, std::string("threw: ") + ex.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
