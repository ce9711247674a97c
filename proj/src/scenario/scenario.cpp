#include "arena/scenario/scenario.hpp"

#include "arena/core/assets.hpp"
#include "arena/core/error.hpp"
#include "arena/eval/evaluation.hpp"
#include "arena/policies/tabular.hpp"

namespace arena::scenario {

namespace {

constexpr std::uint64_t kRolloutStream = 0x726f6c6c;

std::vector<Trajectory> play_unit(agents::Agent& agent, std::uint64_t seed, int first_episode, int step_cap) {
    std::vector<Trajectory> unit;
    for (int h = 0; h < episodes_per_unit(agent.env()); ++h) {
        const std::uint64_t ep_seed = rollout_seed(seed, first_episode + h);
        agent.begin_episode();
        auto [env, obs] = reset(agent.env(), ep_seed, step_cap);
        Trajectory traj{agent.env(), ep_seed, {}};
        while (!env.done()) {
            const auto decision = agent.act(obs);
            const auto r = env.step(decision.action);
            Transition t{obs, decision.action, r.reward, r.observation, r.terminated, r.truncated};
            agent.observe(t);
            traj.steps.push_back(std::move(t));
            obs = r.observation;
        }
        unit.push_back(std::move(traj));
    }
    return unit;
}

// Episode return, or the agreement score of a group of blackjack hands.
double unit_score(EnvId env, std::span<const Trajectory> unit) {
    if (env != EnvId::blackjack) return eval::undiscounted_return(unit.front());
    std::vector<eval::BlackjackEpisode> hands;
    for (const auto& t : unit) {
        eval::BlackjackEpisode hand;
        for (const auto& s : t.steps) {
            hand.emplace_back(std::get<BlackjackObs>(s.state), std::get<DiscreteAction>(s.action).index);
        }
        hands.push_back(std::move(hand));
    }
    return eval::blackjack_agreement_score(hands, policies::optimal_policy(EnvId::blackjack));
}

void play_and_record(agents::Agent& agent, ScenarioResult& result, std::uint64_t seed, int step_cap,
                     std::vector<Trajectory>* unit_out = nullptr) {
    auto unit = play_unit(agent, seed, result.units * episodes_per_unit(agent.env()), step_cap);
    ++result.units;
    result.record.returns.push_back(unit_score(agent.env(), unit));
    result.episodes.insert(result.episodes.end(), unit.begin(), unit.end());
    if (unit_out != nullptr) *unit_out = std::move(unit);
}

}  // namespace

std::string_view to_string(Level level) {
    static constexpr std::array<std::string_view, 5> names = {"lv1", "lv2", "lv3", "lv4", "lv5"};
    return names[static_cast<std::size_t>(level)];
}

Level parse_level(std::string_view text) {
    for (Level l : kAllLevels) {
        const auto name = to_string(l);
        if (text == name || text == name.substr(2)) return l;
    }
    throw ConfigError("unknown level '" + std::string(text) + "'");
}

std::filesystem::path dataset_path(const std::filesystem::path& assets_dir, EnvId env, Level level) {
    const char* policy = level == Level::lv2 ? "random" : "expert";
    return assets_dir / "datasets" / (std::string(to_string(env)) + "." + policy + ".jsonl");
}

std::filesystem::path expert_prompt_path(const std::filesystem::path& assets_dir, EnvId env) {
    return assets_dir / "expert_prompts" / (std::string(to_string(env)) + ".txt");
}

ScenarioConfig make_scenario(Level level, EnvId env, const std::filesystem::path& assets_dir, std::uint64_t seed) {
    ScenarioConfig c;
    c.level = level;
    c.env = env;
    c.seed = seed;
    if (level == Level::lv2 || level == Level::lv4) {
        c.dataset = read_trajectory_file(dataset_path(assets_dir, env, level), env);
        if (c.dataset->episodes.empty()) throw FormatError("dataset for " + std::string(to_string(env)) + " is empty");
    }
    if (level == Level::lv5) {
        std::string text = read_text_file(expert_prompt_path(assets_dir, env));
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        c.expert_prompt = std::move(text);
    }
    return c;
}

int episodes_per_unit(EnvId env) { return env == EnvId::blackjack ? kBlackjackHandsPerUnit : 1; }

std::uint64_t rollout_seed(std::uint64_t seed, int episode) {
    return mix_seed(seed, kRolloutStream, static_cast<std::uint64_t>(episode));
}

ScenarioResult run_static(agents::Agent& agent, const std::optional<std::string>& knowledge, std::uint64_t seed,
                          int step_cap) {
    ScenarioResult result;
    if (knowledge) agent.set_expert_knowledge(*knowledge);
    agent.update(0, 1);
    result.knowledge_sizes.push_back(agent.knowledge().size());
    play_and_record(agent, result, seed, step_cap);
    return result;
}

ScenarioResult run_offline(agents::Agent& agent, std::span<const Trajectory> trajectories, std::uint64_t seed,
                           int step_cap) {
    ScenarioResult result;
    for (const auto& t : trajectories) {
        agent.add_experience(t);
        agent.update(0, 1);
        result.knowledge_sizes.push_back(agent.knowledge().size());
    }
    play_and_record(agent, result, seed, step_cap);
    return result;
}

ScenarioResult run_self_guided(agents::Agent& agent, int episodes, std::uint64_t seed, int step_cap) {
    if (episodes < 1) throw ConfigError("self-guided runs need at least one episode");
    ScenarioResult result;
    for (int i = 0; i < episodes; ++i) {
        agent.update(i, episodes);
        std::vector<Trajectory> unit;
        play_and_record(agent, result, seed, step_cap, &unit);
        const auto critique = agent.criticize(unit);
        agent.learn_from(unit, critique);
        result.knowledge_sizes.push_back(agent.knowledge().size());
    }
    return result;
}

ScenarioResult run_scenario(agents::Agent& agent, const ScenarioConfig& config) {
    ScenarioResult result;
    try {
        switch (config.level) {
            case Level::lv1: result = run_static(agent, std::nullopt, config.seed, config.step_cap); break;
            case Level::lv5:
                if (!config.expert_prompt) throw MissingAsset("lv5 needs an expert prompt");
                result = run_static(agent, config.expert_prompt, config.seed, config.step_cap);
                break;
            case Level::lv2:
            case Level::lv4:
                if (!config.dataset) throw MissingAsset(std::string(to_string(config.level)) + " needs a dataset");
                result = run_offline(agent, config.dataset->episodes, config.seed, config.step_cap);
                break;
            case Level::lv3: result = run_self_guided(agent, config.episodes, config.seed, config.step_cap); break;
        }
        result.record.status = eval::RunStatus::completed;
    } catch (const Error& ex) {
        result.record.status = eval::RunStatus::failed;
        result.record.note = ex.what();
    }
    auto& r = result.record;
    r.agent = std::string(agents::to_string(agent.kind()));
    r.env = config.env;
    r.level = std::string(to_string(config.level));
    r.seed = config.seed;
    if (agent.random_fallbacks() > 0 && r.note.empty()) {
        r.note = std::to_string(agent.random_fallbacks()) + " random fallback actions";
    }
    return result;
}

llm::CallTag cell_tag(agents::AgentKind agent, EnvId env, Level level, std::uint64_t seed) {
    return {std::string(agents::to_string(agent)), std::string(to_string(env)), std::string(to_string(level)), seed};
}

void fill_usage(eval::RunRecord& record, const std::vector<llm::UsageRecord>& records, const llm::CallTag& tag,
                const llm::Pricing* pricing) {
    record.prompt_tokens = 0;
    record.completion_tokens = 0;
    record.calls = 0;
    record.cost = 0.0;
    long long latency = 0;
    for (const auto& u : records) {
        if (u.tag.agent != tag.agent || u.tag.env != tag.env || u.tag.level != tag.level || u.tag.seed != tag.seed) {
            continue;
        }
        record.prompt_tokens += u.prompt_tokens;
        record.completion_tokens += u.completion_tokens;
        ++record.calls;
        latency += u.latency_ms;
        if (pricing != nullptr) record.cost += llm::call_cost(u, *pricing);
    }
    record.wall_time_s = static_cast<double>(latency) / 1000.0;
}

}  // namespace arena::scenario
