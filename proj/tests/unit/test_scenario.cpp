#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "arena/core/error.hpp"
#include "arena/eval/evaluation.hpp"
#include "arena/grounding/grounding.hpp"
#include "arena/llm/mock.hpp"
#include "arena/policies/policies.hpp"
#include "arena/policies/tabular.hpp"
#include "arena/scenario/scenario.hpp"

using namespace arena;
using namespace arena::scenario;
using arena::agents::Agent;
using arena::agents::AgentKind;
using arena::llm::MockBackend;

namespace {

bool contains(const std::string& text, std::string_view needle) { return text.find(needle) != std::string::npos; }

bool is_actor_prompt(const llm::ChatRequest& r) {
    return contains(llm::joined_content(r), "Current Game State:");
}

// Replies to actor prompts by always choosing `action_number`, learner/critic
// prompts get a short note.
MockBackend::Responder constant_actor(int action_number) {
    return [action_number](const llm::ChatRequest& r) {
        if (is_actor_prompt(r)) return "{\"action\": " + std::to_string(action_number) + "}";
        return std::string("Stay away from the cliff.");
    };
}

// Plays the shortest cliff path: up, eleven times right, down.
MockBackend::Responder cliff_path_actor() {
    auto step = std::make_shared<int>(0);
    return [step](const llm::ChatRequest& r) {
        if (!is_actor_prompt(r)) return std::string("Go up once, then right along the edge.");
        const int k = (*step)++ % 13;
        const int index = k == 0 ? 0 : (k == 12 ? 2 : 1);
        return "{\"action\": " + std::to_string(grounding::valid_action_numbers(EnvId::cliffwalking)[index]) + "}";
    };
}

struct Cell {
    Cell(AgentKind kind, EnvId env, Level level, MockBackend::Responder responder, std::uint64_t seed = 7)
        : mock({}, std::move(responder)),
          tag(cell_tag(kind, env, level, seed)),
          gateway(mock, ledger, tag),
          agent(kind, env, gateway, {.seed = seed}) {}
    MockBackend mock;
    llm::UsageLedger ledger;
    llm::CallTag tag;
    llm::Gateway gateway;
    Agent agent;
};

TrajectoryFile small_dataset(EnvId env, const std::string& policy) {
    const auto kind = policies::parse_policy_kind(policy);
    return {env, 3, std::string(policies::to_string(kind)), creation_stamp(), policies::generate_dataset(kind, env, 5, 3)};
}

std::filesystem::path temp_assets(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("arena_scenario_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir / "datasets");
    std::filesystem::create_directories(dir / "expert_prompts");
    return dir;
}

}  // namespace

TEST_CASE("levels round trip") {
    for (Level l : kAllLevels) CHECK(parse_level(to_string(l)) == l);
    CHECK(parse_level("3") == Level::lv3);
    CHECK_THROWS_AS(parse_level("lv6"), ConfigError);
}

TEST_CASE("rollout budgets per level") {
    const auto dataset = small_dataset(EnvId::cliffwalking, "expert");
    for (Level level : kAllLevels) {
        Cell cell(AgentKind::naive, EnvId::cliffwalking, level, constant_actor(2));
        ScenarioConfig config;
        config.level = level;
        config.env = EnvId::cliffwalking;
        config.seed = 7;
        config.step_cap = 30;
        config.dataset = dataset;
        config.expert_prompt = "Walk along the top edge.";
        const auto result = run_scenario(cell.agent, config);
        CAPTURE(to_string(level));
        CHECK(result.record.status == eval::RunStatus::completed);
        const int expected = level == Level::lv3 ? 5 : 1;
        CHECK(result.units == expected);
        CHECK(result.episodes.size() == static_cast<std::size_t>(expected));
        CHECK(result.record.returns.size() == static_cast<std::size_t>(expected));
        CHECK(result.record.level == to_string(level));
        CHECK(result.record.agent == "naive");
    }
}

TEST_CASE("blackjack units are twenty hands scored by agreement") {
    Cell cell(AgentKind::cot, EnvId::blackjack, Level::lv1, constant_actor(1));
    ScenarioConfig config;
    config.env = EnvId::blackjack;
    const auto result = run_scenario(cell.agent, config);
    REQUIRE(result.record.status == eval::RunStatus::completed);
    CHECK(result.episodes.size() == 20);
    REQUIRE(result.record.returns.size() == 1);
    // Always standing: the score is the number of hands where the oracle stands.
    int agree = 0;
    const auto& oracle = policies::optimal_policy(EnvId::blackjack);
    for (const auto& hand : result.episodes) {
        REQUIRE(hand.size() == 1);
        agree += oracle.action_for(hand.steps[0].state) == 0 ? 1 : 0;
    }
    CHECK(result.record.returns[0] == doctest::Approx(agree));
}

TEST_CASE("self-guided knowledge grows by one per episode") {
    for (AgentKind kind : agents::kAllAgents) {
        Cell cell(kind, EnvId::cliffwalking, Level::lv3, constant_actor(2));
        const auto result = run_self_guided(cell.agent, 5, 7, 30);
        CAPTURE(agents::to_string(kind));
        REQUIRE(result.knowledge_sizes.size() == 5);
        for (std::size_t i = 1; i < 5; ++i) CHECK(result.knowledge_sizes[i] == result.knowledge_sizes[i - 1] + 1);
    }
}

TEST_CASE("exe on cliff walking reaches the optimal return and reruns identically") {
    auto run_once = [] {
        Cell cell(AgentKind::exe, EnvId::cliffwalking, Level::lv3, cliff_path_actor());
        ScenarioConfig config;
        config.level = Level::lv3;
        config.env = EnvId::cliffwalking;
        config.seed = 11;
        auto result = run_scenario(cell.agent, config);
        fill_usage(result.record, cell.ledger.records(), cell.tag, nullptr);
        return std::pair{result, cell.mock.requests()};
    };
    const auto [first, requests] = run_once();
    const auto [second, requests2] = run_once();
    REQUIRE(first.record.status == eval::RunStatus::completed);
    CHECK(first.episodes.size() == 5);
    CHECK(first.record.returns.back() == -13);
    CHECK(first.record.score() == -13);
    CHECK(eval::serialize_record(first.record) == eval::serialize_record(second.record));
    REQUIRE(requests.size() == requests2.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
        CHECK(llm::request_body(requests[i], "mock") == llm::request_body(requests2[i], "mock"));
    }
    CHECK(first.record.calls == static_cast<int>(requests.size()));
    CHECK(first.record.wall_time_s == 0.0);
}

TEST_CASE("reflexion learner sees earlier reflections in order") {
    auto count = std::make_shared<int>(0);
    Cell cell(AgentKind::reflexion, EnvId::cliffwalking, Level::lv3, [count](const llm::ChatRequest& r) {
        if (is_actor_prompt(r)) return std::string("{\"action\": 2}");
        return "reflection " + std::to_string((*count)++);
    });
    run_self_guided(cell.agent, 3, 7, 20);
    std::vector<std::string> actor_prompts;
    for (const auto& r : cell.mock.requests()) {
        if (is_actor_prompt(r)) actor_prompts.push_back(llm::joined_content(r));
    }
    REQUIRE(!actor_prompts.empty());
    const auto& last = actor_prompts.back();
    const auto p0 = last.find("reflection 0");
    const auto p1 = last.find("reflection 1");
    REQUIRE(p0 != std::string::npos);
    REQUIRE(p1 != std::string::npos);
    CHECK(p0 < p1);
}

TEST_CASE("lv5 actor prompt carries the expert text") {
    Cell cell(AgentKind::naive, EnvId::cliffwalking, Level::lv5, constant_actor(2));
    ScenarioConfig config;
    config.level = Level::lv5;
    config.env = EnvId::cliffwalking;
    config.step_cap = 5;
    config.expert_prompt = "Hug the top wall until column eleven.";
    const auto result = run_scenario(cell.agent, config);
    REQUIRE(result.record.status == eval::RunStatus::completed);
    bool seen = false;
    for (const auto& r : cell.mock.requests()) {
        if (is_actor_prompt(r)) seen = seen || contains(llm::joined_content(r), "Hug the top wall");
    }
    CHECK(seen);
}

TEST_CASE("offline levels make one learner call per trajectory") {
    Cell cell(AgentKind::naive, EnvId::cliffwalking, Level::lv4, constant_actor(2));
    const auto dataset = small_dataset(EnvId::cliffwalking, "expert");
    const auto result = run_offline(cell.agent, dataset.episodes, 7, 10);
    int learner_calls = 0;
    for (const auto& r : cell.mock.requests()) learner_calls += is_actor_prompt(r) ? 0 : 1;
    CHECK(learner_calls == 5);
    CHECK(result.knowledge_sizes.size() == 5);
}

TEST_CASE("make_scenario resolves assets") {
    const auto dir = temp_assets("assets");
    CHECK_THROWS_AS(make_scenario(Level::lv2, EnvId::cartpole, dir, 1), MissingAsset);
    CHECK_THROWS_AS(make_scenario(Level::lv5, EnvId::cartpole, dir, 1), MissingAsset);
    CHECK_NOTHROW(make_scenario(Level::lv1, EnvId::cartpole, dir, 1));
    CHECK_NOTHROW(make_scenario(Level::lv3, EnvId::cartpole, dir, 1));

    write_trajectory_file(dataset_path(dir, EnvId::cartpole, Level::lv2), small_dataset(EnvId::cliffwalking, "random"));
    CHECK_THROWS_AS(make_scenario(Level::lv2, EnvId::cartpole, dir, 1), DatasetEnvMismatch);

    write_trajectory_file(dataset_path(dir, EnvId::cartpole, Level::lv4), small_dataset(EnvId::cartpole, "expert"));
    const auto lv4 = make_scenario(Level::lv4, EnvId::cartpole, dir, 1);
    REQUIRE(lv4.dataset.has_value());
    CHECK(lv4.dataset->episodes.size() == 5);

    std::ofstream(expert_prompt_path(dir, EnvId::cartpole)) << "Push toward the lean.\n";
    const auto lv5 = make_scenario(Level::lv5, EnvId::cartpole, dir, 1);
    CHECK(lv5.expert_prompt == std::optional<std::string>("Push toward the lean."));
    std::filesystem::remove_all(dir);
}

TEST_CASE("gateway failures mark the record failed") {
    MockBackend mock({"{\"action\": 2}"});
    llm::UsageLedger ledger;
    llm::Gateway gateway(mock, ledger, cell_tag(AgentKind::naive, EnvId::cliffwalking, Level::lv1, 0));
    Agent agent(AgentKind::naive, EnvId::cliffwalking, gateway);
    ScenarioConfig config;
    config.env = EnvId::cliffwalking;
    config.step_cap = 10;
    const auto result = run_scenario(agent, config);
    CHECK(result.record.status == eval::RunStatus::failed);
    CHECK(!result.record.note.empty());
}

TEST_CASE("fill_usage sums only the cell's records") {
    llm::UsageLedger ledger;
    const auto tag = cell_tag(AgentKind::cot, EnvId::taxi, Level::lv2, 3);
    auto other = tag;
    other.seed = 4;
    ledger.append({tag, "gpt-3.5-turbo-0301", 1000, 500, 1, 250, true});
    ledger.append({other, "gpt-3.5-turbo-0301", 7, 7, 1, 10, true});
    ledger.append({tag, "gpt-3.5-turbo-0301", 0, 0, 6, 750, false});
    llm::Pricing pricing;
    pricing.set("gpt-3.5-turbo-0301", {0.0015, 0.002});
    eval::RunRecord r;
    fill_usage(r, ledger.records(), tag, &pricing);
    CHECK(r.prompt_tokens == 1000);
    CHECK(r.completion_tokens == 500);
    CHECK(r.calls == 2);
    CHECK(r.cost == doctest::Approx(0.0015 + 0.001));
    CHECK(r.wall_time_s == doctest::Approx(1.0));
}
