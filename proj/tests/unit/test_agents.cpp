#include <algorithm>

#include "doctest.h"

#include "arena/agents/agent.hpp"
#include "arena/agents/memory.hpp"
#include "arena/core/error.hpp"
#include "arena/env/environment.hpp"
#include "arena/llm/mock.hpp"
#include "arena/policies/policies.hpp"

using namespace arena;
using namespace arena::agents;
using arena::llm::MockBackend;

namespace {

struct Rig {
    explicit Rig(std::vector<std::string> script, MockBackend::Responder fallback = {})
        : mock(std::move(script), std::move(fallback)), gateway(mock, ledger, {"test", "env", "lv1", 0}) {}
    MockBackend mock;
    llm::UsageLedger ledger;
    llm::Gateway gateway;
};

Transition step_of(EnvId env, int action_index, double reward) {
    auto [e, obs] = reset(env, 1);
    const auto r = e.step(discrete(action_index));
    return {obs, discrete(action_index), reward, r.observation, r.terminated, r.truncated};
}

Trajectory cliff_expert(std::uint64_t seed) {
    return policies::rollout(EnvId::cliffwalking, seed,
                             [](const Observation& o) { return policies::expert_action(EnvId::cliffwalking, o); });
}

std::string user_text(const std::vector<llm::ChatMessage>& prompt) {
    std::string out;
    for (const auto& m : prompt) out += m.content + "\n";
    return out;
}

bool contains(const std::string& text, std::string_view needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("agent kinds round trip") {
    for (AgentKind k : kAllAgents) CHECK(parse_agent_kind(to_string(k)) == k);
    CHECK(parse_agent_kind("self-ask") == AgentKind::self_ask);
    CHECK_THROWS_AS(parse_agent_kind("react"), ConfigError);
}

TEST_CASE("short memory window") {
    const auto t1 = step_of(EnvId::cliffwalking, 0, -1);
    const auto t2 = step_of(EnvId::cliffwalking, 1, -100);
    const auto t3 = step_of(EnvId::cliffwalking, 2, -1);
    ShortMemory m;
    m = update_short_memory(m, t1);
    REQUIRE(m.size() == 1);
    CHECK(m.items()[0].action == t1.action);

    ShortMemory two(2);
    two = update_short_memory(two, t1);
    two = update_short_memory(two, t2);
    two = update_short_memory(two, t3);
    REQUIRE(two.size() == 2);
    CHECK(two.items()[0].reward == -100);
    CHECK(two.items()[1].action == t3.action);
    two.clear();
    CHECK(two.empty());
    CHECK(ShortMemory().window() == 8);
}

TEST_CASE("vote") {
    CHECK(vote(std::vector<int>{3, 2, 1, 1, 1}) == 1);
    CHECK(vote(std::vector<int>{2, 1}) == 1);
    CHECK(vote(std::vector<int>{4}) == 4);
    CHECK(vote(std::vector<int>{4, 4, 2, 2, 3}) == 2);
    CHECK(vote_continuous(std::vector<double>{0.5, -1.0, 0.2}) == 0.2);
    CHECK(vote_continuous(std::vector<double>{0.5, -1.0}) == -0.25);

    // A unique mode does not depend on candidate order.
    Rng rng(4);
    for (int i = 0; i < 300; ++i) {
        std::vector<int> c(1 + rng.below(7));
        for (auto& x : c) x = 1 + static_cast<int>(rng.below(4));
        std::vector<int> counts(5, 0);
        for (int x : c) ++counts[static_cast<std::size_t>(x)];
        const int top = *std::max_element(counts.begin(), counts.end());
        const bool unique = std::count(counts.begin(), counts.end(), top) == 1;
        const int expected = vote(c);
        for (int k = 0; k < 5; ++k) {
            for (std::size_t j = c.size() - 1; j > 0; --j) std::swap(c[j], c[rng.below(j + 1)]);
            if (unique) CHECK(vote(c) == expected);
        }
    }
}

TEST_CASE("truncate_middle") {
    CHECK(truncate_middle("short", 2000) == "short");
    const std::string long_text(5000, 'a');
    const auto t = truncate_middle(long_text + "END", 2000);
    CHECK(t.size() == 2000);
    CHECK(t.substr(t.size() - 3) == "END");
    CHECK(contains(t, "\n...\n"));
}

TEST_CASE("build_actor_prompt: naive is the bundle and the current state") {
    const auto [env, obs] = reset(EnvId::cartpole, 3);
    const auto bundle = grounding::make_bundle(EnvId::cartpole, obs);
    const auto prompt = build_actor_prompt(AgentKind::naive, bundle, ShortMemory{}, std::nullopt, std::nullopt,
                                           EnvId::cartpole);
    REQUIRE(prompt.size() == 1);
    CHECK(prompt[0].role == llm::Role::user);
    CHECK(prompt[0].content == bundle.game_description + "\n" + bundle.goal_description +
                                   "\nCurrent Game State: " + bundle.observation_text + "\n" +
                                   bundle.action_description);
}

TEST_CASE("build_actor_prompt: scaffolding per kind") {
    const auto [env, obs] = reset(EnvId::cliffwalking, 0);
    const auto bundle = grounding::make_bundle(EnvId::cliffwalking, obs);
    ShortMemory memory;
    memory.push(step_of(EnvId::cliffwalking, 1, -100));
    const Guidance g{" 1. Explore the top row first.", std::nullopt};

    const auto exe = user_text(build_actor_prompt(AgentKind::exe, bundle, ShortMemory{}, g, std::nullopt, EnvId::cliffwalking));
    CHECK(contains(exe, "The suggestions are listed below:"));
    CHECK_FALSE(contains(exe, "The insights of the game"));
    const auto exe_insight = user_text(build_actor_prompt(AgentKind::exe, bundle, ShortMemory{}, Guidance{"s", "cliff row 3"},
                                                          std::nullopt, EnvId::cliffwalking));
    CHECK(contains(exe_insight, "The insights of the game are listed below: cliff row 3"));

    const auto ask = user_text(build_actor_prompt(AgentKind::self_ask, bundle, ShortMemory{}, std::nullopt, std::nullopt,
                                                  EnvId::cliffwalking));
    CHECK(contains(ask, "Follow up:"));
    CHECK(contains(ask, "Intermediate answer:"));
    const auto cot = user_text(build_actor_prompt(AgentKind::cot, bundle, ShortMemory{}, std::nullopt, std::nullopt,
                                                  EnvId::cliffwalking));
    CHECK(contains(cot, "step by step"));

    for (AgentKind k : kAllAgents) {
        const auto text = user_text(build_actor_prompt(k, bundle, memory, std::nullopt, std::nullopt, EnvId::cliffwalking));
        CHECK(contains(text, "Recent steps in this episode:") == uses_short_memory(k));
        CHECK(contains(text, bundle.action_description));
        // The action description comes after the state.
        CHECK(text.find(bundle.action_description) > text.find("Current Game State:"));
        const auto expert = user_text(build_actor_prompt(k, bundle, ShortMemory{}, std::nullopt, std::string("EXPERT NOTES"),
                                                         EnvId::cliffwalking));
        CHECK(expert.find("EXPERT NOTES") < expert.find("Current Game State:"));
    }
}

TEST_CASE("act: single path") {
    Rig rig({"{\"action\": 2}"});
    const auto [env, obs] = reset(EnvId::cartpole, 0);
    const auto prompt = build_actor_prompt(AgentKind::naive, grounding::make_bundle(EnvId::cartpole, obs), ShortMemory{},
                                           std::nullopt, std::nullopt, EnvId::cartpole);
    Rng rng(1);
    const auto d = act(AgentKind::naive, rig.gateway, prompt, EnvId::cartpole, rng);
    CHECK(d.action == discrete(1));  // push right
    CHECK(d.candidates.empty());
    CHECK(rig.mock.calls() == 1);
    CHECK(rig.mock.requests()[0].temperature == 0.0);
}

TEST_CASE("act: parse retries then a random action") {
    const auto [env, obs] = reset(EnvId::cliffwalking, 0);
    const auto prompt = build_actor_prompt(AgentKind::cot, grounding::make_bundle(EnvId::cliffwalking, obs), ShortMemory{},
                                           std::nullopt, std::nullopt, EnvId::cliffwalking);
    Rng rng(1);
    {
        Rig rig({"hmm", "I am not sure", "{\"action\": 4}"});
        const auto d = act(AgentKind::cot, rig.gateway, prompt, EnvId::cliffwalking, rng);
        CHECK(d.action == discrete(3));
        CHECK(d.retries == 2);
        CHECK_FALSE(d.random_fallback);
        const auto last = rig.mock.requests().back();
        REQUIRE(last.messages.size() == 5);
        CHECK(last.messages[3].content == "I am not sure");
        CHECK(contains(last.messages[4].content, "[1, 2, 3, 4]"));
    }
    {
        Rig rig({"no", "no", "no", "never asked"});
        const auto d = act(AgentKind::cot, rig.gateway, prompt, EnvId::cliffwalking, rng);
        CHECK(d.random_fallback);
        CHECK(rig.mock.calls() == 3);
        const int a = std::get<DiscreteAction>(d.action).index;
        CHECK((a >= 0 && a < 4));
    }
}

TEST_CASE("act: multi path issues K calls and votes") {
    const auto [env, obs] = reset(EnvId::cliffwalking, 0);
    const auto bundle = grounding::make_bundle(EnvId::cliffwalking, obs);
    Rng rng(1);
    {
        Rig rig({"Output: {\"action\": 3}", "Output: {\"action\": 2}", "Output: {\"action\": 1}",
                 "Output: {\"action\": 1}", "Answer: {\"action\": 1}."});
        const auto prompt = build_actor_prompt(AgentKind::self_consistency, bundle, ShortMemory{}, std::nullopt, std::nullopt,
                                               EnvId::cliffwalking);
        const auto d = act(AgentKind::self_consistency, rig.gateway, prompt, EnvId::cliffwalking, rng);
        CHECK(rig.mock.calls() == 5);
        REQUIRE(d.candidates.size() == 5);
        CHECK(d.action == discrete(0));  // action 1, move up
        for (const auto& r : rig.mock.requests()) CHECK(r.temperature == 1.0);
    }
    {
        Rig rig({"{\"action\": 2}", "garbled", "{\"action\": 2}"});
        const auto prompt =
            build_actor_prompt(AgentKind::spp, bundle, ShortMemory{}, std::nullopt, std::nullopt, EnvId::cliffwalking);
        const auto d = act(AgentKind::spp, rig.gateway, prompt, EnvId::cliffwalking, rng);
        CHECK(rig.mock.calls() == 3);
        CHECK(d.candidates.size() == 2);
        CHECK(d.action == discrete(1));
        const auto reqs = rig.mock.requests();
        for (std::size_t i = 0; i < 3; ++i) {
            REQUIRE(reqs[i].messages.size() == 2);
            CHECK(reqs[i].messages[0].role == llm::Role::system);
            CHECK(reqs[i].messages[0].content == spp_personas()[i]);
        }
    }
    {
        Rig rig({"{\"action\": 0.9}", "{\"action\": -0.2}", "{\"action\": 0.4}", "{\"action\": 1.5}", "x"});
        const auto [mcc, o] = reset(EnvId::mountaincar_continuous, 0);
        const auto prompt = build_actor_prompt(AgentKind::self_consistency,
                                               grounding::make_bundle(EnvId::mountaincar_continuous, o), ShortMemory{},
                                               std::nullopt, std::nullopt, EnvId::mountaincar_continuous);
        const auto d = act(AgentKind::self_consistency, rig.gateway, prompt, EnvId::mountaincar_continuous, rng);
        CHECK(d.action == continuous(0.65));  // median of 0.9, -0.2, 0.4, 1.0
    }
}

TEST_CASE("criticize") {
    const auto traj = cliff_expert(0);
    const std::vector<Trajectory> one{traj};
    {
        Rig rig({"I reached the goal."});
        Agent a(AgentKind::reflexion, EnvId::cliffwalking, rig.gateway);
        const auto c = a.criticize(one);
        CHECK(c.numeric == -13.0);
        CHECK(c.verbal == "I reached the goal.");
    }
    {
        Rig rig({"fine"});
        Agent a(AgentKind::naive, EnvId::cliffwalking, rig.gateway);
        CHECK(a.criticize(one).numeric == -13.0);
    }
    {
        Rig rig({"suggest", "critique"});
        Agent a(AgentKind::exe, EnvId::cliffwalking, rig.gateway);
        a.update(0, 5);
        const auto c = a.criticize(one);
        CHECK_FALSE(c.numeric.has_value());
        CHECK(c.verbal == "critique");
        const auto prompt = rig.mock.requests().back().messages[0].content;
        CHECK(contains(prompt, "The suggestion tells what the trajectory is for"));
        CHECK(contains(prompt, "suggest"));
        CHECK(contains(prompt, "Take Action"));
    }
}

TEST_CASE("EXE learner with and without experience") {
    Rig rig({"first suggestion", "evaluation one", "insight two", "second suggestion"});
    Agent a(AgentKind::exe, EnvId::cliffwalking, rig.gateway);
    REQUIRE(a.knowledge().size() == 1);
    CHECK(a.knowledge().document_only());

    const auto g1 = a.update(0, 5);
    REQUIRE(g1.has_value());
    CHECK(g1->suggestion == "first suggestion");
    CHECK_FALSE(g1->insight.has_value());
    CHECK(rig.mock.calls() == 1);
    CHECK(contains(rig.mock.requests()[0].messages[0].content, "episode 1 of 5"));

    const std::vector<Trajectory> ep{cliff_expert(1)};
    a.learn_from(ep, a.criticize(ep));
    CHECK(a.knowledge().size() == 2);
    const auto g2 = a.update(1, 5);
    REQUIRE(g2.has_value());
    CHECK(g2->insight == "insight two");
    CHECK(g2->suggestion == "second suggestion");
    const auto reqs = rig.mock.requests();
    CHECK(contains(reqs[2].messages[0].content, "evaluation one"));
    CHECK(contains(reqs[3].messages[0].content, "insight two"));
}

TEST_CASE("default learner and reflexion memory") {
    const std::vector<Trajectory> ep{cliff_expert(2)};
    {
        Rig rig({"critic says ok", "summary one"});
        Agent a(AgentKind::cot, EnvId::cliffwalking, rig.gateway);
        CHECK_FALSE(a.update(0, 5).has_value());
        CHECK(rig.mock.calls() == 0);
        a.learn_from(ep, a.criticize(ep));
        const auto learner_prompt = rig.mock.requests().back().messages[0].content;
        CHECK(contains(learner_prompt, "Memory from past attempts:"));
        CHECK(contains(learner_prompt, "Summarize your trajectory"));
        CHECK(contains(learner_prompt, "The total reward was -13.0."));
        CHECK(a.knowledge().size() == 1);
        const auto g = a.update(1, 5);
        REQUIRE(g.has_value());
        CHECK(contains(g->suggestion, "summary one"));
    }
    {
        Rig rig({"reflection one"});
        Agent a(AgentKind::reflexion, EnvId::cliffwalking, rig.gateway);
        a.learn_from(ep, a.criticize(ep));
        REQUIRE(a.knowledge().size() == 1);
        CHECK(a.knowledge().entries[0].kind == EntryKind::reflection);
        CHECK(a.knowledge().entries[0].text == "reflection one");
        const auto g = a.update(1, 5);
        REQUIRE(g.has_value());
        CHECK(g->suggestion == "Your memory for the task below:\nTrial 0:\nreflection one");
    }
}

TEST_CASE("offline experience is summarized once per update") {
    Rig rig({}, [](const llm::ChatRequest&) { return std::string("note"); });
    Agent a(AgentKind::naive, EnvId::cliffwalking, rig.gateway);
    for (int i = 0; i < 5; ++i) {
        a.add_experience(cliff_expert(static_cast<std::uint64_t>(i)));
        a.update(i, 5);
    }
    CHECK(a.knowledge().size() == 5);
    CHECK(rig.mock.calls() == 5);
}

TEST_CASE("agent episode plumbing") {
    Rig rig({"{\"action\": 1}", "{\"action\": 2}"});
    Agent a(AgentKind::exe, EnvId::cliffwalking, rig.gateway);
    a.begin_episode();
    auto [env, obs] = reset(EnvId::cliffwalking, 0);
    const auto d = a.act(obs);
    CHECK(d.action == discrete(0));
    const auto r = env.step(d.action);
    a.observe({obs, d.action, r.reward, r.observation, r.terminated, r.truncated});
    CHECK(a.short_memory().size() == 1);
    a.act(r.observation);
    CHECK(contains(rig.mock.requests()[1].messages[0].content, "Recent steps in this episode:"));
    a.begin_episode();
    CHECK(a.short_memory().empty());
    CHECK(a.decisions() == 2);
}
