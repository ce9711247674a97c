#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arena/agents/memory.hpp"
#include "arena/core/rng.hpp"
#include "arena/grounding/grounding.hpp"
#include "arena/llm/chat.hpp"
#include "arena/llm/usage.hpp"

namespace arena::agents {

enum class AgentKind { naive, cot, self_ask, self_consistency, spp, reflexion, exe };

inline constexpr std::array<AgentKind, 7> kAllAgents = {AgentKind::naive, AgentKind::cot, AgentKind::self_ask,
                                                        AgentKind::self_consistency, AgentKind::spp,
                                                        AgentKind::reflexion, AgentKind::exe};

std::string_view to_string(AgentKind kind);
/// Throws ConfigError.
AgentKind parse_agent_kind(std::string_view text);

bool is_multi_path(AgentKind kind);
/// Only these kinds see the current episode's recent steps.
bool uses_short_memory(AgentKind kind);

struct AgentOptions {
    std::size_t memory_window = kDefaultMemoryWindow;
    int consistency_samples = 5;
    double sample_temperature = 1.0;
    int parse_retries = 2;
    std::size_t digest_chars = kDigestChars;
    std::uint64_t seed = 0;
};

struct ActionDecision {
    Action action;
    std::string raw_response;
    std::vector<std::pair<Action, std::string>> candidates;  // multi-path only
    int retries = 0;
    bool random_fallback = false;
};

/// The three SPP personas, in call order.
const std::vector<std::string>& spp_personas();

/// Actor messages. `guidance` comes from the learner; `level_assets` is the
/// expert text of the expert-prompt scenario and is placed verbatim before
/// the current state.
std::vector<llm::ChatMessage> build_actor_prompt(AgentKind kind, const grounding::TextBundle& bundle,
                                                 const ShortMemory& memory, const std::optional<Guidance>& guidance,
                                                 const std::optional<std::string>& level_assets, EnvId env);

/// Queries the actor. Single-path kinds re-ask up to `parse_retries` times on
/// an unparseable reply and then take a uniformly random action; multi-path
/// kinds issue exactly K calls and vote over the parseable ones.
ActionDecision act(AgentKind kind, llm::Gateway& gateway, const std::vector<llm::ChatMessage>& prompt, EnvId env,
                   Rng& rng, const AgentOptions& options = {});

/// One language agent bound to an environment and a gateway.
class Agent {
public:
    Agent(AgentKind kind, EnvId env, llm::Gateway& gateway, AgentOptions options = {});

    AgentKind kind() const { return kind_; }
    EnvId env() const { return env_; }

    /// Expert-prompt text shown to the actor and kept in knowledge.
    void set_expert_knowledge(std::string text);
    /// Stores an offline trajectory digest (scenario levels with datasets).
    void add_experience(const Trajectory& trajectory);

    /// Learner step before an episode: refreshes the actor's guidance.
    /// EXE queries its learner every time; the other kinds turn accumulated
    /// knowledge into guidance, querying the learner only for fresh offline
    /// experience.
    std::optional<Guidance> update(int episode_index, int total_episodes);

    void begin_episode();
    ActionDecision act(const Observation& obs);
    void observe(const Transition& t);

    /// Critic over one rollout unit (one episode, or a group of blackjack hands).
    Critique criticize(std::span<const Trajectory> episodes);
    /// Stores the evaluated rollout; grows knowledge by one entry.
    void learn_from(std::span<const Trajectory> episodes, const Critique& critique);

    const KnowledgeMemory& knowledge() const { return knowledge_; }
    const std::optional<Guidance>& guidance() const { return guidance_; }
    const ShortMemory& short_memory() const { return memory_; }
    int decisions() const { return decisions_; }
    int retries() const { return retries_; }
    int random_fallbacks() const { return fallbacks_; }

private:
    std::string game_document() const;
    llm::ChatResponse ask(const std::string& text, double temperature = 0.0);

    AgentKind kind_;
    EnvId env_;
    llm::Gateway* gateway_;
    AgentOptions options_;
    Rng rng_;
    ShortMemory memory_;
    KnowledgeMemory knowledge_;
    std::optional<Guidance> guidance_;
    std::optional<std::string> expert_;
    std::vector<std::string> notes_;  // learner outputs shown to non-EXE actors
    std::vector<Trajectory> pending_;  // offline experience not yet summarized
    int decisions_ = 0;
    int retries_ = 0;
    int fallbacks_ = 0;
};

}  // namespace arena::agents
