#include "arena/agents/agent.hpp"

#include <sstream>

#include "arena/core/assets.hpp"
#include "arena/core/error.hpp"
#include "arena/llm/parse.hpp"
#include "arena/policies/policies.hpp"

namespace arena::agents {

namespace {

using llm::ChatMessage;
using llm::Role;

std::string prompt_asset(std::string_view name) {
    std::string text(embedded_asset("prompts/" + std::string(name) + ".txt"));
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

std::string number_list(std::span<const int> values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + std::to_string(values[i]);
    return out + "]";
}

std::string format_number(double v) { return grounding::format_reward(v); }

std::string guidance_block(AgentKind kind, const Guidance& g) {
    switch (kind) {
        case AgentKind::exe: {
            std::string out;
            if (g.insight) out += "The insights of the game are listed below: " + *g.insight + "\n";
            return out + "The suggestions are listed below:" + g.suggestion + "\n";
        }
        case AgentKind::reflexion: return g.suggestion + "\n";
        default: return "Summary of past attempts:\n" + g.suggestion + "\n";
    }
}

std::string retry_message(EnvId env) {
    const auto space = action_space(env);
    if (space.is_continuous) {
        return render_template(prompt_asset("parse_retry_continuous"),
                               {{"low", format_number(space.low)}, {"high", format_number(space.high)}});
    }
    const auto valid = grounding::valid_action_numbers(env);
    return render_template(prompt_asset("parse_retry"), {{"valid", number_list(valid)}});
}

// 1-based number shown to the model for a discrete action.
int shown_number(const Action& a) { return std::get<DiscreteAction>(a).index + 1; }

double total_reward(std::span<const Trajectory> episodes) {
    double sum = 0.0;
    for (const auto& ep : episodes)
        for (const auto& s : ep.steps) sum += s.reward;
    return sum;
}

std::string numbered_trials(const std::vector<std::string>& notes, int first) {
    std::string out;
    for (std::size_t i = 0; i < notes.size(); ++i) {
        out += "Trial " + std::to_string(static_cast<int>(i) + first) + ":\n" + notes[i];
        if (i + 1 < notes.size()) out += "\n";
    }
    return out;
}

}  // namespace

std::string_view to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::naive: return "naive";
        case AgentKind::cot: return "cot";
        case AgentKind::self_ask: return "self_ask";
        case AgentKind::self_consistency: return "self_consistency";
        case AgentKind::spp: return "spp";
        case AgentKind::reflexion: return "reflexion";
        case AgentKind::exe: return "exe";
    }
    return "naive";
}

AgentKind parse_agent_kind(std::string_view text) {
    for (AgentKind k : kAllAgents) {
        if (text == to_string(k)) return k;
    }
    if (text == "self-ask") return AgentKind::self_ask;
    if (text == "self-consistency") return AgentKind::self_consistency;
    throw ConfigError("unknown agent '" + std::string(text) + "'");
}

bool is_multi_path(AgentKind kind) { return kind == AgentKind::self_consistency || kind == AgentKind::spp; }

bool uses_short_memory(AgentKind kind) { return kind == AgentKind::reflexion || kind == AgentKind::exe; }

const std::vector<std::string>& spp_personas() {
    static const std::vector<std::string> personas = [] {
        std::vector<std::string> out;
        std::istringstream in(prompt_asset("spp_personas"));
        for (std::string line; std::getline(in, line);) {
            if (!line.empty()) out.push_back(line);
        }
        return out;
    }();
    return personas;
}

std::vector<ChatMessage> build_actor_prompt(AgentKind kind, const grounding::TextBundle& bundle,
                                            const ShortMemory& memory, const std::optional<Guidance>& guidance,
                                            const std::optional<std::string>& level_assets, EnvId env) {
    std::string knowledge;
    if (guidance) knowledge += guidance_block(kind, *guidance);
    if (level_assets && !level_assets->empty()) knowledge += *level_assets + "\n";

    std::string recent;
    if (uses_short_memory(kind) && !memory.empty()) {
        const auto items = memory.items();
        recent = "Recent steps in this episode:\n";
        for (const auto& line : grounding::translate_transitions(env, items)) recent += line + "\n";
    }

    const TemplateVars vars = {{"game_description", bundle.game_description},
                               {"goal_description", bundle.goal_description},
                               {"action_description", bundle.action_description},
                               {"observation", bundle.observation_text},
                               {"knowledge", knowledge},
                               {"memory", recent}};
    return {{Role::user, render_template(prompt_asset("actor_" + std::string(to_string(kind))), vars)}};
}

ActionDecision act(AgentKind kind, llm::Gateway& gateway, const std::vector<ChatMessage>& prompt, EnvId env,
                   Rng& rng, const AgentOptions& options) {
    const bool is_continuous = action_space(env).is_continuous;
    ActionDecision decision;

    if (!is_multi_path(kind)) {
        std::vector<ChatMessage> messages = prompt;
        for (int attempt = 0;; ++attempt) {
            const auto reply = gateway.complete({"", messages, 0.0});
            decision.raw_response = reply.content;
            try {
                decision.action = llm::parse_action(env, reply.content);
                decision.retries = attempt;
                return decision;
            } catch (const NoActionFound&) {
            } catch (const ActionOutOfRange&) {
            }
            if (attempt >= options.parse_retries) break;
            messages.push_back({Role::assistant, reply.content.empty() ? "(no answer)" : reply.content});
            messages.push_back({Role::user, retry_message(env)});
        }
        decision.retries = options.parse_retries;
        decision.action = policies::random_action(env, rng);
        decision.random_fallback = true;
        return decision;
    }

    std::vector<std::vector<ChatMessage>> paths;
    double temperature = 0.0;
    if (kind == AgentKind::self_consistency) {
        paths.assign(static_cast<std::size_t>(std::max(1, options.consistency_samples)), prompt);
        temperature = options.sample_temperature;
    } else {
        for (const auto& persona : spp_personas()) {
            auto p = prompt;
            p.insert(p.begin(), {Role::system, persona});
            paths.push_back(std::move(p));
        }
    }

    std::vector<int> numbers;
    std::vector<double> forces;
    for (const auto& path : paths) {
        const auto reply = gateway.complete({"", path, temperature});
        if (!decision.raw_response.empty()) decision.raw_response += "\n---\n";
        decision.raw_response += reply.content;
        try {
            const Action a = llm::parse_action(env, reply.content);
            decision.candidates.emplace_back(a, reply.content);
            if (is_continuous) {
                forces.push_back(std::get<ContinuousAction>(a).force);
            } else {
                numbers.push_back(shown_number(a));
            }
        } catch (const NoActionFound&) {
        } catch (const ActionOutOfRange&) {
        }
    }
    if (decision.candidates.empty()) {
        decision.action = policies::random_action(env, rng);
        decision.random_fallback = true;
    } else if (is_continuous) {
        decision.action = continuous(vote_continuous(forces));
    } else {
        decision.action = discrete(vote(numbers) - 1);
    }
    return decision;
}

Agent::Agent(AgentKind kind, EnvId env, llm::Gateway& gateway, AgentOptions options)
    : kind_(kind),
      env_(env),
      gateway_(&gateway),
      options_(options),
      rng_(mix_seed(options.seed, static_cast<std::uint64_t>(kind) + 1, static_cast<std::uint64_t>(env) + 1)),
      memory_(options.memory_window) {
    if (kind_ == AgentKind::exe) knowledge_.append(EntryKind::document, game_document());
}

std::string Agent::game_document() const { return grounding::describe_game(env_) + "\n" + grounding::describe_goal(env_); }

llm::ChatResponse Agent::ask(const std::string& text, double temperature) {
    return gateway_->complete({"", {{Role::user, text}}, temperature});
}

void Agent::set_expert_knowledge(std::string text) {
    expert_ = text;
    knowledge_.append(EntryKind::expert, std::move(text));
}

void Agent::add_experience(const Trajectory& trajectory) {
    pending_.push_back(trajectory);
    knowledge_.append(EntryKind::trajectory, truncate_middle(trajectory_text({&trajectory, 1}), options_.digest_chars));
}

std::optional<Guidance> Agent::update(int episode_index, int total_episodes) {
    const TemplateVars base = {{"game_description", grounding::describe_game(env_)},
                               {"goal_description", grounding::describe_goal(env_)}};

    if (kind_ == AgentKind::exe) {
        std::string past;
        std::string expert;
        int n = 0;
        for (const auto& e : knowledge_.entries) {
            if (e.kind == EntryKind::trajectory) {
                past += "Episode " + std::to_string(++n) + ":\n" + e.text + "\n";
                if (!e.critique.empty()) past += "Evaluation: " + e.critique + "\n";
            } else if (e.kind == EntryKind::expert) {
                expert += "Expert knowledge:\n" + e.text + "\n";
            }
        }
        Guidance g;
        TemplateVars vars = base;
        if (knowledge_.has_trajectory()) {
            vars["knowledge"] = expert + past;
            g.insight = ask(render_template(prompt_asset("learner_exe_insight"), vars)).content;
            vars["insight"] = "The insights of the game are listed below: " + *g.insight + "\n";
        } else {
            vars["insight"] = "";
        }
        vars["knowledge"] = expert + (past.empty() ? "" : "Past episodes and their evaluations:\n" + past);
        vars["episode"] = std::to_string(episode_index + 1);
        vars["episodes"] = std::to_string(total_episodes);
        g.suggestion = ask(render_template(prompt_asset("learner_exe_suggestion"), vars)).content;
        guidance_ = g;
        return guidance_;
    }

    // Offline trajectories not yet turned into notes.
    for (const auto& t : pending_) {
        TemplateVars vars = base;
        vars["traj"] = truncate_middle(trajectory_text({&t, 1}), options_.digest_chars);
        if (kind_ == AgentKind::reflexion) {
            vars["total_reward"] = format_number(total_reward({&t, 1}));
            notes_.push_back(ask(render_template(prompt_asset("critic_reflexion"), vars)).content);
        } else {
            vars["few_shot_examples"] = prompt_asset("learner_default_examples");
            vars["evaluation"] = "";
            vars["memory"] = notes_.empty() ? "(none)" : numbered_trials(notes_, 1);
            notes_.push_back(ask(render_template(prompt_asset("learner_default"), vars)).content);
        }
    }
    pending_.clear();

    if (notes_.empty()) {
        guidance_.reset();
    } else if (kind_ == AgentKind::reflexion) {
        guidance_ = Guidance{"Your memory for the task below:\n" + numbered_trials(notes_, 0), std::nullopt};
    } else {
        guidance_ = Guidance{numbered_trials(notes_, 1), std::nullopt};
    }
    return guidance_;
}

void Agent::begin_episode() { memory_.clear(); }

ActionDecision Agent::act(const Observation& obs) {
    const auto prompt = build_actor_prompt(kind_, grounding::make_bundle(env_, obs), memory_, guidance_, expert_, env_);
    auto decision = agents::act(kind_, *gateway_, prompt, env_, rng_, options_);
    ++decisions_;
    retries_ += decision.retries;
    if (decision.random_fallback) ++fallbacks_;
    return decision;
}

void Agent::observe(const Transition& t) { memory_.push(t); }

Critique Agent::criticize(std::span<const Trajectory> episodes) {
    const double total = total_reward(episodes);
    TemplateVars vars = {{"game_description", grounding::describe_game(env_)},
                         {"goal_description", grounding::describe_goal(env_)},
                         {"traj", truncate_middle(trajectory_text(episodes), options_.digest_chars)},
                         {"total_reward", format_number(total)}};
    Critique c;
    if (kind_ == AgentKind::exe) {
        vars["suggestions"] = guidance_ ? guidance_->suggestion : "(no suggestion was given)";
        c.verbal = ask(render_template(prompt_asset("critic_exe"), vars)).content;
        return c;
    }
    c.numeric = total;
    c.verbal = ask(render_template(prompt_asset("critic_reflexion"), vars)).content;
    return c;
}

void Agent::learn_from(std::span<const Trajectory> episodes, const Critique& critique) {
    const std::string digest = truncate_middle(trajectory_text(episodes), options_.digest_chars);
    switch (kind_) {
        case AgentKind::exe:
            knowledge_.append(EntryKind::trajectory, digest, critique.verbal.value_or(""));
            break;
        case AgentKind::reflexion:
            notes_.push_back(critique.verbal.value_or(""));
            knowledge_.append(EntryKind::reflection, notes_.back());
            break;
        default: {
            std::string evaluation;
            if (critique.numeric) evaluation = "The total reward was " + format_number(*critique.numeric) + ".";
            if (critique.verbal) evaluation += (evaluation.empty() ? "" : " ") + *critique.verbal;
            const TemplateVars vars = {{"game_description", grounding::describe_game(env_)},
                                       {"goal_description", grounding::describe_goal(env_)},
                                       {"few_shot_examples", prompt_asset("learner_default_examples")},
                                       {"traj", digest},
                                       {"evaluation", evaluation},
                                       {"memory", notes_.empty() ? "(none)" : numbered_trials(notes_, 1)}};
            notes_.push_back(ask(render_template(prompt_asset("learner_default"), vars)).content);
            knowledge_.append(EntryKind::summary, notes_.back());
            break;
        }
    }
}

}  // namespace arena::agents
