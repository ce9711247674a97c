#include "arena/policies/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <sstream>

#include "arena/core/assets.hpp"
#include "arena/core/error.hpp"
#include "json.hpp"

namespace arena {

using nlohmann::json;

namespace {

constexpr const char* kTaxiLocNames[] = {"R", "G", "Y", "B", "in_taxi"};

TaxiLoc taxi_loc_from(const json& j) {
    const auto name = j.get<std::string>();
    for (int i = 0; i < 5; ++i) {
        if (name == kTaxiLocNames[i]) return static_cast<TaxiLoc>(i);
    }
    throw FormatError("bad taxi location '" + name + "'");
}

json obs_to_json(const Observation& obs) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CartPoleObs>) {
                return {{"x", s.x}, {"v", s.v}, {"theta", s.theta}, {"omega", s.omega}};
            } else if constexpr (std::is_same_v<T, MountainCarObs>) {
                return {{"x", s.x}, {"v", s.v}};
            } else if constexpr (std::is_same_v<T, CliffWalkingObs>) {
                return {{"row", s.row}, {"col", s.col}};
            } else if constexpr (std::is_same_v<T, TaxiObs>) {
                return {{"row", s.row},
                        {"col", s.col},
                        {"passenger", kTaxiLocNames[static_cast<int>(s.passenger)]},
                        {"destination", kTaxiLocNames[static_cast<int>(s.destination)]}};
            } else if constexpr (std::is_same_v<T, BlackjackObs>) {
                return {{"player_sum", s.player_sum}, {"dealer_showing", s.dealer_showing},
                        {"usable_ace", s.usable_ace}};
            } else {
                return {{"cell", s.cell}};
            }
        },
        obs);
}

Observation obs_from_json(EnvId env, const json& j) {
    switch (env) {
        case EnvId::cartpole:
            return CartPoleObs{j.at("x").get<double>(), j.at("v").get<double>(), j.at("theta").get<double>(),
                               j.at("omega").get<double>()};
        case EnvId::mountaincar:
        case EnvId::mountaincar_continuous: return MountainCarObs{j.at("x").get<double>(), j.at("v").get<double>()};
        case EnvId::cliffwalking: return CliffWalkingObs{j.at("row").get<int>(), j.at("col").get<int>()};
        case EnvId::taxi:
            return TaxiObs{j.at("row").get<int>(), j.at("col").get<int>(), taxi_loc_from(j.at("passenger")),
                           taxi_loc_from(j.at("destination"))};
        case EnvId::blackjack:
            return BlackjackObs{j.at("player_sum").get<int>(), j.at("dealer_showing").get<int>(),
                                j.at("usable_ace").get<bool>()};
        case EnvId::frozenlake: return FrozenLakeObs{j.at("cell").get<int>()};
    }
    throw FormatError("unknown env");
}

json action_to_json(const Action& action) {
    if (const auto* c = std::get_if<ContinuousAction>(&action)) return c->force;
    return std::get<DiscreteAction>(action).index;
}

Action action_from_json(EnvId env, const json& j) {
    if (action_space(env).is_continuous) return continuous(j.get<double>());
    if (!j.is_number_integer()) throw FormatError("discrete action must be an integer");
    return discrete(j.get<int>());
}

double episode_return(const Trajectory& t) {
    double total = 0.0;
    for (const auto& s : t.steps) total += s.reward;
    return total;
}

}  // namespace

std::string creation_stamp() {
    const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
    if (epoch == nullptr || *epoch == '\0') return "1970-01-01T00:00:00Z";
    char* end = nullptr;
    const long long seconds = std::strtoll(epoch, &end, 10);
    if (end == epoch || *end != '\0' || seconds < 0) return "1970-01-01T00:00:00Z";
    const std::time_t t = static_cast<std::time_t>(seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string serialize_trajectory_file(const TrajectoryFile& file) {
    json seeds = json::array();
    json returns = json::array();
    for (const auto& ep : file.episodes) {
        seeds.push_back(ep.seed);
        returns.push_back(episode_return(ep));
    }
    std::string out = json{{"env", to_string(file.env)},
                           {"seed", file.seed},
                           {"policy", file.policy},
                           {"created", file.created},
                           {"episode_seeds", seeds},
                           {"returns", returns}}
                          .dump();
    out += '\n';
    for (std::size_t e = 0; e < file.episodes.size(); ++e) {
        const auto& steps = file.episodes[e].steps;
        for (std::size_t t = 0; t < steps.size(); ++t) {
            const Transition& tr = steps[t];
            out += json{{"episode", e},
                        {"t", t},
                        {"obs", obs_to_json(tr.state)},
                        {"action", action_to_json(tr.action)},
                        {"reward", tr.reward},
                        {"next_obs", obs_to_json(tr.next_state)},
                        {"terminated", tr.terminated},
                        {"truncated", tr.truncated}}
                       .dump();
            out += '\n';
        }
    }
    return out;
}

TrajectoryFile parse_trajectory_file(const std::string& text, std::optional<EnvId> expected) {
    std::istringstream in(text);
    std::string line;
    TrajectoryFile file;
    std::vector<double> stored_returns;
    bool have_header = false;
    try {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json j = json::parse(line);
            if (!have_header) {
                file.env = parse_env_id(j.at("env").get<std::string>());
                if (expected && *expected != file.env) {
                    throw DatasetEnvMismatch("dataset is for " + std::string(to_string(file.env)) + ", expected " +
                                             std::string(to_string(*expected)));
                }
                file.seed = j.at("seed").get<std::uint64_t>();
                file.policy = j.at("policy").get<std::string>();
                file.created = j.at("created").get<std::string>();
                stored_returns = j.at("returns").get<std::vector<double>>();
                const auto seeds = j.at("episode_seeds").get<std::vector<std::uint64_t>>();
                if (seeds.size() != stored_returns.size()) throw FormatError("header seed/return count mismatch");
                for (auto s : seeds) file.episodes.push_back(Trajectory{file.env, s, {}});
                have_header = true;
                continue;
            }
            const auto e = j.at("episode").get<std::size_t>();
            const auto t = j.at("t").get<std::size_t>();
            if (e >= file.episodes.size()) throw FormatError("episode index out of range");
            auto& steps = file.episodes[e].steps;
            if (t != steps.size()) throw FormatError("transition out of order");
            Transition tr{obs_from_json(file.env, j.at("obs")), action_from_json(file.env, j.at("action")),
                          j.at("reward").get<double>(), obs_from_json(file.env, j.at("next_obs")),
                          j.at("terminated").get<bool>(), j.at("truncated").get<bool>()};
            validate_action(file.env, tr.action);
            steps.push_back(std::move(tr));
        }
    } catch (const json::exception& ex) {
        throw FormatError(std::string("trajectory file: ") + ex.what());
    } catch (const InvalidAction& ex) {
        throw FormatError(std::string("trajectory file: ") + ex.what());
    }
    if (!have_header) throw FormatError("trajectory file has no header");
    for (std::size_t e = 0; e < file.episodes.size(); ++e) {
        const double recomputed = episode_return(file.episodes[e]);
        if (std::abs(recomputed - stored_returns[e]) > 1e-9 * std::max(1.0, std::abs(recomputed))) {
            throw FormatError("stored return of episode " + std::to_string(e) + " does not match its transitions");
        }
    }
    return file;
}

void write_trajectory_file(const std::filesystem::path& path, const TrajectoryFile& file) {
    write_file_atomic(path, serialize_trajectory_file(file));
}

TrajectoryFile read_trajectory_file(const std::filesystem::path& path, std::optional<EnvId> expected) {
    return parse_trajectory_file(read_text_file(path), expected);
}

}  // namespace arena
