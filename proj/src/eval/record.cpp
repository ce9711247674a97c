#include "arena/eval/record.hpp"

#include "arena/core/error.hpp"
#include "json.hpp"

namespace arena::eval {

using nlohmann::json;

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::completed: return "completed";
        case RunStatus::failed: return "failed";
        case RunStatus::skipped: return "skipped";
    }
    return "failed";
}

RunStatus parse_run_status(std::string_view text) {
    if (text == "completed") return RunStatus::completed;
    if (text == "failed") return RunStatus::failed;
    if (text == "skipped") return RunStatus::skipped;
    throw FormatError("unknown run status '" + std::string(text) + "'");
}

double RunRecord::score() const {
    if (returns.empty()) throw EmptyInput("record " + agent + "/" + std::string(to_string(env)) + " has no returns");
    return returns.back();
}

std::string serialize_record(const RunRecord& r) {
    json j = {{"agent", r.agent},
              {"env", to_string(r.env)},
              {"level", r.level},
              {"seed", r.seed},
              {"returns", r.returns},
              {"prompt_tokens", r.prompt_tokens},
              {"completion_tokens", r.completion_tokens},
              {"calls", r.calls},
              {"cost", r.cost},
              {"wall_time_s", r.wall_time_s},
              {"status", to_string(r.status)},
              {"note", r.note}};
    return j.dump(2) + "\n";
}

RunRecord parse_record(std::string_view text) {
    try {
        const json j = json::parse(text);
        RunRecord r;
        r.agent = j.at("agent").get<std::string>();
        r.env = parse_env_id(j.at("env").get<std::string>());
        r.level = j.at("level").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.returns = j.at("returns").get<std::vector<double>>();
        r.prompt_tokens = j.at("prompt_tokens").get<long long>();
        r.completion_tokens = j.at("completion_tokens").get<long long>();
        r.calls = j.at("calls").get<int>();
        r.cost = j.at("cost").get<double>();
        r.wall_time_s = j.at("wall_time_s").get<double>();
        r.status = parse_run_status(j.at("status").get<std::string>());
        r.note = j.value("note", "");
        return r;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("run record: ") + ex.what());
    } catch (const ConfigError& ex) {
        throw FormatError(std::string("run record: ") + ex.what());
    }
}

}  // namespace arena::eval
