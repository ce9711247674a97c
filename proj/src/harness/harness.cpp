#include "arena/harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <mutex>
#include <sstream>
#include <thread>

#include "arena/core/assets.hpp"
#include "arena/core/error.hpp"
#include "arena/eval/evaluation.hpp"
#include "arena/llm/live.hpp"
#include "arena/llm/mock.hpp"
#include "arena/policies/policies.hpp"
#include "json.hpp"

namespace arena::harness {

namespace fs = std::filesystem;

namespace {

constexpr const char* kEffectiveFile = "effective.txt";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("bad number for '" + key + "': '" + value + "'");
    return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(value);
    if (p.is_relative() && !base.empty()) p = base / p;
    return p.lexically_normal();
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
    return out;
}

std::vector<std::string> read_script(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_text_file(path)).get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("mock script " + path.string() + " must be a JSON array of strings: " + ex.what());
    }
}

bool has_completed_record(const fs::path& dir) {
    const fs::path file = dir / kRecordFile;
    if (!fs::exists(file)) return false;
    try {
        return eval::parse_record(read_text_file(file)).status == eval::RunStatus::completed;
    } catch (const Error&) {
        return false;
    }
}

std::optional<llm::Pricing> try_pricing(const fs::path& path) {
    if (path.empty() || !fs::exists(path)) return std::nullopt;
    return llm::load_pricing(path);
}

RunSummary execute(const ExperimentConfig& config, const fs::path& run_dir, const BackendFactory& factory) {
    const auto cells = grid_cells(config);
    std::vector<Cell> todo;
    RunSummary summary;
    long long spent = 0;
    for (const Cell& c : cells) {
        if (has_completed_record(cell_dir(run_dir, c))) {
            ++summary.reused;
            const auto r = eval::parse_record(read_text_file(cell_dir(run_dir, c) / kRecordFile));
            spent += r.prompt_tokens + r.completion_tokens;
        } else {
            todo.push_back(c);
        }
    }

    llm::UsageLedger ledger(config.token_budget);
    if (spent > 0) ledger.append({{"previous", "", "", 0}, "", spent, 0, 0, 0, true});
    const auto pricing = try_pricing(config.pricing);
    const BackendFactory make = factory ? factory : default_backend_factory(config);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < todo.size(); i = next++) {
            const Cell& cell = todo[i];
            std::shared_ptr<llm::Backend> backend;
            try {
                backend = make(cell);
            } catch (const Error& ex) {
                eval::RunRecord r;
                r.agent = std::string(agents::to_string(cell.agent));
                r.env = cell.env;
                r.level = std::string(scenario::to_string(cell.level));
                r.seed = cell.seed;
                r.status = eval::RunStatus::failed;
                r.note = ex.what();
                fs::create_directories(cell_dir(run_dir, cell));
                write_file_atomic(cell_dir(run_dir, cell) / kRecordFile, eval::serialize_record(r));
                continue;
            }
            run_cell(config, cell, *backend, ledger, pricing ? &*pricing : nullptr, run_dir);
        }
    };
    const int threads = std::clamp(config.workers, 1, std::max(1, static_cast<int>(todo.size())));
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    summary.executed = static_cast<int>(todo.size());

    for (const Cell& c : cells) {
        const fs::path file = cell_dir(run_dir, c) / kRecordFile;
        if (!fs::exists(file)) {
            ++summary.failed;
            continue;
        }
        switch (eval::parse_record(read_text_file(file)).status) {
            case eval::RunStatus::completed: ++summary.completed; break;
            case eval::RunStatus::failed: ++summary.failed; break;
            case eval::RunStatus::skipped: ++summary.skipped; break;
        }
    }
    return summary;
}

}  // namespace

std::string_view to_string(BackendKind kind) { return kind == BackendKind::mock ? "mock" : "live"; }

BackendKind parse_backend_kind(std::string_view text) {
    if (text == "mock") return BackendKind::mock;
    if (text == "live") return BackendKind::live;
    throw ConfigError("backend must be mock or live, got '" + std::string(text) + "'");
}

int ExperimentConfig::step_cap_for(EnvId env) const {
    const auto it = step_caps.find(env);
    return it == step_caps.end() ? step_cap : it->second;
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
    ExperimentConfig c;
    std::optional<std::string> assets, pricing;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "agents") {
            c.agents.clear();
            for (const auto& v : split_list(value)) {
                if (v == "all") c.agents.assign(agents::kAllAgents.begin(), agents::kAllAgents.end());
                else c.agents.push_back(agents::parse_agent_kind(v));
            }
        } else if (key == "envs") {
            c.envs.clear();
            for (const auto& v : split_list(value)) {
                if (v == "all") c.envs.assign(kAllEnvs.begin(), kAllEnvs.end());
                else c.envs.push_back(parse_env_id(v));
            }
        } else if (key == "levels") {
            c.levels.clear();
            for (const auto& v : split_list(value)) {
                if (v == "all") c.levels.assign(scenario::kAllLevels.begin(), scenario::kAllLevels.end());
                else c.levels.push_back(scenario::parse_level(v));
            }
        } else if (key == "seeds") {
            c.seeds.clear();
            for (const auto& v : split_list(value)) c.seeds.push_back(parse_number<std::uint64_t>(key, v));
        } else if (key == "seed_count") {
            const int k = parse_number<int>(key, value);
            if (k < 1) throw ConfigError("seed_count must be positive");
            c.seeds.clear();
            for (int i = 0; i < k; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
        } else if (key == "backend") {
            c.backend = parse_backend_kind(value);
        } else if (key == "model") {
            c.model = value;
        } else if (key == "mock_script") {
            if (value.empty()) c.mock_script.reset();
            else c.mock_script = resolve(base_dir, value);
        } else if (key == "requests_per_minute") {
            c.requests_per_minute = parse_number<double>(key, value);
        } else if (key == "token_budget") {
            if (value.empty() || value == "none") c.token_budget.reset();
            else c.token_budget = parse_number<long long>(key, value);
        } else if (key == "workers") {
            c.workers = parse_number<int>(key, value);
            if (c.workers < 1) throw ConfigError("workers must be positive");
        } else if (key == "episodes") {
            c.episodes = parse_number<int>(key, value);
            if (c.episodes < 1) throw ConfigError("episodes must be positive");
        } else if (key == "step_cap") {
            c.step_cap = parse_number<int>(key, value);
        } else if (key.rfind("step_cap.", 0) == 0) {
            c.step_caps[parse_env_id(key.substr(9))] = parse_number<int>(key, value);
        } else if (key == "assets") {
            assets = value;
        } else if (key == "pricing") {
            pricing = value;
        } else if (key == "output") {
            c.output = resolve(base_dir, value);
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (c.agents.empty() || c.envs.empty() || c.levels.empty()) {
        throw ConfigError("config needs non-empty agents, envs and levels");
    }
    if (c.seeds.empty()) throw ConfigError("config needs at least one seed");
    c.assets = assets ? resolve(base_dir, *assets) : default_asset_dir();
    c.pricing = pricing ? resolve(base_dir, *pricing) : c.assets / "pricing.csv";
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    return parse_config(read_text_file(path), fs::absolute(path).parent_path());
}

std::string canonical_config(const ExperimentConfig& c) {
    std::vector<std::string> agents, envs, levels, seeds;
    for (auto a : c.agents) agents.emplace_back(agents::to_string(a));
    for (auto e : c.envs) envs.emplace_back(to_string(e));
    for (auto l : c.levels) levels.emplace_back(scenario::to_string(l));
    for (auto s : c.seeds) seeds.push_back(std::to_string(s));
    std::ostringstream os;
    os << "agents = " << join(agents) << "\nenvs = " << join(envs) << "\nlevels = " << join(levels)
       << "\nseeds = " << join(seeds) << "\nbackend = " << to_string(c.backend) << "\nmodel = " << c.model
       << "\nmock_script = " << (c.mock_script ? fs::absolute(*c.mock_script).string() : "")
       << "\nrequests_per_minute = " << c.requests_per_minute
       << "\ntoken_budget = " << (c.token_budget ? std::to_string(*c.token_budget) : "none")
       << "\nepisodes = " << c.episodes << "\nstep_cap = " << c.step_cap << '\n';
    for (const auto& [env, cap] : c.step_caps) os << "step_cap." << to_string(env) << " = " << cap << '\n';
    os << "assets = " << fs::absolute(c.assets).string() << "\npricing = " << fs::absolute(c.pricing).string()
       << '\n';
    return os.str();
}

std::vector<Cell> grid_cells(const ExperimentConfig& config) {
    std::vector<Cell> out;
    for (auto a : config.agents)
        for (auto e : config.envs)
            for (auto l : config.levels)
                for (auto s : config.seeds) out.push_back({a, e, l, s});
    return out;
}

fs::path cell_dir(const fs::path& run_dir, const Cell& cell) {
    return run_dir / "cells" / std::string(agents::to_string(cell.agent)) / std::string(to_string(cell.env)) /
           std::string(scenario::to_string(cell.level)) / ("seed" + std::to_string(cell.seed));
}

BackendFactory default_backend_factory(const ExperimentConfig& config) {
    if (config.backend == BackendKind::mock) {
        const auto script = config.mock_script ? read_script(*config.mock_script) : std::vector<std::string>{};
        return [script](const Cell&) {
            return std::make_shared<llm::MockBackend>(script, llm::default_mock_reply);
        };
    }
    auto live = llm::LiveConfig::from_env();
    if (!config.model.empty()) live.model = config.model;
    live.requests_per_minute = config.requests_per_minute;
    auto shared = std::make_shared<llm::LiveBackend>(live);
    return [shared](const Cell&) { return shared; };
}

eval::RunRecord run_cell(const ExperimentConfig& config, const Cell& cell, llm::Backend& backend,
                         llm::UsageLedger& ledger, const llm::Pricing* pricing, const fs::path& run_dir) {
    const fs::path dir = cell_dir(run_dir, cell);
    fs::create_directories(dir);
    const auto tag = scenario::cell_tag(cell.agent, cell.env, cell.level, cell.seed);
    llm::Transcript transcript;
    scenario::ScenarioResult result;
    auto& record = result.record;

    if (ledger.over_budget()) {
        record.status = eval::RunStatus::skipped;
        record.note = kBudgetNote;
    } else {
        try {
            auto scenario = scenario::make_scenario(cell.level, cell.env, config.assets, cell.seed);
            scenario.episodes = config.episodes;
            scenario.step_cap = config.step_cap_for(cell.env);
            llm::Gateway gateway(backend, ledger, tag, &transcript);
            agents::AgentOptions options;
            options.seed = cell.seed;
            agents::Agent agent(cell.agent, cell.env, gateway, options);
            result = scenario::run_scenario(agent, scenario);
            if (record.status == eval::RunStatus::failed && ledger.over_budget()) {
                record.status = eval::RunStatus::skipped;
                record.note = std::string(kBudgetNote) + " (" + record.note + ")";
            }
        } catch (const Error& ex) {
            record.status = eval::RunStatus::failed;
            record.note = ex.what();
        }
    }
    record.agent = std::string(agents::to_string(cell.agent));
    record.env = cell.env;
    record.level = std::string(scenario::to_string(cell.level));
    record.seed = cell.seed;

    const auto usage = ledger.records();
    const llm::Pricing* price = pricing;
    if (price != nullptr && !price->contains(backend.model())) {
        price = nullptr;
        if (record.note.empty()) record.note = "no price listed for model " + backend.model();
    }
    scenario::fill_usage(record, usage, tag, price);

    TrajectoryFile traj{cell.env, cell.seed, record.agent, creation_stamp(), result.episodes};
    write_trajectory_file(dir / kTrajectoryFile, traj);
    write_file_atomic(dir / kTranscriptFile, transcript.to_jsonl());
    write_file_atomic(dir / kRecordFile, eval::serialize_record(record));
    return record;
}

RunSummary run_experiment(const std::string& config_text, const ExperimentConfig& config, const fs::path& run_dir,
                          const BackendFactory& factory) {
    fs::create_directories(run_dir);
    const fs::path snapshot = run_dir / kSnapshotFile;
    if (fs::exists(run_dir / kEffectiveFile) &&
        read_text_file(run_dir / kEffectiveFile) != canonical_config(config)) {
        throw ConfigDrift("run directory " + run_dir.string() + " was started with a different config");
    }
    write_file_atomic(snapshot, config_text);
    write_file_atomic(run_dir / kEffectiveFile, canonical_config(config));
    return execute(config, run_dir, factory);
}

RunSummary resume_experiment(const fs::path& run_dir, const std::optional<ExperimentConfig>& config,
                             const BackendFactory& factory) {
    const fs::path effective = run_dir / kEffectiveFile;
    if (!fs::exists(effective)) throw MissingAsset("no config snapshot in " + run_dir.string());
    const std::string stored = read_text_file(effective);
    auto snapshot = parse_config(stored);
    if (config) {
        if (canonical_config(*config) != stored) {
            throw ConfigDrift("config differs from the snapshot in " + run_dir.string());
        }
        snapshot.workers = config->workers;
    }
    return execute(snapshot, run_dir, factory);
}

std::vector<eval::RunRecord> load_records(const fs::path& run_dir) {
    std::vector<fs::path> files;
    const fs::path cells = run_dir / "cells";
    if (fs::exists(cells)) {
        for (const auto& entry : fs::recursive_directory_iterator(cells)) {
            if (entry.is_regular_file() && entry.path().filename() == kRecordFile) files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<eval::RunRecord> out;
    for (const auto& f : files) {
        try {
            out.push_back(eval::parse_record(read_text_file(f)));
        } catch (const FormatError&) {
        }
    }
    return out;
}

fs::path report(const fs::path& run_dir, const std::optional<fs::path>& thresholds) {
    const auto records = load_records(run_dir);
    if (records.empty()) throw EmptyRun("no run records under " + run_dir.string());
    const auto table = thresholds ? eval::load_thresholds(*thresholds) : eval::default_thresholds();
    const fs::path out = run_dir / "report";
    eval::export_report(records, table, out);
    return out;
}

std::string dataset_file_name(EnvId env, std::string_view policy) {
    const bool random = policies::parse_policy_kind(policy) == policies::PolicyKind::random;
    return std::string(to_string(env)) + (random ? ".random" : ".expert") + ".jsonl";
}

TrajectoryFile expert_gen(EnvId env, std::string_view policy, int n, std::uint64_t seed, const fs::path& out) {
    const auto kind = policies::parse_policy_kind(policy);
    TrajectoryFile file{env, seed, std::string(policies::to_string(kind)), creation_stamp(),
                        policies::generate_dataset(kind, env, n, seed)};
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_trajectory_file(out, file);
    return file;
}

}  // namespace arena::harness
