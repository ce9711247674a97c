#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "arena/core/assets.hpp"
#include "arena/core/error.hpp"
#include "arena/eval/evaluation.hpp"
#include "arena/harness/harness.hpp"
#include "arena/llm/mock.hpp"

using namespace arena;
using namespace arena::harness;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("arena_harness_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

int count_files(const fs::path& root, const std::string& name) {
    int n = 0;
    if (!fs::exists(root)) return 0;
    for (const auto& e : fs::recursive_directory_iterator(root)) n += e.path().filename() == name ? 1 : 0;
    return n;
}

const char* kSmallConfig = R"(# tiny mock grid
agents = naive
envs = cliffwalking
levels = lv1
seeds = 3
backend = mock
step_cap = 15
workers = 2
)";

}  // namespace

TEST_CASE("config parsing") {
    const auto c = parse_config(R"(
agents = exe, reflexion   # two agents
envs = cartpole, CliffWalking-v0
levels = 1, lv3
seed_count = 3
backend = live
model = gpt-4-0613
token_budget = 5000
step_cap = 200
step_cap.cartpole = 50
requests_per_minute = 20
)", "/base");
    CHECK(c.agents.size() == 2);
    CHECK(c.envs == std::vector<EnvId>{EnvId::cartpole, EnvId::cliffwalking});
    CHECK(c.levels == std::vector<scenario::Level>{scenario::Level::lv1, scenario::Level::lv3});
    CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
    CHECK(c.backend == BackendKind::live);
    CHECK(c.model == "gpt-4-0613");
    CHECK(c.token_budget == 5000);
    CHECK(c.step_cap_for(EnvId::cartpole) == 50);
    CHECK(c.step_cap_for(EnvId::cliffwalking) == 200);
    CHECK(c.cell_count() == 2 * 2 * 2 * 3);
    CHECK(parse_config(canonical_config(c)).cell_count() == c.cell_count());
    CHECK(canonical_config(parse_config(canonical_config(c))) == canonical_config(c));

    const auto defaults = parse_config("agents = all\nenvs = all\nlevels = all\n");
    CHECK(defaults.seeds.size() == 5);
    CHECK(defaults.cell_count() == 7 * 7 * 5 * 5);
    CHECK(defaults.backend == BackendKind::mock);

    CHECK_THROWS_AS(parse_config("agents = naive\nenvs = taxi\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("agents = naive\nenvs = taxi\nlevels = 1\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("agents = naive\nenvs = taxi\nlevels = 1\nworkers = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("agents = naive\nenvs = pong\nlevels = 1\n"), ConfigError);
}

TEST_CASE("one-cell mock run writes one record and one trajectory") {
    const auto dir = fresh_dir("one");
    const auto config = parse_config(kSmallConfig);
    const auto summary = run_experiment(kSmallConfig, config, dir);
    CHECK(summary.executed == 1);
    CHECK(summary.completed == 1);
    CHECK(summary.all_completed());
    CHECK(count_files(dir, kRecordFile) == 1);
    CHECK(count_files(dir, kTrajectoryFile) == 1);
    CHECK(slurp(dir / kSnapshotFile) == kSmallConfig);

    const Cell cell{agents::AgentKind::naive, EnvId::cliffwalking, scenario::Level::lv1, 3};
    const auto record = eval::parse_record(slurp(cell_dir(dir, cell) / kRecordFile));
    CHECK(record.status == eval::RunStatus::completed);
    CHECK(record.returns.size() == 1);
    CHECK(record.calls > 0);
    CHECK(record.cost == 0.0);
    const auto traj = read_trajectory_file(cell_dir(dir, cell) / kTrajectoryFile, EnvId::cliffwalking);
    REQUIRE(traj.episodes.size() == 1);
    CHECK(traj.episodes[0].size() == 15);
    const auto transcript = slurp(cell_dir(dir, cell) / kTranscriptFile);
    CHECK(std::count(transcript.begin(), transcript.end(), '\n') == record.calls);
}

TEST_CASE("grid size, reruns and resume") {
    const std::string text = R"(agents = naive, exe
envs = cliffwalking, frozenlake
levels = lv3
seed_count = 5
step_cap = 8
episodes = 5
)";
    const auto config = parse_config(text);
    const auto a = fresh_dir("grid_a");
    const auto b = fresh_dir("grid_b");
    const auto sa = run_experiment(text, config, a);
    CHECK(sa.executed == 20);
    CHECK(sa.completed == 20);
    CHECK(count_files(a, kRecordFile) == 20);
    run_experiment(text, config, b);

    for (const auto& cell : grid_cells(config)) {
        for (const char* f : {kRecordFile, kTrajectoryFile, kTranscriptFile}) {
            CHECK(slurp(cell_dir(a, cell) / f) == slurp(cell_dir(b, cell) / f));
        }
    }

    // Complete directory: nothing executes.
    const auto again = resume_experiment(a);
    CHECK(again.executed == 0);
    CHECK(again.reused == 20);

    // One missing record and one half-written cell: both rerun.
    const auto cells = grid_cells(config);
    const auto before = slurp(cell_dir(a, cells[7]) / kRecordFile);
    fs::remove(cell_dir(a, cells[7]) / kRecordFile);
    fs::remove(cell_dir(a, cells[11]) / kRecordFile);
    std::ofstream(cell_dir(a, cells[11]) / (std::string(kRecordFile) + ".tmp")) << "{\"partial";
    const auto resumed = resume_experiment(a, config);
    CHECK(resumed.executed == 2);
    CHECK(resumed.completed == 20);
    CHECK(slurp(cell_dir(a, cells[7]) / kRecordFile) == before);

    auto drifted = config;
    drifted.step_cap = 9;
    CHECK_THROWS_AS(resume_experiment(a, drifted), ConfigDrift);
    CHECK_THROWS_AS(run_experiment(text, drifted, a), ConfigDrift);
    CHECK_THROWS_AS(resume_experiment(fresh_dir("empty")), MissingAsset);
}

TEST_CASE("failures are recorded and the run continues") {
    const std::string text = "agents = naive\nenvs = cliffwalking\nlevels = lv1, lv2\nseeds = 0\nstep_cap = 5\n";
    auto config = parse_config(text);
    config.assets = fresh_dir("no_assets");  // lv2 dataset missing
    const auto dir = fresh_dir("fail");
    const auto summary = run_experiment(text, config, dir);
    CHECK(summary.completed == 1);
    CHECK(summary.failed == 1);
    CHECK(!summary.all_completed());
    const Cell lv2{agents::AgentKind::naive, EnvId::cliffwalking, scenario::Level::lv2, 0};
    const auto record = eval::parse_record(slurp(cell_dir(dir, lv2) / kRecordFile));
    CHECK(record.status == eval::RunStatus::failed);
    CHECK(record.note.find("cliffwalking.random.jsonl") != std::string::npos);
}

TEST_CASE("token budget skips remaining cells") {
    const std::string text = "agents = naive\nenvs = cliffwalking\nlevels = lv1\nseed_count = 4\nstep_cap = 10\n"
                             "token_budget = 1\nworkers = 1\n";
    const auto config = parse_config(text);
    const auto dir = fresh_dir("budget");
    const auto summary = run_experiment(text, config, dir);
    CHECK(summary.skipped >= 3);
    int marked = 0;
    for (const auto& r : load_records(dir)) {
        if (r.status == eval::RunStatus::skipped) marked += r.note.find(kBudgetNote) == 0 ? 1 : 0;
    }
    CHECK(marked == summary.skipped);
}

TEST_CASE("scripted mock backend from the config") {
    const auto dir = fresh_dir("script");
    std::ofstream(dir / "script.json") << R"(["{\"action\": 2}", "{\"action\": 2}"])";
    const std::string text = "agents = naive\nenvs = cliffwalking\nlevels = lv1\nseeds = 0\nstep_cap = 4\n"
                             "mock_script = script.json\n";
    const auto config = parse_config(text, dir);
    REQUIRE(config.mock_script.has_value());
    run_experiment(text, config, dir / "run");
    const Cell cell{agents::AgentKind::naive, EnvId::cliffwalking, scenario::Level::lv1, 0};
    const auto traj = read_trajectory_file(cell_dir(dir / "run", cell) / kTrajectoryFile);
    REQUIRE(traj.episodes[0].size() == 4);
    CHECK(std::get<DiscreteAction>(traj.episodes[0].steps[0].action).index == 1);
    CHECK(std::get<DiscreteAction>(traj.episodes[0].steps[2].action).index == 0);
}

TEST_CASE("report") {
    CHECK_THROWS_AS(report(fresh_dir("empty_report")), EmptyRun);

    const auto dir = fresh_dir("report");
    const std::string text = "agents = naive, cot\nenvs = cliffwalking\nlevels = lv1\nseed_count = 2\nstep_cap = 6\n";
    run_experiment(text, parse_config(text), dir);
    const auto out = report(dir);
    const auto results = slurp(out / "results.csv");
    CHECK(std::count(results.begin(), results.end(), '\n') == 1 + 4);
    for (const char* f : {"summary.csv", "costs.csv", "radar.svg", "heatmap.svg"}) CHECK(fs::exists(out / f));

    // Ledger sums: costs.csv totals equal the records.
    long long calls = 0;
    for (const auto& r : load_records(dir)) calls += r.calls;
    const auto costs = slurp(out / "costs.csv");
    CHECK(costs.find("total,all,") != std::string::npos);
    CHECK(costs.find("," + std::to_string(calls) + "\n", costs.find("total,all,")) != std::string::npos);

    // A threshold override changes the normalized column.
    std::ofstream(dir / "thresholds.csv") << "env,solvable,sota\ncliffwalking,-200,-6\n";
    const auto before = results;
    report(dir, dir / "thresholds.csv");
    CHECK(slurp(out / "results.csv") != before);
}

TEST_CASE("expert-gen") {
    const auto dir = fresh_dir("gen");
    const auto file = expert_gen(EnvId::cliffwalking, "expert", 5, 9, dir / "c.jsonl");
    REQUIRE(file.episodes.size() == 5);
    for (const auto& ep : file.episodes) {
        double ret = 0.0;
        for (const auto& s : ep.steps) ret += s.reward;
        CHECK(ret == -13.0);
    }
    expert_gen(EnvId::cliffwalking, "expert", 5, 9, dir / "d.jsonl");
    CHECK(slurp(dir / "c.jsonl") == slurp(dir / "d.jsonl"));
    CHECK(expert_gen(EnvId::cartpole, "random", 5, 1, dir / "r.jsonl").episodes.size() == 5);
    CHECK(dataset_file_name(EnvId::taxi, "random") == "taxi.random.jsonl");
    CHECK(dataset_file_name(EnvId::taxi, "tabular") == "taxi.expert.jsonl");
    CHECK(scenario::dataset_path("/a", EnvId::taxi, scenario::Level::lv4).filename() ==
          dataset_file_name(EnvId::taxi, "expert"));
}
