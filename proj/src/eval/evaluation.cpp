#include "arena/eval/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include "arena/core/assets.hpp"
#include "arena/core/error.hpp"

namespace arena::eval {

namespace {

std::string num(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw FormatError("not a number: '" + text + "'");
    }
    return value;
}

int env_order(EnvId env) {
    return static_cast<int>(std::find(kAllEnvs.begin(), kAllEnvs.end(), env) - kAllEnvs.begin());
}

using CellKey = std::tuple<std::string, int, std::string>;  // agent, env order, level

struct CellScores {
    std::vector<double> raw;
    std::vector<double> normalized;
};

std::map<CellKey, CellScores> group_cells(std::span<const RunRecord> records, const ThresholdTable& thresholds) {
    std::map<CellKey, CellScores> cells;
    for (const RunRecord& r : records) {
        if (!r.has_score()) continue;
        auto& c = cells[{r.agent, env_order(r.env), r.level}];
        c.raw.push_back(r.score());
        c.normalized.push_back(normalize(r.score(), thresholds.at(r.env)));
    }
    return cells;
}

double median_of(std::vector<double> values) { return aggregate(values).median; }

// Red (-1) through white (0) to green (1).
std::string heat_colour(double v) {
    v = std::clamp(v, -1.0, 1.0);
    int r = 255, g = 255, b = 255;
    if (v < 0) {
        g = b = static_cast<int>(std::lround(255 * (1 + v)));
    } else {
        r = b = static_cast<int>(std::lround(255 * (1 - v)));
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string radar_svg(const std::map<CellKey, CellScores>& cells) {
    std::vector<int> axes;
    std::vector<std::string> agents;
    for (const auto& [key, _] : cells) {
        if (std::find(axes.begin(), axes.end(), std::get<1>(key)) == axes.end()) axes.push_back(std::get<1>(key));
        if (std::find(agents.begin(), agents.end(), std::get<0>(key)) == agents.end()) agents.push_back(std::get<0>(key));
    }
    std::sort(axes.begin(), axes.end());

    constexpr double cx = 300, cy = 300, radius = 220;
    std::ostringstream svg;
    svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width="760" height="600" viewBox="0 0 760 600">)" << "\n";
    svg << R"(<rect width="760" height="600" fill="white"/>)" << "\n";
    const auto point = [&](std::size_t i, double v) {
        const double angle = -std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(i) /
                                                         static_cast<double>(std::max<std::size_t>(axes.size(), 1));
        const double r = radius * (std::clamp(v, -1.0, 1.0) + 1.0) / 2.0;
        return std::pair{cx + r * std::cos(angle), cy + r * std::sin(angle)};
    };
    // Grey disc: normalized score <= 0, i.e. below the solvability threshold.
    svg << "<circle cx=\"" << fixed(cx, 1) << "\" cy=\"" << fixed(cy, 1) << "\" r=\"" << fixed(radius / 2, 1)
        << "\" fill=\"#dddddd\"/>\n";
    svg << "<circle cx=\"" << fixed(cx, 1) << "\" cy=\"" << fixed(cy, 1) << "\" r=\"" << fixed(radius, 1)
        << "\" fill=\"none\" stroke=\"#999999\"/>\n";
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const auto [x, y] = point(i, 1.0);
        svg << "<line x1=\"" << fixed(cx, 1) << "\" y1=\"" << fixed(cy, 1) << "\" x2=\"" << fixed(x, 1) << "\" y2=\""
            << fixed(y, 1) << "\" stroke=\"#999999\"/>\n";
        const auto [lx, ly] = point(i, 1.12);
        svg << "<text x=\"" << fixed(lx, 1) << "\" y=\"" << fixed(ly, 1)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << gym_name(kAllEnvs[static_cast<std::size_t>(axes[i])])
            << "</text>\n";
    }
    for (std::size_t a = 0; a < agents.size(); ++a) {
        std::string points;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            double best = -1.0;
            for (const auto& [key, c] : cells) {
                if (std::get<0>(key) == agents[a] && std::get<1>(key) == axes[i]) {
                    best = std::max(best, median_of(c.normalized));
                }
            }
            const auto [x, y] = point(i, best);
            if (!points.empty()) points += ' ';
            points += fixed(x, 1) + "," + fixed(y, 1);
        }
        const char* colour = kPalette[a % std::size(kPalette)];
        svg << "<polygon points=\"" << points << "\" fill=\"" << colour << "\" fill-opacity=\"0.15\" stroke=\""
            << colour << "\" stroke-width=\"2\"/>\n";
        svg << "<rect x=\"600\" y=\"" << 40 + 22 * a << "\" width=\"14\" height=\"14\" fill=\"" << colour << "\"/>\n";
        svg << "<text x=\"620\" y=\"" << 52 + 22 * a << "\" font-size=\"13\">" << agents[a] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string heatmap_svg(const std::map<CellKey, CellScores>& cells) {
    std::vector<std::string> agents, levels;
    for (const auto& [key, _] : cells) {
        if (std::find(agents.begin(), agents.end(), std::get<0>(key)) == agents.end()) agents.push_back(std::get<0>(key));
        if (std::find(levels.begin(), levels.end(), std::get<2>(key)) == levels.end()) levels.push_back(std::get<2>(key));
    }
    std::sort(levels.begin(), levels.end());
    constexpr int cell_w = 90, cell_h = 36, left = 140, top = 40;
    const int width = left + cell_w * static_cast<int>(levels.size()) + 20;
    const int height = top + cell_h * static_cast<int>(agents.size()) + 20;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    for (std::size_t l = 0; l < levels.size(); ++l) {
        svg << "<text x=\"" << left + cell_w * static_cast<int>(l) + cell_w / 2 << "\" y=\"" << top - 10
            << "\" font-size=\"13\" text-anchor=\"middle\">" << levels[l] << "</text>\n";
    }
    for (std::size_t a = 0; a < agents.size(); ++a) {
        const int y = top + cell_h * static_cast<int>(a);
        svg << "<text x=\"" << left - 8 << "\" y=\"" << y + cell_h / 2 + 4 << "\" font-size=\"13\" text-anchor=\"end\">"
            << agents[a] << "</text>\n";
        for (std::size_t l = 0; l < levels.size(); ++l) {
            // Mean over envs of the median normalized score.
            double sum = 0.0;
            int count = 0;
            for (const auto& [key, c] : cells) {
                if (std::get<0>(key) == agents[a] && std::get<2>(key) == levels[l]) {
                    sum += median_of(c.normalized);
                    ++count;
                }
            }
            const int x = left + cell_w * static_cast<int>(l);
            if (count == 0) {
                svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\"" << cell_h
                    << "\" fill=\"#f4f4f4\" stroke=\"#cccccc\"/>\n";
                continue;
            }
            const double mean = sum / count;
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\"" << cell_h
                << "\" fill=\"" << heat_colour(mean) << "\" stroke=\"#cccccc\"/>\n";
            svg << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h / 2 + 4
                << "\" font-size=\"12\" text-anchor=\"middle\">" << fixed(mean, 2) << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace

void ThresholdTable::set(const std::string& env, Thresholds t) {
    if (!(t.solvable < t.sota)) throw FormatError("thresholds for " + env + " need solvable < sota");
    rows_[env] = t;
}

const Thresholds& ThresholdTable::at(const std::string& env) const {
    const auto it = rows_.find(env);
    if (it == rows_.end()) throw ConfigError("no thresholds for env '" + env + "'");
    return it->second;
}

ThresholdTable default_thresholds() {
    ThresholdTable t;
    t.set("blackjack", {10, 20});
    t.set("cartpole", {40, 200});
    t.set("cliffwalking", {-200, -13});
    t.set("mountaincar_continuous", {0, 94.53});
    t.set("mountaincar", {-200, -87});
    t.set("acrobot", {-200, -72});
    t.set("taxi", {0, 7.52});
    t.set("lunarlander", {120, 261});
    t.set("frozenlake", {0, 1});
    return t;
}

ThresholdTable parse_thresholds(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    ThresholdTable table;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto parts = split(line, ',');
        if (header) {
            if (parts.size() != 3 || parts[0] != "env" || parts[1] != "solvable" || parts[2] != "sota") {
                throw FormatError("thresholds header must be env,solvable,sota");
            }
            header = false;
            continue;
        }
        if (parts.size() != 3) throw FormatError("thresholds row needs 3 fields: " + line);
        table.set(parts[0], {parse_double(parts[1]), parse_double(parts[2])});
    }
    if (header) throw FormatError("thresholds file is empty");
    return table;
}

ThresholdTable load_thresholds(const std::filesystem::path& path) { return parse_thresholds(read_text_file(path)); }

std::string serialize_thresholds(const ThresholdTable& table) {
    std::string out = "env,solvable,sota\n";
    for (const auto& [env, t] : table.rows()) out += env + "," + num(t.solvable) + "," + num(t.sota) + "\n";
    return out;
}

double undiscounted_return(const Trajectory& traj) {
    double total = 0.0;
    for (const Transition& t : traj.steps) total += t.reward;
    return total;
}

double normalize(double r, const Thresholds& t) {
    if (r <= t.solvable) return -1.0;
    return (r - t.solvable) / (t.sota - t.solvable);
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw EmptyInput("quantile of an empty list");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

Aggregate aggregate(std::span<const double> values) {
    if (values.empty()) throw EmptyInput("aggregate of an empty list");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    Aggregate a;
    a.median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    a.iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    a.max = sorted.back();
    return a;
}

int blackjack_agreement_score(std::span<const BlackjackEpisode> episodes, const policies::TabularPolicy& oracle) {
    if (episodes.size() != static_cast<std::size_t>(kBlackjackGroupSize)) {
        throw WrongEpisodeCount("agreement score needs exactly 20 hands, got " + std::to_string(episodes.size()));
    }
    int score = 0;
    for (const auto& hand : episodes) {
        const bool agrees = std::all_of(hand.begin(), hand.end(), [&](const auto& step) {
            return oracle.action_for(step.first) == step.second;
        });
        score += agrees ? 1 : 0;
    }
    return score;
}

std::vector<int> blackjack_group_scores(std::span<const BlackjackEpisode> episodes,
                                        const policies::TabularPolicy& oracle) {
    if (episodes.empty() || episodes.size() % kBlackjackGroupSize != 0) {
        throw WrongEpisodeCount("hand count must be a positive multiple of 20, got " + std::to_string(episodes.size()));
    }
    std::vector<int> scores;
    for (std::size_t i = 0; i < episodes.size(); i += kBlackjackGroupSize) {
        scores.push_back(blackjack_agreement_score(episodes.subspan(i, kBlackjackGroupSize), oracle));
    }
    return scores;
}

SolvabilityTable solvability_table(std::span<const RunRecord> records, const ThresholdTable& thresholds) {
    SolvabilityTable table;
    std::set<std::pair<std::string, int>> by_level, by_agent;
    for (const auto& [key, c] : group_cells(records, thresholds)) {
        const auto& [agent, env, level] = key;
        SolvabilityCell cell{agent, kAllEnvs[static_cast<std::size_t>(env)], level,
                             static_cast<int>(c.normalized.size()), median_of(c.normalized), false};
        cell.solved = cell.median_normalized > 0.0;
        table.cells.push_back(cell);
        table.solved_envs_by_level.try_emplace(level, 0);
        table.solved_envs_by_agent.try_emplace(agent, 0);
        table.solved_envs_by_agent_level.try_emplace({agent, level}, 0);
        if (!cell.solved) continue;
        if (by_level.insert({level, env}).second) ++table.solved_envs_by_level[level];
        if (by_agent.insert({agent, env}).second) ++table.solved_envs_by_agent[agent];
        ++table.solved_envs_by_agent_level[{agent, level}];
    }
    return table;
}

void export_report(std::span<const RunRecord> records, const ThresholdTable& thresholds,
                   const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<const RunRecord*> sorted;
    for (const RunRecord& r : records) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(), [](const RunRecord* a, const RunRecord* b) {
        return std::tuple(a->agent, env_order(a->env), a->level, a->seed) <
               std::tuple(b->agent, env_order(b->env), b->level, b->seed);
    });

    std::string results =
        "agent,env,level,seed,status,score,normalized,returns,prompt_tokens,completion_tokens,calls,cost,wall_time_s,"
        "note\n";
    for (const RunRecord* r : sorted) {
        std::string returns;
        for (double v : r->returns) returns += (returns.empty() ? "" : ";") + num(v);
        std::string score, normalized;
        if (r->has_score()) {
            score = num(r->score());
            normalized = num(normalize(r->score(), thresholds.at(r->env)));
        }
        results += r->agent + "," + std::string(to_string(r->env)) + "," + r->level + "," + std::to_string(r->seed) +
                   "," + std::string(to_string(r->status)) + "," + score + "," + normalized + "," + returns + "," +
                   std::to_string(r->prompt_tokens) + "," + std::to_string(r->completion_tokens) + "," +
                   std::to_string(r->calls) + "," + num(r->cost) + "," + num(r->wall_time_s) + "," +
                   csv_field(r->note) + "\n";
    }
    write_file_atomic(out_dir / "results.csv", results);

    const auto cells = group_cells(records, thresholds);
    std::string summary = "agent,env,level,seeds,median,iqr,max,median_normalized,solved\n";
    for (const auto& [key, c] : cells) {
        const auto& [agent, env, level] = key;
        const Aggregate a = aggregate(c.raw);
        const double med_norm = median_of(c.normalized);
        summary += agent + "," + std::string(to_string(kAllEnvs[static_cast<std::size_t>(env)])) + "," + level + "," +
                   std::to_string(c.raw.size()) + "," + num(a.median) + "," + num(a.iqr) + "," + num(a.max) + "," +
                   num(med_norm) + "," + (med_norm > 0.0 ? "yes" : "no") + "\n";
    }
    write_file_atomic(out_dir / "summary.csv", summary);

    struct Cost {
        double time = 0.0, cost = 0.0;
        long long prompt = 0, completion = 0, calls = 0;
    };
    std::map<int, Cost> by_env;
    std::map<std::string, Cost> by_agent;
    Cost total;
    for (const RunRecord* r : sorted) {
        for (Cost* c : {&by_env[env_order(r->env)], &by_agent[r->agent], &total}) {
            c->time += r->wall_time_s;
            c->cost += r->cost;
            c->prompt += r->prompt_tokens;
            c->completion += r->completion_tokens;
            c->calls += r->calls;
        }
    }
    const auto cost_row = [](const std::string& group, const std::string& name, const Cost& c) {
        return group + "," + name + "," + num(c.time) + "," + num(c.cost) + "," + std::to_string(c.prompt) + "," +
               std::to_string(c.completion) + "," + std::to_string(c.calls) + "\n";
    };
    std::string costs = "group,name,time_s,cost,prompt_tokens,completion_tokens,calls\n";
    for (const auto& [env, c] : by_env) costs += cost_row("env", std::string(gym_name(kAllEnvs[static_cast<std::size_t>(env)])), c);
    for (const auto& [agent, c] : by_agent) costs += cost_row("agent", agent, c);
    costs += cost_row("total", "all", total);
    write_file_atomic(out_dir / "costs.csv", costs);

    write_file_atomic(out_dir / "radar.svg", radar_svg(cells));
    write_file_atomic(out_dir / "heatmap.svg", heatmap_svg(cells));
}

}  // namespace arena::eval
