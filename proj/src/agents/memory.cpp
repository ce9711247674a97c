#include "arena/agents/memory.hpp"

#include <algorithm>
#include <map>

#include "arena/grounding/grounding.hpp"

namespace arena::agents {

void ShortMemory::push(const Transition& t) {
    items_.push_back(t);
    while (items_.size() > window_) items_.pop_front();
}

ShortMemory update_short_memory(ShortMemory memory, const Transition& t) {
    memory.push(t);
    return memory;
}

bool KnowledgeMemory::has_trajectory() const {
    return std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.kind == EntryKind::trajectory; });
}

bool KnowledgeMemory::document_only() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.kind == EntryKind::document; });
}

void KnowledgeMemory::append(EntryKind kind, std::string text, std::string critique) {
    entries.push_back({kind, std::move(text), std::move(critique)});
}

int vote(std::span<const int> candidates) {
    std::map<int, int> counts;
    for (int c : candidates) ++counts[c];
    int best = candidates.front(), best_count = 0;
    for (const auto& [action, n] : counts) {  // ascending, so ties keep the smaller action
        if (n > best_count) {
            best = action;
            best_count = n;
        }
    }
    return best;
}

double vote_continuous(std::span<const double> candidates) {
    std::vector<double> v(candidates.begin(), candidates.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string trajectory_text(std::span<const Trajectory> episodes) {
    std::string out;
    int index = 0;
    for (const auto& ep : episodes) {
        ++index;
        if (ep.steps.empty()) continue;
        if (episodes.size() > 1) out += "Episode " + std::to_string(index) + ":\n";
        for (const auto& line : grounding::translate_transitions(ep.env, ep.steps)) out += line + "\n";
    }
    if (!out.empty()) out.pop_back();
    return out;
}

std::string truncate_middle(const std::string& text, std::size_t limit) {
    static constexpr std::string_view kGap = "\n...\n";
    if (text.size() <= limit) return text;
    if (limit <= kGap.size()) return text.substr(0, limit);
    const std::size_t head = (limit - kGap.size()) / 2;
    const std::size_t tail = limit - kGap.size() - head;
    return text.substr(0, head) + std::string(kGap) + text.substr(text.size() - tail);
}

}  // namespace arena::agents
