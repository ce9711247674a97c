#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arena/env/types.hpp"

namespace arena::agents {

inline constexpr std::size_t kDefaultMemoryWindow = 8;
inline constexpr std::size_t kDigestChars = 2000;

/// Most recent transitions of the current episode.
class ShortMemory {
public:
    explicit ShortMemory(std::size_t window = kDefaultMemoryWindow) : window_(window == 0 ? 1 : window) {}

    void push(const Transition& t);
    void clear() { items_.clear(); }
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    std::size_t window() const { return window_; }
    std::vector<Transition> items() const { return {items_.begin(), items_.end()}; }

private:
    std::size_t window_;
    std::deque<Transition> items_;
};

/// Appends and evicts the oldest transitions beyond the window.
ShortMemory update_short_memory(ShortMemory memory, const Transition& t);

enum class EntryKind { document, expert, trajectory, reflection, summary };

struct KnowledgeEntry {
    EntryKind kind = EntryKind::document;
    std::string text;
    std::string critique;  // trajectories evaluated by a critic
};

/// Long-lived knowledge of an agent across episodes.
struct KnowledgeMemory {
    std::vector<KnowledgeEntry> entries;

    std::size_t size() const { return entries.size(); }
    bool has_trajectory() const;
    /// Only the game document: nothing learned yet.
    bool document_only() const;
    void append(EntryKind kind, std::string text, std::string critique = {});
};

struct Guidance {
    std::string suggestion;
    std::optional<std::string> insight;
};

struct Critique {
    std::optional<std::string> verbal;
    std::optional<double> numeric;
};

/// Most frequent 1-based action; ties go to the smallest. `candidates` must be non-empty.
int vote(std::span<const int> candidates);

/// Median of continuous candidates (mean of the two middle values when even).
double vote_continuous(std::span<const double> candidates);

/// Text of one or more episodes, one transition per line.
std::string trajectory_text(std::span<const Trajectory> episodes);

/// Head and tail of `text` joined by "\n...\n" so the result has at most `limit` characters.
std::string truncate_middle(const std::string& text, std::size_t limit = kDigestChars);

}  // namespace arena::agents
