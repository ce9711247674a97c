#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "arena/llm/chat.hpp"

namespace arena::llm {

/// Which experiment cell a call belongs to.
struct CallTag {
    std::string agent;
    std::string env;
    std::string level;
    std::uint64_t seed = 0;
};

struct UsageRecord {
    CallTag tag;
    std::string model;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    int attempts = 1;
    long long latency_ms = 0;
    bool ok = true;
};

/// Thread-safe list of call records with an optional total-token budget.
class UsageLedger {
public:
    explicit UsageLedger(std::optional<long long> token_budget = std::nullopt) : budget_(token_budget) {}
    UsageLedger(const UsageLedger& other);
    UsageLedger& operator=(const UsageLedger& other);

    void append(UsageRecord record);
    std::vector<UsageRecord> records() const;
    std::size_t size() const;
    long long prompt_tokens() const;
    long long completion_tokens() const;
    long long total_tokens() const { return prompt_tokens() + completion_tokens(); }
    long long latency_ms() const;
    bool over_budget() const;
    std::optional<long long> budget() const { return budget_; }

private:
    mutable std::mutex mutex_;
    std::vector<UsageRecord> records_;
    std::optional<long long> budget_;
};

/// Per-1K-token prices in dollars.
struct Rate {
    double prompt = 0.0;
    double completion = 0.0;
};

class Pricing {
public:
    void set(const std::string& model, Rate rate) { rates_[model] = rate; }
    bool contains(const std::string& model) const { return rates_.count(model) != 0; }
    /// Throws UnknownModel.
    const Rate& at(const std::string& model) const;
    const std::map<std::string, Rate>& rates() const { return rates_; }

private:
    std::map<std::string, Rate> rates_;
};

/// CSV "model,prompt_per_1k,completion_per_1k". Throws FormatError, MissingAsset.
Pricing parse_pricing(const std::string& csv);
Pricing load_pricing(const std::filesystem::path& path);

double call_cost(const UsageRecord& record, const Pricing& pricing);

struct CostTotals {
    double total = 0.0;
    std::map<std::string, double> by_env;
    std::map<std::string, double> by_agent;
};

/// Sum of (prompt * rate_p + completion * rate_c) / 1000. Throws UnknownModel.
CostTotals estimate_cost(const std::vector<UsageRecord>& records, const Pricing& pricing);
inline CostTotals estimate_cost(const UsageLedger& ledger, const Pricing& pricing) {
    return estimate_cost(ledger.records(), pricing);
}

/// Prompt/response pairs of one cell, stored as JSONL.
class Transcript {
public:
    void add(const ChatRequest& request, const std::string& model, const std::string& reply, bool ok,
             const std::string& error = {});
    std::string to_jsonl() const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> lines_;
};

/// Backend bound to one cell: stamps calls with the cell tag, records each
/// final outcome in the ledger and transcript, and enforces the token budget.
class Gateway {
public:
    Gateway(Backend& backend, UsageLedger& ledger, CallTag tag, Transcript* transcript = nullptr)
        : backend_(&backend), ledger_(&ledger), tag_(std::move(tag)), transcript_(transcript) {}

    /// Throws BudgetExceeded before the call when the ledger is over budget,
    /// otherwise whatever the backend throws.
    ChatResponse complete(ChatRequest request);

    const CallTag& tag() const { return tag_; }
    UsageLedger& ledger() { return *ledger_; }

private:
    Backend* backend_;
    UsageLedger* ledger_;
    CallTag tag_;
    Transcript* transcript_;
};

}  // namespace arena::llm
