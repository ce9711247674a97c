#include "arena/llm/usage.hpp"

#include <sstream>

#include "arena/core/assets.hpp"
#include "arena/core/error.hpp"
#include "json.hpp"

namespace arena::llm {

UsageLedger::UsageLedger(const UsageLedger& other) {
    std::lock_guard lock(other.mutex_);
    records_ = other.records_;
    budget_ = other.budget_;
}

UsageLedger& UsageLedger::operator=(const UsageLedger& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    records_ = other.records_;
    budget_ = other.budget_;
    return *this;
}

void UsageLedger::append(UsageRecord record) {
    std::lock_guard lock(mutex_);
    records_.push_back(std::move(record));
}

std::vector<UsageRecord> UsageLedger::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t UsageLedger::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

long long UsageLedger::prompt_tokens() const {
    std::lock_guard lock(mutex_);
    long long n = 0;
    for (const auto& r : records_) n += r.prompt_tokens;
    return n;
}

long long UsageLedger::completion_tokens() const {
    std::lock_guard lock(mutex_);
    long long n = 0;
    for (const auto& r : records_) n += r.completion_tokens;
    return n;
}

long long UsageLedger::latency_ms() const {
    std::lock_guard lock(mutex_);
    long long n = 0;
    for (const auto& r : records_) n += r.latency_ms;
    return n;
}

bool UsageLedger::over_budget() const { return budget_ && total_tokens() >= *budget_; }

const Rate& Pricing::at(const std::string& model) const {
    const auto it = rates_.find(model);
    if (it == rates_.end()) throw UnknownModel("no pricing for model '" + model + "'");
    return it->second;
}

Pricing parse_pricing(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("model,prompt_per_1k,completion_per_1k", 0) != 0) {
        throw FormatError("pricing header must be model,prompt_per_1k,completion_per_1k");
    }
    Pricing p;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string model, prompt, completion;
        if (!std::getline(row, model, ',') || !std::getline(row, prompt, ',') || !std::getline(row, completion)) {
            throw FormatError("pricing line " + std::to_string(lineno) + ": expected 3 fields");
        }
        try {
            p.set(model, Rate{std::stod(prompt), std::stod(completion)});
        } catch (const std::exception&) {
            throw FormatError("pricing line " + std::to_string(lineno) + ": bad number");
        }
    }
    return p;
}

Pricing load_pricing(const std::filesystem::path& path) { return parse_pricing(read_text_file(path)); }

double call_cost(const UsageRecord& record, const Pricing& pricing) {
    const Rate& rate = pricing.at(record.model);
    return (static_cast<double>(record.prompt_tokens) * rate.prompt +
            static_cast<double>(record.completion_tokens) * rate.completion) /
           1000.0;
}

CostTotals estimate_cost(const std::vector<UsageRecord>& records, const Pricing& pricing) {
    CostTotals totals;
    for (const auto& r : records) {
        const double c = call_cost(r, pricing);
        totals.total += c;
        totals.by_env[r.tag.env] += c;
        totals.by_agent[r.tag.agent] += c;
    }
    return totals;
}

void Transcript::add(const ChatRequest& request, const std::string& model, const std::string& reply, bool ok,
                     const std::string& error) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    nlohmann::json j = {{"model", model},
                        {"temperature", request.temperature},
                        {"messages", messages},
                        {"response", reply},
                        {"ok", ok}};
    if (!error.empty()) j["error"] = error;
    std::lock_guard lock(mutex_);
    lines_.push_back(j.dump());
}

std::string Transcript::to_jsonl() const {
    std::lock_guard lock(mutex_);
    std::string out;
    for (const auto& l : lines_) out += l + "\n";
    return out;
}

std::size_t Transcript::size() const {
    std::lock_guard lock(mutex_);
    return lines_.size();
}

ChatResponse Gateway::complete(ChatRequest request) {
    if (ledger_->over_budget()) {
        throw BudgetExceeded("token budget of " + std::to_string(*ledger_->budget()) + " reached");
    }
    if (request.model.empty()) request.model = backend_->model();
    UsageRecord rec;
    rec.tag = tag_;
    rec.model = request.model;
    CallStats stats;
    try {
        ChatResponse r = backend_->complete(request, stats);
        rec.prompt_tokens = r.prompt_tokens;
        rec.completion_tokens = r.completion_tokens;
        rec.attempts = r.attempts;
        rec.latency_ms = r.latency_ms;
        ledger_->append(rec);
        if (transcript_ != nullptr) transcript_->add(request, rec.model, r.content, true);
        return r;
    } catch (const Error& ex) {
        rec.attempts = std::max(stats.attempts, 1);
        rec.latency_ms = stats.latency_ms;
        rec.ok = false;
        ledger_->append(rec);
        if (transcript_ != nullptr) transcript_->add(request, rec.model, "", false, ex.what());
        throw;
    }
}

}  // namespace arena::llm
