#include "arena/llm/mock.hpp"

#include "arena/core/error.hpp"

namespace arena::llm {

long long mock_token_count(std::string_view text) { return static_cast<long long>((text.size() + 3) / 4); }

MockBackend::MockBackend(std::vector<std::string> script, Responder fallback)
    : script_(std::move(script)), fallback_(std::move(fallback)) {}

ChatResponse MockBackend::complete(const ChatRequest& request, CallStats& stats) {
    std::string reply;
    {
        std::lock_guard lock(mutex_);
        requests_.push_back(request);
        stats.attempts = 1;
        stats.latency_ms = 0;
        if (next_ < script_.size()) {
            reply = script_[next_++];
        } else if (fallback_) {
            reply = fallback_(request);
        } else {
            throw ScriptExhausted("mock script exhausted after " + std::to_string(script_.size()) + " replies");
        }
    }
    ChatResponse r;
    r.content = reply;
    r.prompt_tokens = mock_token_count(joined_content(request));
    r.completion_tokens = mock_token_count(reply);
    return r;
}

std::size_t MockBackend::calls() const {
    std::lock_guard lock(mutex_);
    return requests_.size();
}

std::size_t MockBackend::remaining() const {
    std::lock_guard lock(mutex_);
    return script_.size() - next_;
}

std::vector<ChatRequest> MockBackend::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

std::string default_mock_reply(const ChatRequest&) {
    return "Keep the plan simple and consistent. {\"action\": 1}";
}

}  // namespace arena::llm
