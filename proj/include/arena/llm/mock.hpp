#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "arena/llm/chat.hpp"

namespace arena::llm {

/// Synthetic token count: one token per four characters, rounded up.
long long mock_token_count(std::string_view text);

/// Replays a fixed list of replies in one global order. When the script runs
/// out the fallback responder answers, or ScriptExhausted is thrown.
class MockBackend : public Backend {
public:
    using Responder = std::function<std::string(const ChatRequest&)>;

    explicit MockBackend(std::vector<std::string> script = {}, Responder fallback = {});

    using Backend::complete;
    ChatResponse complete(const ChatRequest& request, CallStats& stats) override;
    std::string model() const override { return "mock"; }

    std::size_t calls() const;
    std::size_t remaining() const;
    /// Every request received so far, in order.
    std::vector<ChatRequest> requests() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> script_;
    std::size_t next_ = 0;
    Responder fallback_;
    std::vector<ChatRequest> requests_;
};

/// Reply used by the command-line mock when no script is given.
std::string default_mock_reply(const ChatRequest& request);

}  // namespace arena::llm
