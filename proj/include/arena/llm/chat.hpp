#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace arena::llm {

inline constexpr std::string_view kDefaultModel = "gpt-3.5-turbo-0301";

enum class Role { system, user, assistant };

std::string_view to_string(Role role);

struct ChatMessage {
    Role role = Role::user;
    std::string content;
    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model;  // empty: the backend's default model
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 512;
};

struct ChatResponse {
    std::string content;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    long long latency_ms = 0;
    int attempts = 1;
};

/// Filled by a backend even when the call throws.
struct CallStats {
    int attempts = 0;
    long long latency_ms = 0;
};

/// A chat-completion provider. Implementations are safe to share between threads.
class Backend {
public:
    virtual ~Backend() = default;

    /// Throws AuthError, RateLimitedExhausted, MalformedResponse or ScriptExhausted.
    virtual ChatResponse complete(const ChatRequest& request, CallStats& stats) = 0;
    ChatResponse complete(const ChatRequest& request) {
        CallStats stats;
        return complete(request, stats);
    }

    virtual std::string model() const = 0;
};

/// Request body in the chat-completions wire format.
std::string request_body(const ChatRequest& request, std::string_view default_model);

/// Concatenated message contents, as the mock counts them.
std::string joined_content(const ChatRequest& request);

}  // namespace arena::llm
