#pragma once

#include <chrono>
#include <functional>
#include <mutex>
#include <string>

#include "arena/llm/chat.hpp"

namespace arena::llm {

struct LiveConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::string model = std::string(kDefaultModel);
    int max_attempts = 6;
    std::chrono::milliseconds backoff_base{1000};
    double backoff_factor = 2.0;
    double requests_per_minute = 60.0;
    std::chrono::seconds timeout{120};

    /// Reads LLM_API_KEY, LLM_BASE_URL and LLM_MODEL over the defaults.
    static LiveConfig from_env();
};

/// Token bucket: `capacity` calls may burst, then calls are spaced to the
/// configured rate. A rate <= 0 disables limiting.
class RateLimiter {
public:
    explicit RateLimiter(double per_minute, double capacity = 1.0);
    void acquire();

private:
    using Clock = std::chrono::steady_clock;
    std::mutex mutex_;
    double per_second_;
    double capacity_;
    double tokens_;
    Clock::time_point last_;
};

/// OpenAI-compatible HTTP backend. Retries 429, 5xx and connection failures
/// with exponential backoff; 401/403 fail immediately.
class LiveBackend : public Backend {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    /// Throws ConfigError for a missing key or an unusable URL.
    explicit LiveBackend(LiveConfig config, Sleeper sleeper = {});

    using Backend::complete;
    ChatResponse complete(const ChatRequest& request, CallStats& stats) override;
    std::string model() const override { return config_.model; }
    const LiveConfig& config() const { return config_; }

private:
    LiveConfig config_;
    std::string origin_;  // scheme://host[:port]
    std::string path_;    // path prefix + /chat/completions
    Sleeper sleeper_;
    RateLimiter limiter_;
};

}  // namespace arena::llm
