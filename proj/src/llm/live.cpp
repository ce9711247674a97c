#include "arena/llm/live.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "arena/core/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace arena::llm {

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

LiveConfig LiveConfig::from_env() {
    LiveConfig c;
    c.api_key = env_or("LLM_API_KEY", c.api_key);
    c.base_url = env_or("LLM_BASE_URL", c.base_url);
    c.model = env_or("LLM_MODEL", c.model);
    return c;
}

RateLimiter::RateLimiter(double per_minute, double capacity)
    : per_second_(per_minute / 60.0), capacity_(capacity), tokens_(capacity), last_(Clock::now()) {}

void RateLimiter::acquire() {
    if (per_second_ <= 0.0) return;
    Clock::duration wait{};
    {
        std::lock_guard lock(mutex_);
        const auto now = Clock::now();
        tokens_ = std::min(capacity_, tokens_ + std::chrono::duration<double>(now - last_).count() * per_second_);
        last_ = now;
        tokens_ -= 1.0;  // negative balance reserves a future slot
        if (tokens_ < 0.0) {
            wait = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(-tokens_ / per_second_));
        }
    }
    if (wait.count() > 0) std::this_thread::sleep_for(wait);
}

LiveBackend::LiveBackend(LiveConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)), limiter_(config_.requests_per_minute) {
    if (config_.api_key.empty()) throw ConfigError("LLM_API_KEY is not set");
    if (config_.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    const auto scheme = config_.base_url.find("://");
    if (scheme == std::string::npos) throw ConfigError("base URL needs a scheme: " + config_.base_url);
    const auto slash = config_.base_url.find('/', scheme + 3);
    origin_ = config_.base_url.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : config_.base_url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    path_ = prefix + "/chat/completions";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (config_.base_url.rfind("https", 0) == 0) throw ConfigError("https base URL but built without OpenSSL");
#endif
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

ChatResponse LiveBackend::complete(const ChatRequest& request, CallStats& stats) {
    const std::string body = request_body(request, config_.model);
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    const httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};

    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return static_cast<long long>(
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
    };
    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        stats.attempts = attempt;
        limiter_.acquire();
        const auto res = client.Post(path_, headers, body, "application/json");
        stats.latency_ms = elapsed();
        if (res && (res->status == 401 || res->status == 403)) {
            throw AuthError("HTTP " + std::to_string(res->status) + " from " + origin_);
        }
        if (res && res->status == 200) {
            try {
                const auto j = nlohmann::json::parse(res->body);
                ChatResponse out;
                out.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
                if (const auto u = j.find("usage"); u != j.end() && u->is_object()) {
                    out.prompt_tokens = u->value("prompt_tokens", 0LL);
                    out.completion_tokens = u->value("completion_tokens", 0LL);
                }
                if (out.prompt_tokens < 0 || out.completion_tokens < 0) throw MalformedResponse("negative token counts");
                out.attempts = attempt;
                out.latency_ms = stats.latency_ms;
                return out;
            } catch (const nlohmann::json::exception& ex) {
                throw MalformedResponse(std::string("chat completion body: ") + ex.what());
            }
        }
        if (res && !retryable(res->status)) {
            throw MalformedResponse("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
        }
        last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
        if (attempt < config_.max_attempts) {
            const double scale = std::pow(config_.backoff_factor, attempt - 1);
            sleeper_(std::chrono::milliseconds(
                static_cast<long long>(static_cast<double>(config_.backoff_base.count()) * scale)));
        }
    }
    throw RateLimitedExhausted("gave up after " + std::to_string(config_.max_attempts) + " attempts (" + last_error +
                               ")");
}

}  // namespace arena::llm
