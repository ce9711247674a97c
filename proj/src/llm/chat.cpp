#include "arena/llm/chat.hpp"

#include "json.hpp"

namespace arena::llm {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

std::string request_body(const ChatRequest& request, std::string_view default_model) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    const nlohmann::json body = {
        {"model", request.model.empty() ? std::string(default_model) : request.model},
        {"messages", messages},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    return body.dump();
}

std::string joined_content(const ChatRequest& request) {
    std::string out;
    for (const auto& m : request.messages) {
        if (!out.empty()) out += '\n';
        out += m.content;
    }
    return out;
}

}  // namespace arena::llm
