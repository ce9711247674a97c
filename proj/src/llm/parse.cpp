#include "arena/llm/parse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "arena/core/error.hpp"

namespace arena::llm {

namespace {

struct NumberToken {
    double value;
    bool integral;
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

// Values of every {"action": x} object, in order of appearance.
std::vector<NumberToken> action_objects(std::string_view text) {
    static const std::regex object(R"re(\{\s*["']action["']\s*:\s*["']?\s*(-?\d+(\.\d+)?)\s*["']?\s*\})re");
    std::vector<NumberToken> out;
    const std::string s(text);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), object); it != std::sregex_iterator(); ++it) {
        out.push_back({std::stod((*it)[1].str()), !(*it)[2].matched});
    }
    return out;
}

// Numbers that are not part of a longer word or number.
std::vector<NumberToken> standalone_numbers(std::string_view text) {
    std::vector<NumberToken> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const bool neg = text[i] == '-' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
        if (!neg && !std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        std::size_t j = neg ? i + 1 : i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        bool integral = true;
        if (j + 1 < text.size() && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
            integral = false;
            ++j;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
        const bool left_ok = start == 0 || (!word_char(text[start - 1]) && text[start - 1] != '.');
        const bool right_ok = j == text.size() || !word_char(text[j]);
        if (left_ok && right_ok) out.push_back({std::stod(std::string(text.substr(start, j - start))), integral});
        i = j;
    }
    return out;
}

}  // namespace

DiscreteAction parse_discrete_action(std::string_view text, std::span<const int> valid) {
    const auto is_valid = [&](double v) { return std::find(valid.begin(), valid.end(), static_cast<int>(v)) != valid.end(); };

    const auto objects = action_objects(text);
    for (auto it = objects.rbegin(); it != objects.rend(); ++it) {
        if (!it->integral) continue;
        if (!is_valid(it->value)) {
            throw ActionOutOfRange("action " + std::to_string(static_cast<long long>(it->value)) +
                                   " is not in the valid action list");
        }
        return DiscreteAction{static_cast<int>(it->value) - 1};
    }

    bool saw_integer = false;
    const auto numbers = standalone_numbers(text);
    for (auto it = numbers.rbegin(); it != numbers.rend(); ++it) {
        if (!it->integral) continue;
        saw_integer = true;
        if (is_valid(it->value)) return DiscreteAction{static_cast<int>(it->value) - 1};
    }
    if (saw_integer) throw ActionOutOfRange("no number in the reply is a valid action");
    throw NoActionFound("no action in reply: " + std::string(text.substr(0, 120)));
}

ContinuousAction parse_continuous_action(std::string_view text, double lo, double hi) {
    std::optional<double> value;
    if (const auto objects = action_objects(text); !objects.empty()) {
        value = objects.back().value;
    } else if (const auto numbers = standalone_numbers(text); !numbers.empty()) {
        value = numbers.back().value;
    }
    if (!value) throw NoActionFound("no number in reply: " + std::string(text.substr(0, 120)));
    return ContinuousAction{std::clamp(*value, lo, hi)};
}

Action parse_action(EnvId env, std::string_view text) {
    const auto space = action_space(env);
    if (space.is_continuous) return parse_continuous_action(text, space.low, space.high);
    std::vector<int> valid(static_cast<std::size_t>(space.count));
    for (int i = 0; i < space.count; ++i) valid[static_cast<std::size_t>(i)] = i + 1;
    return parse_discrete_action(text, valid);
}

}  // namespace arena::llm
