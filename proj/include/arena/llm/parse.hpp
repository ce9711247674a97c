#pragma once

#include <span>
#include <string_view>

#include "arena/env/types.hpp"

namespace arena::llm {

/// Action from a model reply. The last {"action": n} object wins; without one,
/// the last standalone integer that is in `valid` (1-based). Returns a 0-based
/// index. Throws NoActionFound, ActionOutOfRange.
DiscreteAction parse_discrete_action(std::string_view text, std::span<const int> valid);

/// The last number in an {"action": x} object, else the last standalone
/// number, clamped to [lo, hi]. Throws NoActionFound.
ContinuousAction parse_continuous_action(std::string_view text, double lo, double hi);

/// Dispatches on the env's action space.
Action parse_action(EnvId env, std::string_view text);

}  // namespace arena::llm
