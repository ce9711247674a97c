#pragma once

#include <stdexcept>
#include <string>

namespace arena {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ARENA_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& what) : Error(what) {}   \
    }

// env-core
ARENA_DEFINE_ERROR(InvalidAction);
ARENA_DEFINE_ERROR(SteppedAfterEnd);
ARENA_DEFINE_ERROR(ObservationEnvMismatch);
// grounding
ARENA_DEFINE_ERROR(EmptyList);
// llm-gateway
ARENA_DEFINE_ERROR(AuthError);
ARENA_DEFINE_ERROR(RateLimitedExhausted);
ARENA_DEFINE_ERROR(MalformedResponse);
ARENA_DEFINE_ERROR(ScriptExhausted);
ARENA_DEFINE_ERROR(NoActionFound);
ARENA_DEFINE_ERROR(ActionOutOfRange);
ARENA_DEFINE_ERROR(UnknownModel);
ARENA_DEFINE_ERROR(BudgetExceeded);
// reference policies
ARENA_DEFINE_ERROR(UnsupportedEnv);
// ppo
ARENA_DEFINE_ERROR(ShapeMismatch);
ARENA_DEFINE_ERROR(NonFiniteLoss);
// scenarios and assets
ARENA_DEFINE_ERROR(MissingAsset);
ARENA_DEFINE_ERROR(DatasetEnvMismatch);
ARENA_DEFINE_ERROR(FormatError);
// evaluation
ARENA_DEFINE_ERROR(WrongEpisodeCount);
ARENA_DEFINE_ERROR(EmptyInput);
ARENA_DEFINE_ERROR(IoError);
// harness
ARENA_DEFINE_ERROR(ConfigDrift);
ARENA_DEFINE_ERROR(EmptyRun);
ARENA_DEFINE_ERROR(ConfigError);

#undef ARENA_DEFINE_ERROR

}  // namespace arena
