#pragma once

#include <stdexcept>
#include <string>

namespace khcob {

// Exit codes used by the CLI.
enum class ErrClass { Parse = 2, Resource = 3, Verify = 4, Logic = 1 };

struct Error : std::runtime_error {
    std::string kind;
    ErrClass cls;
    Error(std::string k, const std::string& msg, ErrClass c = ErrClass::Logic)
        : std::runtime_error(k + ": " + msg), kind(std::move(k)), cls(c) {}
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& msg,
                              ErrClass c = ErrClass::Logic) {
    throw Error(kind, msg, c);
}

inline void require(bool ok, const std::string& kind, const std::string& msg) {
    if (!ok) fail(kind, msg);
}

}  // namespace khcob
