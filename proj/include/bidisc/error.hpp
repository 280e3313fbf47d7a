#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bidisc {

// Every failure carries a stable kind name ("NonHermitian", "NearPole", ...)
// so that the CLI can report it verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace bidisc
