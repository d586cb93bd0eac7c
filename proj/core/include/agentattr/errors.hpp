#pragma once

#include <stdexcept>
#include <string>

namespace agentattr {

inline constexpr const char* kVersion = "0.1.0";

// Input document does not satisfy the trajectory / ground-truth schema.
// `path` points at the offending JSON location ("components[2].kind").
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what),
          path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// A scoring backend failed (unreachable endpoint, malformed response,
// unusable request).
class ScorerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical routine failed to meet its contract (non-convergence,
// degenerate inputs).
class NumericsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace agentattr
