#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace msrag {

/// Bad CLI flags or config values. Maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent dataset files. Maps to exit code 2.
class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure in a model backend, tagged with the pipeline stage it belongs to.
class BackendError : public std::runtime_error {
public:
    BackendError(std::string stage, const std::string& message)
        : std::runtime_error(message), stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

} // namespace msrag
