#pragma once

#include <stdexcept>
#include <string>

namespace sgm {

// Input/parse problems (bad files, bad arguments). CLI maps these to exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failures inside a pipeline stage. CLI maps these to exit code 2.
class PipelineError : public std::runtime_error {
public:
    explicit PipelineError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sgm
