#ifndef SLICERISK_ERRORS_HPP
#define SLICERISK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slicerisk {

// Invalid parameters or malformed input files. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A lifecycle trace with too few events of one kind to estimate rates from.
class InsufficientTraceError : public std::runtime_error {
public:
    InsufficientTraceError(std::string kind, std::size_t have, std::size_t need)
        : std::runtime_error("insufficient-trace: have " + std::to_string(have) + " " + kind +
                             " events, need at least " + std::to_string(need)),
          kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

// Wraps a failure from inside the estimation pipeline with the stage it occurred in.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& what)
        : std::runtime_error("pipeline stage '" + stage + "': " + what), stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

} // namespace slicerisk

#endif
