#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

enum class ErrorKind {
    Capability,
    Argument,
    Domain,
    Singularity,
    NotFiniteType,
    NormalForm,
    Construction,
    StationarySolve,
    Degeneracy,
    Calibration,
    Frame,
    Resolution,
    Config,
    Numerical,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Config and argument problems are the caller's fault, the rest are numerical.
    bool is_usage_error() const noexcept {
        return kind_ == ErrorKind::Config || kind_ == ErrorKind::Argument;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace rlab
