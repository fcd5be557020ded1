#pragma once

#include <stdexcept>
#include <string>

namespace mbph {

/// Base class for every error raised by the library. `kind()` is the stable
/// machine-readable name written into CLI error reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MBPH_DEFINE_ERROR(Name)                                            \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(#Name, what) {}     \
    }

// Boundaries cross, or move in opposite directions.
MBPH_DEFINE_ERROR(AssumptionViolation);
MBPH_DEFINE_ERROR(DomainError);
MBPH_DEFINE_ERROR(ParameterError);
MBPH_DEFINE_ERROR(RequiresClosedForm);
MBPH_DEFINE_ERROR(UnsupportedClosure);
MBPH_DEFINE_ERROR(IndexError);
MBPH_DEFINE_ERROR(CflViolation);
MBPH_DEFINE_ERROR(NonFiniteState);
MBPH_DEFINE_ERROR(ConfigError);

#undef MBPH_DEFINE_ERROR

} // namespace mbph
