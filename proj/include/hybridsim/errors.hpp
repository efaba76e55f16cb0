#pragma once

#include <stdexcept>
#include <string>

namespace hybridsim {

// Base of every error the simulator raises. kind() is a stable, machine-readable
// tag used by the CLI error line.
class SimError : public std::runtime_error {
public:
    SimError(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define HYBRIDSIM_DECLARE_ERROR(Name)                                     \
    class Name : public SimError {                                        \
    public:                                                               \
        explicit Name(const std::string& message) : SimError(#Name, message) {} \
    }

HYBRIDSIM_DECLARE_ERROR(EmptyFeasibleSet);
HYBRIDSIM_DECLARE_ERROR(NonFiniteDerivative);
HYBRIDSIM_DECLARE_ERROR(OutOfRange);
HYBRIDSIM_DECLARE_ERROR(NonPositiveWind);
HYBRIDSIM_DECLARE_ERROR(CtOutOfRange);
HYBRIDSIM_DECLARE_ERROR(NegativeIrradiance);
HYBRIDSIM_DECLARE_ERROR(DenominatorNonpositive);
HYBRIDSIM_DECLARE_ERROR(ParseError);
HYBRIDSIM_DECLARE_ERROR(ValidationError);
HYBRIDSIM_DECLARE_ERROR(IoError);

#undef HYBRIDSIM_DECLARE_ERROR

}  // namespace hybridsim
