#pragma once
#include <stdexcept>
#include <string>

namespace heckelab {

// Error taxonomy shared across the library.  kind() strings are stable; the
// CLI maps them onto exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define HECKELAB_DEFINE_ERROR(Name)                                      \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(#Name, what) {}   \
    }

HECKELAB_DEFINE_ERROR(NotPMaximal);
HECKELAB_DEFINE_ERROR(NegativeValuation);
HECKELAB_DEFINE_ERROR(NotASubfield);
HECKELAB_DEFINE_ERROR(LevelTooLarge);
HECKELAB_DEFINE_ERROR(PrecisionTooLow);
HECKELAB_DEFINE_ERROR(NonOrdinary);
HECKELAB_DEFINE_ERROR(HypothesisViolated);
HECKELAB_DEFINE_ERROR(ParseError);
HECKELAB_DEFINE_ERROR(ValidationError);
HECKELAB_DEFINE_ERROR(NotFound);
HECKELAB_DEFINE_ERROR(IoError);
HECKELAB_DEFINE_ERROR(UsageError);

#undef HECKELAB_DEFINE_ERROR

}  // namespace heckelab
