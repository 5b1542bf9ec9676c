#ifndef NOVMORSE_ERRORS_HPP
#define NOVMORSE_ERRORS_HPP

// Error hierarchy shared by every module. Each condition gets its own type so
// callers (and tests) can catch precisely, and `name()` returns the stable
// identifier used in CLI reports.

#include <stdexcept>
#include <string>

namespace novmorse {

class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}

    const std::string& name() const { return name_; }

private:
    std::string name_;
};

#define NOVMORSE_DEFINE_ERROR(Type)                                     \
    class Type : public Error {                                         \
    public:                                                             \
        explicit Type(const std::string& what) : Error(#Type, what) {}  \
    }

// rings
NOVMORSE_DEFINE_ERROR(ContextMismatch);
NOVMORSE_DEFINE_ERROR(NegativeDegreePresent);
NOVMORSE_DEFINE_ERROR(ZeroElement);
NOVMORSE_DEFINE_ERROR(NotUnit);
NOVMORSE_DEFINE_ERROR(ArithmeticOverflow);

// chain
NOVMORSE_DEFINE_ERROR(NotAChainMap);
NOVMORSE_DEFINE_ERROR(HomotopyIdentityFails);
NOVMORSE_DEFINE_ERROR(WrongCoefficients);
NOVMORSE_DEFINE_ERROR(PrecisionExhausted);
NOVMORSE_DEFINE_ERROR(GradingError);

// cobordism
NOVMORSE_DEFINE_ERROR(ShapeMismatch);
NOVMORSE_DEFINE_ERROR(IdentityViolation);
NOVMORSE_DEFINE_ERROR(NotSimple);
NOVMORSE_DEFINE_ERROR(BadPartition);

// assembly
NOVMORSE_DEFINE_ERROR(InvalidGamma);
NOVMORSE_DEFINE_ERROR(NotFilteredShape);
NOVMORSE_DEFINE_ERROR(BasisMismatch);

// dmt
NOVMORSE_DEFINE_ERROR(DuplicateFacet);
NOVMORSE_DEFINE_ERROR(InvalidField);
NOVMORSE_DEFINE_ERROR(CollarPatternViolation);
NOVMORSE_DEFINE_ERROR(AcyclicityLost);
NOVMORSE_DEFINE_ERROR(GluingMismatch);
NOVMORSE_DEFINE_ERROR(NotAlternating);

// cli
NOVMORSE_DEFINE_ERROR(ParseError);
NOVMORSE_DEFINE_ERROR(UnknownCommand);
NOVMORSE_DEFINE_ERROR(NameResolution);

#undef NOVMORSE_DEFINE_ERROR

} // namespace novmorse

#endif
