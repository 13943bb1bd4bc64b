#ifndef EIDG_ERRORS_HPP
#define EIDG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eidg {

// Error taxonomy shared by all modules. Exit-code mapping lives in the CLI.

struct DegreeOverflow : std::runtime_error {
    explicit DegreeOverflow(const std::string& msg) : std::runtime_error(msg) {}
};

struct OutOfRange : std::runtime_error {
    explicit OutOfRange(const std::string& msg) : std::runtime_error(msg) {}
};

struct DecayViolation : std::runtime_error {
    explicit DecayViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularMetric : std::runtime_error {
    explicit SingularMetric(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConformalFactorNonpositive : std::runtime_error {
    explicit ConformalFactorNonpositive(const std::string& msg) : std::runtime_error(msg) {}
};

struct NearSingularity : std::runtime_error {
    explicit NearSingularity(const std::string& msg) : std::runtime_error(msg) {}
};

struct BoostOutOfRange : std::runtime_error {
    explicit BoostOutOfRange(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConditioningFailure : std::runtime_error {
    explicit ConditioningFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct ZeroSeed : std::runtime_error {
    explicit ZeroSeed(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConeViolation : std::runtime_error {
    explicit ConeViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct MassCollapse : std::runtime_error {
    explicit MassCollapse(const std::string& msg) : std::runtime_error(msg) {}
};

struct BoostSaturation : std::runtime_error {
    explicit BoostSaturation(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace eidg

#endif
