#ifndef PATHLR_ERRORS_HPP
#define PATHLR_ERRORS_HPP

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathlr {

using Index = std::int64_t;

/// Requested object exceeds an addressable or configured size limit.
class capacity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pivot block became (numerically) singular during factorization.
class degeneracy_error : public std::runtime_error {
public:
    degeneracy_error(std::string what, std::vector<Index> indices)
        : std::runtime_error(std::move(what)), indices(std::move(indices)) {}

    std::vector<Index> indices;  // offending row/column set
};

/// Non-finite value produced by user-supplied data (potential or initial
/// condition) at a concrete coordinate.
class data_error : public std::runtime_error {
public:
    data_error(const std::string& what, double x)
        : std::runtime_error(what + " at x = " + format(x)), coordinate(x) {}

    double coordinate;

private:
    static std::string format(double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    }
};

/// Malformed run configuration (file or flag), with location diagnostics.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative procedure failed to reach the requested accuracy.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, Index step, double achieved)
        : std::runtime_error(what + " (step " + std::to_string(step) +
                             ", best accuracy " + std::to_string(achieved) + ")"),
          step(step),
          achieved(achieved) {}

    Index step;
    double achieved;
};

}  // namespace pathlr

#endif  // PATHLR_ERRORS_HPP
