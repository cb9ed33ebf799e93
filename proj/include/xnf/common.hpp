#ifndef XNF_COMMON_HPP
#define XNF_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace xnf {

template <class Real>
using Cx = std::complex<Real>;

/// Base class for all engine errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched dimensions, basepoints or contexts between operands.
struct DimensionError : Error {
    using Error::Error;
};

/// A term or key violates the declared truncation orders.
struct TruncationError : Error {
    using Error::Error;
};

/// Vanishing denominator in the classical Fourier-mode solver.  The
/// integral solver never raises this.
struct SmallDivisorError : Error {
    using Error::Error;
};

/// A named inequality required by a lemma failed.  `name` identifies the
/// condition ("ineq1", "new_cond", "smallness", ...).
struct ConditionError : Error {
    std::string name;
    ConditionError(std::string cond, const std::string& msg)
        : Error(cond + ": " + msg), name(std::move(cond)) {}
};

/// Configuration file problems (unknown key, bad type, missing field).
struct ConfigError : Error {
    using Error::Error;
};

/// Integer power with small exponents; deterministic and exact for the
/// degree ranges used here.
template <class T>
T pow_int(T base, int n) {
    T acc{1};
    for (int i = 0; i < n; ++i) acc *= base;
    return acc;
}

inline int abs_sum(const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += (x < 0 ? -x : x);
    return s;
}

inline int sum(const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += x;
    return s;
}

}  // namespace xnf

#endif
