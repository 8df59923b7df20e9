#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>

#include "carbonprice/errors.hpp"

namespace carbonprice::numeric {

/// Sum with a fixed binary-tree reduction order, so results do not depend on
/// how a caller chunks the work.
double pairwise_sum(std::span<const double> values);

struct BisectionResult {
    double root;
    int iterations;
};

/// Bisection on a continuous `f` with f(lo) and f(hi) of opposite signs.
/// Stops when the bracket is narrower than `abs_tol` or after `max_iter`
/// halvings; the returned root is the bracket midpoint.
template <class F>
BisectionResult bisect(F&& f, double lo, double hi, double abs_tol, int max_iter = 200) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return {lo, 0};
    if (f_hi == 0.0) return {hi, 0};
    if (std::signbit(f_lo) == std::signbit(f_hi)) {
        std::ostringstream msg;
        msg << "bisection: no sign change on [" << lo << ", " << hi << "] (f(lo)=" << f_lo
            << ", f(hi)=" << f_hi << ")";
        throw SolverError(msg.str());
    }
    int it = 0;
    for (; it < max_iter && (hi - lo) > abs_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket exhausted at double resolution
        const double f_mid = f(mid);
        if (f_mid == 0.0) return {mid, it + 1};
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), it};
}

inline bool close_rel(double a, double b, double rel, double abs = 0.0) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs;
}

}  // namespace carbonprice::numeric
