#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace vforge {

class PiecewiseProfile;

namespace quadrature {

inline constexpr double kDefaultAbsTol = 1e-12;
inline constexpr double kDefaultRelTol = 1e-10;
inline constexpr std::size_t kDefaultBudget = 1'000'000;

struct QuadResult {
    double value;
    double abs_error_estimate;
    std::size_t subdivisions;
};

struct Options {
    double abs_tol = kDefaultAbsTol;
    double rel_tol = kDefaultRelTol;
    std::size_t max_intervals = kDefaultBudget;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f over [lo, hi].
///
/// The interval is first split at every breakpoint strictly inside (lo, hi); no later
/// bisection crosses one. Refinement stops once the summed error estimate drops below
/// max(abs_tol, rel_tol * |I|). Throws BudgetExceeded when more than max_intervals
/// intervals would be needed.
QuadResult integrate(const Integrand& f, double lo, double hi, std::span<const double> breakpoints,
                     const Options& options = {});

inline QuadResult integrate(const Integrand& f, double lo, double hi,
                            const Options& options = {}) {
    return integrate(f, lo, hi, {}, options);
}

/// Integral of g(q) q (integral_0^q g(s) s^2 ds) dq for a compactly supported profile:
/// the inner cumulative mass comes from the exact piecewise antiderivative, the outer
/// integral is adaptive.
QuadResult nested_mass_integral(const PiecewiseProfile& eta, const Options& options = {});

/// Bilinear form of the above: integral of outer(q) q (integral_0^q inner(s) s^2 ds) dq.
QuadResult nested_mass_integral(const PiecewiseProfile& outer, const PiecewiseProfile& inner,
                                const Options& options = {});

}  // namespace quadrature
}  // namespace vforge
