#pragma once

#include <functional>
#include <string_view>
#include <variant>

#include "vforge/profiles.hpp"

namespace vforge {

// Parameter sets for the three ansatz families. Each has one parameter fixed by the
// zero-energy condition: R for the uniform ball, alpha for the disjoint core-halo and P for
// the monotonic core-halo. Momentum profiles are indicators of [0, P], angular profiles are
// cutoff(a).

/// eta = 1 on [0, R).
struct UniformBall {
    double R;
    double P;
    double a;
};

/// eta = 1 on [0, R1) plus alpha on [R2, R3).
struct CoreHalo {
    double R1;
    double R2;
    double R3;
    double P;
    double alpha;
    double a;
};

/// eta = 1 on [0, R1), (R1/r)^n on [R1, R2), (R1/R2)^n on [R2, R3).
struct MonotonicCoreHalo {
    double R1;
    double R2;
    double R3;
    double n;
    double P;
    double a;
};

using Family = std::variant<UniformBall, CoreHalo, MonotonicCoreHalo>;

std::string_view family_name(const Family& family);

PiecewiseProfile uniform_eta(double R);
PiecewiseProfile core_halo_eta(double R1, double R2, double R3, double alpha);
PiecewiseProfile monotonic_eta(double R1, double R2, double R3, double n);
PiecewiseProfile momentum_ball(double P);

/// Builds the ansatz from a fully specified parameter set (no solving).
SeparableAnsatz build_ansatz(const Family& family);

/// Bracketed scalar root: residual(lo) and residual(hi) must differ in sign.
struct RootBracket {
    double lo;
    double hi;
    double tol = 1e-12;  // relative tolerance on the root
};

/// Brent-class (TOMS 748) root of f inside the bracket.
double find_root(const std::function<double(double)>& f, const RootBracket& bracket);

/// Zero-energy ball radius 3 / (5 KE(P)).
double solve_uniform_R(double P);

/// Both roots of the zero-energy quadratic in the halo weight and the selected one.
struct HaloWeight {
    double alpha;         // the smaller positive root
    double other_root;    // the remaining root (may be negative)
    int positive_roots;   // 1 or 2
    // coefficients of c2 alpha^2 + c1 alpha + c0 = KE * M(alpha)^2 - N(alpha), where M is
    // the enclosed-mass moment and N the nested potential integral
    double c2;
    double c1;
    double c0;
};

/// Solves KE(P) * ||eta q^2||^2 = integral eta q (integral eta q'^2) for alpha, both sides
/// quadratic in alpha. Throws NoPositiveRoot (carrying both roots) when no positive root
/// exists.
HaloWeight solve_corehalo_alpha(double R1, double R2, double R3, double P);

/// Solves the quadratic c2 x^2 + c1 x + c0 = 0 and selects the smaller positive root.
HaloWeight select_positive_root(double c2, double c1, double c0);

/// Momentum radius P with KE(P) + PE(eta) = 0 for the monotonic profile.
double solve_monotonic_P(double R1, double R2, double R3, double n);

/// Fills in the free parameter of the family from the zero-energy condition.
Family solve_zero_energy(const Family& family);

/// a* = 1 - 1/S with S the spatial-momentum virial factor: V(a) <= -1/2 exactly for a <= a*
/// when the angular profile is cutoff(a). Throws UnreachableThreshold when S <= 1/2.
double solve_threshold_a(double spatial_momentum_factor);
/// Threshold angle for an already solved family (its own a is ignored).
double solve_threshold_a(const Family& family);

}  // namespace vforge
