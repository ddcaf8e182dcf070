#include "vforge/solvers.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "vforge/errors.hpp"
#include "vforge/functionals.hpp"

namespace vforge {

namespace {

void require_angle(double a) {
    if (!(a > -1.0 && a <= 1.0)) throw PreconditionError("angular cutoff a must lie in (-1, 1]");
}

void require_radii(double R1, double R2, double R3) {
    if (!(R1 > 0.0 && R1 <= R2 && R2 <= R3) || !std::isfinite(R3))
        throw PreconditionError("radii must satisfy 0 < R1 <= R2 <= R3 < inf");
}

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw PreconditionError(std::string(name) + " must be positive and finite");
}

}  // namespace

std::string_view family_name(const Family& family) {
    switch (family.index()) {
        case 0: return "uniform";
        case 1: return "core-halo";
        default: return "monotonic";
    }
}

PiecewiseProfile uniform_eta(double R) {
    require_positive(R, "R");
    return PiecewiseProfile::indicator(0.0, R);
}

PiecewiseProfile core_halo_eta(double R1, double R2, double R3, double alpha) {
    require_radii(R1, R2, R3);
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw PreconditionError("halo weight alpha must be non-negative");
    std::vector<Piece> pieces{Piece::constant(0.0, R1, 1.0)};
    if (R3 > R2 && alpha > 0.0) pieces.push_back(Piece::constant(R2, R3, alpha));
    return PiecewiseProfile::from_support(std::move(pieces));
}

PiecewiseProfile monotonic_eta(double R1, double R2, double R3, double n) {
    require_radii(R1, R2, R3);
    require_positive(n, "n");
    std::vector<Piece> pieces{Piece::constant(0.0, R1, 1.0)};
    if (R2 > R1) pieces.push_back(Piece::power_law(R1, R2, 1.0, n));
    if (R3 > R2) pieces.push_back(Piece::constant(R2, R3, std::pow(R1 / R2, n)));
    return PiecewiseProfile::from_support(std::move(pieces));
}

PiecewiseProfile momentum_ball(double P) {
    require_positive(P, "P");
    return PiecewiseProfile::indicator(0.0, P, 1.0, Domain::RadialMomentum);
}

SeparableAnsatz build_ansatz(const Family& family) {
    return std::visit(
        [](const auto& f) -> SeparableAnsatz {
            using T = std::decay_t<decltype(f)>;
            require_angle(f.a);
            if constexpr (std::is_same_v<T, UniformBall>) {
                return {uniform_eta(f.R), momentum_ball(f.P), AngularProfile::cutoff(f.a)};
            } else if constexpr (std::is_same_v<T, CoreHalo>) {
                require_positive(f.alpha, "alpha");
                return {core_halo_eta(f.R1, f.R2, f.R3, f.alpha), momentum_ball(f.P),
                        AngularProfile::cutoff(f.a)};
            } else {
                return {monotonic_eta(f.R1, f.R2, f.R3, f.n), momentum_ball(f.P),
                        AngularProfile::cutoff(f.a)};
            }
        },
        family);
}

double find_root(const std::function<double(double)>& f, const RootBracket& bracket) {
    if (!(bracket.lo < bracket.hi)) throw PreconditionError("root bracket needs lo < hi");
    const double flo = f(bracket.lo);
    const double fhi = f(bracket.hi);
    if (flo == 0.0) return bracket.lo;
    if (fhi == 0.0) return bracket.hi;
    if (std::signbit(flo) == std::signbit(fhi)) {
        std::ostringstream msg;
        msg << "residual does not change sign on [" << bracket.lo << ", " << bracket.hi << "]";
        throw NoRoot(msg.str());
    }
    auto tol = [&](double x, double y) {
        return std::abs(x - y) <= bracket.tol * std::min(std::abs(x), std::abs(y));
    };
    std::uintmax_t max_iter = 400;
    const auto [a, b] =
        boost::math::tools::toms748_solve(f, bracket.lo, bracket.hi, flo, fhi, tol, max_iter);
    return 0.5 * (a + b);
}

double solve_uniform_R(double P) {
    require_positive(P, "P");
    return 3.0 / (5.0 * kinetic_energy_ball(P));
}

HaloWeight select_positive_root(double c2, double c1, double c0) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    double r1 = nan;
    double r2 = nan;
    if (c2 == 0.0) {
        if (c1 == 0.0)
            throw NoPositiveRoot("zero-energy equation does not depend on alpha (empty halo)", nan,
                                 nan);
        r1 = -c0 / c1;
    } else {
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc < 0.0)
            throw NoPositiveRoot("zero-energy quadratic has complex roots", nan, nan);
        const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
        r1 = q / c2;
        r2 = q != 0.0 ? c0 / q : -c1 / c2;
    }
    HaloWeight w{nan, nan, 0, c2, c1, c0};
    const bool p1 = r1 > 0.0;
    const bool p2 = r2 > 0.0;
    w.positive_roots = int(p1) + int(p2);
    if (w.positive_roots == 0) {
        std::ostringstream msg;
        msg << "zero-energy quadratic has no positive root (roots " << r1 << ", " << r2 << ")";
        throw NoPositiveRoot(msg.str(), r1, r2);
    }
    if (p1 && (!p2 || r1 <= r2)) {
        w.alpha = r1;
        w.other_root = r2;
    } else {
        w.alpha = r2;
        w.other_root = r1;
    }
    return w;
}

HaloWeight solve_corehalo_alpha(double R1, double R2, double R3, double P) {
    require_radii(R1, R2, R3);
    require_positive(P, "P");
    const PiecewiseProfile core = PiecewiseProfile::indicator(0.0, R1);
    const PiecewiseProfile halo = PiecewiseProfile::indicator(R2, R3);
    const double ke = kinetic_energy_ball(P);
    const double A = core.moment(2);
    const double B = halo.moment(2);
    // The core lies entirely inside the halo's inner radius, so the halo sees the full core
    // mass and the core sees none of the halo.
    const double cross = A * halo.moment(1);
    const double c2 = ke * B * B - halo.nested_mass();
    const double c1 = 2.0 * ke * A * B - cross;
    const double c0 = ke * A * A - core.nested_mass();
    return select_positive_root(c2, c1, c0);
}

double solve_monotonic_P(double R1, double R2, double R3, double n) {
    const PiecewiseProfile eta = monotonic_eta(R1, R2, R3, n);
    const double m2 = eta.moment(2);
    const double pe = -eta.nested_mass() / (m2 * m2);
    if (!(pe < -1.0)) {
        std::ostringstream msg;
        msg << "potential energy " << pe << " >= -1 cannot balance the rest-mass energy";
        throw NoRoot(msg.str());
    }
    auto energy = [pe](double P) { return kinetic_energy_ball(P) + pe; };
    double lo = 1e-3;
    double hi = 10.0;
    while (energy(lo) >= 0.0) {
        lo *= 0.5;
        if (lo < 1e-150) throw NoRoot("zero-energy momentum radius is below 1e-150");
    }
    while (energy(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e6) throw NoRoot("zero-energy momentum radius exceeds the 1e6 bracket cap");
    }
    return find_root(energy, {lo, hi, 1e-15});
}

Family solve_zero_energy(const Family& family) {
    return std::visit(
        [](auto f) -> Family {
            using T = std::decay_t<decltype(f)>;
            require_angle(f.a);
            if constexpr (std::is_same_v<T, UniformBall>) {
                f.R = solve_uniform_R(f.P);
            } else if constexpr (std::is_same_v<T, CoreHalo>) {
                f.alpha = solve_corehalo_alpha(f.R1, f.R2, f.R3, f.P).alpha;
            } else {
                f.P = solve_monotonic_P(f.R1, f.R2, f.R3, f.n);
            }
            return f;
        },
        family);
}

double solve_threshold_a(double spatial_momentum_factor) {
    if (!(spatial_momentum_factor > 0.5)) {
        std::ostringstream msg;
        msg << "virial factor " << spatial_momentum_factor
            << " <= 1/2: no cutoff in (-1, 1] reaches V = -1/2";
        throw UnreachableThreshold(msg.str());
    }
    return 1.0 - 1.0 / spatial_momentum_factor;
}

double solve_threshold_a(const Family& family) {
    return solve_threshold_a(virial_spatial_momentum_factor(build_ansatz(family)));
}

}  // namespace vforge
