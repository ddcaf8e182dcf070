#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "vforge/profiles.hpp"
#include "vforge/quadrature.hpp"

namespace vforge::testing {

inline double rel_err(double got, double want) {
    const double s = std::max(std::abs(got), std::abs(want));
    return s == 0.0 ? 0.0 : std::abs(got - want) / s;
}

inline quadrature::Options tight() {
    quadrature::Options o;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-13;
    return o;
}

// Independent oracle: integral of g(r)^beta r^k over the support by adaptive quadrature.
inline double quad_moment(const PiecewiseProfile& g, int k, double beta = 1.0) {
    const auto bp = g.breakpoints();
    auto f = [&](double r) { return std::pow(g.eval(r), beta) * std::pow(r, k); };
    return quadrature::integrate(f, 0.0, g.support_radius(), bp, tight()).value;
}

inline double quad_angular(const AngularProfile& L, int k, double beta = 1.0) {
    const auto bp = L.breakpoints();
    auto f = [&](double x) { return std::pow(L.eval(x), beta) * std::pow(x, k); };
    return quadrature::integrate(f, -1.0, 1.0, bp, tight()).value;
}

// Double integral of g(q) q (integral_0^q g s^2 ds) dq with both levels done by quadrature.
inline double quad_nested(const PiecewiseProfile& g) {
    const auto bp = g.breakpoints();
    auto inner = [&](double q) {
        auto h = [&](double s) { return g.eval(s) * s * s; };
        std::vector<double> b;
        for (double x : bp)
            if (x < q) b.push_back(x);
        return quadrature::integrate(h, 0.0, q, b, tight()).value;
    };
    auto outer = [&](double q) { return g.eval(q) * q * inner(q); };
    return quadrature::integrate(outer, 0.0, g.support_radius(), bp, tight()).value;
}

// Jump between the mirrored central-difference derivatives on either side of the seam s,
// measured in the ramp coordinate t = (r - s) / delta and relative to the local value scale.
// A C^1 seam gives O(h); a jump gives O(1/h) and a kink O(delta * slope jump).
template <typename F>
double seam_discrepancy(F&& f, double s, double delta, double h = 1e-6) {
    auto g = [&](double t) { return f(s + delta * t); };
    const double left = (g(0.0) - g(-2.0 * h)) / (2.0 * h);
    const double right = (g(2.0 * h) - g(0.0)) / (2.0 * h);
    const double scale = std::max({std::abs(g(-1.0)), std::abs(g(0.0)), std::abs(g(1.0)), 1e-300});
    return std::abs(right - left) / scale;
}

// Random compactly supported radial profile: constants, power laws and ramps on a random
// partition, with a zero gap now and then.
class ProfileFactory {
public:
    explicit ProfileFactory(unsigned seed) : rng_(seed) {}

    PiecewiseProfile radial(Domain domain = Domain::RadialPosition) {
        const int n = pick(1, 4);
        std::vector<double> edges{uniform(0.0, 0.3)};
        if (pick(0, 2) == 0) edges.front() = 0.0;
        for (int i = 0; i < n; ++i) edges.push_back(edges.back() + uniform(0.05, 1.5));
        std::vector<Piece> pieces;
        for (int i = 0; i < n; ++i) {
            const double lo = edges[i];
            const double hi = edges[i + 1];
            switch (pick(0, 3)) {
                case 0:
                    if (lo > 0.0) {
                        pieces.push_back(Piece::power_law(lo, hi, uniform(0.2, 3.0), uniform(0.3, 4.0)));
                        break;
                    }
                    [[fallthrough]];
                case 1:
                    pieces.push_back(Piece::constant(lo, hi, uniform(0.1, 3.0)));
                    break;
                case 2:
                    pieces.push_back(Piece::ramp(lo, hi, uniform(0.0, 2.0), uniform(0.0, 2.0)));
                    break;
                default:
                    if (i > 0) break;  // a gap
                    pieces.push_back(Piece::constant(lo, hi, uniform(0.1, 3.0)));
            }
        }
        if (pieces.empty()) pieces.push_back(Piece::constant(edges[0], edges[1], 1.0));
        return PiecewiseProfile::from_support(std::move(pieces), domain);
    }

    AngularProfile angular() {
        const int n = pick(1, 4);
        std::vector<double> edges{-1.0};
        std::vector<double> cuts;
        for (int i = 1; i < n; ++i) cuts.push_back(uniform(-0.95, 0.95));
        std::sort(cuts.begin(), cuts.end());
        for (double c : cuts)
            if (c - edges.back() > 0.02) edges.push_back(c);
        edges.push_back(1.0);
        std::vector<Piece> pieces;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            if (pick(0, 2) == 0)
                pieces.push_back(Piece::ramp(edges[i], edges[i + 1], uniform(0.0, 2.0), uniform(0.0, 2.0)));
            else
                pieces.push_back(Piece::constant(edges[i], edges[i + 1], uniform(0.05, 2.0)));
        }
        return AngularProfile(std::move(pieces));
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

private:
    std::mt19937_64 rng_;
};

}  // namespace vforge::testing
