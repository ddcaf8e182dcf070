#include "vforge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "vforge/errors.hpp"
#include "vforge/profiles.hpp"

namespace vforge::quadrature {

namespace {

// Kronrod 15-point abscissae (positive half) and weights; every odd entry is also a
// 7-point Gauss node.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    bool roundoff;  // error estimate is the rounding floor; bisecting cannot improve it
    bool operator<(const Segment& other) const { return error < other.error; }
};

// One Gauss-Kronrod 7/15 pass with the QUADPACK error heuristic.
Segment rule15(const Integrand& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    double fv1[7];
    double fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double result = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    bool roundoff = false;
    if (resabs > kTiny / (50.0 * kEps)) {
        const double floor = 50.0 * kEps * resabs;
        roundoff = err <= floor;
        err = std::max(floor, err);
    }
    if (!std::isfinite(result)) {
        std::ostringstream msg;
        msg << "integrand is not finite on [" << lo << ", " << hi << "]";
        throw PreconditionError(msg.str());
    }
    return {lo, hi, result, err, roundoff};
}

}  // namespace

QuadResult integrate(const Integrand& f, double lo, double hi, std::span<const double> breakpoints,
                     const Options& options) {
    if (!(lo <= hi)) throw PreconditionError("integrate: lower limit exceeds upper limit");
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw PreconditionError("integrate: limits must be finite");
    if (!(options.abs_tol > 0.0) || !(options.rel_tol > 0.0))
        throw PreconditionError("integrate: tolerances must be positive");
    if (lo == hi) return {0.0, 0.0, 0};

    std::vector<double> edges{lo};
    for (double b : breakpoints)
        if (b > lo && b < hi) edges.push_back(b);
    edges.push_back(hi);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Segment> active;
    std::vector<Segment> settled;  // bisecting cannot improve these
    double total = 0.0;
    double total_error = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Segment s = rule15(f, edges[i], edges[i + 1]);
        total += s.value;
        total_error += s.error;
        active.push(s);
        ++count;
    }

    auto tolerance = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };

    while (total_error > tolerance() && !active.empty()) {
        Segment worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const double scale = std::max(std::abs(worst.lo), std::abs(worst.hi));
        const bool converged = worst.roundoff || worst.error == 0.0;
        if (converged || worst.hi - worst.lo <= 1e3 * kEps * scale || mid <= worst.lo ||
            mid >= worst.hi) {
            settled.push_back(worst);
            continue;
        }
        if (count + 1 > options.max_intervals) {
            std::ostringstream msg;
            msg << "integrate: subdivision budget of " << options.max_intervals
                << " intervals exhausted (error estimate " << total_error << ")";
            throw BudgetExceeded(msg.str());
        }
        Segment left = rule15(f, worst.lo, mid);
        Segment right = rule15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
        ++count;
    }

    // Re-sum to remove drift accumulated by the incremental updates.
    double value = 0.0;
    double error = 0.0;
    for (const Segment& s : settled) {
        value += s.value;
        error += s.error;
    }
    while (!active.empty()) {
        value += active.top().value;
        error += active.top().error;
        active.pop();
    }
    return {value, error, count};
}

QuadResult nested_mass_integral(const PiecewiseProfile& eta, const Options& options) {
    return nested_mass_integral(eta, eta, options);
}

QuadResult nested_mass_integral(const PiecewiseProfile& outer, const PiecewiseProfile& inner,
                                const Options& options) {
    if (!outer.has_compact_support() || !inner.has_compact_support())
        throw PreconditionError("nested_mass_integral: profiles must have compact support");
    const double radius = outer.support_radius();
    std::vector<double> breaks = outer.breakpoints();
    for (double b : inner.breakpoints()) breaks.push_back(b);
    auto integrand = [&](double q) { return outer.eval(q) * q * inner.cumulative_moment(2, q); };
    return integrate(integrand, 0.0, radius, breaks, options);
}

}  // namespace vforge::quadrature
