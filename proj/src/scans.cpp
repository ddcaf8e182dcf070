#include "vforge/scans.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "vforge/errors.hpp"
#include "vforge/functionals.hpp"

namespace vforge::scans {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_grid(const ScanGrid& grid) {
    if (grid.P_values.empty() || grid.a_values.empty())
        throw PreconditionError("scan grid is empty");
    for (double P : grid.P_values)
        if (!(P > 0.0)) throw PreconditionError("scan grid P values must be positive");
    for (double a : grid.a_values)
        if (!(a > -1.0 && a <= 1.0)) throw PreconditionError("scan grid a values must lie in (-1, 1]");
}

ScanRow floor_point(double P, double a) {
    return evaluate_row(UniformBall{solve_uniform_R(P), P, a});
}

double rel_diff(double x, double y) {
    const double s = std::max(std::abs(x), std::abs(y));
    return s == 0.0 ? 0.0 : std::abs(x - y) / s;
}

// Closed form against quadrature at one pseudo-random grid point (fixed seed).
double crosscheck(const ScanGrid& grid) {
    std::mt19937 rng(20100917u);
    std::uniform_int_distribution<std::size_t> pick_p(0, grid.P_values.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_a(0, grid.a_values.size() - 1);
    const double P = grid.P_values[pick_p(rng)];
    const double a = grid.a_values[pick_a(rng)];
    const SeparableAnsatz ansatz = build_ansatz(UniformBall{solve_uniform_R(P), P, a});
    const FunctionalReport cf = evaluate(ansatz, Method::ClosedForm);
    const FunctionalReport qd = evaluate(ansatz, Method::Quadrature);
    return std::max({rel_diff(cf.kinetic, qd.kinetic), rel_diff(cf.potential, qd.potential),
                     rel_diff(cf.virial, qd.virial), rel_diff(cf.l32_norm, qd.l32_norm)});
}

FloorResult summarize(const ScanGrid& grid, std::vector<ScanRow> rows) {
    FloorResult out{kInfinity, kNaN, kNaN, std::move(rows), crosscheck(grid)};
    for (const ScanRow& r : out.rows) {
        if (r.V < out.min_virial) {
            out.min_virial = r.V;
            out.argmin_P = r.P;
            out.argmin_a = r.a;
        }
    }
    return out;
}

ScalingPoint scaling_point(double P, double a) {
    ScalingPoint pt{P, false, {}, {}};
    try {
        CoreHalo f = scaling_family(P, a);
        f.alpha = solve_corehalo_alpha(f.R1, f.R2, f.R3, f.P).alpha;
        pt.row = evaluate_row(f);
        pt.solved = true;
    } catch (const Error& e) {
        pt.error = e.what();
    }
    return pt;
}

ScalingResult fit_scaling(std::vector<ScalingPoint> points) {
    std::vector<double> P;
    std::vector<double> alpha;
    std::vector<double> minus_v;
    for (const ScalingPoint& pt : points) {
        if (!pt.solved || !(pt.row.alpha > 0.0) || !(pt.row.V < 0.0)) continue;
        P.push_back(pt.P);
        alpha.push_back(pt.row.alpha);
        minus_v.push_back(-pt.row.V);
    }
    if (P.size() < 5) {
        std::ostringstream msg;
        msg << "only " << P.size() << " grid points solved; at least 5 are needed for a fit";
        throw GridExhausted(msg.str());
    }
    return {fit_power_law(P, alpha), fit_power_law(P, minus_v), std::move(points)};
}

void require_scaling_grid(std::span<const double> P_grid) {
    if (P_grid.size() < 8) throw PreconditionError("asymptotic scan needs at least 8 grid points");
    for (double P : P_grid)
        if (!(P > 0.0)) throw PreconditionError("asymptotic scan P values must be positive");
}

std::string format_value(double x) {
    if (std::isnan(x)) return {};
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (count == 0) return {};
    if (!(lo > 0.0) || !(hi >= lo)) throw PreconditionError("log grid needs 0 < lo <= hi");
    if (count == 1) return {lo};
    std::vector<double> out(count);
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(llo + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {lo};
    std::vector<double> out(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

ScanGrid default_floor_grid() {
    return {log_grid(1e-2, 1e4, 200), linear_grid(-1.0 + 1e-6, 0.9, 100)};
}

void write_csv(std::ostream& out, std::span<const ScanRow> rows) {
    out << kCsvHeader << '\n';
    for (const ScanRow& r : rows) {
        out << r.family << ',' << format_value(r.P) << ',' << format_value(r.a) << ','
            << format_value(r.alpha) << ',' << format_value(r.R) << ',' << format_value(r.KE) << ','
            << format_value(r.PE) << ',' << format_value(r.E) << ',' << format_value(r.V) << ','
            << format_value(r.l32_norm) << '\n';
    }
}

ScanRow evaluate_row(const Family& family) {
    const SeparableAnsatz ansatz = build_ansatz(family);
    const FunctionalReport rep = evaluate(ansatz, Method::ClosedForm);
    ScanRow row{std::string(family_name(family)),
                0.0,
                0.0,
                kNaN,
                ansatz.eta().support_radius(),
                rep.kinetic,
                rep.potential,
                rep.total_energy,
                rep.virial,
                rep.l32_norm};
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            row.P = f.P;
            row.a = f.a;
            if constexpr (std::is_same_v<T, CoreHalo>) row.alpha = f.alpha;
        },
        family);
    return row;
}

FloorResult uniform_ball_floor_serial(const ScanGrid& grid) {
    require_grid(grid);
    std::vector<ScanRow> rows;
    rows.reserve(grid.P_values.size() * grid.a_values.size());
    for (double P : grid.P_values)
        for (double a : grid.a_values) rows.push_back(floor_point(P, a));
    return summarize(grid, std::move(rows));
}

FloorResult uniform_ball_floor(const ScanGrid& grid) {
    require_grid(grid);
    const std::size_t na = grid.a_values.size();
    const std::size_t total = grid.P_values.size() * na;
    std::vector<ScanRow> rows(total);
    std::vector<std::string> errors(total);
    const auto count = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            rows[k] = floor_point(grid.P_values[k / na], grid.a_values[k % na]);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    }
    for (const std::string& e : errors)
        if (!e.empty()) throw SolverError("uniform floor scan: " + e);
    return summarize(grid, std::move(rows));
}

FitResult fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw PreconditionError("power-law fit needs two equally long series of >= 2 points");
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw PreconditionError("power-law fit needs positive data");
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (sxx == 0.0) throw PreconditionError("power-law fit needs distinct abscissae");
    FitResult fit{};
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = std::log(y[i]) - (fit.intercept + fit.slope * std::log(x[i]));
        fit.max_residual = std::max(fit.max_residual, std::abs(r));
    }
    fit.range_lo = *std::min_element(x.begin(), x.end());
    fit.range_hi = *std::max_element(x.begin(), x.end());
    fit.points = x.size();
    return fit;
}

CoreHalo scaling_family(double P, double a) {
    if (!(P > 0.0)) throw PreconditionError("scaling family needs P > 0");
    return CoreHalo{1.0 / (P * P), P, P * P, P, 0.0, a};
}

ScalingResult asymptotic_scaling_serial(std::span<const double> P_grid, double a) {
    require_scaling_grid(P_grid);
    std::vector<ScalingPoint> points;
    for (double P : P_grid) points.push_back(scaling_point(P, a));
    return fit_scaling(std::move(points));
}

ScalingResult asymptotic_scaling(std::span<const double> P_grid, double a) {
    require_scaling_grid(P_grid);
    std::vector<ScalingPoint> points(P_grid.size());
    const auto count = static_cast<std::ptrdiff_t>(P_grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
    for (std::ptrdiff_t i = 0; i < count; ++i)
        points[static_cast<std::size_t>(i)] = scaling_point(P_grid[static_cast<std::size_t>(i)], a);
    return fit_scaling(std::move(points));
}

double virial_unbounded_below(double threshold) {
    const auto grid = log_grid(1.0, 1e4, 401);
    return virial_unbounded_below(threshold, grid);
}

double virial_unbounded_below(double threshold, std::span<const double> P_grid, double a) {
    if (!(threshold < 0.0)) throw PreconditionError("virial threshold must be negative");
    for (double P : P_grid) {
        const ScalingPoint pt = scaling_point(P, a);
        if (pt.solved && pt.row.V < threshold) return P;
    }
    std::ostringstream msg;
    msg << "no grid point reaches V < " << threshold << "; enlarge the grid";
    throw GridExhausted(msg.str());
}

int thread_cap() {
    if (const char* env = std::getenv("VIRIAL_FORGE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return omp_get_max_threads();
}

}  // namespace vforge::scans
