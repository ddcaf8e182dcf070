#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "support.hpp"
#include "vforge/errors.hpp"
#include "vforge/scans.hpp"

using namespace vforge;
using vforge::testing::rel_err;

namespace {

bool same_rows(const std::vector<scans::ScanRow>& a, const std::vector<scans::ScanRow>& b) {
    std::ostringstream sa, sb;
    scans::write_csv(sa, a);
    scans::write_csv(sb, b);
    return sa.str() == sb.str();
}

}  // namespace

TEST_CASE("grids") {
    const auto g = scans::log_grid(1e-2, 1e4, 200);
    CHECK(g.size() == 200);
    CHECK(g.front() == 1e-2);
    CHECK(g.back() == 1e4);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(rel_err(g[i] / g[i - 1], g[1] / g[0]) < 1e-12);
    const auto a = scans::linear_grid(-1.0 + 1e-6, 0.9, 100);
    CHECK(a.front() == -1.0 + 1e-6);
    CHECK(a.back() == 0.9);
    CHECK(scans::log_grid(1.0, 2.0, 0).empty());
    CHECK_THROWS_AS(scans::log_grid(0.0, 1.0, 3), PreconditionError);
    const auto d = scans::default_floor_grid();
    CHECK(d.P_values.size() == 200);
    CHECK(d.a_values.size() == 100);
}

TEST_CASE("uniform floor over the default grid") {
    const auto floor = scans::uniform_ball_floor(scans::default_floor_grid());
    CHECK(floor.min_virial > -0.45);
    CHECK(floor.argmin_P == 1e4);
    CHECK(floor.argmin_a == -1.0 + 1e-6);
    CHECK(std::abs(floor.min_virial + 0.45) < 0.005 * 0.45);
    CHECK(floor.rows.size() == 20000);
    CHECK(floor.crosscheck_discrepancy < 1e-10);
    for (const auto& r : floor.rows) CHECK(std::abs(r.E) < 1e-12);
}

TEST_CASE("refined floor grid shows no violation and the symmetric row vanishes") {
    scans::ScanGrid g{scans::log_grid(1e-2, 1e4, 400), scans::linear_grid(-1.0 + 1e-6, 1.0, 200)};
    const auto floor = scans::uniform_ball_floor(g);
    CHECK(floor.min_virial > -0.45);
    for (const auto& r : floor.rows)
        if (r.a == 1.0) CHECK(r.V == 0.0);
}

TEST_CASE("parallel scans equal the serial reference") {
    const scans::ScanGrid g{scans::log_grid(1e-2, 1e4, 37), scans::linear_grid(-0.99, 0.9, 11)};
    const auto par = scans::uniform_ball_floor(g);
    const auto ser = scans::uniform_ball_floor_serial(g);
    CHECK(same_rows(par.rows, ser.rows));
    CHECK(par.min_virial == ser.min_virial);
    CHECK(par.crosscheck_discrepancy == ser.crosscheck_discrepancy);
    const auto P = scans::log_grid(1e2, 1e4, 9);
    const auto sp = scans::asymptotic_scaling(P, -0.9);
    const auto ss = scans::asymptotic_scaling_serial(P, -0.9);
    CHECK(sp.alpha_fit.slope == ss.alpha_fit.slope);
    CHECK(sp.virial_fit.slope == ss.virial_fit.slope);
}

TEST_CASE("csv format") {
    const auto floor = scans::uniform_ball_floor({{1.0}, {-0.5}});
    std::ostringstream out;
    scans::write_csv(out, floor.rows);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "family,P,a,alpha,R,KE,PE,E,V,l32_norm");
    CHECK(row.rfind("uniform,1,-0.5,,0.4760109662075118", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == 9);
    std::ostringstream again;
    scans::write_csv(again, scans::uniform_ball_floor({{1.0}, {-0.5}}).rows);
    CHECK(again.str() == out.str());
}

TEST_CASE("asymptotic exponents") {
    const auto P = scans::log_grid(1e2, 1e4, 9);
    const auto res = scans::asymptotic_scaling(P, -0.9);
    CHECK(std::abs(res.alpha_fit.slope + 11.5) < 0.1);
    CHECK(std::abs(res.virial_fit.slope - 3.0) < 0.05);
    CHECK(res.alpha_fit.points == 9);
    CHECK(res.alpha_fit.range_lo == 1e2);
    CHECK(res.alpha_fit.range_hi == 1e4);
    // dropping the smaller-P half leaves the slopes stable
    const auto upper = scans::asymptotic_scaling(scans::log_grid(1e3, 1e4, 9), -0.9);
    CHECK(std::abs(upper.alpha_fit.slope - res.alpha_fit.slope) < 0.05);
    CHECK(std::abs(upper.virial_fit.slope - res.virial_fit.slope) < 0.05);
}

TEST_CASE("virial factorizes exactly in the cutoff") {
    const auto P = scans::log_grid(1e2, 1e4, 9);
    const auto half = scans::asymptotic_scaling(P, -0.5);
    const auto nine = scans::asymptotic_scaling(P, -0.9);
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double r1 = -half.points[i].row.V / 1.5;
        const double r2 = -nine.points[i].row.V / 1.9;
        CHECK(rel_err(r1, r2) < 1e-10);
        CHECK(half.points[i].row.alpha == nine.points[i].row.alpha);
    }
    CHECK(rel_err(half.virial_fit.slope, nine.virial_fit.slope) < 1e-10);
}

TEST_CASE("virial is unbounded below") {
    const double p10 = scans::virial_unbounded_below(-10.0);
    CHECK(p10 > 1.0);
    CHECK(p10 < 1e4);
    CoreHalo f = scans::scaling_family(p10, -0.9);
    f.alpha = solve_corehalo_alpha(f.R1, f.R2, f.R3, f.P).alpha;
    CHECK(scans::evaluate_row(f).V < -10.0);
    CHECK(scans::virial_unbounded_below(-0.5) < p10);
    CHECK(scans::virial_unbounded_below(-1e6) > p10);
    CHECK_THROWS_AS(scans::virial_unbounded_below(0.0), PreconditionError);
    const std::vector<double> tiny{1.0, 1.1};
    CHECK_THROWS_AS(scans::virial_unbounded_below(-1e30, tiny), GridExhausted);
}

TEST_CASE("power-law fit") {
    std::vector<double> x, y;
    for (double v = 1.0; v < 1e3; v *= 2.0) {
        x.push_back(v);
        y.push_back(3.0 * std::pow(v, -2.5));
    }
    const auto fit = scans::fit_power_law(x, y);
    CHECK(fit.slope == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.max_residual < 1e-12);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(scans::fit_power_law(one, one), PreconditionError);
    const std::vector<double> neg{1.0, -1.0};
    const std::vector<double> pos{1.0, 2.0};
    CHECK_THROWS_AS(scans::fit_power_law(pos, neg), PreconditionError);
}

TEST_CASE("scan preconditions") {
    CHECK_THROWS_AS(scans::uniform_ball_floor({{}, {0.0}}), PreconditionError);
    CHECK_THROWS_AS(scans::uniform_ball_floor({{1.0}, {-1.0}}), PreconditionError);
    CHECK_THROWS_AS(scans::asymptotic_scaling(scans::log_grid(1e2, 1e4, 7), -0.9), PreconditionError);
    CHECK(scans::asymptotic_scaling_serial(scans::log_grid(1e2, 1e4, 8), -0.9).points.size() == 8);
    // far out the halo weight underflows and no point solves
    CHECK_THROWS_AS(scans::asymptotic_scaling(scans::log_grid(1e40, 1e41, 8), -0.9), GridExhausted);
}

TEST_CASE("thread cap honours the environment") {
    setenv("VIRIAL_FORGE_THREADS", "3", 1);
    CHECK(scans::thread_cap() == 3);
    setenv("VIRIAL_FORGE_THREADS", "zero", 1);
    CHECK(scans::thread_cap() >= 1);
    unsetenv("VIRIAL_FORGE_THREADS");
    CHECK(scans::thread_cap() >= 1);
}
