// One pass/fail line per acceptance criterion; exit status is nonzero if any fails.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "vforge/errors.hpp"
#include "vforge/functionals.hpp"
#include "vforge/mollifier.hpp"
#include "vforge/scans.hpp"
#include "vforge/solvers.hpp"

using namespace vforge;
using vforge::testing::rel_err;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    Outcome() { detail.precision(10); }

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Check = std::function<void(Outcome&)>;

double radical_alpha() {
    const double s2 = std::sqrt(2.0);
    const double L = std::log(1.0 + s2);
    const double num = 35.0 * L + 30.0 - 105.0 * s2 + 2.0 * std::sqrt(6480.0 * s2 - 1655.0 - 2160.0 * L);
    return num / (125.0 * (735.0 * s2 - 188.0 - 245.0 * L));
}

void core_halo_alpha(Outcome& o) {
    const double alpha = solve_corehalo_alpha(0.2, 1.0, 2.0, 1.0).alpha;
    const double expected = radical_alpha();
    o.detail << "alpha=" << alpha << " closed form=" << expected << " rel=" << rel_err(alpha, expected);
    o.require(rel_err(alpha, expected) < 1e-10, "rel < 1e-10");
    o.require(alpha > 0.0, "alpha > 0");
    o.require(std::abs(alpha - 7.82e-4) < 0.01e-4, "alpha ~ 7.82e-4");
}

void core_halo_certificate(Outcome& o) {
    const Family solved = solve_zero_energy(CoreHalo{0.2, 1.0, 2.0, 1.0, 0.0, -0.8});
    const Certificate c = check_criteria(build_ansatz(solved));
    const double a_star = solve_threshold_a(solved);
    o.detail << "|E|=" << c.energy_residual << " V=" << c.report.virial << " norm=" << c.report.l32_norm
             << " a*=" << a_star;
    o.require(c.pass, "certificate");
    o.require(c.energy_residual <= 1e-9, "|E| <= 1e-9");
    o.require(c.report.virial <= -0.5, "V <= -1/2");
    o.require(std::abs(c.report.virial + 0.5007) < 5e-4, "V ~ -0.5007");
    o.require(c.report.l32_norm > 0.375 * std::cbrt(15.0 / 16.0), "norm above critical");
    o.require(a_star >= -0.81 && a_star <= -0.79, "a* in [-0.81, -0.79]");
}

void uniform_floor(Outcome& o) {
    scans::ScanGrid grid;
    grid.P_values = scans::log_grid(1e-2, 1e4, 200);
    grid.a_values = scans::linear_grid(-1.0 + 1e-6, 0.9, 100);
    const auto floor = scans::uniform_ball_floor(grid);
    const double corner = scans::evaluate_row(solve_zero_energy(UniformBall{0.0, 1e4, -1.0 + 1e-6})).V;
    o.detail << "min V=" << floor.min_virial << " at P=" << floor.argmin_P << " a=" << floor.argmin_a
             << " corner V=" << corner;
    o.require(floor.min_virial > -0.45, "min V > -9/20");
    o.require(std::abs(corner + 0.45) <= 0.005 * 0.45, "corner within 0.5%");
}

void monotonic(Outcome& o) {
    const double P = solve_monotonic_P(0.01, 1.0 / 11.0, 0.1, 3.0);
    const Family solved = solve_zero_energy(MonotonicCoreHalo{0.01, 1.0 / 11.0, 0.1, 3.0, 0.0, -0.95});
    const Certificate c = check_criteria(build_ansatz(solved));
    const double a_star = solve_threshold_a(solved);
    o.detail << "P=" << P << " V=" << c.report.virial << " a*=" << a_star;
    o.require(std::abs(P - 19.69) <= 0.05, "P = 19.69 +- 0.05");
    o.require(c.pass, "certificate at a = -0.95");
    o.require(std::abs(a_star + 0.90) <= 0.02, "a* = -0.90 +- 0.02");
}

void asymptotics(Outcome& o) {
    const auto grid = scans::log_grid(1e2, 1e4, 9);
    const auto lo = scans::asymptotic_scaling(grid, -0.5);
    const auto hi = scans::asymptotic_scaling(grid, -0.9);
    double worst = 0.0;
    for (std::size_t i = 0; i < lo.points.size(); ++i) {
        if (!lo.points[i].solved || !hi.points[i].solved) continue;
        const double x = -lo.points[i].row.V / 1.5;
        const double y = -hi.points[i].row.V / 1.9;
        worst = std::max(worst, rel_err(x, y));
    }
    o.detail << "alpha slope=" << hi.alpha_fit.slope << " -V slope=" << hi.virial_fit.slope
             << " factorisation rel=" << worst;
    o.require(std::abs(hi.alpha_fit.slope + 11.5) <= 0.1, "alpha slope -11.5 +- 0.1");
    o.require(std::abs(hi.virial_fit.slope - 3.0) <= 0.05, "-V slope 3.0 +- 0.05");
    o.require(worst < 1e-10, "-V/(1-a) agrees across a");
    o.require(hi.alpha_fit.points == grid.size(), "every grid point solved");
}

void oracle(Outcome& o) {
    vforge::testing::ProfileFactory make(20100917u);
    double worst = 0.0;
    double worst_pe = 0.0;
    for (int i = 0; i < 20; ++i) {
        auto phi = i % 3 == 0 ? momentum_ball(make.uniform(0.1, 20.0)) : make.radial(Domain::RadialMomentum);
        auto L = i % 4 == 0 ? AngularProfile::cutoff(make.uniform(-0.99, 1.0)) : make.angular();
        const SeparableAnsatz f(make.radial(), std::move(phi), std::move(L));
        const FunctionalReport c = evaluate(f, Method::ClosedForm);
        const FunctionalReport q = evaluate(f, Method::Quadrature);
        for (auto [x, y] : {std::pair{c.mass, q.mass}, {c.norm_constant, q.norm_constant}, {c.kinetic, q.kinetic},
                            {c.l32_norm, q.l32_norm}})
            worst = std::max(worst, rel_err(x, y));
        worst = std::max(worst, std::abs(c.virial - q.virial) / std::max(1.0, std::abs(q.virial)));
        worst_pe = std::max(worst_pe, rel_err(c.potential, q.potential));
    }
    o.detail << "max rel=" << worst << " PE max rel=" << worst_pe;
    o.require(worst < 1e-10, "closed form vs quadrature 1e-10");
    o.require(worst_pe < 1e-8, "PE vs quadrature 1e-8");
}

void spot_values(Outcome& o) {
    const double ke = kinetic_energy_ball(1.0);
    const double ke_exact = 0.375 * (3.0 * std::sqrt(2.0) - std::log(1.0 + std::sqrt(2.0)));
    const double pe = potential_energy(SeparableAnsatz(uniform_eta(1.0), momentum_ball(1.0), AngularProfile::cutoff(0.0)));
    double worst_v = 0.0;
    for (double R : {0.3, 1.0, 4.0})
        for (double P : {0.01, 1.0, 50.0})
            for (double a : {-0.99, -0.3, 0.5}) {
                const SeparableAnsatz f(uniform_eta(R), momentum_ball(P), AngularProfile::cutoff(a));
                worst_v = std::max(worst_v, std::abs(virial(f) - 9.0 * R * P * (a - 1.0) / 32.0) / std::max(1.0, R * P));
            }
    o.detail << "KE(1)=" << ke << " PE(R=1)=" << pe << " V max dev=" << worst_v;
    o.require(std::abs(ke - ke_exact) < 1e-12, "KE(1)");
    o.require(std::abs(pe + 0.6) < 1e-12, "PE = -3/5");
    o.require(worst_v < 1e-12, "V = 9RP(a-1)/32");
}

void mollification(Outcome& o) {
    const CoreHalo base{0.2, 1.0, 2.0, 1.0, 0.0, -0.8};
    const Family solved = solve_zero_energy(base);
    const FunctionalReport step = evaluate(build_ansatz(solved));
    std::vector<std::vector<Drift>> rows;
    double worst_seam = 0.0;
    double min_alpha = kInfinity;
    for (double d : {1e-2, 1e-3, 1e-4}) {
        const MollifySpec spec{d, DeltaScale::RelativeToSmallestPiece, kSmoothAll};
        const Rebalanced r = rebalance(base, spec);
        min_alpha = std::min(min_alpha, std::get<CoreHalo>(r.family).alpha);
        rows.push_back(drift_table(step, r.report));
        const auto& eta = r.ansatz.eta();
        const double half = resolved_delta(build_ansatz(solved).eta(), spec);
        for (const Piece& p : eta.pieces())
            if (p.is_ramp())
                for (double s : {p.lo(), p.hi()})
                    worst_seam = std::max(worst_seam,
                                          vforge::testing::seam_discrepancy([&](double x) { return eta.eval(x); }, s, half));
    }
    bool monotone = true;
    for (std::size_t j = 0; j < rows[0].size(); ++j)
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i][j].abs_change() > std::max(rows[i - 1][j].abs_change(), 1e-12)) {
                monotone = false;
                o.detail << " drift of " << rows[i][j].name << " grew;";
            }
    const Rebalanced check = rebalance(CoreHalo{0.2, 1.0, 2.0, 1.0, 0.0, -0.85},
                                       {1e-3, DeltaScale::RelativeToSmallestPiece, kSmoothAll});
    o.detail << "min alpha=" << min_alpha << " max seam=" << worst_seam
             << " V(a=-0.85)=" << check.certificate.report.virial;
    o.require(min_alpha > 0.0, "rebalanced alpha > 0");
    o.require(monotone, "drift decreases with delta");
    o.require(worst_seam < 1e-4, "seam derivatives continuous");
    o.require(check.certificate.pass, "a = -0.85 certifies");
}

void invariants(Outcome& o) {
    vforge::testing::ProfileFactory make(42u);
    int bad = 0;
    for (int i = 0; i < 20; ++i) {
        auto phi = i % 3 == 0 ? momentum_ball(make.uniform(0.1, 20.0)) : make.radial(Domain::RadialMomentum);
        auto L = i % 4 == 0 ? AngularProfile::cutoff(make.uniform(-0.99, 1.0)) : make.angular();
        const SeparableAnsatz f(make.radial(), std::move(phi), std::move(L));
        const FunctionalReport r = evaluate(f);
        const double lambda = make.uniform(0.1, 10.0);
        const SeparableAnsatz d(f.eta().dilated(lambda), f.phi(), f.angular());
        const SeparableAnsatz sym(f.eta(), f.phi(), AngularProfile::cutoff(1.0));
        const bool ok = std::abs(r.mass - 1.0) < 1e-12 && r.kinetic >= 1.0 && r.potential <= 0.0 &&
                        virial(sym) == 0.0 &&
                        rel_err(potential_energy(d), potential_energy(f) / lambda) < 1e-12 &&
                        rel_err(virial(d), lambda * virial(f)) < 1e-12 &&
                        rel_err(l32_norm(d), l32_norm(f) / lambda) < 1e-12 &&
                        rel_err(kinetic_energy(d), kinetic_energy(f)) < 1e-12;
        if (!ok) ++bad;
    }
    o.detail << bad << " of 20 random ansaetze violate an invariant";
    o.require(bad == 0, "all invariants");
}

std::string run_to_bytes(const std::string& args, const std::filesystem::path& file) {
    const std::string cmd = std::string("\"") + VFORGE_CLI_PATH + "\" " + args + " > \"" + file.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(file, std::ios::binary);
    std::stringstream bytes;
    bytes << in.rdbuf();
    std::filesystem::remove(file);
    return std::to_string(status) + "\n" + bytes.str();
}

void determinism(Outcome& o) {
    const auto dir = std::filesystem::temp_directory_path();
    const std::vector<std::string> runs = {"certify --format kv", "mollify --a -0.85",
                                           "scan --p-count 40 --a-count 20", "asymptotics"};
    for (const auto& args : runs) {
        const std::string first = run_to_bytes(args, dir / "vforge_accept_1");
        const std::string second = run_to_bytes(args, dir / "vforge_accept_2");
        o.require(first == second && first.size() > 100, "byte-identical: " + args);
    }
    o.detail << runs.size() << " commands run twice";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, Check>> criteria = {
        {"core-halo alpha matches the radical closed form", core_halo_alpha},
        {"core-halo certificate and threshold angle", core_halo_certificate},
        {"uniform-ball virial floor", uniform_floor},
        {"monotonic family", monotonic},
        {"asymptotic exponents and factorisation", asymptotics},
        {"closed forms agree with quadrature", oracle},
        {"closed-form spot values", spot_values},
        {"mollification keeps the certificate", mollification},
        {"invariants", invariants},
        {"deterministic CLI output", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": "
                  << o.detail.str() << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
