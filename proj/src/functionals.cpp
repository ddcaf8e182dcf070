#include "vforge/functionals.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "vforge/errors.hpp"
#include "vforge/quadrature.hpp"

namespace vforge {

namespace {

constexpr double kPi = std::numbers::pi;

// Quadrature settings for the oracle route: every integrand is smooth between the
// supplied breakpoints, so a tight relative tolerance is cheap.
quadrature::Options oracle_options() {
    quadrature::Options o;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-13;
    return o;
}

double kinetic_numerator_quadrature(const PiecewiseProfile& phi, double* error) {
    auto f = [&](double p) { return phi.eval(p) * std::sqrt(1.0 + p * p) * p * p; };
    const auto bp = phi.breakpoints();
    const auto r = quadrature::integrate(f, 0.0, phi.support_radius(), bp, oracle_options());
    if (error != nullptr) *error = r.abs_error_estimate;
    return r.value;
}

bool uses_quadrature_fallback(const SeparableAnsatz& ansatz) {
    return !ansatz.phi().plateau_edge() || ansatz.eta().has_ramps() || ansatz.phi().has_ramps() ||
           ansatz.angular().has_ramps();
}

// Integrals of the three factors needed by every functional.
struct FactorIntegrals {
    double eta2, eta3, eta32;
    double phi2, phi3, phi32, phi_kin;
    double m0, m1, m32;
    double nested;
    // absolute error estimates (zero for closed forms)
    double e_eta2 = 0, e_eta3 = 0, e_eta32 = 0;
    double e_phi2 = 0, e_phi3 = 0, e_phi32 = 0, e_phi_kin = 0;
    double e_m0 = 0, e_m1 = 0, e_m32 = 0;
    double e_nested = 0;
};

FactorIntegrals closed_form_factors(const SeparableAnsatz& a) {
    FactorIntegrals f{};
    f.eta2 = a.eta().moment(2);
    f.eta3 = a.eta().moment(3);
    f.eta32 = a.eta().lbeta_moment(1.5, 2);
    f.phi2 = a.phi().moment(2);
    f.phi3 = a.phi().moment(3);
    f.phi32 = a.phi().lbeta_moment(1.5, 2);
    if (auto edge = a.phi().plateau_edge())
        f.phi_kin = kinetic_energy_ball(*edge) * f.phi2;
    else
        f.phi_kin = kinetic_numerator_quadrature(a.phi(), &f.e_phi_kin);
    f.m0 = a.angular_moments().m0;
    f.m1 = a.angular_moments().m1;
    f.m32 = a.angular_moments().m32;
    f.nested = a.eta().nested_mass();
    return f;
}

FactorIntegrals quadrature_factors(const SeparableAnsatz& a) {
    FactorIntegrals f{};
    const auto opts = oracle_options();
    auto radial = [&](const PiecewiseProfile& g, auto&& weight, double* err) {
        const auto bp = g.breakpoints();
        auto r = quadrature::integrate([&](double x) { return weight(g.eval(x), x); }, 0.0,
                                       g.support_radius(), bp, opts);
        *err = r.abs_error_estimate;
        return r.value;
    };
    auto angular = [&](auto&& weight, double* err) {
        const auto bp = a.angular().breakpoints();
        auto r = quadrature::integrate([&](double x) { return weight(a.angular().eval(x), x); },
                                       -1.0, 1.0, bp, opts);
        *err = r.abs_error_estimate;
        return r.value;
    };
    f.eta2 = radial(a.eta(), [](double g, double q) { return g * q * q; }, &f.e_eta2);
    f.eta3 = radial(a.eta(), [](double g, double q) { return g * q * q * q; }, &f.e_eta3);
    f.eta32 = radial(a.eta(), [](double g, double q) { return std::pow(g, 1.5) * q * q; },
                     &f.e_eta32);
    f.phi2 = radial(a.phi(), [](double g, double p) { return g * p * p; }, &f.e_phi2);
    f.phi3 = radial(a.phi(), [](double g, double p) { return g * p * p * p; }, &f.e_phi3);
    f.phi32 = radial(a.phi(), [](double g, double p) { return std::pow(g, 1.5) * p * p; },
                     &f.e_phi32);
    f.phi_kin = kinetic_numerator_quadrature(a.phi(), &f.e_phi_kin);
    f.m0 = angular([](double l, double) { return l; }, &f.e_m0);
    f.m1 = angular([](double l, double x) { return x * l; }, &f.e_m1);
    f.m32 = angular([](double l, double) { return std::pow(l, 1.5); }, &f.e_m32);
    const auto nested = quadrature::nested_mass_integral(a.eta(), opts);
    f.nested = nested.value;
    f.e_nested = nested.abs_error_estimate;
    return f;
}

double rel(double err, double value) { return value == 0.0 ? 0.0 : std::abs(err / value); }

FunctionalReport assemble(const FactorIntegrals& f, Method method) {
    FunctionalReport r{};
    r.method = method;
    const double denom = 8.0 * kPi * kPi * f.eta2 * f.phi2 * f.m0;
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw DegenerateFactor("a factor integral of the ansatz is zero or infinite");
    r.norm_constant = 1.0 / denom;
    r.mass = r.norm_constant * 8.0 * kPi * kPi * f.eta2 * f.phi2 * f.m0;
    r.l32_norm = std::pow(f.eta32 * f.phi32 * f.m32, 2.0 / 3.0) /
                 (2.0 * std::pow(kPi, 2.0 / 3.0) * f.eta2 * f.phi2 * f.m0);
    r.kinetic = f.phi_kin / f.phi2;
    r.potential = -f.nested / (f.eta2 * f.eta2);
    r.total_energy = r.kinetic + r.potential;
    r.virial = (f.eta3 / f.eta2) * (f.phi3 / f.phi2) * (f.m1 / f.m0);

    const double rc = rel(f.e_eta2, f.eta2) + rel(f.e_phi2, f.phi2) + rel(f.e_m0, f.m0);
    r.residuals.norm_constant = r.norm_constant * rc;
    r.residuals.mass = rc;
    r.residuals.l32_norm =
        r.l32_norm * ((2.0 / 3.0) * (rel(f.e_eta32, f.eta32) + rel(f.e_phi32, f.phi32) +
                                     rel(f.e_m32, f.m32)) +
                      rc);
    r.residuals.kinetic = r.kinetic * (rel(f.e_phi_kin, f.phi_kin) + rel(f.e_phi2, f.phi2));
    r.residuals.potential =
        std::abs(r.potential) * (rel(f.e_nested, f.nested) + 2.0 * rel(f.e_eta2, f.eta2));
    r.residuals.virial = std::abs(r.virial) *
                         (rel(f.e_eta3, f.eta3) + rel(f.e_phi3, f.phi3) + rel(f.e_m1, f.m1) + rc);
    return r;
}

}  // namespace

std::string_view to_string(Method method) {
    return method == Method::ClosedForm ? "closed-form" : "quadrature";
}

double kinetic_energy_ball(double P) {
    if (!(P >= 0.0) || !std::isfinite(P)) throw PreconditionError("momentum radius must be >= 0");
    if (P < 0.25) {
        // 3 sum_j binom(1/2, j) P^{2j} / (2j + 3)
        const double x = P * P;
        double coeff = 1.0;
        double power = 1.0;
        double sum = 0.0;
        for (int j = 0; j < 16; ++j) {
            sum += coeff * power / (2.0 * j + 3.0);
            coeff *= (0.5 - j) / (j + 1.0);
            power *= x;
        }
        return 3.0 * sum;
    }
    const double s = std::sqrt(1.0 + P * P);
    return 0.375 * (s / (P * P) + 2.0 * s - std::asinh(P) / (P * P * P));
}

double normalization(const SeparableAnsatz& ansatz) { return ansatz.norm_constant(); }

double mass(const SeparableAnsatz& ansatz) {
    return ansatz.norm_constant() * 8.0 * kPi * kPi * ansatz.eta().moment(2) *
           ansatz.phi().moment(2) * ansatz.angular_moments().m0;
}

double l32_norm(const SeparableAnsatz& ansatz) {
    const auto& m = ansatz.angular_moments();
    const double num = ansatz.eta().lbeta_moment(1.5, 2) * ansatz.phi().lbeta_moment(1.5, 2) * m.m32;
    return std::pow(num, 2.0 / 3.0) /
           (2.0 * std::pow(kPi, 2.0 / 3.0) * ansatz.eta().moment(2) * ansatz.phi().moment(2) * m.m0);
}

double kinetic_energy(const SeparableAnsatz& ansatz) {
    if (auto edge = ansatz.phi().plateau_edge()) return kinetic_energy_ball(*edge);
    return kinetic_numerator_quadrature(ansatz.phi(), nullptr) / ansatz.phi().moment(2);
}

double spatial_density(const SeparableAnsatz& ansatz, double q_radius) {
    return ansatz.eta().eval(q_radius) / (4.0 * kPi * ansatz.eta().moment(2));
}

double potential_energy(const SeparableAnsatz& ansatz) {
    const double m2 = ansatz.eta().moment(2);
    return -ansatz.eta().nested_mass() / (m2 * m2);
}

double virial_spatial_momentum_factor(const SeparableAnsatz& ansatz) {
    return (ansatz.eta().moment(3) / ansatz.eta().moment(2)) *
           (ansatz.phi().moment(3) / ansatz.phi().moment(2));
}

double virial(const SeparableAnsatz& ansatz) {
    const auto& m = ansatz.angular_moments();
    return virial_spatial_momentum_factor(ansatz) * (m.m1 / m.m0);
}

double total_energy(const SeparableAnsatz& ansatz) {
    return kinetic_energy(ansatz) + potential_energy(ansatz);
}

FunctionalReport evaluate(const SeparableAnsatz& ansatz, Method method) {
    if (method == Method::Quadrature) return assemble(quadrature_factors(ansatz), method);
    const Method label = uses_quadrature_fallback(ansatz) ? Method::Quadrature : Method::ClosedForm;
    return assemble(closed_form_factors(ansatz), label);
}

Certificate certify(const FunctionalReport& report, double energy_tolerance) {
    if (!(energy_tolerance > 0.0)) throw PreconditionError("energy tolerance must be positive");
    Certificate c{};
    c.report = report;
    c.energy_tolerance = energy_tolerance;
    c.energy_residual = std::abs(report.total_energy);
    c.virial_margin = -0.5 - report.virial;
    c.norm_margin = report.l32_norm - critical_norm();
    c.energy_ok = c.energy_residual <= energy_tolerance;
    c.virial_ok = report.virial <= -0.5;
    c.norm_ok = report.l32_norm > critical_norm();
    c.pass = c.energy_ok && c.virial_ok && c.norm_ok;
    return c;
}

Certificate check_criteria(const SeparableAnsatz& ansatz, double energy_tolerance) {
    return certify(evaluate(ansatz, Method::ClosedForm), energy_tolerance);
}

}  // namespace vforge
