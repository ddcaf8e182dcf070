#pragma once

#include <cmath>
#include <string_view>

#include "vforge/profiles.hpp"

namespace vforge {

enum class Method { ClosedForm, Quadrature };

std::string_view to_string(Method method);

/// Error estimates attached to a report. Closed-form entries carry zero; quadrature
/// entries carry the summed absolute error estimates of the integrals involved,
/// propagated to first order.
struct Residuals {
    double norm_constant = 0.0;
    double mass = 0.0;
    double l32_norm = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double virial = 0.0;
};

struct FunctionalReport {
    double norm_constant;
    double mass;
    double l32_norm;
    double kinetic;    // includes the rest mass, so never below 1
    double potential;  // never above 0
    double total_energy;
    double virial;
    /// ClosedForm only when no quantity had to fall back to quadrature.
    Method method;
    Residuals residuals;
};

/// L^{3/2} threshold below which solutions exist globally: (3/8)(15/16)^{1/3}.
inline double critical_norm() { return 0.375 * std::cbrt(15.0 / 16.0); }

inline constexpr double kDefaultEnergyTolerance = 1e-9;

struct Certificate {
    FunctionalReport report;
    double energy_residual;  // |E|
    double virial_margin;    // -1/2 - V, non-negative when the virial hypothesis holds
    double norm_margin;      // ||f||_{3/2} - critical_norm(), positive when it holds
    double energy_tolerance;
    bool energy_ok;
    bool virial_ok;
    bool norm_ok;
    bool pass;
};

double normalization(const SeparableAnsatz& ansatz);
double mass(const SeparableAnsatz& ansatz);
double l32_norm(const SeparableAnsatz& ansatz);
/// Closed form for an indicator momentum profile, quadrature otherwise.
double kinetic_energy(const SeparableAnsatz& ansatz);
/// <sqrt(1 + p^2)> over the uniformly filled momentum ball of radius P.
double kinetic_energy_ball(double P);
double spatial_density(const SeparableAnsatz& ansatz, double q_radius);
double potential_energy(const SeparableAnsatz& ansatz);
double virial(const SeparableAnsatz& ansatz);
double total_energy(const SeparableAnsatz& ansatz);

/// The virial with the angular factor stripped: (<q^3>/<q^2>)_eta * (<p^3>/<p^2>)_phi.
/// For cutoff(a) angular profiles V = S (a - 1) / 2.
double virial_spatial_momentum_factor(const SeparableAnsatz& ansatz);

/// Every functional at once. Method::ClosedForm uses exact piecewise integrals wherever
/// they exist; Method::Quadrature recomputes every factor integral by adaptive quadrature
/// (with the exact inner antiderivative in the nested potential integral).
FunctionalReport evaluate(const SeparableAnsatz& ansatz, Method method = Method::ClosedForm);

Certificate certify(const FunctionalReport& report,
                    double energy_tolerance = kDefaultEnergyTolerance);

/// Evaluates the closed-form report and applies the three blow-up hypotheses:
/// |E| <= tolerance, V <= -1/2 and ||f||_{3/2} strictly above critical_norm().
Certificate check_criteria(const SeparableAnsatz& ansatz,
                           double energy_tolerance = kDefaultEnergyTolerance);

}  // namespace vforge
