#include "vforge/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vforge/errors.hpp"
#include "vforge/quadrature.hpp"

namespace vforge {

namespace {

bool needs_ramp(const Piece& left, const Piece& right) {
    const double vl = left.right_value();
    const double vr = right.left_value();
    const double sl = left.right_slope();
    const double sr = right.left_slope();
    const double vscale = std::max(std::abs(vl), std::abs(vr));
    const double sscale = std::max(std::abs(sl), std::abs(sr));
    return std::abs(vl - vr) > 1e-14 * vscale || std::abs(sl - sr) > 1e-12 * sscale;
}

// The piece restricted to [lo, hi], keeping its values.
Piece restrict_piece(const Piece& p, double lo, double hi) {
    if (lo == p.lo() && hi == p.hi()) return p;
    if (const auto* pw = std::get_if<PowerLaw>(&p.shape()))
        return Piece::power_law(lo, hi, p.value(lo), pw->exponent);
    if (p.is_ramp())
        throw PreconditionError("cannot re-mollify next to an existing ramp");
    return Piece(p.shape(), lo, hi);
}

std::vector<Piece> mollify_pieces(std::span<const Piece> pieces, double delta) {
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw PreconditionError("mollification half-width must be finite and >= 0");
    std::vector<Piece> in(pieces.begin(), pieces.end());
    if (delta == 0.0) return in;

    const std::size_t n = in.size();
    std::vector<bool> ramp_after(n, false);  // ramp at the boundary between i and i + 1
    for (std::size_t i = 0; i + 1 < n; ++i) ramp_after[i] = needs_ramp(in[i], in[i + 1]);

    for (std::size_t i = 0; i < n; ++i) {
        const bool at_lo = i > 0 && ramp_after[i - 1];
        const bool at_hi = ramp_after[i];
        const double intrusion = delta * (int(at_lo) + int(at_hi));
        if (in[i].is_bounded() && intrusion >= in[i].width()) {
            std::ostringstream msg;
            msg << "ramps of half-width " << delta << " overlap on the piece between breakpoints "
                << in[i].lo() << " and " << in[i].hi();
            throw RampOverlap(msg.str(), in[i].lo(), in[i].hi());
        }
    }

    std::vector<Piece> out;
    for (std::size_t i = 0; i < n; ++i) {
        const bool at_lo = i > 0 && ramp_after[i - 1];
        const bool at_hi = ramp_after[i];
        const double lo = at_lo ? in[i].lo() + delta : in[i].lo();
        const double hi = at_hi ? in[i].hi() - delta : in[i].hi();
        out.push_back(restrict_piece(in[i], lo, hi));
        if (at_hi) {
            const double b = in[i].hi();
            const Piece& next = in[i + 1];
            out.push_back(Piece::ramp(b - delta, b + delta, in[i].value(b - delta),
                                      next.value(b + delta), in[i].derivative(b - delta),
                                      next.derivative(b + delta)));
        }
    }
    return out;
}

double relative_base(double smallest, const MollifySpec& spec) {
    if (!(spec.delta >= 0.0)) throw PreconditionError("mollification delta must be >= 0");
    return spec.scale == DeltaScale::Absolute ? spec.delta : spec.delta * smallest;
}

quadrature::Options tight() {
    quadrature::Options o;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-13;
    return o;
}

double radial_moment_quadrature(const PiecewiseProfile& g, int k) {
    const auto bp = g.breakpoints();
    auto f = [&](double r) { return g.eval(r) * std::pow(r, k); };
    return quadrature::integrate(f, 0.0, g.support_radius(), bp, tight()).value;
}

double kinetic_quadrature(const PiecewiseProfile& phi) {
    const auto bp = phi.breakpoints();
    auto f = [&](double p) { return phi.eval(p) * std::sqrt(1.0 + p * p) * p * p; };
    const double num = quadrature::integrate(f, 0.0, phi.support_radius(), bp, tight()).value;
    return num / radial_moment_quadrature(phi, 2);
}

double potential_quadrature(const PiecewiseProfile& eta) {
    const double m2 = radial_moment_quadrature(eta, 2);
    return -quadrature::nested_mass_integral(eta, tight()).value / (m2 * m2);
}

PiecewiseProfile combine_disjoint(const PiecewiseProfile& a, const PiecewiseProfile& b,
                                  double b_weight) {
    std::vector<Piece> support;
    for (const Piece& p : a.pieces())
        if (!p.is_zero()) support.push_back(p);
    for (const Piece& p : b.pieces())
        if (!p.is_zero()) support.push_back(p.scaled(b_weight));
    return PiecewiseProfile::from_support(std::move(support), a.domain());
}

template <typename F>
double solve_scale_parameter(F&& energy, double guess, const char* what) {
    double lo = 0.5 * guess;
    double hi = 2.0 * guess;
    for (int i = 0; i < 60 && std::signbit(energy(lo)) == std::signbit(energy(hi)); ++i) {
        lo *= 0.5;
        hi *= 2.0;
    }
    if (std::signbit(energy(lo)) == std::signbit(energy(hi)))
        throw NoRoot(std::string("no zero-energy ") + what + " found for the mollified profiles");
    return find_root(energy, {lo, hi, 1e-15});
}

}  // namespace

PiecewiseProfile mollify(const PiecewiseProfile& profile, double delta) {
    if (delta == 0.0) return profile;
    return PiecewiseProfile(mollify_pieces(profile.pieces(), delta), profile.domain());
}

AngularProfile mollify(const AngularProfile& angular, double delta) {
    if (delta == 0.0) return angular;
    return AngularProfile(mollify_pieces(angular.pieces(), delta));
}

double resolved_delta(const PiecewiseProfile& profile, const MollifySpec& spec) {
    return relative_base(profile.smallest_piece_width(), spec);
}

double resolved_delta(const AngularProfile& angular, const MollifySpec& spec) {
    return relative_base(angular.smallest_piece_width(), spec);
}

SeparableAnsatz mollify(const SeparableAnsatz& ansatz, const MollifySpec& spec) {
    auto eta = (spec.targets & kSmoothSpatial) ? mollify(ansatz.eta(), resolved_delta(ansatz.eta(), spec))
                                               : ansatz.eta();
    auto phi = (spec.targets & kSmoothMomentum)
                   ? mollify(ansatz.phi(), resolved_delta(ansatz.phi(), spec))
                   : ansatz.phi();
    auto ang = (spec.targets & kSmoothAngular)
                   ? mollify(ansatz.angular(), resolved_delta(ansatz.angular(), spec))
                   : ansatz.angular();
    return SeparableAnsatz(std::move(eta), std::move(phi), std::move(ang));
}

Rebalanced rebalance(const Family& family, const MollifySpec& spec, double energy_tolerance) {
    const Family step = solve_zero_energy(family);
    const SeparableAnsatz step_ansatz = build_ansatz(step);
    const bool smooth_eta = spec.targets & kSmoothSpatial;
    const bool smooth_phi = spec.targets & kSmoothMomentum;
    const bool smooth_ang = spec.targets & kSmoothAngular;
    const double d_eta = smooth_eta ? resolved_delta(step_ansatz.eta(), spec) : 0.0;
    const double d_ang = smooth_ang ? resolved_delta(step_ansatz.angular(), spec) : 0.0;
    const AngularProfile angular = mollify(step_ansatz.angular(), d_ang);

    auto finish = [&](Family solved, PiecewiseProfile eta, PiecewiseProfile phi) {
        SeparableAnsatz ansatz(std::move(eta), std::move(phi), angular);
        FunctionalReport report = evaluate(ansatz, Method::Quadrature);
        Certificate cert = certify(report, energy_tolerance);
        return Rebalanced{solved, std::move(ansatz), report, cert};
    };

    if (spec.delta == 0.0 || spec.targets == 0u)
        return finish(step, step_ansatz.eta(), step_ansatz.phi());

    return std::visit(
        [&](auto f) -> Rebalanced {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, UniformBall>) {
                const PiecewiseProfile phi =
                    mollify(step_ansatz.phi(), smooth_phi ? resolved_delta(step_ansatz.phi(), spec) : 0.0);
                const double ke = kinetic_quadrature(phi);
                // Relative spec: the ramp scales with R; absolute: fixed width.
                auto eta_for = [&](double R) {
                    const double d = !smooth_eta ? 0.0
                                     : spec.scale == DeltaScale::Absolute ? spec.delta
                                                                          : spec.delta * R;
                    return mollify(uniform_eta(R), d);
                };
                f.R = solve_scale_parameter(
                    [&](double R) { return ke + potential_quadrature(eta_for(R)); }, f.R, "radius");
                return finish(f, eta_for(f.R), phi);
            } else if constexpr (std::is_same_v<T, CoreHalo>) {
                const PiecewiseProfile phi =
                    mollify(step_ansatz.phi(), smooth_phi ? resolved_delta(step_ansatz.phi(), spec) : 0.0);
                // Overlap check on the combined step profile before splitting it.
                mollify(step_ansatz.eta(), d_eta);
                const PiecewiseProfile core = mollify(PiecewiseProfile::indicator(0.0, f.R1), d_eta);
                const PiecewiseProfile halo = mollify(PiecewiseProfile::indicator(f.R2, f.R3), d_eta);
                const double ke = kinetic_quadrature(phi);
                const double A = radial_moment_quadrature(core, 2);
                const double B = radial_moment_quadrature(halo, 2);
                const auto opts = tight();
                const double n_cc = quadrature::nested_mass_integral(core, opts).value;
                const double n_hh = quadrature::nested_mass_integral(halo, opts).value;
                const double n_hc = quadrature::nested_mass_integral(halo, core, opts).value;
                const double n_ch = quadrature::nested_mass_integral(core, halo, opts).value;
                const HaloWeight w = select_positive_root(ke * B * B - n_hh,
                                                          2.0 * ke * A * B - (n_hc + n_ch),
                                                          ke * A * A - n_cc);
                f.alpha = w.alpha;
                return finish(f, combine_disjoint(core, halo, f.alpha), phi);
            } else {
                const PiecewiseProfile eta = mollify(step_ansatz.eta(), d_eta);
                const double pe = potential_quadrature(eta);
                auto phi_for = [&](double P) {
                    const double d = !smooth_phi ? 0.0
                                     : spec.scale == DeltaScale::Absolute ? spec.delta
                                                                          : spec.delta * P;
                    return mollify(momentum_ball(P), d);
                };
                f.P = solve_scale_parameter(
                    [&](double P) { return kinetic_quadrature(phi_for(P)) + pe; }, f.P,
                    "momentum radius");
                return finish(f, eta, phi_for(f.P));
            }
        },
        step);
}

double Drift::abs_change() const { return std::abs(smooth - step); }

std::vector<Drift> drift_table(const FunctionalReport& step, const FunctionalReport& smooth) {
    return {
        {"mass", step.mass, smooth.mass},
        {"kinetic", step.kinetic, smooth.kinetic},
        {"potential", step.potential, smooth.potential},
        {"total_energy", step.total_energy, smooth.total_energy},
        {"virial", step.virial, smooth.virial},
        {"l32_norm", step.l32_norm, smooth.l32_norm},
    };
}

}  // namespace vforge
