#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace vforge {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Constant value on the piece.
struct Constant {
    double value;
};

/// scale * (lo / r)^exponent, anchored at the left endpoint lo of the piece.
struct PowerLaw {
    double scale;
    double exponent;
};

/// Cubic Hermite transition between the endpoint values. With zero end slopes this is
/// the smoothstep left + (right - left) * (3t^2 - 2t^3), t = (r - lo) / (hi - lo).
/// Slopes are derivatives with respect to r.
struct SmoothRamp {
    double left;
    double right;
    double left_slope = 0.0;
    double right_slope = 0.0;
};

using PieceShape = std::variant<Constant, PowerLaw, SmoothRamp>;

/// One piece of a radial profile on the half-open interval [lo, hi).
class Piece {
public:
    Piece(PieceShape shape, double lo, double hi);

    static Piece constant(double lo, double hi, double value) { return {Constant{value}, lo, hi}; }
    static Piece power_law(double lo, double hi, double scale, double exponent) {
        return {PowerLaw{scale, exponent}, lo, hi};
    }
    static Piece ramp(double lo, double hi, double left, double right, double left_slope = 0.0,
                      double right_slope = 0.0) {
        return {SmoothRamp{left, right, left_slope, right_slope}, lo, hi};
    }

    const PieceShape& shape() const { return shape_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }
    bool is_bounded() const { return hi_ < kInfinity; }

    double value(double r) const;
    double derivative(double r) const;
    /// Limits at the endpoints (the right one is the left limit at hi).
    double left_value() const;
    double right_value() const;
    double left_slope() const;
    double right_slope() const;
    bool is_zero() const;
    bool is_ramp() const { return std::holds_alternative<SmoothRamp>(shape_); }
    bool is_power_law() const { return std::holds_alternative<PowerLaw>(shape_); }

    /// Closed-form integral of value(r) * r^k over the piece.
    double moment(int k) const;
    /// Closed-form integral of value(r) * r^k over [lo, min(r, hi)].
    double partial_moment(int k, double r) const;
    /// Integral of value(r)^beta * r^k over the piece. Exact for constants and power
    /// laws; ramps are integrated numerically.
    double lbeta_moment(double beta, int k) const;
    /// Integral over the piece of value(q) * q * (integral_lo^q value(s) s^2 ds) dq.
    double self_nested() const;

    /// The same shape on [lo * factor, hi * factor] evaluated at r / factor.
    Piece dilated(double factor) const;
    Piece scaled(double factor) const;

private:
    PieceShape shape_;
    double lo_;
    double hi_;
};

enum class Domain { RadialPosition, RadialMomentum };

/// Non-negative radial function on [0, inf) made of contiguous pieces.
///
/// Moments of order 0..3 are computed once at construction; the object is immutable
/// afterwards. Pieces are right-continuous: a breakpoint belongs to the piece on its right.
class PiecewiseProfile {
public:
    /// Pieces must start at 0, be contiguous, and end at +inf. Only the final piece may be
    /// unbounded, and it must then be zero or a decaying power law.
    explicit PiecewiseProfile(std::vector<Piece> pieces, Domain domain = Domain::RadialPosition);

    /// Builds a profile from pieces describing the support only: gaps are filled with zero
    /// pieces and a zero tail is appended. Zero-width pieces are dropped.
    static PiecewiseProfile from_support(std::vector<Piece> pieces,
                                         Domain domain = Domain::RadialPosition);
    /// value * indicator of [lo, hi).
    static PiecewiseProfile indicator(double lo, double hi, double value = 1.0,
                                      Domain domain = Domain::RadialPosition);

    std::span<const Piece> pieces() const { return pieces_; }
    Domain domain() const { return domain_; }

    double eval(double r) const;
    double operator()(double r) const { return eval(r); }
    double derivative(double r) const;

    /// Integral of g(r) r^k over [0, inf).
    double moment(int k) const;
    /// Integral of g(s) s^k over [0, r].
    double cumulative_moment(int k, double r) const;
    /// Integral of g(r)^beta r^k over [0, inf).
    double lbeta_moment(double beta, int k) const;
    /// Closed-form integral of g(q) q (integral_0^q g(s) s^2 ds) dq over [0, inf).
    double nested_mass() const;

    /// Interior breakpoints (all finite piece boundaries except 0).
    std::vector<double> breakpoints() const;
    /// Upper end of the support (hi of the last non-zero piece); +inf for a power-law tail.
    double support_radius() const;
    bool has_compact_support() const { return support_radius() < kInfinity; }
    bool has_ramps() const;
    /// Width of the narrowest bounded piece that lies inside the support hull.
    double smallest_piece_width() const;
    /// If the profile is c * indicator[0, P) returns P.
    std::optional<double> plateau_edge() const;

    /// g(r / factor).
    PiecewiseProfile dilated(double factor) const;
    /// factor * g(r).
    PiecewiseProfile scaled(double factor) const;

private:
    std::vector<Piece> pieces_;
    Domain domain_;
    std::array<double, 4> moments_{};
};

/// Non-negative function of x = cos(theta) on [-1, 1], made of constant or ramp pieces.
class AngularProfile {
public:
    explicit AngularProfile(std::vector<Piece> pieces);

    /// Indicator of [-1, a] for a in (-1, 1].
    static AngularProfile cutoff(double a);

    std::span<const Piece> pieces() const { return pieces_; }
    double eval(double x) const;
    double operator()(double x) const { return eval(x); }
    double derivative(double x) const;
    std::vector<double> breakpoints() const;
    double smallest_piece_width() const;
    bool has_ramps() const;
    /// The a of cutoff(a), when the profile is exactly such an indicator.
    std::optional<double> cutoff_parameter() const;

private:
    std::vector<Piece> pieces_;
};

struct AngularMoments {
    double m0;   // integral of L
    double m1;   // integral of x L
    double m32;  // integral of L^{3/2}
    /// m0 is positive but below 1e-6; functionals become ill-conditioned.
    bool near_degenerate;
};

AngularMoments angular_moments(const AngularProfile& angular);

/// Separable phase-space density C * eta(|q|) * phi(|p|) * L(cos theta_{p,q}) with C fixed so
/// the total mass is one. Requires compactly supported eta and phi.
class SeparableAnsatz {
public:
    SeparableAnsatz(PiecewiseProfile eta, PiecewiseProfile phi, AngularProfile angular);

    const PiecewiseProfile& eta() const { return eta_; }
    const PiecewiseProfile& phi() const { return phi_; }
    const AngularProfile& angular() const { return angular_; }
    const AngularMoments& angular_moments() const { return angular_moments_; }
    double norm_constant() const { return norm_constant_; }

    /// f at |q| = q, |p| = p and cos(angle between them) = x.
    double density(double q, double p, double x) const;

private:
    PiecewiseProfile eta_;
    PiecewiseProfile phi_;
    AngularProfile angular_;
    AngularMoments angular_moments_;
    double norm_constant_;
};

}  // namespace vforge
