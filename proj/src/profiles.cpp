#include "vforge/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "poly.hpp"
#include "vforge/errors.hpp"
#include "vforge/quadrature.hpp"

namespace vforge {

using detail::Poly;

namespace {

// integral_0^T exp(x t) dt
double exp_integral(double x, double T) {
    if (x == 0.0) return T;
    if (T == kInfinity) {
        if (x < 0.0) return -1.0 / x;
        return kInfinity;
    }
    return std::expm1(x * T) / x;
}

// integral_0^T exp(s t) (exp(u t) - 1) / u dt
double nested_exp_integral(double s, double u, double T) {
    if (u == 0.0) {
        if (s == 0.0) return 0.5 * T * T;
        return (std::exp(s * T) * (s * T - 1.0) + 1.0) / (s * s);
    }
    return (exp_integral(s + u, T) - exp_integral(s, T)) / u;
}

// Coefficients in t = (r - lo) / w of a constant or Hermite-cubic piece.
Poly local_poly(const PieceShape& shape, double w) {
    if (const auto* c = std::get_if<Constant>(&shape)) return {c->value};
    const auto& h = std::get<SmoothRamp>(shape);
    const double ml = w * h.left_slope;
    const double mr = w * h.right_slope;
    return {h.left, ml, -3.0 * h.left + 3.0 * h.right - 2.0 * ml - mr,
            2.0 * h.left - 2.0 * h.right + ml + mr};
}

void require_moment_order(int k) {
    if (k < 0) throw PreconditionError("moment order must be non-negative");
}

std::string interval_text(double lo, double hi) {
    std::ostringstream s;
    s << "[" << lo << ", " << hi << ")";
    return s.str();
}

// Smallest value of the cubic on [0, 1] (endpoints and interior critical points).
double cubic_min01(const Poly& p) {
    double m = std::min(detail::horner(p, 0.0), detail::horner(p, 1.0));
    const Poly d = detail::derivative(p);
    const double a = d.size() > 2 ? d[2] : 0.0;
    const double b = d.size() > 1 ? d[1] : 0.0;
    const double c = d[0];
    auto probe = [&](double t) {
        if (t > 0.0 && t < 1.0) m = std::min(m, detail::horner(p, t));
    };
    if (a == 0.0) {
        if (b != 0.0) probe(-c / b);
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            probe((-b + sq) / (2.0 * a));
            probe((-b - sq) / (2.0 * a));
        }
    }
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------------------
// Piece

Piece::Piece(PieceShape shape, double lo, double hi) : shape_(shape), lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || std::isnan(hi) || !(lo < hi))
        throw InvalidProfile("piece interval " + interval_text(lo, hi) + " is empty or not finite");
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Constant>) {
                if (!std::isfinite(s.value) || s.value < 0.0)
                    throw InvalidProfile("constant piece needs a finite non-negative value");
                if (hi == kInfinity && s.value != 0.0)
                    throw InvalidProfile("an unbounded constant piece must be zero");
            } else if constexpr (std::is_same_v<T, PowerLaw>) {
                if (!(lo > 0.0)) throw InvalidProfile("power-law piece must start at r > 0");
                if (!std::isfinite(s.scale) || s.scale < 0.0 || !std::isfinite(s.exponent))
                    throw InvalidProfile("power-law piece needs a finite non-negative scale");
            } else {
                if (hi == kInfinity) throw InvalidProfile("ramp pieces must be bounded");
                if (!std::isfinite(s.left) || !std::isfinite(s.right) || s.left < 0.0 ||
                    s.right < 0.0 || !std::isfinite(s.left_slope) || !std::isfinite(s.right_slope))
                    throw InvalidProfile("ramp endpoints must be finite and non-negative");
                const double floor = -1e-14 * std::max(s.left, s.right);
                if (cubic_min01(local_poly(shape_, hi - lo)) < floor)
                    throw InvalidProfile("ramp on " + interval_text(lo, hi) + " dips below zero");
            }
        },
        shape_);
}

double Piece::value(double r) const {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return s.value;
            } else if constexpr (std::is_same_v<T, PowerLaw>) {
                return s.scale * std::pow(lo_ / r, s.exponent);
            } else {
                const double t = std::clamp((r - lo_) / (hi_ - lo_), 0.0, 1.0);
                return std::max(0.0, detail::horner(local_poly(shape_, hi_ - lo_), t));
            }
        },
        shape_);
}

double Piece::derivative(double r) const {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, PowerLaw>) {
                return -s.exponent * s.scale * std::pow(lo_ / r, s.exponent) / r;
            } else {
                const double w = hi_ - lo_;
                const double t = std::clamp((r - lo_) / w, 0.0, 1.0);
                return detail::horner(detail::derivative(local_poly(shape_, w)), t) / w;
            }
        },
        shape_);
}

double Piece::left_value() const { return value(lo_); }

double Piece::right_value() const {
    if (hi_ == kInfinity) {
        if (const auto* p = std::get_if<PowerLaw>(&shape_))
            return p->exponent > 0.0 ? 0.0 : (p->exponent == 0.0 ? p->scale : kInfinity);
        return 0.0;
    }
    return value(hi_);
}

double Piece::left_slope() const { return derivative(lo_); }

double Piece::right_slope() const { return hi_ == kInfinity ? 0.0 : derivative(hi_); }

bool Piece::is_zero() const {
    return std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Constant>) return s.value == 0.0;
            else if constexpr (std::is_same_v<T, PowerLaw>) return s.scale == 0.0;
            else return s.left == 0.0 && s.right == 0.0 && s.left_slope == 0.0 &&
                        s.right_slope == 0.0;
        },
        shape_);
}

double Piece::moment(int k) const { return partial_moment(k, hi_); }

double Piece::partial_moment(int k, double r) const {
    require_moment_order(k);
    if (r <= lo_ || is_zero()) return 0.0;
    const double upper = std::min(r, hi_);
    if (const auto* p = std::get_if<PowerLaw>(&shape_)) {
        const double T = upper == kInfinity ? kInfinity : std::log(upper / lo_);
        const double x = static_cast<double>(k + 1) - p->exponent;
        const double value = p->scale * std::pow(lo_, k + 1) * exp_integral(x, T);
        if (!std::isfinite(value)) {
            std::ostringstream msg;
            msg << "moment of order " << k << " diverges on the power-law tail r^-"
                << p->exponent;
            throw DivergentMoment(msg.str());
        }
        return value;
    }
    const double w = hi_ - lo_;
    const Poly integrand = detail::multiply(local_poly(shape_, w), detail::affine_power(lo_, w, k));
    const double t = std::min(1.0, (upper - lo_) / w);
    return w * detail::horner(detail::antiderivative(integrand), t);
}

double Piece::lbeta_moment(double beta, int k) const {
    require_moment_order(k);
    if (!(beta > 0.0)) throw PreconditionError("lbeta_moment: beta must be positive");
    if (is_zero()) return 0.0;
    if (const auto* c = std::get_if<Constant>(&shape_)) {
        const double w = hi_ - lo_;
        return std::pow(c->value, beta) * w * detail::integral01(detail::affine_power(lo_, w, k));
    }
    if (const auto* p = std::get_if<PowerLaw>(&shape_)) {
        const double T = hi_ == kInfinity ? kInfinity : std::log(hi_ / lo_);
        const double x = static_cast<double>(k + 1) - beta * p->exponent;
        const double value = std::pow(p->scale, beta) * std::pow(lo_, k + 1) * exp_integral(x, T);
        if (!std::isfinite(value)) {
            std::ostringstream msg;
            msg << "L^" << beta << " moment of order " << k << " diverges on the power-law tail";
            throw DivergentMoment(msg.str());
        }
        return value;
    }
    quadrature::Options opts;
    opts.abs_tol = 1e-300;
    opts.rel_tol = 1e-14;
    auto f = [&](double r) { return std::pow(value(r), beta) * std::pow(r, k); };
    return quadrature::integrate(f, lo_, hi_, opts).value;
}

double Piece::self_nested() const {
    if (is_zero()) return 0.0;
    if (hi_ == kInfinity) throw PreconditionError("nested mass integral needs compact support");
    if (const auto* p = std::get_if<PowerLaw>(&shape_)) {
        const double T = std::log(hi_ / lo_);
        const double n = p->exponent;
        return p->scale * p->scale * std::pow(lo_, 5) * nested_exp_integral(2.0 - n, 3.0 - n, T);
    }
    const double w = hi_ - lo_;
    const Poly v = local_poly(shape_, w);
    const Poly cumulative =
        detail::antiderivative(detail::multiply(v, detail::affine_power(lo_, w, 2)));
    const Poly outer = detail::multiply(v, detail::affine_power(lo_, w, 1));
    return w * w * detail::integral01(detail::multiply(outer, cumulative));
}

Piece Piece::dilated(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw PreconditionError("dilation factor must be positive and finite");
    PieceShape s = shape_;
    if (auto* h = std::get_if<SmoothRamp>(&s)) {
        h->left_slope /= factor;
        h->right_slope /= factor;
    }
    return {s, lo_ * factor, hi_ == kInfinity ? kInfinity : hi_ * factor};
}

Piece Piece::scaled(double factor) const {
    if (!(factor >= 0.0) || !std::isfinite(factor))
        throw PreconditionError("scale factor must be non-negative and finite");
    PieceShape s = shape_;
    std::visit(
        [&](auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Constant>) {
                v.value *= factor;
            } else if constexpr (std::is_same_v<T, PowerLaw>) {
                v.scale *= factor;
            } else {
                v.left *= factor;
                v.right *= factor;
                v.left_slope *= factor;
                v.right_slope *= factor;
            }
        },
        s);
    return {s, lo_, hi_};
}

// ---------------------------------------------------------------------------------------
// PiecewiseProfile

PiecewiseProfile::PiecewiseProfile(std::vector<Piece> pieces, Domain domain)
    : pieces_(std::move(pieces)), domain_(domain) {
    if (pieces_.empty()) throw InvalidProfile("profile has no pieces");
    if (pieces_.front().lo() != 0.0) throw InvalidProfile("profile must start at r = 0");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
        if (!pieces_[i].is_bounded())
            throw InvalidProfile("only the final piece may extend to infinity");
        if (pieces_[i].hi() != pieces_[i + 1].lo())
            throw InvalidProfile("pieces " + interval_text(pieces_[i].lo(), pieces_[i].hi()) +
                                 " and " +
                                 interval_text(pieces_[i + 1].lo(), pieces_[i + 1].hi()) +
                                 " leave a gap or overlap");
    }
    if (pieces_.back().is_bounded()) throw InvalidProfile("profile must extend to infinity");
    for (int k = 0; k < 4; ++k) {
        try {
            moments_[k] = 0.0;
            for (const Piece& p : pieces_) moments_[k] += p.moment(k);
        } catch (const DivergentMoment&) {
            moments_[k] = std::numeric_limits<double>::quiet_NaN();
        }
    }
}

PiecewiseProfile PiecewiseProfile::from_support(std::vector<Piece> pieces, Domain domain) {
    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& a, const Piece& b) { return a.lo() < b.lo(); });
    std::vector<Piece> full;
    double cursor = 0.0;
    for (const Piece& p : pieces) {
        if (p.lo() < cursor) throw InvalidProfile("support pieces overlap near r = " +
                                                  std::to_string(p.lo()));
        if (p.lo() > cursor) full.push_back(Piece::constant(cursor, p.lo(), 0.0));
        full.push_back(p);
        cursor = p.hi();
    }
    if (cursor < kInfinity) full.push_back(Piece::constant(cursor, kInfinity, 0.0));
    return PiecewiseProfile(std::move(full), domain);
}

PiecewiseProfile PiecewiseProfile::indicator(double lo, double hi, double value, Domain domain) {
    if (!(lo < hi)) return from_support({}, domain);
    return from_support({Piece::constant(lo, hi, value)}, domain);
}

namespace {
template <typename Pieces>
std::size_t locate(const Pieces& pieces, double r) {
    auto it = std::upper_bound(pieces.begin(), pieces.end(), r,
                               [](double x, const Piece& p) { return x < p.lo(); });
    return it == pieces.begin() ? 0 : static_cast<std::size_t>(it - pieces.begin()) - 1;
}
}  // namespace

double PiecewiseProfile::eval(double r) const {
    if (!(r >= 0.0)) throw PreconditionError("profiles are evaluated at r >= 0");
    return pieces_[locate(pieces_, r)].value(r);
}

double PiecewiseProfile::derivative(double r) const {
    if (!(r >= 0.0)) throw PreconditionError("profiles are evaluated at r >= 0");
    return pieces_[locate(pieces_, r)].derivative(r);
}

double PiecewiseProfile::moment(int k) const {
    require_moment_order(k);
    if (k < 4 && !std::isnan(moments_[k])) return moments_[k];
    double total = 0.0;
    for (const Piece& p : pieces_) total += p.moment(k);
    return total;
}

double PiecewiseProfile::cumulative_moment(int k, double r) const {
    double total = 0.0;
    for (const Piece& p : pieces_) {
        if (p.lo() >= r) break;
        total += p.partial_moment(k, r);
    }
    return total;
}

double PiecewiseProfile::lbeta_moment(double beta, int k) const {
    double total = 0.0;
    for (const Piece& p : pieces_) total += p.lbeta_moment(beta, k);
    return total;
}

double PiecewiseProfile::nested_mass() const {
    if (!has_compact_support())
        throw PreconditionError("nested mass integral needs a compactly supported profile");
    double enclosed = 0.0;
    double total = 0.0;
    for (const Piece& p : pieces_) {
        if (p.is_zero()) continue;
        total += enclosed * p.moment(1) + p.self_nested();
        enclosed += p.moment(2);
    }
    return total;
}

std::vector<double> PiecewiseProfile::breakpoints() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) out.push_back(pieces_[i].hi());
    return out;
}

double PiecewiseProfile::support_radius() const {
    for (std::size_t i = pieces_.size(); i-- > 0;)
        if (!pieces_[i].is_zero()) return pieces_[i].hi();
    return 0.0;
}

bool PiecewiseProfile::has_ramps() const {
    return std::any_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.is_ramp(); });
}

double PiecewiseProfile::smallest_piece_width() const {
    double w = kInfinity;
    for (const Piece& p : pieces_)
        if (p.is_bounded()) w = std::min(w, p.width());
    return w;
}

std::optional<double> PiecewiseProfile::plateau_edge() const {
    const Piece& first = pieces_.front();
    const auto* c = std::get_if<Constant>(&first.shape());
    if (c == nullptr || c->value <= 0.0 || !first.is_bounded()) return std::nullopt;
    for (std::size_t i = 1; i < pieces_.size(); ++i)
        if (!pieces_[i].is_zero()) return std::nullopt;
    return first.hi();
}

PiecewiseProfile PiecewiseProfile::dilated(double factor) const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const Piece& p : pieces_) out.push_back(p.dilated(factor));
    return PiecewiseProfile(std::move(out), domain_);
}

PiecewiseProfile PiecewiseProfile::scaled(double factor) const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const Piece& p : pieces_) out.push_back(p.scaled(factor));
    return PiecewiseProfile(std::move(out), domain_);
}

// ---------------------------------------------------------------------------------------
// AngularProfile

AngularProfile::AngularProfile(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw InvalidProfile("angular profile has no pieces");
    if (pieces_.front().lo() != -1.0 || pieces_.back().hi() != 1.0)
        throw InvalidProfile("angular profile must cover [-1, 1]");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (pieces_[i].is_power_law())
            throw InvalidProfile("angular profile takes constant or ramp pieces only");
        if (i + 1 < pieces_.size() && pieces_[i].hi() != pieces_[i + 1].lo())
            throw InvalidProfile("angular pieces leave a gap or overlap");
    }
    double m0 = 0.0;
    for (const Piece& p : pieces_) m0 += p.moment(0);
    if (!(m0 > 0.0)) throw DegenerateFactor("angular profile has zero integral");
}

AngularProfile AngularProfile::cutoff(double a) {
    if (!(a > -1.0)) throw DegenerateFactor("cutoff(a) with a <= -1 has zero measure");
    if (!(a <= 1.0)) throw PreconditionError("cutoff parameter a must lie in (-1, 1]");
    if (a == 1.0) return AngularProfile({Piece::constant(-1.0, 1.0, 1.0)});
    return AngularProfile({Piece::constant(-1.0, a, 1.0), Piece::constant(a, 1.0, 0.0)});
}

double AngularProfile::eval(double x) const {
    if (!(x >= -1.0 && x <= 1.0)) throw PreconditionError("angular profile lives on [-1, 1]");
    if (x == 1.0) return pieces_.back().right_value();
    return pieces_[locate(pieces_, x)].value(x);
}

double AngularProfile::derivative(double x) const {
    if (!(x >= -1.0 && x <= 1.0)) throw PreconditionError("angular profile lives on [-1, 1]");
    return pieces_[locate(pieces_, x)].derivative(x);
}

std::vector<double> AngularProfile::breakpoints() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) out.push_back(pieces_[i].hi());
    return out;
}

double AngularProfile::smallest_piece_width() const {
    double w = kInfinity;
    for (const Piece& p : pieces_) w = std::min(w, p.width());
    return w;
}

bool AngularProfile::has_ramps() const {
    return std::any_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.is_ramp(); });
}

std::optional<double> AngularProfile::cutoff_parameter() const {
    const auto* first = std::get_if<Constant>(&pieces_.front().shape());
    if (first == nullptr || first->value != 1.0) return std::nullopt;
    if (pieces_.size() == 1) return 1.0;
    if (pieces_.size() == 2) {
        const auto* second = std::get_if<Constant>(&pieces_[1].shape());
        if (second != nullptr && second->value == 0.0) return pieces_.front().hi();
    }
    return std::nullopt;
}

AngularMoments angular_moments(const AngularProfile& angular) {
    AngularMoments m{0.0, 0.0, 0.0, false};
    for (const Piece& p : angular.pieces()) {
        m.m0 += p.moment(0);
        m.m1 += p.moment(1);
        m.m32 += p.lbeta_moment(1.5, 0);
    }
    if (!(m.m0 > 0.0)) throw DegenerateFactor("angular profile has zero integral");
    m.near_degenerate = m.m0 < 1e-6;
    return m;
}

// ---------------------------------------------------------------------------------------
// SeparableAnsatz

SeparableAnsatz::SeparableAnsatz(PiecewiseProfile eta, PiecewiseProfile phi, AngularProfile angular)
    : eta_(std::move(eta)),
      phi_(std::move(phi)),
      angular_(std::move(angular)),
      angular_moments_(vforge::angular_moments(angular_)),
      norm_constant_(0.0) {
    if (!eta_.has_compact_support())
        throw PreconditionError("spatial profile must have compact support");
    if (!phi_.has_compact_support())
        throw PreconditionError("momentum profile must have compact support");
    const double spatial = eta_.moment(2);
    const double momentum = phi_.moment(2);
    if (!(spatial > 0.0) || !std::isfinite(spatial))
        throw DegenerateFactor("spatial factor integral is zero or infinite");
    if (!(momentum > 0.0) || !std::isfinite(momentum))
        throw DegenerateFactor("momentum factor integral is zero or infinite");
    const double inverse =
        8.0 * std::numbers::pi * std::numbers::pi * spatial * momentum * angular_moments_.m0;
    norm_constant_ = 1.0 / inverse;
    if (!std::isfinite(norm_constant_) || !(norm_constant_ > 0.0))
        throw DegenerateFactor("normalization constant is not a positive finite number");
}

double SeparableAnsatz::density(double q, double p, double x) const {
    return norm_constant_ * eta_.eval(q) * phi_.eval(p) * angular_.eval(x);
}

}  // namespace vforge
