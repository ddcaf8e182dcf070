#pragma once

// Dense polynomials in a local coordinate t in [0, 1]. Pieces of constant or cubic shape
// are integrated exactly in this basis; working in t rather than r keeps every product
// well conditioned even for thin shells far from the origin.

#include <cstddef>
#include <vector>

namespace vforge::detail {

using Poly = std::vector<double>;  // coefficient of t^j at index j

inline double horner(const Poly& p, double t) {
    double acc = 0.0;
    for (std::size_t j = p.size(); j-- > 0;) acc = acc * t + p[j];
    return acc;
}

inline Poly derivative(const Poly& p) {
    if (p.size() <= 1) return {0.0};
    Poly d(p.size() - 1);
    for (std::size_t j = 1; j < p.size(); ++j) d[j - 1] = static_cast<double>(j) * p[j];
    return d;
}

inline Poly multiply(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

/// Antiderivative vanishing at t = 0.
inline Poly antiderivative(const Poly& p) {
    Poly out(p.size() + 1, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) out[j + 1] = p[j] / static_cast<double>(j + 1);
    return out;
}

inline double integral01(const Poly& p) {
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) acc += p[j] / static_cast<double>(j + 1);
    return acc;
}

/// (lo + w t)^k expanded in t.
inline Poly affine_power(double lo, double w, int k) {
    Poly out{1.0};
    const Poly base{lo, w};
    for (int i = 0; i < k; ++i) out = multiply(out, base);
    return out;
}

}  // namespace vforge::detail
