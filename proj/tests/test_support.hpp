#pragma once

// Test-only oracles, independent of the library's continuation and bound
// paths: branch-tracked closed forms for (z - z0)^-v, dense sampling of
// |g| and its variation, and a tiny deterministic RNG.

#include <cstdint>
#include <vector>

#include "rig/polynomial.hpp"
#include "rig/roots.hpp"

namespace oracle {

using rig::BigComplex;
using rig::BigFloat;
using rig::Precision;

inline BigComplex lerp(const BigComplex& a, const BigComplex& b, const BigFloat& t) {
    return a + (b - a) * t;
}

/// Integral of (z - z0)^(-1/2) over [a, b] on the branch whose value at `a`
/// is 1/sqrt(a - z0) with sign matching `g_at_a`. The square root is tracked
/// stepwise with sign continuity, so segments crossing the principal cut are
/// handled.
inline BigComplex pole_half_integral(const BigComplex& z0, const BigComplex& a, const BigComplex& b,
                                     const BigComplex& g_at_a, Precision prec, int steps = 1024) {
    BigComplex s = (BigComplex::at_precision(a, prec) - z0).sqrt();
    // Choose the square-root branch consistent with the given g(a) = 1/s.
    if ((BigComplex::one(prec) / s - g_at_a).abs() > (BigComplex::one(prec) / (-s) - g_at_a).abs())
        s = -s;
    BigComplex s_first = s;
    for (int k = 1; k <= steps; ++k) {
        BigFloat t(static_cast<double>(k) / steps, prec);
        BigComplex w = lerp(a, b, t) - z0;
        BigComplex cand = w.sqrt();
        if ((cand - s).abs() > (cand + s).abs()) cand = -cand;
        s = cand;
    }
    return (s - s_first) * BigFloat(2.0, prec);
}

/// Integral of (z - z0)^(-1) over [a, b], by telescoping principal logs of
/// nearby ratios (branch-continuous for any segment avoiding z0).
inline BigComplex pole_log_integral(const BigComplex& z0, const BigComplex& a, const BigComplex& b,
                                    Precision prec, int steps = 1024) {
    BigComplex acc = BigComplex::zero(prec);
    BigComplex prev = BigComplex::at_precision(a, prec) - z0;
    for (int k = 1; k <= steps; ++k) {
        BigFloat t(static_cast<double>(k) / steps, prec);
        BigComplex cur = lerp(a, b, t) - z0;
        acc += (cur / prev).log();
        prev = cur;
    }
    return acc;
}

/// Exact integral of a polynomial (ascending coefficients) over [a, b].
inline BigComplex polynomial_integral(const std::vector<BigComplex>& coeffs, const BigComplex& a,
                                      const BigComplex& b, Precision prec) {
    BigComplex va = BigComplex::zero(prec), vb = BigComplex::zero(prec);
    for (size_t k = coeffs.size(); k-- > 0;) {
        BigFloat inv = BigFloat(1.0, prec) / BigFloat(static_cast<long>(k + 1), prec);
        va = va * a + coeffs[k] * inv;
        vb = vb * b + coeffs[k] * inv;
    }
    return vb * b - va * a;
}

/// Max of |root| over all roots of f(z, .) sampled on a circle.
inline BigFloat sampled_branch_max(const rig::BivariateDefiningPolynomial& f, const BigComplex& center,
                                   const BigFloat& radius, int samples, Precision prec) {
    BigFloat best(0.0, prec);
    BigFloat two_pi = BigFloat::pi(prec) * BigFloat(2.0, prec);
    for (int k = 0; k < samples; ++k) {
        BigFloat ang = two_pi * BigFloat(static_cast<double>(k) / samples, prec);
        BigComplex z = center + BigComplex(radius * BigFloat::cos_r(ang, MPFR_RNDN),
                                           radius * BigFloat::sin_r(ang, MPFR_RNDN));
        for (const auto& root : rig::poly_roots(f.slice_at(z), prec))
            best = BigFloat::max(best, root.abs());
    }
    return best;
}

/// Min of |p(z)| sampled on a circle.
inline BigFloat sampled_poly_min(const rig::UnivariatePolynomial& p, const BigComplex& center,
                                 const BigFloat& radius, int samples, Precision prec) {
    BigFloat best = BigFloat::pos_inf(prec);
    BigFloat two_pi = BigFloat::pi(prec) * BigFloat(2.0, prec);
    for (int k = 0; k < samples; ++k) {
        BigFloat ang = two_pi * BigFloat(static_cast<double>(k) / samples, prec);
        BigComplex z = center + BigComplex(radius * BigFloat::cos_r(ang, MPFR_RNDN),
                                           radius * BigFloat::sin_r(ang, MPFR_RNDN));
        best = BigFloat::min(best, p.eval(z).abs());
    }
    return best;
}

/// splitmix64: platform-stable deterministic bits for property tests.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform double in [lo, hi].
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
    long integer(long lo, long hi) { // inclusive
        return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    std::uint64_t state_;
};

} // namespace oracle
