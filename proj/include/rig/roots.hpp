#pragma once

#include <vector>

#include "rig/polynomial.hpp"

namespace rig {

namespace detail {

/// Fujiwara's root-radius formula, 2 max_k |c_{n-k}/c_n|^{1/k}, rounded up.
/// Shared between the certified bound in bounds.hpp and the root finder's
/// initial circle.
inline BigFloat fujiwara_radius(const UnivariatePolynomial& p, mpfr_rnd_t rnd = MPFR_RNDU) {
    long n = p.degree();
    if (n < 1) throw Error("fujiwara bound needs degree >= 1");
    BigFloat lead = BigFloat::hypot_r(p.leading().re(), p.leading().im(), MPFR_RNDD);
    if (lead.is_zero()) throw Error("zero leading coefficient");
    Precision wp = p.prec();
    BigFloat best(0.0, wp);
    for (long k = 1; k <= n; ++k) {
        const BigComplex& c = p.coeffs()[static_cast<size_t>(n - k)];
        if (c.is_zero()) continue;
        BigFloat ratio = BigFloat::div_r(BigFloat::hypot_r(c.re(), c.im(), rnd), lead, rnd);
        best = BigFloat::max(best, BigFloat::rootn_r(ratio, static_cast<unsigned long>(k), rnd));
    }
    return BigFloat::ldexp(best, 1);
}

} // namespace detail

/// All complex roots of `p` (with multiplicity, clustered roots reported
/// as-is) by Aberth-Ehrlich simultaneous iteration from a perturbed circle.
///
/// Each returned root r satisfies
///   |p(r)| <= 2^-(precision-20) * max|coeff| * max(1,|r|)^deg.
/// Throws PrecisionError if the iteration cap is reached before every
/// residual clears that bound.
inline std::vector<BigComplex> poly_roots(const UnivariatePolynomial& p, Precision precision) {
    long deg = p.degree();
    if (deg < 1) throw Error("poly_roots needs degree >= 1");
    Precision wp = precision + 32;

    // Deflate exact zero roots first; they are free and they keep the
    // initial circle radius meaningful.
    std::vector<BigComplex> coeffs;
    for (const auto& c : p.coeffs()) coeffs.push_back(BigComplex::at_precision(c, wp));
    size_t zero_roots = 0;
    while (coeffs.size() > 1 && coeffs.front().is_zero()) {
        coeffs.erase(coeffs.begin());
        ++zero_roots;
    }
    std::vector<BigComplex> roots(zero_roots, BigComplex::zero(wp));
    long m = static_cast<long>(coeffs.size()) - 1;
    if (m == 0) return roots;

    UnivariatePolynomial q{std::vector<BigComplex>(coeffs)};
    BigFloat radius = detail::fujiwara_radius(q, MPFR_RNDU) * BigFloat(0.5, wp);
    if (radius.is_zero()) {
        // All lower coefficients vanish: q = c z^m.
        for (long k = 0; k < m; ++k) roots.push_back(BigComplex::zero(wp));
        return roots;
    }

    // Perturbed circle: golden-ratio angle offset plus a slight spiral so no
    // initial configuration is symmetric under conjugation or rotation.
    std::vector<BigComplex> zs;
    BigFloat two_pi = BigFloat::pi(wp) * BigFloat(2.0, wp);
    for (long k = 0; k < m; ++k) {
        BigFloat ang = two_pi * (BigFloat(k, wp) / BigFloat(m, wp) + BigFloat(0.3819660112 * (1.0 + 0.11 * k), wp));
        BigFloat rk = radius * BigFloat(1.0 + 0.04 * static_cast<double>((k * 7) % 5), wp);
        zs.push_back(BigComplex(rk * BigFloat::cos_r(ang, MPFR_RNDN), rk * BigFloat::sin_r(ang, MPFR_RNDN)));
    }

    std::vector<bool> locked(static_cast<size_t>(m), false);
    const int iteration_cap = 1000;
    for (int iter = 0; iter < iteration_cap; ++iter) {
        bool all_locked = true;
        for (long k = 0; k < m; ++k) {
            if (locked[static_cast<size_t>(k)]) continue;
            auto [pv, dpv] = q.eval_with_derivative(zs[static_cast<size_t>(k)]);
            if (pv.abs_upper() <= root_residual_bound(q, zs[static_cast<size_t>(k)], precision)) {
                locked[static_cast<size_t>(k)] = true;
                continue;
            }
            all_locked = false;
            if (dpv.is_zero()) {
                // Sitting on a critical point of q: nudge deterministically.
                zs[static_cast<size_t>(k)] = zs[static_cast<size_t>(k)] + BigComplex(0.125, 0.0625, wp) * radius;
                continue;
            }
            BigComplex w = pv / dpv;
            BigComplex s = BigComplex::zero(wp);
            for (long j = 0; j < m; ++j) {
                if (j == k) continue;
                BigComplex d = zs[static_cast<size_t>(k)] - zs[static_cast<size_t>(j)];
                if (d.is_zero()) d = BigComplex(BigFloat::ldexp(radius, -static_cast<long>(wp) / 2), BigFloat(0.0, wp));
                s += BigComplex::one(wp) / d;
            }
            BigComplex denom = BigComplex::one(wp) - w * s;
            BigComplex step = denom.is_zero() ? w : w / denom;
            zs[static_cast<size_t>(k)] = zs[static_cast<size_t>(k)] - step;
        }
        if (all_locked) {
            for (auto& z : zs) roots.push_back(z);
            return roots;
        }
    }
    throw PrecisionError("root finding did not converge; raise the working precision");
}

} // namespace rig
