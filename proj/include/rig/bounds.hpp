#pragma once

#include <vector>

#include "rig/algebraic.hpp"

namespace rig {

/// Closed disk D(center, radius).
struct Disk {
    BigComplex center;
    BigFloat radius;

    bool contains(const BigComplex& z) const { return BigComplex::dist_lower(z, center) <= radius; }
};

/// Everything `disk_bound` certifies about one disk: the Taylor radius rho,
/// the Fujiwara bound M~ for |g| on D(center, rho), the branch data at the
/// center and the resulting variation / absolute bounds on D(center, radius).
struct DiskBoundCertificate {
    Disk disk;
    BigFloat taylor_radius;
    BigFloat fujiwara_bound;
    BigComplex g_at_center;
    BigComplex dg_at_center;
    BigFloat variation_bound;
    BigFloat absolute_bound;
};

/// 2 max_k |a_k/a_0|^{1/k}: every root of p has modulus strictly below this
/// unless the bound is 0 (then the only root is 0). Rounded up.
inline BigFloat fujiwara_root_bound(const UnivariatePolynomial& p) {
    return detail::fujiwara_radius(p, MPFR_RNDU);
}

struct UniformCoefficientBounds {
    BigFloat a0_lower;           // A_0: certified lower bound for |a_0(z)| on the disk
    std::vector<BigFloat> upper; // A_i, i = 1..n: certified upper bounds for |a_i(z)|
};

/// Coefficient bounds on D(z_0, delta): A_0 = |a_{0,0}| prod(|z_0-alpha_i| - delta)
/// rounded down, A_i = sum_j |a_{i,j}| (|z_0|+delta)^j rounded up.
/// `a0_roots` must be the full root list of a_0 (with multiplicity).
inline UniformCoefficientBounds uniform_coefficient_bounds(const BivariateDefiningPolynomial& f,
                                                           const std::vector<BigComplex>& a0_roots,
                                                           const BigComplex& z0, const BigFloat& delta) {
    Precision wp = std::max(z0.prec(), delta.prec());
    BigFloat a0 = BigFloat::hypot_r(f.a(0).leading().re(), f.a(0).leading().im(), MPFR_RNDD);
    for (const auto& alpha : a0_roots) {
        BigFloat gap = BigFloat::sub_r(BigComplex::dist_lower(z0, alpha), delta, MPFR_RNDD);
        if (!(gap > BigFloat(0.0, wp)))
            throw GeometryError("disk touches a zero of a_0");
        a0 = BigFloat::mul_r(a0, gap, MPFR_RNDD);
    }

    BigFloat s = BigFloat::add_r(z0.abs_upper(), delta, MPFR_RNDU);
    std::vector<BigFloat> upper;
    long n = f.degree_g();
    for (long i = 1; i <= n; ++i) {
        const auto& coeffs = f.a(static_cast<size_t>(i)).coeffs();
        BigFloat acc(0.0, wp);
        for (size_t j = coeffs.size(); j-- > 0;) {
            acc = BigFloat::mul_r(acc, s, MPFR_RNDU);
            acc = BigFloat::add_r(acc, BigFloat::hypot_r(coeffs[j].re(), coeffs[j].im(), MPFR_RNDU), MPFR_RNDU);
        }
        upper.push_back(acc);
    }
    return {a0, upper};
}

/// M~ >= |g(z)| for all z in D(z_0, delta) and every branch g, from
/// Fujiwara's bound applied with the uniform coefficient bounds. Rounded up.
inline BigFloat fujiwara_uniform_bound(const BivariateDefiningPolynomial& f,
                                       const std::vector<BigComplex>& a0_roots,
                                       const BigComplex& z0, const BigFloat& delta) {
    auto cb = uniform_coefficient_bounds(f, a0_roots, z0, delta);
    Precision wp = std::max(z0.prec(), delta.prec());
    BigFloat best(0.0, wp);
    for (size_t k = 1; k <= cb.upper.size(); ++k) {
        const BigFloat& ak = cb.upper[k - 1];
        if (ak.is_zero()) continue;
        BigFloat ratio = BigFloat::div_r(ak, cb.a0_lower, MPFR_RNDU);
        best = BigFloat::max(best, BigFloat::rootn_r(ratio, static_cast<unsigned long>(k), MPFR_RNDU));
    }
    return BigFloat::ldexp(best, 1);
}

/// Cauchy-Taylor variation bound on D(z_0, delta):
///   |g(z) - g(z_0)| <= delta |g'(z_0)| + delta^2 M~ / (rho (rho - delta)),
/// valid for 0 <= delta < rho when |g| <= M~ on D(z_0, rho). Rounded up.
inline BigFloat taylor_variation_bound(const BigComplex& dg_at_center, const BigFloat& m_tilde,
                                       const BigFloat& rho, const BigFloat& delta) {
    Precision wp = std::max(rho.prec(), delta.prec());
    if (delta.is_zero()) return BigFloat(0.0, wp);
    if (!(delta < rho)) throw GeometryError("taylor bound needs delta < rho");
    BigFloat t1 = BigFloat::mul_r(delta, dg_at_center.abs_upper(), MPFR_RNDU);
    BigFloat num = BigFloat::mul_r(BigFloat::mul_r(delta, delta, MPFR_RNDU), m_tilde, MPFR_RNDU);
    BigFloat den = BigFloat::mul_r(rho, BigFloat::sub_r(rho, delta, MPFR_RNDD), MPFR_RNDD);
    return BigFloat::add_r(t1, BigFloat::div_r(num, den, MPFR_RNDU), MPFR_RNDU);
}

/// Certified bound for g on D(center, delta) on the tracked branch.
///
/// The Taylor radius is placed halfway (in radius) between delta and the
/// distance to the nearest critical point; the Fujiwara bound is evaluated
/// there. When the integrand has no critical points at all any rho > delta
/// works and a moderate one is chosen.
inline DiskBoundCertificate disk_bound(const AlgebraicIntegrand& integrand, const BigComplex& center,
                                       const BigFloat& delta, const BigComplex& g_at_center) {
    Precision wp = integrand.precision;
    BigFloat rho_min = integrand.critical_distance_lower(center);
    BigFloat rho(wp);
    if (rho_min.is_inf()) {
        rho = BigFloat(4.0, wp) * BigFloat::max(delta, center.abs_upper() + BigFloat(1.0, wp));
    } else {
        if (!(delta < rho_min)) throw GeometryError("disk contains a critical point");
        rho = BigFloat::mul_r(BigFloat::add_r(rho_min, delta, MPFR_RNDD), BigFloat(0.5, wp), MPFR_RNDD);
        if (!(rho > delta))
            throw PrecisionError("no room between disk radius and the nearest critical point");
    }
    BigFloat m_tilde = fujiwara_uniform_bound(integrand.f, integrand.a0_roots, center, rho);
    BigComplex dg = branch_derivative(integrand.f, center, g_at_center);
    BigFloat variation = taylor_variation_bound(dg, m_tilde, rho, delta);
    BigFloat absolute = BigFloat::add_r(g_at_center.abs_upper(), variation, MPFR_RNDU);
    return DiskBoundCertificate{Disk{center, delta}, rho, m_tilde, g_at_center, dg, variation, absolute};
}

/// Model bound scale * (|center - nearest_critical| - delta)^-exponent,
/// standing in for the rigorous disk bound in asymptotic studies. Rounded up.
inline BigFloat proxy_bound(const BigFloat& scale, const BigFloat& exponent,
                            const BigComplex& nearest_critical, const BigComplex& center,
                            const BigFloat& delta) {
    Precision wp = std::max(scale.prec(), delta.prec());
    BigFloat gap = BigFloat::sub_r(BigComplex::dist_lower(center, nearest_critical), delta, MPFR_RNDD);
    if (!(gap > BigFloat(0.0, wp))) throw GeometryError("proxy bound: disk reaches the critical point");
    BigFloat p = BigFloat::pow_r(gap, -exponent, MPFR_RNDU);
    return BigFloat::mul_r(scale, p, MPFR_RNDU);
}

} // namespace rig
