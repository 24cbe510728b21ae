#pragma once

#include <utility>
#include <vector>

#include "rig/bigcomplex.hpp"

namespace rig {

/// Univariate polynomial with complex coefficients, stored ascending by
/// degree. Normalization strips (exactly) zero leading coefficients.
class UnivariatePolynomial {
  public:
    UnivariatePolynomial() = default;
    explicit UnivariatePolynomial(std::vector<BigComplex> coeffs)
        : coeffs_(std::move(coeffs)) {
        normalize();
    }

    static UnivariatePolynomial constant(const BigComplex& c) {
        return UnivariatePolynomial({c});
    }

    const std::vector<BigComplex>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    /// Degree; -1 for the zero polynomial.
    long degree() const { return static_cast<long>(coeffs_.size()) - 1; }

    const BigComplex& leading() const { return coeffs_.back(); }

    BigComplex eval(const BigComplex& z) const {
        if (coeffs_.empty()) return BigComplex::zero(z.prec());
        BigComplex v = coeffs_.back();
        for (size_t k = coeffs_.size() - 1; k-- > 0;) v = v * z + coeffs_[k];
        return v;
    }

    /// Value and first derivative in one Horner sweep.
    std::pair<BigComplex, BigComplex> eval_with_derivative(const BigComplex& z) const {
        if (coeffs_.empty()) return {BigComplex::zero(z.prec()), BigComplex::zero(z.prec())};
        BigComplex p = coeffs_.back();
        BigComplex dp = BigComplex::zero(z.prec());
        for (size_t k = coeffs_.size() - 1; k-- > 0;) {
            dp = dp * z + p;
            p = p * z + coeffs_[k];
        }
        return {p, dp};
    }

    UnivariatePolynomial derivative() const {
        if (coeffs_.size() <= 1) return UnivariatePolynomial();
        std::vector<BigComplex> d;
        d.reserve(coeffs_.size() - 1);
        for (size_t k = 1; k < coeffs_.size(); ++k)
            d.push_back(coeffs_[k] * BigFloat(static_cast<long>(k), coeffs_[k].prec()));
        return UnivariatePolynomial(std::move(d));
    }

    /// max_k |c_k| with the requested rounding direction.
    BigFloat max_coeff_abs(mpfr_rnd_t rnd = MPFR_RNDU) const {
        BigFloat m(0.0, kMinPrecision);
        for (const auto& c : coeffs_)
            m = BigFloat::max(m, BigFloat::hypot_r(c.re(), c.im(), rnd));
        return m;
    }

    Precision prec() const {
        Precision p = kMinPrecision;
        for (const auto& c : coeffs_) p = std::max(p, c.prec());
        return p;
    }

  private:
    void normalize() {
        while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    }

    std::vector<BigComplex> coeffs_;
};

/// Residual threshold below which `value` counts as a numerical zero of `p`
/// at `point`: 2^-(prec-20) * max|coeff| * max(1,|point|)^deg.
inline BigFloat root_residual_bound(const UnivariatePolynomial& p, const BigComplex& point,
                                    Precision prec) {
    BigFloat scale = p.max_coeff_abs(MPFR_RNDU);
    BigFloat a = BigFloat::max(BigFloat(1.0, prec), point.abs_upper());
    BigFloat an = BigFloat::pow_r(a, BigFloat(p.degree(), prec), MPFR_RNDU);
    return BigFloat::ldexp(scale * an, -(prec - 20));
}

/// Defining polynomial f(z,g) = a_0(z) g^n + ... + a_n(z). Row i holds
/// a_i(z); a_0 must be nonzero and n >= 1.
class BivariateDefiningPolynomial {
  public:
    explicit BivariateDefiningPolynomial(std::vector<UnivariatePolynomial> rows)
        : rows_(std::move(rows)) {
        if (rows_.size() < 2) throw ParseError("defining polynomial needs degree n >= 1 in g");
        if (rows_.front().is_zero())
            throw ParseError("leading coefficient a_0(z) is identically zero");
    }

    const std::vector<UnivariatePolynomial>& rows() const { return rows_; }
    const UnivariatePolynomial& a(size_t i) const { return rows_[i]; }
    /// Degree in g.
    long degree_g() const { return static_cast<long>(rows_.size()) - 1; }
    long max_degree_z() const {
        long d = 0;
        for (const auto& r : rows_) d = std::max(d, r.degree());
        return d;
    }

    /// f(z, g): Horner in g over Horner-evaluated a_i(z).
    BigComplex eval(const BigComplex& z, const BigComplex& g) const {
        BigComplex v = rows_.front().eval(z);
        for (size_t i = 1; i < rows_.size(); ++i) v = v * g + rows_[i].eval(z);
        return v;
    }

    /// df/dg (z, g).
    BigComplex eval_dg(const BigComplex& z, const BigComplex& g) const {
        long n = degree_g();
        BigComplex v = rows_.front().eval(z) * BigFloat(n, z.prec());
        for (size_t i = 1; i + 1 < rows_.size(); ++i)
            v = v * g + rows_[i].eval(z) * BigFloat(n - static_cast<long>(i), z.prec());
        return v;
    }

    /// df/dz (z, g).
    BigComplex eval_dz(const BigComplex& z, const BigComplex& g) const {
        BigComplex v = rows_.front().derivative().eval(z);
        for (size_t i = 1; i < rows_.size(); ++i)
            v = v * g + rows_[i].derivative().eval(z);
        return v;
    }

    /// f(z, .) as a univariate polynomial in g (ascending coefficients).
    UnivariatePolynomial slice_at(const BigComplex& z) const {
        std::vector<BigComplex> c;
        c.reserve(rows_.size());
        for (size_t j = 0; j < rows_.size(); ++j)
            c.push_back(rows_[rows_.size() - 1 - j].eval(z));
        return UnivariatePolynomial(std::move(c));
    }

    Precision prec() const {
        Precision p = kMinPrecision;
        for (const auto& r : rows_) p = std::max(p, r.prec());
        return p;
    }

  private:
    std::vector<UnivariatePolynomial> rows_;
};

namespace detail {

/// Determinant by LU with partial pivoting (destroys `m`).
inline BigComplex determinant(std::vector<std::vector<BigComplex>>& m, Precision prec) {
    size_t n = m.size();
    BigComplex det = BigComplex::one(prec);
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        BigFloat best = m[col][col].norm();
        for (size_t r = col + 1; r < n; ++r) {
            BigFloat v = m[r][col].norm();
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best.is_zero()) return BigComplex::zero(prec);
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = -det;
        }
        det *= m[col][col];
        for (size_t r = col + 1; r < n; ++r) {
            if (m[r][col].is_zero()) continue;
            BigComplex factor = m[r][col] / m[col][col];
            for (size_t c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
        }
    }
    return det;
}

/// Resultant of two univariate polynomials (Sylvester determinant).
inline BigComplex resultant_value(const UnivariatePolynomial& p, const UnivariatePolynomial& q,
                                  Precision prec) {
    long dp = p.degree(), dq = q.degree();
    if (dp < 0 || dq < 0) return BigComplex::zero(prec);
    if (dp == 0 && dq == 0) return BigComplex::one(prec);
    size_t n = static_cast<size_t>(dp + dq);
    std::vector<std::vector<BigComplex>> m(n, std::vector<BigComplex>(n, BigComplex::zero(prec)));
    // Rows of p coefficients (descending), shifted; then rows of q.
    for (long r = 0; r < dq; ++r)
        for (long k = 0; k <= dp; ++k) m[r][r + k] = p.coeffs()[dp - k];
    for (long r = 0; r < dp; ++r)
        for (long k = 0; k <= dq; ++k) m[dq + r][r + k] = q.coeffs()[dq - k];
    return determinant(m, prec);
}

} // namespace detail

/// Res_g(f, df/dg) as a polynomial in z, computed by sampling the numeric
/// resultant on a circle of roots of unity and inverse-DFT interpolation.
/// Coefficients below 2^-(prec/2) of the largest are treated as zero.
///
/// Throws if the resultant vanishes identically (f not squarefree in g:
/// branches coincide everywhere and tracking is meaningless).
inline UnivariatePolynomial discriminant_resultant(const BivariateDefiningPolynomial& f,
                                                   Precision prec) {
    long n = f.degree_g();
    if (n < 2) return UnivariatePolynomial(); // single branch: no discriminant locus
    Precision wp = prec + 48;
    long dmax = f.max_degree_z();
    long K = (2 * n - 1) * dmax + 1; // degree bound of the Sylvester determinant, plus one

    // f_g rows: (n - i) a_i, i = 0..n-1.
    std::vector<UnivariatePolynomial> dg_rows;
    for (long i = 0; i < n; ++i) {
        std::vector<BigComplex> c;
        for (const auto& cc : f.a(i).coeffs()) c.push_back(cc * BigFloat(n - i, wp));
        dg_rows.push_back(UnivariatePolynomial(std::move(c)));
    }

    // Sample on a rotated unit circle s_k = e^{i(theta0 + 2 pi k / K)}. If a
    // sample lands where deg_g drops the Sylvester determinant no longer
    // equals the generic-degree resultant, so rotate and start over.
    BigFloat two_pi = BigFloat::pi(wp) * BigFloat(2.0, wp);
    double theta0 = 0.377;
    std::vector<BigFloat> angles;
    std::vector<BigComplex> values;
    for (int attempt = 0; attempt < 24; ++attempt, theta0 += 0.0261) {
        angles.clear();
        values.clear();
        bool ok = true;
        for (long k = 0; k < K && ok; ++k) {
            BigFloat ang = two_pi * BigFloat(k, wp) / BigFloat(K, wp) + BigFloat(theta0, wp);
            BigComplex zk(BigFloat::cos_r(ang, MPFR_RNDN), BigFloat::sin_r(ang, MPFR_RNDN));
            UnivariatePolynomial pz = f.slice_at(zk);
            std::vector<BigComplex> qc;
            for (long j = 0; j < n; ++j) qc.push_back(dg_rows[n - 1 - j].eval(zk));
            UnivariatePolynomial qz{std::move(qc)};
            if (pz.degree() != n || qz.degree() != n - 1) {
                ok = false;
                break;
            }
            angles.push_back(ang);
            values.push_back(detail::resultant_value(pz, qz, wp));
        }
        if (ok) break;
        if (attempt == 23) throw ConvergenceError("resultant sampling kept hitting degenerate points");
    }

    // Inverse DFT on the rotated lattice: c_j = (1/K) sum_k R_k e^{-i j ang_k}.
    std::vector<BigComplex> coeffs;
    coeffs.reserve(K);
    BigFloat invK = BigFloat(1.0, wp) / BigFloat(K, wp);
    for (long j = 0; j < K; ++j) {
        BigComplex acc = BigComplex::zero(wp);
        for (long k = 0; k < K; ++k) {
            BigFloat a = -(angles[k] * BigFloat(j, wp));
            BigComplex w(BigFloat::cos_r(a, MPFR_RNDN), BigFloat::sin_r(a, MPFR_RNDN));
            acc += values[k] * w;
        }
        coeffs.push_back(acc * invK);
    }

    // Strip numerically-zero coefficients.
    BigFloat maxc(0.0, wp);
    for (const auto& c : coeffs) maxc = BigFloat::max(maxc, c.abs());
    if (maxc.is_zero())
        throw GeometryError("defining polynomial is not squarefree in g");
    BigFloat cut = BigFloat::ldexp(maxc, -static_cast<long>(prec / 2));
    for (auto& c : coeffs)
        if (c.abs() <= cut) c = BigComplex::zero(wp);
    UnivariatePolynomial result(std::move(coeffs));
    if (result.is_zero())
        throw GeometryError("defining polynomial is not squarefree in g");
    return result;
}

} // namespace rig
