#pragma once

#include <string>
#include <utility>

#include "rig/bigfloat.hpp"

namespace rig {

/// Complex number with arbitrary-precision real and imaginary parts.
///
/// Both parts share one precision (the larger of the two at construction).
/// Arithmetic rounds to nearest; results carry the max precision of the
/// operands. Directed magnitude helpers (`abs_upper`, `dist_lower`, ...)
/// provide the certified one-sided values the bound computations need.
class BigComplex {
  public:
    explicit BigComplex(Precision prec = kMinPrecision) : re_(prec), im_(prec) {}
    BigComplex(BigFloat re, BigFloat im) : re_(std::move(re)), im_(std::move(im)) {
        Precision p = std::max(re_.prec(), im_.prec());
        if (re_.prec() != p) re_ = at_prec(re_, p);
        if (im_.prec() != p) im_ = at_prec(im_, p);
    }
    BigComplex(double re, double im, Precision prec) : re_(re, prec), im_(im, prec) {}
    explicit BigComplex(const BigFloat& re) : re_(re), im_(BigFloat(0.0, re.prec())) {}

    static BigComplex zero(Precision prec) { return BigComplex(prec); }
    static BigComplex one(Precision prec) { return BigComplex(1.0, 0.0, prec); }
    static BigComplex i(Precision prec) { return BigComplex(0.0, 1.0, prec); }

    const BigFloat& re() const { return re_; }
    const BigFloat& im() const { return im_; }
    Precision prec() const { return re_.prec(); }

    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_finite() const { return re_.is_finite() && im_.is_finite(); }

    BigComplex conj() const { return BigComplex(re_, -im_); }
    BigComplex operator-() const { return BigComplex(-re_, -im_); }

    friend BigComplex operator+(const BigComplex& a, const BigComplex& b) {
        return BigComplex(a.re_ + b.re_, a.im_ + b.im_);
    }
    friend BigComplex operator-(const BigComplex& a, const BigComplex& b) {
        return BigComplex(a.re_ - b.re_, a.im_ - b.im_);
    }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
        return BigComplex(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
    }
    friend BigComplex operator*(const BigComplex& a, const BigFloat& s) {
        return BigComplex(a.re_ * s, a.im_ * s);
    }
    friend BigComplex operator*(const BigFloat& s, const BigComplex& a) { return a * s; }
    friend BigComplex operator/(const BigComplex& a, const BigFloat& s) {
        return BigComplex(a.re_ / s, a.im_ / s);
    }
    friend BigComplex operator/(const BigComplex& a, const BigComplex& b) {
        BigFloat d = b.re_ * b.re_ + b.im_ * b.im_;
        return BigComplex((a.re_ * b.re_ + a.im_ * b.im_) / d,
                          (a.im_ * b.re_ - a.re_ * b.im_) / d);
    }
    BigComplex& operator+=(const BigComplex& b) { return *this = *this + b; }
    BigComplex& operator-=(const BigComplex& b) { return *this = *this - b; }
    BigComplex& operator*=(const BigComplex& b) { return *this = *this * b; }
    BigComplex& operator/=(const BigComplex& b) { return *this = *this / b; }

    friend bool operator==(const BigComplex& a, const BigComplex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const BigComplex& a, const BigComplex& b) { return !(a == b); }

    /// |z|, round-to-nearest.
    BigFloat abs() const { return BigFloat::hypot_r(re_, im_, MPFR_RNDN); }
    /// |z|^2.
    BigFloat norm() const { return re_ * re_ + im_ * im_; }
    /// Certified upper bound of |z|.
    BigFloat abs_upper() const { return BigFloat::hypot_r(re_, im_, MPFR_RNDU); }
    /// Certified lower bound of |z|.
    BigFloat abs_lower() const { return BigFloat::hypot_r(re_, im_, MPFR_RNDD); }

    /// Certified lower bound of |a - b| (parts rounded toward zero first).
    static BigFloat dist_lower(const BigComplex& a, const BigComplex& b) {
        BigFloat dr = BigFloat::sub_r(a.re_, b.re_, MPFR_RNDZ);
        BigFloat di = BigFloat::sub_r(a.im_, b.im_, MPFR_RNDZ);
        return BigFloat::hypot_r(dr, di, MPFR_RNDD);
    }
    /// Certified upper bound of |a - b| (parts rounded away from zero first).
    static BigFloat dist_upper(const BigComplex& a, const BigComplex& b) {
        BigFloat dr = BigFloat::sub_r(a.re_, b.re_, MPFR_RNDA);
        BigFloat di = BigFloat::sub_r(a.im_, b.im_, MPFR_RNDA);
        return BigFloat::hypot_r(dr, di, MPFR_RNDU);
    }

    /// Principal square root (branch cut on the negative real axis).
    BigComplex sqrt() const {
        Precision p = prec();
        if (is_zero()) return zero(p);
        BigFloat r = abs();
        // re' = sqrt((r + |x|)/2), computed on the non-cancelling side.
        BigFloat half(0.5, p);
        BigFloat t = BigFloat::sqrt_r((r + re_.abs()) * half, MPFR_RNDN);
        if (re_.sign() >= 0) {
            BigFloat im2 = im_ / (t + t);
            return BigComplex(t, im2);
        }
        BigFloat re2 = im_.abs() / (t + t);
        return im_.sign() >= 0 ? BigComplex(re2, t) : BigComplex(re2, -t);
    }

    /// Principal logarithm: log|z| + i atan2(y, x).
    BigComplex log() const {
        return BigComplex(BigFloat::log_r(abs(), MPFR_RNDN),
                          BigFloat::atan2_r(im_, re_, MPFR_RNDN));
    }

    /// Same numeric value re-rounded to precision `p`.
    static BigComplex at_precision(const BigComplex& z, Precision p) {
        return BigComplex(at_prec(z.re_, p), at_prec(z.im_, p));
    }

    std::string to_string(int digits = 0) const {
        std::string s = re_.to_string(digits);
        if (!im_.is_zero()) {
            s += (im_.sign() < 0 ? " - " : " + ") + im_.abs().to_string(digits) + "i";
        }
        return s;
    }

  private:
    static BigFloat at_prec(const BigFloat& x, Precision p) {
        BigFloat r(p);
        mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
        return r;
    }

    BigFloat re_, im_;
};

} // namespace rig
