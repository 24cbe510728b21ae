#pragma once

#include <cstdarg>
#include <cstdio>

#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>

#include "rig/errors.hpp"

namespace rig {

using Precision = mpfr_prec_t;

constexpr Precision kMinPrecision = 53;

/// Arbitrary-precision binary float backed by MPFR.
///
/// Every value carries its own precision (>= 53 bits). Operators round to
/// nearest and give the result the larger precision of the two operands;
/// the static directed variants (`add_r`, `mul_r`, ...) take an explicit
/// MPFR rounding mode and are what the bound computations build on.
class BigFloat {
  public:
    explicit BigFloat(Precision prec = kMinPrecision) {
        mpfr_init2(v_, clamp(prec));
        mpfr_set_zero(v_, 1);
    }
    BigFloat(double d, Precision prec) {
        mpfr_init2(v_, clamp(prec));
        mpfr_set_d(v_, d, MPFR_RNDN);
    }
    BigFloat(long i, Precision prec) {
        mpfr_init2(v_, clamp(prec));
        mpfr_set_si(v_, i, MPFR_RNDN);
    }
    BigFloat(const BigFloat& o) {
        mpfr_init2(v_, o.prec());
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, kMinPrecision);
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            mpfr_set_prec(v_, o.prec());
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    /// Parses a decimal string ("1.5", "-3e-7") or exact rational ("2/3").
    static BigFloat from_string(const std::string& s, Precision prec,
                                mpfr_rnd_t rnd = MPFR_RNDN) {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            BigFloat num = from_string(s.substr(0, slash), prec + 4, rnd);
            BigFloat den = from_string(s.substr(slash + 1), prec + 4, rnd);
            if (den.is_zero()) throw ParseError("zero denominator in '" + s + "'");
            return div_r(num, den, rnd, prec);
        }
        BigFloat r(prec);
        std::string t = trim(s);
        if (t.empty() || mpfr_set_str(r.v_, t.c_str(), 10, rnd) != 0)
            throw ParseError("not a number: '" + s + "'");
        return r;
    }

    /// 2^e, exact.
    static BigFloat pow2(long e, Precision prec) {
        BigFloat r(prec);
        mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
        return r;
    }

    static BigFloat pi(Precision prec, mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(prec);
        mpfr_const_pi(r.v_, rnd);
        return r;
    }

    static BigFloat pos_inf(Precision prec = kMinPrecision) {
        BigFloat r(prec);
        mpfr_set_inf(r.v_, 1);
        return r;
    }

    Precision prec() const { return mpfr_get_prec(v_); }
    mpfr_srcptr raw() const { return v_; }
    mpfr_ptr raw() { return v_; }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_inf() const { return mpfr_inf_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

    /// Decimal string with `digits` significant digits, scientific format.
    /// Output is canonical: zero prints as "0", no negative zero.
    std::string to_string(int digits = 0) const {
        if (is_nan()) return "nan";
        if (is_inf()) return sign() > 0 ? "inf" : "-inf";
        if (is_zero()) return "0";
        if (digits <= 0) digits = static_cast<int>(static_cast<double>(prec()) * 0.30103) + 2;
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Re", digits - 1, v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

    BigFloat operator-() const {
        BigFloat r(prec());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }
    BigFloat abs() const {
        BigFloat r(prec());
        mpfr_abs(r.v_, v_, MPFR_RNDN);
        return r;
    }

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) { return add_r(a, b, MPFR_RNDN); }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) { return sub_r(a, b, MPFR_RNDN); }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) { return mul_r(a, b, MPFR_RNDN); }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) { return div_r(a, b, MPFR_RNDN); }
    BigFloat& operator+=(const BigFloat& b) { return *this = *this + b; }
    BigFloat& operator-=(const BigFloat& b) { return *this = *this - b; }
    BigFloat& operator*=(const BigFloat& b) { return *this = *this * b; }
    BigFloat& operator/=(const BigFloat& b) { return *this = *this / b; }

    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) != 0; }

    // Directed binary operations. Result precision defaults to the larger
    // operand precision; pass `prec` to override.
#define RIG_BF_BINOP(name, fn)                                                              \
    static BigFloat name(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd,              \
                         Precision prec = 0) {                                              \
        BigFloat r(prec > 0 ? prec : std::max(a.prec(), b.prec()));                        \
        fn(r.v_, a.v_, b.v_, rnd);                                                          \
        return r;                                                                           \
    }
    RIG_BF_BINOP(add_r, mpfr_add)
    RIG_BF_BINOP(sub_r, mpfr_sub)
    RIG_BF_BINOP(mul_r, mpfr_mul)
    RIG_BF_BINOP(div_r, mpfr_div)
    RIG_BF_BINOP(hypot_r, mpfr_hypot)
    RIG_BF_BINOP(atan2_r, mpfr_atan2)
    RIG_BF_BINOP(pow_r, mpfr_pow)
#undef RIG_BF_BINOP

#define RIG_BF_UNOP(name, fn)                                                               \
    static BigFloat name(const BigFloat& a, mpfr_rnd_t rnd, Precision prec = 0) {           \
        BigFloat r(prec > 0 ? prec : a.prec());                                             \
        fn(r.v_, a.v_, rnd);                                                                \
        return r;                                                                           \
    }
    RIG_BF_UNOP(sqrt_r, mpfr_sqrt)
    RIG_BF_UNOP(exp_r, mpfr_exp)
    RIG_BF_UNOP(log_r, mpfr_log)
    RIG_BF_UNOP(log2_r, mpfr_log2)
    RIG_BF_UNOP(cos_r, mpfr_cos)
    RIG_BF_UNOP(sin_r, mpfr_sin)
    RIG_BF_UNOP(cosh_r, mpfr_cosh)
    RIG_BF_UNOP(sinh_r, mpfr_sinh)
    RIG_BF_UNOP(acosh_r, mpfr_acosh)
    RIG_BF_UNOP(asinh_r, mpfr_asinh)
#undef RIG_BF_UNOP

    /// k-th root, directed.
    static BigFloat rootn_r(const BigFloat& a, unsigned long k, mpfr_rnd_t rnd) {
        BigFloat r(a.prec());
        mpfr_rootn_ui(r.v_, a.v_, k, rnd);
        return r;
    }

    /// a * 2^e, exact apart from the carried precision.
    static BigFloat ldexp(const BigFloat& a, long e) {
        BigFloat r(a.prec());
        mpfr_mul_2si(r.v_, a.v_, e, MPFR_RNDN);
        return r;
    }

    static BigFloat min(const BigFloat& a, const BigFloat& b) { return a <= b ? a : b; }
    static BigFloat max(const BigFloat& a, const BigFloat& b) { return a >= b ? a : b; }

    /// Same value re-rounded at precision p.
    static BigFloat at_precision(const BigFloat& a, Precision p, mpfr_rnd_t rnd = MPFR_RNDN) {
        BigFloat r(p);
        mpfr_set(r.raw(), a.raw(), rnd);
        return r;
    }

    /// Smallest integer >= a, as a long. Throws if out of range.
    static long ceil_long(const BigFloat& a) {
        if (a.is_nan()) throw Error("ceil of NaN");
        if (a.is_inf()) throw Error("ceil of infinity");
        BigFloat t(a.prec());
        mpfr_ceil(t.v_, a.v_);
        if (!mpfr_fits_slong_p(t.v_, MPFR_RNDN)) throw Error("integer overflow in ceil");
        return mpfr_get_si(t.v_, MPFR_RNDN);
    }

    /// Next representable value toward +inf (one ulp step).
    BigFloat next_above() const {
        BigFloat r(*this);
        mpfr_nextabove(r.v_);
        return r;
    }

    /// Exponent such that |*this| < 2^exp (0 for zero).
    long exp2_bound() const {
        if (is_zero() || !is_finite()) return 0;
        return static_cast<long>(mpfr_get_exp(v_));
    }

  private:
    static Precision clamp(Precision p) { return p < kMinPrecision ? kMinPrecision : p; }
    static std::string trim(const std::string& s) {
        size_t b = s.find_first_not_of(" \t");
        size_t e = s.find_last_not_of(" \t");
        if (b == std::string::npos) return "";
        return s.substr(b, e - b + 1);
    }

    mpfr_t v_;
};

} // namespace rig
