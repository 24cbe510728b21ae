#pragma once

#include <utility>
#include <vector>

#include "rig/bounds.hpp"

namespace rig {

/// Gauss-Legendre nodes and weights of order N at a given precision.
/// Nodes are strictly increasing and exactly antisymmetric; weights are
/// positive and sum to 2.
struct QuadratureScheme {
    long order = 0;
    std::vector<BigFloat> nodes;
    std::vector<BigFloat> weights;
    Precision precision = kMinPrecision;
};

/// Elliptical region with foci z_1, z_2:
/// L(z_1,z_2,r) = { z : |z-z_1| + |z-z_2| <= cosh(r) |z_2-z_1| }.
struct Ellipse {
    BigComplex focus1;
    BigComplex focus2;
    BigFloat r;

    bool contains(const BigComplex& z) const {
        BigFloat lhs = BigComplex::dist_lower(z, focus1) + BigComplex::dist_lower(z, focus2);
        BigFloat rhs = BigFloat::cosh_r(r, MPFR_RNDN) * BigComplex::dist_upper(focus2, focus1);
        return lhs <= rhs;
    }
};

namespace detail {

/// (P_N(x), P_{N-1}(x)) by the Bonnet three-term recurrence.
inline std::pair<BigFloat, BigFloat> legendre_pair(long n, const BigFloat& x, Precision wp) {
    BigFloat prev(1.0, wp); // P_0
    BigFloat cur = x;       // P_1
    if (n == 0) return {prev, BigFloat(0.0, wp)};
    for (long k = 1; k < n; ++k) {
        BigFloat next = (BigFloat(2 * k + 1, wp) * x * cur - BigFloat(k, wp) * prev) / BigFloat(k + 1, wp);
        prev = cur;
        cur = next;
    }
    return {cur, prev};
}

inline bool legendre_node(long n, const BigFloat& seed, Precision target, Precision wp,
                          BigFloat& node, BigFloat& weight) {
    BigFloat x(wp);
    mpfr_set(x.raw(), seed.raw(), MPFR_RNDN);
    BigFloat threshold = BigFloat::pow2(-(static_cast<long>(target) + 10), wp);
    BigFloat one(1.0, wp);
    bool converged = false;
    BigFloat dp(wp);
    for (int it = 0; it < 200; ++it) {
        auto [pn, pnm1] = legendre_pair(n, x, wp);
        dp = BigFloat(n, wp) * (x * pn - pnm1) / (x * x - one);
        if (dp.is_zero()) return false;
        BigFloat delta = pn / dp;
        x -= delta;
        if (delta.abs() < threshold) {
            converged = true;
            break;
        }
    }
    if (!converged) return false;
    // One clean sweep at the final node for the weight.
    auto [pn, pnm1] = legendre_pair(n, x, wp);
    dp = BigFloat(n, wp) * (x * pn - pnm1) / (x * x - one);
    node = x;
    weight = BigFloat(2.0, wp) / ((one - x * x) * dp * dp);
    return true;
}

} // namespace detail

/// Order-N Gauss-Legendre scheme: nodes are the roots of P_N refined by
/// Newton from the cosine seeds x_i = cos(pi (i - 1/4) / (N + 1/2)), weights
/// w_i = 2 / ((1 - x_i^2) P_N'(x_i)^2). One internal precision bump is
/// attempted before giving up on a stagnating node.
inline QuadratureScheme legendre_scheme(long order, Precision precision) {
    if (order < 1) throw Error("quadrature order must be >= 1");
    if (order > 1000000) throw ConvergenceError("quadrature order too large");
    QuadratureScheme s;
    s.order = order;
    s.precision = precision;
    s.nodes.assign(static_cast<size_t>(order), BigFloat(precision));
    s.weights.assign(static_cast<size_t>(order), BigFloat(precision));

    Precision wp = precision + 30;
    BigFloat pi = BigFloat::pi(wp);
    long half = order / 2;
    for (long i = 1; i <= half; ++i) {
        BigFloat angle = pi * BigFloat(static_cast<double>(i) - 0.25, wp) /
                         BigFloat(static_cast<double>(order) + 0.5, wp);
        BigFloat seed = BigFloat::cos_r(angle, MPFR_RNDN); // descending positive nodes
        BigFloat node(wp), weight(wp);
        if (!detail::legendre_node(order, seed, precision, wp, node, weight) &&
            !detail::legendre_node(order, seed, precision, 2 * wp, node, weight))
            throw ConvergenceError("Legendre node refinement stagnated");
        // Fill symmetric pair: index order-i (positive side), i-1 (negative).
        s.nodes[static_cast<size_t>(order - i)] = node;
        s.weights[static_cast<size_t>(order - i)] = weight;
        s.nodes[static_cast<size_t>(i - 1)] = -node;
        s.weights[static_cast<size_t>(i - 1)] = weight;
    }
    if (order % 2 == 1) {
        // Middle node is exactly 0.
        BigFloat zero(0.0, wp);
        auto [pn, pnm1] = detail::legendre_pair(order, zero, wp);
        (void)pn;
        BigFloat dp = BigFloat(order, wp) * pnm1; // P_N'(0) = N (0*P_N - P_{N-1}) / (0 - 1)
        s.nodes[static_cast<size_t>(half)] = zero;
        s.weights[static_cast<size_t>(half)] = BigFloat(2.0, wp) / (dp * dp);
    }
    return s;
}

/// Bound on the order-N Gauss-Legendre error of a function holomorphic and
/// bounded by M on L(-1,1,r):
///   (pi + 64 / (15 (e^{2r} - 1))) * M / e^{2Nr}, rounded up.
inline BigFloat gl_error_bound(const BigFloat& M, const BigFloat& r, long order) {
    Precision wp = std::max<Precision>(std::max(M.prec(), r.prec()), 120);
    if (!(r > BigFloat(0.0, wp))) throw Error("gl_error_bound needs r > 0");
    if (M.is_zero() || M.sign() < 0) return BigFloat(0.0, wp);
    BigFloat e2r = BigFloat::exp_r(BigFloat::ldexp(r, 1), MPFR_RNDU);
    BigFloat den = BigFloat::mul_r(BigFloat(15.0, wp),
                                   BigFloat::sub_r(e2r, BigFloat(1.0, wp), MPFR_RNDD), MPFR_RNDD);
    BigFloat c = BigFloat::add_r(BigFloat::pi(wp, MPFR_RNDU),
                                 BigFloat::div_r(BigFloat(64.0, wp), den, MPFR_RNDU), MPFR_RNDU);
    BigFloat decay = BigFloat::exp_r(BigFloat::mul_r(BigFloat(2 * order, wp), r, MPFR_RNDD), MPFR_RNDD);
    return BigFloat::div_r(BigFloat::mul_r(c, M, MPFR_RNDU), decay, MPFR_RNDU);
}

/// Smallest N satisfying the error-bound inequality for a function bounded
/// by M on L(z_1,z_2,r) with |z_2-z_1| = chord:
///   N >= (1/2r) [ log(pi + 64/(15(e^{2r}-1))) + log M + log(chord/2) - log E_tol ].
/// Evaluated in upward-rounded arithmetic, clamped below at 1.
inline long required_order(const BigFloat& M, const BigFloat& r, const BigFloat& chord,
                           const BigFloat& e_tol) {
    Precision wp = std::max<Precision>(std::max(M.prec(), e_tol.prec()), 120);
    if (!(r > BigFloat(0.0, wp))) throw Error("required_order needs r > 0");
    if (!(chord > BigFloat(0.0, wp))) throw Error("required_order needs chord > 0");
    if (!(e_tol > BigFloat(0.0, wp))) throw Error("required_order needs E_tol > 0");
    if (M.is_zero() || M.sign() < 0) return 1;

    BigFloat e2r = BigFloat::exp_r(BigFloat::ldexp(r, 1), MPFR_RNDU);
    BigFloat den = BigFloat::mul_r(BigFloat(15.0, wp),
                                   BigFloat::sub_r(e2r, BigFloat(1.0, wp), MPFR_RNDD), MPFR_RNDD);
    BigFloat c = BigFloat::add_r(BigFloat::pi(wp, MPFR_RNDU),
                                 BigFloat::div_r(BigFloat(64.0, wp), den, MPFR_RNDU), MPFR_RNDU);
    BigFloat bracket = BigFloat::log_r(c, MPFR_RNDU);
    bracket = BigFloat::add_r(bracket, BigFloat::log_r(M, MPFR_RNDU), MPFR_RNDU);
    bracket = BigFloat::add_r(bracket, BigFloat::log_r(BigFloat::ldexp(chord, -1), MPFR_RNDU), MPFR_RNDU);
    bracket = BigFloat::sub_r(bracket, BigFloat::log_r(e_tol, MPFR_RNDD), MPFR_RNDU);
    if (!(bracket > BigFloat(0.0, wp))) return 1;
    BigFloat n = BigFloat::div_r(bracket, BigFloat::ldexp(r, 1), MPFR_RNDU);
    long result = BigFloat::ceil_long(n);
    if (result > 100000000L) throw ConvergenceError("required quadrature order is astronomically large");
    return std::max(1L, result);
}

/// Gauss-Legendre quadrature of g over [z_1, z_2]:
///   ((z_2-z_1)/2) sum_i w_i g( ((1-x_i) z_1 + (1+x_i) z_2) / 2 ),
/// with branch values obtained by continuation through the mapped nodes in
/// order along the segment. The integrand's branch must be anchored at (or
/// colinear with) the segment.
inline BigComplex integrate_segment(const AlgebraicIntegrand& integrand, const BigComplex& z1,
                                    const BigComplex& z2, const QuadratureScheme& scheme) {
    Precision wp = std::max(scheme.precision, integrand.precision);
    BigComplex a = BigComplex::at_precision(z1, wp);
    BigComplex b = BigComplex::at_precision(z2, wp);
    BigComplex mid = (a + b) * BigFloat(0.5, wp);
    BigComplex halfspan = (b - a) * BigFloat(0.5, wp);

    std::vector<BigComplex> targets;
    targets.reserve(scheme.nodes.size());
    for (const auto& x : scheme.nodes) targets.push_back(mid + halfspan * x);
    std::vector<BigComplex> values = continue_branch(integrand, targets);

    BigComplex acc = BigComplex::zero(wp);
    for (size_t i = 0; i < values.size(); ++i) acc += values[i] * scheme.weights[i];
    return acc * halfspan;
}

struct HeuristicResult {
    BigComplex value;
    long nodes_used = 0;           // total evaluations across all doublings
    BigFloat error_estimate;       // |I_2N - I_N|, non-rigorous
};

/// Node-doubling baseline: computes I_N for N = 8 * 2^k until successive
/// approximations differ by less than E_tol/10, or errors out at k = 14.
/// The returned error estimate is the last difference and carries no
/// rigorous guarantee.
inline HeuristicResult heuristic_integrate(const AlgebraicIntegrand& integrand, const BigComplex& z1,
                                           const BigComplex& z2, const BigFloat& e_tol) {
    long p = BigFloat::ceil_long(-BigFloat::log2_r(e_tol, MPFR_RNDN)) + 47;
    Precision wp = std::max<Precision>(p, integrand.precision);
    BigFloat target = BigFloat::ldexp(e_tol, 0) / BigFloat(10.0, wp);

    BigComplex prev(wp);
    long total = 0;
    for (int k = 0; k <= 14; ++k) {
        long n = 8L << k;
        QuadratureScheme scheme = legendre_scheme(n, wp);
        BigComplex cur = integrate_segment(integrand, z1, z2, scheme);
        total += n;
        if (k > 0) {
            BigFloat diff = (cur - prev).abs();
            if (diff < target) return HeuristicResult{cur, total, diff};
        }
        prev = cur;
    }
    throw ConvergenceError("heuristic integration did not converge within the doubling cap");
}

} // namespace rig
