#pragma once

#include <optional>
#include <vector>

#include "rig/roots.hpp"

namespace rig {

/// An algebraic function g(z) pinned down by its defining polynomial, an
/// anchor point and the branch value there. Critical points collect the
/// roots of a_0 (pole candidates) and of the g-discriminant (branch point
/// candidates); continuation and the disk bounds must stay away from both.
struct AlgebraicIntegrand {
    BivariateDefiningPolynomial f;
    BigComplex anchor;
    BigComplex branch_value;
    std::vector<BigComplex> a0_roots;        // roots of a_0(z), with multiplicity
    std::vector<BigComplex> critical_points; // a0_roots united with discriminant roots, deduped
    Precision precision;

    /// Smallest certified distance from `z` to any critical point
    /// (+inf when there are none).
    BigFloat critical_distance_lower(const BigComplex& z) const {
        BigFloat d = BigFloat::pos_inf(precision);
        for (const auto& c : critical_points) d = BigFloat::min(d, BigComplex::dist_lower(z, c));
        return d;
    }

    std::optional<BigComplex> nearest_critical(const BigComplex& z) const {
        std::optional<BigComplex> best;
        BigFloat bd = BigFloat::pos_inf(precision);
        for (const auto& c : critical_points) {
            BigFloat d = BigComplex::dist_lower(z, c);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        return best;
    }
};

/// g'(z) by implicit differentiation: -f_z(z,g) / f_g(z,g).
/// Throws GeometryError when f_g vanishes at working tolerance (the point is
/// numerically a critical point and the branch derivative is undefined).
inline BigComplex branch_derivative(const BivariateDefiningPolynomial& f, const BigComplex& z,
                                    const BigComplex& g) {
    Precision wp = std::max(z.prec(), g.prec());
    BigComplex fg = f.eval_dg(z, g);
    // Scale of the dg coefficients at (z, g): degree-weighted Horner of |a_i|.
    BigFloat scale(0.0, wp);
    BigFloat gz = BigFloat::max(BigFloat(1.0, wp), g.abs_upper());
    long n = f.degree_g();
    for (long i = 0; i < n; ++i) {
        BigFloat t = f.a(static_cast<size_t>(i)).eval(z).abs_upper() * BigFloat(n - i, wp);
        BigFloat powg = BigFloat::pow_r(gz, BigFloat(n - 1 - i, wp), MPFR_RNDU);
        scale = BigFloat::max(scale, t * powg);
    }
    if (fg.abs_upper() <= BigFloat::ldexp(BigFloat::max(scale, BigFloat(1.0, wp)), -(wp - 16)))
        throw GeometryError("critical point encountered: df/dg vanishes at z = " + z.to_string(8));
    return -(f.eval_dz(z, g) / fg);
}

namespace detail {

inline void dedup_points(std::vector<BigComplex>& pts, Precision prec) {
    std::vector<BigComplex> out;
    for (const auto& p : pts) {
        bool dup = false;
        for (const auto& q : out) {
            BigFloat tol = BigFloat::ldexp(BigFloat(1.0, prec) + q.abs(), -static_cast<long>(prec) / 4);
            if (BigComplex::dist_upper(p, q) <= tol) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(p);
    }
    pts = std::move(out);
}

/// Tracks all n roots of f(z, .) along a straight line, keeping the index of
/// the branch of interest. A step is accepted when the tracked root's Newton
/// corrections halve twice in a row and stay within a quarter of its
/// isolation radius; otherwise the step is halved.
class BranchTracker {
  public:
    BranchTracker(const AlgebraicIntegrand& integrand, Precision wp)
        : ig_(integrand), wp_(wp), z_(BigComplex::at_precision(integrand.anchor, wp)) {
        UnivariatePolynomial slice = ig_.f.slice_at(z_);
        if (slice.degree() != ig_.f.degree_g())
            throw GeometryError("leading coefficient vanishes at the anchor");
        roots_ = poly_roots(slice, wp_);
        // Identify the tracked branch as the unique closest root.
        BigFloat best = BigFloat::pos_inf(wp_), second = BigFloat::pos_inf(wp_);
        for (size_t k = 0; k < roots_.size(); ++k) {
            BigFloat d = BigComplex::dist_upper(roots_[k], ig_.branch_value);
            if (d < best) {
                second = best;
                best = d;
                tracked_ = k;
            } else if (d < second) {
                second = d;
            }
        }
        if (roots_.size() > 1 && !(best < second * BigFloat(0.5, wp_)))
            throw GeometryError("ambiguous branch selection at the anchor");
    }

    const BigComplex& position() const { return z_; }
    const BigComplex& value() const { return roots_[tracked_]; }

    /// Minimum distance from the tracked root to the other roots.
    BigFloat isolation() const {
        BigFloat iso = BigFloat::pos_inf(wp_);
        for (size_t j = 0; j < roots_.size(); ++j)
            if (j != tracked_) iso = BigFloat::min(iso, BigComplex::dist_lower(roots_[tracked_], roots_[j]));
        return iso;
    }

    /// Moves the tracker to `target` (colinear with the current position by
    /// the caller's contract), adaptively stepping.
    void advance_to(const BigComplex& target) {
        BigComplex goal = BigComplex::at_precision(target, wp_);
        BigFloat step_fraction(1.0, wp_);
        for (long guard = 0; guard < 200000; ++guard) {
            BigComplex remaining = goal - z_;
            BigFloat rem_len = remaining.abs();
            if (rem_len.is_zero()) return;
            // Keep steps comfortably inside the critical-point-free zone.
            BigFloat clear_cap = ig_.critical_distance_lower(z_) * BigFloat(0.5, wp_);
            BigFloat len = BigFloat::min(rem_len * step_fraction, clear_cap);
            if (!(len > BigFloat(0.0, wp_)))
                throw ConvergenceError("branch tracking failed near z = " + z_.to_string(8));
            BigComplex z_next = (len >= rem_len) ? goal : z_ + remaining * (len / rem_len);
            if (try_step(z_next)) {
                if (len < rem_len) {
                    // Grow back toward full steps after a success.
                    step_fraction = BigFloat::min(BigFloat(1.0, wp_), step_fraction * BigFloat(2.0, wp_));
                }
            } else {
                step_fraction = step_fraction * BigFloat(0.5, wp_);
                BigFloat floor = BigFloat::ldexp(BigFloat(1.0, wp_) + z_.abs(), -(wp_ - 8));
                if (rem_len * step_fraction < floor)
                    throw ConvergenceError("branch tracking failed near z = " + z_.to_string(8) +
                                           ": step size underflow (roots not separable at this precision)");
            }
        }
        throw ConvergenceError("branch tracking stalled near z = " + z_.to_string(8));
    }

  private:
    bool try_step(const BigComplex& z_next) {
        std::vector<BigComplex> next = roots_;
        BigComplex h = z_next - z_;

        // Tangent predictor for the tracked branch when the derivative exists:
        // g' = -f_z/f_g, so pred = g - h f_z/f_g.
        BigComplex pred = roots_[tracked_];
        {
            BigComplex fg = ig_.f.eval_dg(z_, roots_[tracked_]);
            if (!fg.is_zero()) pred = pred - h * (ig_.f.eval_dz(z_, roots_[tracked_]) / fg);
        }
        next[tracked_] = pred;

        BigFloat iso = BigFloat::pos_inf(wp_);
        for (size_t j = 0; j < next.size(); ++j)
            if (j != tracked_) iso = BigFloat::min(iso, BigComplex::dist_lower(pred, next[j]));

        // Correct every root by Newton on f(z_next, .).
        bool tracked_ok = false;
        BigFloat tracked_total(0.0, wp_);
        for (size_t k = 0; k < next.size(); ++k) {
            BigFloat total(0.0, wp_);
            BigFloat prev_corr = BigFloat::pos_inf(wp_);
            int contractions = 0;
            bool converged = false;
            BigComplex g = next[k];
            BigFloat tiny = BigFloat::ldexp(BigFloat(1.0, wp_) + g.abs(), -(wp_ - 8));
            for (int it = 0; it < 64; ++it) {
                BigComplex fv = ig_.f.eval(z_next, g);
                BigComplex fg = ig_.f.eval_dg(z_next, g);
                if (fg.is_zero()) break;
                BigComplex corr = fv / fg;
                BigFloat clen = corr.abs();
                g = g - corr;
                total += clen;
                if (clen <= tiny) {
                    // Hitting the noise floor counts as (super-)contraction.
                    if (prev_corr.is_inf() || clen <= prev_corr * BigFloat(0.5, wp_)) contractions += 2;
                    converged = true;
                    break;
                }
                if (!prev_corr.is_inf()) {
                    if (clen <= prev_corr * BigFloat(0.5, wp_)) ++contractions;
                    else contractions = 0;
                }
                prev_corr = clen;
                tiny = BigFloat::ldexp(BigFloat(1.0, wp_) + g.abs(), -(wp_ - 8));
            }
            next[k] = g;
            if (k == tracked_) {
                tracked_total = total;
                tracked_ok = converged && contractions >= 2;
            }
        }
        if (!tracked_ok) return false;
        if (!(tracked_total < iso * BigFloat(0.25, wp_))) return false;

        // The corrected roots must stay pairwise separated around the track.
        for (size_t j = 0; j < next.size(); ++j) {
            if (j == tracked_) continue;
            BigFloat d = BigComplex::dist_lower(next[tracked_], next[j]);
            if (d <= tiny_scale(next[tracked_]) * BigFloat(16.0, wp_)) return false;
        }
        z_ = z_next;
        roots_ = std::move(next);
        return true;
    }

    BigFloat tiny_scale(const BigComplex& g) const {
        return BigFloat::ldexp(BigFloat(1.0, wp_) + g.abs(), -(wp_ - 10));
    }

    const AlgebraicIntegrand& ig_;
    Precision wp_;
    BigComplex z_;
    std::vector<BigComplex> roots_;
    size_t tracked_ = 0;
};

} // namespace detail

/// Builds an integrand: finds critical points (roots of a_0 and of the
/// g-discriminant), snaps the approximate branch value onto the closest root
/// of f(anchor, .) and verifies the selection is unambiguous.
inline AlgebraicIntegrand make_integrand(BivariateDefiningPolynomial f, const BigComplex& anchor,
                                         const BigComplex& approx_branch_value, Precision precision) {
    std::vector<BigComplex> a0_roots;
    if (f.a(0).degree() >= 1) a0_roots = poly_roots(f.a(0), precision);

    std::vector<BigComplex> critical = a0_roots;
    if (f.degree_g() >= 2) {
        UnivariatePolynomial disc = discriminant_resultant(f, precision);
        if (disc.degree() >= 1) {
            auto dr = poly_roots(disc, precision);
            critical.insert(critical.end(), dr.begin(), dr.end());
        }
    }
    detail::dedup_points(critical, precision);

    UnivariatePolynomial slice = f.slice_at(anchor);
    if (slice.degree() != f.degree_g())
        throw GeometryError("leading coefficient vanishes at the anchor");
    std::vector<BigComplex> roots = poly_roots(slice, precision);
    size_t best_k = 0;
    BigFloat best = BigFloat::pos_inf(precision), second = BigFloat::pos_inf(precision);
    for (size_t k = 0; k < roots.size(); ++k) {
        BigFloat d = BigComplex::dist_upper(roots[k], approx_branch_value);
        if (d < best) {
            second = best;
            best = d;
            best_k = k;
        } else if (d < second) {
            second = d;
        }
    }
    if (roots.size() > 1 && !(best < second * BigFloat(0.5, precision)))
        throw GeometryError("ambiguous branch selection: branch_value is not strictly closest to one root");
    BigComplex bv = roots[best_k];

    // Residual check per the anchor invariant (guard-digit slack vs poly_roots).
    BigFloat tol = root_residual_bound(slice, bv, precision - 10);
    if (!(f.eval(anchor, bv).abs_upper() < tol))
        throw PrecisionError("branch value residual too large at the anchor");

    return AlgebraicIntegrand{std::move(f), anchor, bv, std::move(a0_roots), std::move(critical), precision};
}

/// Continues the branch from the integrand's anchor to each target in order.
/// Targets must lie on one line through the anchor and be sorted by position
/// along it; the swept span must be free of critical points.
inline std::vector<BigComplex> continue_branch(const AlgebraicIntegrand& integrand,
                                               const std::vector<BigComplex>& targets) {
    std::vector<BigComplex> out;
    if (targets.empty()) return out;
    detail::BranchTracker tracker(integrand, integrand.precision);
    out.reserve(targets.size());
    for (const auto& t : targets) {
        tracker.advance_to(t);
        // Returned values must clear the poly_roots residual bound at t.
        UnivariatePolynomial slice = integrand.f.slice_at(tracker.position());
        if (!(integrand.f.eval(tracker.position(), tracker.value()).abs_upper() <=
              root_residual_bound(slice, tracker.value(), integrand.precision)))
            throw ConvergenceError("branch tracking lost accuracy near z = " + t.to_string(8));
        out.push_back(tracker.value());
    }
    return out;
}

} // namespace rig
