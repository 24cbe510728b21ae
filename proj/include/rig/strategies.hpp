#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rig/quadrature.hpp"

namespace rig {

enum class StrategyKind { main, reference };
enum class ToleranceMode { uniform, length_weighted };

/// Replaces the rigorous disk bound by scale * (dist - delta)^-exponent for
/// node-count studies; planning then needs no branch continuation.
struct ProxyBoundSpec {
    BigFloat scale;
    BigFloat exponent;
};

struct PlanSegment {
    BigComplex start;
    BigComplex end;
    BigComplex center;
    BigFloat delta;  // certified disk radius (main) / semi-major axis (reference)
    BigFloat r;      // ellipse parameter of L(start, end, r)
    BigFloat bound;  // M fed into the order formula
    BigFloat abs_bound; // |g| bound on the disk, kept for diagnostics
    BigFloat gamma;  // share of E_tol allotted to this segment
    long order = 0;  // N
};

/// One disk of the reference-strategy covering, in both coordinate systems:
/// mapped plane (path mapped onto [-1,1], where the covering is constructed
/// and verified) and the original plane (where the bound is certified).
struct CoveringDisk {
    BigFloat center_mapped;
    BigFloat radius_mapped;
    Disk disk; // original coordinates, radius rounded up over the mapped image
    BigFloat bound;
    std::optional<DiskBoundCertificate> certificate;
};

struct SegmentPlan {
    StrategyKind strategy = StrategyKind::main;
    std::vector<PlanSegment> segments;
    long total_order = 0;
    BigFloat beta;
    BigFloat e_tol;
    ToleranceMode tolerance_mode = ToleranceMode::uniform;
    // reference strategy only:
    std::vector<CoveringDisk> covering;
    BigFloat reference_r;
};

struct IntegrationReport {
    BigComplex value;
    SegmentPlan plan;
    BigFloat error_budget;
    long precision_bits = 0;
    long node_evaluations = 0;
    std::vector<BigComplex> per_segment_values;
};

inline long cost(const SegmentPlan& plan) { return plan.total_order; }

namespace detail {

// Ellipse parameter cap used when no critical point constrains the geometry
// (cosh(1.76) < 3, keeping the disk radius below 3x the half-length).
inline BigFloat r_cap(Precision wp) { return BigFloat(1.76, wp); }

struct MainSegmentGeometry {
    BigComplex center;
    BigFloat half_length; // delta_min
    BigFloat rho;         // distance to the nearest critical point (inf if none)
    BigFloat delta;
    BigFloat r;
    bool needs_split = false;
};

/// Geometry rule of the main strategy for one candidate segment: split while
/// beta * rho <= half-length, else take delta = beta * rho (or the capped
/// ellipse when no critical point exists) and r = acosh(2 delta / length).
inline MainSegmentGeometry main_segment_geometry(const AlgebraicIntegrand& ig,
                                                 const BigComplex& start, const BigComplex& end,
                                                 const BigFloat& beta) {
    Precision wp = ig.precision;
    MainSegmentGeometry g;
    g.center = (start + end) * BigFloat(0.5, wp);
    BigFloat len = BigComplex::dist_upper(end, start);
    g.half_length = BigFloat::ldexp(len, -1);
    g.rho = ig.critical_distance_lower(g.center);
    if (g.rho.is_inf()) {
        g.delta = g.half_length * BigFloat::cosh_r(r_cap(wp), MPFR_RNDD);
        g.r = r_cap(wp);
        return g;
    }
    g.delta = BigFloat::mul_r(beta, g.rho, MPFR_RNDD);
    if (!(g.delta > g.half_length)) {
        g.needs_split = true;
        return g;
    }
    BigFloat arg = BigFloat::div_r(BigFloat::ldexp(g.delta, 1), len, MPFR_RNDD);
    g.r = BigFloat::acosh_r(arg, MPFR_RNDD);
    if (!(g.r > BigFloat(0.0, wp)))
        throw PrecisionError("ellipse parameter underflow while planning");
    return g;
}

inline void require_path_clear(const AlgebraicIntegrand& ig, const BigComplex& z1,
                               const BigComplex& z2) {
    Precision wp = ig.precision;
    BigComplex span = z2 - z1;
    BigFloat len2 = span.norm();
    if (len2.is_zero()) throw GeometryError("degenerate path: endpoints coincide");
    BigFloat tol = BigFloat::ldexp(BigFloat(1.0, wp) + BigFloat::max(z1.abs(), z2.abs()),
                                   -(static_cast<long>(wp) / 2));
    for (const auto& c : ig.critical_points) {
        // Projection parameter of c onto the segment, clamped to [0,1].
        BigComplex d = c - z1;
        BigFloat t = (d.re() * span.re() + d.im() * span.im()) / len2;
        t = BigFloat::max(BigFloat(0.0, wp), BigFloat::min(BigFloat(1.0, wp), t));
        BigComplex nearest = z1 + span * t;
        if (BigComplex::dist_upper(c, nearest) <= tol)
            throw GeometryError("critical point on or numerically touching the path at z = " +
                                c.to_string(8));
    }
}

inline BigFloat mapped_min_critical_distance(const std::vector<BigComplex>& mapped_criticals,
                                             const BigFloat& x, Precision wp) {
    BigFloat d = BigFloat::pos_inf(wp);
    BigComplex p(x, BigFloat(0.0, wp));
    for (const auto& c : mapped_criticals) d = BigFloat::min(d, BigComplex::dist_lower(p, c));
    return d;
}

} // namespace detail

/// Main strategy: adaptively bisect [z_1, z_2] until every segment fits in a
/// certified disk around its midpoint (beta * rho > half-length), then pick
/// per-segment ellipses, bounds and orders so the per-segment tolerances
/// gamma_j E_tol sum to at most E_tol.
inline SegmentPlan plan_main(const AlgebraicIntegrand& integrand, const BigComplex& z1,
                             const BigComplex& z2, const BigFloat& e_tol,
                             const BigFloat& beta, ToleranceMode tolerance_mode,
                             const std::optional<ProxyBoundSpec>& proxy = std::nullopt) {
    Precision wp = integrand.precision;
    if (!(beta > BigFloat(0.0, wp)) || !(beta < BigFloat(1.0, wp)))
        throw Error("beta must lie in (0,1)");
    if (!(e_tol > BigFloat(0.0, wp))) throw Error("E_tol must be positive");
    detail::require_path_clear(integrand, z1, z2);

    constexpr int kDepthCap = 60;
    struct Item {
        BigComplex start, end;
        int depth;
    };
    std::vector<Item> stack{{BigComplex::at_precision(z1, wp), BigComplex::at_precision(z2, wp), 0}};
    std::vector<std::pair<Item, detail::MainSegmentGeometry>> accepted;
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        auto geom = detail::main_segment_geometry(integrand, it.start, it.end, beta);
        if (geom.needs_split) {
            if (it.depth >= kDepthCap)
                throw GeometryError("critical point too close to the path: bisection depth cap reached");
            stack.push_back({geom.center, it.end, it.depth + 1});
            stack.push_back({it.start, geom.center, it.depth + 1});
            continue;
        }
        accepted.push_back({it, geom});
    }
    // Depth-first with left child pushed last keeps segments path-ordered.

    size_t m = accepted.size();
    std::vector<BigComplex> center_values;
    if (!proxy) {
        std::vector<BigComplex> centers;
        centers.reserve(m);
        for (const auto& [it, geom] : accepted) centers.push_back(geom.center);
        center_values = continue_branch(integrand, centers);
    }

    BigFloat total_len(0.0, wp);
    for (const auto& [it, geom] : accepted)
        total_len = BigFloat::add_r(total_len, BigComplex::dist_upper(it.end, it.start), MPFR_RNDU);

    SegmentPlan plan;
    plan.strategy = StrategyKind::main;
    plan.beta = beta;
    plan.e_tol = e_tol;
    plan.tolerance_mode = tolerance_mode;
    plan.reference_r = BigFloat(0.0, wp);
    long total = 0;
    for (size_t j = 0; j < m; ++j) {
        const auto& [it, geom] = accepted[j];
        PlanSegment seg;
        seg.start = it.start;
        seg.end = it.end;
        seg.center = geom.center;
        seg.delta = geom.delta;
        seg.r = geom.r;
        if (proxy) {
            auto nearest = integrand.nearest_critical(geom.center);
            if (!nearest) throw Error("proxy bound mode needs at least one critical point");
            seg.bound = proxy_bound(proxy->scale, proxy->exponent, *nearest, geom.center, geom.delta);
            seg.abs_bound = seg.bound;
        } else {
            DiskBoundCertificate cert = disk_bound(integrand, geom.center, geom.delta, center_values[j]);
            seg.bound = cert.variation_bound;
            seg.abs_bound = cert.absolute_bound;
        }
        BigFloat len = BigComplex::dist_upper(it.end, it.start);
        seg.gamma = tolerance_mode == ToleranceMode::uniform
                        ? BigFloat::div_r(BigFloat(1.0, wp), BigFloat(static_cast<long>(m), wp), MPFR_RNDD)
                        : BigFloat::div_r(BigComplex::dist_lower(it.end, it.start), total_len, MPFR_RNDD);
        seg.order = required_order(seg.bound, seg.r, len, BigFloat::mul_r(seg.gamma, e_tol, MPFR_RNDD));
        total += seg.order;
        plan.segments.push_back(std::move(seg));
    }
    plan.total_order = total;
    return plan;
}

/// Reference strategy: one (possibly very eccentric) ellipse around the
/// whole path, bounded through a greedy covering by certified disks swept
/// along the real axis of the mapped plane. Multiple disks force absolute
/// bounds; a single covering disk admits the sharper variation bound.
inline SegmentPlan plan_reference(const AlgebraicIntegrand& integrand, const BigComplex& z1,
                                  const BigComplex& z2, const BigFloat& e_tol,
                                  const BigFloat& beta, const BigFloat& epsilon,
                                  const std::optional<ProxyBoundSpec>& proxy = std::nullopt) {
    Precision wp = integrand.precision;
    if (!(beta > BigFloat(0.0, wp)) || !(beta < BigFloat(1.0, wp)))
        throw Error("beta must lie in (0,1)");
    if (!(epsilon > BigFloat(0.0, wp)) || !(epsilon < BigFloat(1.0, wp)))
        throw Error("epsilon must lie in (0,1)");
    if (!(e_tol > BigFloat(0.0, wp))) throw Error("E_tol must be positive");
    detail::require_path_clear(integrand, z1, z2);

    BigComplex a = BigComplex::at_precision(z1, wp);
    BigComplex b = BigComplex::at_precision(z2, wp);
    BigComplex mid = (a + b) * BigFloat(0.5, wp);
    BigComplex halfspan = (b - a) * BigFloat(0.5, wp);
    BigFloat halfspan_len_u = halfspan.abs_upper();

    std::vector<BigComplex> mapped;
    mapped.reserve(integrand.critical_points.size());
    for (const auto& c : integrand.critical_points) mapped.push_back((c - mid) / halfspan);

    // Step 1: the ellipse parameter from the nearest critical point in the
    // mapped plane, shrunk by epsilon; the cap only applies when nothing
    // constrains the ellipse.
    BigComplex wone = BigComplex::one(wp);
    BigFloat r = mapped.empty() ? detail::r_cap(wp) : BigFloat::pos_inf(wp);
    for (const auto& c : mapped) {
        BigFloat s = BigFloat::ldexp(BigFloat::add_r(BigComplex::dist_lower(c, wone),
                                                     BigComplex::dist_lower(c, -wone), MPFR_RNDD),
                                     -1);
        if (!(s > BigFloat(1.0, wp)))
            throw GeometryError("critical point numerically on the path");
        BigFloat rc = BigFloat::mul_r(BigFloat::sub_r(BigFloat(1.0, wp), epsilon, MPFR_RNDD),
                                      BigFloat::acosh_r(s, MPFR_RNDD), MPFR_RNDD);
        r = BigFloat::min(r, rc);
    }

    // Step 2: greedy left-to-right covering of L(-1,1,r) by disks centered on
    // the real axis; each disk of radius delta covers the vertical slab of
    // half-width sqrt(delta^2 - b^2) because |Im| <= sinh(r) on the ellipse.
    std::vector<std::pair<BigFloat, BigFloat>> disks_w; // (center, radius), mapped plane
    bool no_criticals = mapped.empty();
    const BigFloat zero(0.0, wp);
    for (int attempt = 0;; ++attempt) {
        if (attempt > 500 || !(r > BigFloat::pow2(-(static_cast<long>(wp) / 2), wp)))
            throw GeometryError("reference covering failed: could not fit disks between the ellipse "
                                "and the critical points");
        BigFloat cosh_r = BigFloat::cosh_r(r, MPFR_RNDU);
        BigFloat sinh_r = BigFloat::sinh_r(r, MPFR_RNDU);
        disks_w.clear();
        if (no_criticals) {
            disks_w.push_back({zero, BigFloat::ldexp(cosh_r, 1)});
            break;
        }
        auto delta_at = [&](const BigFloat& x) {
            return BigFloat::mul_r(beta, detail::mapped_min_critical_distance(mapped, x, wp), MPFR_RNDD);
        };
        BigFloat frontier = -cosh_r;
        bool ok = true;
        while (frontier < cosh_r) {
            BigFloat d_f = delta_at(frontier);
            if (!(d_f > sinh_r)) {
                ok = false;
                break;
            }
            auto coverage_short = [&](const BigFloat& c) {
                // phi(c) = c - sqrt(delta(c)^2 - b^2) - frontier, with
                // phi <= 0 meaning the disk at c still covers the frontier.
                BigFloat dc = delta_at(c);
                if (!(dc > sinh_r)) return true; // cannot even span the slab height
                BigFloat w = BigFloat::sqrt_r(
                    BigFloat::sub_r(BigFloat::mul_r(dc, dc, MPFR_RNDD),
                                    BigFloat::mul_r(sinh_r, sinh_r, MPFR_RNDU), MPFR_RNDD),
                    MPFR_RNDD);
                return BigFloat::sub_r(c, w, MPFR_RNDU) > frontier;
            };
            BigFloat lo = frontier;
            BigFloat hi = frontier + BigFloat(2.0, wp);
            if (!coverage_short(hi)) {
                lo = hi;
            } else {
                for (int it = 0; it < 80; ++it) {
                    BigFloat mid_c = BigFloat::ldexp(lo + hi, -1);
                    if (coverage_short(mid_c)) hi = mid_c;
                    else lo = mid_c;
                }
            }
            BigFloat dc = delta_at(lo);
            BigFloat w = BigFloat::sqrt_r(
                BigFloat::sub_r(BigFloat::mul_r(dc, dc, MPFR_RNDD),
                                BigFloat::mul_r(sinh_r, sinh_r, MPFR_RNDU), MPFR_RNDD),
                MPFR_RNDD);
            BigFloat advance = BigFloat::add_r(lo, w, MPFR_RNDD);
            if (!(advance > frontier + BigFloat::ldexp(BigFloat::max(BigFloat(1.0, wp), cosh_r), -30)) ||
                disks_w.size() > 20000) {
                ok = false;
                break;
            }
            disks_w.push_back({lo, dc});
            frontier = advance;
        }
        if (ok) break;
        r = BigFloat::mul_r(r, BigFloat(0.9, wp), MPFR_RNDD);
    }

    // Bound per disk in the original plane (image disks, radius rounded up).
    SegmentPlan plan;
    plan.strategy = StrategyKind::reference;
    plan.beta = beta;
    plan.e_tol = e_tol;
    plan.reference_r = r;
    std::vector<BigComplex> centers_z;
    centers_z.reserve(disks_w.size());
    for (const auto& [cw, dw] : disks_w) centers_z.push_back(mid + halfspan * cw);
    std::vector<BigComplex> center_values;
    if (!proxy) center_values = continue_branch(integrand, centers_z);

    BigFloat big_m(0.0, wp);
    for (size_t j = 0; j < disks_w.size(); ++j) {
        CoveringDisk cd;
        cd.center_mapped = disks_w[j].first;
        cd.radius_mapped = disks_w[j].second;
        BigFloat radius_z = BigFloat::mul_r(disks_w[j].second, halfspan_len_u, MPFR_RNDU);
        cd.disk = Disk{centers_z[j], radius_z};
        if (proxy) {
            auto nearest = integrand.nearest_critical(centers_z[j]);
            if (!nearest) throw Error("proxy bound mode needs at least one critical point");
            cd.bound = proxy_bound(proxy->scale, proxy->exponent, *nearest, centers_z[j], radius_z);
        } else {
            DiskBoundCertificate cert = disk_bound(integrand, centers_z[j], radius_z, center_values[j]);
            // Across several disks only the absolute bounds compose; with a
            // single disk covering the whole ellipse the variation suffices.
            cd.bound = disks_w.size() == 1 ? cert.variation_bound : cert.absolute_bound;
            cd.certificate = std::move(cert);
        }
        big_m = BigFloat::max(big_m, cd.bound);
        plan.covering.push_back(std::move(cd));
    }

    BigFloat chord = BigComplex::dist_upper(b, a);
    PlanSegment seg;
    seg.start = a;
    seg.end = b;
    seg.center = mid;
    seg.delta = BigFloat::mul_r(BigFloat::cosh_r(r, MPFR_RNDU), BigFloat::ldexp(chord, -1), MPFR_RNDU);
    seg.r = r;
    seg.bound = big_m;
    seg.abs_bound = big_m;
    seg.gamma = BigFloat(1.0, wp);
    seg.order = required_order(big_m, r, chord, e_tol);
    plan.total_order = seg.order;
    plan.segments.push_back(std::move(seg));
    return plan;
}

/// Runs the quadratures of a plan and sums them. The branch is continued to
/// every segment start once, sequentially; the per-segment quadratures then
/// only ever track within their own segment.
inline IntegrationReport execute(const SegmentPlan& plan, const AlgebraicIntegrand& integrand) {
    Precision wp = integrand.precision;
    long total = plan.total_order;
    long guard = 30 + BigFloat::ceil_long(
                          BigFloat::log2_r(BigFloat(std::max(total, 2L), kMinPrecision), MPFR_RNDU));
    long p_exec = BigFloat::ceil_long(-BigFloat::log2_r(plan.e_tol, MPFR_RNDN)) + guard;
    Precision exec_prec = static_cast<Precision>(std::max<long>(p_exec, kMinPrecision));

    std::vector<BigComplex> starts;
    starts.reserve(plan.segments.size());
    for (const auto& seg : plan.segments) starts.push_back(seg.start);
    std::vector<BigComplex> start_values = continue_branch(integrand, starts);

    std::map<long, QuadratureScheme> schemes;
    BigComplex value = BigComplex::zero(exec_prec);
    std::vector<BigComplex> per_segment;
    per_segment.reserve(plan.segments.size());
    for (size_t j = 0; j < plan.segments.size(); ++j) {
        const auto& seg = plan.segments[j];
        auto it = schemes.find(seg.order);
        if (it == schemes.end())
            it = schemes.emplace(seg.order, legendre_scheme(seg.order, exec_prec)).first;
        AlgebraicIntegrand local{integrand.f, seg.start, start_values[j], integrand.a0_roots,
                                 integrand.critical_points, wp};
        BigComplex v = integrate_segment(local, seg.start, seg.end, it->second);
        value += BigComplex::at_precision(v, exec_prec);
        per_segment.push_back(std::move(v));
    }

    BigFloat budget(0.0, wp);
    for (const auto& seg : plan.segments)
        budget = BigFloat::add_r(budget, BigFloat::mul_r(seg.gamma, plan.e_tol, MPFR_RNDD), MPFR_RNDU);

    IntegrationReport report;
    report.value = value;
    report.plan = plan;
    report.error_budget = budget;
    report.precision_bits = p_exec;
    report.node_evaluations = total;
    report.per_segment_values = std::move(per_segment);
    return report;
}

} // namespace rig
