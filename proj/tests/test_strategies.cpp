#include <catch2/catch_amalgamated.hpp>

#include "rig/strategies.hpp"
#include "test_support.hpp"

using rig::BigComplex;
using rig::BigFloat;
using rig::BivariateDefiningPolynomial;
using rig::SegmentPlan;
using rig::ToleranceMode;
using rig::UnivariatePolynomial;

namespace {
constexpr rig::Precision P = 192;
BigComplex c(double re, double im = 0.0) { return BigComplex(re, im, P); }
BigFloat f64(double x) { return BigFloat(x, P); }

rig::AlgebraicIntegrand pole_ig(const BigComplex& z0, rig::Precision prec = P) {
    BivariateDefiningPolynomial f{{UnivariatePolynomial({BigComplex::at_precision(-z0, prec),
                                                          BigComplex::one(prec)}),
                                   UnivariatePolynomial(),
                                   UnivariatePolynomial({-BigComplex::one(prec)})}};
    BigComplex anchor(-1.0, 0.0, prec);
    return rig::make_integrand(f, anchor,
                               BigComplex::one(prec) / (anchor - BigComplex::at_precision(z0, prec)).sqrt(),
                               prec);
}

rig::AlgebraicIntegrand identity_ig(rig::Precision prec = P) { // g = z
    BivariateDefiningPolynomial f{{UnivariatePolynomial({BigComplex::one(prec)}),
                                   UnivariatePolynomial({BigComplex::zero(prec),
                                                         -BigComplex::one(prec)})}};
    return rig::make_integrand(f, BigComplex::zero(prec), BigComplex::zero(prec), prec);
}
} // namespace

TEST_CASE("plan_main: far critical point gives a single segment") {
    auto ig = pole_ig(c(0, 3)); // distance 3 from the midpoint of [-1,1]
    auto plan = rig::plan_main(ig, c(-1), c(1), BigFloat::pow2(-100, P), f64(0.9),
                               ToleranceMode::uniform);
    CHECK(plan.segments.size() == 1);
    CHECK(plan.total_order == plan.segments[0].order);
    CHECK(plan.segments[0].gamma.to_double() == Catch::Approx(1.0));
}

TEST_CASE("plan_main: refinement sharpens as the pole approaches") {
    size_t prev_m = 0;
    for (double q : {0.1, 0.01, 0.001}) {
        auto ig = pole_ig(c(0, q));
        auto plan = rig::plan_main(ig, c(-1), c(1), BigFloat::pow2(-100, P), f64(0.9),
                                   ToleranceMode::uniform);
        CHECK(plan.segments.size() > prev_m);
        prev_m = plan.segments.size();
        // The segment under the pole is among the shortest (ties are dyadic).
        BigFloat shortest = BigFloat::pos_inf(P);
        BigFloat at_zero = BigFloat::pos_inf(P);
        for (const auto& s : plan.segments) {
            BigFloat len = (s.end - s.start).abs();
            shortest = BigFloat::min(shortest, len);
            if (s.start.re().sign() <= 0 && s.end.re().sign() >= 0) at_zero = len;
        }
        CHECK(at_zero <= shortest * f64(1.0 + 1e-12));
    }
}

TEST_CASE("plan_main: path without critical points") {
    auto ig = identity_ig();
    auto plan = rig::plan_main(ig, c(0), c(1), BigFloat::pow2(-100, P), f64(0.9),
                               ToleranceMode::uniform);
    REQUIRE(plan.segments.size() == 1);
    const auto& seg = plan.segments[0];
    // M_1 bounds the variation of the identity on the disk.
    CHECK(seg.bound >= seg.delta);
    CHECK(seg.order == rig::required_order(seg.bound, seg.r, (seg.end - seg.start).abs(),
                                           plan.e_tol));
}

TEST_CASE("splitting predicate: beta rho vs half-length") {
    // Critical point at height y above the midpoint of a length-2h segment:
    // split happens iff 0.9 * y <= h.
    for (double y : {0.5, 1.0, 2.0}) {
        for (double h : {0.4, 0.449, 0.451, 0.9, 1.8, 1.81}) {
            auto ig = pole_ig(c(0, y));
            auto geom = rig::detail::main_segment_geometry(ig, c(-h), c(h), f64(0.9));
            bool should_split = 0.9 * y <= h;
            if (std::abs(0.9 * y - h) > 1e-9) CHECK(geom.needs_split == should_split);
        }
    }
}

TEST_CASE("plan geometric soundness: per-segment ellipse fits in the disk") {
    auto ig = pole_ig(c(0.2, 0.15));
    auto plan = rig::plan_main(ig, c(-1), c(1), BigFloat::pow2(-100, P), f64(0.9),
                               ToleranceMode::uniform);
    CHECK(plan.segments.size() >= 3);
    for (const auto& seg : plan.segments) {
        BigFloat half_len = BigFloat::ldexp((seg.end - seg.start).abs(), -1);
        CHECK(seg.delta > half_len);
        CHECK(seg.r > BigFloat(0.0, P));
        // Semi-major axis condition (equality by construction, rounded down).
        CHECK(half_len * BigFloat::cosh_r(seg.r, MPFR_RNDD) <= seg.delta);
        // 32 boundary points of L(start, end, r) stay inside the disk.
        BigFloat a = BigFloat::cosh_r(seg.r, MPFR_RNDN), b = BigFloat::sinh_r(seg.r, MPFR_RNDN);
        BigComplex mid = seg.center, span = (seg.end - seg.start) * f64(0.5);
        BigFloat slack = BigFloat::pow2(-(P / 2), P);
        for (int k = 0; k < 32; ++k) {
            double ang = 6.283185307179586 * k / 32;
            BigComplex w(a * f64(std::cos(ang)), b * f64(std::sin(ang)));
            BigComplex z = mid + span * w;
            CHECK(BigComplex::dist_lower(z, seg.center) <= seg.delta + slack);
        }
        // No critical point within the certified radius.
        CHECK(ig.critical_distance_lower(seg.center) > seg.delta);
    }
}

TEST_CASE("refinement monotonicity: bisecting a sound segment stays sound") {
    auto ig = pole_ig(c(0.1, 0.3));
    auto plan = rig::plan_main(ig, c(-1), c(1), BigFloat::pow2(-80, P), f64(0.9),
                               ToleranceMode::uniform);
    for (const auto& seg : plan.segments) {
        for (int side = 0; side < 2; ++side) {
            BigComplex s = side == 0 ? seg.start : seg.center;
            BigComplex e = side == 0 ? seg.center : seg.end;
            auto geom = rig::detail::main_segment_geometry(ig, s, e, f64(0.9));
            CHECK(!geom.needs_split);
            CHECK(geom.delta > geom.half_length);
            CHECK(geom.delta < geom.rho);
        }
    }
}

TEST_CASE("plan_reference: far critical point stays close to plan_main") {
    auto ig = pole_ig(c(0, 10));
    BigFloat etol = BigFloat::pow2(-100, P);
    auto p1 = rig::plan_main(ig, c(-1), c(1), etol, f64(0.9), ToleranceMode::uniform);
    auto p2 = rig::plan_reference(ig, c(-1), c(1), etol, f64(0.9), f64(0.05));
    REQUIRE(p1.segments.size() == 1);
    // r = (1 - eps) acosh((|z0-1| + |z0+1|)/2) = 0.95 acosh(sqrt(101)).
    double expect_r = 0.95 * std::acosh(std::hypot(1.0, 10.0));
    CHECK(p2.reference_r.to_double() == Catch::Approx(expect_r).epsilon(0.02));
    CHECK(rig::cost(p2) <= 2 * rig::cost(p1));
    CHECK(rig::cost(p1) <= 2 * rig::cost(p2));
}

TEST_CASE("plan_reference: eccentricity explodes the order as q shrinks") {
    BigFloat etol = BigFloat::pow2(-100, P);
    auto ig_far = pole_ig(c(0, 1));
    auto ig_near = pole_ig(c(0, 0.01));
    auto p_far = rig::plan_reference(ig_far, c(-1), c(1), etol, f64(0.9), f64(0.05));
    auto p_near = rig::plan_reference(ig_near, c(-1), c(1), etol, f64(0.9), f64(0.05));
    // r is pinned under acosh(sqrt(1+q^2)).
    CHECK(p_near.reference_r.to_double() <= std::acosh(std::sqrt(1.0 + 0.0001)));
    CHECK(rig::cost(p_near) >= 50 * rig::cost(p_far));
}

TEST_CASE("plan_reference: no critical points caps r and covers trivially") {
    auto ig = identity_ig();
    auto plan = rig::plan_reference(ig, c(-1), c(1), BigFloat::pow2(-80, P), f64(0.9), f64(0.05));
    CHECK(plan.reference_r.to_double() == Catch::Approx(1.76));
    CHECK(plan.covering.size() == 1);
}

TEST_CASE("covering soundness: samples covered, criticals excluded") {
    auto ig = pole_ig(c(0.25, 0.2));
    auto plan = rig::plan_reference(ig, c(-1), c(1), BigFloat::pow2(-80, P), f64(0.9), f64(0.05));
    REQUIRE(plan.covering.size() >= 2);
    BigFloat a = BigFloat::cosh_r(plan.reference_r, MPFR_RNDN);
    BigFloat b = BigFloat::sinh_r(plan.reference_r, MPFR_RNDN);
    BigFloat slack = BigFloat::pow2(-(P / 2), P);
    // 256 points: boundary ring and three interior rings, in mapped coords.
    for (int ring = 1; ring <= 4; ++ring) {
        for (int k = 0; k < 64; ++k) {
            double ang = 6.283185307179586 * k / 64;
            BigFloat scale(ring / 4.0, P);
            BigComplex w(scale * a * f64(std::cos(ang)), scale * b * f64(std::sin(ang)));
            bool covered = false;
            for (const auto& d : plan.covering) {
                BigComplex ctr(d.center_mapped, BigFloat(0.0, P));
                if (BigComplex::dist_upper(w, ctr) <= d.radius_mapped + slack) {
                    covered = true;
                    break;
                }
            }
            CHECK(covered);
        }
    }
    // No covering disk contains a critical point (original coordinates).
    for (const auto& d : plan.covering)
        for (const auto& cp : ig.critical_points)
            CHECK(BigComplex::dist_upper(cp, d.disk.center) > d.disk.radius);
}

TEST_CASE("execute: polynomial curve to 100 bits") {
    BivariateDefiningPolynomial f{{UnivariatePolynomial({c(1)}),
                                   UnivariatePolynomial({c(-1), c(0), c(-1)})}}; // g = z^2+1
    auto ig = rig::make_integrand(f, c(-1), c(2), P);
    BigFloat etol = BigFloat::pow2(-100, P);
    auto plan = rig::plan_main(ig, c(-1), c(1), etol, f64(0.9), ToleranceMode::uniform);
    auto rep = rig::execute(plan, ig);
    CHECK((rep.value - c(8) / BigFloat(3.0, P)).abs() <= etol);
    CHECK(rep.node_evaluations == plan.total_order);
    CHECK(rep.error_budget <= etol);
}

TEST_CASE("execute: both strategies hit the closed form within E_tol") {
    BigComplex z0 = c(0.3, 0.4);
    auto ig = pole_ig(z0);
    BigFloat etol = BigFloat::pow2(-100, P);
    BigComplex exact = oracle::pole_half_integral(z0, c(-1), c(1), ig.branch_value, 2 * P);
    auto p1 = rig::plan_main(ig, c(-1), c(1), etol, f64(0.9), ToleranceMode::uniform);
    auto r1 = rig::execute(p1, ig);
    CHECK((BigComplex::at_precision(r1.value, 2 * P) - exact).abs() <= etol);
    auto p2 = rig::plan_reference(ig, c(-1), c(1), etol, f64(0.9), f64(0.05));
    auto r2 = rig::execute(p2, ig);
    CHECK((BigComplex::at_precision(r2.value, 2 * P) - exact).abs() <= etol);
}

TEST_CASE("execute honors length-weighted tolerances") {
    auto ig = pole_ig(c(0, 0.4));
    BigFloat etol = BigFloat::pow2(-90, P);
    auto plan = rig::plan_main(ig, c(-1), c(1), etol, f64(0.9), ToleranceMode::length_weighted);
    BigFloat sum(0.0, P);
    for (const auto& s : plan.segments) sum += s.gamma;
    CHECK(sum <= BigFloat(1.0, P));
    auto rep = rig::execute(plan, ig);
    BigComplex exact = oracle::pole_half_integral(c(0, 0.4), c(-1), c(1), ig.branch_value, 2 * P);
    CHECK((BigComplex::at_precision(rep.value, 2 * P) - exact).abs() <= etol);
}

TEST_CASE("budget soundness across tolerances and both closed forms") {
    for (long k : {53L, 100L, 200L}) {
        rig::Precision prec = static_cast<rig::Precision>(k + 96);
        BigFloat etol = BigFloat::pow2(-k, prec);
        BigComplex z0(0.25, 0.375, prec);
        BigComplex anchor(-1.0, 0.0, prec), end(1.0, 0.0, prec);

        auto ig = pole_ig(z0, prec);
        auto plan = rig::plan_main(ig, anchor, end, etol, BigFloat(0.9, prec),
                                   ToleranceMode::uniform);
        auto rep = rig::execute(plan, ig);
        BigComplex exact = oracle::pole_half_integral(z0, anchor, end, ig.branch_value, 2 * prec);
        CHECK((BigComplex::at_precision(rep.value, 2 * prec) - exact).abs() <= etol);

        // v = 1: g = (z - z0)^{-1}, a single-branch curve.
        BivariateDefiningPolynomial f1{{UnivariatePolynomial({-z0, BigComplex::one(prec)}),
                                        UnivariatePolynomial({-BigComplex::one(prec)})}};
        auto ig1 = rig::make_integrand(f1, anchor, BigComplex::one(prec) / (anchor - z0), prec);
        auto plan1 = rig::plan_main(ig1, anchor, end, etol, BigFloat(0.9, prec),
                                    ToleranceMode::uniform);
        auto rep1 = rig::execute(plan1, ig1);
        BigComplex exact1 = oracle::pole_log_integral(z0, anchor, end, 2 * prec);
        CHECK((BigComplex::at_precision(rep1.value, 2 * prec) - exact1).abs() <= etol);
    }
}

TEST_CASE("cross-strategy agreement on the I_q family") {
    rig::Precision prec = 192;
    BigFloat q(0.5, prec);
    BigFloat q2 = q * q, q4 = q2 * q2;
    BigFloat four(4.0, prec);
    std::vector<BigComplex> pc{BigComplex(-(q2 * (four + q2) * (four + q2))),
                               BigComplex::zero(prec),
                               BigComplex(-(BigFloat(16.0, prec) + four * q2 + q4)),
                               BigComplex::zero(prec),
                               BigComplex(BigFloat(4.0, prec))};
    BivariateDefiningPolynomial f{{UnivariatePolynomial(pc), UnivariatePolynomial(),
                                   UnivariatePolynomial({-BigComplex::one(prec)})}};
    BigComplex anchor(-1.0, 0.0, prec);
    auto ig = rig::make_integrand(f, anchor,
                                  BigComplex::one(prec) / f.a(0).eval(anchor).sqrt(), prec);
    BigFloat etol = BigFloat::pow2(-60, prec);
    auto rep1 = rig::execute(rig::plan_main(ig, anchor, BigComplex(1.0, 0.0, prec), etol,
                                            BigFloat(0.9, prec), ToleranceMode::uniform),
                             ig);
    auto rep2 = rig::execute(rig::plan_reference(ig, anchor, BigComplex(1.0, 0.0, prec), etol,
                                                 BigFloat(0.9, prec), BigFloat(0.05, prec)),
                             ig);
    CHECK((rep1.value - rep2.value).abs() <= BigFloat::pow2(-59, prec));
}

TEST_CASE("cost is the segment total and favors splitting near poles") {
    auto ig = pole_ig(c(0, 0.04));
    BigFloat etol = BigFloat::pow2(-100, P);
    auto p1 = rig::plan_main(ig, c(-1), c(1), etol, f64(0.9), ToleranceMode::uniform);
    auto p2 = rig::plan_reference(ig, c(-1), c(1), etol, f64(0.9), f64(0.05));
    long sum = 0;
    for (const auto& s : p1.segments) sum += s.order;
    CHECK(rig::cost(p1) == sum);
    CHECK(rig::cost(p1) <= rig::cost(p2));
}

TEST_CASE("geometry errors surface as exit-code map candidates") {
    // Critical point exactly on the path: f = z g^2 - 1 on [-1,1].
    BivariateDefiningPolynomial f{{UnivariatePolynomial({c(0), c(1)}), UnivariatePolynomial(),
                                   UnivariatePolynomial({c(-1)})}};
    auto ig = rig::make_integrand(f, c(-2), BigComplex::one(P) / c(-2).sqrt(), P);
    CHECK_THROWS_AS(rig::plan_main(ig, c(-1), c(1), BigFloat::pow2(-60, P), f64(0.9),
                                   ToleranceMode::uniform),
                    rig::GeometryError);
}
