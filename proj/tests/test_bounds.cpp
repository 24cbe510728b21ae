#include <catch2/catch_amalgamated.hpp>

#include "rig/bounds.hpp"
#include "test_support.hpp"

using rig::BigComplex;
using rig::BigFloat;
using rig::BivariateDefiningPolynomial;
using rig::UnivariatePolynomial;

namespace {
constexpr rig::Precision P = 160;
BigComplex c(double re, double im = 0.0) { return BigComplex(re, im, P); }
BigFloat f64(double x) { return BigFloat(x, P); }

BivariateDefiningPolynomial shifted_pole(const BigComplex& z0) { // (z - z0) g^2 - 1
    return BivariateDefiningPolynomial{{UnivariatePolynomial({-z0, c(1)}), UnivariatePolynomial(),
                                        UnivariatePolynomial({c(-1)})}};
}
} // namespace

TEST_CASE("fujiwara_root_bound closed forms") {
    CHECK(rig::fujiwara_root_bound(UnivariatePolynomial({c(-4), c(0), c(1)})).to_double() ==
          Catch::Approx(4.0));
    CHECK(rig::fujiwara_root_bound(UnivariatePolynomial({c(16), c(0), c(0), c(2)})).to_double() ==
          Catch::Approx(4.0));
    CHECK(rig::fujiwara_root_bound(
              UnivariatePolynomial({c(0), c(0), c(0), c(0), c(0), c(1)})).is_zero());
}

TEST_CASE("fujiwara containment on random polynomials") {
    oracle::Rng rng(11);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        long deg = rng.integer(1, 8);
        std::vector<BigComplex> coeffs;
        for (long k = 0; k <= deg; ++k)
            coeffs.push_back(c(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        UnivariatePolynomial p(std::move(coeffs));
        if (p.degree() < 1) continue;
        BigFloat bound = rig::fujiwara_root_bound(p);
        BigFloat slack = BigFloat::pow2(-(P / 2), P);
        for (const auto& r : rig::poly_roots(p, P)) {
            CHECK(r.abs() < bound + slack);
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("uniform coefficient bounds") {
    // a_0(z) = z, root {0}: A_0 on D(2, 1) is 1.
    BivariateDefiningPolynomial f{{UnivariatePolynomial({c(0), c(1)}), UnivariatePolynomial(),
                                   UnivariatePolynomial({c(-1)})}};
    auto cb = rig::uniform_coefficient_bounds(f, {c(0)}, c(2), f64(1.0));
    CHECK(cb.a0_lower.to_double() == Catch::Approx(1.0));

    // a_1(z) = z + 1 on D(0, 0.5): A_1 = 1 * 0.5 + 1 = 1.5.
    BivariateDefiningPolynomial f2{{UnivariatePolynomial({c(1)}),
                                    UnivariatePolynomial({c(1), c(1)})}};
    auto cb2 = rig::uniform_coefficient_bounds(f2, {}, c(0), f64(0.5));
    REQUIRE(cb2.upper.size() == 1);
    CHECK(cb2.upper[0].to_double() == Catch::Approx(1.5));

    // a_0 = 3(z-1)(z+1) on D(3i, 1): A_0 = 3 (sqrt(10) - 1)^2, and the
    // sampled minimum of |a_0| on the boundary dominates it.
    UnivariatePolynomial a0({c(-3), c(0), c(3)});
    BivariateDefiningPolynomial f3{{a0, UnivariatePolynomial({c(-1)})}};
    auto roots = rig::poly_roots(a0, P);
    auto cb3 = rig::uniform_coefficient_bounds(f3, roots, c(0, 3), f64(1.0));
    CHECK(cb3.a0_lower.to_double() == Catch::Approx(14.026334038989724).epsilon(1e-12));
    BigFloat sampled = oracle::sampled_poly_min(a0, c(0, 3), f64(1.0), 256, P);
    CHECK(cb3.a0_lower <= sampled);

    CHECK_THROWS_AS(rig::uniform_coefficient_bounds(f, {c(0)}, c(2), f64(2.5)),
                    rig::GeometryError);
}

TEST_CASE("fujiwara_uniform_bound closed forms and sampling") {
    // f = g^2 - z on D(4,1): A_0 = 1, A_2 = 5 -> 2 sqrt(5).
    BivariateDefiningPolynomial f{{UnivariatePolynomial({c(1)}), UnivariatePolynomial(),
                                   UnivariatePolynomial({c(0), c(-1)})}};
    CHECK(rig::fujiwara_uniform_bound(f, {}, c(4), f64(1.0)).to_double() ==
          Catch::Approx(2.0 * std::sqrt(5.0)).epsilon(1e-12));

    // f = z g^2 - 1 on D(2,1): 2 * 1^{1/2} = 2.
    BivariateDefiningPolynomial f2{{UnivariatePolynomial({c(0), c(1)}), UnivariatePolynomial(),
                                    UnivariatePolynomial({c(-1)})}};
    CHECK(rig::fujiwara_uniform_bound(f2, {c(0)}, c(2), f64(1.0)).to_double() ==
          Catch::Approx(2.0).epsilon(1e-12));

    // f = (z - (0.3+0.4i)) g^2 - 1 on D(0, 0.25): |z0 - alpha| = 0.5 -> 4,
    // with the sampled max of |g| staying below it.
    BigComplex alpha = c(0.3, 0.4);
    auto f3 = shifted_pole(alpha);
    BigFloat mt = rig::fujiwara_uniform_bound(f3, {alpha}, c(0), f64(0.25));
    CHECK(mt.to_double() == Catch::Approx(4.0).epsilon(1e-12));
    CHECK(oracle::sampled_branch_max(f3, c(0), f64(0.25), 128, P) <= mt);
}

TEST_CASE("taylor_variation_bound closed forms") {
    CHECK(rig::taylor_variation_bound(c(1), f64(2.0), f64(1.0), f64(0.5)).to_double() ==
          Catch::Approx(1.5).epsilon(1e-12));
    CHECK(rig::taylor_variation_bound(c(123), f64(9.0), f64(2.0), f64(0.0)).is_zero());
    CHECK(rig::taylor_variation_bound(c(0), f64(1.0), f64(2.0), f64(1.0)).to_double() ==
          Catch::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(rig::taylor_variation_bound(c(0), f64(1.0), f64(1.0), f64(1.0)),
                    rig::GeometryError);
}

TEST_CASE("taylor_variation_bound monotonicity in delta and M") {
    BigFloat prev(0.0, P);
    for (double d : {0.1, 0.2, 0.4, 0.6, 0.8}) {
        BigFloat v = rig::taylor_variation_bound(c(1), f64(3.0), f64(1.0), f64(d));
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(rig::taylor_variation_bound(c(1), f64(3.0), f64(1.0), f64(0.5)) <=
          rig::taylor_variation_bound(c(1), f64(4.0), f64(1.0), f64(0.5)));
}

TEST_CASE("disk_bound dominates sampled variation of closed forms") {
    // g = z (no critical points): variation on D(0,1) is exactly 1.
    BivariateDefiningPolynomial ident{{UnivariatePolynomial({c(1)}),
                                       UnivariatePolynomial({c(0), c(-1)})}};
    auto ig = rig::make_integrand(ident, c(0), c(0), P);
    auto cert = rig::disk_bound(ig, c(0), f64(1.0), c(0));
    CHECK(cert.variation_bound.to_double() >= 1.0);
    CHECK(cert.absolute_bound >= cert.variation_bound);
    CHECK(cert.taylor_radius > cert.disk.radius);

    // g = z^{-1/2} on D(2, 0.5).
    BivariateDefiningPolynomial inv{{UnivariatePolynomial({c(0), c(1)}), UnivariatePolynomial(),
                                     UnivariatePolynomial({c(-1)})}};
    auto ig2 = rig::make_integrand(inv, c(2), BigComplex::one(P) / c(2).sqrt(), P);
    auto cert2 = rig::disk_bound(ig2, c(2), f64(0.5), ig2.branch_value);
    BigFloat worst(0.0, P);
    for (int k = 0; k < 256; ++k) {
        double ang = 6.283185307179586 * k / 256;
        BigComplex z = c(2) + c(0.5 * std::cos(ang), 0.5 * std::sin(ang));
        worst = BigFloat::max(worst, (BigComplex::one(P) / z.sqrt() - ig2.branch_value).abs());
    }
    CHECK(cert2.variation_bound >= worst);

    // g = sqrt(z) on D(1, 0.25): variation >= sqrt(1.25) - 1.
    BivariateDefiningPolynomial sq{{UnivariatePolynomial({c(1)}), UnivariatePolynomial(),
                                    UnivariatePolynomial({c(0), c(-1)})}};
    auto ig3 = rig::make_integrand(sq, c(1), c(1), P);
    auto cert3 = rig::disk_bound(ig3, c(1), f64(0.25), c(1));
    CHECK(cert3.variation_bound.to_double() >= std::sqrt(1.25) - 1.0);
    CHECK_THROWS_AS(rig::disk_bound(ig3, c(1), f64(1.5), c(1)), rig::GeometryError);
}

TEST_CASE("proxy_bound closed forms and monotonicity") {
    CHECK(rig::proxy_bound(f64(1.0), f64(0.5), c(0, 0.01), c(0), f64(0.0)).to_double() ==
          Catch::Approx(10.0).epsilon(1e-12));
    double q = 0.01;
    CHECK(rig::proxy_bound(f64(10.0), f64(0.5), c(0, q), c(0), f64(0.005)).to_double() ==
          Catch::Approx(10.0 / std::sqrt(0.005)).epsilon(1e-12));
    CHECK(rig::proxy_bound(f64(7.0), f64(0.0), c(0, 1), c(0), f64(0.5)).to_double() ==
          Catch::Approx(7.0).epsilon(1e-12));
    BigFloat prev(0.0, P);
    for (double d : {0.0, 0.2, 0.4, 0.8}) {
        BigFloat v = rig::proxy_bound(f64(1.0), f64(0.5), c(0, 1), c(0), f64(d));
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(rig::proxy_bound(f64(1.0), f64(0.5), c(0, 1), c(0), f64(1.0)),
                    rig::GeometryError);
}

TEST_CASE("uniform bound validity on sampled fibers of random curves") {
    oracle::Rng rng(23);
    for (int trial = 0; trial < 12; ++trial) {
        // Random f of degree 2 in g, degree <= 2 in z, nonzero a_0.
        std::vector<UnivariatePolynomial> rows;
        for (int i = 0; i < 3; ++i) {
            std::vector<BigComplex> coeffs;
            for (int j = 0; j <= 2; ++j)
                coeffs.push_back(c(rng.integer(-3, 3), rng.integer(-3, 3)));
            rows.push_back(UnivariatePolynomial(std::move(coeffs)));
        }
        if (rows[0].is_zero()) continue;
        BivariateDefiningPolynomial f(std::move(rows));
        std::vector<BigComplex> a0_roots;
        if (f.a(0).degree() >= 1) a0_roots = rig::poly_roots(f.a(0), P);
        BigComplex z0 = c(rng.uniform(-2, 2), rng.uniform(-2, 2));
        BigFloat min_dist = BigFloat::pos_inf(P);
        for (const auto& r : a0_roots) min_dist = BigFloat::min(min_dist, (z0 - r).abs());
        if (!min_dist.is_inf() && min_dist.to_double() < 0.2) continue;
        BigFloat delta =
            f64(min_dist.is_inf() ? 0.5 : std::min(0.5, 0.5 * min_dist.to_double()));
        BigFloat mt = rig::fujiwara_uniform_bound(f, a0_roots, z0, delta);
        BigFloat slack = BigFloat::pow2(-(P / 2), P);
        // 64 interior + boundary samples; every branch stays below M~.
        for (int k = 0; k < 64; ++k) {
            double ang = 6.283185307179586 * k / 64;
            double rad = (k % 4 + 1) / 4.0;
            BigComplex z = z0 + c(rad * delta.to_double() * std::cos(ang),
                                  rad * delta.to_double() * std::sin(ang));
            UnivariatePolynomial fiber = f.slice_at(z);
            if (fiber.degree() < 1) continue;
            for (const auto& root : rig::poly_roots(fiber, P)) CHECK(root.abs() <= mt + slack);
        }
    }
}

TEST_CASE("directed rounding: higher precision never loosens a certificate") {
    BigComplex alpha = c(0.3, 0.4);
    for (rig::Precision prec : {96L, 192L, 384L}) {
        BigComplex a = BigComplex::at_precision(alpha, prec);
        BivariateDefiningPolynomial f{{UnivariatePolynomial({-a, BigComplex::one(prec)}),
                                       UnivariatePolynomial(),
                                       UnivariatePolynomial({-BigComplex::one(prec)})}};
        BigFloat mt = rig::fujiwara_uniform_bound(f, {a}, BigComplex::zero(prec),
                                                  BigFloat(0.25, prec));
        // The certified value at 160 bits stays an upper bound at any precision.
        CHECK(mt.to_double() <= 4.0 + 1e-12);
        CHECK(mt.to_double() >= 4.0 - 1e-12);
    }
    // Recomputing the same bound at higher precision can only shrink it
    // (both are upper bounds of the same exact value).
    BigFloat lo = rig::taylor_variation_bound(c(1), f64(2.0), f64(1.0) / f64(3.0), f64(0.25));
    BigComplex one_hi = BigComplex::one(320);
    BigFloat hi = rig::taylor_variation_bound(one_hi, BigFloat(2.0, 320),
                                              BigFloat(1.0, 320) / BigFloat(3.0, 320),
                                              BigFloat(0.25, 320));
    CHECK(hi <= lo.next_above());
}
