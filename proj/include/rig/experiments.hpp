#pragma once

#include <atomic>
#include <mutex>
#include <chrono>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rig/strategies.hpp"

namespace rig {

namespace detail {

/// Index-parallel map with deterministic output ordering. The first
/// exception raised by any worker is rethrown on the caller's thread.
inline void parallel_for(size_t count, unsigned threads, const std::function<void(size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < count && !failed.load(); i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(count));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    mpfr_free_cache();
    if (first_error) std::rethrow_exception(first_error);
}

inline std::string csv_number(const BigFloat& x) { return x.to_string(30); }

} // namespace detail

/// Builds the test-family integrand g = (z - z0)^(-v) for v in {1/2, 1}:
/// f = (z - z0) g^2 - 1 resp. (z - z0) g - 1, anchored at `anchor` on the
/// branch of the principal root there.
inline AlgebraicIntegrand pole_family_integrand(const BigComplex& z0, int inv_v,
                                                const BigComplex& anchor, Precision prec) {
    if (inv_v != 1 && inv_v != 2) throw Error("algebraic encoding only covers v = 1 and v = 1/2");
    std::vector<UnivariatePolynomial> rows;
    rows.push_back(UnivariatePolynomial({-z0, BigComplex::one(prec)})); // a_0 = z - z0
    if (inv_v == 2) rows.push_back(UnivariatePolynomial());             // a_1 = 0
    rows.push_back(UnivariatePolynomial({-BigComplex::one(prec)}));     // a_n = -1
    BivariateDefiningPolynomial f(std::move(rows));

    BigComplex w = anchor - z0;
    BigComplex guess = inv_v == 2 ? BigComplex::one(prec) / w.sqrt() : BigComplex::one(prec) / w;
    return make_integrand(std::move(f), anchor, guess, prec);
}

/// The close-critical-pair family of integrals
///   I_q = int dz / sqrt(4 z^4 - (16 + 4q^2 + q^4) z^2 - q^2 (4 + q^2)^2),
/// with critical points at +-iq and +-(2 + q^2/2), anchored at z = -1.
inline AlgebraicIntegrand iq_family_integrand(const BigFloat& q, const BigComplex& anchor,
                                              Precision prec) {
    BigFloat q2 = q * q;
    BigFloat q4 = q2 * q2;
    BigFloat four(4.0, prec);
    BigComplex c4(BigFloat(4.0, prec), BigFloat(0.0, prec));
    BigComplex zero_c = BigComplex::zero(prec);
    BigFloat mid = BigFloat(16.0, prec) + four * q2 + q4;
    BigFloat last = q2 * (four + q2) * (four + q2);
    std::vector<BigComplex> p_coeffs{BigComplex(-last), zero_c, BigComplex(-mid), zero_c, c4};
    std::vector<UnivariatePolynomial> rows;
    rows.push_back(UnivariatePolynomial(std::move(p_coeffs))); // a_0 = p(z)
    rows.push_back(UnivariatePolynomial());                    // a_1 = 0
    rows.push_back(UnivariatePolynomial({-BigComplex::one(prec)}));
    BivariateDefiningPolynomial f(std::move(rows));

    BigComplex pa = f.a(0).eval(anchor);
    BigComplex guess = BigComplex::one(prec) / pa.sqrt();
    return make_integrand(std::move(f), anchor, guess, prec);
}

struct HeatmapRow {
    BigFloat x, y;
    long n1 = 0, n2 = 0;
};

/// Node counts of both strategies for g = (z - z0)^(-v) over [-1,1], one row
/// per grid point. Planning only; `proxy_v` switches to the model bound with
/// that exponent (mandatory for v outside {1/2, 1}).
inline std::vector<HeatmapRow> experiment_heatmap(const std::vector<BigFloat>& xs,
                                                  const std::vector<BigFloat>& ys, int inv_v,
                                                  const BigFloat& e_tol, const BigFloat& beta,
                                                  const BigFloat& epsilon,
                                                  std::optional<BigFloat> proxy_v, unsigned threads) {
    long bits = BigFloat::ceil_long(-BigFloat::log2_r(e_tol, MPFR_RNDN));
    Precision prec = static_cast<Precision>(std::max<long>(bits + 64, 128));
    std::vector<HeatmapRow> rows(xs.size() * ys.size());
    detail::parallel_for(rows.size(), threads, [&](size_t idx) {
        size_t iy = idx / xs.size(), ix = idx % xs.size();
        BigComplex z0(xs[ix], ys[iy]);
        BigComplex anchor(-1.0, 0.0, prec);
        AlgebraicIntegrand ig = pole_family_integrand(z0, proxy_v ? 2 : inv_v, anchor, prec);
        std::optional<ProxyBoundSpec> proxy;
        if (proxy_v) proxy = ProxyBoundSpec{BigFloat(1.0, prec), *proxy_v};
        BigComplex end(1.0, 0.0, prec);
        BigFloat et = BigFloat::ldexp(e_tol, 0);
        SegmentPlan p1 = plan_main(ig, anchor, end, et, beta, ToleranceMode::uniform, proxy);
        SegmentPlan p2 = plan_reference(ig, anchor, end, et, beta, epsilon, proxy);
        rows[idx] = HeatmapRow{xs[ix], ys[iy], cost(p1), cost(p2)};
    });
    return rows;
}

inline std::string heatmap_csv(const std::vector<HeatmapRow>& rows) {
    std::ostringstream os;
    os << "x,y,N1,N2\n";
    for (const auto& r : rows)
        os << detail::csv_number(r.x) << ',' << detail::csv_number(r.y) << ',' << r.n1 << ',' << r.n2
           << '\n';
    return os.str();
}

struct IqRow {
    BigFloat q;
    long n1_lemma = 0, n1_proxy = 0, n2_lemma = 0, n2_proxy = 0;
    BigComplex value;
};

/// Lemma vs proxy node counts for the I_q family, plus the main-strategy value.
inline std::vector<IqRow> experiment_iq(const std::vector<BigFloat>& qs, const BigFloat& e_tol,
                                        const BigFloat& beta, const BigFloat& epsilon,
                                        unsigned threads) {
    long bits = BigFloat::ceil_long(-BigFloat::log2_r(e_tol, MPFR_RNDN));
    Precision prec = static_cast<Precision>(std::max<long>(bits + 64, 128));
    std::vector<IqRow> rows(qs.size());
    detail::parallel_for(rows.size(), threads, [&](size_t idx) {
        const BigFloat q = BigFloat::at_precision(qs[idx], prec);
        BigComplex anchor(-1.0, 0.0, prec);
        BigComplex end(1.0, 0.0, prec);
        AlgebraicIntegrand ig = iq_family_integrand(q, anchor, prec);
        BigFloat et = BigFloat::ldexp(e_tol, 0);
        ProxyBoundSpec proxy{BigFloat::rootn_r(BigFloat(1.0, prec) / q, 2, MPFR_RNDU),
                             BigFloat(0.5, prec)};
        SegmentPlan p1 = plan_main(ig, anchor, end, et, beta, ToleranceMode::uniform);
        SegmentPlan p1p = plan_main(ig, anchor, end, et, beta, ToleranceMode::uniform, proxy);
        SegmentPlan p2 = plan_reference(ig, anchor, end, et, beta, epsilon);
        SegmentPlan p2p = plan_reference(ig, anchor, end, et, beta, epsilon, proxy);
        IntegrationReport rep = execute(p1, ig);
        rows[idx] = IqRow{q, cost(p1), cost(p1p), cost(p2), cost(p2p), rep.value};
    });
    return rows;
}

inline std::string iq_csv(const std::vector<IqRow>& rows) {
    std::ostringstream os;
    os << "q,N1_lemma,N1_proxy,N2_lemma,N2_proxy,value_re,value_im\n";
    for (const auto& r : rows)
        os << detail::csv_number(r.q) << ',' << r.n1_lemma << ',' << r.n1_proxy << ',' << r.n2_lemma
           << ',' << r.n2_proxy << ',' << r.value.re().to_string(30) << ','
           << r.value.im().to_string(30) << '\n';
    return os.str();
}

struct PoleRow {
    BigFloat q;
    long n1 = 0, n2 = 0;
    long n1_dropped = 0; // diagnostic: N1 after the tail-dropping device
};

/// Asymptotic sweep z0 = iq. The diagnostics column applies the proof-style
/// optimization of dropping segments whose crude integral bound
/// length * |g|_bound already fits in the segment's tolerance share; the
/// rigorous plan itself never drops segments.
inline std::vector<PoleRow> experiment_pole(int inv_v, const std::vector<BigFloat>& qs,
                                            const BigFloat& e_tol, const BigFloat& beta,
                                            const BigFloat& epsilon, unsigned threads) {
    long bits = BigFloat::ceil_long(-BigFloat::log2_r(e_tol, MPFR_RNDN));
    Precision prec = static_cast<Precision>(std::max<long>(bits + 64, 128));
    std::vector<PoleRow> rows(qs.size());
    detail::parallel_for(rows.size(), threads, [&](size_t idx) {
        const BigFloat q = BigFloat::at_precision(qs[idx], prec);
        BigComplex z0(BigFloat(0.0, prec), q);
        BigComplex anchor(-1.0, 0.0, prec);
        BigComplex end(1.0, 0.0, prec);
        AlgebraicIntegrand ig = pole_family_integrand(z0, inv_v, anchor, prec);
        BigFloat et = BigFloat::ldexp(e_tol, 0);
        SegmentPlan p1 = plan_main(ig, anchor, end, et, beta, ToleranceMode::uniform);
        SegmentPlan p2 = plan_reference(ig, anchor, end, et, beta, epsilon);
        long dropped_total = 0;
        for (const auto& seg : p1.segments) {
            BigFloat len = BigComplex::dist_upper(seg.end, seg.start);
            BigFloat crude = BigFloat::mul_r(len, seg.abs_bound, MPFR_RNDU);
            if (!(crude <= BigFloat::mul_r(seg.gamma, et, MPFR_RNDD))) dropped_total += seg.order;
        }
        rows[idx] = PoleRow{q, cost(p1), cost(p2), dropped_total};
    });
    return rows;
}

inline std::string pole_csv(const std::vector<PoleRow>& rows) {
    std::ostringstream os;
    os << "q,N1,N2,N1_dropped\n";
    for (const auto& r : rows)
        os << detail::csv_number(r.q) << ',' << r.n1 << ',' << r.n2 << ',' << r.n1_dropped << '\n';
    return os.str();
}

struct BenchRow {
    long instance_id = 0;
    long n_main = 0, n_ref = 0, n_heuristic = 0;
    double t_main = 0, t_ref = 0, t_heuristic = 0;
    bool values_agree = false;
    BigComplex v_main, v_ref, v_heuristic;
    bool heuristic_ok = false;
};

struct BenchOutput {
    std::vector<BenchRow> rows;
    long rejected = 0;
};

namespace detail {

/// xorshift-style generator with splitmix64 seeding: stable across
/// platforms, unlike the distributions in <random>.
class DeterministicRng {
  public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed == 0 ? 0x9e3779b97f4a7c15ULL : seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform-ish integer in [-10, 10].
    long coeff() { return static_cast<long>(next() % 21ULL) - 10; }

  private:
    std::uint64_t state_;
};

inline bool lex_less(const BigComplex& a, const BigComplex& b) {
    if (a.re() < b.re()) return true;
    if (b.re() < a.re()) return false;
    return a.im() < b.im();
}

} // namespace detail

/// Random bivariate curves of total degree <= 4 with integer coefficients in
/// [-10, 10], integrated along fixed candidate segments; instances whose
/// segments all pass too near a critical point (or whose branches are not
/// cleanly separated at the anchor) are rejected and redrawn.
inline BenchOutput experiment_bench(long count, std::uint64_t seed, const BigFloat& e_tol,
                                    const BigFloat& beta, const BigFloat& epsilon, bool timings,
                                    unsigned threads) {
    long bits = BigFloat::ceil_long(-BigFloat::log2_r(e_tol, MPFR_RNDN));
    Precision prec = static_cast<Precision>(std::max<long>(bits + 64, 128));

    struct Drawn {
        std::vector<std::vector<long>> c; // c[i][j]: coefficient of z^i g^j
        int segment_index;
    };

    // Draw instances sequentially (the RNG stream must not depend on thread
    // scheduling), then evaluate them in parallel.
    detail::DeterministicRng rng(seed);
    const std::vector<std::pair<BigComplex, BigComplex>> candidates = {
        {BigComplex(-1.0, -0.75, prec), BigComplex(1.0, -0.75, prec)},
        {BigComplex(-1.0, 0.75, prec), BigComplex(1.0, 0.75, prec)},
        {BigComplex(-1.25, -0.5, prec), BigComplex(1.0, 0.875, prec)},
        {BigComplex(-0.5, -1.25, prec), BigComplex(0.75, 1.0, prec)},
    };

    auto build = [&](const std::vector<std::vector<long>>& c) -> std::optional<BivariateDefiningPolynomial> {
        int n = 0;
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; j <= 4 - i; ++j)
                if (c[static_cast<size_t>(i)][static_cast<size_t>(j)] != 0) n = std::max(n, j);
        if (n < 1) return std::nullopt;
        std::vector<UnivariatePolynomial> rows(static_cast<size_t>(n + 1));
        for (int k = 0; k <= n; ++k) { // row k = a_k = coefficient of g^(n-k)
            std::vector<BigComplex> coeffs;
            for (int i = 0; i + (n - k) <= 4; ++i)
                coeffs.push_back(BigComplex(BigFloat(c[static_cast<size_t>(i)][static_cast<size_t>(n - k)], prec),
                                            BigFloat(0.0, prec)));
            rows[static_cast<size_t>(k)] = UnivariatePolynomial(std::move(coeffs));
        }
        return BivariateDefiningPolynomial(std::move(rows));
    };

    BenchOutput out;
    std::vector<Drawn> accepted;
    std::vector<AlgebraicIntegrand> integrands;
    long rejected = 0;
    while (static_cast<long>(accepted.size()) < count) {
        if (rejected > 200 * count + 200)
            throw ConvergenceError("bench rejection rate is implausibly high");
        std::vector<std::vector<long>> c(5, std::vector<long>(5, 0));
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; j <= 4 - i; ++j) c[static_cast<size_t>(i)][static_cast<size_t>(j)] = rng.coeff();
        auto f = build(c);
        if (!f) {
            ++rejected;
            continue;
        }
        bool placed = false;
        for (int s = 0; s < static_cast<int>(candidates.size()) && !placed; ++s) {
            const auto& [za, zb] = candidates[static_cast<size_t>(s)];
            try {
                // Anchor on the best-isolated branch, deterministically.
                UnivariatePolynomial slice = f->slice_at(za);
                if (slice.degree() != f->degree_g()) continue;
                std::vector<BigComplex> roots = poly_roots(slice, prec);
                std::sort(roots.begin(), roots.end(), detail::lex_less);
                size_t best = 0;
                BigFloat best_iso(-1.0, prec);
                BigFloat scale(1.0, prec);
                for (const auto& root : roots) scale = BigFloat::max(scale, root.abs());
                for (size_t k = 0; k < roots.size(); ++k) {
                    BigFloat iso = BigFloat::pos_inf(prec);
                    for (size_t l = 0; l < roots.size(); ++l)
                        if (l != k) iso = BigFloat::min(iso, BigComplex::dist_lower(roots[k], roots[l]));
                    if (iso > best_iso) {
                        best_iso = iso;
                        best = k;
                    }
                }
                if (roots.size() > 1 && best_iso < BigFloat(1e-3, prec) * scale) continue;
                AlgebraicIntegrand ig = make_integrand(*f, za, roots[best], prec);
                // Admissibility: the segment keeps a clear margin from every
                // critical point.
                BigFloat len = BigComplex::dist_upper(zb, za);
                BigComplex span = zb - za;
                BigFloat len2 = span.norm();
                BigFloat margin = BigFloat(0.15, prec) * len;
                bool clear = true;
                for (const auto& cp : ig.critical_points) {
                    BigComplex d = cp - za;
                    BigFloat t = (d.re() * span.re() + d.im() * span.im()) / len2;
                    t = BigFloat::max(BigFloat(0.0, prec), BigFloat::min(BigFloat(1.0, prec), t));
                    if (BigComplex::dist_lower(cp, za + span * t) < margin) {
                        clear = false;
                        break;
                    }
                }
                if (!clear) continue;
                accepted.push_back(Drawn{c, s});
                integrands.push_back(std::move(ig));
                placed = true;
            } catch (const Error&) {
                continue;
            }
        }
        if (!placed) ++rejected;
    }
    out.rejected = rejected;

    out.rows.resize(accepted.size());
    detail::parallel_for(accepted.size(), threads, [&](size_t idx) {
        const auto& [za, zb] = candidates[static_cast<size_t>(accepted[idx].segment_index)];
        const AlgebraicIntegrand& ig = integrands[idx];
        BigFloat et = BigFloat::ldexp(e_tol, 0);
        BenchRow row;
        row.instance_id = static_cast<long>(idx);

        auto timed = [&](auto&& fn) {
            auto t0 = std::chrono::steady_clock::now();
            fn();
            auto t1 = std::chrono::steady_clock::now();
            return timings ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
        };
        SegmentPlan p1, p2;
        IntegrationReport r1, r2;
        row.t_main = timed([&] {
            p1 = plan_main(ig, za, zb, et, beta, ToleranceMode::uniform);
            r1 = execute(p1, ig);
        });
        row.t_ref = timed([&] {
            p2 = plan_reference(ig, za, zb, et, beta, epsilon);
            r2 = execute(p2, ig);
        });
        row.n_main = cost(p1);
        row.n_ref = cost(p2);
        row.v_main = r1.value;
        row.v_ref = r2.value;
        try {
            HeuristicResult h;
            row.t_heuristic = timed([&] { h = heuristic_integrate(ig, za, zb, et); });
            row.n_heuristic = h.nodes_used;
            row.v_heuristic = h.value;
            row.heuristic_ok = true;
        } catch (const Error&) {
            row.n_heuristic = -1;
            row.heuristic_ok = false;
        }
        row.values_agree = (row.v_main - row.v_ref).abs() <= BigFloat::ldexp(et, 1);
        out.rows[idx] = std::move(row);
    });
    return out;
}

inline std::string bench_csv(const BenchOutput& out) {
    std::ostringstream os;
    os << "instance_id,N_main,N_ref,N_heuristic,t_main,t_ref,t_heuristic,values_agree\n";
    for (const auto& r : out.rows) {
        char tbuf[96];
        std::snprintf(tbuf, sizeof tbuf, "%.3f,%.3f,%.3f", r.t_main, r.t_ref, r.t_heuristic);
        os << r.instance_id << ',' << r.n_main << ',' << r.n_ref << ',' << r.n_heuristic << ','
           << tbuf << ',' << (r.values_agree ? "true" : "false") << '\n';
    }
    return os.str();
}

} // namespace rig
