// rig: rigorous Gauss-Legendre integration of algebraic functions along
// complex segments, with node-count experiment drivers.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rig/experiments.hpp"
#include "rig/problem.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitConvergence = 4;

void emit_error(int code, const std::string& kind, const std::string& message) {
    nlohmann::json err{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
    std::cout << err.dump(2) << "\n";
}

struct CommonOptions {
    std::string strategy;
    std::string tol_mode;
    double beta = -1;
    double epsilon = -1;
    long precision = 0;
    bool timings = false;
    unsigned threads = std::thread::hardware_concurrency();
};

rig::ProblemSpec load_problem(const std::string& path, const CommonOptions& opt) {
    std::ifstream in(path);
    if (!in) throw rig::ParseError("cannot open problem file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw rig::ParseError(std::string("invalid JSON: ") + e.what());
    }
    rig::ProblemSpec spec = rig::parse_problem(j);
    if (!opt.strategy.empty()) spec.strategy = opt.strategy;
    if (!opt.tol_mode.empty()) spec.tolerance_mode = opt.tol_mode;
    if (opt.beta > 0) spec.beta = std::to_string(opt.beta);
    if (opt.epsilon > 0) spec.epsilon = std::to_string(opt.epsilon);
    if (opt.precision > 0) spec.precision_override = opt.precision;
    return spec;
}

rig::SegmentPlan make_plan(const rig::MaterializedProblem& m, const std::string& strategy) {
    if (strategy == "reference")
        return rig::plan_reference(m.integrand, m.z1, m.z2, m.e_tol, m.beta, m.epsilon);
    return rig::plan_main(m.integrand, m.z1, m.z2, m.e_tol, m.beta, m.tolerance_mode);
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw rig::ParseError("cannot open output file: " + out_path);
    out << content;
}

std::vector<rig::BigFloat> parse_q_list(const std::vector<std::string>& qs, rig::Precision prec) {
    std::vector<rig::BigFloat> out;
    for (const auto& q : qs) out.push_back(rig::BigFloat::from_string(q, prec));
    if (out.empty()) throw rig::ParseError("at least one --q value is required");
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"rigorous Gauss-Legendre integration of algebraic functions"};
    app.require_subcommand(1);
    CommonOptions opt;

    // --- integrate ---
    auto* integrate = app.add_subcommand("integrate", "integrate a problem file, emit a JSON report");
    std::string integrate_file;
    integrate->add_option("file", integrate_file, "problem JSON file")->required();
    integrate->add_option("--strategy", opt.strategy, "main | reference | heuristic");
    integrate->add_option("--beta", opt.beta, "splitting parameter in (0,1)");
    integrate->add_option("--epsilon", opt.epsilon, "reference-strategy ellipse shrink factor");
    integrate->add_option("--tol-mode", opt.tol_mode, "uniform | length");
    integrate->add_option("--precision", opt.precision, "override working precision (bits)");
    integrate->add_flag("--timings", opt.timings, "include wall-clock time (breaks byte determinism)");

    // --- plan ---
    auto* plan_cmd = app.add_subcommand("plan", "plan only: segment geometry and node counts");
    std::string plan_file;
    plan_cmd->add_option("file", plan_file, "problem JSON file")->required();
    plan_cmd->add_option("--strategy", opt.strategy, "main | reference");
    plan_cmd->add_option("--beta", opt.beta, "splitting parameter in (0,1)");
    plan_cmd->add_option("--epsilon", opt.epsilon, "reference-strategy ellipse shrink factor");
    plan_cmd->add_option("--tol-mode", opt.tol_mode, "uniform | length");
    plan_cmd->add_option("--precision", opt.precision, "override working precision (bits)");

    // --- nodes ---
    auto* nodes_cmd = app.add_subcommand("nodes", "Gauss-Legendre nodes and weights as CSV");
    long nodes_n = 0;
    long nodes_prec = 128;
    std::string nodes_out;
    nodes_cmd->add_option("N", nodes_n, "quadrature order")->required();
    nodes_cmd->add_option("--precision", nodes_prec, "precision in bits (default 128)");
    nodes_cmd->add_option("--out", nodes_out, "output file (default stdout)");

    // --- experiment ---
    auto* exp = app.add_subcommand("experiment", "reproduce the node-count experiments");
    exp->require_subcommand(1);
    std::string exp_out;
    std::string exp_etol = "2^-100";
    double exp_beta = 0.9, exp_eps = 0.05;
    unsigned exp_threads = opt.threads ? opt.threads : 1;

    auto* heat = exp->add_subcommand("heatmap", "N1/N2 grid for g = (z-z0)^-v, z0 = x+iy");
    double heat_v = 0.5;
    long heat_grid = 8;
    bool heat_proxy = false;
    heat->add_option("--v", heat_v, "exponent v (algebraic encoding for 1/2 and 1)");
    heat->add_option("--grid", heat_grid, "grid size per axis, points at k/(grid+1)")->check(CLI::Range(1L, 200L));
    heat->add_option("--etol", exp_etol, "tolerance, e.g. 2^-100");
    heat->add_flag("--proxy", heat_proxy, "use the model bound instead of the disk lemma");
    heat->add_option("--beta", exp_beta, "splitting parameter");
    heat->add_option("--epsilon", exp_eps, "reference-strategy shrink factor");
    heat->add_option("--threads", exp_threads, "worker threads");
    heat->add_option("--out", exp_out, "output CSV file");

    auto* iq = exp->add_subcommand("iq", "I_q family: lemma vs proxy bounds, both strategies");
    std::vector<std::string> iq_qs;
    iq->add_option("--q", iq_qs, "q values in (0,1), repeatable");
    iq->add_option("--etol", exp_etol, "tolerance");
    iq->add_option("--beta", exp_beta, "splitting parameter");
    iq->add_option("--epsilon", exp_eps, "reference-strategy shrink factor");
    iq->add_option("--threads", exp_threads, "worker threads");
    iq->add_option("--out", exp_out, "output CSV file");

    auto* pole = exp->add_subcommand("pole", "z0 = iq sweep for the asymptotic trends");
    std::vector<std::string> pole_qs;
    double pole_v = 0.5;
    pole->add_option("--v", pole_v, "exponent v in {0.5, 1}");
    pole->add_option("--q", pole_qs, "q values in (0,1), repeatable");
    pole->add_option("--etol", exp_etol, "tolerance");
    pole->add_option("--beta", exp_beta, "splitting parameter");
    pole->add_option("--epsilon", exp_eps, "reference-strategy shrink factor");
    pole->add_option("--threads", exp_threads, "worker threads");
    pole->add_option("--out", exp_out, "output CSV file");

    auto* bench = exp->add_subcommand("bench", "random degree-<=4 curves, three methods");
    long bench_count = 30;
    std::uint64_t bench_seed = 1;
    bool bench_timings = false;
    bench->add_option("--count", bench_count, "number of instances");
    bench->add_option("--seed", bench_seed, "RNG seed");
    bench->add_option("--etol", exp_etol, "tolerance");
    bench->add_flag("--timings", bench_timings, "measure wall time (breaks byte determinism)");
    bench->add_option("--beta", exp_beta, "splitting parameter");
    bench->add_option("--epsilon", exp_eps, "reference-strategy shrink factor");
    bench->add_option("--threads", exp_threads, "worker threads");
    bench->add_option("--out", exp_out, "output CSV file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::ostringstream os;
        app.exit(e, os, os);
        emit_error(kExitParse, "parse", os.str());
        return kExitParse;
    }

    if (*integrate) {
        rig::ProblemSpec spec = load_problem(integrate_file, opt);
        rig::MaterializedProblem m = rig::materialize(spec);
        auto t0 = std::chrono::steady_clock::now();
        nlohmann::json doc;
        if (spec.strategy == "heuristic") {
            rig::HeuristicResult h = rig::heuristic_integrate(m.integrand, m.z1, m.z2, m.e_tol);
            auto t1 = std::chrono::steady_clock::now();
            double ms = opt.timings ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
            int digits = std::max(1, static_cast<int>(static_cast<double>(m.precision) * 0.30103));
            doc = nlohmann::json{{"schema_version", 1},
                                 {"strategy", "heuristic"},
                                 {"value", rig::complex_json(h.value, digits)},
                                 {"digits", digits},
                                 {"total_nodes", h.nodes_used},
                                 {"precision_bits", static_cast<long>(m.precision)},
                                 {"error_estimate", h.error_estimate.to_string(20)},
                                 {"e_tol", m.e_tol.to_string(20)},
                                 {"segments", nlohmann::json::array()},
                                 {"wall_time_ms", ms}};
        } else {
            rig::SegmentPlan plan = make_plan(m, spec.strategy);
            rig::IntegrationReport report = rig::execute(plan, m.integrand);
            auto t1 = std::chrono::steady_clock::now();
            double ms = opt.timings ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
            doc = rig::report_document(report, spec.strategy, ms);
        }
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    }

    if (*plan_cmd) {
        rig::ProblemSpec spec = load_problem(plan_file, opt);
        if (spec.strategy == "heuristic")
            throw rig::ParseError("plan requires strategy main or reference");
        rig::MaterializedProblem m = rig::materialize(spec);
        rig::SegmentPlan plan = make_plan(m, spec.strategy);
        std::cout << rig::plan_document(plan, spec.strategy).dump(2) << "\n";
        return kExitOk;
    }

    if (*nodes_cmd) {
        rig::QuadratureScheme s = rig::legendre_scheme(nodes_n, static_cast<rig::Precision>(nodes_prec));
        int digits = std::max(1, static_cast<int>(static_cast<double>(nodes_prec) * 0.30103));
        std::ostringstream os;
        os << "node,weight\n";
        for (size_t i = 0; i < s.nodes.size(); ++i)
            os << s.nodes[i].to_string(digits) << ',' << s.weights[i].to_string(digits) << '\n';
        write_output(nodes_out, os.str());
        return kExitOk;
    }

    rig::Precision eprec = 128;
    rig::BigFloat etol = rig::parse_e_tol(exp_etol, 256);
    rig::BigFloat beta(exp_beta, eprec), eps(exp_eps, eprec);
    if (*heat) {
        int inv_v = heat_v == 0.5 ? 2 : (heat_v == 1.0 ? 1 : 0);
        std::optional<rig::BigFloat> proxy_v;
        if (heat_proxy) proxy_v = rig::BigFloat(heat_v, eprec);
        if (inv_v == 0 && !heat_proxy)
            throw rig::ParseError("v outside {0.5, 1} needs --proxy (no algebraic encoding)");
        std::vector<rig::BigFloat> xs, ys;
        for (long k = 1; k <= heat_grid; ++k) {
            rig::BigFloat t = rig::BigFloat(k, eprec) / rig::BigFloat(heat_grid + 1, eprec);
            xs.push_back(t);
            ys.push_back(t);
        }
        auto rows = rig::experiment_heatmap(xs, ys, inv_v, etol, beta, eps, proxy_v, exp_threads);
        write_output(exp_out, rig::heatmap_csv(rows));
        return kExitOk;
    }
    if (*iq) {
        auto rows = rig::experiment_iq(parse_q_list(iq_qs, 256), etol, beta, eps, exp_threads);
        write_output(exp_out, rig::iq_csv(rows));
        return kExitOk;
    }
    if (*pole) {
        int inv_v = pole_v == 0.5 ? 2 : (pole_v == 1.0 ? 1 : 0);
        if (inv_v == 0) throw rig::ParseError("pole sweep needs v in {0.5, 1}");
        auto rows = rig::experiment_pole(inv_v, parse_q_list(pole_qs, 256), etol, beta, eps, exp_threads);
        write_output(exp_out, rig::pole_csv(rows));
        return kExitOk;
    }
    if (*bench) {
        auto out = rig::experiment_bench(bench_count, bench_seed, etol, beta, eps, bench_timings,
                                         exp_threads);
        std::cerr << "bench: " << out.rows.size() << " instances, " << out.rejected
                  << " rejected draws (fixed admissible segments)\n";
        write_output(exp_out, rig::bench_csv(out));
        return kExitOk;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const rig::ParseError& e) {
        emit_error(kExitParse, "parse", e.what());
        return kExitParse;
    } catch (const rig::GeometryError& e) {
        emit_error(kExitGeometry, "geometry", e.what());
        return kExitGeometry;
    } catch (const rig::ConvergenceError& e) {
        emit_error(kExitConvergence, "convergence", e.what());
        return kExitConvergence;
    } catch (const rig::Error& e) {
        emit_error(kExitConvergence, "error", e.what());
        return kExitConvergence;
    } catch (const std::exception& e) {
        emit_error(kExitConvergence, "internal", e.what());
        return kExitConvergence;
    }
}
