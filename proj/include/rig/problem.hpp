#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rig/strategies.hpp"

namespace rig {

/// Parses "a", "a+bi", "-bi", "i", ... with decimal or rational components.
inline BigComplex parse_complex(const std::string& text, Precision prec) {
    std::string s;
    for (char c : text)
        if (c != ' ' && c != '\t') s.push_back(c);
    if (s.empty()) throw ParseError("empty number");

    bool has_i = s.back() == 'i' || s.back() == 'I';
    if (!has_i) return BigComplex(BigFloat::from_string(s, prec), BigFloat(0.0, prec));

    s.pop_back();
    // Split before the sign that separates the two components: a sign not at
    // the front and not part of an exponent.
    size_t split = std::string::npos;
    for (size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [&](std::string t) {
        if (t.empty() || t == "+") return BigFloat(1.0, prec);
        if (t == "-") return BigFloat(-1.0, prec);
        return BigFloat::from_string(t, prec);
    };
    if (split == std::string::npos)
        return BigComplex(BigFloat(0.0, prec), imag_of(s));
    return BigComplex(BigFloat::from_string(s.substr(0, split), prec), imag_of(s.substr(split)));
}

/// Tolerance grammar: "2^-100" (exact power of two) or a decimal string.
inline BigFloat parse_e_tol(const std::string& text, Precision prec) {
    std::string s;
    for (char c : text)
        if (c != ' ') s.push_back(c);
    if (s.rfind("2^", 0) == 0) {
        try {
            size_t pos = 0;
            long e = std::stol(s.substr(2), &pos);
            if (pos != s.size() - 2) throw ParseError("bad exponent in '" + text + "'");
            return BigFloat::pow2(e, prec);
        } catch (const std::exception&) {
            throw ParseError("bad tolerance '" + text + "'");
        }
    }
    BigFloat v = BigFloat::from_string(s, prec);
    if (!(v > BigFloat(0.0, prec))) throw ParseError("tolerance must be positive");
    return v;
}

/// A problem file, kept as strings so it can be materialized losslessly at
/// whatever working precision the tolerance dictates.
struct ProblemSpec {
    std::vector<std::vector<std::string>> f_rows; // a_0 .. a_n, ascending powers of z
    std::string path_start;
    std::string path_end;
    std::string branch_value;
    std::string e_tol;
    std::string strategy = "main";
    std::string tolerance_mode = "uniform";
    std::optional<std::string> beta;
    std::optional<std::string> epsilon;
    std::optional<long> precision_override;
};

inline ProblemSpec parse_problem(const nlohmann::json& j) {
    ProblemSpec p;
    try {
        if (!j.is_object()) throw ParseError("problem file must be a JSON object");
        const auto& rows = j.at("f");
        if (!rows.is_array() || rows.size() < 2)
            throw ParseError("\"f\" must list the rows a_0..a_n, n >= 1");
        for (const auto& row : rows) {
            std::vector<std::string> r;
            for (const auto& c : row) {
                if (c.is_string()) r.push_back(c.get<std::string>());
                else if (c.is_number()) r.push_back(c.dump());
                else if (c.is_object())
                    r.push_back(c.at("re").get<std::string>() + "+" +
                                c.at("im").get<std::string>() + "i");
                else throw ParseError("bad coefficient entry");
            }
            p.f_rows.push_back(std::move(r));
        }
        const auto& path = j.at("path");
        if (!path.is_array() || path.size() != 2) throw ParseError("\"path\" must be [start, end]");
        p.path_start = path[0].is_string() ? path[0].get<std::string>() : path[0].dump();
        p.path_end = path[1].is_string() ? path[1].get<std::string>() : path[1].dump();
        p.branch_value = j.at("branch_value").is_string() ? j.at("branch_value").get<std::string>()
                                                          : j.at("branch_value").dump();
        p.e_tol = j.at("e_tol").is_string() ? j.at("e_tol").get<std::string>() : j.at("e_tol").dump();
        if (j.contains("strategy")) p.strategy = j.at("strategy").get<std::string>();
        if (j.contains("tolerance_mode")) p.tolerance_mode = j.at("tolerance_mode").get<std::string>();
        if (j.contains("beta"))
            p.beta = j.at("beta").is_string() ? j.at("beta").get<std::string>() : j.at("beta").dump();
        if (j.contains("epsilon"))
            p.epsilon = j.at("epsilon").is_string() ? j.at("epsilon").get<std::string>()
                                                    : j.at("epsilon").dump();
        if (j.contains("precision_override")) p.precision_override = j.at("precision_override").get<long>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("problem file: ") + e.what());
    }
    if (p.strategy != "main" && p.strategy != "reference" && p.strategy != "heuristic")
        throw ParseError("strategy must be main | reference | heuristic");
    if (p.tolerance_mode != "uniform" && p.tolerance_mode != "length" &&
        p.tolerance_mode != "length_weighted")
        throw ParseError("tolerance_mode must be uniform | length");
    return p;
}

struct MaterializedProblem {
    BivariateDefiningPolynomial f;
    AlgebraicIntegrand integrand;
    BigComplex z1, z2;
    BigFloat e_tol;
    BigFloat beta, epsilon;
    ToleranceMode tolerance_mode;
    Precision precision; // planning / tracking precision
};

/// Parses every number at the derived working precision and builds the
/// integrand (critical points, snapped branch value).
inline MaterializedProblem materialize(const ProblemSpec& spec) {
    Precision probe = 64;
    BigFloat etol_probe = parse_e_tol(spec.e_tol, probe);
    long bits = BigFloat::ceil_long(-BigFloat::log2_r(etol_probe, MPFR_RNDN));
    Precision prec = spec.precision_override
                         ? static_cast<Precision>(std::max<long>(*spec.precision_override, kMinPrecision))
                         : static_cast<Precision>(std::max<long>(bits + 64, 128));

    std::vector<UnivariatePolynomial> rows;
    for (const auto& row : spec.f_rows) {
        std::vector<BigComplex> coeffs;
        for (const auto& c : row) coeffs.push_back(parse_complex(c, prec));
        rows.push_back(UnivariatePolynomial(std::move(coeffs)));
    }
    BivariateDefiningPolynomial f(std::move(rows));
    BigComplex z1 = parse_complex(spec.path_start, prec);
    BigComplex z2 = parse_complex(spec.path_end, prec);
    BigComplex bv = parse_complex(spec.branch_value, prec);
    AlgebraicIntegrand ig = make_integrand(f, z1, bv, prec);
    return MaterializedProblem{
        std::move(f),
        std::move(ig),
        std::move(z1),
        std::move(z2),
        parse_e_tol(spec.e_tol, prec),
        spec.beta ? BigFloat::from_string(*spec.beta, prec) : BigFloat(0.9, prec),
        spec.epsilon ? BigFloat::from_string(*spec.epsilon, prec) : BigFloat(0.05, prec),
        spec.tolerance_mode == "uniform" ? ToleranceMode::uniform : ToleranceMode::length_weighted,
        prec};
}

inline nlohmann::json complex_json(const BigComplex& z, int digits) {
    return nlohmann::json{{"re", z.re().to_string(digits)}, {"im", z.im().to_string(digits)}};
}

/// Machine-readable integration/plan report (schema_version 1, see
/// schemas/report.schema.json).
inline nlohmann::json report_document(const IntegrationReport& report, const std::string& strategy,
                                      double wall_time_ms) {
    int digits = std::max(1, static_cast<int>(static_cast<double>(report.precision_bits) * 0.30103));
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : report.plan.segments) {
        segs.push_back(nlohmann::json{{"z_start", complex_json(s.start, 20)},
                                      {"z_end", complex_json(s.end, 20)},
                                      {"center", complex_json(s.center, 20)},
                                      {"delta", s.delta.to_string(20)},
                                      {"r", s.r.to_string(20)},
                                      {"M", s.bound.to_string(20)},
                                      {"gamma", s.gamma.to_string(20)},
                                      {"N", s.order}});
    }
    nlohmann::json doc{{"schema_version", 1},
                       {"strategy", strategy},
                       {"value", complex_json(report.value, digits)},
                       {"digits", digits},
                       {"total_nodes", report.node_evaluations},
                       {"precision_bits", report.precision_bits},
                       {"error_budget", report.error_budget.to_string(20)},
                       {"e_tol", report.plan.e_tol.to_string(20)},
                       {"segments", segs},
                       {"wall_time_ms", wall_time_ms}};
    if (report.plan.strategy == StrategyKind::reference) {
        doc["reference_r"] = report.plan.reference_r.to_string(20);
        doc["covering_disks"] = report.plan.covering.size();
    }
    return doc;
}

/// Plan-only document (no value / precision fields).
inline nlohmann::json plan_document(const SegmentPlan& plan, const std::string& strategy) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : plan.segments) {
        segs.push_back(nlohmann::json{{"z_start", complex_json(s.start, 20)},
                                      {"z_end", complex_json(s.end, 20)},
                                      {"center", complex_json(s.center, 20)},
                                      {"delta", s.delta.to_string(20)},
                                      {"r", s.r.to_string(20)},
                                      {"M", s.bound.to_string(20)},
                                      {"gamma", s.gamma.to_string(20)},
                                      {"N", s.order}});
    }
    nlohmann::json doc{{"schema_version", 1},
                       {"strategy", strategy},
                       {"total_N", plan.total_order},
                       {"e_tol", plan.e_tol.to_string(20)},
                       {"beta", plan.beta.to_string(20)},
                       {"segments", segs}};
    if (plan.strategy == StrategyKind::reference) {
        doc["reference_r"] = plan.reference_r.to_string(20);
        nlohmann::json disks = nlohmann::json::array();
        for (const auto& d : plan.covering) {
            disks.push_back(nlohmann::json{{"center_mapped", d.center_mapped.to_string(20)},
                                           {"radius_mapped", d.radius_mapped.to_string(20)},
                                           {"center", complex_json(d.disk.center, 20)},
                                           {"radius", d.disk.radius.to_string(20)},
                                           {"M", d.bound.to_string(20)}});
        }
        doc["covering"] = disks;
    }
    return doc;
}

} // namespace rig
