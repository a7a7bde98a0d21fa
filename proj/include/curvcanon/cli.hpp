#ifndef CURVCANON_CLI_HPP
#define CURVCANON_CLI_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "curvcanon/curvature.hpp"
#include "curvcanon/curve.hpp"
#include "curvcanon/errors.hpp"
#include "curvcanon/gram.hpp"
#include "curvcanon/quadrature.hpp"
#include "curvcanon/symprod.hpp"

namespace curvcanon {

enum class Command { info, gram, curvature, scan, weierstrass, gauss_bonnet, symprod };

inline const char* command_name(Command c)
{
    switch (c) {
        case Command::info: return "info";
        case Command::gram: return "gram";
        case Command::curvature: return "curvature";
        case Command::scan: return "scan";
        case Command::weierstrass: return "weierstrass";
        case Command::gauss_bonnet: return "gauss-bonnet";
        case Command::symprod: return "symprod";
    }
    return "?";
}

enum class OutputFormat { csv, json };

struct RunConfig {
    Command command = Command::info;
    std::string curve_file;
    std::uint64_t seed = 20240901;
    int d = 2;
    int trials = 100;
    int grid_nx = 200;
    int grid_ny = 200;
    double quad_target_rel = 1e-7;
    int quad_max_level = 7;
    double quad_far_radius = 0.0;
    double tol_theta = 1e-9;
    double tol_gb = 1e-2;
    double tol_agree = 1e-8;
    std::string output; // empty = stdout
    OutputFormat format = OutputFormat::json;
    bool format_set = false;
    std::optional<cplx> point_x; // `curvature` at one point instead of the grid summary
    int point_sheet = 0;
    unsigned threads = 0;
};

// exit-code contract: 0 pass, 1 error, 2 property-check failure
struct RunResult {
    int exit_code = 0;
    std::string output;
    std::string diagnostics;
};

inline std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Curve-spec file: {"kind": "hyperelliptic"|"plane_quartic", "coeffs": [[re,im],...]}
// coefficients in ascending powers (graded-lex in (x,y) for quartics); an
// optional "tolerances" object overrides named Tolerances fields.
inline CurveSpec load_curve_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(errc::parse_error, "cannot open curve file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else
                ++col;
        }
        fail(errc::parse_error,
             "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }

    if (!j.contains("kind") || !j["kind"].is_string()) fail(errc::parse_error, "missing string field 'kind'");
    std::string kind_s = j["kind"].get<std::string>();
    CurveKind kind;
    if (kind_s == "hyperelliptic")
        kind = CurveKind::hyperelliptic;
    else if (kind_s == "plane_quartic")
        kind = CurveKind::plane_quartic;
    else
        fail(errc::parse_error, "kind must be 'hyperelliptic' or 'plane_quartic', got '" + kind_s + "'");

    if (!j.contains("coeffs") || !j["coeffs"].is_array()) fail(errc::parse_error, "missing array field 'coeffs'");
    std::vector<cplx> coeffs;
    for (const auto& e : j["coeffs"]) {
        if (e.is_number())
            coeffs.emplace_back(e.get<double>(), 0.0);
        else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
            coeffs.emplace_back(e[0].get<double>(), e[1].get<double>());
        else
            fail(errc::parse_error, "coefficients must be numbers or [re, im] pairs");
    }
    if (coeffs.empty()) fail(errc::parse_error, "'coeffs' is empty");

    Tolerances tol;
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) fail(errc::parse_error, "'tolerances' must be an object");
        auto get = [&](const char* name, double& slot) {
            if (t.contains(name)) slot = t[name].get<double>();
        };
        get("root_sep_rel", tol.root_sep_rel);
        get("residual", tol.residual);
        get("chart_min", tol.chart_min);
        get("point_sep", tol.point_sep);
        get("rank_rel", tol.rank_rel);
        get("degeneracy", tol.degeneracy);
        get("theta_pos", tol.theta_pos);
    }

    try {
        return construct_curve(kind, coeffs, tol);
    } catch (const error& e) {
        if (e.kind() == errc::not_squarefree || e.kind() == errc::singular_curve ||
            e.kind() == errc::unsupported_degree)
            throw; // already specific
        fail(errc::validation_error, std::string(e.what()) + " [curve: " + text + "]");
    }
}

namespace detail {

inline nlohmann::ordered_json config_json(const RunConfig& cfg)
{
    nlohmann::ordered_json c;
    c["command"] = command_name(cfg.command);
    c["curve"] = cfg.curve_file;
    c["seed"] = cfg.seed;
    c["d"] = cfg.d;
    c["trials"] = cfg.trials;
    c["grid"] = std::to_string(cfg.grid_nx) + "x" + std::to_string(cfg.grid_ny);
    c["quad_target_rel"] = cfg.quad_target_rel;
    c["quad_max_level"] = cfg.quad_max_level;
    c["quad_far_radius"] = cfg.quad_far_radius;
    c["tol_theta"] = cfg.tol_theta;
    c["tol_gb"] = cfg.tol_gb;
    c["tol_agree"] = cfg.tol_agree;
    c["format"] = cfg.format == OutputFormat::csv ? "csv" : "json";
    c["threads"] = cfg.threads;
    return c;
}

inline void emit_config_csv(std::ostream& os, const RunConfig& cfg)
{
    const nlohmann::ordered_json c = config_json(cfg);
    for (const auto& [k, v] : c.items())
        os << "# " << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
}

inline nlohmann::ordered_json matrix_json(const Eigen::MatrixXcd& M)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            row.push_back(nlohmann::ordered_json::array({M(i, j).real(), M(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::ordered_json quad_report_json(const QuadReport& r)
{
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& l : r.levels) {
        nlohmann::ordered_json e;
        e["level"] = l.level;
        e["value_norm"] = l.value_norm;
        e["rel_change"] = l.rel_change;
        levels.push_back(e);
    }
    nlohmann::ordered_json j;
    j["levels"] = levels;
    j["est_rel_error"] = r.est_rel_error;
    j["converged"] = r.converged;
    j["evaluations"] = r.evaluations;
    return j;
}

inline QuadParams quad_params_from(const RunConfig& cfg, double target_override = 0.0)
{
    QuadParams q;
    q.target_rel = target_override > 0.0 ? target_override : cfg.quad_target_rel;
    q.max_level = cfg.quad_max_level;
    q.far_radius = cfg.quad_far_radius;
    q.threads = cfg.threads;
    return q;
}

inline GridParams grid_params_from(const RunConfig& cfg)
{
    GridParams g;
    g.nx = cfg.grid_nx;
    g.ny = cfg.grid_ny;
    return g;
}

inline void sample_csv_row(std::ostream& os, const CurvatureSample& s)
{
    os << fmt_double(s.point.x.real()) << ',' << fmt_double(s.point.x.imag()) << ','
       << fmt_double(s.point.y.real()) << ',' << fmt_double(s.point.y.imag()) << ',' << chart_name(s.point.chart)
       << ',' << fmt_double(s.lambda) << ',' << fmt_double(s.theta) << ',' << fmt_double(s.degeneracy) << "\n";
}

inline nlohmann::ordered_json sample_json(const CurvatureSample& s)
{
    nlohmann::ordered_json j;
    j["re_x"] = s.point.x.real();
    j["im_x"] = s.point.x.imag();
    j["re_y"] = s.point.y.real();
    j["im_y"] = s.point.y.imag();
    j["chart"] = chart_name(s.point.chart);
    j["lambda"] = s.lambda;
    j["theta"] = s.theta;
    j["degeneracy"] = s.degeneracy;
    return j;
}

} // namespace detail

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        CurveSpec spec = load_curve_spec(cfg.curve_file);
        const bool csv = cfg.format == OutputFormat::csv;
        nlohmann::ordered_json doc;
        doc["config"] = detail::config_json(cfg);
        int exit_code = 0;

        switch (cfg.command) {
            case Command::info: {
                nlohmann::ordered_json j;
                j["kind"] = spec.kind() == CurveKind::hyperelliptic ? "hyperelliptic" : "plane_quartic";
                j["genus"] = spec.genus();
                j["gonality_lower"] = spec.gonality_lower();
                if (spec.kind() == CurveKind::hyperelliptic) {
                    nlohmann::ordered_json bp = nlohmann::ordered_json::array();
                    for (const auto& b : spec.branch_points())
                        bp.push_back(nlohmann::ordered_json::array({b.real(), b.imag()}));
                    j["branch_points"] = bp;
                    j["infinite_branch_point"] = spec.has_infinite_branch_point();
                }
                nlohmann::ordered_json cp = nlohmann::ordered_json::array();
                for (const auto& c : spec.critical_points()) {
                    nlohmann::ordered_json e;
                    e["x"] = nlohmann::ordered_json::array({c.x.real(), c.x.imag()});
                    e["grading"] = c.grading;
                    cp.push_back(e);
                }
                j["projection_critical_points"] = cp;
                doc["info"] = j;
                break;
            }
            case Command::gram: {
                GramData gd = gram_matrix(spec, detail::quad_params_from(cfg));
                nlohmann::ordered_json j;
                j["G"] = detail::matrix_json(gd.G);
                j["T"] = detail::matrix_json(gd.T);
                j["min_eigenvalue"] = gd.min_eigenvalue;
                j["condition"] = gd.condition;
                j["quad_report"] = detail::quad_report_json(gd.quad_report);
                doc["gram"] = j;
                break;
            }
            case Command::curvature: {
                GramData gd = gram_matrix(spec, detail::quad_params_from(cfg));
                if (cfg.point_x) {
                    auto ys = spec.sheets(*cfg.point_x);
                    if (cfg.point_sheet < 0 || cfg.point_sheet >= static_cast<int>(ys.size()))
                        fail(errc::validation_error, "sheet index out of range");
                    CurvePoint p = make_point(spec, *cfg.point_x, ys[static_cast<std::size_t>(cfg.point_sheet)]);
                    CurvatureSample s = curvature_at(spec, gd, p);
                    doc["sample"] = detail::sample_json(s);
                    if (s.theta > cfg.tol_theta) exit_code = 2;
                } else {
                    auto samples = scan_curvature(spec, gd, detail::grid_params_from(cfg));
                    double min_theta = 0.0, max_theta = -std::numeric_limits<double>::infinity();
                    double min_lambda = std::numeric_limits<double>::infinity(), max_deg = 0.0;
                    std::size_t violations = 0;
                    for (const auto& s : samples) {
                        min_theta = std::min(min_theta, s.theta);
                        max_theta = std::max(max_theta, s.theta);
                        min_lambda = std::min(min_lambda, s.lambda);
                        max_deg = std::max(max_deg, s.degeneracy);
                        if (s.theta > cfg.tol_theta) ++violations;
                    }
                    nlohmann::ordered_json j;
                    j["samples"] = samples.size();
                    j["min_theta"] = min_theta;
                    j["max_theta"] = max_theta;
                    j["min_lambda"] = min_lambda;
                    j["max_degeneracy"] = max_deg;
                    j["theta_violations"] = violations;
                    doc["curvature"] = j;
                    if (violations > 0) exit_code = 2;
                }
                break;
            }
            case Command::scan: {
                GramData gd = gram_matrix(spec, detail::quad_params_from(cfg));
                auto samples = scan_curvature(spec, gd, detail::grid_params_from(cfg));
                std::size_t violations = 0;
                for (const auto& s : samples)
                    if (s.theta > cfg.tol_theta) ++violations;
                if (violations > 0) exit_code = 2;
                if (csv) {
                    std::ostringstream os;
                    detail::emit_config_csv(os, cfg);
                    os << "re_x,im_x,re_y,im_y,chart,lambda,theta,degeneracy\n";
                    for (const auto& s : samples) detail::sample_csv_row(os, s);
                    if (!cfg.output.empty()) {
                        std::ofstream f(cfg.output);
                        if (!f) fail(errc::validation_error, "cannot open output file '" + cfg.output + "'");
                        f << os.str();
                    } else
                        out << os.str();
                    return exit_code;
                }
                nlohmann::ordered_json arr = nlohmann::ordered_json::array();
                for (const auto& s : samples) arr.push_back(detail::sample_json(s));
                doc["samples"] = arr;
                doc["theta_violations"] = violations;
                break;
            }
            case Command::weierstrass: {
                GramData gd = gram_matrix(spec, detail::quad_params_from(cfg));
                auto clusters = degenerate_points(spec, gd, detail::grid_params_from(cfg));
                if (csv) {
                    std::ostringstream os;
                    detail::emit_config_csv(os, cfg);
                    os << "re_x,im_x,re_y,im_y,count,min_degeneracy,theta_at_center\n";
                    for (const auto& c : clusters)
                        os << fmt_double(c.center.x.real()) << ',' << fmt_double(c.center.x.imag()) << ','
                           << fmt_double(c.center.y.real()) << ',' << fmt_double(c.center.y.imag()) << ','
                           << c.count << ',' << fmt_double(c.min_degeneracy) << ','
                           << fmt_double(c.theta_at_center) << "\n";
                    if (!cfg.output.empty()) {
                        std::ofstream f(cfg.output);
                        if (!f) fail(errc::validation_error, "cannot open output file '" + cfg.output + "'");
                        f << os.str();
                    } else
                        out << os.str();
                    return exit_code;
                }
                nlohmann::ordered_json arr = nlohmann::ordered_json::array();
                for (const auto& c : clusters) {
                    nlohmann::ordered_json e;
                    e["re_x"] = c.center.x.real();
                    e["im_x"] = c.center.x.imag();
                    e["re_y"] = c.center.y.real();
                    e["im_y"] = c.center.y.imag();
                    e["count"] = c.count;
                    e["min_degeneracy"] = c.min_degeneracy;
                    e["theta_at_center"] = c.theta_at_center;
                    arr.push_back(e);
                }
                doc["clusters"] = arr;
                break;
            }
            case Command::gauss_bonnet: {
                GramData gd = gram_matrix(spec, detail::quad_params_from(cfg));
                // the 1% consistency check does not need the Gram-level target
                auto gb = gauss_bonnet_total(spec, gd, detail::quad_params_from(cfg, 1e-4));
                nlohmann::ordered_json j;
                j["value"] = gb.value;
                j["expected"] = gb.expected;
                j["rel_error"] = gb.rel_error;
                j["quad_report"] = detail::quad_report_json(gb.report);
                doc["gauss_bonnet"] = j;
                if (gb.rel_error > cfg.tol_gb) exit_code = 2;
                break;
            }
            case Command::symprod: {
                GramData gd = gram_matrix(spec, detail::quad_params_from(cfg));
                Theorem1Report rep = run_theorem1_trials(spec, gd, cfg.d, cfg.trials, cfg.seed, cfg.tol_agree);
                nlohmann::ordered_json j;
                j["d"] = rep.d;
                j["trials"] = rep.trials;
                j["seed"] = rep.seed;
                j["max_rel_dev"] = rep.max_rel_dev;
                j["min_sigma_d"] = rep.min_sigma_d;
                j["cotangent_eig_min"] = rep.eig_min;
                j["cotangent_eig_max"] = rep.eig_max;
                j["tol_agree"] = rep.tol_agree;
                nlohmann::ordered_json fails = nlohmann::ordered_json::array();
                for (int i : rep.failures) {
                    nlohmann::ordered_json e;
                    e["trial"] = i;
                    e["rel_dev"] = rep.per_trial[static_cast<std::size_t>(i)].rel_dev;
                    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
                    for (const auto& p : rep.per_trial[static_cast<std::size_t>(i)].points)
                        pts.push_back(nlohmann::ordered_json::array(
                            {p.x.real(), p.x.imag(), p.y.real(), p.y.imag()}));
                    e["points"] = pts;
                    fails.push_back(e);
                }
                j["failures"] = fails;
                doc["symprod"] = j;
                if (!rep.failures.empty()) exit_code = 2;
                break;
            }
        }

        std::string text = doc.dump(2) + "\n";
        if (!cfg.output.empty()) {
            std::ofstream f(cfg.output);
            if (!f) fail(errc::validation_error, "cannot open output file '" + cfg.output + "'");
            f << text;
        } else
            out << text;
        return exit_code;
    } catch (const error& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int run(const RunConfig& cfg) { return run(cfg, std::cout, std::cerr); }

} // namespace curvcanon

#endif
