#include "mpskit/cli.hpp"

#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpskit/bool_compile.hpp"
#include "mpskit/bool_expr.hpp"
#include "mpskit/error.hpp"
#include "mpskit/fit.hpp"
#include "mpskit/flatten.hpp"
#include "mpskit/gp.hpp"
#include "mpskit/serialize.hpp"

namespace mpskit {

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kSemanticFailure = 1;
constexpr int kInputError = 2;
constexpr int kResourceGuard = 3;

int exit_code_for(const Error& e) {
    return e.kind() == ErrorKind::SizeGuard ? kResourceGuard : kInputError;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw_error(ErrorKind::Parse, "bad number '" + item + "'");
        }
    }
    return out;
}

FeatureMap feature_map_by_name(const std::string& name) {
    if (name == "binary_indicator") return FeatureMap::binary_indicator();
    if (name == "affine_one") return FeatureMap::affine_one();
    if (name == "trig_pair") return FeatureMap::trig_pair();
    throw_error(ErrorKind::Parse, "unknown feature map '" + name + "'");
}

ScaleInvariantSigmoid sigma_by_name(const std::string& form, double c) {
    if (form == "reciprocal_shift") return ScaleInvariantSigmoid::reciprocal_shift(c);
    if (form == "scaled_logistic") return ScaleInvariantSigmoid::scaled_logistic(c);
    throw_error(ErrorKind::Parse, "unknown sigmoid form '" + form + "'");
}

TruthTable table_from_sources(const std::string& expr,
                              const std::string& expr_file,
                              const std::string& table_path,
                              std::size_t arity_flag) {
    const int sources = static_cast<int>(!expr.empty()) +
                        static_cast<int>(!expr_file.empty()) +
                        static_cast<int>(!table_path.empty());
    if (sources != 1) {
        throw_error(ErrorKind::InvalidArgument,
                    "give exactly one of --expr, --expr-file and --table");
    }
    if (!table_path.empty()) return load_table(read_file(table_path));
    std::string text = expr;
    if (!expr_file.empty()) {
        text = read_file(expr_file);
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
            text.pop_back();
        }
    }
    const auto ast = parse_expr(text);
    std::size_t arity = arity_flag != 0 ? arity_flag : ast->max_var();
    if (arity == 0) arity = 1;  // constant expressions default to one input
    return table_from_expr(*ast, arity);
}

json report_to_json(const ComplexityReport& r) {
    return json{{"arity", r.arity},
                {"m", r.term_count},
                {"m_minimized", r.term_count_minimized},
                {"parameter_count", r.parameter_count},
                {"parameter_count_minimized", r.parameter_count_minimized}};
}

void print_report(std::ostream& out, const ComplexityReport& r, bool as_json) {
    if (as_json) {
        out << report_to_json(r).dump(2) << "\n";
        return;
    }
    out << "arity                     " << r.arity << "\n"
        << "terms (m)                 " << r.term_count << "\n"
        << "terms minimized (m')      " << r.term_count_minimized << "\n"
        << "parameters                " << r.parameter_count << "\n"
        << "parameters minimized      " << r.parameter_count_minimized << "\n";
}

int cmd_compile(const std::string& expr, const std::string& expr_file,
                const std::string& table_path, std::size_t arity_flag,
                bool minimize_flag, const std::string& out_path, bool as_json,
                std::ostream& out) {
    const TruthTable table =
        table_from_sources(expr, expr_file, table_path, arity_flag);
    const Dnf dnf = to_dnf(table);
    const ComplexityReport report = complexity_report(dnf);
    const Dnf chosen = minimize_flag ? minimize(dnf) : dnf;
    const BooleanMps compiled = compile(chosen, table.arity);
    if (!out_path.empty()) {
        write_file(out_path, save_mps(compiled.mps, compiled.fms));
    }
    print_report(out, report, as_json);
    return kOk;
}

int cmd_verify(const std::string& mps_path, const std::string& expr,
               const std::string& expr_file, const std::string& table_path,
               std::size_t arity_flag, std::ostream& out) {
    const LoadedMps loaded = load_mps(read_file(mps_path));
    const TruthTable table =
        table_from_sources(expr, expr_file, table_path, arity_flag);
    const BooleanMps compiled{loaded.mps, loaded.fms};
    const VerifyResult r = verify_against_table(compiled, table);
    if (r.ok) {
        out << "PASS " << r.rows_checked << "/" << r.rows_checked << "\n";
        return kOk;
    }
    out << "FAIL at row " << r.first_mismatch_row << ": expected " << r.expected
        << ", got " << r.got << "\n";
    return kSemanticFailure;
}

int cmd_eval(const std::string& model_path, const std::string& x_text,
             bool activated, bool as_json, std::ostream& out) {
    const std::vector<double> x = parse_number_list(x_text);
    if (activated) {
        const ActivatedMps a = load_activated(read_file(model_path));
        const double v = eval_activated(a, x);
        if (as_json) {
            out << json{{"value", v}}.dump() << "\n";
        } else {
            out << std::setprecision(17) << v << "\n";
        }
        return kOk;
    }
    const LoadedMps loaded = load_mps(read_file(model_path));
    const auto v = contract(loaded.mps, loaded.fms, x);
    if (as_json) {
        out << json{{"value", v}}.dump() << "\n";
    } else {
        out << std::setprecision(17);
        for (std::size_t i = 0; i < v.size(); ++i) {
            out << v[i] << (i + 1 < v.size() ? " " : "\n");
        }
    }
    return kOk;
}

int cmd_flatten(const std::string& model_path, const std::string& out_path,
                bool names, bool as_json, std::ostream& out) {
    const std::string text = read_file(model_path);
    const json doc = json::parse(text, nullptr, false);
    FlatNetwork flat;
    if (!doc.is_discarded() && doc.value("format", "") == "mpskit-activated") {
        flat = flatten(load_activated(text));
    } else {
        const LoadedMps loaded = load_mps(text);
        flat = flatten(loaded.mps, loaded.fms);
    }
    const std::string serialized = save_flat(flat, names);
    if (!out_path.empty()) write_file(out_path, serialized);
    if (as_json || out_path.empty()) out << serialized;
    return kOk;
}

int cmd_add(const std::string& a_path, const std::string& b_path,
            const std::string& out_path, bool shared_kernel, std::ostream& out) {
    const auto fallback = ScaleInvariantSigmoid::scaled_logistic(1.0);
    const ActivatedMps a = load_activated_or_wrap(read_file(a_path), fallback);
    const ActivatedMps b = load_activated_or_wrap(read_file(b_path), fallback);
    const ActivatedMps sum = shared_kernel ? add_shared_kernel(a, b) : add(a, b);
    write_file(out_path, save_activated(sum));
    out << "label_dim " << sum.label_dim() << "\n";
    return kOk;
}

int cmd_scale(const std::string& model_path, double k, const std::string& out_path,
              bool via_c, std::ostream& out) {
    const auto fallback = ScaleInvariantSigmoid::scaled_logistic(1.0);
    const ActivatedMps a = load_activated_or_wrap(read_file(model_path), fallback);
    const ActivatedMps scaled = via_c ? scale_via_c(a, k) : scale(a, k);
    write_file(out_path, save_activated(scaled));
    out << "scaled by " << k << (via_c ? " (C-reparameterization)" : "") << "\n";
    return kOk;
}

GpExperimentConfig gp_config_from_file(const std::string& path,
                                       std::uint64_t seed) {
    GpExperimentConfig cfg;
    cfg.seed = seed;
    std::size_t dataset_points = 8;
    if (!path.empty()) {
        const auto kv = parse_config(read_file(path));
        for (const auto& [key, value] : kv) {
            if (key == "widths") {
                cfg.widths.clear();
                for (const auto& w : split_list(value)) {
                    cfg.widths.push_back(std::stoul(w));
                }
            } else if (key == "n_sites") {
                cfg.n_sites = std::stoul(value);
            } else if (key == "chi") {
                cfg.chi = std::stoul(value);
            } else if (key == "n_samples") {
                cfg.n_samples = std::stoul(value);
            } else if (key == "init_std") {
                cfg.init_std = std::stod(value);
            } else if (key == "fm") {
                cfg.fm = feature_map_by_name(value);
            } else if (key == "widen") {
                if (value == "label") {
                    cfg.widen = GpWiden::Label;
                } else if (value == "phys") {
                    cfg.widen = GpWiden::Phys;
                } else {
                    throw_error(ErrorKind::Parse, "widen must be label or phys");
                }
            } else if (key == "dist") {
                if (value == "normal") {
                    cfg.dist = GpDist::Normal;
                } else if (value == "uniform") {
                    cfg.dist = GpDist::Uniform;
                } else {
                    throw_error(ErrorKind::Parse, "dist must be normal or uniform");
                }
            } else if (key == "freeze_env") {
                cfg.freeze_env = value == "1" || value == "true";
            } else if (key == "dataset_points") {
                dataset_points = std::stoul(value);
            } else {
                throw_error(ErrorKind::Parse, "unknown gp config key '" + key + "'");
            }
        }
    }
    cfg.dataset = GpExperimentConfig::default_dataset(cfg.n_sites, dataset_points);
    return cfg;
}

void print_gp_report(std::ostream& out, const GpExperimentConfig& cfg,
                     const GpReport& report) {
    out << "gp-check: n_sites=" << cfg.n_sites << " chi=" << cfg.chi
        << " samples=" << cfg.n_samples << " points=" << cfg.dataset.size()
        << " widen=" << (cfg.widen == GpWiden::Label ? "label" : "phys") << "\n";
    for (const auto& w : report.warnings) out << "warning: " << w << "\n";
    out << std::left << std::setw(8) << "width" << std::setw(16)
        << "median|kurt|" << std::setw(14) << "max|skew|" << std::setw(12)
        << "min p" << "\n";
    for (const auto& wr : report.widths) {
        double max_skew = 0.0, min_p = 1.0;
        for (std::size_t j = 0; j < wr.point_moments.size(); ++j) {
            max_skew = std::max(max_skew, std::abs(wr.point_moments[j].skewness));
            min_p = std::min(min_p, wr.normality[j].p_value);
        }
        out << std::left << std::setw(8) << wr.width << std::setw(16)
            << wr.median_abs_excess_kurtosis << std::setw(14) << max_skew
            << std::setw(12) << min_p << "\n";
    }
}

json gp_report_to_json(const GpReport& report) {
    json widths = json::array();
    for (const auto& wr : report.widths) {
        json points = json::array();
        for (std::size_t j = 0; j < wr.point_moments.size(); ++j) {
            points.push_back(json{{"mean", wr.point_moments[j].mean},
                                  {"variance", wr.point_moments[j].variance},
                                  {"skewness", wr.point_moments[j].skewness},
                                  {"excess_kurtosis",
                                   wr.point_moments[j].excess_kurtosis},
                                  {"normality_p", wr.normality[j].p_value}});
        }
        widths.push_back(json{{"width", wr.width},
                              {"median_abs_excess_kurtosis",
                               wr.median_abs_excess_kurtosis},
                              {"points", points},
                              {"covariance", wr.covariance},
                              {"covariance_se", wr.covariance_se}});
    }
    return json{{"widths", widths}, {"warnings", report.warnings}};
}

int cmd_gp_check(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_path, const std::string& csv_path,
                 bool as_json, std::ostream& out) {
    const GpExperimentConfig cfg = gp_config_from_file(config_path, seed);
    const GpReport report = run_gp_experiment(cfg);

    std::ostringstream text;
    text << std::setprecision(6);
    print_gp_report(text, cfg, report);
    if (!out_path.empty()) write_file(out_path, text.str());
    if (as_json) {
        out << gp_report_to_json(report).dump(2) << "\n";
    } else {
        out << text.str();
    }
    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << std::setprecision(17)
            << "width,point,mean,variance,skewness,excess_kurtosis,normality_p\n";
        for (const auto& wr : report.widths) {
            for (std::size_t j = 0; j < wr.point_moments.size(); ++j) {
                const auto& m = wr.point_moments[j];
                csv << wr.width << ',' << j << ',' << m.mean << ',' << m.variance
                    << ',' << m.skewness << ',' << m.excess_kurtosis << ','
                    << wr.normality[j].p_value << "\n";
            }
        }
        write_file(csv_path, csv.str());
    }
    return kOk;
}

FitConfig fit_config_from_file(const std::string& path, std::uint64_t seed) {
    FitConfig cfg;
    cfg.seed = seed;
    std::size_t grid_points = 64;
    double sigma_c = 1.0;
    std::string sigma_form = "scaled_logistic";
    if (!path.empty()) {
        const auto kv = parse_config(read_file(path));
        for (const auto& [key, value] : kv) {
            if (key == "target") {
                cfg.target = value;
            } else if (key == "grid_points") {
                grid_points = std::stoul(value);
            } else if (key == "n_sites") {
                cfg.n_sites = std::stoul(value);
            } else if (key == "chi") {
                cfg.chi = std::stoul(value);
            } else if (key == "label_dim") {
                cfg.label_dim = std::stoul(value);
            } else if (key == "fm") {
                cfg.fm = feature_map_by_name(value);
            } else if (key == "sigma_form") {
                sigma_form = value;
            } else if (key == "sigma_c") {
                sigma_c = std::stod(value);
            } else if (key == "identity_activation") {
                cfg.identity_activation = value == "1" || value == "true";
            } else if (key == "lr") {
                cfg.learning_rate = std::stod(value);
            } else if (key == "iterations") {
                cfg.iterations = std::stoul(value);
            } else if (key == "grad") {
                if (value == "analytic") {
                    cfg.grad_mode = GradMode::Analytic;
                } else if (value == "fd") {
                    cfg.grad_mode = GradMode::FiniteDiff;
                } else {
                    throw_error(ErrorKind::Parse, "grad must be analytic or fd");
                }
            } else if (key == "init_std") {
                cfg.init_std = std::stod(value);
            } else if (key == "zero_init") {
                cfg.zero_init = value == "1" || value == "true";
            } else {
                throw_error(ErrorKind::Parse, "unknown fit config key '" + key + "'");
            }
        }
    }
    cfg.sigma = sigma_by_name(sigma_form, sigma_c);
    if (cfg.n_sites == 1) {
        cfg.grid = uniform_grid_1d(grid_points);
    } else {
        // Low-discrepancy grid over the unit cube.
        cfg.grid = GpExperimentConfig::default_dataset(cfg.n_sites, 16);
    }
    return cfg;
}

int cmd_fit(const std::string& config_path, std::uint64_t seed,
            const std::string& target_flag, std::size_t d_flag,
            const std::string& out_path, bool as_json, std::ostream& out) {
    FitConfig cfg = fit_config_from_file(config_path, seed);
    if (!target_flag.empty()) cfg.target = target_flag;
    if (d_flag != 0) cfg.label_dim = d_flag;

    const double gc = grad_check(random_activated(cfg.n_sites, cfg.chi,
                                                  cfg.label_dim, cfg.fm, cfg.sigma,
                                                  cfg.seed, cfg.init_std),
                                 cfg.grid[cfg.grid.size() / 2], 1e-5,
                                 cfg.identity_activation, cfg.seed);
    const FitResult result = fit_activated_mps(cfg);
    if (!out_path.empty()) write_file(out_path, save_activated(result.model));

    if (as_json) {
        json j{{"target", cfg.target},
               {"label_dim", cfg.label_dim},
               {"iterations", cfg.iterations},
               {"grad_check", gc},
               {"sup_error", result.sup_error},
               {"diverged", result.diverged},
               {"max_loss_ratio", result.max_loss_ratio},
               {"error_curve", result.error_curve},
               {"loss_curve", result.loss_curve}};
        if (result.diverged) j["diverged_at"] = result.diverged_at;
        out << j.dump(2) << "\n";
    } else {
        out << std::setprecision(6) << "target " << cfg.target << ", D "
            << cfg.label_dim << ", iterations " << cfg.iterations << "\n"
            << "grad_check " << gc << "\n"
            << "sup_error " << result.sup_error << "\n";
        if (result.diverged) {
            out << "DIVERGED at iteration " << result.diverged_at << "\n";
        }
    }
    return kOk;
}

int cmd_report(const std::string& expr, const std::string& expr_file,
               const std::string& table_path, std::size_t arity_flag,
               bool as_json, std::ostream& out) {
    const TruthTable table =
        table_from_sources(expr, expr_file, table_path, arity_flag);
    print_report(out, complexity_report(to_dnf(table)), as_json);
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"MPS toolkit: boolean compilation, algebra, flattening and "
                 "width experiments"};
    app.require_subcommand(1);

    std::string expr, expr_file, table_path, mps_path, out_path, model_path;
    std::string a_path, b_path;
    std::string x_text, config_path, csv_path, target_flag;
    std::size_t arity_flag = 0, d_flag = 0;
    std::uint64_t seed = 0;
    double k = 1.0;
    bool minimize_flag = false, as_json = false, activated = false;
    bool names = false, shared_kernel = false, via_c = false;

    auto* compile_cmd = app.add_subcommand("compile", "compile a boolean function");
    compile_cmd->add_option("--expr", expr, "boolean expression");
    compile_cmd->add_option("--expr-file", expr_file, "boolean expression file");
    compile_cmd->add_option("--table", table_path, "truth table file");
    compile_cmd->add_option("--arity", arity_flag, "override arity");
    compile_cmd->add_flag("--minimize", minimize_flag, "compile the minimized cover");
    compile_cmd->add_option("--out", out_path, "output MPS path");
    compile_cmd->add_flag("--json", as_json, "machine-readable report");

    auto* verify_cmd = app.add_subcommand("verify", "verify an MPS against a table");
    verify_cmd->add_option("--mps", mps_path, "MPS path")->required();
    verify_cmd->add_option("--table", table_path, "truth table file");
    verify_cmd->add_option("--expr", expr, "boolean expression");
    verify_cmd->add_option("--expr-file", expr_file, "boolean expression file");
    verify_cmd->add_option("--arity", arity_flag, "override arity");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on one input");
    eval_cmd->add_option("--model", model_path, "model path")->required();
    eval_cmd->add_option("--x", x_text, "comma-separated input")->required();
    eval_cmd->add_flag("--activated", activated, "treat as activated model");
    eval_cmd->add_flag("--json", as_json, "JSON output");

    auto* flatten_cmd = app.add_subcommand("flatten", "flatten to the explicit network");
    flatten_cmd->add_option("--model", model_path, "model path")->required();
    flatten_cmd->add_option("--out", out_path, "output path");
    flatten_cmd->add_flag("--names", names, "include monomial names");
    flatten_cmd->add_flag("--json", as_json, "print the document");

    auto* add_cmd = app.add_subcommand("add", "sum of two activated models");
    add_cmd->add_option("--a", a_path, "first model")->required();
    add_cmd->add_option("--b", b_path, "second model")->required();
    add_cmd->add_option("--out", out_path, "output path")->required();
    add_cmd->add_flag("--shared-kernel", shared_kernel,
                      "bond-only sum for identical feature maps");

    auto* scale_cmd = app.add_subcommand("scale", "scalar multiple of a model");
    scale_cmd->add_option("--model", model_path, "model path")->required();
    scale_cmd->add_option("--k", k, "factor")->required();
    scale_cmd->add_option("--out", out_path, "output path")->required();
    scale_cmd->add_flag("--via-c", via_c, "use the C-reparameterization");

    auto* gp_cmd = app.add_subcommand("gp-check", "Gaussian-limit width experiment");
    gp_cmd->add_option("--config", config_path, "key=value config file");
    gp_cmd->add_option("--seed", seed, "master seed")->required();
    gp_cmd->add_option("--out", out_path, "report file");
    gp_cmd->add_option("--csv", csv_path, "per-point CSV file");
    gp_cmd->add_flag("--json", as_json, "JSON report");

    auto* fit_cmd = app.add_subcommand("fit", "fit an activated model to a target");
    fit_cmd->add_option("--config", config_path, "key=value config file");
    fit_cmd->add_option("--seed", seed, "master seed")->required();
    fit_cmd->add_option("--target", target_flag, "target override");
    fit_cmd->add_option("--d", d_flag, "label dim override");
    fit_cmd->add_option("--out", out_path, "fitted model path");
    fit_cmd->add_flag("--json", as_json, "JSON result");

    auto* report_cmd = app.add_subcommand("report", "complexity report only");
    report_cmd->add_option("--expr", expr, "boolean expression");
    report_cmd->add_option("--expr-file", expr_file, "boolean expression file");
    report_cmd->add_option("--table", table_path, "truth table file");
    report_cmd->add_option("--arity", arity_flag, "override arity");
    report_cmd->add_flag("--json", as_json, "JSON output");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (compile_cmd->parsed()) {
            return cmd_compile(expr, expr_file, table_path, arity_flag,
                               minimize_flag, out_path, as_json, out);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(mps_path, expr, expr_file, table_path,
                              arity_flag, out);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(model_path, x_text, activated, as_json, out);
        }
        if (flatten_cmd->parsed()) {
            return cmd_flatten(model_path, out_path, names, as_json, out);
        }
        if (add_cmd->parsed()) {
            return cmd_add(a_path, b_path, out_path, shared_kernel, out);
        }
        if (scale_cmd->parsed()) {
            return cmd_scale(model_path, k, out_path, via_c, out);
        }
        if (gp_cmd->parsed()) {
            return cmd_gp_check(config_path, seed, out_path, csv_path, as_json, out);
        }
        if (fit_cmd->parsed()) {
            return cmd_fit(config_path, seed, target_flag, d_flag, out_path,
                           as_json, out);
        }
        if (report_cmd->parsed()) {
            return cmd_report(expr, expr_file, table_path, arity_flag,
                              as_json, out);
        }
        err << "error: no subcommand\n";
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace mpskit
