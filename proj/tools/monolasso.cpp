#include <CLI11.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "monolasso/errors.hpp"
#include "monolasso/experiments.hpp"
#include "monolasso/io.hpp"
#include "monolasso/lars.hpp"
#include "monolasso/monotonicity.hpp"
#include "monolasso/stagewise.hpp"

using nlohmann::json;
using namespace monolasso;

namespace {

struct DataArgs {
    std::string input;
    long response_col = -1;
};

void add_data_options(CLI::App* sub, DataArgs& args) {
    sub->add_option("--input", args.input, "CSV file with predictors and response (- for stdin)");
    sub->add_option("--response-col", args.response_col, "0-based response column; negative counts from the end")
        ->capture_default_str();
}

Dataset load_data(const DataArgs& args) {
    if (args.input.empty()) throw ConfigError("--input is required");
    CsvOptions opt;
    opt.response_column = args.response_col;
    if (args.input == "-") return read_dataset_csv(std::cin, opt);
    return read_dataset_csv(args.input, opt);
}

json dataset_summary(const Dataset& d) {
    return {{"n", d.n()}, {"p", d.p()}, {"feature_names", d.feature_names}};
}

void emit_path(const std::string& out, const PiecewiseLinearPath& path, const json& metadata) {
    if (out.empty() || out == "-") {
        std::cout << path_to_json(path, metadata).dump(1) << '\n';
        return;
    }
    save_path(out, path, metadata);
}

std::ofstream open_output(const std::string& file) {
    std::ofstream out(file);
    if (!out) throw ConfigError("cannot write '" + file + "'");
    return out;
}

IndexBy parse_index(const std::string& name) {
    if (name == "norm") return IndexBy::norm;
    if (name == "arclength" || name == "arc-length") return IndexBy::arc_length;
    if (name == "native") return IndexBy::native;
    throw ConfigError("unknown index '" + name + "' (norm, arclength, native)");
}

LossModel parse_loss(const std::string& name) {
    if (name == "squared") return squared_error_loss();
    if (name == "logistic") return logistic_loss();
    throw ConfigError("unknown loss '" + name + "' (squared, logistic)");
}

std::string label_for(const std::string& file) { return std::filesystem::path(file).stem().string(); }

json original_scale(const StandardizedDesign& s, const PiecewiseLinearPath& path) {
    json coefficients = json::array();
    json intercepts = json::array();
    for (const Vector& v : path.vertices()) {
        const Vector beta = collapse(v);
        const Vector raw = s.to_original_scale(beta);
        coefficients.push_back(std::vector<double>(raw.data(), raw.data() + raw.size()));
        intercepts.push_back(s.intercept(beta));
    }
    return {{"coefficients", coefficients}, {"intercepts", intercepts}};
}

std::vector<int> parse_signs(const std::vector<std::string>& items) {
    std::vector<int> out;
    for (const auto& s : items) {
        if (s == "+" || s == "1" || s == "+1") out.push_back(1);
        else if (s == "-" || s == "-1") out.push_back(-1);
        else throw ConfigError("sign '" + s + "' is not + or -");
    }
    return out;
}

json subset_json(const SignedSubset& s, const Vector& v) {
    return {{"indices", s.indices}, {"signs", s.signs}, {"v", std::vector<double>(v.data(), v.data() + v.size())}};
}

// Values from --config become option defaults, so explicit flags still win.
void apply_config(CLI::App* sub, const json& doc) {
    json merged = json::object();
    for (const auto& [key, value] : doc.items())
        if (!value.is_object()) merged[key] = value;
    if (doc.contains(sub->get_name()) && doc[sub->get_name()].is_object())
        for (const auto& [key, value] : doc[sub->get_name()].items()) merged[key] = value;

    for (const auto& [key, value] : merged.items()) {
        CLI::Option* opt = nullptr;
        try {
            opt = sub->get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw ConfigError("unknown key '" + key + "' in config for '" + sub->get_name() + "'");
        }
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_boolean()) {
            text = value.get<bool>() ? "true" : "false";
        } else if (value.is_array()) {
            for (const auto& item : value) {
                if (!text.empty()) text += ',';
                text += item.is_string() ? item.get<std::string>() : item.dump();
            }
        } else {
            text = value.dump();
        }
        opt->default_val(text);
    }
}

json typed(const std::string& text) {
    if (text.empty()) return nullptr;
    if (text == "true") return true;
    if (text == "false") return false;
    try {
        const double v = parse_double(text, 0);
        if (v == std::trunc(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
        return v;
    } catch (const ParseError&) {
        return text;
    }
}

json resolved_config(const CLI::App* sub) {
    json out = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_lnames().empty() ? std::string() : opt->get_lnames().front();
        if (name.empty() || name == "help") continue;
        if (opt->count() == 0) {
            out[name] = typed(opt->get_default_str());
        } else if (opt->get_expected_max() > 1) {
            json items = json::array();
            for (const auto& r : opt->results()) items.push_back(typed(r));
            out[name] = items;
        } else {
            out[name] = typed(opt->results().back());
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and incremental L1 coefficient paths (lasso, LAR, forward stagewise)"};
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "JSON file with option defaults (flags override)");

    // solve
    DataArgs solve_data;
    std::string solve_method = "lasso", solve_out;
    std::optional<double> stop_norm;
    int solve_max_steps = 0;
    bool solve_original = false;
    CLI::App* solve = app.add_subcommand("solve", "Exact piecewise-linear path (lar, lasso or fs0)");
    add_data_options(solve, solve_data);
    solve->add_option("--method", solve_method, "lar | lasso | fs0")->capture_default_str();
    solve->add_option("--out", solve_out, "output file (.json or .csv); stdout JSON when omitted");
    solve->add_option("--stop-norm", stop_norm, "stop when the path index reaches this value");
    solve->add_option("--max-steps", solve_max_steps, "segment budget (0: automatic)")->capture_default_str();
    solve->add_flag("--original-scale", solve_original, "add original-scale coefficients to the metadata")->default_str("false");

    // stagewise
    DataArgs sw_data;
    double epsilon = 0.01;
    std::string sw_loss = "squared", sw_out;
    long sw_max_iter = 1'000'000;
    int sw_stride = 1, sw_sweep = 0;
    bool sw_euler = false;
    CLI::App* stagewise = app.add_subcommand("stagewise", "Incremental forward stagewise (epsilon steps)");
    add_data_options(stagewise, sw_data);
    stagewise->add_option("--epsilon", epsilon, "step size")->capture_default_str();
    stagewise->add_option("--loss", sw_loss, "squared | logistic")->capture_default_str();
    stagewise->add_option("--max-iter", sw_max_iter, "iteration budget")->capture_default_str();
    stagewise->add_option("--stride", sw_stride, "record every k-th step")->capture_default_str();
    stagewise->add_option("--sweep", sw_sweep, "halve epsilon this many times and print the distance to fs0")
        ->capture_default_str();
    stagewise->add_flag("--euler", sw_euler, "integrate the loss-aware monotone path with step epsilon instead")->default_str("false");
    stagewise->add_option("--out", sw_out, "output file (.json or .csv)");

    // check-monotone
    DataArgs cm_data;
    int max_subset = 0;
    unsigned threads = 1;
    bool emit_violation = false, allow_large = false;
    std::vector<Index> subset_indices;
    std::vector<std::string> subset_signs;
    CLI::App* check = app.add_subcommand("check-monotone", "Check the signed-subset monotonicity condition");
    add_data_options(check, cm_data);
    check->add_option("--max-subset", max_subset, "largest subset size (0: all)")->capture_default_str();
    check->add_option("--threads", threads, "worker threads")->envname("MONOLASSO_THREADS")->capture_default_str();
    check->add_flag("--emit-violation", emit_violation, "print the violating subset, signs and v")->default_str("false");
    check->add_flag("--allow-large", allow_large, "permit exhaustive search for p > 12")->default_str("false");
    check->add_option("--subset", subset_indices, "check one subset (0-based indices)")->delimiter(',');
    check->add_option("--signs", subset_signs, "signs for --subset (+ or -)")->delimiter(',');

    // simulate
    std::string sim_kind = "sine", sim_basis = "piecewise-linear", sim_out, sim_truth;
    std::uint64_t sim_seed = 0;
    long sim_n = 0, sim_p = 200, sim_block = 20;
    double sim_rho = 0.95, sim_sigma2 = 36.0, sim_noise = 0.25;
    std::vector<double> sim_knots;
    long sim_mc = 0;
    unsigned sim_threads = 1;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate the sine or block-Gaussian example data");
    simulate->add_option("--kind", sim_kind, "sine | block")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "random seed")->capture_default_str();
    simulate->add_option("--n", sim_n, "observations (0: 300 for sine, 60 for block)")->capture_default_str();
    simulate->add_option("--basis", sim_basis, "sine: piecewise-linear | piecewise-constant")->capture_default_str();
    simulate->add_option("--knots", sim_knots, "sine: knot locations")->delimiter(',');
    simulate->add_option("--noise-scale", sim_noise, "sine: noise multiplier")->capture_default_str();
    simulate->add_option("--p", sim_p, "block: predictors")->capture_default_str();
    simulate->add_option("--block", sim_block, "block: block size")->capture_default_str();
    simulate->add_option("--rho", sim_rho, "block: within-block correlation")->capture_default_str();
    simulate->add_option("--sigma2", sim_sigma2, "block: noise variance")->capture_default_str();
    simulate->add_option("--noise-to-signal", sim_mc, "block: Monte Carlo replications for the noise-to-signal ratio")
        ->capture_default_str();
    simulate->add_option("--threads", sim_threads, "worker threads")->envname("MONOLASSO_THREADS")->capture_default_str();
    simulate->add_option("--out", sim_out, "CSV output (stdout when omitted)");
    simulate->add_option("--truth", sim_truth, "block: write true coefficients as JSON");

    // diagnose
    DataArgs dg_data;
    bool dg_rss = false, dg_compare = false, dg_mse = false;
    std::string dg_index = "norm", dg_holdout, dg_out;
    std::vector<std::string> dg_paths;
    int dg_grid = 101;
    double dg_threshold = 1e-8;
    CLI::App* diagnose = app.add_subcommand("diagnose", "RSS curves, path comparison and holdout MSE");
    add_data_options(diagnose, dg_data);
    auto* rss_flag = diagnose->add_flag("--rss", dg_rss, "RSS curve of each path")->default_str("false");
    auto* cmp_flag = diagnose->add_flag("--compare", dg_compare, "sup-difference and divergence of two paths")->default_str("false");
    auto* mse_flag = diagnose->add_flag("--mse", dg_mse, "holdout MSE on the fractional L1 grid")->default_str("false");
    rss_flag->excludes(cmp_flag)->excludes(mse_flag);
    cmp_flag->excludes(mse_flag);
    diagnose->add_option("--path", dg_paths, "path file(s) (.json or .csv)");
    diagnose->add_option("--index", dg_index, "norm | arclength | native")->capture_default_str();
    diagnose->add_option("--grid", dg_grid, "grid points")->capture_default_str();
    diagnose->add_option("--threshold", dg_threshold, "divergence threshold")->capture_default_str();
    diagnose->add_option("--holdout", dg_holdout, "holdout CSV whose response column holds the target");
    diagnose->add_option("--out", dg_out, "curves CSV (stdout when omitted)");

    // certify
    DataArgs ct_data;
    std::string ct_path;
    double ct_tol = 1e-8;
    CLI::App* certify = app.add_subcommand("certify", "KKT certificate for every vertex of a lasso path");
    add_data_options(certify, ct_data);
    certify->add_option("--path", ct_path, "lasso path file");
    certify->add_option("--tolerance", ct_tol, "relative tolerance")->capture_default_str();

    try {
        try {
            // --config is read before parsing so its values can serve as defaults.
            CLI::App* chosen = nullptr;
            for (int i = 1; i < argc; ++i) {
                if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) config_file = argv[++i];
                else if (!chosen) {
                    for (CLI::App* candidate : app.get_subcommands({}))
                        if (candidate->get_name() == argv[i]) chosen = candidate;
                }
            }
            if (!config_file.empty() && chosen) {
                std::ifstream in(config_file);
                if (!in) throw ConfigError("cannot open config '" + config_file + "'");
                json doc;
                try {
                    in >> doc;
                } catch (const json::exception& e) {
                    throw ConfigError("config '" + config_file + "' is not valid JSON: " + e.what());
                }
                if (!doc.is_object()) throw ConfigError("config must be a JSON object");
                apply_config(chosen, doc);
            }
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            return app.exit(e) == 0 ? 0 : 2;
        }

        CLI::App* sub = app.get_subcommands().front();
        std::cerr << "resolved config: " << json{{sub->get_name(), resolved_config(sub)}}.dump() << '\n';

        if (sub == solve) {
            const Dataset data = load_data(solve_data);
            const ExpandedDesign design{standardize(data)};
            SolverConfig cfg;
            cfg.mode = parse_path_mode(solve_method);
            cfg.max_steps = solve_max_steps;
            cfg.stop_l1_norm = stop_norm;
            json meta = {{"method", solve_method}, {"data", dataset_summary(data)}};
            PiecewiseLinearPath path;
            int status = 0;
            try {
                path = solve_path(design, cfg);
            } catch (const StepBudgetError& e) {
                std::cerr << "error: " << e.what() << " (partial path written)\n";
                path = e.partial;
                status = e.exit_code();
            }
            if (solve_original) meta["original_scale"] = original_scale(design.base(), path);
            emit_path(solve_out, path, meta);
            return status;
        }

        if (sub == stagewise) {
            const Dataset data = load_data(sw_data);
            const LossModel loss = parse_loss(sw_loss);
            const ExpandedDesign design{standardize(data)};
            const Vector response = default_response(design, loss);
            StagewiseConfig cfg;
            cfg.epsilon = epsilon;
            cfg.max_iterations = sw_max_iter;
            cfg.record_stride = sw_stride;
            if (sw_sweep > 0) {
                if (loss.kind() != LossKind::squared_error) throw ConfigError("--sweep needs the squared loss");
                SolverConfig fs0;
                fs0.mode = PathMode::fs0;
                const PiecewiseLinearPath exact = solve_path(design, fs0);
                std::cout << "epsilon,iterations,sup_distance\n";
                double eps = epsilon;
                for (int k = 0; k <= sw_sweep; ++k, eps /= 2.0) {
                    cfg.epsilon = eps;
                    const StagewiseResult r = monotone_incremental(design, cfg);
                    std::cout << format_double(eps) << ',' << r.iterations << ','
                              << format_double(compare_paths(r.path, exact, IndexBy::native).sup_difference) << '\n';
                }
                return 0;
            }
            json meta = {{"loss", sw_loss}, {"epsilon", epsilon}, {"data", dataset_summary(data)}};
            if (sw_euler) {
                StepControl ctl;
                ctl.step = epsilon;
                ctl.max_steps = sw_max_iter;
                ctl.record_stride = sw_stride;
                const IntegrationResult r = integrate_monotone_path(design, response, loss, ctl);
                meta["method"] = "euler";
                meta["steps"] = r.steps;
                meta["halvings"] = r.halvings;
                emit_path(sw_out, r.path, meta);
                return r.path.truncated ? 4 : 0;
            }
            const StagewiseResult r = loss.kind() == LossKind::squared_error
                                          ? monotone_incremental(design, cfg)
                                          : generalized_monotone_incremental(design, response, loss, cfg);
            meta["method"] = "epsilon";
            meta["iterations"] = r.iterations;
            emit_path(sw_out, r.path, meta);
            return r.path.truncated ? 4 : 0;
        }

        if (sub == check) {
            const StandardizedDesign design = standardize(load_data(cm_data));
            json out;
            if (!subset_indices.empty()) {
                const SignedSubset s{subset_indices, subset_signs.empty()
                                                         ? std::vector<int>(subset_indices.size(), 1)
                                                         : parse_signs(subset_signs)};
                const ConditionResult r = check_condition(design, s);
                out = {{"pass", r.pass}, {"checks", 1}};
                if (!r.pass || emit_violation) out["subset"] = subset_json(s, r.v);
            } else {
                ExhaustiveOptions opt;
                opt.max_subset_size = max_subset;
                opt.threads = std::max(1u, threads);
                opt.allow_large = allow_large;
                const ExhaustiveReport r = exhaustive_check(design, opt);
                out = {{"pass", r.pass}, {"checks", static_cast<long long>(r.checks)}};
                if (r.violation && emit_violation) out["violation"] = subset_json(*r.violation, r.v);
            }
            std::cout << out.dump(1) << '\n';
            return 0;
        }

        if (sub == simulate) {
            std::ofstream file;
            if (!sim_out.empty()) file = open_output(sim_out);
            std::ostream& out = sim_out.empty() ? std::cout : file;
            if (sim_kind == "sine") {
                SineSpec spec;
                spec.seed = sim_seed;
                if (sim_n > 0) spec.n = sim_n;
                spec.basis = parse_sine_basis(sim_basis);
                spec.noise_scale = sim_noise;
                if (!sim_knots.empty()) spec.knots = sim_knots;
                const SineData d = gen_sine(spec);
                for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
                write_dataset_csv(out, d.data);
                return 0;
            }
            if (sim_kind != "block") throw ConfigError("unknown kind '" + sim_kind + "' (sine, block)");
            BlockSpec spec;
            spec.seed = sim_seed;
            if (sim_n > 0) spec.n = sim_n;
            spec.p = sim_p;
            spec.block = sim_block;
            spec.rho = sim_rho;
            spec.sigma2 = sim_sigma2;
            spec.validate();
            if (sim_mc > 0) {
                const NoiseToSignalEstimate est = monte_carlo_noise_to_signal(spec, sim_seed, sim_mc, sim_threads);
                out << json{{"analytic", block_noise_to_signal(spec)},
                            {"monte_carlo", est.ratio},
                            {"signal_variance", est.signal_variance},
                            {"replications", sim_mc}}
                           .dump(1)
                    << '\n';
                return 0;
            }
            const BlockData d = gen_block(spec);
            write_dataset_csv(out, d.data);
            if (!sim_truth.empty()) {
                std::ofstream t = open_output(sim_truth);
                t << json{{"beta", std::vector<double>(d.beta.data(), d.beta.data() + d.beta.size())}}.dump() << '\n';
            }
            return 0;
        }

        if (sub == diagnose) {
            if (!dg_rss && !dg_compare && !dg_mse) throw ConfigError("choose one of --rss, --compare, --mse");
            if (dg_paths.empty()) throw ConfigError("--path is required");
            std::vector<PiecewiseLinearPath> paths;
            for (const auto& f : dg_paths) paths.push_back(load_path(f));
            const IndexBy by = parse_index(dg_index);
            if (dg_compare) {
                if (paths.size() != 2) throw ConfigError("--compare needs exactly two --path files");
                const PathComparison c = compare_paths(paths[0], paths[1], by, dg_threshold);
                json out = {{"sup_difference", c.sup_difference}, {"common_extent", c.common_extent}};
                out["divergence"] = c.divergence ? json(*c.divergence) : json(nullptr);
                std::cout << out.dump(1) << '\n';
                return 0;
            }
            const Dataset data = load_data(dg_data);
            const ExpandedDesign design{standardize(data)};
            std::vector<Curve> curves;
            if (dg_rss) {
                for (std::size_t k = 0; k < paths.size(); ++k)
                    curves.push_back(rss_profile(design, paths[k], by, dg_grid, label_for(dg_paths[k])));
            } else {
                if (dg_holdout.empty()) throw ConfigError("--mse needs --holdout");
                CsvOptions opt;
                opt.response_column = dg_data.response_col;
                const Dataset hold = read_dataset_csv(dg_holdout, opt);
                for (std::size_t k = 0; k < paths.size(); ++k)
                    curves.push_back(test_mse(design.base(), hold.x, hold.y, paths[k], dg_grid, label_for(dg_paths[k])));
            }
            std::ofstream file;
            if (!dg_out.empty()) file = open_output(dg_out);
            write_curves_csv(dg_out.empty() ? std::cout : file, curves);
            return 0;
        }

        if (sub == certify) {
            if (ct_path.empty()) throw ConfigError("--path is required");
            const ExpandedDesign design{standardize(load_data(ct_data))};
            const PiecewiseLinearPath path = load_path(ct_path);
            if (path.dimension() != design.size())
                throw ConfigError("path dimension does not match the data (" + std::to_string(path.dimension()) +
                                  " vs " + std::to_string(design.size()) + ")");
            json vertices = json::array();
            bool all = true;
            double worst = 0.0;
            for (std::size_t k = 0; k < path.vertices().size(); ++k) {
                const Vector& beta = path.vertices()[k];
                const double lambda = design.correlations(design.residual(beta)).maxCoeff();
                const KktReport r = kkt_certify(design, beta, std::max(lambda, 0.0), ct_tol);
                all = all && r.pass;
                worst = std::max(worst, r.worst_violation);
                vertices.push_back({{"vertex", k}, {"lambda", r.lambda}, {"pass", r.pass},
                                    {"worst_violation", r.worst_violation}});
            }
            std::cout << json{{"pass", all}, {"worst_violation", worst}, {"vertices", vertices}}.dump(1) << '\n';
            return all ? 0 : static_cast<int>(ErrorCategory::consistency);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::consistency);
    }
    return 0;
}
