// Command-line front end: gen-data, fit, sweep, bounds.
//
// Exit codes: 0 ok, 2 config/validation error, 3 I/O error, 4 parse error,
// 5 solver failure, 6 unknown method/kind. Every failure prints a
// machine-readable error JSON on stderr.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "drda/baselines.hpp"
#include "drda/bounds.hpp"
#include "drda/experiments.hpp"
#include "drda/kmm.hpp"
#include "drda/rng.hpp"
#include "drda/serialize.hpp"
#include "drda/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitSolver = 5;
constexpr int kExitUnknownName = 6;

struct CliError {
    int code;
    std::string kind;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& kind, const std::string& message) {
    throw CliError{code, kind, message};
}

struct RunConfig {
    drda::SyntheticConfig synthetic;
    drda::KernelConfig kernel{1.0};
    drda::SolverConfig solver;
    drda::SweepSpec sweep{.rho_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}};
    std::vector<int> sizes = {25, 50, 100, 200, 400};
    int threads = 0;  // 0 -> hardware concurrency
};

void reject_unknown(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) { ok = true; break; }
        if (!ok) fail(kExitValidation, "validation", "unknown config key: " + scope + key);
    }
}

template <typename T>
void load_field(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

drda::Method method_from_name(const std::string& name) {
    if (name == "RLS" || name == "rls") return drda::Method::RLS;
    if (name == "W-RLS" || name == "wrls") return drda::Method::WRLS;
    if (name == "W-DRO" || name == "wdro") return drda::Method::WDRO;
    if (name == "DRO" || name == "dro") return drda::Method::DRO;
    if (name == "DRDA" || name == "drda") return drda::Method::DRDA;
    fail(kExitUnknownName, "unknown-method", "unknown method: " + name);
}

void load_config_json(const json& j, RunConfig& cfg) {
    reject_unknown(j, "", {"synthetic", "kernel", "solver", "sweep", "threads"});

    if (j.contains("synthetic")) {
        const json& s = j.at("synthetic");
        reject_unknown(s, "synthetic.",
                       {"source_mean", "source_std", "target_mean", "target_std",
                        "label_noise_std", "sigma_for_g", "n_s", "n_t", "n_test",
                        "trials", "base_seed"});
        auto& sc = cfg.synthetic;
        load_field(s, "source_mean", sc.source_mean);
        load_field(s, "source_std", sc.source_std);
        load_field(s, "target_mean", sc.target_mean);
        load_field(s, "target_std", sc.target_std);
        load_field(s, "label_noise_std", sc.label_noise_std);
        load_field(s, "sigma_for_g", sc.sigma_for_g);
        load_field(s, "n_s", sc.n_s);
        load_field(s, "n_t", sc.n_t);
        load_field(s, "n_test", sc.n_test);
        load_field(s, "trials", sc.trials);
        load_field(s, "base_seed", sc.base_seed);
    }
    if (j.contains("kernel")) {
        const json& k = j.at("kernel");
        reject_unknown(k, "kernel.", {"bandwidth"});
        load_field(k, "bandwidth", cfg.kernel.bandwidth);
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        reject_unknown(s, "solver.",
                       {"beta", "lambda", "B", "c", "epsilon_mode", "delta", "outer_max",
                        "outer_tol", "alpha_max_iter", "alpha_grad_tol", "alpha_backtrack",
                        "alpha_armijo", "qp_tol", "qp_max_iter", "lambda_quartic",
                        "lambda_ridge", "sequential_warm_start"});
        auto& sv = cfg.solver;
        load_field(s, "beta", sv.beta);
        load_field(s, "lambda", sv.lambda);
        load_field(s, "B", sv.B);
        load_field(s, "c", sv.c);
        if (s.contains("epsilon_mode")) {
            const std::string mode = s.at("epsilon_mode").get<std::string>();
            if (mode == "user-lambda") sv.epsilon_mode = drda::EpsilonMode::UserLambda;
            else if (mode == "theorem1") sv.epsilon_mode = drda::EpsilonMode::Theorem1;
            else fail(kExitValidation, "validation", "epsilon_mode must be user-lambda or theorem1");
        }
        load_field(s, "delta", sv.delta);
        load_field(s, "outer_max", sv.outer_max);
        load_field(s, "outer_tol", sv.outer_tol);
        load_field(s, "alpha_max_iter", sv.alpha_step.max_iter);
        load_field(s, "alpha_grad_tol", sv.alpha_step.grad_tol);
        load_field(s, "alpha_backtrack", sv.alpha_step.backtrack);
        load_field(s, "alpha_armijo", sv.alpha_step.armijo);
        load_field(s, "qp_tol", sv.qp_tol);
        load_field(s, "qp_max_iter", sv.qp_max_iter);
        load_field(s, "lambda_quartic", sv.lambda_quartic);
        load_field(s, "lambda_ridge", sv.lambda_ridge);
        load_field(s, "sequential_warm_start", sv.sequential_warm_start);
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        reject_unknown(s, "sweep.", {"rho_grid", "perturb", "methods", "sizes"});
        load_field(s, "rho_grid", cfg.sweep.rho_grid);
        if (s.contains("perturb")) {
            const std::string p = s.at("perturb").get<std::string>();
            if (p == "features") cfg.sweep.perturb = drda::PerturbKind::Features;
            else if (p == "labels") cfg.sweep.perturb = drda::PerturbKind::Labels;
            else fail(kExitValidation, "validation", "perturb must be features or labels");
        }
        if (s.contains("methods")) {
            cfg.sweep.methods.clear();
            for (const auto& name : s.at("methods"))
                cfg.sweep.methods.push_back(method_from_name(name.get<std::string>()));
        }
        load_field(s, "sizes", cfg.sizes);
    }
    load_field(j, "threads", cfg.threads);
}

json echo_config(const RunConfig& cfg) {
    json j;
    const auto& sc = cfg.synthetic;
    j["synthetic"] = {{"source_mean", sc.source_mean}, {"source_std", sc.source_std},
                      {"target_mean", sc.target_mean}, {"target_std", sc.target_std},
                      {"label_noise_std", sc.label_noise_std}, {"sigma_for_g", sc.sigma_for_g},
                      {"n_s", sc.n_s}, {"n_t", sc.n_t}, {"n_test", sc.n_test},
                      {"trials", sc.trials}, {"base_seed", sc.base_seed}};
    j["kernel"] = {{"bandwidth", cfg.kernel.bandwidth}};
    const auto& sv = cfg.solver;
    j["solver"] = {
        {"beta", sv.beta}, {"lambda", sv.lambda}, {"B", sv.B}, {"c", sv.c},
        {"epsilon_mode", sv.epsilon_mode == drda::EpsilonMode::Theorem1 ? "theorem1" : "user-lambda"},
        {"delta", sv.delta}, {"outer_max", sv.outer_max}, {"outer_tol", sv.outer_tol},
        {"alpha_max_iter", sv.alpha_step.max_iter}, {"alpha_grad_tol", sv.alpha_step.grad_tol},
        {"alpha_backtrack", sv.alpha_step.backtrack}, {"alpha_armijo", sv.alpha_step.armijo},
        {"qp_tol", sv.qp_tol}, {"qp_max_iter", sv.qp_max_iter},
        {"lambda_quartic", sv.lambda_quartic}, {"lambda_ridge", sv.lambda_ridge},
        {"sequential_warm_start", sv.sequential_warm_start}};
    json methods = json::array();
    for (auto m : cfg.sweep.methods) methods.push_back(drda::method_name(m));
    j["sweep"] = {{"rho_grid", cfg.sweep.rho_grid},
                  {"perturb", cfg.sweep.perturb == drda::PerturbKind::Features ? "features" : "labels"},
                  {"methods", methods},
                  {"sizes", cfg.sizes}};
    j["threads"] = cfg.threads;
    return j;
}

json parse_json_file(const fs::path& path) {
    std::string text;
    try {
        text = drda::read_text_file(path);
    } catch (const std::exception& e) {
        fail(kExitIo, "io", e.what());
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(kExitParse, "parse", std::string("config parse error: ") + e.what());
    }
}

RunConfig load_config(const std::optional<std::string>& path) {
    RunConfig cfg;
    if (path) load_config_json(parse_json_file(*path), cfg);
    return cfg;
}

int resolve_threads(int requested) {
    int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    if (const char* cap = std::getenv("DRDA_THREADS")) {
        const int c = std::atoi(cap);
        if (c >= 1 && c < t) t = c;
    }
    return t;
}

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(kExitIo, "io", "cannot create output directory: " + dir.string());
}

void write_json(const fs::path& path, const json& j) {
    try {
        drda::write_text_file(path, j.dump(2) + "\n");
    } catch (const std::exception& e) {
        fail(kExitIo, "io", e.what());
    }
}

drda::Dataset load_dataset(const std::string& path) {
    try {
        return drda::read_dataset_csv(path);
    } catch (const drda::InvalidInput& e) {
        fail(kExitParse, "parse", e.what());
    } catch (const std::exception& e) {
        fail(kExitIo, "io", e.what());
    }
}

json rng_meta() {
    return {{"generator", drda::rng::generator_name()},
            {"streams",
             {{"0", "source features"},
              {"1", "target features"},
              {"2", "test features"},
              {"3", "source label noise"},
              {"4", "test label noise"},
              {"5+k", "test perturbation for rho index k"}}}};
}

// ---- subcommands ----

int cmd_gen_data(const RunConfig& cfg, const fs::path& out, int trial) {
    cfg.synthetic.check();
    const drda::TrialData d = drda::gen_synthetic(cfg.synthetic, trial);
    ensure_out_dir(out);
    try {
        drda::write_dataset_csv(out / "source.csv", d.source);
        drda::write_dataset_csv(out / "target.csv", d.target);
        drda::write_dataset_csv(out / "test.csv", d.test);
    } catch (const std::exception& e) {
        fail(kExitIo, "io", e.what());
    }
    json meta;
    meta["rng"] = rng_meta();
    meta["trial"] = trial;
    meta["config"] = echo_config(cfg);
    write_json(out / "meta.json", meta);
    write_json(out / "config_echo.json", echo_config(cfg));
    return kExitOk;
}

int cmd_fit(const RunConfig& cfg, const std::string& method_name,
            const std::string& source_path, const std::optional<std::string>& target_path,
            const fs::path& out) {
    const drda::Method method = method_from_name(method_name);
    const drda::Dataset source = load_dataset(source_path);
    if (!source.has_labels())
        fail(kExitValidation, "validation", "source data must carry labels");

    std::optional<drda::Dataset> target;
    if (target_path) target = load_dataset(*target_path);
    const bool needs_target = method == drda::Method::WRLS || method == drda::Method::WDRO ||
                              method == drda::Method::DRDA;
    if (needs_target && !target)
        fail(kExitValidation, "validation", "method requires --target data");

    ensure_out_dir(out);
    json report;
    report["method"] = drda::method_name(method);
    drda::RegressionModel model;
    try {
        switch (method) {
            case drda::Method::RLS:
                model = drda::fit_rls(source, cfg.kernel, cfg.solver.lambda);
                break;
            case drda::Method::WRLS: {
                auto fit = drda::fit_wrls(source, *target, cfg.kernel, cfg.solver.lambda,
                                          cfg.solver.B, cfg.solver.c);
                model = fit.model;
                report["weights"] = drda::weights_to_json(fit.weights);
                break;
            }
            case drda::Method::WDRO: {
                auto fit = drda::fit_wdro(source, *target, cfg.kernel, cfg.solver);
                model = fit.model;
                report["weights"] = drda::weights_to_json(fit.weights);
                break;
            }
            case drda::Method::DRO:
                model = drda::fit_dro_source_only(source, cfg.kernel, cfg.solver);
                break;
            case drda::Method::DRDA: {
                auto fit = drda::fit_drda(source, *target, cfg.kernel, cfg.solver);
                model = fit.model;
                report["weights"] = drda::weights_to_json(fit.weights);
                report["fit"] = drda::report_to_json(fit.report);
                break;
            }
        }
    } catch (const drda::SolverError& e) {
        fail(kExitSolver, "solver", e.what());
    }

    const double train_risk =
        (drda::predict(model, source.features) - source.y()).squaredNorm() /
        static_cast<double>(source.size());
    report["train_mean_sq_loss"] = train_risk;

    write_json(out / "model.json", drda::model_to_json(model));
    write_json(out / "report.json", report);
    write_json(out / "config_echo.json", echo_config(cfg));
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const std::string& kind, const fs::path& out) {
    drda::HarnessConfig harness;
    harness.kernel = cfg.kernel;
    harness.solver = cfg.solver;
    harness.threads = resolve_threads(cfg.threads);

    drda::ResultTable table;
    std::string stem;
    try {
        if (kind == "noise-x") {
            drda::SweepSpec spec = cfg.sweep;
            spec.perturb = drda::PerturbKind::Features;
            table = drda::run_noise_sweep(cfg.synthetic, spec, harness);
            stem = "noise_x";
        } else if (kind == "noise-y") {
            drda::SweepSpec spec = cfg.sweep;
            spec.perturb = drda::PerturbKind::Labels;
            table = drda::run_noise_sweep(cfg.synthetic, spec, harness);
            stem = "noise_y";
        } else if (kind == "size") {
            table = drda::run_size_sweep(cfg.synthetic, cfg.sizes, harness);
            stem = "size";
        } else {
            fail(kExitUnknownName, "unknown-kind", "unknown sweep kind: " + kind);
        }
    } catch (const drda::SolverError& e) {
        fail(kExitSolver, "solver", e.what());
    }

    ensure_out_dir(out);
    try {
        drda::write_result_table(out, stem, table);
    } catch (const std::exception& e) {
        fail(kExitIo, "io", e.what());
    }
    json meta;
    meta["rng"] = rng_meta();
    meta["kind"] = kind;
    meta["config"] = echo_config(cfg);
    write_json(out / "meta.json", meta);
    write_json(out / "config_echo.json", echo_config(cfg));
    return kExitOk;
}

int cmd_bounds(const RunConfig& cfg, const std::string& model_path,
               const std::string& source_path, const std::optional<std::string>& target_path,
               std::optional<int> n_t_flag, double B, double delta, double eta_floor,
               const fs::path& out) {
    drda::RegressionModel model;
    try {
        model = drda::model_from_json(parse_json_file(model_path));
    } catch (const drda::InvalidInput& e) {
        fail(kExitParse, "parse", e.what());
    }
    const drda::Dataset source = load_dataset(source_path);
    if (!source.has_labels())
        fail(kExitValidation, "validation", "bounds needs labeled source data");

    int n_t = 0;
    if (n_t_flag) n_t = *n_t_flag;
    else if (target_path) n_t = static_cast<int>(load_dataset(*target_path).size());
    else fail(kExitValidation, "validation", "bounds needs --target data or --n-t");

    drda::AmbiguityParams params;
    params.B = B;
    params.M = 1.0;
    params.n_s = static_cast<int>(source.size());
    params.n_t = n_t;
    params.delta = delta;

    const double risk =
        (drda::predict(model, source.features) - source.y()).squaredNorm() /
        static_cast<double>(source.size());
    const double eta = std::max(drda::rkhs_norm(model), eta_floor);
    if (!(eta > 0.0))
        fail(kExitValidation, "validation",
             "model RKHS norm is 0; set a positive --eta-floor");

    json cert;
    try {
        const drda::BoundCertificate c = drda::generalization_bound(risk, params, eta);
        cert["empirical_source_risk"] = c.empirical_source_risk;
        cert["radius"] = c.radius;
        cert["eta"] = c.eta;
        cert["bound_value"] = c.bound_value;
        cert["radius_weighted_source"] = drda::radius_weighted_source(params);
        cert["radius_empirical_target"] = drda::radius_empirical_target(params);
        cert["radius_target_in_transferred_set"] = c.radius;
        cert["params"] = {{"B", params.B}, {"M", params.M}, {"n_s", params.n_s},
                          {"n_t", params.n_t}, {"delta", params.delta}};
    } catch (const drda::InvalidInput& e) {
        fail(kExitValidation, "validation", e.what());
    }

    ensure_out_dir(out);
    write_json(out / "certificate.json", cert);
    std::cout << cert.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust domain adaptation for kernel regression"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed_flag;
    std::string out_dir = ".";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_flag, "override synthetic.base_seed");
    };

    auto* gen = app.add_subcommand("gen-data", "write source/target/test CSVs");
    int trial = 0;
    gen->add_option("--trial", trial, "trial index to materialize");
    add_common(gen);

    auto* fit = app.add_subcommand("fit", "fit one method and write model.json");
    std::string method;
    std::string source_path;
    std::optional<std::string> target_path;
    fit->add_option("--method", method, "rls|wrls|wdro|dro|drda")->required();
    fit->add_option("--source", source_path, "labeled source CSV")->required();
    fit->add_option("--target", target_path, "unlabeled target CSV");
    add_common(fit);

    auto* sweep = app.add_subcommand("sweep", "run an experiment sweep");
    std::string kind;
    sweep->add_option("--kind", kind, "noise-x|noise-y|size")->required();
    add_common(sweep);

    auto* bounds = app.add_subcommand("bounds", "emit a generalization-bound certificate");
    std::string model_path;
    std::string bounds_source;
    std::optional<std::string> bounds_target;
    std::optional<int> n_t_flag;
    double bound_B = 10.0;
    double bound_delta = 0.05;
    double eta_floor = 0.0;
    bounds->add_option("--model", model_path, "model.json")->required();
    bounds->add_option("--source", bounds_source, "labeled source CSV")->required();
    bounds->add_option("--target", bounds_target, "target CSV (for n_t)");
    bounds->add_option("--n-t", n_t_flag, "target sample size override");
    bounds->add_option("--B", bound_B, "weight bound B");
    bounds->add_option("--delta", bound_delta, "confidence level");
    bounds->add_option("--eta-floor", eta_floor, "lower bound for eta");
    add_common(bounds);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (seed_flag) cfg.synthetic.base_seed = *seed_flag;
        try {
            cfg.synthetic.check();
            cfg.kernel.check();
            cfg.solver.check();
        } catch (const drda::InvalidInput& e) {
            fail(kExitValidation, "validation", e.what());
        }

        if (gen->parsed()) return cmd_gen_data(cfg, out_dir, trial);
        if (fit->parsed()) return cmd_fit(cfg, method, source_path, target_path, out_dir);
        if (sweep->parsed()) return cmd_sweep(cfg, kind, out_dir);
        if (bounds->parsed())
            return cmd_bounds(cfg, model_path, bounds_source, bounds_target, n_t_flag,
                              bound_B, bound_delta, eta_floor, out_dir);
        return kExitValidation;
    } catch (const CliError& e) {
        json err;
        err["error"] = {{"code", e.code}, {"kind", e.kind}, {"message", e.message}};
        std::cerr << err.dump() << "\n";
        return e.code;
    } catch (const drda::InvalidInput& e) {
        json err;
        err["error"] = {{"code", kExitValidation}, {"kind", "validation"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return kExitValidation;
    } catch (const drda::SolverError& e) {
        json err;
        err["error"] = {{"code", kExitSolver}, {"kind", "solver"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"code", kExitIo}, {"kind", "io"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return kExitIo;
    }
}
