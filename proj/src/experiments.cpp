#include "drda/experiments.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <thread>

#include "drda/baselines.hpp"
#include "drda/rng.hpp"

namespace drda {

namespace {

enum StreamId : std::uint32_t {
    kSourceX = 0,
    kTargetX = 1,
    kTestX = 2,
    kSourceNoise = 3,
    kTestNoise = 4,
    kPerturbBase = 5,
};

Eigen::VectorXd labels_for(const Eigen::VectorXd& x, double sigma_g) {
    Eigen::VectorXd y(x.size());
    for (Index i = 0; i < x.size(); ++i) y[i] = label_function(x[i], sigma_g);
    return y;
}

double mean_sq_loss(const RegressionModel& model, const Eigen::MatrixXd& xs,
                    const Eigen::VectorXd& ys) {
    const Eigen::VectorXd pred = predict(model, xs);
    return (pred - ys).squaredNorm() / static_cast<double>(ys.size());
}

struct Aggregate {
    double mean = 0.0;
    double ci = 0.0;
};

Aggregate aggregate_losses(const std::vector<double>& losses) {
    Aggregate a;
    const int n = static_cast<int>(losses.size());
    if (n == 0) return a;
    double sum = 0.0;
    for (double v : losses) sum += v;
    a.mean = sum / n;
    if (n > 1) {
        double ss = 0.0;
        for (double v : losses) ss += (v - a.mean) * (v - a.mean);
        const double sd = std::sqrt(ss / (n - 1));
        a.ci = 1.96 * sd / std::sqrt(static_cast<double>(n));
    }
    return a;
}

void run_trials_parallel(int trials, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || trials <= 1) {
        for (int t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<int> next{0};
    const int nt = std::min(threads, trials);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

RegressionModel fit_method(Method m, const TrialData& d, const HarnessConfig& h) {
    switch (m) {
        case Method::RLS:
            return fit_rls(d.source, h.kernel, h.solver.lambda);
        case Method::WRLS:
            return fit_wrls(d.source, d.target, h.kernel, h.solver.lambda,
                            h.solver.B, h.solver.c).model;
        case Method::WDRO:
            return fit_wdro(d.source, d.target, h.kernel, h.solver).model;
        case Method::DRO:
            return fit_dro_source_only(d.source, h.kernel, h.solver);
        case Method::DRDA:
            return fit_drda(d.source, d.target, h.kernel, h.solver).model;
    }
    throw InvalidInput("unknown method");
}

} // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::RLS: return "RLS";
        case Method::WRLS: return "W-RLS";
        case Method::WDRO: return "W-DRO";
        case Method::DRO: return "DRO";
        case Method::DRDA: return "DRDA";
    }
    return "?";
}

double label_function(double x, double sigma_g) {
    const double inv2s2 = 0.5 / (sigma_g * sigma_g);
    const double dp = x - 1.0;
    const double dm = x + 1.0;
    return std::exp(-dp * dp * inv2s2) - std::exp(-dm * dm * inv2s2);
}

TrialData gen_synthetic(const SyntheticConfig& sc, int trial) {
    sc.check();
    if (trial < 0) throw InvalidInput("gen_synthetic: trial must be >= 0");
    const auto t = static_cast<std::uint32_t>(trial);

    rng::Stream sx(sc.base_seed, t, kSourceX);
    rng::Stream tx(sc.base_seed, t, kTargetX);
    rng::Stream ex(sc.base_seed, t, kTestX);
    rng::Stream sn(sc.base_seed, t, kSourceNoise);
    rng::Stream en(sc.base_seed, t, kTestNoise);

    const Eigen::VectorXd xs = sx.normals(sc.n_s, sc.source_mean, sc.source_std);
    const Eigen::VectorXd xt = tx.normals(sc.n_t, sc.target_mean, sc.target_std);
    const Eigen::VectorXd xe = ex.normals(sc.n_test, sc.target_mean, sc.target_std);

    Eigen::VectorXd ys = labels_for(xs, sc.sigma_for_g);
    if (sc.label_noise_std > 0.0) ys += sn.normals(sc.n_s, 0.0, sc.label_noise_std);
    Eigen::VectorXd ye = labels_for(xe, sc.sigma_for_g);
    if (sc.label_noise_std > 0.0) ye += en.normals(sc.n_test, 0.0, sc.label_noise_std);

    TrialData d;
    d.source = Dataset::from_scalars(xs, std::move(ys));
    d.target = Dataset::from_scalars(xt);
    d.test = Dataset::from_scalars(xe, std::move(ye));
    return d;
}

ResultTable run_noise_sweep(const SyntheticConfig& sc, const SweepSpec& spec,
                            const HarnessConfig& harness) {
    sc.check();
    spec.check();
    harness.kernel.check();
    harness.solver.check();

    const int n_rho = static_cast<int>(spec.rho_grid.size());
    const int n_methods = static_cast<int>(spec.methods.size());

    // cell[trial][rho][method]
    std::vector<std::vector<std::vector<std::optional<double>>>> cell(
        sc.trials, std::vector<std::vector<std::optional<double>>>(
                       n_rho, std::vector<std::optional<double>>(n_methods)));
    std::vector<std::vector<std::string>> trial_failures(sc.trials);

    run_trials_parallel(sc.trials, harness.threads, [&](int trial) {
        const TrialData d = gen_synthetic(sc, trial);

        std::vector<std::optional<RegressionModel>> models(n_methods);
        for (int m = 0; m < n_methods; ++m) {
            try {
                models[m] = fit_method(spec.methods[m], d, harness);
            } catch (const SolverError& e) {
                trial_failures[trial].push_back(
                    std::string("trial ") + std::to_string(trial) + " method " +
                    method_name(spec.methods[m]) + ": " + e.what());
            }
        }

        for (int k = 0; k < n_rho; ++k) {
            const double rho = spec.rho_grid[k];
            rng::Stream pert(sc.base_seed, static_cast<std::uint32_t>(trial),
                             kPerturbBase + static_cast<std::uint32_t>(k));
            const Eigen::VectorXd delta = pert.normals(sc.n_test, 0.0, rho);

            Eigen::MatrixXd xs = d.test.features;
            Eigen::VectorXd ys = d.test.y();
            if (spec.perturb == PerturbKind::Features) xs.col(0) += delta;
            else ys += delta;

            for (int m = 0; m < n_methods; ++m) {
                if (!models[m]) continue;
                cell[trial][k][m] = mean_sq_loss(*models[m], xs, ys);
            }
        }
    });

    ResultTable table;
    table.x_name = "rho";
    for (int m = 0; m < n_methods; ++m) {
        const std::string name = method_name(spec.methods[m]);
        for (int k = 0; k < n_rho; ++k) {
            std::vector<double> losses;
            losses.reserve(sc.trials);
            for (int trial = 0; trial < sc.trials; ++trial) {
                if (cell[trial][k][m]) {
                    losses.push_back(*cell[trial][k][m]);
                    table.per_trial.push_back({name, spec.rho_grid[k], trial, *cell[trial][k][m]});
                }
            }
            if (losses.empty()) continue;
            const Aggregate a = aggregate_losses(losses);
            table.rows.push_back({name, spec.rho_grid[k], a.mean, a.ci,
                                  static_cast<int>(losses.size())});
        }
    }
    for (const auto& fs : trial_failures)
        for (const auto& f : fs) table.failures.push_back(f);
    return table;
}

ResultTable run_size_sweep(const SyntheticConfig& sc, const std::vector<int>& sizes,
                           const HarnessConfig& harness) {
    sc.check();
    if (sizes.empty()) throw InvalidInput("size sweep: empty size list");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1]) throw InvalidInput("size sweep: sizes must be ascending");

    ResultTable table;
    table.x_name = "size";

    for (int size : sizes) {
        SyntheticConfig sized = sc;
        sized.n_s = size;
        sized.n_t = size;
        sized.n_test = 5000;
        sized.label_noise_std = sc.label_noise_std;  // affects training only

        std::vector<std::optional<double>> losses(sc.trials);
        std::vector<std::vector<std::string>> trial_failures(sc.trials);

        run_trials_parallel(sc.trials, harness.threads, [&](int trial) {
            const TrialData d = gen_synthetic(sized, trial);
            try {
                const DrdaFit fit = fit_drda(d.source, d.target, harness.kernel, harness.solver);
                // population-risk proxy: squared error against the noiseless
                // labeling function on the clean test sample
                const Eigen::VectorXd truth =
                    labels_for(d.test.features.col(0), sized.sigma_for_g);
                losses[trial] = mean_sq_loss(fit.model, d.test.features, truth);
            } catch (const SolverError& e) {
                trial_failures[trial].push_back(
                    std::string("size ") + std::to_string(size) + " trial " +
                    std::to_string(trial) + " method DRDA: " + e.what());
            }
        });

        std::vector<double> ok;
        ok.reserve(sc.trials);
        for (int trial = 0; trial < sc.trials; ++trial) {
            if (losses[trial]) {
                ok.push_back(*losses[trial]);
                table.per_trial.push_back({"DRDA", static_cast<double>(size), trial,
                                           *losses[trial]});
            }
        }
        for (const auto& fs : trial_failures)
            for (const auto& f : fs) table.failures.push_back(f);
        if (ok.empty()) continue;
        const Aggregate a = aggregate_losses(ok);
        table.rows.push_back({"DRDA", static_cast<double>(size), a.mean, a.ci,
                              static_cast<int>(ok.size())});
    }
    return table;
}

} // namespace drda
