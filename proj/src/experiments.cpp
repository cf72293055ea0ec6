#include "hmc/experiments.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hmc/csv.hpp"
#include "hmc/diagnostics.hpp"
#include "hmc/error_stats.hpp"
#include "hmc/errors.hpp"
#include "hmc/model.hpp"
#include "hmc/sampler.hpp"
#include "hmc/tuning.hpp"

namespace hmc {

namespace {

constexpr double kPi = std::numbers::pi;

Scheme parse_scheme(const std::string& name) {
    if (name == "leapfrog") return Scheme::leapfrog;
    if (name == "yoshida4") return Scheme::yoshida4;
    throw ConfigError("integrator must be 'leapfrog' or 'yoshida4', got '" + name + "'");
}

// Model selection shared by the subcommands that accept one.
TargetModel model_from_config(RunConfig& cfg, const std::string& default_model,
                              long default_dim) {
    std::string name = cfg.get_string("model", default_model);
    if (name == "gaussian") {
        if (cfg.has("scales")) {
            std::vector<double> scales = cfg.get_list("scales", {});
            Vector s(static_cast<Eigen::Index>(scales.size()));
            for (size_t i = 0; i < scales.size(); ++i) s[static_cast<Eigen::Index>(i)] = scales[i];
            return scaled_gaussian(std::move(s));
        }
        long dim = cfg.get_long("dim", default_dim);
        if (dim < 1) throw ConfigError("dim must be >= 1");
        return standard_gaussian(dim);
    }
    if (name == "funnel") {
        long n_latent = cfg.get_long("funnel_latent_dim", 50);
        double scale = cfg.get_double("funnel_scale", 3.0);
        if (n_latent < 1) throw ConfigError("funnel_latent_dim must be >= 1");
        if (!(scale > 0.0)) throw ConfigError("funnel_scale must be positive");
        return funnel(n_latent, scale);
    }
    throw ConfigError("model must be 'gaussian' or 'funnel', got '" + name + "'");
}

// Validate-and-persist step every subcommand runs after reading its keys.
void finalize_config(RunConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.check_unknown();
    std::filesystem::create_directories(out_dir);
    cfg.write_resolved(out_dir);
}

double grid_value(double lo, double step, long i) {
    return std::round((lo + step * static_cast<double>(i)) * 1e9) / 1e9;
}

}  // namespace

void run_delta_scan(RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::uint64_t seed = cfg.require_seed();
    long n = cfg.get_long("n", 1000000);
    std::vector<double> eps_grid = cfg.get_list("eps_grid", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    std::vector<double> tau_grid = cfg.get_list("tau_grid", {0.5, 1.0, kPi / 2.0, 3.0});
    ErrorSamplingOptions opts;
    opts.divergence_threshold = cfg.get_double("divergence_threshold",
                                               kDefaultDivergenceThreshold);
    finalize_config(cfg, out_dir);

    TargetModel model = standard_gaussian(1);
    CsvWriter csv(out_dir / "delta_scan.csv",
                  {"eps", "tau", "mc_mean", "mc_se", "analytic", "flagged"});
    std::uint64_t cell = 0;
    for (double eps : eps_grid) {
        for (double tau : tau_grid) {
            IntegratorConfig icfg{eps, Scheme::leapfrog};
            ErrorSampleSet set = sample_errors(model, derive_seed(seed, cell++), icfg, tau, n,
                                               opts);
            stats::MeanSe m = moment(set, 1);
            double tau_eff = step_count(tau, eps) * eps;
            bool flagged = set.n_divergent > n / 1000;
            csv.row_of(eps, tau, -m.value, m.se, analytic_mean_error_gaussian(eps, tau_eff),
                       flagged ? 1 : 0);
        }
    }
}

void run_constraint_check(RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::uint64_t seed = cfg.require_seed();
    TargetModel model = model_from_config(cfg, "gaussian", 10);
    long n = cfg.get_long("n", 1000000);
    std::vector<double> eps_grid = cfg.get_list("eps_grid", {0.2, 0.3, 0.4, 0.5});
    double tau = cfg.get_double("tau", 1.0);
    Scheme scheme = parse_scheme(cfg.get_string("integrator", "leapfrog"));
    long n_bootstrap = cfg.get_long("n_bootstrap", 200);
    ErrorSamplingOptions opts;
    opts.tau_jitter = cfg.get_double("tau_jitter", 0.0);
    opts.divergence_threshold = cfg.get_double("divergence_threshold",
                                               kDefaultDivergenceThreshold);
    finalize_config(cfg, out_dir);

    CsvWriter csv(out_dir / "constraint_check.csv",
                  {"eps", "tau", "order", "n", "mean", "mean_se", "kappa1", "kappa2", "kappa3",
                   "kappa4", "exp_delta", "exp_delta_se", "n_divergent"});
    CsvWriter summary(out_dir / "constraint_check_summary.csv",
                      {"eps", "kappa1_plus_half_kappa2", "combo_se"});
    for (size_t i = 0; i < eps_grid.size(); ++i) {
        IntegratorConfig icfg{eps_grid[i], scheme};
        ErrorSampleSet set =
            sample_errors(model, derive_seed(seed, i), icfg, tau, n, opts);
        stats::MeanSe m = moment(set, 1);
        CumulantSet k = cumulants(set, static_cast<int>(n_bootstrap), derive_seed(seed, 1000 + i));
        stats::MeanSe c = check_global_constraint(set);
        csv.row_of(set.eps, set.tau, set.order, k.n, m.value, m.se, k.kappa[0], k.kappa[1],
                   k.kappa[2], k.kappa[3], c.value, c.se, set.n_divergent);
        summary.row_of(set.eps, k.kappa1_plus_half_kappa2, k.kappa1_plus_half_kappa2_se);
    }
}

void run_bounds(RunConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.require_seed();  // mandatory everywhere, even for a deterministic table
    int k = static_cast<int>(cfg.get_long("order", 2));
    double a_min = cfg.get_double("a_min", 0.05);
    double a_max = cfg.get_double("a_max", 0.99);
    double a_step = cfg.get_double("a_step", 0.01);
    if (!(a_min > 0.0 && a_max < 1.0 && a_min < a_max && a_step > 0.0))
        throw ConfigError("bounds: need 0 < a_min < a_max < 1 and a_step > 0");
    finalize_config(cfg, out_dir);

    CsvWriter csv(out_dir / "bounds.csv", {"a", "cost_lower", "cost_upper"});
    for (long i = 0;; ++i) {
        double a = grid_value(a_min, a_step, i);
        if (a > a_max + 1e-12) break;
        csv.row_of(a, cost_lower(a, k), cost_upper(a, k));
    }
    csv.row({"argmin", format_double(optimal_acceptance(k, CostBound::lower)),
             format_double(optimal_acceptance(k, CostBound::upper))});
}

void run_gauss_experiment(RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::uint64_t seed = cfg.require_seed();
    TargetModel model = model_from_config(cfg, "gaussian", 256);
    if (model.name == "funnel") throw ConfigError("gauss-experiment requires a gaussian model");
    Scheme scheme = parse_scheme(cfg.get_string("integrator", "leapfrog"));
    double tau = cfg.get_double("tau", kPi / 2.0);
    std::vector<double> fit_grid = cfg.get_list("fit_eps_grid", {0.12, 0.15, 0.2});
    long n_fit = cfg.get_long("n_fit", 200000);
    double eps_min = cfg.get_double("eps_min", 0.15);
    double eps_max = cfg.get_double("eps_max", 0.65);
    double eps_step = cfg.get_double("eps_step", 0.05);
    long n_scan = cfg.get_long("n_scan", 100000);
    long n_outer = cfg.get_long("n_outer", 2000);
    long n_inner = cfg.get_long("n_inner", 100);
    ErrorSamplingOptions opts;
    opts.tau_jitter = cfg.get_double("tau_jitter", 0.15);
    opts.divergence_threshold = cfg.get_double("divergence_threshold",
                                               kDefaultDivergenceThreshold);
    finalize_config(cfg, out_dir);

    AlphaFit fit = fit_alpha(model, derive_seed(seed, 9000), scheme, tau, fit_grid, n_fit, opts);
    // The closed forms take half the kappa_2 scale (see AcceptanceModel).
    AcceptanceModel am{fit.alpha / 2.0, fit.k};

    CsvWriter curve(out_dir / "gauss_acceptance.csv",
                    {"eps", "empirical_accept", "predicted_accept", "unstable"});
    std::vector<double> eps_values, accepts;
    for (long i = 0;; ++i) {
        double eps = grid_value(eps_min, eps_step, i);
        if (eps > eps_max + 1e-12) break;
        IntegratorConfig icfg{eps, scheme};
        ErrorSampleSet set = sample_errors(model, derive_seed(seed, i), icfg, tau, n_scan, opts);
        stats::MeanSe emp = mean_acceptance(set);
        bool unstable = set.n_divergent > n_scan / 1000;
        curve.row_of(eps, emp.value, acceptance_curve(am, eps), unstable ? 1 : 0);
        eps_values.push_back(eps);
        accepts.push_back(emp.value);
    }

    CsvWriter cost(out_dir / "gauss_cost.csv",
                   {"accept", "empirical_inv_accept", "cost_lower", "cost_upper"});
    for (size_t i = 0; i < eps_values.size(); ++i) {
        IntegratorConfig icfg{eps_values[i], scheme};
        SqueezeEstimate sq = nested_squeeze(model, derive_seed(seed, 5000 + i), icfg, tau,
                                            n_outer, n_inner, opts);
        cost.row_of(accepts[i], sq.mean_inverse_conditional.value, sq.inverse_mean_accept.value,
                    sq.mean_inverse_accept.value);
    }
}

void run_funnel_scan(RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::uint64_t seed = cfg.require_seed();
    long n_latent = cfg.get_long("funnel_latent_dim", 50);
    double scale = cfg.get_double("funnel_scale", 3.0);
    std::vector<double> targets = cfg.get_list("targets", {0.6, 0.7, 0.8, 0.9, 0.95, 0.99});
    ScanOptions sopts;
    sopts.n_chains = cfg.get_long("n_chains", 4);
    sopts.n_warmup = cfg.get_long("n_warmup", 1000);
    sopts.n_samples = cfg.get_long("n_samples", 2000);
    ChainConfig base;
    base.seed = seed;
    base.initial_step = cfg.get_double("initial_step", 0.1);
    base.scheme = parse_scheme(cfg.get_string("integrator", "leapfrog"));
    base.tau = cfg.get_double("tau", 1.0);
    base.tau_jitter = cfg.get_double("tau_jitter", 0.0);
    base.divergence_threshold = cfg.get_double("divergence_threshold",
                                               kDefaultDivergenceThreshold);
    base.init = ChainInit::exact;
    ProbeOptions popts;
    double relax_initial = cfg.get_double("relax_initial_target", 0.65);
    popts.step = cfg.get_double("relax_step", 0.05);
    popts.max_target = cfg.get_double("relax_max_target", 0.99);
    popts.n_warmup = cfg.get_long("probe_warmup", 500);
    popts.n_probe = cfg.get_long("probe_samples", 500);
    finalize_config(cfg, out_dir);

    TargetModel model = funnel(n_latent, scale);
    std::vector<ScanRow> rows = divergence_scan(model, targets, base, sopts);
    CsvWriter scan(out_dir / "funnel_scan.csv",
                   {"target", "achieved_accept", "step_size", "n_divergent", "rhat_v"});
    for (const ScanRow& r : rows)
        scan.row_of(r.target, r.achieved_accept, r.step_size, r.n_divergent, r.rhat_v);

    ChainConfig probe_base = base;
    probe_base.seed = derive_seed(seed, 0x524f42);  // separate stream for the probes
    TuningReport report = robust_target_search(model, probe_base, relax_initial, popts);
    CsvWriter rec(out_dir / "funnel_recommendation.csv",
                  {"recommended_target", "achieved_accept", "step_size", "n_divergent"});
    rec.row_of(report.target_acceptance, report.achieved_acceptance, report.final_step_size,
               report.n_divergent);
    CsvWriter trace(out_dir / "funnel_relaxation_trace.csv", {"target", "n_divergent"});
    for (const auto& [target, divergences] : report.relaxation_trace)
        trace.row_of(target, divergences);
}

void run_sample(RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::uint64_t seed = cfg.require_seed();
    TargetModel model = model_from_config(cfg, "gaussian", 10);
    long n_chains = cfg.get_long("n_chains", 4);
    ChainConfig base;
    base.n_warmup = cfg.get_long("n_warmup", 1000);
    base.n_samples = cfg.get_long("n_samples", 2000);
    base.initial_step = cfg.get_double("initial_step", 0.1);
    base.scheme = parse_scheme(cfg.get_string("integrator", "leapfrog"));
    base.tau = cfg.get_double("tau", 1.0);
    base.tau_jitter = cfg.get_double("tau_jitter", 0.0);
    base.divergence_threshold = cfg.get_double("divergence_threshold",
                                               kDefaultDivergenceThreshold);
    base.adapt.enabled = cfg.get_bool("adapt", true);
    base.adapt.target = cfg.get_double("target_accept", 0.8);
    base.adapt.gamma = cfg.get_double("da_gamma", 0.05);
    base.adapt.t0 = cfg.get_double("da_t0", 10.0);
    base.adapt.kappa = cfg.get_double("da_kappa", 0.75);
    std::string init = cfg.get_string("init", "auto");
    if (init == "auto")
        base.init = model.name == "funnel" ? ChainInit::exact : ChainInit::zeros;
    else if (init == "zeros")
        base.init = ChainInit::zeros;
    else if (init == "exact")
        base.init = ChainInit::exact;
    else
        throw ConfigError("init must be auto, zeros, or exact; got '" + init + "'");
    if (n_chains < 1) throw ConfigError("n_chains must be >= 1");
    finalize_config(cfg, out_dir);

    std::vector<ChainConfig> configs(static_cast<size_t>(n_chains), base);
    for (long c = 0; c < n_chains; ++c)
        configs[static_cast<size_t>(c)].seed = derive_seed(seed, static_cast<std::uint64_t>(c));
    std::vector<ChainOutput> outs = run_chains(model, configs);

    std::vector<std::string> draw_cols = {"chain", "iter"};
    for (Eigen::Index d = 0; d < model.dim; ++d) draw_cols.push_back("q" + std::to_string(d));
    CsvWriter draws(out_dir / "draws.csv", draw_cols);
    CsvWriter records(out_dir / "records.csv",
                      {"chain", "iter", "accepted", "delta", "accept_prob", "divergent",
                       "n_steps", "step_size"});
    CsvWriter summary(out_dir / "sample_summary.csv",
                      {"chain", "adapted_step", "n_divergent_sampling"});
    for (long c = 0; c < n_chains; ++c) {
        const ChainOutput& out = outs[static_cast<size_t>(c)];
        for (long i = 0; i < base.n_samples; ++i) {
            std::vector<std::string> cells = {std::to_string(c), std::to_string(i)};
            for (Eigen::Index d = 0; d < model.dim; ++d)
                cells.push_back(format_double(out.draws(i, d)));
            draws.row(cells);
        }
        for (size_t i = 0; i < out.records.size(); ++i) {
            const TransitionRecord& r = out.records[i];
            records.row_of(c, static_cast<long>(i), r.accepted ? 1 : 0, r.delta, r.accept_prob,
                           r.divergent ? 1 : 0, r.n_steps, r.step_size);
        }
        summary.row_of(c, out.adapted_step, out.n_divergent_sampling);
    }
}

void run_scaling(RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::uint64_t seed = cfg.require_seed();
    bool synthetic = cfg.get_bool("synthetic", false);
    double tau = cfg.get_double("tau", 1.0);
    long n_mean = cfg.get_long("n_mean", 8000000);
    long n_kappa2 = cfg.get_long("n_kappa2", 1000000);
    long n_alpha = cfg.get_long("n_alpha", 200000);
    long n_bootstrap = cfg.get_long("n_bootstrap", 200);
    std::vector<double> lf_grid =
        cfg.get_list("leapfrog_grid", {0.2, 0.25, 1.0 / 3.0, 0.5});
    std::vector<double> y4_grid = cfg.get_list("yoshida_grid", {0.25, 1.0 / 3.0, 0.5});
    ErrorSamplingOptions opts;
    opts.divergence_threshold = cfg.get_double("divergence_threshold",
                                               kDefaultDivergenceThreshold);
    finalize_config(cfg, out_dir);

    CsvWriter csv(out_dir / "scaling.csv",
                  {"order", "moment_n", "slope", "slope_se", "expected_slope"});
    CsvWriter alpha_csv(out_dir / "alpha.csv", {"order", "alpha", "residual_rms"});

    if (synthetic) {
        auto noiseless = [](const std::vector<double>& grid, double c, double power) {
            std::vector<stats::MeanSe> out;
            for (double eps : grid) out.push_back({c * std::pow(eps, power), 0.0});
            return out;
        };
        stats::SlopeFit m1 = scaling_exponent(lf_grid, noiseless(lf_grid, 2.5, 4.0));
        stats::SlopeFit m2 = scaling_exponent(lf_grid, noiseless(lf_grid, 1.7, 4.0));
        stats::SlopeFit y2 = scaling_exponent(y4_grid, noiseless(y4_grid, 0.9, 8.0));
        csv.row_of(2, 1, m1.slope, m1.slope_se, 4.0);
        csv.row_of(2, 2, m2.slope, m2.slope_se, 4.0);
        csv.row_of(4, 2, y2.slope, y2.slope_se, 8.0);
        std::vector<double> kappa2;
        for (double eps : lf_grid) kappa2.push_back(2.5 * std::pow(eps, 4.0));
        AlphaFit fit = fit_alpha_from_kappa2(lf_grid, kappa2, 2);
        alpha_csv.row_of(2, fit.alpha, fit.residual_rms);
        return;
    }

    TargetModel model = standard_gaussian(1);
    auto kappa2_points = [&](Scheme scheme, const std::vector<double>& grid,
                             std::uint64_t stream) {
        std::vector<stats::MeanSe> out;
        for (size_t i = 0; i < grid.size(); ++i) {
            IntegratorConfig icfg{grid[i], scheme};
            ErrorSampleSet set = sample_errors(model, derive_seed(seed, stream + i), icfg, tau,
                                               n_kappa2, opts);
            CumulantSet k = cumulants(set, static_cast<int>(n_bootstrap),
                                      derive_seed(seed, stream + 100 + i));
            out.push_back({k.kappa[1], k.kappa_se[1]});
        }
        return out;
    };

    std::vector<stats::MeanSe> means;
    for (size_t i = 0; i < lf_grid.size(); ++i) {
        IntegratorConfig icfg{lf_grid[i], Scheme::leapfrog};
        ErrorSampleSet set =
            sample_errors(model, derive_seed(seed, 300 + i), icfg, tau, n_mean, opts);
        means.push_back(moment(set, 1));
    }
    stats::SlopeFit m1 = scaling_exponent(lf_grid, means);
    stats::SlopeFit m2 = scaling_exponent(lf_grid, kappa2_points(Scheme::leapfrog, lf_grid, 400));
    stats::SlopeFit y2 = scaling_exponent(y4_grid, kappa2_points(Scheme::yoshida4, y4_grid, 500));
    csv.row_of(2, 1, m1.slope, m1.slope_se, 4.0);
    csv.row_of(2, 2, m2.slope, m2.slope_se, 4.0);
    csv.row_of(4, 2, y2.slope, y2.slope_se, 8.0);

    AlphaFit lf_fit =
        fit_alpha(model, derive_seed(seed, 600), Scheme::leapfrog, tau, lf_grid, n_alpha, opts);
    AlphaFit y4_fit =
        fit_alpha(model, derive_seed(seed, 700), Scheme::yoshida4, tau, y4_grid, n_alpha, opts);
    alpha_csv.row_of(2, lf_fit.alpha, lf_fit.residual_rms);
    alpha_csv.row_of(4, y4_fit.alpha, y4_fit.residual_rms);
}

}  // namespace hmc
