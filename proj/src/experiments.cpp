#include "sere/experiments.hpp"

#include "sere/error.hpp"
#include "sere/evolution.hpp"
#include "sere/hawkes.hpp"
#include "sere/limit_theory.hpp"
#include "sere/markov.hpp"
#include "sere/parallel.hpp"
#include "sere/statistics.hpp"
#include "sere/swish.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sere {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Top-level children of the root seed.
enum Stage : std::uint64_t { kMoments = 0, kEnsemble = 1, kLimitSde = 2 };

// Points of the mean-path grid for traffic averaging.
constexpr int kTrafficGrid = 101;

std::string fmt_value(double v) { return format_double(v); }

const char* verdict(bool ok) { return ok ? "pass" : "fail"; }

struct Model {
    ExpHawkesKernel kernel;
    FiniteMarkovChain<double> chain;
};

Model build_model(const ExperimentConfig& c) {
    c.validate();
    return {validate_kernel(c.lambda, c.alpha, c.beta), validate_chain(c.transition)};
}

void require_per_state(const Vector& v, const Model& model, const char* key) {
    if (v.size() != model.chain.n_states())
        throw Error(Errc::ConfigError, std::string("'") + key + "': needs one value per state");
}

LimitSpec<double> build_spec(const ExperimentConfig& c, const Model& model, VerificationReport& report) {
    model.chain.require_irreducible("limit theory");
    double m = 0.0;
    double m2 = 0.0;
    if (c.m && c.m2) {
        m = *c.m;
        m2 = *c.m2;
        report.diagnostics["moments_user_supplied"] = 1.0;
    } else if (c.m || c.m2) {
        throw Error(Errc::ConfigError, "'m' and 'm2' must be given together");
    } else {
        const auto est = estimate_interarrival_moments(model.kernel, c.moment_events, c.moment_events / 10,
                                                       Seed(c.seed).child(kMoments));
        m = est.m;
        m2 = est.m2;
        report.diagnostics["m_std_err"] = est.std_err_m;
        report.diagnostics["moment_samples"] = static_cast<double>(est.n_samples);
    }
    auto spec = make_limit_spec(model.kernel, model.chain, m, m2);
    report.diagnostics["lambda_hat"] = spec.lambda_hat;
    report.diagnostics["branching_ratio"] = model.kernel.branching_ratio();
    report.diagnostics["m"] = m;
    report.diagnostics["m2"] = m2;
    for (Eigen::Index x = 0; x < spec.rho.size(); ++x) report.diagnostics["rho_" + std::to_string(x)] = spec.rho(x);
    return spec;
}

MatrixFamily<double> build_family(const ExperimentConfig& c, const Model& model) {
    MatrixFamily<double> family(c.gamma, c.d1, c.d2);
    if (static_cast<Eigen::Index>(family.n_states()) != model.chain.n_states())
        throw Error(Errc::ConfigError, "matrix family needs one entry per chain state");
    if (c.f.size() != family.dim()) throw Error(Errc::ConfigError, "'f' must have length d");
    return family;
}

Seed replica_seed(const ExperimentConfig& c, std::size_t ladder_index, std::size_t replica) {
    return Seed(c.seed).child(kEnsemble).child(ladder_index).child(replica);
}

// Summary of a vector-valued ensemble, one statistic per component.
struct VectorSummary {
    Vector mean;
    Vector std_err;
};

VectorSummary summarize_vectors(const std::vector<Vector>& samples) {
    const auto d = samples.front().size();
    VectorSummary s{Vector::Zero(d), Vector::Zero(d)};
    std::vector<double> column(samples.size());
    for (Eigen::Index i = 0; i < d; ++i) {
        for (std::size_t r = 0; r < samples.size(); ++r) column[r] = samples[r](i);
        const auto sum = stats::summarize(column);
        s.mean(i) = sum.mean;
        s.std_err(i) = sum.std_err();
    }
    return s;
}

void add_operator_row(VerificationReport& report, double eps, std::size_t n, const std::vector<Vector>& samples,
                      const Vector& theory, double tolerance) {
    const auto s = summarize_vectors(samples);
    const double abs_error = (s.mean - theory).cwiseAbs().maxCoeff();
    const double scale = theory.cwiseAbs().maxCoeff();
    const double rel = scale > 0.0 ? abs_error / scale : abs_error;
    ReportRow row;
    row.epsilon = eps;
    row.n_replicas = n;
    row.mc_estimate = s.mean(0);
    row.mc_std_err = s.std_err.maxCoeff();
    row.theory_value = theory(0);
    row.oracle_value = theory(0);
    row.abs_error = abs_error;
    row.ks_p_value = kNaN;
    row.verdict = verdict(rel <= tolerance);
    row.extras["relative_error"] = rel;
    for (Eigen::Index i = 0; i < theory.size(); ++i) {
        row.extras["mc_" + std::to_string(i)] = s.mean(i);
        row.extras["theory_" + std::to_string(i)] = theory(i);
    }
    report.rows.push_back(std::move(row));
}

std::vector<double> column_of(const VerificationReport& report, const char* extra) {
    std::vector<double> out;
    for (const auto& r : report.rows) out.push_back(extra ? r.extras.at(extra) : r.abs_error);
    return out;
}

void add_monotone_criterion(VerificationReport& report, const std::vector<double>& errors, const std::string& name) {
    std::string detail;
    for (double e : errors) detail += (detail.empty() ? "" : " ") + fmt_value(e);
    report.criteria.push_back({name, non_increasing_with_one_inversion(errors), detail});
}

// Replica of z^eps(t) for dz/ds = eps^{1-order} v(z, x(s / eps^order)) sampled on
// `grid`; the chain holding time theta maps to a flow of duration eps * theta.
std::vector<double> traffic_replica(const SwishPath& path, const AffineRateFamily& v, double eps, double z0,
                                    const std::vector<double>& grid, int order) {
    const double time_scale = std::pow(eps, order);  // real time per unit of path time
    const double flow_scale = eps / time_scale;      // flow duration per unit of real time
    std::vector<double> out;
    out.reserve(grid.size());
    double z = z0;
    double now = 0.0;  // real time
    std::size_t k = 0;
    const auto& times = path.events.times;
    for (double g : grid) {
        while (k < times.size() && times[k] * time_scale <= g) {
            const double switch_time = times[k] * time_scale;
            z = v.flow(z, path.states[k], (switch_time - now) * flow_scale);
            now = switch_time;
            ++k;
        }
        z = v.flow(z, path.states[k], (g - now) * flow_scale);
        now = g;
        out.push_back(z);
    }
    return out;
}

double summation_endpoint(const SwishPath& path, const Vector& marks, double eps, double z0) {
    double sum = 0.0;
    for (std::size_t k = 1; k < path.states.size(); ++k) sum += marks(path.states[k]);
    return z0 + eps * sum;
}

}  // namespace

bool non_increasing_with_one_inversion(const std::vector<double>& errors) {
    int inversions = 0;
    for (std::size_t i = 1; i < errors.size(); ++i)
        if (errors[i] > errors[i - 1]) ++inversions;
    return inversions <= 1;
}

VerificationReport verify_lln(const ExperimentConfig& c, unsigned jobs) {
    const Model model = build_model(c);
    VerificationReport report;
    report.kind = "lln";
    const double lambda_hat = model.kernel.long_run_rate();
    report.diagnostics["lambda_hat"] = lambda_hat;
    report.diagnostics["branching_ratio"] = model.kernel.branching_ratio();

    for (std::size_t i = 0; i < c.horizons.size(); ++i) {
        const double horizon = c.horizons[i];
        const auto rates = parallel_map(c.n_replicas, jobs, [&](std::size_t r) {
            const auto events = simulate_hawkes(model.kernel, horizon, replica_seed(c, i, r), c.max_events);
            return static_cast<double>(events.count()) / horizon;
        });
        const auto s = stats::summarize(rates);
        double mad = 0.0;
        for (double x : rates) mad += std::abs(x - lambda_hat);
        mad /= static_cast<double>(rates.size());

        ReportRow row;
        row.epsilon = 1.0 / horizon;
        row.n_replicas = c.n_replicas;
        row.mc_estimate = s.mean;
        row.mc_std_err = s.std_err();
        row.theory_value = lambda_hat;
        row.oracle_value = lambda_hat;
        row.abs_error = mad;
        row.ks_p_value = kNaN;
        row.verdict = verdict(std::abs(s.mean - lambda_hat) <= 0.02 * lambda_hat);
        row.label = "T=" + fmt_value(horizon);
        row.extras["horizon"] = horizon;
        row.extras["mean_deviation"] = std::abs(s.mean - lambda_hat);
        report.rows.push_back(std::move(row));
    }

    const auto& last = report.rows.back();
    report.criteria.push_back({"mean N(T)/T within 2% of lambda_hat at the largest horizon",
                               last.extras.at("mean_deviation") <= 0.02 * lambda_hat,
                               "deviation " + fmt_value(last.extras.at("mean_deviation"))});
    bool shrinking = true;
    std::string detail;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        if (i > 0) shrinking = shrinking && report.rows[i].abs_error < report.rows[i - 1].abs_error;
        detail += (i ? " " : "") + fmt_value(report.rows[i].abs_error);
    }
    report.criteria.push_back({"mean absolute deviation from lambda_hat shrinks with T", shrinking, detail});
    return report;
}

VerificationReport verify_averaging(const ExperimentConfig& c, unsigned jobs) {
    if (!c.kind || (*c.kind != ExperimentKind::AveragingTraffic && *c.kind != ExperimentKind::AveragingSummation &&
                    *c.kind != ExperimentKind::AveragingOperator))
        throw Error(Errc::ConfigError, "verify-averaging needs kind averaging_traffic|averaging_summation|averaging_operator");
    const Model model = build_model(c);
    VerificationReport report;
    report.kind = std::string(to_string(*c.kind));
    const auto spec = build_spec(c, model, report);

    if (*c.kind == ExperimentKind::AveragingSummation) {
        require_per_state(c.marks, model, "marks");
        const double drift = averaged_summation_drift(c.marks, spec);
        const double theory = c.z0 + drift * c.t;
        report.diagnostics["a_hat"] = drift;
        for (std::size_t i = 0; i < c.epsilon_ladder.size(); ++i) {
            const double eps = c.epsilon_ladder[i];
            const auto ends = parallel_map(c.n_replicas, jobs, [&](std::size_t r) {
                const auto path =
                    simulate_swish(model.kernel, model.chain, c.x0, c.t / eps, replica_seed(c, i, r), c.max_events);
                return summation_endpoint(path, c.marks, eps, c.z0);
            });
            const auto s = stats::summarize(ends);
            ReportRow row;
            row.epsilon = eps;
            row.n_replicas = c.n_replicas;
            row.mc_estimate = s.mean;
            row.mc_std_err = s.std_err();
            row.theory_value = theory;
            row.oracle_value = theory;
            row.abs_error = std::abs(s.mean - theory);
            row.ks_p_value = kNaN;
            row.verdict = verdict(row.abs_error <= 3.0 * row.mc_std_err);
            row.extras["z_score"] = row.mc_std_err > 0.0 ? row.abs_error / row.mc_std_err : kNaN;
            // Deterministic offset from starting the Hawkes process with no history.
            const double horizon = c.t / eps;
            row.extras["warmup_bias"] =
                eps * spec.rho.dot(c.marks) * (model.kernel.expected_count(horizon) - spec.lambda_hat * horizon);
            report.rows.push_back(std::move(row));
        }
        const auto& last = report.rows.back();
        report.criteria.push_back({"endpoint mean within 3 standard errors of z0 + a_hat t at the smallest epsilon",
                                   last.abs_error <= 3.0 * last.mc_std_err,
                                   "error " + fmt_value(last.abs_error) + ", std err " + fmt_value(last.mc_std_err)});
        add_monotone_criterion(report, column_of(report, nullptr), "errors non-increasing down the ladder");
        return report;
    }

    if (*c.kind == ExperimentKind::AveragingTraffic) {
        require_per_state(c.rate_c0, model, "rate_c0");
        require_per_state(c.rate_c1, model, "rate_c1");
        const AffineRateFamily v{c.rate_c0, c.rate_c1};
        const auto ode = averaged_traffic_ode(v, spec, c.z0, c.t, c.t / (kTrafficGrid - 1));
        const auto& grid = ode.times;
        const auto [lo, hi] = std::minmax_element(ode.values.begin(), ode.values.end());
        const double range = *hi - *lo;
        report.diagnostics["ode_path_range"] = range;
        for (std::size_t i = 0; i < c.epsilon_ladder.size(); ++i) {
            const double eps = c.epsilon_ladder[i];
            const auto paths = parallel_map(c.n_replicas, jobs, [&](std::size_t r) {
                const auto path =
                    simulate_swish(model.kernel, model.chain, c.x0, c.t / eps, replica_seed(c, i, r), c.max_events);
                return traffic_replica(path, v, eps, c.z0, grid, 1);
            });
            double sup = 0.0;
            std::vector<double> column(paths.size());
            stats::Summary endpoint;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                for (std::size_t r = 0; r < paths.size(); ++r) column[r] = paths[r][g];
                const auto s = stats::summarize(column);
                sup = std::max(sup, std::abs(s.mean - ode.values[g]));
                if (g + 1 == grid.size()) endpoint = s;
            }
            ReportRow row;
            row.epsilon = eps;
            row.n_replicas = c.n_replicas;
            row.mc_estimate = endpoint.mean;
            row.mc_std_err = endpoint.std_err();
            row.theory_value = ode.values.back();
            row.oracle_value = ode.values.back();
            row.abs_error = sup;
            row.ks_p_value = kNaN;
            row.verdict = verdict(sup <= 0.03 * range);
            row.extras["sup_distance_over_range"] = range > 0.0 ? sup / range : kNaN;
            report.rows.push_back(std::move(row));
        }
        const auto& last = report.rows.back();
        report.criteria.push_back({"sup-distance of mean path to the averaged ODE within 3% of the path range",
                                   last.abs_error <= 0.03 * range,
                                   "sup " + fmt_value(last.abs_error) + ", range " + fmt_value(range)});
        add_monotone_criterion(report, column_of(report, nullptr), "sup-distance non-increasing down the ladder");
        return report;
    }

    const auto family = build_family(c, model);
    const Matrix generator = averaged_generator(family, spec);
    const Vector theory = averaged_evolution(generator, c.t, c.f);
    for (std::size_t i = 0; i < c.epsilon_ladder.size(); ++i) {
        const double eps = c.epsilon_ladder[i];
        const auto samples = parallel_map(c.n_replicas, jobs, [&](std::size_t r) {
            const auto path =
                simulate_swish(model.kernel, model.chain, c.x0, c.t / eps, replica_seed(c, i, r), c.max_events);
            return Vector(evolve_product(path, family, eps, c.t, 1) * c.f);
        });
        add_operator_row(report, eps, c.n_replicas, samples, theory, 0.05);
    }
    const double rel = report.rows.back().extras.at("relative_error");
    report.criteria.push_back({"relative error of mean V_eps(t) f at the smallest epsilon within 5%", rel <= 0.05,
                               "relative error " + fmt_value(rel)});
    add_monotone_criterion(report, column_of(report, "relative_error"), "relative errors non-increasing down the ladder");
    return report;
}

VerificationReport verify_diffusion(const ExperimentConfig& c, unsigned jobs) {
    if (!c.kind || (*c.kind != ExperimentKind::DiffusionSummation && *c.kind != ExperimentKind::DiffusionTraffic &&
                    *c.kind != ExperimentKind::DiffusionOperator))
        throw Error(Errc::ConfigError, "verify-diffusion needs kind diffusion_summation|diffusion_traffic|diffusion_operator");
    const Model model = build_model(c);
    VerificationReport report;
    report.kind = std::string(to_string(*c.kind));
    const auto spec = build_spec(c, model, report);

    if (*c.kind == ExperimentKind::DiffusionOperator) {
        const auto family = build_family(c, model);
        const Matrix l_hat = diffusion_generator(family, spec);
        const Vector theory = averaged_evolution(Matrix(spec.lambda_hat * l_hat), c.t, c.f);
        for (std::size_t i = 0; i < c.epsilon_ladder.size(); ++i) {
            const double eps = c.epsilon_ladder[i];
            const auto samples = parallel_map(c.n_replicas, jobs, [&](std::size_t r) {
                const auto path = simulate_swish(model.kernel, model.chain, c.x0, c.t / (eps * eps),
                                                 replica_seed(c, i, r), c.max_events);
                return Vector(evolve_product(path, family, eps, c.t, 2) * c.f);
            });
            add_operator_row(report, eps, c.n_replicas, samples, theory, 0.10);
        }
        const double rel = report.rows.back().extras.at("relative_error");
        report.criteria.push_back({"relative error of mean V^eps(t) f against exp(lambda_hat L t) f within 10%",
                                   rel <= 0.10, "relative error " + fmt_value(rel)});
        return report;
    }

    const bool summation = *c.kind == ExperimentKind::DiffusionSummation;
    double theory_var = kNaN;
    double oracle_var = kNaN;
    double theory_mean = c.z0;
    std::optional<AffineRateFamily> v;

    if (summation) {
        require_per_state(c.marks, model, "marks");
        const auto sigma = summation_sigma2(c.marks, model.chain, spec);
        theory_var = sigma.closed_form * c.t;
        oracle_var = sigma.oracle * c.t;
        report.diagnostics["sigma2_closed_form"] = sigma.closed_form;
        report.diagnostics["sigma2_oracle"] = sigma.oracle;
        report.diagnostics["sigma2_closed_form_over_oracle"] = sigma.ratio();
    } else {
        require_per_state(c.rate_c0, model, "rate_c0");
        require_per_state(c.rate_c1, model, "rate_c1");
        v = AffineRateFamily{c.rate_c0, c.rate_c1};
        const auto coeffs = traffic_diffusion_coeffs(*v, spec);
        report.diagnostics["sigma2_at_z0"] = coeffs.variance(c.z0);
        report.diagnostics["drift_at_z0"] = coeffs.drift(c.z0);
        // Law of the limit SDE at t, by Euler-Maruyama.
        const auto limit = parallel_map(c.n_replicas, jobs, [&](std::size_t r) {
            return euler_maruyama(coeffs, c.z0, c.t, c.dt, Seed(c.seed).child(kLimitSde).child(r)).values.back();
        });
        const auto s = stats::summarize(limit);
        theory_var = s.variance;
        theory_mean = s.mean;
        report.diagnostics["limit_sde_mean"] = s.mean;
        report.diagnostics["limit_sde_variance"] = s.variance;
    }
    const double anchor = summation ? oracle_var : theory_var;
    const std::size_t batches_needed = (c.ks_batches * 17 + 19) / 20;

    for (std::size_t i = 0; i < c.epsilon_ladder.size(); ++i) {
        const double eps = c.epsilon_ladder[i];
        const double horizon = c.t / (eps * eps);
        const auto ends = parallel_map(c.n_replicas, jobs, [&](std::size_t r) {
            const auto path =
                simulate_swish(model.kernel, model.chain, c.x0, horizon, replica_seed(c, i, r), c.max_events);
            if (summation) return summation_endpoint(path, c.marks, eps, c.z0);
            return traffic_replica(path, *v, eps, c.z0, {c.t}, 2).back();
        });
        const auto s = stats::summarize(ends);
        ReportRow row;
        row.epsilon = eps;
        row.n_replicas = c.n_replicas;
        row.mc_estimate = s.variance;
        row.mc_std_err = s.variance_std_err;
        row.theory_value = theory_var;
        row.oracle_value = oracle_var;
        row.abs_error = std::abs(s.variance - anchor);
        row.extras["sample_mean"] = s.mean;

        auto normal_against = [&](double var) {
            return [mean = theory_mean, sd = std::sqrt(var)](double x) { return stats::normal_cdf((x - mean) / sd); };
        };
        row.ks_p_value = kNaN;
        if (anchor > 0.0) {
            row.ks_p_value = stats::ks_test(ends, normal_against(anchor)).p_value;
            std::size_t passed = 0;
            const std::size_t per_batch = ends.size() / c.ks_batches;
            for (std::size_t b = 0; b < c.ks_batches; ++b) {
                std::vector<double> batch(ends.begin() + static_cast<std::ptrdiff_t>(b * per_batch),
                                          ends.begin() + static_cast<std::ptrdiff_t>((b + 1) * per_batch));
                if (stats::ks_test(std::move(batch), normal_against(anchor)).p_value > 0.01) ++passed;
            }
            row.extras["ks_batches_passed"] = static_cast<double>(passed);
            row.extras["relative_variance_error"] = row.abs_error / anchor;
        }
        if (summation && theory_var > 0.0)
            row.extras["ks_p_value_closed_form"] = stats::ks_test(ends, normal_against(theory_var)).p_value;

        const bool ok = anchor > 0.0 ? row.abs_error <= 0.10 * anchor : s.variance <= 1e-2;
        row.verdict = verdict(ok);
        report.rows.push_back(std::move(row));
    }

    const auto& last = report.rows.back();
    if (anchor > 0.0) {
        report.criteria.push_back({"endpoint variance within 10% of the reference at the smallest epsilon",
                                   last.abs_error <= 0.10 * anchor,
                                   "variance " + fmt_value(last.mc_estimate) + ", reference " + fmt_value(anchor)});
        const double passed = last.extras.at("ks_batches_passed");
        report.criteria.push_back({"endpoint law passes KS normality (p > 0.01) in at least 17 of 20 batches",
                                   passed >= static_cast<double>(batches_needed),
                                   fmt_value(passed) + " of " + std::to_string(c.ks_batches)});
    } else {
        report.criteria.push_back({"endpoint variance at most 1e-2 when the reference variance is 0",
                                   last.mc_estimate <= 1e-2, "variance " + fmt_value(last.mc_estimate)});
    }
    return report;
}

VerificationReport verify_ruin(const ExperimentConfig& c, unsigned jobs) {
    if (c.kind && *c.kind != ExperimentKind::Ruin) throw Error(Errc::ConfigError, "ruin needs kind ruin");
    const Model model = build_model(c);
    require_per_state(c.marks, model, "marks");
    VerificationReport report;
    report.kind = "ruin";
    report.diagnostics["premium"] = c.premium;
    report.diagnostics["horizon"] = c.horizon;
    std::vector<double> capitals = c.capitals;
    std::sort(capitals.begin(), capitals.end());
    std::vector<double> probs;
    // Every capital reuses the same replica seeds, so the estimates are
    // monotone path by path.
    const Seed root = Seed(c.seed).child(kEnsemble);
    for (double u : capitals) {
        const auto est = ruin_probability_mc(model.kernel, model.chain, c.x0, u, c.premium, c.marks, c.horizon,
                                             c.n_replicas, root, jobs);
        ReportRow row;
        row.epsilon = 1.0;
        row.n_replicas = c.n_replicas;
        row.mc_estimate = est.p;
        row.mc_std_err = est.std_err;
        row.theory_value = kNaN;
        row.oracle_value = kNaN;
        row.abs_error = kNaN;
        row.ks_p_value = kNaN;
        row.verdict = "info";
        row.label = "u=" + fmt_value(u);
        row.extras["capital"] = u;
        report.rows.push_back(std::move(row));
        probs.push_back(est.p);
    }
    bool monotone = true;
    std::string detail;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (i > 0 && probs[i] > probs[i - 1]) monotone = false;
        detail += (i ? " " : "") + fmt_value(probs[i]);
    }
    report.criteria.push_back({"ruin probability non-increasing in initial capital", monotone, detail});
    return report;
}

VerificationReport run_ensemble(const ExperimentConfig& c, unsigned jobs) {
    if (!c.kind) throw Error(Errc::ConfigError, "'kind' is required");
    switch (*c.kind) {
        case ExperimentKind::Lln: return verify_lln(c, jobs);
        case ExperimentKind::AveragingTraffic:
        case ExperimentKind::AveragingSummation:
        case ExperimentKind::AveragingOperator: return verify_averaging(c, jobs);
        case ExperimentKind::DiffusionSummation:
        case ExperimentKind::DiffusionTraffic:
        case ExperimentKind::DiffusionOperator: return verify_diffusion(c, jobs);
        case ExperimentKind::Ruin: return verify_ruin(c, jobs);
    }
    throw Error(Errc::ConfigError, "unhandled kind");
}

SampledPath simulate_path(const ExperimentConfig& c) {
    const auto kernel = validate_kernel(c.lambda, c.alpha, c.beta);
    const auto chain = validate_chain(c.transition);
    if (!(c.horizon > 0.0)) throw Error(Errc::ConfigError, "'horizon': must be positive");
    if (static_cast<Eigen::Index>(c.x0) >= chain.n_states()) throw Error(Errc::ConfigError, "'x0': state out of range");
    const Seed root(c.seed);
    // Geometric marks are checked before any simulation work.
    if (c.path_type == PathType::Geometric && (c.marks.array() <= -1.0).any())
        throw Error(Errc::InvalidMark, "growth marks must exceed -1");
    const SwishPath path = simulate_swish(kernel, chain, c.x0, c.horizon, root.child(0), c.max_events);
    const Model model{kernel, chain};

    SampledPath out;
    switch (c.path_type) {
        case PathType::Swish:
            out.trajectory = compound_path(path, Vector::Zero(chain.n_states()), 0.0);
            for (std::size_t i = 0; i < out.trajectory.size(); ++i)
                out.trajectory.values[i] = static_cast<double>(state_at(path, out.trajectory.times[i]));
            break;
        case PathType::Compound:
            require_per_state(c.marks, model, "marks");
            out.trajectory = compound_path(path, c.marks, c.z0, c.include_initial_mark.value_or(false));
            break;
        case PathType::ImpulseTraffic: {
            require_per_state(c.rate_c0, model, "rate_c0");
            require_per_state(c.rate_c1, model, "rate_c1");
            const Vector marks = c.marks.size() ? c.marks : Vector::Zero(chain.n_states());
            require_per_state(marks, model, "marks");
            out.trajectory = impulse_traffic_path(path, {c.rate_c0, c.rate_c1}, marks, c.z0, c.dt,
                                                  c.include_initial_mark.value_or(false));
            break;
        }
        case PathType::Risk:
            require_per_state(c.marks, model, "marks");
            out.trajectory = risk_path(path, c.z0, c.premium, c.marks);
            break;
        case PathType::Geometric:
            require_per_state(c.marks, model, "marks");
            out.trajectory = geometric_compound_path(path, c.marks, c.s0, c.include_initial_mark.value_or(true));
            break;
        case PathType::SwitchedDiffusion:
            require_per_state(c.rate_c0, model, "rate_c0");
            require_per_state(c.rate_c1, model, "rate_c1");
            require_per_state(c.vol, model, "vol");
            out.trajectory = switched_diffusion_path(path, {c.rate_c0, c.rate_c1}, c.vol, c.z0, c.dt, root.child(1));
            break;
    }
    out.states.reserve(out.trajectory.size());
    for (double t : out.trajectory.times) out.states.push_back(state_at(path, t));
    return out;
}

std::string path_to_csv(const SampledPath& p) {
    std::string out = "time,value,state\n";
    for (std::size_t i = 0; i < p.trajectory.size(); ++i)
        out += format_double(p.trajectory.times[i]) + ',' + format_double(p.trajectory.values[i]) + ',' +
               std::to_string(p.states[i]) + '\n';
    return out;
}

std::string path_to_json(const SampledPath& p) {
    nlohmann::json j = {{"time", p.trajectory.times}, {"value", p.trajectory.values}, {"state", p.states}};
    return j.dump() + '\n';
}

}  // namespace sere
