#include "pwc.h"

#include "asymptotics.hpp"
#include "optimizer.hpp"
#include "region.hpp"

#include <cstring>
#include <exception>
#include <memory>
#include <string>

struct pwc_kkt_report {
    pwc::KktReport rep;
};

struct pwc_solution {
    pwc::SolveResult res;
    pwc_kkt_report cert;  // borrowed view handed out by pwc_solution_kkt
};

struct pwc_region {
    std::vector<pwc::RegionPoint> points;
};

namespace {

thread_local std::string g_error;

pwc_status to_status(pwc::errc c) {
    switch (c) {
        case pwc::errc::ok: return PWC_OK;
        case pwc::errc::invalid_argument: return PWC_EINVAL;
        case pwc::errc::not_degraded: return PWC_ENOTDEGRADED;
        case pwc::errc::unsupported_regime: return PWC_EUNSUPPORTED;
        case pwc::errc::truncation_overflow: return PWC_ETRUNCATION;
        case pwc::errc::solver_stall: return PWC_ESTALL;
        case pwc::errc::undefined_multiplier: return PWC_ENOMULTIPLIER;
        case pwc::errc::numeric_failure: return PWC_ENUMERIC;
    }
    return PWC_ENUMERIC;
}

template <typename F>
pwc_status guarded(F&& body) {
    try {
        return body();
    } catch (const pwc::error& e) {
        g_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_error = e.what();
        return PWC_ENUMERIC;
    } catch (...) {
        g_error = "unrecognized failure";
        return PWC_ENUMERIC;
    }
}

pwc_status fail_null(const char* what) {
    g_error = std::string("null pointer argument: ") + what;
    return PWC_EINVAL;
}

pwc::ChannelParams convert(const pwc_channel_params& p) {
    pwc::ChannelParams out;
    out.alpha_b = p.alpha_b;
    out.lambda_b = p.lambda_b;
    out.alpha_e = p.alpha_e;
    out.lambda_e = p.lambda_e;
    out.delta = p.delta;
    return out;
}

pwc::IntensityConstraints convert(const pwc_constraints& c) {
    pwc::IntensityConstraints out;
    if (c.has_peak) out.peak = c.peak;
    if (c.has_average) out.average = c.average;
    return out;
}

pwc::SolverConfig convert(const pwc_solver_config& c) {
    pwc::SolverConfig out;
    out.kkt_tol = c.kkt_tol;
    out.grid_size = c.grid_size;
    out.merge_tol = c.merge_tol;
    out.weight_floor = c.weight_floor;
    out.max_support = c.max_support;
    out.max_outer_iters = c.max_outer_iters;
    return out;
}

pwc::TruncationPolicy convert(const pwc_truncation_policy& p) {
    pwc::TruncationPolicy out;
    out.epsilon_tail = p.epsilon_tail;
    out.y_max_cap = p.y_max_cap;
    return out;
}

pwc::DiscreteDistribution make_dist(const double* locations, const double* weights,
                                    size_t n) {
    pwc::DiscreteDistribution d;
    d.location.assign(locations, locations + n);
    d.weight.assign(weights, weights + n);
    return d;
}

void copy_string(const std::string& s, char* buf, size_t len) {
    if (!buf || len == 0) return;
    const size_t c = std::min(len - 1, s.size());
    std::memcpy(buf, s.data(), c);
    buf[c] = '\0';
}

}  // namespace

extern "C" {

const char* pwc_status_name(pwc_status status) {
    switch (status) {
        case PWC_OK: return "ok";
        case PWC_EINVAL: return "invalid-argument";
        case PWC_ENOTDEGRADED: return "not-degraded";
        case PWC_EUNSUPPORTED: return "unsupported-regime";
        case PWC_ETRUNCATION: return "truncation-overflow";
        case PWC_ESTALL: return "solver-stall";
        case PWC_ENOMULTIPLIER: return "undefined-multiplier";
        case PWC_ENUMERIC: return "numeric-failure";
    }
    return "unknown";
}

const char* pwc_last_error_message(void) { return g_error.c_str(); }

const char* pwc_version(void) { return "1.0.0"; }

void pwc_default_solver_config(pwc_solver_config* config) {
    if (!config) return;
    pwc::SolverConfig d;
    config->kkt_tol = d.kkt_tol;
    config->grid_size = d.grid_size;
    config->merge_tol = d.merge_tol;
    config->weight_floor = d.weight_floor;
    config->max_support = d.max_support;
    config->max_outer_iters = d.max_outer_iters;
}

void pwc_default_truncation_policy(pwc_truncation_policy* policy) {
    if (!policy) return;
    pwc::TruncationPolicy d;
    policy->epsilon_tail = d.epsilon_tail;
    policy->y_max_cap = d.y_max_cap;
}

pwc_status pwc_validate_params(const pwc_channel_params* params) {
    if (!params) return fail_null("params");
    return guarded([&] {
        convert(*params).validate();
        return PWC_OK;
    });
}

int pwc_is_degraded(const pwc_channel_params* params) {
    if (!params) return 0;
    try {
        return convert(*params).is_degraded() ? 1 : 0;
    } catch (...) {
        return 0;
    }
}

pwc_status pwc_truncation_index(double mean, const pwc_truncation_policy* policy,
                                long* index) {
    if (!policy || !index) return fail_null("policy/index");
    return guarded([&] {
        *index = pwc::truncation_index(mean, convert(*policy));
        return PWC_OK;
    });
}

pwc_status pwc_mi_densities(const pwc_channel_params* params,
                            const pwc_truncation_policy* policy,
                            const double* locations, const double* weights, size_t n,
                            double x, double* i_b, double* i_e, double* c_s) {
    if (!params || !policy || !locations || !weights || !i_b || !i_e || !c_s)
        return fail_null("params/policy/arrays/outputs");
    return guarded([&] {
        pwc::MiDensities d =
            pwc::mi_densities(x, make_dist(locations, weights, n), convert(*params),
                              convert(*policy));
        *i_b = d.i_b;
        *i_e = d.i_e;
        *c_s = d.c_s;
        return PWC_OK;
    });
}

pwc_status pwc_rates(const pwc_channel_params* params,
                     const pwc_truncation_policy* policy, const double* locations,
                     const double* weights, size_t n, double* i_b, double* i_e,
                     double* f0) {
    if (!params || !policy || !locations || !weights || !i_b || !i_e || !f0)
        return fail_null("params/policy/arrays/outputs");
    return guarded([&] {
        pwc::Rates r =
            pwc::rates(make_dist(locations, weights, n), convert(*params),
                       convert(*policy));
        *i_b = r.i_b;
        *i_e = r.i_e;
        *f0 = r.f0;
        return PWC_OK;
    });
}

pwc_status pwc_kkt_verify(const pwc_channel_params* params,
                          const pwc_constraints* constraints,
                          const pwc_solver_config* config,
                          const pwc_truncation_policy* policy, double mu, double gamma,
                          const double* locations, const double* weights, size_t n,
                          pwc_kkt_report** report) {
    if (!params || !constraints || !config || !policy || !locations || !weights ||
        !report)
        return fail_null("params/constraints/config/policy/arrays/report");
    return guarded([&] {
        auto out = std::make_unique<pwc_kkt_report>();
        out->rep = pwc::kkt_verify(make_dist(locations, weights, n), gamma, mu,
                                   convert(*params), convert(*constraints),
                                   convert(*config), convert(*policy));
        *report = out.release();
        return PWC_OK;
    });
}

void pwc_kkt_report_free(pwc_kkt_report* report) { delete report; }

double pwc_kkt_report_gamma(const pwc_kkt_report* r) { return r ? r->rep.gamma : 0; }
double pwc_kkt_report_max_violation(const pwc_kkt_report* r) {
    return r ? r->rep.max_violation : 0;
}
double pwc_kkt_report_equality_residual(const pwc_kkt_report* r) {
    return r ? r->rep.equality_residual : 0;
}
double pwc_kkt_report_argmax_x(const pwc_kkt_report* r) {
    return r ? r->rep.argmax_x : 0;
}
size_t pwc_kkt_report_grid_size(const pwc_kkt_report* r) {
    return r ? r->rep.grid_x.size() : 0;
}

pwc_status pwc_kkt_report_grid(const pwc_kkt_report* report, double* x, double* slack) {
    if (!report || !x || !slack) return fail_null("report/x/slack");
    std::memcpy(x, report->rep.grid_x.data(), report->rep.grid_x.size() * sizeof(double));
    std::memcpy(slack, report->rep.grid_slack.data(),
                report->rep.grid_slack.size() * sizeof(double));
    return PWC_OK;
}

int pwc_kkt_report_certified(const pwc_kkt_report* report, double kkt_tol) {
    return report && report->rep.certified(kkt_tol) ? 1 : 0;
}

pwc_status pwc_solve(const pwc_channel_params* params, const pwc_constraints* constraints,
                     const pwc_solver_config* config,
                     const pwc_truncation_policy* policy, double mu,
                     const double* warm_locations, const double* warm_weights,
                     size_t warm_n, pwc_solution** solution) {
    if (!params || !constraints || !config || !policy || !solution)
        return fail_null("params/constraints/config/policy/solution");
    if (warm_n > 0 && (!warm_locations || !warm_weights))
        return fail_null("warm arrays");
    return guarded([&] {
        pwc::DiscreteDistribution warm;
        const pwc::DiscreteDistribution* warm_ptr = nullptr;
        if (warm_n > 0) {
            warm = make_dist(warm_locations, warm_weights, warm_n);
            warm_ptr = &warm;
        }
        auto out = std::make_unique<pwc_solution>();
        out->res = pwc::solve(mu, convert(*params), convert(*constraints),
                              convert(*config), convert(*policy), warm_ptr);
        out->cert.rep = out->res.kkt;
        *solution = out.release();
        return PWC_OK;
    });
}

void pwc_solution_free(pwc_solution* solution) { delete solution; }

size_t pwc_solution_support_size(const pwc_solution* s) {
    return s ? s->res.dist.size() : 0;
}

pwc_status pwc_solution_support(const pwc_solution* solution, double* locations,
                                double* weights) {
    if (!solution || !locations || !weights) return fail_null("solution/arrays");
    std::memcpy(locations, solution->res.dist.location.data(),
                solution->res.dist.size() * sizeof(double));
    std::memcpy(weights, solution->res.dist.weight.data(),
                solution->res.dist.size() * sizeof(double));
    return PWC_OK;
}

double pwc_solution_objective(const pwc_solution* s) { return s ? s->res.objective : 0; }
double pwc_solution_gamma(const pwc_solution* s) { return s ? s->res.gamma : 0; }
double pwc_solution_mu(const pwc_solution* s) { return s ? s->res.mu : 0; }
long pwc_solution_iterations(const pwc_solution* s) { return s ? s->res.iterations : 0; }

const pwc_kkt_report* pwc_solution_kkt(const pwc_solution* s) {
    return s ? &s->cert : nullptr;
}

pwc_status pwc_optimize_weights(const pwc_channel_params* params,
                                const pwc_constraints* constraints,
                                const pwc_solver_config* config,
                                const pwc_truncation_policy* policy, double mu,
                                const double* locations, size_t n,
                                const double* warm_weights, double* weights_out,
                                double* gamma_out, double* objective_out) {
    if (!params || !constraints || !config || !policy || !locations || !weights_out ||
        !gamma_out || !objective_out)
        return fail_null("params/constraints/config/policy/arrays/outputs");
    return guarded([&] {
        std::vector<double> locs(locations, locations + n);
        std::vector<double> warm;
        const std::vector<double>* warm_ptr = nullptr;
        if (warm_weights) {
            warm.assign(warm_weights, warm_weights + n);
            warm_ptr = &warm;
        }
        pwc::WeightsResult r =
            pwc::optimize_weights(locs, mu, convert(*params), convert(*constraints),
                                  convert(*config), convert(*policy), warm_ptr);
        std::memcpy(weights_out, r.weights.data(), n * sizeof(double));
        *gamma_out = r.gamma;
        *objective_out = r.objective;
        return PWC_OK;
    });
}

pwc_status pwc_refine_locations(const pwc_channel_params* params,
                                const pwc_constraints* constraints,
                                const pwc_solver_config* config,
                                const pwc_truncation_policy* policy, double mu,
                                const double* locations, const double* weights, size_t n,
                                double* locations_out, double* weights_out,
                                double* gamma_out, double* objective_out) {
    if (!params || !constraints || !config || !policy || !locations || !weights ||
        !locations_out || !weights_out || !gamma_out || !objective_out)
        return fail_null("params/constraints/config/policy/arrays/outputs");
    return guarded([&] {
        pwc::SolveResult cur;
        cur.dist = make_dist(locations, weights, n);
        cur.mu = mu;
        pwc::SolveResult r =
            pwc::refine_locations(cur, mu, convert(*params), convert(*constraints),
                                  convert(*config), convert(*policy));
        std::memcpy(locations_out, r.dist.location.data(), n * sizeof(double));
        std::memcpy(weights_out, r.dist.weight.data(), n * sizeof(double));
        *gamma_out = r.gamma;
        *objective_out = r.objective;
        return PWC_OK;
    });
}

pwc_status pwc_estimate_gamma(const pwc_channel_params* params,
                              const pwc_constraints* constraints,
                              const pwc_truncation_policy* policy, double mu,
                              const double* locations, const double* weights, size_t n,
                              double* gamma_out) {
    if (!params || !constraints || !policy || !locations || !weights || !gamma_out)
        return fail_null("params/constraints/policy/arrays/gamma");
    return guarded([&] {
        *gamma_out = pwc::estimate_gamma(make_dist(locations, weights, n), mu,
                                         convert(*params), convert(*constraints),
                                         convert(*policy));
        return PWC_OK;
    });
}

pwc_status pwc_trace_boundary(const pwc_channel_params* params,
                              const pwc_constraints* constraints,
                              const pwc_solver_config* config,
                              const pwc_truncation_policy* policy, const double* mu_grid,
                              size_t grid_n, pwc_region** region) {
    if (!params || !constraints || !config || !policy || !mu_grid || !region)
        return fail_null("params/constraints/config/policy/grid/region");
    return guarded([&] {
        auto out = std::make_unique<pwc_region>();
        out->points = pwc::trace_boundary(
            convert(*params), convert(*constraints),
            std::vector<double>(mu_grid, mu_grid + grid_n), convert(*config),
            convert(*policy));
        *region = out.release();
        return PWC_OK;
    });
}

void pwc_region_free(pwc_region* region) { delete region; }

size_t pwc_region_size(const pwc_region* region) {
    return region ? region->points.size() : 0;
}

pwc_status pwc_region_point(const pwc_region* region, size_t index, double* mu,
                            double* rate, double* equivocation) {
    if (!region || !mu || !rate || !equivocation) return fail_null("region/outputs");
    if (index >= region->points.size()) {
        g_error = "region point index out of range";
        return PWC_EINVAL;
    }
    const pwc::RegionPoint& p = region->points[index];
    *mu = p.mu;
    *rate = p.rate_R;
    *equivocation = p.equivocation_Re;
    return PWC_OK;
}

size_t pwc_region_dist_size(const pwc_region* region, size_t index) {
    if (!region || index >= region->points.size()) return 0;
    return region->points[index].dist.size();
}

pwc_status pwc_region_dist(const pwc_region* region, size_t index, double* locations,
                           double* weights) {
    if (!region || !locations || !weights) return fail_null("region/arrays");
    if (index >= region->points.size()) {
        g_error = "region point index out of range";
        return PWC_EINVAL;
    }
    const pwc::DiscreteDistribution& d = region->points[index].dist;
    std::memcpy(locations, d.location.data(), d.size() * sizeof(double));
    std::memcpy(weights, d.weight.data(), d.size() * sizeof(double));
    return PWC_OK;
}

pwc_status pwc_detect_tradeoff(const pwc_region* region, double tol, int* tradeoff) {
    if (!region || !tradeoff) return fail_null("region/tradeoff");
    return guarded([&] {
        *tradeoff = pwc::detect_tradeoff(region->points, tol) ? 1 : 0;
        return PWC_OK;
    });
}

pwc_status pwc_phi(const pwc_channel_params* params, double x, double* value) {
    if (!params || !value) return fail_null("params/value");
    return guarded([&] {
        *value = pwc::phi(x, convert(*params));
        return PWC_OK;
    });
}

pwc_status pwc_low_intensity_quadratic(const pwc_channel_params* params, double ratio,
                                       double* coefficient) {
    if (!params || !coefficient) return fail_null("params/coefficient");
    return guarded([&] {
        *coefficient = pwc::low_intensity_quadratic(convert(*params), ratio);
        return PWC_OK;
    });
}

pwc_status pwc_low_intensity_linear_slope(const pwc_channel_params* params, double peak,
                                          double* slope) {
    if (!params || !slope) return fail_null("params/slope");
    return guarded([&] {
        *slope = pwc::low_intensity_linear_slope(convert(*params), peak);
        return PWC_OK;
    });
}

pwc_status pwc_avg_only_equal_gains_slope(const pwc_channel_params* params,
                                          double* slope) {
    if (!params || !slope) return fail_null("params/slope");
    return guarded([&] {
        *slope = pwc::avg_only_equal_gains_slope(convert(*params));
        return PWC_OK;
    });
}

pwc_status pwc_avg_only_diff_gains_bounds(const pwc_channel_params* params, double avg,
                                          double* lower, double* upper) {
    if (!params || !lower || !upper) return fail_null("params/bounds");
    return guarded([&] {
        auto [lo, up] = pwc::avg_only_diff_gains_bounds(convert(*params), avg);
        *lower = lo;
        *upper = up;
        return PWC_OK;
    });
}

pwc_status pwc_high_intensity_bound(const pwc_channel_params* params, double* bound) {
    if (!params || !bound) return fail_null("params/bound");
    return guarded([&] {
        *bound = pwc::high_intensity_bound(convert(*params));
        return PWC_OK;
    });
}

pwc_status pwc_ct_secrecy_capacity(const pwc_channel_params* params, double peak,
                                   int has_average, double average, double* value,
                                   double* p_star) {
    if (!params || !value || !p_star) return fail_null("params/outputs");
    return guarded([&] {
        std::optional<double> avg;
        if (has_average) avg = average;
        pwc::CtResult r = pwc::ct_secrecy_capacity(convert(*params), peak, avg);
        *value = r.value;
        *p_star = r.p_star;
        return PWC_OK;
    });
}

pwc_status pwc_classify_regime(const pwc_channel_params* params,
                               const pwc_constraints* constraints, char* regime_buf,
                               size_t regime_len, char* law_buf, size_t law_len,
                               int* has_bounds, double* coefficient, double* lower,
                               double* upper) {
    if (!params || !constraints || !has_bounds || !coefficient || !lower || !upper)
        return fail_null("params/constraints/outputs");
    return guarded([&] {
        pwc::AsymptoticReport rep =
            pwc::classify_regime(convert(*params), convert(*constraints));
        copy_string(pwc::regime_name(rep.regime), regime_buf, regime_len);
        copy_string(rep.scaling_law, law_buf, law_len);
        *has_bounds = rep.has_bounds ? 1 : 0;
        *coefficient = rep.coefficient;
        *lower = rep.lower;
        *upper = rep.upper;
        return PWC_OK;
    });
}

}  // extern "C"
