// Command-line front end for the Poisson wiretap-channel solver.  Parses a
// flat dotted key-value configuration, dispatches the solve / region / sweep /
// asymptotics / verify subcommands through the C API, and writes deterministic
// CSV/JSON result files (12 significant digits, no timestamps).
#include "pwc.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

constexpr double kLn2 = 0.69314718055994530942;

struct RunConfig {
    pwc_channel_params params{};
    bool has_peak = false;
    double peak = 0;
    bool has_average = false;
    double average = 0;
    bool has_ratio = false;
    double ratio = 0;  // average = ratio * peak, resolved per instance
    pwc_solver_config solver{};
    pwc_truncation_policy trunc{};
    std::string out_dir = ".";
    bool bits = false;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Flat `section.key = value` lines; '#' starts a comment; later keys override.
bool load_kv_file(const std::string& path, std::map<std::string, std::string>& kv,
                  std::string& err) {
    std::ifstream in(path);
    if (!in) {
        err = "cannot open config file: " + path;
        return false;
    }
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            err = path + ":" + std::to_string(lineno) + ": expected key = value";
            return false;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) {
            err = path + ":" + std::to_string(lineno) + ": empty key";
            return false;
        }
        kv[key] = val;
    }
    return true;
}

bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

bool parse_long(const std::string& s, long& out) {
    try {
        size_t pos = 0;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

// Builds the run configuration; every key is validated and unknown keys are
// rejected so typos cannot silently fall back to defaults.
bool build_config(const std::map<std::string, std::string>& kv, RunConfig& cfg,
                  std::string& err) {
    pwc_default_solver_config(&cfg.solver);
    pwc_default_truncation_policy(&cfg.trunc);
    bool have[5] = {false, false, false, false, false};
    for (const auto& [key, val] : kv) {
        double d = 0;
        long l = 0;
        auto need_double = [&](double& slot) {
            if (!parse_double(val, d)) {
                err = "config key " + key + " needs a finite number, got '" + val + "'";
                return false;
            }
            slot = d;
            return true;
        };
        auto need_long = [&](long& slot) {
            if (!parse_long(val, l)) {
                err = "config key " + key + " needs an integer, got '" + val + "'";
                return false;
            }
            slot = l;
            return true;
        };
        if (key == "channel.alpha_b") {
            if (!need_double(cfg.params.alpha_b)) return false;
            have[0] = true;
        } else if (key == "channel.lambda_b") {
            if (!need_double(cfg.params.lambda_b)) return false;
            have[1] = true;
        } else if (key == "channel.alpha_e") {
            if (!need_double(cfg.params.alpha_e)) return false;
            have[2] = true;
        } else if (key == "channel.lambda_e") {
            if (!need_double(cfg.params.lambda_e)) return false;
            have[3] = true;
        } else if (key == "channel.delta") {
            if (!need_double(cfg.params.delta)) return false;
            have[4] = true;
        } else if (key == "constraints.peak") {
            if (val == "none") {
                cfg.has_peak = false;
            } else {
                if (!need_double(cfg.peak)) return false;
                cfg.has_peak = true;
            }
        } else if (key == "constraints.average") {
            if (val == "none") {
                cfg.has_average = false;
            } else {
                if (!need_double(cfg.average)) return false;
                cfg.has_average = true;
            }
        } else if (key == "constraints.average_ratio") {
            if (val == "none") {
                cfg.has_ratio = false;
            } else {
                if (!need_double(cfg.ratio)) return false;
                cfg.has_ratio = true;
            }
        } else if (key == "solver.kkt_tol") {
            if (!need_double(cfg.solver.kkt_tol)) return false;
        } else if (key == "solver.grid_size") {
            if (!need_long(cfg.solver.grid_size)) return false;
        } else if (key == "solver.merge_tol") {
            if (!need_double(cfg.solver.merge_tol)) return false;
        } else if (key == "solver.weight_floor") {
            if (!need_double(cfg.solver.weight_floor)) return false;
        } else if (key == "solver.max_support") {
            if (!parse_long(val, l) || l < 0) {
                err = "config key " + key + " needs a nonnegative integer";
                return false;
            }
            cfg.solver.max_support = static_cast<size_t>(l);
        } else if (key == "solver.max_outer_iters") {
            if (!need_long(cfg.solver.max_outer_iters)) return false;
        } else if (key == "truncation.epsilon_tail") {
            if (!need_double(cfg.trunc.epsilon_tail)) return false;
        } else if (key == "truncation.y_max_cap") {
            if (!need_long(cfg.trunc.y_max_cap)) return false;
        } else if (key == "output.dir") {
            cfg.out_dir = val;
        } else if (key == "output.log_base") {
            if (val == "nats") {
                cfg.bits = false;
            } else if (val == "bits") {
                cfg.bits = true;
            } else {
                err = "config key output.log_base must be 'nats' or 'bits'";
                return false;
            }
        } else {
            err = "unknown config key: " + key;
            return false;
        }
    }
    const char* names[5] = {"channel.alpha_b", "channel.lambda_b", "channel.alpha_e",
                            "channel.lambda_e", "channel.delta"};
    for (int i = 0; i < 5; ++i) {
        if (!have[i]) {
            err = std::string("missing config key: ") + names[i];
            return false;
        }
    }
    if (cfg.has_average && cfg.has_ratio) {
        err = "constraints.average and constraints.average_ratio are mutually exclusive";
        return false;
    }
    if (cfg.has_ratio && !cfg.has_peak) {
        err = "constraints.average_ratio requires constraints.peak";
        return false;
    }
    return true;
}

pwc_constraints resolve_constraints(const RunConfig& cfg) {
    pwc_constraints c{};
    c.has_peak = cfg.has_peak ? 1 : 0;
    c.peak = cfg.peak;
    if (cfg.has_average) {
        c.has_average = 1;
        c.average = cfg.average;
    } else if (cfg.has_ratio) {
        c.has_average = 1;
        c.average = cfg.ratio * cfg.peak;
    }
    return c;
}

// Presentation-only base conversion; all internal state is in nats.
double conv(const RunConfig& cfg, double nats) {
    return cfg.bits ? nats / kLn2 : nats;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

int exit_code(pwc_status st) {
    if (st == PWC_OK) return 0;
    return st == PWC_ESTALL ? 2 : 1;
}

int fail(pwc_status st, const std::string& context) {
    std::fprintf(stderr, "pwcap: %s: %s (%s)\n", context.c_str(),
                 pwc_last_error_message(), pwc_status_name(st));
    return exit_code(st);
}

json metadata_json(const RunConfig& cfg, const pwc_constraints& cons) {
    json m;
    m["params"] = {{"alpha_b", cfg.params.alpha_b}, {"lambda_b", cfg.params.lambda_b},
                   {"alpha_e", cfg.params.alpha_e}, {"lambda_e", cfg.params.lambda_e},
                   {"delta", cfg.params.delta}};
    json c;
    if (cons.has_peak) c["peak"] = cons.peak;
    if (cons.has_average) c["average"] = cons.average;
    m["constraints"] = c;
    m["solver"] = {{"kkt_tol", cfg.solver.kkt_tol},
                   {"grid_size", cfg.solver.grid_size},
                   {"merge_tol", cfg.solver.merge_tol},
                   {"weight_floor", cfg.solver.weight_floor},
                   {"max_support", static_cast<long>(cfg.solver.max_support)},
                   {"max_outer_iters", cfg.solver.max_outer_iters}};
    m["truncation"] = {{"epsilon_tail", cfg.trunc.epsilon_tail},
                       {"y_max_cap", cfg.trunc.y_max_cap}};
    m["log_base"] = cfg.bits ? "bits" : "nats";
    return m;
}

bool write_file(const std::string& dir, const std::string& name,
                const std::string& content, std::string& err) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        err = "cannot create output directory " + dir + ": " + ec.message();
        return false;
    }
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        err = "cannot write " + path;
        return false;
    }
    out << content;
    out.close();
    if (!out) {
        err = "write failed for " + path;
        return false;
    }
    return true;
}

// ---------------------------------------------------------------- solve ----

int run_solve(const RunConfig& cfg, double mu) {
    const pwc_constraints cons = resolve_constraints(cfg);
    pwc_solution* sol = nullptr;
    pwc_status st = pwc_solve(&cfg.params, &cons, &cfg.solver, &cfg.trunc, mu, nullptr,
                              nullptr, 0, &sol);
    if (st != PWC_OK) return fail(st, "solve");
    const size_t n = pwc_solution_support_size(sol);
    std::vector<double> xs(n), ws(n);
    pwc_solution_support(sol, xs.data(), ws.data());
    const pwc_kkt_report* rep = pwc_solution_kkt(sol);
    const size_t gn = pwc_kkt_report_grid_size(rep);
    std::vector<double> gx(gn), gs(gn);
    pwc_kkt_report_grid(rep, gx.data(), gs.data());

    json out;
    out["distribution"] = {{"locations", xs}, {"weights", ws}};
    out["objective"] = conv(cfg, pwc_solution_objective(sol));
    out["gamma"] = conv(cfg, pwc_solution_gamma(sol));
    out["mu"] = mu;
    out["iterations"] = pwc_solution_iterations(sol);
    out["kkt"] = {{"gamma", conv(cfg, pwc_kkt_report_gamma(rep))},
                  {"max_violation", conv(cfg, pwc_kkt_report_max_violation(rep))},
                  {"equality_residual", conv(cfg, pwc_kkt_report_equality_residual(rep))},
                  {"argmax_x", pwc_kkt_report_argmax_x(rep)},
                  {"grid_size", static_cast<long>(gn)}};
    out["metadata"] = metadata_json(cfg, cons);

    std::ostringstream csv;
    csv << "x,slack\n";
    for (size_t i = 0; i < gn; ++i)
        csv << fmt(gx[i]) << "," << fmt(conv(cfg, gs[i])) << "\n";
    pwc_solution_free(sol);

    std::string err;
    if (!write_file(cfg.out_dir, "solution.json", out.dump(2) + "\n", err) ||
        !write_file(cfg.out_dir, "kkt_slack.csv", csv.str(), err)) {
        std::fprintf(stderr, "pwcap: %s\n", err.c_str());
        return 1;
    }
    return 0;
}

// --------------------------------------------------------------- region ----

int run_region(const RunConfig& cfg, long grid_n) {
    if (grid_n < 1) {
        std::fprintf(stderr, "pwcap: --mu-grid must be at least 1\n");
        return 1;
    }
    std::vector<double> grid;
    if (grid_n == 1) {
        grid.push_back(0.0);
    } else {
        for (long i = 0; i < grid_n; ++i)
            grid.push_back(static_cast<double>(i) / static_cast<double>(grid_n - 1));
    }
    const pwc_constraints cons = resolve_constraints(cfg);
    pwc_region* region = nullptr;
    pwc_status st = pwc_trace_boundary(&cfg.params, &cons, &cfg.solver, &cfg.trunc,
                                       grid.data(), grid.size(), &region);
    if (st != PWC_OK) return fail(st, "region trace");

    std::ostringstream csv;
    csv << "mu,R,Re\n";
    json dists = json::array();
    const size_t n = pwc_region_size(region);
    for (size_t i = 0; i < n; ++i) {
        double mu = 0, r = 0, re = 0;
        pwc_region_point(region, i, &mu, &r, &re);
        csv << fmt(mu) << "," << fmt(conv(cfg, r)) << "," << fmt(conv(cfg, re)) << "\n";
        const size_t dn = pwc_region_dist_size(region, i);
        std::vector<double> xs(dn), ws(dn);
        pwc_region_dist(region, i, xs.data(), ws.data());
        dists.push_back({{"mu", mu}, {"locations", xs}, {"weights", ws}});
    }
    json out;
    out["points"] = dists;
    json meta = metadata_json(cfg, cons);
    if (grid.front() == 0.0 && grid.back() == 1.0 && cons.has_peak) {
        const double tol = 10.0 * cfg.solver.merge_tol * cons.peak;
        int tradeoff = 0;
        if (pwc_detect_tradeoff(region, tol, &tradeoff) == PWC_OK) {
            meta["tradeoff"] = tradeoff != 0;
            meta["tradeoff_tol"] = tol;
        }
    }
    out["metadata"] = meta;
    pwc_region_free(region);

    std::string err;
    if (!write_file(cfg.out_dir, "region.csv", csv.str(), err) ||
        !write_file(cfg.out_dir, "region_dists.json", out.dump(2) + "\n", err)) {
        std::fprintf(stderr, "pwcap: %s\n", err.c_str());
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------- sweep ----

struct SweepRow {
    double value = 0;
    pwc_status status = PWC_OK;
    std::string message;
    double c_s = 0, c_b = 0, c_e = 0, ct = 0, hi = 0;
};

SweepRow sweep_one(const RunConfig& cfg, const std::string& var, double value) {
    SweepRow row;
    row.value = value;
    RunConfig local = cfg;
    if (var == "peak") {
        local.has_peak = true;
        local.peak = value;
    } else if (var == "average") {
        local.has_average = true;
        local.average = value;
        local.has_ratio = false;
    } else {
        local.params.delta = value;
    }
    const pwc_constraints cons = resolve_constraints(local);
    auto solve_mu = [&](const pwc_channel_params& p, double mu, double* out) {
        pwc_solution* sol = nullptr;
        pwc_status st = pwc_solve(&p, &cons, &local.solver, &local.trunc, mu, nullptr,
                                  nullptr, 0, &sol);
        if (st != PWC_OK) {
            row.status = st;
            row.message = pwc_last_error_message();
            return false;
        }
        *out = pwc_solution_objective(sol);
        pwc_solution_free(sol);
        return true;
    };
    // Eavesdropper capacity: the eavesdropper's own channel solved at mu=1.
    pwc_channel_params eve = local.params;
    eve.alpha_b = local.params.alpha_e;
    eve.lambda_b = local.params.lambda_e;
    if (!solve_mu(local.params, 0.0, &row.c_s) ||
        !solve_mu(local.params, 1.0, &row.c_b) || !solve_mu(eve, 1.0, &row.c_e))
        return row;
    double p_star = 0;
    pwc_status st = pwc_ct_secrecy_capacity(&local.params, cons.peak, cons.has_average,
                                            cons.average, &row.ct, &p_star);
    if (st != PWC_OK) {
        row.status = st;
        row.message = pwc_last_error_message();
        return row;
    }
    st = pwc_high_intensity_bound(&local.params, &row.hi);
    if (st != PWC_OK) {
        row.status = st;
        row.message = pwc_last_error_message();
    }
    return row;
}

int run_sweep(const RunConfig& cfg, const std::string& var, const std::string& values,
              long jobs) {
    if (var != "peak" && var != "average" && var != "delta") {
        std::fprintf(stderr, "pwcap: --var must be peak, average, or delta\n");
        return 1;
    }
    if (var == "average" && cfg.has_ratio) {
        std::fprintf(stderr,
                     "pwcap: cannot sweep the average with constraints.average_ratio set\n");
        return 1;
    }
    std::vector<double> vals;
    std::stringstream ss(values);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        double v = 0;
        if (!parse_double(tok, v)) {
            std::fprintf(stderr, "pwcap: bad sweep value '%s'\n", tok.c_str());
            return 1;
        }
        vals.push_back(v);
    }
    if (vals.empty()) {
        std::fprintf(stderr, "pwcap: --values must list at least one value\n");
        return 1;
    }
    for (size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] <= 0 || (i > 0 && vals[i] <= vals[i - 1])) {
            std::fprintf(stderr,
                         "pwcap: sweep values must be positive and strictly increasing\n");
            return 1;
        }
    }
    if (jobs < 1) jobs = 1;

    std::vector<SweepRow> rows(vals.size());
    const size_t nthreads = std::min<size_t>(jobs, vals.size());
    std::vector<std::thread> pool;
    for (size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            for (size_t i = t; i < vals.size(); i += nthreads)
                rows[i] = sweep_one(cfg, var, vals[i]);
        });
    }
    for (auto& th : pool) th.join();

    std::ostringstream csv;
    csv << "value,C_S,C_B,C_E,ct_bound,hi_bound,status\n";
    bool all_ok = true;
    for (const SweepRow& r : rows) {
        if (r.status == PWC_OK) {
            csv << fmt(r.value) << "," << fmt(conv(cfg, r.c_s)) << ","
                << fmt(conv(cfg, r.c_b)) << "," << fmt(conv(cfg, r.c_e)) << ","
                << fmt(conv(cfg, r.ct)) << "," << fmt(conv(cfg, r.hi)) << ",ok\n";
        } else {
            all_ok = false;
            csv << fmt(r.value) << ",nan,nan,nan,nan,nan,"
                << pwc_status_name(r.status) << "\n";
            std::fprintf(stderr, "pwcap: sweep value %s failed: %s (%s)\n",
                         fmt(r.value).c_str(), r.message.c_str(),
                         pwc_status_name(r.status));
        }
    }
    std::string err;
    if (!write_file(cfg.out_dir, "sweep.csv", csv.str(), err)) {
        std::fprintf(stderr, "pwcap: %s\n", err.c_str());
        return 1;
    }
    return all_ok ? 0 : 2;
}

// ---------------------------------------------------------- asymptotics ----

int run_asymptotics(const RunConfig& cfg) {
    const pwc_constraints cons = resolve_constraints(cfg);
    char regime[64], law[64];
    int has_bounds = 0;
    double coeff = 0, lo = 0, up = 0;
    pwc_status st = pwc_classify_regime(&cfg.params, &cons, regime, sizeof(regime), law,
                                        sizeof(law), &has_bounds, &coeff, &lo, &up);
    if (st != PWC_OK) return fail(st, "regime classification");

    json out;
    out["regime"] = regime;
    out["scaling_law"] = law;
    if (has_bounds) {
        out["lower"] = conv(cfg, lo);
        out["upper"] = conv(cfg, up);
    } else {
        out["coefficient"] = conv(cfg, coeff);
    }

    json formulas;
    double v = 0;
    if (pwc_high_intensity_bound(&cfg.params, &v) == PWC_OK)
        formulas["high_intensity_bound"] = conv(cfg, v);
    if (cons.has_peak) {
        if (pwc_low_intensity_linear_slope(&cfg.params, cons.peak, &v) == PWC_OK)
            formulas["low_intensity_linear_slope"] = conv(cfg, v);
        double ratio = cons.has_average ? std::min(cons.average / cons.peak, 1.0) : 1.0;
        if (pwc_low_intensity_quadratic(&cfg.params, ratio, &v) == PWC_OK)
            formulas["low_intensity_quadratic"] = conv(cfg, v);
        double ct = 0, p_star = 0;
        if (pwc_ct_secrecy_capacity(&cfg.params, cons.peak, cons.has_average,
                                    cons.average, &ct, &p_star) == PWC_OK) {
            formulas["ct_secrecy_capacity"] = conv(cfg, ct);
            formulas["ct_on_probability"] = p_star;
        }
    }
    if (pwc_avg_only_equal_gains_slope(&cfg.params, &v) == PWC_OK)
        formulas["avg_only_equal_gains_slope"] = conv(cfg, v);
    if (cons.has_average) {
        double bl = 0, bu = 0;
        if (pwc_avg_only_diff_gains_bounds(&cfg.params, cons.average, &bl, &bu) ==
            PWC_OK) {
            formulas["avg_only_diff_gains_lower"] = conv(cfg, bl);
            formulas["avg_only_diff_gains_upper"] = conv(cfg, bu);
        }
    }
    out["formulas"] = formulas;
    out["metadata"] = metadata_json(cfg, cons);

    std::string err;
    if (!write_file(cfg.out_dir, "asymptotics.json", out.dump(2) + "\n", err)) {
        std::fprintf(stderr, "pwcap: %s\n", err.c_str());
        return 1;
    }
    return 0;
}

// --------------------------------------------------------------- verify ----

int run_verify(const std::string& dir) {
    const std::string path = dir + "/solution.json";
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "pwcap: cannot open %s\n", path.c_str());
        return 1;
    }
    json sol;
    try {
        in >> sol;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pwcap: malformed %s: %s\n", path.c_str(), e.what());
        return 1;
    }
    try {
        const json& meta = sol.at("metadata");
        const bool bits = meta.at("log_base").get<std::string>() == "bits";
        const double scale = bits ? kLn2 : 1.0;  // stored value -> nats
        pwc_channel_params params{};
        const json& pj = meta.at("params");
        params.alpha_b = pj.at("alpha_b").get<double>();
        params.lambda_b = pj.at("lambda_b").get<double>();
        params.alpha_e = pj.at("alpha_e").get<double>();
        params.lambda_e = pj.at("lambda_e").get<double>();
        params.delta = pj.at("delta").get<double>();
        pwc_constraints cons{};
        const json& cj = meta.at("constraints");
        if (cj.contains("peak")) {
            cons.has_peak = 1;
            cons.peak = cj.at("peak").get<double>();
        }
        if (cj.contains("average")) {
            cons.has_average = 1;
            cons.average = cj.at("average").get<double>();
        }
        pwc_solver_config solver{};
        const json& sj = meta.at("solver");
        solver.kkt_tol = sj.at("kkt_tol").get<double>();
        solver.grid_size = sj.at("grid_size").get<long>();
        solver.merge_tol = sj.at("merge_tol").get<double>();
        solver.weight_floor = sj.at("weight_floor").get<double>();
        solver.max_support = static_cast<size_t>(sj.at("max_support").get<long>());
        solver.max_outer_iters = sj.at("max_outer_iters").get<long>();
        pwc_truncation_policy trunc{};
        const json& tj = meta.at("truncation");
        trunc.epsilon_tail = tj.at("epsilon_tail").get<double>();
        trunc.y_max_cap = tj.at("y_max_cap").get<long>();

        std::vector<double> xs = sol.at("distribution").at("locations").get<std::vector<double>>();
        std::vector<double> ws = sol.at("distribution").at("weights").get<std::vector<double>>();
        const double mu = sol.at("mu").get<double>();
        const double gamma = sol.at("gamma").get<double>() * scale;
        const double stored_viol = sol.at("kkt").at("max_violation").get<double>() * scale;
        const double stored_eq = sol.at("kkt").at("equality_residual").get<double>() * scale;

        pwc_kkt_report* rep = nullptr;
        pwc_status st = pwc_kkt_verify(&params, &cons, &solver, &trunc, mu, gamma,
                                       xs.data(), ws.data(), xs.size(), &rep);
        if (st != PWC_OK) return fail(st, "verification");
        const double viol = pwc_kkt_report_max_violation(rep);
        const double eq = pwc_kkt_report_equality_residual(rep);
        const int certified = pwc_kkt_report_certified(rep, solver.kkt_tol);
        pwc_kkt_report_free(rep);

        const double dviol = std::fabs(viol - stored_viol);
        const double deq = std::fabs(eq - stored_eq);
        std::printf("max_violation %s (stored %s, delta %s)\n", fmt(viol).c_str(),
                    fmt(stored_viol).c_str(), fmt(dviol).c_str());
        std::printf("equality_residual %s (stored %s, delta %s)\n", fmt(eq).c_str(),
                    fmt(stored_eq).c_str(), fmt(deq).c_str());
        if (!certified) {
            std::fprintf(stderr, "pwcap: stored solution fails the certificate\n");
            return 2;
        }
        if (dviol > 1e-12 || deq > 1e-12) {
            std::fprintf(stderr,
                         "pwcap: recomputed certificate deviates from the stored report\n");
            return 2;
        }
        std::printf("verified\n");
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pwcap: missing or malformed field in %s: %s\n",
                     path.c_str(), e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson wiretap-channel secrecy-capacity solver"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::string out_override, base_override;
    double mu = 0.0;
    long mu_grid = 21;
    std::string var, values;
    long jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path,
                                    "flat key-value configuration file");
        if (needs_config) opt->required();
        cmd->add_option("--set", sets, "override a config key (key=value, repeatable)");
        cmd->add_option("--out", out_override, "output directory (overrides output.dir)");
        cmd->add_option("--log-base", base_override,
                        "presentation log base: nats or bits")
            ->check(CLI::IsMember({"nats", "bits"}));
    };

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one weighting mu");
    add_common(solve_cmd, true);
    solve_cmd->add_option("--mu", mu, "objective weighting in [0,1]")
        ->check(CLI::Range(0.0, 1.0));

    CLI::App* region_cmd =
        app.add_subcommand("region", "trace the rate-equivocation boundary");
    add_common(region_cmd, true);
    region_cmd->add_option("--mu-grid", mu_grid, "number of uniform mu values");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "solve across a parameter sweep");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--var", var, "swept variable: peak, average, or delta")
        ->required();
    sweep_cmd->add_option("--values", values, "comma-separated sweep values")->required();
    sweep_cmd->add_option("--jobs", jobs, "max concurrent solves");

    CLI::App* asym_cmd =
        app.add_subcommand("asymptotics", "closed-form asymptotic characterization");
    add_common(asym_cmd, true);

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "re-check a stored solution.json");
    add_common(verify_cmd, false);

    CLI11_PARSE(app, argc, argv);

    std::map<std::string, std::string> kv;
    std::string err;
    if (!config_path.empty() && !load_kv_file(config_path, kv, err)) {
        std::fprintf(stderr, "pwcap: %s\n", err.c_str());
        return 1;
    }
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "pwcap: --set needs key=value, got '%s'\n", s.c_str());
            return 1;
        }
        kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }

    RunConfig cfg;
    const bool is_verify = verify_cmd->parsed();
    if (is_verify) {
        // Verification only needs the directory holding solution.json; the
        // stored metadata supplies everything else.
        auto it = kv.find("output.dir");
        if (it != kv.end()) cfg.out_dir = it->second;
    } else if (!build_config(kv, cfg, err)) {
        std::fprintf(stderr, "pwcap: %s\n", err.c_str());
        return 1;
    }
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (!base_override.empty()) cfg.bits = base_override == "bits";

    if (solve_cmd->parsed()) return run_solve(cfg, mu);
    if (region_cmd->parsed()) return run_region(cfg, mu_grid);
    if (sweep_cmd->parsed()) return run_sweep(cfg, var, values, jobs);
    if (asym_cmd->parsed()) return run_asymptotics(cfg);
    if (verify_cmd->parsed()) return run_verify(cfg.out_dir);
    return 1;
}
