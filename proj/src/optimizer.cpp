#include "optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>

namespace pwc {

namespace {

void require(bool cond, errc code, const std::string& msg) {
    if (!cond) throw error(code, msg);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Two-sided density evaluation bundle for one fixed support.
class SupportEval {
  public:
    SupportEval(std::vector<double> xs, double mu, const ChannelParams& params,
                const TruncationPolicy& policy, double peak)
        : xs_(std::move(xs)),
          mu_(mu),
          b_(Receiver::legitimate, xs_, params, policy, peak),
          e_(Receiver::eavesdropper, xs_, params, policy, peak) {}

    void set_weights(const std::vector<double>& w) {
        b_.set_weights(w);
        e_.set_weights(w);
        b_.densities_on_support(db_);
        e_.densities_on_support(de_);
        d_.resize(xs_.size());
        value_ = 0;
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            d_[i] = db_[i] - (1 - mu_) * de_[i];
            value_ += w[i] * d_[i];
        }
    }

    const std::vector<double>& locations() const { return xs_; }
    const std::vector<double>& density() const { return d_; }
    double value() const { return value_; }

    void hessian(Eigen::MatrixXd& H) {
        b_.hessian(hb_);
        e_.hessian(he_);
        const std::size_t n = xs_.size();
        H.resize(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                H(j, k) = hb_[j * n + k] - (1 - mu_) * he_[j * n + k];
    }

    double density_at(double x) const {
        return b_.density_at(x) - (1 - mu_) * e_.density_at(x);
    }
    double density_derivative_at(double x) const {
        return b_.density_derivative_at(x) - (1 - mu_) * e_.density_derivative_at(x);
    }

  private:
    std::vector<double> xs_;
    double mu_;
    detail::SideTables b_, e_;
    std::vector<double> db_, de_, d_, hb_, he_;
    double value_ = 0;
};

std::vector<double> project_simplex(std::vector<double> v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0, tau = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        css += u[k];
        const double cand = (css - 1.0) / static_cast<double>(k + 1);
        if (u[k] - cand > 0) tau = cand;
    }
    for (double& x : v) x = std::max(x - tau, 0.0);
    return v;
}

struct InnerState {
    std::vector<double> w;
    std::vector<double> d;
    double value = 0;  // f_mu (not the Lagrangian)
};

// Monotone projected gradient on the gamma-Lagrangian over the simplex.
InnerState inner_pg(SupportEval& ev, std::vector<double> w, double gamma,
                    long iters = 250, double tol = 1e-9) {
    const std::vector<double>& xs = ev.locations();
    const std::size_t n = xs.size();
    ev.set_weights(w);
    std::vector<double> d = ev.density();
    double val = ev.value();
    double lag = val - gamma * dot(xs, w);
    double step = 1.0;
    std::vector<double> g(n), cand;
    for (long it = 0; it < iters; ++it) {
        double gmax = -1e300;
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = d[i] - gamma * xs[i];
            gmax = std::max(gmax, g[i]);
        }
        double res = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (w[i] > 1e-15) res = std::max(res, std::fabs(g[i] - gmax));
        if (res < tol) break;
        cand = w;
        for (std::size_t i = 0; i < n; ++i) cand[i] += step * g[i];
        cand = project_simplex(std::move(cand));
        ev.set_weights(cand);
        const double val2 = ev.value();
        const double lag2 = val2 - gamma * dot(xs, cand);
        if (lag2 >= lag) {
            w = cand;
            d = ev.density();
            val = val2;
            lag = lag2;
            step *= 1.7;
        } else {
            step *= 0.4;
            if (step < 1e-16) break;
        }
    }
    return {std::move(w), std::move(d), val};
}

// Active-set Newton polish for: maximize f_mu(p) - gamma<x,p> over the simplex.
InnerState inner_newton(SupportEval& ev, std::vector<double> w, double gamma,
                        long rounds = 40, double tol = 1e-12) {
    const std::vector<double>& xs = ev.locations();
    const std::size_t n = xs.size();
    Eigen::MatrixXd H;
    for (long round = 0; round < rounds; ++round) {
        ev.set_weights(w);
        std::vector<double> d = ev.density();
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = d[i] - gamma * xs[i];
        std::vector<std::size_t> S;
        for (std::size_t i = 0; i < n; ++i)
            if (w[i] > 1e-14) S.push_back(i);
        double lam = 0;
        for (std::size_t i : S) lam += g[i] * w[i];
        double res_S = 0;
        for (std::size_t i : S) res_S = std::max(res_S, std::fabs(g[i] - lam));
        double viol_off = -1e300;
        std::size_t release = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] > 1e-14) continue;
            if (g[i] - lam > viol_off) {
                viol_off = g[i] - lam;
                release = i;
            }
        }
        if (res_S < tol && (release == n || viol_off <= tol)) break;
        if (release < n && viol_off > std::max(res_S, tol)) {
            w[release] = 1e-12;
            continue;
        }
        ev.hessian(H);
        const std::size_t m = S.size();
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + 1, m + 1);
        Eigen::VectorXd rhs(m + 1);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) K(a, b) = H(S[a], S[b]);
            K(a, m) = -1.0;
            K(m, a) = 1.0;
            rhs(a) = -(g[S[a]] - lam);
        }
        double ssum = 0;
        for (std::size_t i : S) ssum += w[i];
        rhs(m) = 1.0 - ssum;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        if (!lu.isInvertible()) break;
        Eigen::VectorXd sol = lu.solve(rhs);
        double t = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 40; ++bt) {
            std::vector<double> cand = w;
            for (std::size_t a = 0; a < m; ++a)
                cand[S[a]] = std::max(w[S[a]] + t * sol(a), 0.0);
            double csum = std::accumulate(cand.begin(), cand.end(), 0.0);
            if (csum <= 0) {
                t *= 0.5;
                continue;
            }
            for (double& c : cand) c /= csum;
            ev.set_weights(cand);
            const std::vector<double>& d2 = ev.density();
            std::vector<std::size_t> S2;
            for (std::size_t i = 0; i < n; ++i)
                if (cand[i] > 1e-14) S2.push_back(i);
            double lam2 = 0;
            for (std::size_t i : S2) lam2 += (d2[i] - gamma * xs[i]) * cand[i];
            double r2 = 0;
            for (std::size_t i : S2)
                r2 = std::max(r2, std::fabs(d2[i] - gamma * xs[i] - lam2));
            if (r2 < res_S) {
                w = std::move(cand);
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if (!improved) break;
    }
    ev.set_weights(w);
    return {std::move(w), ev.density(), ev.value()};
}

InnerState lagrangian_argmax(SupportEval& ev, std::vector<double> w0, double gamma) {
    InnerState s = inner_pg(ev, std::move(w0), gamma);
    return inner_newton(ev, std::move(s.w), gamma);
}

// optimize_weights body shared with solve() so the support tables are reused.
WeightsResult optimize_weights_on(SupportEval& ev, const IntensityConstraints& constraints,
                                  const std::vector<double>* warm) {
    const std::vector<double>& xs = ev.locations();
    const std::size_t n = xs.size();
    std::vector<double> w0(n, 1.0 / static_cast<double>(n));
    if (warm) {
        w0 = *warm;
        double s = 0;
        for (double& x : w0) {
            x = std::max(x, 0.0);
            s += x;
        }
        require(s > 0, errc::invalid_argument, "warm-start weights are all zero");
        for (double& x : w0) x /= s;
    }
    InnerState st = lagrangian_argmax(ev, std::move(w0), 0.0);
    const bool has_avg = constraints.average.has_value();
    const double peak_scale = constraints.peak ? std::max(*constraints.peak, 1.0) : 1.0;
    if (!has_avg || dot(xs, st.w) <= *constraints.average + 1e-13 * peak_scale) {
        return {std::move(st.w), 0.0, st.value};
    }
    const double E = *constraints.average;
    // Bracket the multiplier by doubling, then bisect on the mean.
    double glo = 0.0, ghi = 0.5;
    InnerState hi_st = st;
    bool bracketed = false;
    for (int k = 0; k < 60; ++k) {
        hi_st = lagrangian_argmax(ev, hi_st.w, ghi);
        if (dot(xs, hi_st.w) <= E) {
            bracketed = true;
            break;
        }
        glo = ghi;
        ghi *= 2;
    }
    require(bracketed, errc::solver_stall, "failed to bracket the average-constraint multiplier");
    st = std::move(hi_st);
    for (int k = 0; k < 45; ++k) {
        const double gm = 0.5 * (glo + ghi);
        st = lagrangian_argmax(ev, st.w, gm);
        if (dot(xs, st.w) > E)
            glo = gm;
        else
            ghi = gm;
    }
    double gamma = ghi;
    st = lagrangian_argmax(ev, st.w, gamma);
    // Joint Newton with the mean pinned to E and gamma free.
    Eigen::MatrixXd H;
    for (int round = 0; round < 30; ++round) {
        ev.set_weights(st.w);
        const std::vector<double>& d = ev.density();
        std::vector<std::size_t> S;
        for (std::size_t i = 0; i < n; ++i)
            if (st.w[i] > 1e-14) S.push_back(i);
        double lam = 0;
        for (std::size_t i : S) lam += (d[i] - gamma * xs[i]) * st.w[i];
        double r = std::fabs(dot(xs, st.w) - E);
        for (std::size_t i : S)
            r = std::max(r, std::fabs(d[i] - gamma * xs[i] - lam));
        if (r < 1e-13) break;
        ev.hessian(H);
        const std::size_t m = S.size();
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + 2, m + 2);
        Eigen::VectorXd rhs(m + 2);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) K(a, b) = H(S[a], S[b]);
            K(a, m) = -1.0;
            K(a, m + 1) = -xs[S[a]];
            K(m, a) = 1.0;
            K(m + 1, a) = xs[S[a]];
            rhs(a) = -(d[S[a]] - gamma * xs[S[a]] - lam);
        }
        double ssum = 0;
        for (std::size_t i : S) ssum += st.w[i];
        rhs(m) = 1.0 - ssum;
        rhs(m + 1) = E - dot(xs, st.w);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        if (!lu.isInvertible()) break;
        Eigen::VectorXd sol = lu.solve(rhs);
        std::vector<double> cand = st.w;
        bool ok = true;
        for (std::size_t a = 0; a < m; ++a) {
            cand[S[a]] = st.w[S[a]] + sol(a);
            if (cand[S[a]] < 0) ok = false;
        }
        const double gnew = gamma + sol(m + 1);
        if (!ok || gnew < 0) break;  // keep the bisection answer
        st.w = std::move(cand);
        gamma = gnew;
    }
    ev.set_weights(st.w);
    return {st.w, gamma, ev.value()};
}

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 80) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < iters; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
        if (b - a < 1e-11 * std::max(1.0, std::fabs(a))) break;
    }
    return 0.5 * (a + b);
}

// Fast f_mu evaluation when a single location moves at fixed weights: per-side
// kernel columns kept in linear space scaled by the peak output mean, so one
// row swap plus a column pass re-evaluates the objective in O(n * Y).
class FixedWeightObjective {
  public:
    FixedWeightObjective(const std::vector<double>& xs, const std::vector<double>& ws,
                         double mu, const ChannelParams& params,
                         const TruncationPolicy& policy, double peak)
        : mu_(mu) {
        sides_[0].init(xs, ws, params.alpha_b, params.lambda_b, params.delta, policy, peak);
        sides_[1].init(xs, ws, params.alpha_e, params.lambda_e, params.delta, policy, peak);
    }

    double eval(std::size_t j, double t) const {
        return sides_[0].eval(j, t) - (1 - mu_) * sides_[1].eval(j, t);
    }

  private:
    struct SideObj {
        double alpha = 0, lambda = 0, delta = 1, M = 1, logM = 0, lamdel = 0;
        long Y = 0;
        std::size_t n = 0;
        std::vector<double> w, x;
        std::vector<double> rows;     // n x Y: w_i e^{-alpha x_i delta} (m_i / M)^y
        std::vector<double> lin;      // (m_i/delta) log m_i - alpha x_i per point
        std::vector<double> logfact;  // log y!

        void init(const std::vector<double>& xs, const std::vector<double>& ws,
                  double a, double l, double dlt, const TruncationPolicy& policy,
                  double peak) {
            alpha = a;
            lambda = l;
            delta = dlt;
            lamdel = lambda * delta;
            n = xs.size();
            w = ws;
            x = xs;
            double top = peak;
            for (double xi : xs) top = std::max(top, xi);
            M = (alpha * top + lambda) * delta;
            logM = std::log(M);
            Y = truncation_index(M, policy) + 1;
            rows.assign(n * Y, 0.0);
            lin.assign(n, 0.0);
            logfact.assign(Y, 0.0);
            for (long y = 1; y < Y; ++y)
                logfact[y] = logfact[y - 1] + std::log(static_cast<double>(y));
            for (std::size_t i = 0; i < n; ++i) fill_row(&rows[i * Y], x[i], w[i]);
            for (std::size_t i = 0; i < n; ++i) lin[i] = lin_term(x[i]);
        }

        double lin_term(double xi) const {
            const double m = (alpha * xi + lambda) * delta;
            return (m / delta) * std::log(m) - alpha * xi;
        }

        void fill_row(double* row, double xi, double wi) const {
            const double m = (alpha * xi + lambda) * delta;
            double term = wi * std::exp(-alpha * xi * delta);
            const double ratio = m / M;
            for (long y = 0; y < Y; ++y) {
                row[y] = term;
                term *= ratio;
            }
        }

        double eval(std::size_t j, double t) const {
            std::vector<double> col(Y, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (i == j) continue;
                const double* r = &rows[i * Y];
                for (long y = 0; y < Y; ++y) col[y] += r[y];
            }
            std::vector<double> rj(Y);
            fill_row(rj.data(), t, w[j]);
            double linsum = w[j] * lin_term(t);
            for (std::size_t i = 0; i < n; ++i)
                if (i != j) linsum += w[i] * lin[i];
            double acc = 0;
            for (long y = 0; y < Y; ++y) {
                const double c = col[y] + rj[y];
                if (c <= 0) continue;
                const double logg = std::log(c) + static_cast<double>(y) * logM;
                const double logpy = -lamdel + logg - logfact[y];
                acc += std::exp(logpy) * logg;
            }
            return linsum - acc / delta;
        }
    };

    double mu_;
    SideObj sides_[2];
};

DiscreteDistribution make_dist(std::vector<double> xs, std::vector<double> ws) {
    DiscreteDistribution d;
    d.location = std::move(xs);
    d.weight = std::move(ws);
    return d;
}

// Merge mass points closer than merge_tol * A into weighted centroids (the
// origin never moves) and drop weights below the floor (never the origin).
void drop_and_merge(std::vector<double>& xs, std::vector<double>& ws,
                    const SolverConfig& config, double peak) {
    const double mtol = config.merge_tol * peak;
    std::vector<double> kx{xs[0]}, kp{ws[0]};
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] - kx.back() < mtol) {
            if (kx.back() > 0) {
                const double tot = kp.back() + ws[i];
                kx.back() = (kx.back() * kp.back() + xs[i] * ws[i]) / std::max(tot, 1e-300);
            }
            kp.back() += ws[i];
        } else {
            kx.push_back(xs[i]);
            kp.push_back(ws[i]);
        }
    }
    std::vector<double> fx, fp;
    for (std::size_t i = 0; i < kx.size(); ++i) {
        if (i == 0 || kp[i] > config.weight_floor) {
            fx.push_back(kx[i]);
            fp.push_back(kp[i]);
        }
    }
    double s = std::accumulate(fp.begin(), fp.end(), 0.0);
    for (double& p : fp) p /= s;
    xs = std::move(fx);
    ws = std::move(fp);
}

// Collapse satellite clusters (gaps below gap_frac * A) into weighted
// centroids before the terminal stationarity polish.
void consolidate(std::vector<double>& xs, std::vector<double>& ws, double peak,
                 double gap_frac = 0.02) {
    std::vector<double> ox, op;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t k = i;
        while (k + 1 < xs.size() && xs[k + 1] - xs[k] < gap_frac * peak) ++k;
        double wsum = 0, cx = 0;
        for (std::size_t t = i; t <= k; ++t) {
            wsum += ws[t];
            cx += xs[t] * ws[t];
        }
        ox.push_back(xs[i] == 0.0 ? 0.0 : cx / wsum);
        op.push_back(wsum);
        i = k + 1;
    }
    xs = std::move(ox);
    ws = std::move(op);
}

// Restore exact mean feasibility after finite-tolerance Newton steps by moving
// the tiny excess mass from the top locations onto the origin.  Returns true
// if anything moved.
bool repair_mean(const std::vector<double>& xs, std::vector<double>& ws, double E) {
    double mean = dot(xs, ws);
    if (mean <= E) return false;
    bool moved = false;
    for (std::size_t i = xs.size(); i-- > 1 && mean > E;) {
        if (xs[i] <= 0) break;
        const double take = std::min((mean - E) / xs[i], ws[i]);
        ws[i] -= take;
        ws[0] += take;
        mean -= take * xs[i];
        moved = true;
    }
    return moved;
}

struct PolishOutcome {
    std::vector<double> xs, ws;
    double gamma = 0;
};

// Damped Newton on the full stationarity system in (weights, free locations,
// gamma, lambda): density slack constant on the support, density derivative
// equal to gamma at interior points, weights on the simplex, mean pinned to E
// when the average constraint binds.  Finite-difference Jacobian.
std::optional<PolishOutcome> joint_polish(const std::vector<double>& xs0,
                                          const std::vector<double>& ws0, double gamma0,
                                          double mu, const ChannelParams& params,
                                          const IntensityConstraints& constraints,
                                          const TruncationPolicy& policy, double peak) {
    const std::size_t n = xs0.size();
    std::vector<std::size_t> free_idx;
    for (std::size_t j = 0; j < n; ++j)
        if (xs0[j] > 1e-9 && xs0[j] < peak - 1e-9) free_idx.push_back(j);
    const std::size_t nf = free_idx.size();
    const bool with_mean = constraints.average.has_value() && gamma0 > 1e-12;
    const double E = constraints.average.value_or(0.0);
    const std::size_t m = n + nf + 2;

    auto residual = [&](const Eigen::VectorXd& u, Eigen::VectorXd& r) {
        std::vector<double> p(n), x(xs0);
        for (std::size_t i = 0; i < n; ++i) p[i] = u(i);
        for (std::size_t t = 0; t < nf; ++t) x[free_idx[t]] = u(n + t);
        const double g = u(m - 2), l = u(m - 1);
        SupportEval ev(x, mu, params, policy, peak);
        ev.set_weights(p);
        const std::vector<double>& d = ev.density();
        r.resize(m);
        for (std::size_t i = 0; i < n; ++i) r(i) = d[i] - g * x[i] - l;
        for (std::size_t t = 0; t < nf; ++t)
            r(n + t) = ev.density_derivative_at(x[free_idx[t]]) - g;
        double psum = 0, pmean = 0;
        for (std::size_t i = 0; i < n; ++i) {
            psum += p[i];
            pmean += p[i] * x[i];
        }
        r(m - 2) = psum - 1.0;
        r(m - 1) = with_mean ? pmean - E : g - gamma0;
    };

    Eigen::VectorXd u(m);
    {
        SupportEval ev(xs0, mu, params, policy, peak);
        ev.set_weights(ws0);
        double lam = ev.value() - gamma0 * dot(xs0, ws0);
        for (std::size_t i = 0; i < n; ++i) u(i) = ws0[i];
        for (std::size_t t = 0; t < nf; ++t) u(n + t) = xs0[free_idx[t]];
        u(m - 2) = gamma0;
        u(m - 1) = lam;
    }

    Eigen::VectorXd r(m), rp(m), rm(m);
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        residual(u, r);
        const double rn = r.lpNorm<Eigen::Infinity>();
        if (rn < 2e-9) {
            converged = true;
            break;
        }
        Eigen::MatrixXd J(m, m);
        for (std::size_t k = 0; k < m; ++k) {
            const double h = 1e-7 * std::max(1.0, std::fabs(u(k)));
            Eigen::VectorXd up = u, um = u;
            up(k) += h;
            um(k) -= h;
            residual(up, rp);
            residual(um, rm);
            J.col(k) = (rp - rm) / (2 * h);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) return std::nullopt;
        Eigen::VectorXd step = lu.solve(-r);
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            Eigen::VectorXd un = u + t * step;
            bool pos = true;
            for (std::size_t i = 0; i < n; ++i)
                if (un(i) <= 0) pos = false;
            if (pos) {
                residual(un, rp);
                if (rp.lpNorm<Eigen::Infinity>() < rn) {
                    u = un;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) {
            // stalled at the finite-difference noise floor: accept if small
            if (rn < 1e-7) {
                converged = true;
                break;
            }
            return std::nullopt;
        }
    }
    if (!converged) {
        residual(u, r);
        if (r.lpNorm<Eigen::Infinity>() >= 1e-7) return std::nullopt;
    }

    PolishOutcome out;
    out.ws.resize(n);
    out.xs = xs0;
    for (std::size_t i = 0; i < n; ++i) out.ws[i] = u(i);
    for (std::size_t t = 0; t < nf; ++t) out.xs[free_idx[t]] = u(n + t);
    out.gamma = std::max(u(m - 2), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (out.ws[i] <= 0) return std::nullopt;
        if (i > 0 && out.xs[i] <= out.xs[i - 1]) return std::nullopt;
    }
    if (out.xs.back() > peak * (1 + 1e-12)) return std::nullopt;
    return out;
}

}  // namespace

void SolverConfig::validate() const {
    require(kkt_tol > 0 && merge_tol > 0 && weight_floor > 0, errc::invalid_argument,
            "solver tolerances must be strictly positive");
    require(grid_size >= 3, errc::invalid_argument, "certificate grid needs at least 3 points");
    require(max_support >= 2 && max_outer_iters >= 1, errc::invalid_argument,
            "support and iteration caps must allow at least one step");
}

WeightsResult optimize_weights(const std::vector<double>& locations, double mu,
                               const ChannelParams& params,
                               const IntensityConstraints& constraints,
                               const SolverConfig& config, const TruncationPolicy& policy,
                               const std::vector<double>* warm) {
    params.validate();
    config.validate();
    policy.validate();
    IntensityConstraints cons = constraints;
    cons.validate_and_normalize();
    require(cons.peak.has_value(), errc::unsupported_regime,
            "weight optimization requires a peak intensity bound");
    require(mu >= 0 && mu <= 1, errc::invalid_argument, "mu must lie in [0,1]");
    require(!locations.empty() && locations.front() == 0.0, errc::invalid_argument,
            "candidate locations must start at the origin");
    for (std::size_t i = 1; i < locations.size(); ++i)
        require(locations[i] > locations[i - 1], errc::invalid_argument,
                "candidate locations must be strictly increasing");
    require(locations.back() <= *cons.peak * (1 + 1e-12), errc::invalid_argument,
            "candidate locations must stay within the peak bound");
    SupportEval ev(locations, mu, params, policy, *cons.peak);
    return optimize_weights_on(ev, cons, warm);
}

SolveResult refine_locations(const SolveResult& current, double mu,
                             const ChannelParams& params,
                             const IntensityConstraints& constraints,
                             const SolverConfig& config, const TruncationPolicy& policy) {
    IntensityConstraints cons = constraints;
    cons.validate_and_normalize();
    require(cons.peak.has_value(), errc::unsupported_regime,
            "location refinement requires a peak intensity bound");
    const double A = *cons.peak;
    std::vector<double> xs = current.dist.location;
    const std::vector<double>& ws = current.dist.weight;
    const std::size_t n = xs.size();
    for (std::size_t j = 1; j < n; ++j) {
        double lo = 0.5 * (xs[j - 1] + xs[j]);
        double hi = j + 1 < n ? 0.5 * (xs[j] + xs[j + 1]) : A;
        if (cons.average && ws[j] > 0) {
            const double mean = dot(xs, ws);
            hi = std::min(hi, xs[j] + std::max(0.0, *cons.average - mean) / ws[j]);
        }
        if (hi <= lo) continue;
        FixedWeightObjective fobj(xs, ws, mu, params, policy, A);
        auto f = [&](double t) { return fobj.eval(j, t); };
        const double base = f(xs[j]);
        const double xj = golden_max(f, lo, hi);
        if (f(xj) >= base) xs[j] = xj;
    }
    WeightsResult wr = optimize_weights(xs, mu, params, cons, config, policy,
                                        &current.dist.weight);
    SolveResult out;
    out.dist = make_dist(std::move(xs), std::move(wr.weights));
    out.objective = wr.objective;
    out.gamma = wr.gamma;
    out.mu = mu;
    out.iterations = current.iterations;
    return out;
}

KktReport kkt_verify(const DiscreteDistribution& dist, double gamma, double mu,
                     const ChannelParams& params, const IntensityConstraints& constraints,
                     const SolverConfig& config, const TruncationPolicy& policy) {
    params.validate();
    config.validate();
    policy.validate();
    IntensityConstraints cons = constraints;
    cons.validate_and_normalize();
    require(cons.peak.has_value(), errc::unsupported_regime,
            "certificate verification requires a peak intensity bound");
    // Structural validity only: the certificate itself accounts for the mean
    // through the gamma*E term, so candidates with slight mean slop are
    // checkable (solve guarantees feasibility of its final result separately).
    dist.validate(nullptr);
    const double A = *cons.peak;
    require(dist.location.back() <= A * (1 + 1e-12), errc::invalid_argument,
            "a mass point exceeds the peak intensity bound");
    SupportEval ev(dist.location, mu, params, policy, A);
    ev.set_weights(dist.weight);
    const double value = ev.value();
    const double bound = value - gamma * (cons.average ? *cons.average : 0.0);

    const double cell = A / static_cast<double>(config.grid_size - 1);
    std::vector<double> xs;
    xs.reserve(config.grid_size + 21 * (dist.size() + 1));
    for (long i = 0; i < config.grid_size; ++i)
        xs.push_back(std::min(A, static_cast<double>(i) * cell));
    auto add_window = [&](double c) {
        for (int k = -10; k <= 10; ++k) {
            const double x = c + static_cast<double>(k) * cell / 10.0;
            if (x >= 0 && x <= A) xs.push_back(x);
        }
    };
    for (double c : dist.location) add_window(c);

    auto slack_at = [&](double x) { return ev.density_at(x) - gamma * x; };

    // First pass locates the worst violation; a refinement window around it
    // sharpens the reported maximum and the insertion abscissa.
    double worst_x = 0, worst = -1e300;
    std::vector<double> sv(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sv[i] = slack_at(xs[i]);
        if (sv[i] - bound > worst) {
            worst = sv[i] - bound;
            worst_x = xs[i];
        }
    }
    const std::size_t first_count = xs.size();
    add_window(worst_x);
    for (std::size_t i = first_count; i < xs.size(); ++i) {
        sv.push_back(slack_at(xs[i]));
        if (sv.back() - bound > worst) {
            worst = sv.back() - bound;
            worst_x = xs[i];
        }
    }

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

    KktReport rep;
    rep.gamma = gamma;
    rep.max_violation = worst;
    rep.argmax_x = worst_x;
    rep.grid_x.reserve(xs.size());
    rep.grid_slack.reserve(xs.size());
    double last = -1;
    for (std::size_t k : order) {
        if (!rep.grid_x.empty() && xs[k] - last < 1e-15 * std::max(A, 1.0)) continue;
        rep.grid_x.push_back(xs[k]);
        rep.grid_slack.push_back(bound - sv[k]);  // nonnegative when certified
        last = xs[k];
    }
    double eq = 0;
    for (std::size_t i = 0; i < dist.size(); ++i)
        eq = std::max(eq, std::fabs(slack_at(dist.location[i]) - bound));
    rep.equality_residual = eq;
    return rep;
}

double estimate_gamma(const DiscreteDistribution& dist, double mu,
                      const ChannelParams& params, const IntensityConstraints& constraints,
                      const TruncationPolicy& policy) {
    params.validate();
    policy.validate();
    IntensityConstraints cons = constraints;
    cons.validate_and_normalize();
    dist.validate(cons.peak ? &cons : nullptr);
    require(dist.size() >= 2, errc::undefined_multiplier,
            "the multiplier fit needs at least two mass points");
    if (!cons.average) return 0.0;
    if (dist.mean() < *cons.average - 1e-9) return 0.0;  // slack constraint
    const double peak = cons.peak ? *cons.peak : dist.location.back();
    SupportEval ev(dist.location, mu, params, policy, peak);
    ev.set_weights(dist.weight);
    const std::vector<double>& d = ev.density();
    const std::size_t n = dist.size();
    double mx = 0, md = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += dist.location[i];
        md += d[i];
    }
    mx /= static_cast<double>(n);
    md /= static_cast<double>(n);
    double cov = 0, var = 0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (dist.location[i] - mx) * (d[i] - md);
        var += (dist.location[i] - mx) * (dist.location[i] - mx);
    }
    return std::max(cov / var, 0.0);
}

SolveResult solve(double mu, const ChannelParams& params,
                  const IntensityConstraints& constraints, const SolverConfig& config,
                  const TruncationPolicy& policy, const DiscreteDistribution* warm_start) {
    params.validate();
    config.validate();
    policy.validate();
    require(mu >= 0 && mu <= 1, errc::invalid_argument, "mu must lie in [0,1]");
    IntensityConstraints cons = constraints;
    cons.validate_and_normalize();
    require(params.is_weakly_degraded(), errc::not_degraded,
            "channel parameters are not stochastically degraded: the legitimate gain "
            "must be at least the eavesdropper's, and the legitimate dark-current-to-gain "
            "ratio must not exceed the eavesdropper's");
    require(cons.peak.has_value(), errc::unsupported_regime,
            "solving with only an average-intensity constraint is not supported (the "
            "optimal support is countably infinite); use the asymptotics module for "
            "that regime");
    const double A = *cons.peak;

    if (params.identical_channels() && mu == 0.0) {
        // Identical channels carry zero secrecy rate; every distribution is
        // optimal and the degenerate origin input is the canonical answer.
        SolveResult out;
        out.dist = make_dist({0.0}, {1.0});
        out.objective = 0;
        out.gamma = 0;
        out.mu = mu;
        out.iterations = 0;
        out.kkt = kkt_verify(out.dist, 0.0, mu, params, cons, config, policy);
        return out;
    }

    std::vector<double> xs{0.0, A};
    std::vector<double> ws;
    const std::vector<double>* warm_w = nullptr;
    std::vector<double> warm_storage;
    if (warm_start) {
        warm_start->validate(&cons);
        xs = warm_start->location;
        warm_storage = warm_start->weight;
        if (xs.front() != 0.0) {
            xs.insert(xs.begin(), 0.0);
            warm_storage.insert(warm_storage.begin(), config.weight_floor);
        }
        warm_w = &warm_storage;
    }

    WeightsResult wr = optimize_weights(xs, mu, params, cons, config, policy, warm_w);
    ws = std::move(wr.weights);
    double gamma = wr.gamma;
    double value = wr.objective;

    SolveResult cur;
    cur.mu = mu;
    long outer = 0;
    bool certified = false;
    KktReport scan;
    for (outer = 0; outer < config.max_outer_iters; ++outer) {
        cur.dist = make_dist(xs, ws);
        cur.objective = value;
        cur.gamma = gamma;
        SolveResult refined = refine_locations(cur, mu, params, cons, config, policy);
        xs = refined.dist.location;
        ws = refined.dist.weight;
        gamma = refined.gamma;
        value = refined.objective;
        {
            const std::size_t before = xs.size();
            drop_and_merge(xs, ws, config, A);
            if (xs.size() != before) {
                WeightsResult w2 = optimize_weights(xs, mu, params, cons, config, policy, &ws);
                ws = std::move(w2.weights);
                gamma = w2.gamma;
                value = w2.objective;
            }
        }
        scan = kkt_verify(make_dist(xs, ws), gamma, mu, params, cons, config, policy);
        if (scan.certified(config.kkt_tol)) {
            certified = true;
            break;
        }
        const double xins = scan.argmax_x;
        double nearest = 1e300;
        for (double x : xs) nearest = std::min(nearest, std::fabs(x - xins));
        if (nearest < config.merge_tol * A) continue;  // refinement will absorb it
        require(xs.size() < config.max_support, errc::solver_stall,
                "support-size cap reached before the certificate passed");
        auto pos = std::upper_bound(xs.begin(), xs.end(), xins);
        ws.insert(ws.begin() + (pos - xs.begin()), 1e-10);
        xs.insert(pos, xins);
        double s = std::accumulate(ws.begin(), ws.end(), 0.0);
        for (double& p : ws) p /= s;
        WeightsResult w3 = optimize_weights(xs, mu, params, cons, config, policy, &ws);
        ws = std::move(w3.weights);
        gamma = w3.gamma;
        value = w3.objective;
        {
            const std::size_t before = xs.size();
            drop_and_merge(xs, ws, config, A);
            if (xs.size() != before) {
                WeightsResult w4 = optimize_weights(xs, mu, params, cons, config, policy, &ws);
                ws = std::move(w4.weights);
                gamma = w4.gamma;
                value = w4.objective;
            }
        }
    }
    require(certified, errc::solver_stall,
            "outer iteration cap reached with max KKT violation " +
                std::to_string(scan.max_violation) + " nats/second (objective " +
                std::to_string(value) + ")");

    if (cons.average && repair_mean(xs, ws, *cons.average)) {
        SupportEval rev(xs, mu, params, policy, A);
        rev.set_weights(ws);
        value = rev.value();
        scan = kkt_verify(make_dist(xs, ws), gamma, mu, params, cons, config, policy);
        require(scan.certified(config.kkt_tol), errc::solver_stall,
                "certificate lost while restoring mean feasibility");
    }

    // Terminal clean-up: collapse satellite clusters, polish the stationarity
    // system, and keep the polished answer only if it still certifies.
    {
        std::vector<double> cx = xs, cw = ws;
        consolidate(cx, cw, A);
        double cgamma = gamma;
        if (cx.size() < xs.size()) {
            WeightsResult w5 = optimize_weights(cx, mu, params, cons, config, policy, &cw);
            cw = std::move(w5.weights);
            cgamma = w5.gamma;
        }
        auto pol = joint_polish(cx, cw, cgamma, mu, params, cons, policy, A);
        if (pol) {
            if (cons.average) repair_mean(pol->xs, pol->ws, *cons.average);
            DiscreteDistribution pd = make_dist(pol->xs, pol->ws);
            KktReport prep =
                kkt_verify(pd, pol->gamma, mu, params, cons, config, policy);
            SupportEval pev(pol->xs, mu, params, policy, A);
            pev.set_weights(pol->ws);
            const double pval = pev.value();
            if (prep.certified(config.kkt_tol) && pval >= value - 1e-7) {
                xs = pol->xs;
                ws = pol->ws;
                gamma = pol->gamma;
                value = pval;
                scan = std::move(prep);
            }
        }
    }

    SolveResult out;
    out.dist = make_dist(std::move(xs), std::move(ws));
    out.objective = value;
    out.gamma = gamma;
    out.kkt = std::move(scan);
    out.iterations = outer + 1;
    out.mu = mu;
    return out;
}

}  // namespace pwc
