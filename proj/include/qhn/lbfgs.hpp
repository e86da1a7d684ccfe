#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhn/objective.hpp"
#include "qhn/parallel.hpp"
#include "qhn/rng.hpp"

namespace qhn {

struct LbfgsConfig {
    int memory = 10;
    double c1 = 1e-4;          // sufficient-decrease (Armijo) coefficient
    double c2 = 0.9;           // curvature coefficient (strong Wolfe)
    int max_iterations = 500;
    double grad_tolerance = 1e-8;  // on the gradient L2 norm
    int max_linesearch = 40;
    bool record_trace = false;     // objective value at every accepted iterate
    bool record_iterates = false;  // full parameter vector at every accepted iterate
};

enum class Termination { gradient_tolerance, max_iterations, line_search_failure, non_finite };

inline std::string termination_name(Termination t) {
    switch (t) {
        case Termination::gradient_tolerance: return "gradient_tolerance";
        case Termination::max_iterations: return "max_iterations";
        case Termination::line_search_failure: return "line_search_failure";
        case Termination::non_finite: return "non_finite";
    }
    return "unknown";
}

struct RunRecord {
    std::uint64_t seed = 0;
    std::vector<double> theta0;
    std::vector<double> theta;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    int iterations = 0;
    Termination termination = Termination::max_iterations;
    std::vector<double> trace;                  // when record_trace
    std::vector<std::vector<double>> iterates;  // when record_iterates
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(std::span<const double> a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// Minimizer of the cubic interpolant through (a, fa, ga) and (b, fb, gb);
// falls back to bisection when the interpolant is degenerate.
inline double cubic_min(double a, double fa, double ga, double b, double fb, double gb) {
    const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - ga * gb;
    if (disc < 0.0) return 0.5 * (a + b);
    const double d2 = std::sqrt(disc) * (b > a ? 1.0 : -1.0);
    const double t = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
    if (!std::isfinite(t)) return 0.5 * (a + b);
    return t;
}

}  // namespace detail

// L-BFGS with a strong-Wolfe line search (bracket + zoom, cubic steps).
// FG must be callable as double(std::span<const double> x, std::vector<double>& grad).
template <class FG>
RunRecord minimize_lbfgs(FG&& fg, std::vector<double> theta0, const LbfgsConfig& cfg) {
    if (!detail::all_finite(theta0)) throw std::invalid_argument("non-finite initial parameters");
    const std::size_t p = theta0.size();

    RunRecord rec;
    rec.theta0 = theta0;

    std::vector<double> x = std::move(theta0);
    std::vector<double> g(p), g_trial(p), x_trial(p), d(p);
    double f = fg(x, g);
    rec.initial_energy = f;

    auto finish = [&](Termination term, int iters) {
        rec.theta = x;
        rec.final_energy = f;
        rec.iterations = iters;
        rec.termination = term;
        return rec;
    };
    auto record_point = [&] {
        if (cfg.record_trace) rec.trace.push_back(f);
        if (cfg.record_iterates) rec.iterates.push_back(x);
    };
    record_point();

    if (!std::isfinite(f) || !detail::all_finite(g)) return finish(Termination::non_finite, 0);
    if (detail::norm2(g) <= cfg.grad_tolerance) return finish(Termination::gradient_tolerance, 0);

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        // Two-loop recursion: d = -H g.
        d.assign(g.begin(), g.end());
        std::vector<double> alpha_hist(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha_hist[i] = rho_hist[i] * detail::dot(s_hist[i], d);
            for (std::size_t j = 0; j < p; ++j) d[j] -= alpha_hist[i] * y_hist[i][j];
        }
        if (!s_hist.empty()) {
            const double gamma =
                detail::dot(s_hist.back(), y_hist.back()) / detail::dot(y_hist.back(), y_hist.back());
            for (double& v : d) v *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * detail::dot(y_hist[i], d);
            for (std::size_t j = 0; j < p; ++j) d[j] += (alpha_hist[i] - beta) * s_hist[i][j];
        }
        for (double& v : d) v = -v;

        double dg = detail::dot(d, g);
        if (!(dg < 0.0)) {
            // Not a descent direction; drop the curvature history and restart.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t j = 0; j < p; ++j) d[j] = -g[j];
            dg = -detail::dot(g, g);
            if (!(dg < 0.0)) return finish(Termination::gradient_tolerance, iter - 1);
        }

        // Strong-Wolfe line search on phi(a) = f(x + a d).
        const double f0 = f;
        const double dg0 = dg;
        auto eval = [&](double a, double& fa, double& dga) {
            for (std::size_t j = 0; j < p; ++j) x_trial[j] = x[j] + a * d[j];
            fa = fg(x_trial, g_trial);
            dga = detail::dot(g_trial, d);
        };

        double a_prev = 0.0, f_prev = f0, dg_prev = dg0;
        double a = s_hist.empty() ? std::min(1.0, 1.0 / std::max(detail::norm2(g), 1e-12)) : 1.0;
        double a_accept = -1.0;
        int evals = 0;
        double fa = 0.0, dga = 0.0;

        auto zoom = [&](double lo, double flo, double dglo, double hi, double fhi, double dghi) {
            while (evals < cfg.max_linesearch) {
                double aj = detail::cubic_min(lo, flo, dglo, hi, fhi, dghi);
                const double width = std::abs(hi - lo);
                const double safeguard = 0.1 * width;
                if (!(aj > std::min(lo, hi) + safeguard) || !(aj < std::max(lo, hi) - safeguard))
                    aj = 0.5 * (lo + hi);
                double fj, dgj;
                eval(aj, fj, dgj);
                ++evals;
                if (!std::isfinite(fj)) return;
                if (fj > f0 + cfg.c1 * aj * dg0 || fj >= flo) {
                    hi = aj;
                    fhi = fj;
                    dghi = dgj;
                } else {
                    if (std::abs(dgj) <= -cfg.c2 * dg0) {
                        a_accept = aj;
                        fa = fj;
                        dga = dgj;
                        return;
                    }
                    if (dgj * (hi - lo) >= 0.0) {
                        hi = lo;
                        fhi = flo;
                        dghi = dglo;
                    }
                    lo = aj;
                    flo = fj;
                    dglo = dgj;
                }
                if (width < 1e-14 * std::max(1.0, std::abs(lo))) return;
            }
        };

        while (evals < cfg.max_linesearch) {
            eval(a, fa, dga);
            ++evals;
            if (!std::isfinite(fa)) break;
            if (fa > f0 + cfg.c1 * a * dg0 || (evals > 1 && fa >= f_prev)) {
                zoom(a_prev, f_prev, dg_prev, a, fa, dga);
                break;
            }
            if (std::abs(dga) <= -cfg.c2 * dg0) {
                a_accept = a;
                break;
            }
            if (dga >= 0.0) {
                zoom(a, fa, dga, a_prev, f_prev, dg_prev);
                break;
            }
            a_prev = a;
            f_prev = fa;
            dg_prev = dga;
            a *= 2.0;
            if (a > 1e10) break;
        }

        if (a_accept <= 0.0) return finish(Termination::line_search_failure, iter - 1);
        if (!std::isfinite(fa) || !detail::all_finite(g_trial)) return finish(Termination::non_finite, iter);

        // Accept the step; the line search already produced f and g there.
        std::vector<double> s(p), yv(p);
        for (std::size_t j = 0; j < p; ++j) {
            const double xj = x[j] + a_accept * d[j];
            s[j] = xj - x[j];
            yv[j] = g_trial[j] - g[j];
            x[j] = xj;
        }
        f = fa;
        g.swap(g_trial);
        record_point();

        const double sy = detail::dot(s, yv);
        if (sy > 1e-10 * detail::norm2(s) * detail::norm2(yv)) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > cfg.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        if (detail::norm2(g) <= cfg.grad_tolerance) return finish(Termination::gradient_tolerance, iter);
    }
    return finish(Termination::max_iterations, cfg.max_iterations);
}

enum class GradientMethod { adjoint, parameter_shift };

// Minimize E(theta) for the given objective. The adjoint evaluator is the
// default in exact mode (it matches parameter-shift to roundoff at a small
// constant number of statevector sweeps); shot-mode objectives fall back to
// the parameter-shift estimator.
inline RunRecord minimize(const ObjectiveContext& ctx, std::vector<double> theta0, const LbfgsConfig& cfg,
                          GradientMethod method = GradientMethod::adjoint) {
    const bool use_adjoint =
        method == GradientMethod::adjoint && ctx.mode == ObjectiveContext::Mode::exact;
    auto fg = [&](std::span<const double> x, std::vector<double>& grad) -> double {
        if (use_adjoint) return energy_and_gradient_adjoint(ctx, x, grad);
        grad = gradient_parameter_shift(ctx, x);
        return energy(ctx, x);
    };
    return minimize_lbfgs(fg, std::move(theta0), cfg);
}

// N_optim independent restarts; run r draws theta0 ~ U(0, 2pi)^P from seed
// base_seed + r. Runs are independent and execute in parallel; the returned
// order is by run index, so results are reproducible from the base seed alone.
inline std::vector<RunRecord> restart_sweep(const ObjectiveContext& ctx, int n_restarts,
                                            std::uint64_t base_seed, const LbfgsConfig& cfg,
                                            int n_threads = 1,
                                            GradientMethod method = GradientMethod::adjoint) {
    if (n_restarts < 1) throw std::invalid_argument("n_restarts must be >= 1");
    std::vector<RunRecord> records(n_restarts);
    parallel_for(n_restarts, n_threads, [&](std::uint64_t r) {
        const std::uint64_t seed = base_seed + r;
        RunRecord rec = minimize(ctx, random_theta(ctx.circuit, seed), cfg, method);
        rec.seed = seed;
        records[r] = std::move(rec);
    });
    return records;
}

// Fraction of restarts whose final energy lies within eps of the brute-force
// optimum c_star.
inline double success_probability(std::span<const RunRecord> records, double c_star, double eps) {
    if (records.empty()) throw std::invalid_argument("empty record list");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    std::size_t hits = 0;
    for (const RunRecord& r : records)
        if (r.final_energy - c_star < eps) ++hits;
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

}  // namespace qhn
