#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/optimizer.hpp"
#include "heliid/search_space.hpp"

namespace heliid {

struct NelderMeadConfig {
    std::size_t max_evaluations = 20000;
    /// Fresh simplexes built around the incumbent after the first run converges.
    int restarts = 1;
    /// Initial simplex edge as a fraction of each dimension's range.
    double initial_step = 0.1;
    /// Converged when the simplex cost spread is within ftol and every vertex
    /// lies within xtol x range of the best one.
    double ftol = 1e-12;
    double xtol = 1e-9;
    std::uint64_t rng_seed = 0;  // echoed only; the method is deterministic
};

/// Bounded Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). Trial points are clamped into the space and frozen
/// dimensions are left out of the simplex.
inline OptimizerResult run_nelder_mead(const CostFunction& cost, const SearchSpace& space, std::vector<double> start,
                                       const NelderMeadConfig& cfg)
{
    if (start.size() != space.dims()) throw InputError("start point has wrong dimension");
    if (cfg.restarts < 0) throw InputError("restarts must be non-negative");
    space.clamp(start);

    const auto free = space.free_dims();
    const std::size_t n = free.size();
    OptimizerResult result;
    result.rng_seed = cfg.rng_seed;

    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        return sanitize_cost(cost(x));
    };

    result.best = start;
    result.best_cost = eval(start);
    result.cost_trace.push_back(result.best_cost);
    if (n == 0) return result;

    auto combine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
        // a + t (b - a), clamped
        std::vector<double> x = a;
        for (std::size_t d : free) x[d] = a[d] + t * (b[d] - a[d]);
        space.clamp(x);
        return x;
    };

    for (int run = 0; run <= cfg.restarts && result.evaluations < cfg.max_evaluations; ++run) {
        std::vector<std::vector<double>> simplex{result.best};
        std::vector<double> f{result.best_cost};
        for (std::size_t i = 0; i < n && result.evaluations < cfg.max_evaluations; ++i) {
            const std::size_t d = free[i];
            std::vector<double> x = result.best;
            const double step = cfg.initial_step * space.range(d);
            x[d] = x[d] + step <= space.upper(d) ? x[d] + step : x[d] - step;
            space.clamp(x);
            f.push_back(eval(x));
            simplex.push_back(std::move(x));
        }
        if (simplex.size() < n + 1) break;

        std::vector<std::size_t> order(n + 1);
        while (result.evaluations < cfg.max_evaluations) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
            {
                std::vector<std::vector<double>> s2;
                std::vector<double> f2;
                for (auto i : order) {
                    s2.push_back(std::move(simplex[i]));
                    f2.push_back(f[i]);
                }
                simplex = std::move(s2);
                f = std::move(f2);
            }
            if (f[0] < result.best_cost) {
                result.best = simplex[0];
                result.best_cost = f[0];
            }
            result.cost_trace.push_back(result.best_cost);

            bool small = true;
            for (std::size_t i = 1; i <= n && small; ++i) {
                for (std::size_t d : free) {
                    if (std::abs(simplex[i][d] - simplex[0][d]) > cfg.xtol * space.range(d)) {
                        small = false;
                        break;
                    }
                }
            }
            const double spread = f[n] - f[0];
            if (small && spread <= cfg.ftol * (std::abs(f[0]) + std::abs(f[n])) + 1e-300) break;

            std::vector<double> centroid(space.dims(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t d : free) centroid[d] += simplex[i][d];
            }
            for (std::size_t d : free) centroid[d] /= static_cast<double>(n);

            const auto xr = combine(centroid, simplex[n], -1.0);
            const double fr = eval(xr);
            if (fr < f[0]) {
                const auto xe = combine(centroid, simplex[n], -2.0);
                const double fe = eval(xe);
                if (fe < fr) {
                    simplex[n] = xe;
                    f[n] = fe;
                } else {
                    simplex[n] = xr;
                    f[n] = fr;
                }
                continue;
            }
            if (fr < f[n - 1]) {
                simplex[n] = xr;
                f[n] = fr;
                continue;
            }
            if (fr < f[n]) {
                const auto xc = combine(centroid, xr, 0.5);
                const double fc = eval(xc);
                if (fc <= fr) {
                    simplex[n] = xc;
                    f[n] = fc;
                    continue;
                }
            } else {
                const auto xcc = combine(centroid, simplex[n], 0.5);
                const double fcc = eval(xcc);
                if (fcc < f[n]) {
                    simplex[n] = xcc;
                    f[n] = fcc;
                    continue;
                }
            }
            for (std::size_t i = 1; i <= n && result.evaluations < cfg.max_evaluations; ++i) {
                simplex[i] = combine(simplex[0], simplex[i], 0.5);
                f[i] = eval(simplex[i]);
            }
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i] < result.best_cost) {
                result.best = simplex[i];
                result.best_cost = f[i];
            }
        }
        if (result.cost_trace.back() != result.best_cost) result.cost_trace.push_back(result.best_cost);
    }
    return result;
}

}  // namespace heliid
