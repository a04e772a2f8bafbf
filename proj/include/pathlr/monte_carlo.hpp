#ifndef PATHLR_MONTE_CARLO_HPP
#define PATHLR_MONTE_CARLO_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "pathlr/mesh.hpp"
#include "pathlr/problems.hpp"

namespace pathlr {

struct McConfig {
    Index K = 1;              // number of trials
    std::uint64_t seed = 0;
    double x0 = 0.0;          // evaluation point
    bool antithetic = false;  // mirrored-increment pairs per trial
};

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
};

namespace detail {

// compensated accumulator; keeps shard merges order-independent
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

/// Single-point estimator of the discretized path integral: averages
/// f(end point) * exp(-sum_i w_i V(path_i, tau_{n-i}) dt) over K Brownian
/// paths started at x0 with increments N(0, 2 sigma dt).  Returns the
/// sample mean and its standard error.
inline McResult mc_estimate(const ProblemSpec& prob, const TimeGrid& tg,
                            const McConfig& cfg) {
    if (cfg.K < 1) throw std::invalid_argument("mc_estimate: need at least one trial");
    const Index n = tg.n;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> step(0.0, std::sqrt(2.0 * prob.sigma * tg.dt));

    std::vector<double> increments(static_cast<size_t>(n));
    auto path_weight = [&](double sign) {
        double pos = cfg.x0;
        double lam = tg.w[0] * prob.V(pos, tg.tau(n));
        for (Index i = 1; i <= n; ++i) {
            pos += sign * increments[static_cast<size_t>(i - 1)];
            lam += tg.w[static_cast<size_t>(i)] * prob.V(pos, tg.tau(n - i));
        }
        return prob.f(pos) * std::exp(-lam * tg.dt);
    };

    detail::KahanSum sum, sumsq;
    for (Index k = 0; k < cfg.K; ++k) {
        for (Index i = 0; i < n; ++i) increments[static_cast<size_t>(i)] = step(rng);
        double sample = path_weight(1.0);
        if (cfg.antithetic) sample = 0.5 * (sample + path_weight(-1.0));
        sum.add(sample);
        sumsq.add(sample * sample);
    }

    McResult out;
    const double kd = static_cast<double>(cfg.K);
    out.estimate = sum.sum / kd;
    if (cfg.K > 1) {
        const double var = std::max(0.0, (sumsq.sum - kd * out.estimate * out.estimate) /
                                             (kd - 1.0));
        out.std_error = std::sqrt(var / kd);
    }
    return out;
}

}  // namespace pathlr

#endif  // PATHLR_MONTE_CARLO_HPP
