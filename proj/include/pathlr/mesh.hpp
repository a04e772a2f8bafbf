#ifndef PATHLR_MESH_HPP
#define PATHLR_MESH_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathlr/errors.hpp"

namespace pathlr {

enum class QuadratureRule {
    Rectangle,  // w_0..w_{n-1} = 1, w_n = 0 (left rule)
    Trapezoid,  // w_0 = w_n = 1/2, interior 1
};

inline QuadratureRule parse_rule(const std::string& s) {
    if (s == "rectangle") return QuadratureRule::Rectangle;
    if (s == "trapezoid") return QuadratureRule::Trapezoid;
    throw std::invalid_argument("unknown quadrature rule: " + s);
}

/// Uniform time grid tau_k = k*dt on [0, T] with quadrature weights.
struct TimeGrid {
    double T = 0.0;
    Index n = 0;
    double dt = 0.0;
    std::vector<double> w;  // n+1 weights

    double tau(Index k) const { return static_cast<double>(k) * dt; }
};

inline TimeGrid build_time_grid(double T, Index n, QuadratureRule rule) {
    if (!(T > 0.0)) throw std::invalid_argument("time horizon must be positive");
    if (n < 1) throw std::invalid_argument("need at least one time step");
    TimeGrid tg;
    tg.T = T;
    tg.n = n;
    tg.dt = T / static_cast<double>(n);
    tg.w.assign(static_cast<size_t>(n) + 1, 1.0);
    switch (rule) {
        case QuadratureRule::Trapezoid:
            tg.w.front() = 0.5;
            tg.w.back() = 0.5;
            break;
        case QuadratureRule::Rectangle:
            tg.w.back() = 0.0;
            break;
    }
    return tg;
}

/// Family of nested uniform meshes, one level per remaining time step.
/// Level k covers [-k*a_x, k*a_x) with k*M points of spacing h_x; levels
/// are index formulas, never materialized.  The nesting identity
/// x^{(k+1)}_{i+j} = x^{(k)}_i + xi_j holds in index arithmetic.
struct GridStack {
    double a_x = 0.0;   // half-width of the base window
    Index N_x = 0;      // half mesh count
    double h_x = 0.0;   // spacing a_x / N_x
    Index M = 0;        // base point count 2*N_x
    Index levels = 0;   // number of levels (time steps n)

    /// i-th point of the level-k mesh, 0 <= i < k*M.
    double point(Index level, Index i) const {
        return -static_cast<double>(level) * a_x + static_cast<double>(i) * h_x;
    }

    /// Integration abscissa xi_j = -a_x + j*h_x, 0 <= j < M.
    double xi(Index j) const { return -a_x + static_cast<double>(j) * h_x; }

    Index level_size(Index level) const { return level * M; }
};

inline GridStack build_grid_stack(double a_x, Index N_x, Index n) {
    if (!(a_x > 0.0)) throw std::invalid_argument("window half-width must be positive");
    if (N_x < 1) throw std::invalid_argument("half mesh count must be at least 1");
    if (n < 1) throw std::invalid_argument("need at least one level");
    GridStack g;
    g.a_x = a_x;
    g.N_x = N_x;
    g.h_x = a_x / static_cast<double>(N_x);
    g.M = 2 * N_x;
    g.levels = n;
    Index top = 0;
    if (__builtin_mul_overflow(n + 1, g.M, &top) || top > (Index{1} << 46))
        throw capacity_error("mesh of " + std::to_string(n) + " levels with M = " +
                             std::to_string(g.M) + " points exceeds addressable size");
    return g;
}

/// Quadrature-weighted Gaussian kernel samples p_j = mu_j * p(lambda, xi_j)
/// with p(lambda, xi) = sqrt(lambda/pi) * exp(-lambda xi^2) and their
/// reversal.
struct ConvolutionKernel {
    double lambda = 0.0;
    std::vector<double> p;
    std::vector<double> p_rev;
    std::vector<double> mu;
};

inline ConvolutionKernel build_kernel(double sigma, double dt, const GridStack& grid,
                                      QuadratureRule spatial_rule = QuadratureRule::Rectangle) {
    if (!(sigma > 0.0)) throw std::invalid_argument("diffusivity must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    ConvolutionKernel k;
    k.lambda = 1.0 / (4.0 * sigma * dt);
    const Index M = grid.M;
    k.mu.assign(static_cast<size_t>(M), grid.h_x);
    if (spatial_rule == QuadratureRule::Trapezoid && M >= 2) {
        // trapezoid over the closed hull [-a_x, a_x - h_x]
        k.mu.front() *= 0.5;
        k.mu.back() *= 0.5;
    }
    const double amp = std::sqrt(k.lambda / M_PI);
    k.p.resize(static_cast<size_t>(M));
    for (Index j = 0; j < M; ++j) {
        const double xi = grid.xi(j);
        k.p[static_cast<size_t>(j)] =
            k.mu[static_cast<size_t>(j)] * amp * std::exp(-k.lambda * xi * xi);
    }
    k.p_rev.assign(k.p.rbegin(), k.p.rend());
    return k;
}

}  // namespace pathlr

#endif  // PATHLR_MESH_HPP
