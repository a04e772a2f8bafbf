#ifndef PATHLR_ANALYSIS_HPP
#define PATHLR_ANALYSIS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "pathlr/errors.hpp"

namespace pathlr {

/// ||u_approx - u_ref||_2 / ||u_ref||_2.
inline double relative_error(const Eigen::VectorXd& u_approx, const Eigen::VectorXd& u_ref) {
    if (u_approx.size() != u_ref.size())
        throw std::invalid_argument("relative_error: length mismatch");
    const double denom = u_ref.norm();
    if (denom == 0.0) throw std::invalid_argument("relative_error: zero reference norm");
    return (u_approx - u_ref).norm() / denom;
}

/// Max-norm counterpart, reported alongside the 2-norm for transparency.
inline double relative_error_max(const Eigen::VectorXd& u_approx,
                                 const Eigen::VectorXd& u_ref) {
    if (u_approx.size() != u_ref.size())
        throw std::invalid_argument("relative_error_max: length mismatch");
    const double denom = u_ref.cwiseAbs().maxCoeff();
    if (denom == 0.0) throw std::invalid_argument("relative_error_max: zero reference norm");
    return (u_approx - u_ref).cwiseAbs().maxCoeff() / denom;
}

/// Empirical convergence order from three solutions on the same mesh at
/// n, n/2 and n/4 steps: p = log2(||u_{n/2} - u_{n/4}|| / ||u_n - u_{n/2}||).
inline double runge_order(const Eigen::VectorXd& u_n, const Eigen::VectorXd& u_n2,
                          const Eigen::VectorXd& u_n4) {
    if (u_n.size() != u_n2.size() || u_n.size() != u_n4.size())
        throw std::invalid_argument("runge_order: length mismatch");
    const double fine = (u_n - u_n2).norm();
    const double coarse = (u_n2 - u_n4).norm();
    if (fine == 0.0) throw std::domain_error("runge_order: undefined (zero denominator)");
    return std::log2(coarse / fine);
}

/// Eliminates the leading n^{-order} error term of a pair of solutions:
/// (2^order u_n - u_{n/2}) / (2^order - 1).
inline Eigen::VectorXd richardson(const Eigen::VectorXd& u_n, const Eigen::VectorXd& u_n2,
                                  int order) {
    if (order < 1) throw std::invalid_argument("richardson: order must be >= 1");
    if (u_n.size() != u_n2.size())
        throw std::invalid_argument("richardson: length mismatch");
    const double f = std::pow(2.0, order);
    return (f * u_n - u_n2) / (f - 1.0);
}

/// Convergence-study results, one row per n in the sweep.  Missing values
/// (orders and error estimates that need earlier sweep entries) are NaN.
struct ConvergenceRow {
    Index n = 0;
    double dt = 0.0;
    double p2 = std::numeric_limits<double>::quiet_NaN();
    double eps2 = std::numeric_limits<double>::quiet_NaN();
    double p4 = std::numeric_limits<double>::quiet_NaN();
    double eps4 = std::numeric_limits<double>::quiet_NaN();
    double eps2_max = std::numeric_limits<double>::quiet_NaN();  // max-norm variant
    Index rank = 0;
    double wall_seconds = 0.0;
};

struct ConvergenceTable {
    double T = 0.0;
    std::vector<ConvergenceRow> rows;
};

/// Normalized Hermite functions phi_0..phi_lmax at x through the stable
/// three-term recurrence; underflows cleanly to zero for large |x|.
inline void hermite_values(double x, Index l_max, std::vector<double>& out) {
    out.assign(static_cast<size_t>(l_max) + 1, 0.0);
    const double phi0 = std::exp(-0.5 * x * x) / std::pow(M_PI, 0.25);
    out[0] = phi0;
    if (l_max == 0) return;
    out[1] = std::sqrt(2.0) * x * phi0;
    for (Index l = 1; l < l_max; ++l) {
        const double ld = static_cast<double>(l);
        out[static_cast<size_t>(l + 1)] =
            x * std::sqrt(2.0 / (ld + 1.0)) * out[static_cast<size_t>(l)] -
            std::sqrt(ld / (ld + 1.0)) * out[static_cast<size_t>(l - 1)];
    }
}

/// Number of singular values above eps relative to the largest.
inline Index eps_rank(const Eigen::VectorXd& sv, double eps) {
    if (sv.size() == 0 || sv[0] <= 0.0) return 0;
    Index r = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > eps * sv[0]) ++r;
    return r;
}

/// Leading singular values of a tall matrix through a randomized range
/// finder with two power iterations; reliable relative to sigma_1 down to
/// machine level for rapidly decaying spectra.  Deterministic (fixed
/// internal seed).
inline Eigen::VectorXd leading_singular_values(const Eigen::MatrixXd& A, Index count) {
    const Index sketch = std::min<Index>(A.cols(), std::max<Index>(count + 16, 24));
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd omega(A.cols(), sketch);
    for (Index j = 0; j < sketch; ++j)
        for (Index i = 0; i < A.cols(); ++i) omega(i, j) = gauss(rng);

    auto ortho = [](const Eigen::MatrixXd& Y) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
        return Eigen::MatrixXd(qr.householderQ() *
                               Eigen::MatrixXd::Identity(Y.rows(), Y.cols()));
    };
    Eigen::MatrixXd Q = ortho(A * omega);
    for (int it = 0; it < 2; ++it) {
        Q = ortho(A.transpose() * Q);
        Q = ortho(A * Q);
    }
    Eigen::MatrixXd small = Q.transpose() * A;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(small);
    const Index keep = std::min(count, svd.singularValues().size());
    return svd.singularValues().head(keep);
}

struct HermiteRankRow {
    Index l = 0;
    Eigen::VectorXd sv;   // leading singular values
    Index rank = 0;       // eps-rank
};

/// Singular-value study of the matrices (Phi_l)_{ij} = phi_l(x_{i + j*M})
/// obtained by reshaping a Hermite basis vector sampled on the extended
/// mesh of `ncols` windows of half-width a_x with M = nrows points each.
inline std::vector<HermiteRankRow> hermite_rank_study(Index l_max, Index nrows, Index ncols,
                                                      double eps, double a_x = 2.0,
                                                      Index sv_count = 9) {
    if (l_max < 0 || l_max > 200)
        throw std::invalid_argument("hermite_rank_study: l_max outside the stable range");
    if (nrows < 2 || ncols < 2) throw std::invalid_argument("hermite_rank_study: degenerate shape");
    const double h = 2.0 * a_x / static_cast<double>(nrows);
    const double x0 = -static_cast<double>(ncols) * a_x;

    std::vector<HermiteRankRow> table;
    table.reserve(static_cast<size_t>(l_max) + 1);
    Eigen::MatrixXd A(nrows, ncols);
    std::vector<double> phis;
    for (Index l = 0; l <= l_max; ++l) {
        for (Index j = 0; j < ncols; ++j)
            for (Index i = 0; i < nrows; ++i) {
                const double x = x0 + static_cast<double>(i + j * nrows) * h;
                hermite_values(x, l, phis);
                A(i, j) = phis[static_cast<size_t>(l)];
            }
        HermiteRankRow row;
        row.l = l;
        row.sv = leading_singular_values(A, sv_count);
        row.rank = eps_rank(row.sv, eps);
        table.push_back(std::move(row));
    }
    return table;
}

struct HermiteCoefficients {
    Eigen::VectorXd c;          // c_0..c_lmax
    std::optional<Index> l0;    // smallest l' with tail energy < eps1 * chi(0)
};

/// Expansion coefficients c_l = integral t(x) phi_l(x) dx by fine
/// trapezoid quadrature, plus the decay cutoff l0 for the given eps1
/// (l0 empty when the tail does not decay below the threshold within
/// l_max).
inline HermiteCoefficients hermite_coefficients(const std::function<double(double)>& t,
                                                Index l_max, double eps1 = 1e-6) {
    const double L = std::max(12.0, std::sqrt(2.0 * static_cast<double>(l_max) + 1.0) + 8.0);
    const Index N = 40000;
    const double h = 2.0 * L / static_cast<double>(N);
    HermiteCoefficients out;
    out.c = Eigen::VectorXd::Zero(l_max + 1);
    std::vector<double> phis;
    for (Index i = 0; i <= N; ++i) {
        const double x = -L + static_cast<double>(i) * h;
        const double w = (i == 0 || i == N) ? 0.5 : 1.0;
        const double tv = t(x);
        if (tv == 0.0) continue;
        hermite_values(x, l_max, phis);
        for (Index l = 0; l <= l_max; ++l) out.c[l] += w * h * tv * phis[static_cast<size_t>(l)];
    }

    // chi(l') = sum_{l > l'} c_l^2, computed from the truncated series.
    // Near l_max the truncated tail is an artifact, so a cutoff is only
    // reported when it falls a guard band before the end of the range;
    // otherwise the tail has not provably decayed and l0 stays empty.
    const double chi0 = out.c.tail(l_max).squaredNorm();
    if (chi0 <= 1e-24 * out.c.squaredNorm()) {
        out.l0 = 0;
        return out;
    }
    constexpr Index kGuard = 5;
    double tail = chi0;
    for (Index lp = 0; lp <= l_max - kGuard; ++lp) {
        if (lp > 0) tail -= out.c[lp] * out.c[lp];
        if (tail < eps1 * chi0) {
            out.l0 = lp;
            return out;
        }
    }
    return out;
}

}  // namespace pathlr

#endif  // PATHLR_ANALYSIS_HPP
