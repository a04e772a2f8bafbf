#ifndef PATHLR_CROSS_HPP
#define PATHLR_CROSS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "pathlr/errors.hpp"

namespace pathlr {

/// Matrix known only through an entry oracle.  eval must be deterministic
/// for fixed (i, j) within one factorization call.
struct LazyMatrix {
    Index nrows = 0;
    Index ncols = 0;
    std::function<double(Index, Index)> eval;
};

/// Dyadic factors A ~= B V^T.  Columns of B are orthogonal up to the
/// sqrt-of-singular-value scaling of the recompressed core.
struct LowRankFactors {
    Eigen::MatrixXd B;   // nrows x r
    Eigen::MatrixXd V;   // ncols x r
    Index r = 0;
    double eps_c = 0.0;
    Eigen::VectorXd sv;  // retained singular values of the recompressed core
    bool converged = true;
    bool pinv_truncated = false;  // pivot block needed a regularized inverse
    double residual_zeta = 0.0;   // tail energy left beyond the retained rank
};

/// Relative tail energy zeta(s) = sqrt(sum_{i>s} sv_i^2 / sum_i sv_i^2);
/// zeta(len) == 0 by definition.
inline double zeta(const Eigen::VectorXd& sv, Index s) {
    const Index q = sv.size();
    double tail = 0.0, total = 0.0;
    for (Index i = q - 1; i >= 0; --i) {
        const double e = sv[i] * sv[i];
        total += e;
        if (i >= s) tail += e;
    }
    if (total == 0.0) return 0.0;
    return std::sqrt(tail / total);
}

/// Smallest s in [1, len] with zeta(s) < eps (always exists).
inline Index rank_by_zeta(const Eigen::VectorXd& sv, double eps) {
    const Index q = sv.size();
    double total = 0.0;
    for (Index i = 0; i < q; ++i) total += sv[i] * sv[i];
    if (total == 0.0) return 1;
    double tail = 0.0;
    for (Index s = q; s >= 1; --s) {
        // tail for zeta(s) excludes sv[s-1]
        if (std::sqrt(tail / total) >= eps) return std::min(s + 1, q);
        tail += sv[s - 1] * sv[s - 1];
    }
    return 1;
}

/// Row indices (sorted) of a locally volume-maximal q x q submatrix of a
/// tall p x q matrix: greedy pivoted-elimination start, then swap sweeps
/// until no entry of tall * (submatrix)^-1 exceeds 1 + delta in modulus.
/// Ties are broken toward the lowest index.  Throws degeneracy_error on
/// (numerical) rank deficiency.
inline std::vector<Index> maxvol_indices(const Eigen::MatrixXd& tall,
                                         double delta = 1e-2,
                                         int max_sweeps = 100) {
    const Index p = tall.rows();
    const Index q = tall.cols();
    if (q > p) throw std::invalid_argument("maxvol_indices: matrix must be tall (p >= q)");

    std::vector<Index> rows(static_cast<size_t>(q));
    if (p == q) {
        std::iota(rows.begin(), rows.end(), Index{0});
        return rows;
    }

    // greedy row selection by Gaussian elimination with row pivoting
    Eigen::MatrixXd work = tall;
    const double scale = tall.cwiseAbs().maxCoeff();
    std::vector<char> used(static_cast<size_t>(p), 0);
    for (Index j = 0; j < q; ++j) {
        Index piv = -1;
        double best = -1.0;
        for (Index i = 0; i < p; ++i) {
            if (used[static_cast<size_t>(i)]) continue;
            const double v = std::abs(work(i, j));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (piv < 0 || best <= 1e-12 * std::max(scale, 1e-300)) {
            std::vector<Index> chosen(rows.begin(), rows.begin() + j);
            throw degeneracy_error("maxvol_indices: rank-deficient input", chosen);
        }
        rows[static_cast<size_t>(j)] = piv;
        used[static_cast<size_t>(piv)] = 1;
        const double inv = 1.0 / work(piv, j);
        for (Index i = 0; i < p; ++i) {
            if (i == piv) continue;
            const double f = work(i, j) * inv;
            if (f != 0.0) work.row(i).tail(q - j) -= f * work.row(piv).tail(q - j);
        }
    }

    // Z = tall * Asub^{-1}; rows of Z at the selected set form the identity
    Eigen::MatrixXd sub(q, q);
    for (Index j = 0; j < q; ++j) sub.row(j) = tall.row(rows[static_cast<size_t>(j)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sub.transpose());
    Eigen::MatrixXd Z = lu.solve(tall.transpose()).transpose();

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Index bi = 0, bj = 0;
        double best = 0.0;
        for (Index j = 0; j < q; ++j)
            for (Index i = 0; i < p; ++i) {
                const double v = std::abs(Z(i, j));
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (best <= 1.0 + delta) break;
        Eigen::VectorXd colj = Z.col(bj);
        Eigen::RowVectorXd rowi = Z.row(bi);
        rowi(bj) -= 1.0;
        Z.noalias() -= colj * (rowi / Z(bi, bj));
        rows[static_cast<size_t>(bj)] = bi;
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

/// Orthogonalized dyadic form of the skeleton B_raw * core^-1 * C_raw:
/// QR-factor both sides, SVD the small middle matrix, split the singular
/// values symmetrically.  The pivot block may be rectangular (rows of
/// B_raw at the row-pivot set).  A near-singular block is inverted through
/// a truncated pseudo-inverse (flagged on the result).  Block directions
/// below pinv_cutoff_rel * sigma_max carry no usable information and are
/// dropped; inverting them amplifies entry-level noise into O(1) skeleton
/// errors once the working window exceeds the effective rank.
inline LowRankFactors recompress(const Eigen::MatrixXd& B_raw,
                                 const Eigen::MatrixXd& C_raw,
                                 const Eigen::MatrixXd& core,
                                 double pinv_cutoff_rel = 1e-14) {
    const Index n = B_raw.rows();
    const Index m = C_raw.cols();
    const Index qb = B_raw.cols();
    const Index qc = C_raw.rows();
    if (core.rows() != qc || core.cols() != qb)
        throw std::invalid_argument("recompress: nonconforming shapes");

    Eigen::HouseholderQR<Eigen::MatrixXd> qr_b(B_raw);
    Eigen::MatrixXd Qb = qr_b.householderQ() * Eigen::MatrixXd::Identity(n, qb);
    Eigen::MatrixXd Rb = qr_b.matrixQR().topRows(qb).triangularView<Eigen::Upper>();

    Eigen::HouseholderQR<Eigen::MatrixXd> qr_c(C_raw.transpose());
    Eigen::MatrixXd Qc = qr_c.householderQ() * Eigen::MatrixXd::Identity(m, qc);
    Eigen::MatrixXd Rc = qr_c.matrixQR().topRows(qc).triangularView<Eigen::Upper>();

    LowRankFactors out;

    Eigen::JacobiSVD<Eigen::MatrixXd> core_svd(core,
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& cs = core_svd.singularValues();
    Eigen::VectorXd cs_inv = Eigen::VectorXd::Zero(cs.size());
    const double cutoff = pinv_cutoff_rel * (cs.size() > 0 ? cs[0] : 0.0);
    for (Index i = 0; i < cs.size(); ++i) {
        if (cs[i] > cutoff && cs[i] > 0.0)
            cs_inv[i] = 1.0 / cs[i];
        else
            out.pinv_truncated = true;
    }
    // core^+ maps row space back to column space: qb x qc
    Eigen::MatrixXd core_pinv =
        core_svd.matrixV() * cs_inv.asDiagonal() * core_svd.matrixU().transpose();

    Eigen::MatrixXd mid = Rb * core_pinv * Rc.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> mid_svd(mid,
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = mid_svd.singularValues();
    Eigen::VectorXd root = sv.array().sqrt();

    out.B = Qb * mid_svd.matrixU() * root.asDiagonal();
    out.V = Qc * mid_svd.matrixV() * root.asDiagonal();
    out.r = sv.size();
    out.sv = sv;
    return out;
}

/// Orthonormal basis of the numerically significant column space: column-
/// pivoted QR truncated where the R diagonal falls below rel_tol relative
/// to its leading entry.  Plain QR of a rank-deficient sample would pad Q
/// with arbitrary directions, which derails maxvol pivoting.
inline Eigen::MatrixXd significant_column_basis(const Eigen::MatrixXd& A,
                                                double rel_tol = 1e-14) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::MatrixXd& R = qr.matrixQR();
    const Index kmax = std::min(A.rows(), A.cols());
    const double lead = std::abs(R(0, 0));
    Index rank = 0;
    for (Index i = 0; i < kmax; ++i) {
        if (std::abs(R(i, i)) > rel_tol * lead)
            ++rank;
        else
            break;
    }
    rank = std::max<Index>(rank, 1);
    return qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), rank);
}

namespace detail {

inline void truncate_factors(LowRankFactors& f, Index r) {
    r = std::max<Index>(r, 1);
    if (r >= f.r) return;
    f.B = f.B.leftCols(r).eval();
    f.V = f.V.leftCols(r).eval();
    f.sv = f.sv.head(r).eval();
    f.r = r;
}

inline std::vector<Index> spread_indices(Index count, Index total) {
    std::vector<Index> out(static_cast<size_t>(count));
    for (Index i = 0; i < count; ++i) out[static_cast<size_t>(i)] = (i * total) / count;
    return out;
}

inline double spectra_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Index len = std::max(a.size(), b.size());
    double diff2 = 0.0;
    for (Index i = 0; i < len; ++i) {
        const double av = i < a.size() ? a[i] : 0.0;
        const double bv = i < b.size() ? b[i] : 0.0;
        diff2 += (av - bv) * (av - bv);
    }
    return std::sqrt(diff2);
}

}  // namespace detail

/// Adaptive cross approximation of a lazily evaluated matrix.
///
/// Starting from a working window of 2*r0 columns, each round alternates
/// maxvol row/column selection until the pivot sets settle, recompresses
/// the skeleton, and reads the next rank off the core spectrum through the
/// zeta criterion.  The window doubles while no interior truncation point
/// exists; the algorithm accepts once the truncation point lies strictly
/// inside the window and consecutive core spectra agree (compared as
/// vectors, 2-norm, relative to the norm of the newer spectrum; shorter
/// spectra are zero-padded).  Entry evaluations stay O((nrows+ncols) * r)
/// per round.
///
/// On an exhausted rank cap the best factors are returned with
/// converged == false.
inline LowRankFactors cross_approximate(const LazyMatrix& m, double eps_c, Index r0,
                                        Index r_max) {
    const Index n = m.nrows;
    const Index cols = m.ncols;
    if (n < 1 || cols < 1) throw std::invalid_argument("cross_approximate: empty matrix");
    if (!(eps_c > 0.0 && eps_c < 1.0))
        throw std::invalid_argument("cross_approximate: eps_c must lie in (0, 1)");
    const Index dim_cap = std::min(n, cols);
    if (r0 < 1 || r0 > r_max || r_max > dim_cap)
        throw std::invalid_argument("cross_approximate: need 1 <= r0 <= r_max <= min(n, m)");

    const Index q_cap = std::min(dim_cap, 2 * r_max);
    Index q = std::min(2 * r0, q_cap);
    std::vector<Index> J = detail::spread_indices(q, cols);

    // grow or shrink J to size q, keeping already-learned pivot columns
    auto resize_window = [&](std::vector<Index>& js) {
        if (static_cast<Index>(js.size()) > q) {
            js.resize(static_cast<size_t>(q));
            return;
        }
        for (Index cand : detail::spread_indices(q, cols)) {
            if (static_cast<Index>(js.size()) == q) break;
            if (std::find(js.begin(), js.end(), cand) == js.end()) js.push_back(cand);
        }
        for (Index cand = 0; static_cast<Index>(js.size()) < q && cand < cols; ++cand)
            if (std::find(js.begin(), js.end(), cand) == js.end()) js.push_back(cand);
        std::sort(js.begin(), js.end());
    };

    auto eval_cols = [&](const std::vector<Index>& js) {
        Eigen::MatrixXd C(n, static_cast<Index>(js.size()));
        for (Index c = 0; c < C.cols(); ++c)
            for (Index i = 0; i < n; ++i) C(i, c) = m.eval(i, js[static_cast<size_t>(c)]);
        return C;
    };
    auto eval_rows = [&](const std::vector<Index>& is) {
        Eigen::MatrixXd R(static_cast<Index>(is.size()), cols);
        for (Index r = 0; r < R.rows(); ++r)
            for (Index j = 0; j < cols; ++j) R(r, j) = m.eval(is[static_cast<size_t>(r)], j);
        return R;
    };

    Eigen::VectorXd prev_sv;
    Index prev_rank = -1;
    LowRankFactors best;
    best.eps_c = eps_c;
    best.converged = false;

    constexpr int kMaxRounds = 60;
    for (int round = 0; round < kMaxRounds; ++round) {
        if (static_cast<Index>(J.size()) != q) resize_window(J);

        // alternate row/column maxvol until the pivot sets settle; the
        // revealed rank of the samples may shrink below the window size.
        // The column-selection step samples extra spread rows: pivot rows
        // alone can be blind to columns whose support they miss entirely
        // (localized data), which would freeze the iteration at a wrong
        // rank.
        std::vector<Index> I;
        Eigen::MatrixXd Qc, R;
        for (int pass = 0; pass < 4; ++pass) {
            Qc = significant_column_basis(eval_cols(J));
            I = maxvol_indices(Qc);
            std::vector<Index> sample_rows = I;
            for (Index extra : detail::spread_indices(std::min(n, q + 8), n))
                if (std::find(sample_rows.begin(), sample_rows.end(), extra) ==
                    sample_rows.end())
                    sample_rows.push_back(extra);
            std::sort(sample_rows.begin(), sample_rows.end());
            Eigen::MatrixXd R_s = eval_rows(sample_rows);
            R.resize(static_cast<Index>(I.size()), cols);
            for (size_t i = 0; i < I.size(); ++i) {
                const auto pos = std::lower_bound(sample_rows.begin(), sample_rows.end(),
                                                  I[i]) -
                                 sample_rows.begin();
                R.row(static_cast<Index>(i)) = R_s.row(static_cast<Index>(pos));
            }
            if (q == cols) break;
            Eigen::MatrixXd col_basis = significant_column_basis(R_s.transpose());
            if (col_basis.cols() > q) col_basis = col_basis.leftCols(q).eval();
            std::vector<Index> J_next = maxvol_indices(col_basis);
            if (J_next == J) break;
            J = std::move(J_next);
        }

        // row-interpolation form A ~= Qc * Qc(I,:)^-1 * A(I,:); the maxvol
        // property bounds the interpolation operator, so no ill-conditioned
        // pivot block is ever inverted
        const Index rho = Qc.cols();
        Eigen::MatrixXd P(rho, rho);
        for (Index i = 0; i < rho; ++i) P.row(i) = Qc.row(I[static_cast<size_t>(i)]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(P.transpose());
        Eigen::MatrixXd B_interp = lu.solve(Qc.transpose()).transpose();

        LowRankFactors fac =
            recompress(B_interp, R, Eigen::MatrixXd::Identity(rho, rho));
        fac.eps_c = eps_c;
        const Index r_next = rank_by_zeta(fac.sv, eps_c);

        const bool window_exhausted = (q == dim_cap);
        const bool interior_cut = r_next < q;
        const bool spectra_ok =
            prev_sv.size() > 0 &&
            detail::spectra_distance(prev_sv, fac.sv) < eps_c * fac.sv.norm();
        // fallback for spectra that dither below truncation level while the
        // selected rank is already stable
        const bool rank_stable = (r_next == prev_rank) && round >= 2;

        if (r_next > r_max) {
            fac.residual_zeta = zeta(fac.sv, r_max);
            detail::truncate_factors(fac, r_max);
            fac.converged = false;
            return fac;
        }
        if ((interior_cut && (spectra_ok || rank_stable)) || window_exhausted) {
            fac.residual_zeta = zeta(fac.sv, r_next);
            detail::truncate_factors(fac, r_next);
            fac.converged = true;
            return fac;
        }

        prev_sv = fac.sv;
        prev_rank = r_next;
        best = fac;
        best.residual_zeta = zeta(fac.sv, std::min(r_next, r_max));
        detail::truncate_factors(best, std::min(r_next, r_max));
        const Index r_cur = interior_cut ? r_next : q;
        q = std::min(2 * r_cur, q_cap);
    }
    best.converged = false;
    return best;
}

}  // namespace pathlr

#endif  // PATHLR_CROSS_HPP
