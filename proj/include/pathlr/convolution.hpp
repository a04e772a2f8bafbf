#ifndef PATHLR_CONVOLUTION_HPP
#define PATHLR_CONVOLUTION_HPP

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <vector>

#include "pathlr/fft.hpp"
#include "pathlr/mesh.hpp"

namespace pathlr {

/// c_i = sum_j a_{i+j} b_j with a zero-padded outside [0, k).  The index i
/// runs over -(m-1) .. k-1 and is stored 0-based with offset m-1, i.e.
/// result[m-1+i] = c_i; the result has length m+k-1.  Computed by FFT of
/// a against the reversal of b.
inline std::vector<double> convolve_full(std::span<const double> a,
                                         std::span<const double> b) {
    const Index k = static_cast<Index>(a.size());
    const Index m = static_cast<Index>(b.size());
    if (m < 1 || k < m) throw std::invalid_argument("convolve_full requires k >= m >= 1");
    std::vector<double> b_rev(b.rbegin(), b.rend());
    std::vector<double> out(static_cast<size_t>(m + k - 1));
    ConvolutionEngine engine(m + k - 1);
    engine.convolve(a, b_rev, out);
    return out;
}

/// Square Hankel matrix held by its generators: top row `row` (length k)
/// and right column `col` (length k-1).  A_{ij} = row[i+j] for i+j < k and
/// col[i+j-k] otherwise.
struct HankelSpec {
    std::vector<double> row;
    std::vector<double> col;

    Index dim() const { return static_cast<Index>(row.size()); }

    double entry(Index i, Index j) const {
        const Index k = dim();
        const Index s = i + j;
        return s < k ? row[static_cast<size_t>(s)] : col[static_cast<size_t>(s - k)];
    }
};

/// y = A x by explicit summation; the slow-path oracle for the FFT route.
inline std::vector<double> hankel_matvec_direct(const HankelSpec& h,
                                                std::span<const double> x) {
    const Index k = h.dim();
    if (static_cast<Index>(x.size()) != k)
        throw std::invalid_argument("hankel_matvec_direct: dimension mismatch");
    if (static_cast<Index>(h.col.size()) != k - 1)
        throw std::invalid_argument("hankel_matvec_direct: generator column must have k-1 entries");
    std::vector<double> y(static_cast<size_t>(k), 0.0);
    for (Index i = 0; i < k; ++i) {
        double acc = 0.0;
        for (Index j = 0; j < k; ++j) acc += h.entry(i, j) * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = acc;
    }
    return y;
}

/// Products of the anti-triangular basis matrices with the kernel:
/// k_i = [u_i^T, 0]_H p and t_i = [0^T, w_i]_H p, where w_i is the
/// length-(M-1) prefix of u_i.  Stored column-contiguous as r x M so that
/// the reconstruction reads one column per spatial index.
struct BasisConvolutions {
    Eigen::MatrixXd k_vecs;  // r x M, k_vecs(i, l) = k_i[l]
    Eigen::MatrixXd t_vecs;  // r x M, t_vecs(i, l) = t_i[l]
    Index count = 0;
};

/// Computes all k_i, t_i from one length-(2M-1) FFT convolution per basis
/// column: y = conv(u_i, p_rev) gives t_i = (0, y[0..M-2]) and
/// k_i = y[M-1..2M-2].
inline BasisConvolutions basis_convolutions(const Eigen::MatrixXd& basis_cols,
                                            const ConvolutionKernel& kernel,
                                            Index* fft_count = nullptr) {
    const Index M = basis_cols.rows();
    const Index r = basis_cols.cols();
    if (M != static_cast<Index>(kernel.p.size()))
        throw std::invalid_argument("basis_convolutions: column/kernel length mismatch");
    BasisConvolutions bc;
    bc.count = r;
    bc.k_vecs.resize(r, M);
    bc.t_vecs.resize(r, M);
    ConvolutionEngine engine(2 * M - 1);
    engine.set_kernel(kernel.p_rev);
    std::vector<double> y(static_cast<size_t>(2 * M - 1));
    std::vector<double> col(static_cast<size_t>(M));
    for (Index i = 0; i < r; ++i) {
        Eigen::VectorXd::Map(col.data(), M) = basis_cols.col(i);
        engine.convolve_with_kernel(col, y);
        bc.t_vecs(i, 0) = 0.0;
        for (Index l = 1; l < M; ++l) bc.t_vecs(i, l) = y[static_cast<size_t>(l - 1)];
        for (Index l = 0; l < M; ++l) bc.k_vecs(i, l) = y[static_cast<size_t>(M - 1 + l)];
    }
    if (fft_count) *fft_count = engine.transform_count();
    return bc;
}

}  // namespace pathlr

#endif  // PATHLR_CONVOLUTION_HPP
