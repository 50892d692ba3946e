// lsq.hpp
// Weighted linear least squares via truncated-SVD pseudoinverse. All
// barycentric weight recovery steps route through this kernel.

#pragma once

#include <limits>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "baryfit/loewner.hpp"
#include "baryfit/types.hpp"

namespace baryfit {
namespace lsq {

/// Standard truncation rule when the caller does not supply one.
inline double default_rank_tol(Eigen::Index rows, Eigen::Index cols) {
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

/// Minimum-norm least-squares solution of A x ~ b with singular values below
/// rank_tol * sigma_max truncated. rank_tol < 0 selects the default rule.
template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> pinv_solve(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
                                                 const Eigen::Vector<Scalar, Eigen::Dynamic>& b,
                                                 double rank_tol = -1.0, int* rank_out = nullptr) {
    if (A.rows() != b.size()) { throw ShapeMismatch("pinv_solve: row count mismatch"); }
    if (!A.allFinite() || !b.allFinite()) { throw NonFiniteInput("pinv_solve: non-finite input"); }
    if (rank_tol < 0.0) { rank_tol = default_rank_tol(A.rows(), A.cols()); }
    Eigen::JacobiSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(
        A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rank_tol);
    if (rank_out) { *rank_out = static_cast<int>(svd.rank()); }
    return svd.solve(b);
}

/// min_x || diag(row_weights) (-matrix x - rhs) ||_2.
struct WeightedLsProblem {
    ComplexMatrix matrix;
    ComplexVector rhs;
    RealVector row_weights;
};

/// Solves the weighted problem; returns the minimum-norm minimizer
///   x = -(diag(eta) A)^+ (diag(eta) rhs).
inline ComplexVector solve_weighted(const WeightedLsProblem& p, double rank_tol = -1.0, int* rank_out = nullptr) {
    if (p.matrix.rows() != p.rhs.size() || p.matrix.rows() != p.row_weights.size()) {
        throw ShapeMismatch("solve_weighted: rows, rhs and row_weights must agree");
    }
    if (!p.row_weights.allFinite()) { throw NonFiniteInput("solve_weighted: non-finite weights"); }
    const ComplexMatrix wa = p.row_weights.cast<Complex>().asDiagonal() * p.matrix;
    const ComplexVector wb = p.row_weights.cast<Complex>().asDiagonal() * p.rhs;
    return -pinv_solve<Complex>(wa, wb, rank_tol, rank_out);
}

/// Interleaves a complex vector as [Re z_1, Im z_1, Re z_2, Im z_2, ...].
inline RealVector interleave(const std::vector<Complex>& z) {
    RealVector out(2 * z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        out(static_cast<Eigen::Index>(2 * j)) = z[j].real();
        out(static_cast<Eigen::Index>(2 * j + 1)) = z[j].imag();
    }
    return out;
}

/// Inverse of interleave.
inline std::vector<Complex> deinterleave(const RealVector& v) {
    if (v.size() % 2 != 0) { throw ShapeMismatch("deinterleave: odd length"); }
    std::vector<Complex> out(static_cast<std::size_t>(v.size() / 2));
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = Complex(v(static_cast<Eigen::Index>(2 * j)), v(static_cast<Eigen::Index>(2 * j + 1)));
    }
    return out;
}

/// Sample values as a column vector, in data-set order.
inline ComplexVector g_vector(const DataSet& data) {
    ComplexVector out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) { out(static_cast<Eigen::Index>(i)) = data[i].g; }
    return out;
}

/// Sample weights as a column vector, in data-set order.
inline RealVector eta_vector(const DataSet& data) {
    RealVector out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) { out(static_cast<Eigen::Index>(i)) = data[i].eta; }
    return out;
}

/// Interleaved [Re g_i, Im g_i, ...] of the sample values.
inline RealVector g_real_vector(const DataSet& data) {
    RealVector out(2 * data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        out(static_cast<Eigen::Index>(2 * i)) = data[i].g.real();
        out(static_cast<Eigen::Index>(2 * i + 1)) = data[i].g.imag();
    }
    return out;
}

/// Each sample weight duplicated for its Re and Im rows.
inline RealVector eta_real_vector(const DataSet& data) {
    RealVector out(2 * data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        out(static_cast<Eigen::Index>(2 * i)) = data[i].eta;
        out(static_cast<Eigen::Index>(2 * i + 1)) = data[i].eta;
    }
    return out;
}

/// Solves the realified weight problem; the result interleaves
/// [Re w_1, Im w_1, ...] and reassembles into conjugate-consistent weights.
inline RealVector solve_real_weights(const RealMatrix& realL, const RealVector& g_real, const RealVector& eta_real,
                                     double rank_tol = -1.0, int* rank_out = nullptr) {
    if (realL.rows() != g_real.size() || realL.rows() != eta_real.size()) {
        throw ShapeMismatch("solve_real_weights: rows, rhs and weights must agree");
    }
    if (!eta_real.allFinite()) { throw NonFiniteInput("solve_real_weights: non-finite weights"); }
    const RealMatrix wa = eta_real.asDiagonal() * realL;
    const RealVector wb = eta_real.asDiagonal() * g_real;
    return pinv_solve<double>(wa, wb, rank_tol, rank_out);
}

} // namespace lsq
} // namespace baryfit
