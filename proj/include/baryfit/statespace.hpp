// statespace.hpp
// Conversions from barycentric parameters to first-order (E, A, b, c) and
// second-order (M, D, K, b, c) realizations, complex or real, plus transfer
// function evaluation from the matrices.

#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include "baryfit/realification.hpp"
#include "baryfit/types.hpp"

namespace baryfit {
namespace statespace {

/// E x' = A x + b u, y = c^T x with transfer c^T (sE - A)^{-1} b.
struct FirstOrderRealization {
    bool is_real = false; // when set, all imaginary parts are exactly zero
    ComplexMatrix E;
    ComplexMatrix A;
    ComplexVector b;
    ComplexVector c;

    Eigen::Index dim() const { return A.rows(); }
};

/// M x'' + D x' + K x = b u, y = c^T x with transfer c^T (s^2 M + s D + K)^{-1} b.
struct SecondOrderRealization {
    bool is_real = false;
    ComplexMatrix M;
    ComplexMatrix D;
    ComplexMatrix K;
    ComplexVector b;
    ComplexVector c;

    Eigen::Index dim() const { return M.rows(); }
};

/// E = I, A = Lambda - w 1^T, b = w, c = h.
inline FirstOrderRealization to_first_order(const UnstructuredBarycentric& m) {
    const auto k = static_cast<Eigen::Index>(m.order());
    if (k < 1) { throw EmptyInput("to_first_order: model order must be at least 1"); }
    FirstOrderRealization out;
    out.is_real = false;
    out.E = ComplexMatrix::Identity(k, k);
    out.b = Eigen::Map<const ComplexVector>(m.weights.data(), k);
    out.c = Eigen::Map<const ComplexVector>(m.h_values.data(), k);
    out.A = -out.b * ComplexVector::Ones(k).transpose();
    for (Eigen::Index j = 0; j < k; ++j) { out.A(j, j) += m.lambdas[static_cast<std::size_t>(j)]; }
    return out;
}

/// M = I, D = -Lambda - Sigma, K = Lambda Sigma + w 1^T, b = w, c = h.
inline SecondOrderRealization to_second_order(const SecondOrderBarycentric& m) {
    const auto k = static_cast<Eigen::Index>(m.order());
    if (k < 1) { throw EmptyInput("to_second_order: model order must be at least 1"); }
    SecondOrderRealization out;
    out.is_real = false;
    out.M = ComplexMatrix::Identity(k, k);
    out.b = Eigen::Map<const ComplexVector>(m.weights.data(), k);
    out.c = Eigen::Map<const ComplexVector>(m.h_values.data(), k);
    out.D = ComplexMatrix::Zero(k, k);
    out.K = out.b * ComplexVector::Ones(k).transpose();
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto lambda = m.lambdas[static_cast<std::size_t>(j)];
        const auto sigma = m.sigmas[static_cast<std::size_t>(j)];
        out.D(j, j) = -lambda - sigma;
        out.K(j, j) += lambda * sigma;
    }
    return out;
}

namespace detail {

inline RealVector real_b_tilde(const std::vector<Complex>& w) {
    RealVector b(2 * w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        b(static_cast<Eigen::Index>(2 * j)) = w[j].real();
        b(static_cast<Eigen::Index>(2 * j + 1)) = -w[j].imag();
    }
    return b;
}

inline RealVector real_c_tilde(const std::vector<Complex>& h) {
    RealVector c(2 * h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        c(static_cast<Eigen::Index>(2 * j)) = h[j].real();
        c(static_cast<Eigen::Index>(2 * j + 1)) = h[j].imag();
    }
    return c;
}

inline RealVector z_tilde(std::size_t k) {
    RealVector z = RealVector::Zero(2 * static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) { z(static_cast<Eigen::Index>(2 * j)) = 2.0; }
    return z;
}

} // namespace detail

/// Real first-order realization for conjugate-closed parameters:
/// 2x2 rotation blocks for each representative, E = I, A = Atilde - btilde ztilde^T,
/// b = sqrt(2) btilde, c = sqrt(2) ctilde with ztilde = [2 0 2 0 ...].
inline FirstOrderRealization to_first_order_real(const realification::ConjugateClosedParams& p) {
    p.validate();
    const std::size_t k = p.order();
    if (k < 1) { throw EmptyInput("to_first_order_real: model order must be at least 1"); }
    const auto n = static_cast<Eigen::Index>(2 * k);
    RealMatrix A = RealMatrix::Zero(n, n);
    for (std::size_t j = 0; j < k; ++j) {
        const auto r = static_cast<Eigen::Index>(2 * j);
        A(r, r) = p.lambdas[j].real();
        A(r, r + 1) = p.lambdas[j].imag();
        A(r + 1, r) = -p.lambdas[j].imag();
        A(r + 1, r + 1) = p.lambdas[j].real();
    }
    const RealVector bt = detail::real_b_tilde(p.weights);
    const RealVector ct = detail::real_c_tilde(p.h_values);
    A -= bt * detail::z_tilde(k).transpose();

    FirstOrderRealization out;
    out.is_real = true;
    out.E = ComplexMatrix::Identity(n, n);
    out.A = A.cast<Complex>();
    out.b = (std::sqrt(2.0) * bt).cast<Complex>();
    out.c = (std::sqrt(2.0) * ct).cast<Complex>();
    return out;
}

/// Real second-order realization: D blocks from lambda_j + sigma_j, K blocks
/// from lambda_j sigma_j, plus the rank-one btilde ztilde^T coupling in K.
inline SecondOrderRealization to_second_order_real(const realification::ConjugateClosedParams& p) {
    p.validate();
    const std::size_t k = p.order();
    if (k < 1) { throw EmptyInput("to_second_order_real: model order must be at least 1"); }
    if (p.sigmas.size() != k) { throw ShapeMismatch("to_second_order_real: missing quasi-support points"); }
    const auto n = static_cast<Eigen::Index>(2 * k);
    RealMatrix D = RealMatrix::Zero(n, n);
    RealMatrix K = RealMatrix::Zero(n, n);
    for (std::size_t j = 0; j < k; ++j) {
        const Complex ds = p.lambdas[j] + p.sigmas[j];
        const Complex ks = p.lambdas[j] * p.sigmas[j];
        const auto r = static_cast<Eigen::Index>(2 * j);
        D(r, r) = -ds.real();
        D(r, r + 1) = -ds.imag();
        D(r + 1, r) = ds.imag();
        D(r + 1, r + 1) = -ds.real();
        K(r, r) = ks.real();
        K(r, r + 1) = ks.imag();
        K(r + 1, r) = -ks.imag();
        K(r + 1, r + 1) = ks.real();
    }
    const RealVector bt = detail::real_b_tilde(p.weights);
    const RealVector ct = detail::real_c_tilde(p.h_values);
    K += bt * detail::z_tilde(k).transpose();

    SecondOrderRealization out;
    out.is_real = true;
    out.M = ComplexMatrix::Identity(n, n);
    out.D = D.cast<Complex>();
    out.K = K.cast<Complex>();
    out.b = (std::sqrt(2.0) * bt).cast<Complex>();
    out.c = (std::sqrt(2.0) * ct).cast<Complex>();
    return out;
}

namespace detail {

inline Complex transfer_from_shift(const ComplexMatrix& shift, const ComplexVector& b, const ComplexVector& c) {
    Eigen::FullPivLU<ComplexMatrix> lu(shift);
    if (!lu.isInvertible()) { throw SingularShift("eval_realization: evaluation point is a system pole"); }
    const ComplexVector x = lu.solve(b);
    return (c.transpose() * x)(0); // c^T x, no conjugation
}

} // namespace detail

inline Complex eval_realization(const FirstOrderRealization& r, Complex s) {
    return detail::transfer_from_shift(s * r.E - r.A, r.b, r.c);
}

inline Complex eval_realization(const SecondOrderRealization& r, Complex s) {
    return detail::transfer_from_shift(s * s * r.M + s * r.D + r.K, r.b, r.c);
}

} // namespace statespace
} // namespace baryfit
