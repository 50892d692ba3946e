// loewner.hpp
// Divided-difference (Loewner and Loewner-like) matrices coupling sample data
// with barycentric parameters, in complex and realified block form.

#pragma once

#include <span>

#include <Eigen/Core>

#include "baryfit/types.hpp"

namespace baryfit {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace loewner {

namespace detail {

inline void check_disjoint(Complex mu, Complex p, const char* what) {
    if (mu == p) { throw DivisionByZero(std::string("Loewner build: sample point equals ") + what); }
}

} // namespace detail

/// L(i,j) = (g_i - h_j) / (mu_i - lambda_j).
inline ComplexMatrix build_unstructured(const DataSet& data, std::span<const Complex> lambdas,
                                        std::span<const Complex> h) {
    if (lambdas.size() != h.size()) { throw ShapeMismatch("build_unstructured: lambda/h length mismatch"); }
    ComplexMatrix L(data.size(), lambdas.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            detail::check_disjoint(data[i].mu, lambdas[j], "a support point");
            L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (data[i].g - h[j]) / (data[i].mu - lambdas[j]);
        }
    }
    return L;
}

/// L(i,j) = (g_i - h_j) / ((mu_i - lambda_j)(mu_i - sigma_j)).
inline ComplexMatrix build_so(const DataSet& data, std::span<const Complex> lambdas, std::span<const Complex> h,
                              std::span<const Complex> sigmas) {
    if (lambdas.size() != h.size() || lambdas.size() != sigmas.size()) {
        throw ShapeMismatch("build_so: parameter length mismatch");
    }
    ComplexMatrix L(data.size(), lambdas.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            detail::check_disjoint(data[i].mu, lambdas[j], "a support point");
            detail::check_disjoint(data[i].mu, sigmas[j], "a quasi-support point");
            L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (data[i].g - h[j]) / ((data[i].mu - lambdas[j]) * (data[i].mu - sigmas[j]));
        }
    }
    return L;
}

/// Like build_so, but the sample value g_i is replaced by the current model
/// value H(mu_i); feeds the Jacobians of the fully nonlinear residual.
inline ComplexMatrix build_sonl(const DataSet& data, const SecondOrderBarycentric& model) {
    const std::size_t k = model.order();
    ComplexMatrix L(data.size(), k);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Complex hi = eval_second_order(model, data[i].mu);
        for (std::size_t j = 0; j < k; ++j) {
            detail::check_disjoint(data[i].mu, model.lambdas[j], "a support point");
            detail::check_disjoint(data[i].mu, model.sigmas[j], "a quasi-support point");
            L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (hi - model.h_values[j]) / ((data[i].mu - model.lambdas[j]) * (data[i].mu - model.sigmas[j]));
        }
    }
    return L;
}

/// Two-difference form: L(i,j) = (g_i - h_j)/(mu_i - lambda_j) - (g_i - h_j)/(mu_i - sigma_j).
/// Identity: equals (lambda_j - sigma_j) times the build_so entry; tends to
/// the unstructured Loewner matrix as |Re sigma_j| grows.
inline ComplexMatrix build_us2so(const DataSet& data, std::span<const Complex> lambdas, std::span<const Complex> h,
                                 std::span<const Complex> sigmas) {
    if (lambdas.size() != h.size() || lambdas.size() != sigmas.size()) {
        throw ShapeMismatch("build_us2so: parameter length mismatch");
    }
    ComplexMatrix L(data.size(), lambdas.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            detail::check_disjoint(data[i].mu, lambdas[j], "a support point");
            detail::check_disjoint(data[i].mu, sigmas[j], "a quasi-support point");
            const Complex num = data[i].g - h[j];
            L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                num / (data[i].mu - lambdas[j]) - num / (data[i].mu - sigmas[j]);
        }
    }
    return L;
}

namespace detail {

// Assembles the 2x2 real block at (i,j) from the coefficient pair
//   alpha = divided difference against (lambda_j, h_j),
//   beta  = divided difference against the conjugated parameters.
// The sign convention absorbs the minus of the complex weight solve:
//   w_real = (diag(eta_real) Lr)^+ (diag(eta_real) g_real).
inline void place_block(RealMatrix& Lr, std::size_t i, std::size_t j, Complex alpha, Complex beta) {
    const auto r = static_cast<Eigen::Index>(2 * i);
    const auto c = static_cast<Eigen::Index>(2 * j);
    Lr(r, c) = -(alpha + beta).real();
    Lr(r, c + 1) = (alpha - beta).imag();
    Lr(r + 1, c) = -(alpha + beta).imag();
    Lr(r + 1, c + 1) = -(alpha - beta).real();
}

inline void require_upper_half(const DataSet& data) {
    for (const auto& t : data) {
        if (!(t.mu.imag() > 0.0)) {
            throw DomainError("realified Loewner build: sample points must have positive imaginary part");
        }
    }
}

} // namespace detail

/// Realified unstructured Loewner matrix, 2(M-k) x 2k, for upper-half-plane
/// representatives; solving with it yields interleaved [Re w, Im w, ...].
inline RealMatrix build_real_unstructured(const DataSet& data, std::span<const Complex> lambdas,
                                          std::span<const Complex> h) {
    if (lambdas.size() != h.size()) { throw ShapeMismatch("build_real_unstructured: lambda/h length mismatch"); }
    detail::require_upper_half(data);
    RealMatrix Lr(2 * data.size(), 2 * lambdas.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            detail::check_disjoint(data[i].mu, lambdas[j], "a support point");
            const Complex alpha = (data[i].g - h[j]) / (data[i].mu - lambdas[j]);
            const Complex beta = (data[i].g - std::conj(h[j])) / (data[i].mu - std::conj(lambdas[j]));
            detail::place_block(Lr, i, j, alpha, beta);
        }
    }
    return Lr;
}

/// Realified second-order Loewner-like matrix with quadratic denominators.
inline RealMatrix build_real_so(const DataSet& data, std::span<const Complex> lambdas, std::span<const Complex> h,
                                std::span<const Complex> sigmas) {
    if (lambdas.size() != h.size() || lambdas.size() != sigmas.size()) {
        throw ShapeMismatch("build_real_so: parameter length mismatch");
    }
    detail::require_upper_half(data);
    RealMatrix Lr(2 * data.size(), 2 * lambdas.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            detail::check_disjoint(data[i].mu, lambdas[j], "a support point");
            detail::check_disjoint(data[i].mu, sigmas[j], "a quasi-support point");
            const Complex alpha =
                (data[i].g - h[j]) / ((data[i].mu - lambdas[j]) * (data[i].mu - sigmas[j]));
            const Complex beta = (data[i].g - std::conj(h[j])) /
                                 ((data[i].mu - std::conj(lambdas[j])) * (data[i].mu - std::conj(sigmas[j])));
            detail::place_block(Lr, i, j, alpha, beta);
        }
    }
    return Lr;
}

} // namespace loewner
} // namespace baryfit
