// realification.hpp
// Conjugate augmentation of data and parameters plus the realified residuals,
// Jacobians and weight solves that let every fitting method emit real
// state-space models. Upper-half-plane entries act as representatives; their
// conjugates are implicit and derived, never stored.

#pragma once

#include <span>

#include "baryfit/loewner.hpp"
#include "baryfit/lsq.hpp"
#include "baryfit/types.hpp"

namespace baryfit {
namespace realification {

/// Upper-half-plane representatives of a conjugate-closed parameter set.
/// sigmas is empty for unstructured models; lambda and sigma share the
/// conjugacy pattern by construction (index-wise pairing).
struct ConjugateClosedParams {
    std::vector<Complex> lambdas;
    std::vector<Complex> h_values;
    std::vector<Complex> sigmas;
    std::vector<Complex> weights;

    std::size_t order() const { return lambdas.size(); }

    void validate() const {
        if (h_values.size() != lambdas.size() || weights.size() != lambdas.size() ||
            (!sigmas.empty() && sigmas.size() != lambdas.size())) {
            throw ShapeMismatch("ConjugateClosedParams: parameter lists must share length");
        }
        for (const auto& l : lambdas) {
            if (!(l.imag() > 0.0)) {
                throw DomainError("ConjugateClosedParams: representatives must have positive imaginary part");
            }
        }
    }
};

/// Input followed by its elementwise conjugate; eta weights carry over.
inline DataSet augment(const DataSet& data) {
    std::vector<DataTriple> out;
    out.reserve(2 * data.size());
    for (const auto& t : data) {
        if (!(t.mu.imag() > 0.0)) {
            throw DomainError("augment: sample points must have positive imaginary part");
        }
        out.push_back(t);
    }
    for (const auto& t : data) { out.push_back({std::conj(t.mu), std::conj(t.g), t.eta}); }
    DataSet augmented;
    for (auto& t : out) { augmented.add(t); }
    return augmented;
}

inline UnstructuredBarycentric augment(const UnstructuredBarycentric& m) {
    UnstructuredBarycentric out = m;
    for (std::size_t j = 0; j < m.order(); ++j) {
        if (!(m.lambdas[j].imag() > 0.0)) {
            throw DomainError("augment: support points must have positive imaginary part");
        }
        out.lambdas.push_back(std::conj(m.lambdas[j]));
        out.h_values.push_back(std::conj(m.h_values[j]));
        out.weights.push_back(std::conj(m.weights[j]));
    }
    return out;
}

inline SecondOrderBarycentric augment(const SecondOrderBarycentric& m) {
    SecondOrderBarycentric out = m;
    for (std::size_t j = 0; j < m.order(); ++j) {
        if (!(m.lambdas[j].imag() > 0.0)) {
            throw DomainError("augment: support points must have positive imaginary part");
        }
        out.lambdas.push_back(std::conj(m.lambdas[j]));
        out.h_values.push_back(std::conj(m.h_values[j]));
        out.weights.push_back(std::conj(m.weights[j]));
        out.sigmas.push_back(std::conj(m.sigmas[j]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Separable (second-order) pieces
// ---------------------------------------------------------------------------

/// Realified separable residual over the augmented data rows: first the
/// original samples, then their conjugates. Entry i is
///   eta_i (g_i - sum_j [ w_j (h_j - g_i) / ((mu_i - lambda_j)(mu_i - sigma_j))
///                      + conj terms ]).
/// Note the orientation: this equals minus the complex separable residual
/// evaluated with augmented data and parameters.
inline ComplexVector residual_separable_real(const DataSet& data, std::span<const Complex> lambdas,
                                             std::span<const Complex> h, std::span<const Complex> sigmas,
                                             std::span<const Complex> w) {
    const std::size_t m = data.size();
    const std::size_t k = lambdas.size();
    if (h.size() != k || sigmas.size() != k || w.size() != k) {
        throw ShapeMismatch("residual_separable_real: parameter length mismatch");
    }
    ComplexVector r(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (int half = 0; half < 2; ++half) {
            const Complex mu = half == 0 ? data[i].mu : std::conj(data[i].mu);
            const Complex g = half == 0 ? data[i].g : std::conj(data[i].g);
            Complex sum(0.0, 0.0);
            for (std::size_t j = 0; j < k; ++j) {
                const Complex da = (mu - lambdas[j]) * (mu - sigmas[j]);
                const Complex db = (mu - std::conj(lambdas[j])) * (mu - std::conj(sigmas[j]));
                if (da == Complex(0.0, 0.0) || db == Complex(0.0, 0.0)) {
                    throw DivisionByZero("residual_separable_real: sample point hits a (quasi-)support point");
                }
                sum += w[j] * (h[j] - g) / da + std::conj(w[j]) * (std::conj(h[j]) - g) / db;
            }
            r(static_cast<Eigen::Index>(half == 0 ? i : i + m)) = data[i].eta * (g - sum);
        }
    }
    return r;
}

/// Per-column derivatives of the separable Loewner system with respect to
/// sigma_j and conj(sigma_j) over the augmented data rows. These are the
/// column derivatives consumed by variable projection; scaling column j by
/// w_j gives the residual derivative.
struct SeparableRealJacobians {
    ComplexMatrix d_sigma;      // 2(M-k) x k
    ComplexMatrix d_sigma_conj; // 2(M-k) x k
};

inline SeparableRealJacobians jacobians_separable_real(const DataSet& data, std::span<const Complex> lambdas,
                                                       std::span<const Complex> h,
                                                       std::span<const Complex> sigmas) {
    const std::size_t m = data.size();
    const std::size_t k = lambdas.size();
    if (h.size() != k || sigmas.size() != k) {
        throw ShapeMismatch("jacobians_separable_real: parameter length mismatch");
    }
    SeparableRealJacobians out;
    out.d_sigma.resize(2 * m, k);
    out.d_sigma_conj.resize(2 * m, k);
    for (std::size_t i = 0; i < 2 * m; ++i) {
        const Complex mu = i < m ? data[i].mu : std::conj(data[i - m].mu);
        const Complex g = i < m ? data[i].g : std::conj(data[i - m].g);
        const double eta = i < m ? data[i].eta : data[i - m].eta;
        for (std::size_t j = 0; j < k; ++j) {
            const Complex a = (g - h[j]) / ((mu - lambdas[j]) * (mu - sigmas[j]));
            const Complex b =
                (g - std::conj(h[j])) / ((mu - std::conj(lambdas[j])) * (mu - std::conj(sigmas[j])));
            out.d_sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                a * eta / (mu - sigmas[j]);
            out.d_sigma_conj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                b * eta / (mu - std::conj(sigmas[j]));
        }
    }
    return out;
}

/// Derivative of diag(eta_real) * build_real_so(...) with respect to the
/// realified quasi-support coordinate theta_q, where theta stacks
/// [Re sigma; Im sigma]. Only the column pair of the affected sigma_j is
/// nonzero. This is the dPsi input of the realified variable projection.
inline RealMatrix so_real_psi_derivative(const DataSet& data, std::span<const Complex> lambdas,
                                         std::span<const Complex> h, std::span<const Complex> sigmas,
                                         Eigen::Index q) {
    const std::size_t m = data.size();
    const std::size_t k = lambdas.size();
    const std::size_t j = static_cast<std::size_t>(q) % k;
    const bool wrt_imag = static_cast<std::size_t>(q) >= k;
    RealMatrix out = RealMatrix::Zero(2 * m, 2 * k);
    for (std::size_t i = 0; i < m; ++i) {
        const Complex mu = data[i].mu;
        const Complex g = data[i].g;
        const Complex alpha = (g - h[j]) / ((mu - lambdas[j]) * (mu - sigmas[j]));
        const Complex beta =
            (g - std::conj(h[j])) / ((mu - std::conj(lambdas[j])) * (mu - std::conj(sigmas[j])));
        // d sigma / d theta is 1 or i; d conj(sigma) / d theta is 1 or -i.
        const Complex da = (wrt_imag ? imag_unit : Complex(1.0, 0.0)) * alpha / (mu - sigmas[j]);
        const Complex db = (wrt_imag ? -imag_unit : Complex(1.0, 0.0)) * beta / (mu - std::conj(sigmas[j]));
        const auto r = static_cast<Eigen::Index>(2 * i);
        const auto c = static_cast<Eigen::Index>(2 * j);
        const double eta = data[i].eta;
        out(r, c) = -eta * (da + db).real();
        out(r, c + 1) = eta * (da - db).imag();
        out(r + 1, c) = -eta * (da + db).imag();
        out(r + 1, c + 1) = -eta * (da - db).real();
    }
    return out;
}

/// Solves the realified second-order weight problem and reassembles complex,
/// conjugate-consistent barycentric weights.
inline std::vector<Complex> solve_real_weights_so(const DataSet& data, std::span<const Complex> lambdas,
                                                  std::span<const Complex> h, std::span<const Complex> sigmas,
                                                  double rank_tol = -1.0, int* rank_out = nullptr) {
    const RealMatrix Lr = loewner::build_real_so(data, lambdas, h, sigmas);
    const RealVector w_real =
        lsq::solve_real_weights(Lr, lsq::g_real_vector(data), lsq::eta_real_vector(data), rank_tol, rank_out);
    return lsq::deinterleave(w_real);
}

inline std::vector<Complex> solve_real_weights_unstructured(const DataSet& data,
                                                            std::span<const Complex> lambdas,
                                                            std::span<const Complex> h, double rank_tol = -1.0,
                                                            int* rank_out = nullptr) {
    const RealMatrix Lr = loewner::build_real_unstructured(data, lambdas, h);
    const RealVector w_real =
        lsq::solve_real_weights(Lr, lsq::g_real_vector(data), lsq::eta_real_vector(data), rank_tol, rank_out);
    return lsq::deinterleave(w_real);
}

// ---------------------------------------------------------------------------
// Fully nonlinear pieces
// ---------------------------------------------------------------------------

/// Smooth residual eta_i (H_aug(mu_i) - g_i) of the conjugate-augmented model
/// over the augmented data rows; its squared norm is twice the objective
/// restricted to the original samples.
inline ComplexVector residual_nonlinear_real(const DataSet& data, std::span<const Complex> lambdas,
                                             std::span<const Complex> h, std::span<const Complex> sigmas,
                                             std::span<const Complex> w) {
    const std::size_t m = data.size();
    const std::size_t k = lambdas.size();
    if (h.size() != k || sigmas.size() != k || w.size() != k) {
        throw ShapeMismatch("residual_nonlinear_real: parameter length mismatch");
    }
    SecondOrderBarycentric model{{lambdas.begin(), lambdas.end()},
                                 {h.begin(), h.end()},
                                 {w.begin(), w.end()},
                                 {sigmas.begin(), sigmas.end()}};
    const SecondOrderBarycentric aug = augment(model);
    ComplexVector r(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        r(static_cast<Eigen::Index>(i)) = data[i].eta * (eval_second_order(aug, data[i].mu) - data[i].g);
        r(static_cast<Eigen::Index>(i + m)) =
            data[i].eta * (eval_second_order(aug, std::conj(data[i].mu)) - std::conj(data[i].g));
    }
    return r;
}

struct NonlinearRealJacobians {
    ComplexMatrix d_w;          // 2(M-k) x k
    ComplexMatrix d_sigma;      // 2(M-k) x k
    ComplexMatrix d_w_conj;     // 2(M-k) x k
    ComplexMatrix d_sigma_conj; // 2(M-k) x k
};

/// Wirtinger Jacobians of the smooth augmented residual with respect to the
/// representative weights and quasi-support points and their conjugates.
inline NonlinearRealJacobians jacobians_nonlinear_real(const DataSet& data, std::span<const Complex> lambdas,
                                                       std::span<const Complex> h,
                                                       std::span<const Complex> sigmas,
                                                       std::span<const Complex> w) {
    const std::size_t m = data.size();
    const std::size_t k = lambdas.size();
    SecondOrderBarycentric model{{lambdas.begin(), lambdas.end()},
                                 {h.begin(), h.end()},
                                 {w.begin(), w.end()},
                                 {sigmas.begin(), sigmas.end()}};
    const SecondOrderBarycentric aug = augment(model);

    NonlinearRealJacobians out;
    out.d_w.resize(2 * m, k);
    out.d_sigma.resize(2 * m, k);
    out.d_w_conj.resize(2 * m, k);
    out.d_sigma_conj.resize(2 * m, k);
    for (std::size_t i = 0; i < 2 * m; ++i) {
        const Complex mu = i < m ? data[i].mu : std::conj(data[i - m].mu);
        const double eta = i < m ? data[i].eta : data[i - m].eta;
        const Complex hmu = eval_second_order(aug, mu);
        Complex denom(1.0, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            denom += w[j] / ((mu - lambdas[j]) * (mu - sigmas[j]));
            denom += std::conj(w[j]) / ((mu - std::conj(lambdas[j])) * (mu - std::conj(sigmas[j])));
        }
        if (denom == Complex(0.0, 0.0)) {
            throw PoleHit("jacobians_nonlinear_real: denominator vanished at a sample point");
        }
        const Complex eta_tilde = eta / denom;
        for (std::size_t j = 0; j < k; ++j) {
            const Complex lr = (hmu - h[j]) / ((mu - lambdas[j]) * (mu - sigmas[j]));
            const Complex lc =
                (hmu - std::conj(h[j])) / ((mu - std::conj(lambdas[j])) * (mu - std::conj(sigmas[j])));
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(j);
            out.d_w(r, c) = -eta_tilde * lr;
            out.d_sigma(r, c) = -w[j] * eta_tilde / (mu - sigmas[j]) * lr;
            out.d_w_conj(r, c) = -eta_tilde * lc;
            out.d_sigma_conj(r, c) = -std::conj(w[j]) * eta_tilde / (mu - std::conj(sigmas[j])) * lc;
        }
    }
    return out;
}

} // namespace realification
} // namespace baryfit
