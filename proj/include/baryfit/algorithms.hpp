// algorithms.hpp
// The four greedy fitting loops: unstructured AAA, separable second-order
// AAA (variable projection over the quasi-support points), linearized
// second-order AAA (quasi-support points frozen at initialization), and the
// fully nonlinear second-order AAA (joint weight/quasi-support optimization).
//
// Every iteration follows the same two-step pattern: pick the sample with the
// largest weighted model error as the next support point, then refit the
// remaining free parameters against the uninterpolated samples.

#pragma once

#include <chrono>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "baryfit/loewner.hpp"
#include "baryfit/lsq.hpp"
#include "baryfit/metrics.hpp"
#include "baryfit/optim.hpp"
#include "baryfit/realification.hpp"
#include "baryfit/types.hpp"

namespace baryfit {
namespace algorithms {

enum class Method { aaa, so, lso, nso };

enum class Weighting { as_given, unit, relative };

struct FitConfig {
    int kmax = 10;
    double tol = 0.0;           // stop when the weighted relative L2 error falls below; 0 disables
    double sigma_real = -1e5;   // real part of freshly initialized quasi-support points
    Weighting weighting = Weighting::as_given;
    bool real_mode = false;
    Method method = Method::aaa;
    bool aaa2 = false;          // run the unstructured loop to 2*kmax
    bool drop_nonpositive_imag = false; // real mode: drop offending samples instead of rejecting
    double rank_tol = -1.0;     // weight-solve truncation; negative selects the default
    optim::NlsqOptions inner;   // budgets for the inner nonlinear solves
    std::function<void(const FitRecord&)> on_iteration;
};

struct UnstructuredFit {
    UnstructuredBarycentric model; // upper-half-plane representatives in real mode
    FitTrace trace;
    std::vector<UnstructuredBarycentric> iterates;
    bool real_mode = false;
};

struct SecondOrderFit {
    SecondOrderBarycentric model;
    FitTrace trace;
    std::vector<SecondOrderBarycentric> iterates;
    bool real_mode = false;
};

/// Evaluator of the fitted transfer function; in real mode the stored
/// representatives are augmented with their conjugates first.
inline std::function<Complex(Complex)> evaluator(const UnstructuredBarycentric& m, bool real_mode) {
    const UnstructuredBarycentric full = real_mode ? realification::augment(m) : m;
    return [full](Complex s) { return eval_unstructured(full, s); };
}

inline std::function<Complex(Complex)> evaluator(const SecondOrderBarycentric& m, bool real_mode) {
    const SecondOrderBarycentric full = real_mode ? realification::augment(m) : m;
    return [full](Complex s) { return eval_second_order(full, s); };
}

/// Index of the sample maximizing eta_i |H(mu_i) - g_i|. Exact ties are
/// broken by the unweighted error |H(mu_i) - g_i|, remaining ties by the
/// smallest index.
inline std::size_t greedy_select(const DataSet& data, const std::function<Complex(Complex)>& model) {
    if (data.empty()) { throw EmptyDataSet("greedy_select: data set is empty"); }
    std::size_t arg = 0;
    double best_weighted = -1.0;
    double best_unweighted = -1.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double u = std::abs(model(data[i].mu) - data[i].g);
        const double wgt = data[i].eta * u;
        if (wgt > best_weighted) {
            best_weighted = wgt;
            best_unweighted = u;
            arg = i;
        } else if (wgt == best_weighted && u > best_unweighted) {
            best_unweighted = u;
            arg = i;
        }
    }
    return arg;
}

// ---------------------------------------------------------------------------
// Residuals and Jacobians
// ---------------------------------------------------------------------------

/// Linearized weighted residual: entry i is
///   eta_i (sum_j w_j (h_j - g_i)/(mu_i - lambda_j) - g_i),
/// identical to diag(eta)(-L w - g) with the unstructured Loewner matrix.
inline ComplexVector residual_linearized(const DataSet& data, std::span<const Complex> lambdas,
                                         std::span<const Complex> h, std::span<const Complex> w) {
    if (lambdas.size() != h.size() || lambdas.size() != w.size()) {
        throw ShapeMismatch("residual_linearized: parameter length mismatch");
    }
    ComplexVector r(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        Complex sum(0.0, 0.0);
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            const Complex d = data[i].mu - lambdas[j];
            if (d == Complex(0.0, 0.0)) {
                throw DivisionByZero("residual_linearized: sample point equals a support point");
            }
            sum += w[j] * (h[j] - data[i].g) / d;
        }
        r(static_cast<Eigen::Index>(i)) = data[i].eta * (sum - data[i].g);
    }
    return r;
}

/// Separable weighted residual with quadratic denominators; identical to
/// diag(eta)(-L_so w - g).
inline ComplexVector residual_separable(const DataSet& data, std::span<const Complex> lambdas,
                                        std::span<const Complex> h, std::span<const Complex> sigmas,
                                        std::span<const Complex> w) {
    if (lambdas.size() != h.size() || lambdas.size() != sigmas.size() || lambdas.size() != w.size()) {
        throw ShapeMismatch("residual_separable: parameter length mismatch");
    }
    ComplexVector r(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        Complex sum(0.0, 0.0);
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            const Complex d = (data[i].mu - lambdas[j]) * (data[i].mu - sigmas[j]);
            if (d == Complex(0.0, 0.0)) {
                throw DivisionByZero("residual_separable: sample point hits a (quasi-)support point");
            }
            sum += w[j] * (h[j] - data[i].g) / d;
        }
        r(static_cast<Eigen::Index>(i)) = data[i].eta * (sum - data[i].g);
    }
    return r;
}

/// Derivative of the separable Loewner system columns with respect to the
/// quasi-support points: entry (i,j) = -L_so(i,j) * eta_i / (mu_i - sigma_j).
/// Reuses the freshly built L_so.
inline ComplexMatrix jacobian_separable(const DataSet& data, std::span<const Complex> sigmas,
                                        const ComplexMatrix& loewner_so) {
    if (loewner_so.rows() != static_cast<Eigen::Index>(data.size()) ||
        loewner_so.cols() != static_cast<Eigen::Index>(sigmas.size())) {
        throw ShapeMismatch("jacobian_separable: Loewner matrix shape mismatch");
    }
    ComplexMatrix J(loewner_so.rows(), loewner_so.cols());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < sigmas.size(); ++j) {
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                -loewner_so(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * data[i].eta /
                (data[i].mu - sigmas[j]);
        }
    }
    return J;
}

/// Weighted moduli of the true model error, eta_i |H(mu_i) - g_i|.
inline RealVector residual_nonlinear(const DataSet& data, const SecondOrderBarycentric& model) {
    RealVector r(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        r(static_cast<Eigen::Index>(i)) = data[i].eta * std::abs(eval_second_order(model, data[i].mu) - data[i].g);
    }
    return r;
}

/// Smooth complex form eta_i (H(mu_i) - g_i); same squared norm as
/// residual_nonlinear but differentiable, so the optimizer works on this one.
inline ComplexVector residual_nonlinear_smooth(const DataSet& data, const SecondOrderBarycentric& model) {
    ComplexVector r(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        r(static_cast<Eigen::Index>(i)) = data[i].eta * (eval_second_order(model, data[i].mu) - data[i].g);
    }
    return r;
}

struct NonlinearJacobians {
    ComplexMatrix d_w;     // (M-k) x k
    ComplexMatrix d_sigma; // (M-k) x k
};

/// Jacobians of the smooth nonlinear residual with respect to the weights and
/// quasi-support points. With eta~_i = eta_i / d_so(mu_i):
///   d/dw_j     = -eta~_i L_sonl(i,j),
///   d/dsigma_j = -w_j eta~_i / (mu_i - sigma_j) L_sonl(i,j).
inline NonlinearJacobians jacobians_nonlinear(const DataSet& data, const SecondOrderBarycentric& model) {
    const std::size_t m = data.size();
    const std::size_t k = model.order();
    NonlinearJacobians out;
    out.d_w.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    out.d_sigma.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < m; ++i) {
        const Complex mu = data[i].mu;
        const Complex hmu = eval_second_order(model, mu);
        Complex denom(1.0, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            denom += model.weights[j] / ((mu - model.lambdas[j]) * (mu - model.sigmas[j]));
        }
        if (denom == Complex(0.0, 0.0)) {
            throw PoleHit("jacobians_nonlinear: denominator vanished at a sample point");
        }
        const Complex eta_tilde = data[i].eta / denom;
        for (std::size_t j = 0; j < k; ++j) {
            const Complex lij =
                (hmu - model.h_values[j]) / ((mu - model.lambdas[j]) * (mu - model.sigmas[j]));
            out.d_w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -eta_tilde * lij;
            out.d_sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                -model.weights[j] * eta_tilde / (mu - model.sigmas[j]) * lij;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fit loops
// ---------------------------------------------------------------------------

namespace detail {

inline DataSet prepare_data(const DataSet& input, const FitConfig& cfg) {
    DataSet out;
    for (const auto& t : input) {
        if (cfg.real_mode && !(t.mu.imag() > 0.0)) {
            if (cfg.drop_nonpositive_imag) { continue; }
            throw DomainError("fit: real mode requires sample points with positive imaginary part");
        }
        DataTriple copy = t;
        switch (cfg.weighting) {
        case Weighting::unit: copy.eta = 1.0; break;
        case Weighting::relative:
            if (std::abs(copy.g) == 0.0) {
                throw DomainError("fit: relative weighting requires nonzero sample values");
            }
            copy.eta = 1.0 / std::abs(copy.g);
            break;
        case Weighting::as_given: break;
        }
        out.add(copy);
    }
    out.validate();
    return out;
}

/// sigma_k = c - i Im(lambda_k); if that lands on a sample point, push the
/// real part further left by 10% of |c| until clear.
inline Complex init_sigma(const FitConfig& cfg, Complex lambda_k, const DataSet& data) {
    Complex sigma(cfg.sigma_real, -lambda_k.imag());
    for (int attempt = 0; attempt < 64; ++attempt) {
        bool collides = false;
        for (const auto& t : data) {
            if (snaps_to(sigma, t.mu)) {
                collides = true;
                break;
            }
        }
        if (!collides) { break; }
        sigma.real(sigma.real() - 0.1 * std::abs(cfg.sigma_real));
    }
    return sigma;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::vector<Complex> to_std(const ComplexVector& v) { return {v.data(), v.data() + v.size()}; }

inline ComplexVector to_eigen(const std::vector<Complex>& v) {
    return Eigen::Map<const ComplexVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline void check_config(const FitConfig& cfg, bool second_order) {
    if (cfg.kmax < 1) { throw InvalidRange("fit: kmax must be at least 1"); }
    if (cfg.tol < 0.0) { throw InvalidRange("fit: tol must be nonnegative"); }
    if (second_order && !(cfg.sigma_real < 0.0)) {
        throw InvalidRange("fit: sigma_real must be negative");
    }
}

inline void check_sufficient(const DataSet& data, int iterations) {
    if (data.size() < static_cast<std::size_t>(iterations) + 1) {
        throw InsufficientData("fit: need at least kmax + 1 samples");
    }
}

} // namespace detail

inline UnstructuredFit fit_aaa(const DataSet& input, const FitConfig& cfg) {
    detail::check_config(cfg, false);
    const DataSet data = detail::prepare_data(input, cfg);
    const int iterations = cfg.aaa2 ? 2 * cfg.kmax : cfg.kmax;
    detail::check_sufficient(data, iterations);

    DataSet work = data;
    std::vector<std::size_t> orig_index(work.size());
    std::iota(orig_index.begin(), orig_index.end(), std::size_t{0});

    UnstructuredFit out;
    out.real_mode = cfg.real_mode;
    UnstructuredBarycentric model;

    for (int k = 1; k <= iterations; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::size_t pick = greedy_select(work, evaluator(model, cfg.real_mode));

        FitRecord rec;
        rec.k = k;
        rec.selected_index = orig_index[pick];
        orig_index.erase(orig_index.begin() + static_cast<std::ptrdiff_t>(pick));
        const DataTriple chosen = work.remove(pick);
        model.lambdas.push_back(chosen.mu);
        model.h_values.push_back(chosen.g);

        int rank = 0;
        if (!cfg.real_mode) {
            const ComplexMatrix L = loewner::build_unstructured(work, model.lambdas, model.h_values);
            const ComplexVector w =
                lsq::solve_weighted({L, lsq::g_vector(work), lsq::eta_vector(work)}, cfg.rank_tol, &rank);
            model.weights = detail::to_std(w);
            rec.objective = residual_linearized(work, model.lambdas, model.h_values, model.weights).squaredNorm();
        } else {
            model.weights = realification::solve_real_weights_unstructured(work, model.lambdas, model.h_values,
                                                                           cfg.rank_tol, &rank);
            const UnstructuredBarycentric aug = realification::augment(model);
            rec.objective = residual_linearized(work, aug.lambdas, aug.h_values, aug.weights).squaredNorm();
        }

        rec.rank = rank;
        rec.remaining = work.size();
        rec.realization_order = cfg.real_mode ? 2 * k : k;
        const metrics::ErrorReport rep = metrics::error_report(data, evaluator(model, cfg.real_mode));
        rec.l2_rel = rep.l2_rel;
        rec.linf_rel = rep.linf_rel;
        rec.ptw_max = rep.ptw_max;
        rec.seconds = detail::seconds_since(t0);

        out.trace.records.push_back(rec);
        out.iterates.push_back(model);
        if (cfg.on_iteration) { cfg.on_iteration(rec); }
        if (cfg.tol > 0.0 && rec.l2_rel < cfg.tol) { break; }
    }

    out.model = model;
    return out;
}

namespace detail {

struct SecondOrderStep {
    std::vector<Complex> sigmas;
    std::vector<Complex> weights;
    double objective = 0.0;
    int rank = 0;
    bool fallback = false;
};

// One SO-AAA iteration: variable projection over the quasi-support points
// with the weights recovered linearly. inner.max_iters = 0 degenerates to the
// linearized method.
inline SecondOrderStep so_step(const DataSet& work, const SecondOrderBarycentric& model, const FitConfig& cfg) {
    SecondOrderStep out;
    const std::vector<Complex>& lambdas = model.lambdas;
    const std::vector<Complex>& h = model.h_values;
    optim::NlsqOptions inner = cfg.inner;
    inner.rank_tol = cfg.rank_tol;

    if (!cfg.real_mode) {
        optim::VarProProblem vp;
        vp.residual_dim = static_cast<Eigen::Index>(work.size());
        vp.linear_dim = static_cast<Eigen::Index>(lambdas.size());
        vp.f = lsq::eta_vector(work).cwiseProduct(lsq::g_vector(work));
        vp.beta0 = detail::to_eigen(model.sigmas);
        vp.psi = [&work, &lambdas, &h](const ComplexVector& beta) -> ComplexMatrix {
            const std::vector<Complex> sig = detail::to_std(beta);
            ComplexMatrix psi = -loewner::build_so(work, lambdas, h, sig);
            for (std::size_t i = 0; i < work.size(); ++i) {
                psi.row(static_cast<Eigen::Index>(i)) *= work[i].eta;
            }
            return psi;
        };
        vp.psi_dcol = [&work, &lambdas, &h](const ComplexVector& beta) -> ComplexMatrix {
            const std::vector<Complex> sig = detail::to_std(beta);
            const ComplexMatrix L = loewner::build_so(work, lambdas, h, sig);
            return jacobian_separable(work, sig, L);
        };
        const optim::VarProResult res = optim::varpro_minimize(vp, inner);
        out.sigmas = detail::to_std(res.beta);
        out.weights = detail::to_std(res.alpha);
        out.objective = res.objective;
        out.rank = res.rank;
        out.fallback = !(res.objective < res.objective_history.front());
    } else {
        optim::RealVarProProblem vp;
        vp.residual_dim = static_cast<Eigen::Index>(2 * work.size());
        vp.linear_dim = static_cast<Eigen::Index>(2 * lambdas.size());
        vp.f = lsq::eta_real_vector(work).cwiseProduct(lsq::g_real_vector(work));
        vp.theta0 = optim::realify(detail::to_eigen(model.sigmas));
        vp.psi = [&work, &lambdas, &h](const RealVector& theta) -> RealMatrix {
            const std::vector<Complex> sig = detail::to_std(optim::unrealify(theta));
            RealMatrix psi = loewner::build_real_so(work, lambdas, h, sig);
            for (std::size_t i = 0; i < work.size(); ++i) {
                psi.row(static_cast<Eigen::Index>(2 * i)) *= work[i].eta;
                psi.row(static_cast<Eigen::Index>(2 * i + 1)) *= work[i].eta;
            }
            return psi;
        };
        vp.dpsi = [&work, &lambdas, &h](const RealVector& theta, Eigen::Index q) -> RealMatrix {
            const std::vector<Complex> sig = detail::to_std(optim::unrealify(theta));
            return realification::so_real_psi_derivative(work, lambdas, h, sig, q);
        };
        const optim::RealVarProResult res = optim::varpro_minimize_real(vp, inner);
        out.sigmas = detail::to_std(optim::unrealify(res.theta));
        out.weights = lsq::deinterleave(res.alpha);
        out.objective = res.objective;
        out.rank = res.rank;
        out.fallback = !(res.objective < res.objective_history.front());
    }
    return out;
}

// Linearized step: quasi-support points stay where initialized, one weighted
// least-squares solve.
inline SecondOrderStep lso_step(const DataSet& work, const SecondOrderBarycentric& model, const FitConfig& cfg) {
    SecondOrderStep out;
    out.sigmas = model.sigmas;
    if (!cfg.real_mode) {
        const ComplexMatrix L = loewner::build_so(work, model.lambdas, model.h_values, model.sigmas);
        const ComplexVector w =
            lsq::solve_weighted({L, lsq::g_vector(work), lsq::eta_vector(work)}, cfg.rank_tol, &out.rank);
        out.weights = detail::to_std(w);
        out.objective =
            residual_separable(work, model.lambdas, model.h_values, model.sigmas, out.weights).squaredNorm();
    } else {
        out.weights = realification::solve_real_weights_so(work, model.lambdas, model.h_values, model.sigmas,
                                                           cfg.rank_tol, &out.rank);
        SecondOrderBarycentric filled = model;
        filled.weights = out.weights;
        const SecondOrderBarycentric aug = realification::augment(filled);
        out.objective =
            residual_separable(work, aug.lambdas, aug.h_values, aug.sigmas, aug.weights).squaredNorm();
    }
    return out;
}

// Fully nonlinear step over the joint parameter vector [w; sigma], warm
// started, with the linearized solution as a safety net.
inline SecondOrderStep nso_step(const DataSet& work, const SecondOrderBarycentric& model, const FitConfig& cfg) {
    const std::size_t k = model.order();
    const std::vector<Complex>& lambdas = model.lambdas;
    const std::vector<Complex>& h = model.h_values;
    optim::NlsqOptions inner = cfg.inner;
    inner.rank_tol = cfg.rank_tol;

    auto split = [k](const ComplexVector& z) {
        std::vector<Complex> w(k), sig(k);
        for (std::size_t j = 0; j < k; ++j) {
            w[j] = z(static_cast<Eigen::Index>(j));
            sig[j] = z(static_cast<Eigen::Index>(j + k));
        }
        return std::make_pair(w, sig);
    };
    auto assemble = [&](const std::vector<Complex>& w, const std::vector<Complex>& sig) {
        SecondOrderBarycentric m = model;
        m.weights = w;
        m.sigmas = sig;
        return m;
    };

    optim::NlsqProblem problem;
    problem.param_dim = static_cast<Eigen::Index>(2 * k);
    problem.residual_dim = static_cast<Eigen::Index>(cfg.real_mode ? 2 * work.size() : work.size());
    if (!cfg.real_mode) {
        problem.residual = [&, split, assemble](const ComplexVector& z) -> ComplexVector {
            const auto [w, sig] = split(z);
            return residual_nonlinear_smooth(work, assemble(w, sig));
        };
        problem.jacobian = [&, split, assemble](const ComplexVector& z) -> ComplexMatrix {
            const auto [w, sig] = split(z);
            const NonlinearJacobians jac = jacobians_nonlinear(work, assemble(w, sig));
            ComplexMatrix J(jac.d_w.rows(), 2 * jac.d_w.cols());
            J << jac.d_w, jac.d_sigma;
            return J;
        };
    } else {
        problem.residual = [&, split](const ComplexVector& z) -> ComplexVector {
            const auto [w, sig] = split(z);
            return realification::residual_nonlinear_real(work, lambdas, h, sig, w);
        };
        problem.jacobian = [&, split](const ComplexVector& z) -> ComplexMatrix {
            const auto [w, sig] = split(z);
            const auto jac = realification::jacobians_nonlinear_real(work, lambdas, h, sig, w);
            ComplexMatrix J(jac.d_w.rows(), 2 * jac.d_w.cols());
            J << jac.d_w, jac.d_sigma;
            return J;
        };
        problem.conj_jacobian = [&, split](const ComplexVector& z) -> ComplexMatrix {
            const auto [w, sig] = split(z);
            const auto jac = realification::jacobians_nonlinear_real(work, lambdas, h, sig, w);
            ComplexMatrix J(jac.d_w_conj.rows(), 2 * jac.d_w_conj.cols());
            J << jac.d_w_conj, jac.d_sigma_conj;
            return J;
        };
    }

    ComplexVector z0(2 * k);
    for (std::size_t j = 0; j < k; ++j) {
        z0(static_cast<Eigen::Index>(j)) = model.weights[j];
        z0(static_cast<Eigen::Index>(j + k)) = model.sigmas[j];
    }
    const optim::NlsqResult res = optim::minimize_nlsq(problem, z0, inner);
    const double scale = cfg.real_mode ? 0.5 : 1.0; // augmented rows count every sample twice

    if (inner.max_iters <= 0) {
        // keep the warm-started initialization untouched
        SecondOrderStep out;
        out.weights = model.weights;
        out.sigmas = model.sigmas;
        out.objective = scale * res.objective;
        return out;
    }

    // Linearized candidate at the initialization, judged by the same
    // nonlinear objective.
    SecondOrderStep lin = lso_step(work, model, cfg);
    ComplexVector z_lin(2 * k);
    for (std::size_t j = 0; j < k; ++j) {
        z_lin(static_cast<Eigen::Index>(j)) = lin.weights[j];
        z_lin(static_cast<Eigen::Index>(j + k)) = lin.sigmas[j];
    }
    const double lin_objective = problem.residual(z_lin).squaredNorm();

    SecondOrderStep out;
    if (lin_objective < res.objective) {
        out.sigmas = lin.sigmas;
        out.weights = lin.weights;
        out.objective = scale * lin_objective;
        out.fallback = true;
    } else {
        const auto [w, sig] = split(res.params);
        out.weights = w;
        out.sigmas = sig;
        out.objective = scale * res.objective;
        out.fallback = false;
    }
    return out;
}

inline SecondOrderFit fit_second_order(const DataSet& input, const FitConfig& cfg, Method method) {
    check_config(cfg, true);
    const DataSet data = prepare_data(input, cfg);
    check_sufficient(data, cfg.kmax);

    DataSet work = data;
    std::vector<std::size_t> orig_index(work.size());
    std::iota(orig_index.begin(), orig_index.end(), std::size_t{0});

    SecondOrderFit out;
    out.real_mode = cfg.real_mode;
    SecondOrderBarycentric model;

    for (int k = 1; k <= cfg.kmax; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::size_t pick = greedy_select(work, evaluator(model, cfg.real_mode));

        FitRecord rec;
        rec.k = k;
        rec.selected_index = orig_index[pick];
        orig_index.erase(orig_index.begin() + static_cast<std::ptrdiff_t>(pick));
        const DataTriple chosen = work.remove(pick);
        model.lambdas.push_back(chosen.mu);
        model.h_values.push_back(chosen.g);
        model.sigmas.push_back(init_sigma(cfg, chosen.mu, data));
        model.weights.push_back(Complex(-1.0, 0.0)); // placeholder until the solve below

        SecondOrderStep step;
        switch (method) {
        case Method::so: step = so_step(work, model, cfg); break;
        case Method::lso: step = lso_step(work, model, cfg); break;
        case Method::nso: step = nso_step(work, model, cfg); break;
        case Method::aaa: throw Error("fit_second_order: unstructured method");
        }
        model.sigmas = step.sigmas;
        model.weights = step.weights;

        rec.objective = step.objective;
        rec.rank = step.rank;
        rec.fallback = step.fallback;
        rec.remaining = work.size();
        rec.realization_order = cfg.real_mode ? 2 * k : k;
        const metrics::ErrorReport rep = metrics::error_report(data, evaluator(model, cfg.real_mode));
        rec.l2_rel = rep.l2_rel;
        rec.linf_rel = rep.linf_rel;
        rec.ptw_max = rep.ptw_max;
        rec.seconds = seconds_since(t0);

        out.trace.records.push_back(rec);
        out.iterates.push_back(model);
        if (cfg.on_iteration) { cfg.on_iteration(rec); }
        if (cfg.tol > 0.0 && rec.l2_rel < cfg.tol) { break; }
    }

    out.model = model;
    return out;
}

} // namespace detail

/// Separable second-order fit: quasi-support points optimized by variable
/// projection, weights recovered linearly.
inline SecondOrderFit fit_so_aaa(const DataSet& data, const FitConfig& cfg) {
    return detail::fit_second_order(data, cfg, Method::so);
}

/// Linearized second-order fit: quasi-support points frozen at initialization.
inline SecondOrderFit fit_lso_aaa(const DataSet& data, const FitConfig& cfg) {
    return detail::fit_second_order(data, cfg, Method::lso);
}

/// Fully nonlinear second-order fit over weights and quasi-support points.
inline SecondOrderFit fit_nso_aaa(const DataSet& data, const FitConfig& cfg) {
    return detail::fit_second_order(data, cfg, Method::nso);
}

} // namespace algorithms
} // namespace baryfit
