// types.hpp
// Core value types: frequency-domain samples, barycentric rational models
// (unstructured and second-order), fit traces, and the error hierarchy.

#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace baryfit {

using Complex = std::complex<double>;

inline constexpr Complex imag_unit{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PoleHit : Error {
    using Error::Error;
};
struct DivisionByZero : Error {
    using Error::Error;
};
struct ShapeMismatch : Error {
    using Error::Error;
};
struct NonFiniteInput : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct EmptyDataSet : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};
struct SingularShift : Error {
    using Error::Error;
};
struct InvalidRange : Error {
    using Error::Error;
};
struct EmptyInput : Error {
    using Error::Error;
};
struct NonFiniteResidual : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

/// One frequency-domain sample: point mu, value g, positive weight eta.
struct DataTriple {
    Complex mu;
    Complex g;
    double eta = 1.0;
};

/// Ordered collection of samples. Removal keeps the index set contiguous;
/// row order is part of the contract (greedy tie-breaking depends on it).
class DataSet {
  public:
    DataSet() = default;

    explicit DataSet(std::vector<DataTriple> triples) : triples_(std::move(triples)) { validate(); }

    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }

    const DataTriple& operator[](std::size_t i) const { return triples_[i]; }

    void add(const DataTriple& t) {
        if (!(t.eta > 0.0)) { throw DomainError("DataSet: sample weight eta must be positive"); }
        triples_.push_back(t);
    }

    /// Removes the i-th sample and returns it; remaining samples keep order.
    DataTriple remove(std::size_t i) {
        if (i >= triples_.size()) { throw ShapeMismatch("DataSet::remove: index out of range"); }
        DataTriple t = triples_[i];
        triples_.erase(triples_.begin() + static_cast<std::ptrdiff_t>(i));
        return t;
    }

    /// Checks eta > 0 and pairwise-distinct sample points.
    void validate() const {
        for (const auto& t : triples_) {
            if (!(t.eta > 0.0)) { throw DomainError("DataSet: sample weight eta must be positive"); }
            if (!std::isfinite(t.mu.real()) || !std::isfinite(t.mu.imag()) || !std::isfinite(t.g.real()) ||
                !std::isfinite(t.g.imag()) || !std::isfinite(t.eta)) {
                throw NonFiniteInput("DataSet: non-finite sample");
            }
        }
        std::vector<Complex> mus;
        mus.reserve(triples_.size());
        for (const auto& t : triples_) { mus.push_back(t.mu); }
        std::sort(mus.begin(), mus.end(), [](Complex a, Complex b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        for (std::size_t i = 1; i < mus.size(); ++i) {
            if (mus[i] == mus[i - 1]) { throw DomainError("DataSet: sample points must be pairwise distinct"); }
        }
    }

    auto begin() const { return triples_.begin(); }
    auto end() const { return triples_.end(); }

    const std::vector<DataTriple>& triples() const { return triples_; }

  private:
    std::vector<DataTriple> triples_;
};

// ---------------------------------------------------------------------------
// Barycentric models
// ---------------------------------------------------------------------------

/// Degree-k strictly proper rational function in barycentric form:
///   H(s) = sum_j h_j w_j / (s - lambda_j)  /  (1 + sum_j w_j / (s - lambda_j)).
/// Interpolates h_j at lambda_j whenever w_j != 0 (analytic continuation).
struct UnstructuredBarycentric {
    std::vector<Complex> lambdas;
    std::vector<Complex> h_values;
    std::vector<Complex> weights;

    std::size_t order() const { return lambdas.size(); }

    bool has_zero_weights() const {
        return std::any_of(weights.begin(), weights.end(), [](Complex w) { return w == Complex(0.0, 0.0); });
    }

    void validate() const {
        if (h_values.size() != lambdas.size() || weights.size() != lambdas.size()) {
            throw ShapeMismatch("UnstructuredBarycentric: parameter lists must share length");
        }
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
                if (lambdas[i] == lambdas[j]) {
                    throw DomainError("UnstructuredBarycentric: support points must be pairwise distinct");
                }
            }
        }
    }
};

/// Degree-2k rational function in second-order barycentric form:
///   H(s) = sum_j h_j w_j / ((s - lambda_j)(s - sigma_j))
///          / (1 + sum_j w_j / ((s - lambda_j)(s - sigma_j))).
/// Interpolates h_j both at lambda_j and at the quasi-support point sigma_j.
struct SecondOrderBarycentric {
    std::vector<Complex> lambdas;
    std::vector<Complex> h_values;
    std::vector<Complex> weights;
    std::vector<Complex> sigmas;

    std::size_t order() const { return lambdas.size(); }

    bool has_zero_weights() const {
        return std::any_of(weights.begin(), weights.end(), [](Complex w) { return w == Complex(0.0, 0.0); });
    }

    void validate() const {
        if (h_values.size() != lambdas.size() || weights.size() != lambdas.size() ||
            sigmas.size() != lambdas.size()) {
            throw ShapeMismatch("SecondOrderBarycentric: parameter lists must share length");
        }
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            if (lambdas[i] == sigmas[i]) {
                throw DomainError("SecondOrderBarycentric: lambda_j and sigma_j must differ");
            }
            for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
                if (lambdas[i] == lambdas[j]) {
                    throw DomainError("SecondOrderBarycentric: support points must be pairwise distinct");
                }
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// s counts as hitting the reference point when within this absolute distance.
inline double snap_tolerance(Complex ref) { return 1e-14 * std::max(1.0, std::abs(ref)); }

inline bool snaps_to(Complex s, Complex ref) { return std::abs(s - ref) <= snap_tolerance(ref); }

namespace detail {

// Ratio of the partial-fraction sums with term `skip` excluded; used to
// evaluate models exactly at a support point whose weight is zero.
inline Complex eval_excluding(const std::vector<Complex>& lambdas, const std::vector<Complex>& h,
                              const std::vector<Complex>& w, const std::vector<Complex>* sigmas, Complex s,
                              std::size_t skip) {
    Complex num(0.0, 0.0);
    Complex den(1.0, 0.0);
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        if (j == skip) { continue; }
        Complex d = s - lambdas[j];
        if (sigmas) { d *= s - (*sigmas)[j]; }
        num += h[j] * w[j] / d;
        den += w[j] / d;
    }
    if (den == Complex(0.0, 0.0)) { throw PoleHit("barycentric evaluation hit a pole"); }
    return num / den;
}

inline Complex eval_barycentric(const std::vector<Complex>& lambdas, const std::vector<Complex>& h,
                                const std::vector<Complex>& w, const std::vector<Complex>* sigmas, Complex s) {
    const std::size_t k = lambdas.size();
    if (k == 0) { return Complex(0.0, 0.0); }
    for (std::size_t j = 0; j < k; ++j) {
        const bool hit = snaps_to(s, lambdas[j]) || (sigmas && snaps_to(s, (*sigmas)[j]));
        if (hit) {
            if (w[j] != Complex(0.0, 0.0)) { return h[j]; }
            return eval_excluding(lambdas, h, w, sigmas, s, j);
        }
    }
    Complex num(0.0, 0.0);
    Complex den(1.0, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        Complex d = s - lambdas[j];
        if (sigmas) { d *= s - (*sigmas)[j]; }
        num += h[j] * w[j] / d;
        den += w[j] / d;
    }
    if (den == Complex(0.0, 0.0)) { throw PoleHit("barycentric evaluation hit a pole"); }
    return num / den;
}

} // namespace detail

/// Evaluates the barycentric form; returns h_j at (snapped) support points,
/// 0 for the empty model. Throws PoleHit when the denominator vanishes.
inline Complex eval_unstructured(const UnstructuredBarycentric& m, Complex s) {
    return detail::eval_barycentric(m.lambdas, m.h_values, m.weights, nullptr, s);
}

/// Evaluates the second-order form; returns h_j at lambda_j and at sigma_j.
inline Complex eval_second_order(const SecondOrderBarycentric& m, Complex s) {
    return detail::eval_barycentric(m.lambdas, m.h_values, m.weights, &m.sigmas, s);
}

/// Expands each quadratic term into partial fractions, giving the equivalent
/// order-2k unstructured form with supports {lambda_j} ∪ {sigma_j} and
/// weights w_j/(lambda_j - sigma_j) paired with their negatives.
inline UnstructuredBarycentric to_unstructured(const SecondOrderBarycentric& m) {
    m.validate();
    const std::size_t k = m.order();
    UnstructuredBarycentric out;
    out.lambdas.reserve(2 * k);
    out.h_values.reserve(2 * k);
    out.weights.reserve(2 * k);
    for (std::size_t j = 0; j < k; ++j) {
        const Complex what = m.weights[j] / (m.lambdas[j] - m.sigmas[j]);
        out.lambdas.push_back(m.lambdas[j]);
        out.h_values.push_back(m.h_values[j]);
        out.weights.push_back(what);
    }
    for (std::size_t j = 0; j < k; ++j) {
        out.lambdas.push_back(m.sigmas[j]);
        out.h_values.push_back(m.h_values[j]);
        out.weights.push_back(-m.weights[j] / (m.lambdas[j] - m.sigmas[j]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fit traces
// ---------------------------------------------------------------------------

/// One completed greedy iteration.
struct FitRecord {
    int k = 0;                      // iteration = barycentric order
    int realization_order = 0;      // state-space dimension (2k in real mode)
    std::size_t selected_index = 0; // index into the original data set
    double objective = 0.0;         // squared norm of the method's own residual
    double l2_rel = 0.0;            // weighted relative errors over the full data
    double linf_rel = 0.0;
    double ptw_max = 0.0;
    double seconds = 0.0;
    int rank = 0;                   // effective rank of the weight solve
    bool fallback = false;          // inner optimization replaced by linear solve
    std::size_t remaining = 0;      // samples left in the working set
};

struct FitTrace {
    std::vector<FitRecord> records;

    bool empty() const { return records.empty(); }
    std::size_t size() const { return records.size(); }
};

} // namespace baryfit
