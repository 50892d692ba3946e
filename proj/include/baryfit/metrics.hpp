// metrics.hpp
// Weighted error vectors, relative L2 / Linf / pointwise errors, and the
// MORscore summary of an error-versus-order curve.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "baryfit/loewner.hpp"
#include "baryfit/types.hpp"

namespace baryfit {
namespace metrics {

struct ErrorReport {
    RealVector eps_vector; // eta_i |H(mu_i) - g_i|
    double l2_rel = 0.0;
    double linf_rel = 0.0;
    double ptw_max = 0.0;
    bool ptw_has_zero_data = false; // some g_i = 0; ptw_max reported as infinity
};

/// Errors of a model evaluator against every sample in the data set.
inline ErrorReport error_report(const DataSet& data, const std::function<Complex(Complex)>& model) {
    const auto m = static_cast<Eigen::Index>(data.size());
    ErrorReport out;
    out.eps_vector.resize(m);
    RealVector g_eta(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& t = data[static_cast<std::size_t>(i)];
        out.eps_vector(i) = t.eta * std::abs(model(t.mu) - t.g);
        g_eta(i) = t.eta * std::abs(t.g);
    }
    out.l2_rel = g_eta.norm() > 0.0 ? out.eps_vector.norm() / g_eta.norm() : out.eps_vector.norm();
    const double ginf = g_eta.size() > 0 ? g_eta.maxCoeff() : 0.0;
    const double einf = out.eps_vector.size() > 0 ? out.eps_vector.maxCoeff() : 0.0;
    out.linf_rel = ginf > 0.0 ? einf / ginf : einf;
    out.ptw_max = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (g_eta(i) == 0.0) {
            if (out.eps_vector(i) > 0.0) {
                out.ptw_has_zero_data = true;
                out.ptw_max = std::numeric_limits<double>::infinity();
            }
            continue;
        }
        out.ptw_max = std::max(out.ptw_max, out.eps_vector(i) / g_eta(i));
    }
    return out;
}

/// Error-per-order curve with the bookkeeping needed to normalize it.
struct MorscoreInput {
    std::vector<int> orders;    // strictly increasing
    std::vector<double> errors; // one per order
    int kmax = 0;
    double eps_min = 1e-8;
};

/// Area below the normalized error curve: order maps to k/kmax, error maps to
/// log10(err)/floor(log10(eps_min)) after clamping to [eps_min, 1]. The curve
/// extends left of the first order at its first value; integration is
/// trapezoidal. Result lies in [0, 1].
inline double morscore(const MorscoreInput& in) {
    if (in.orders.empty() || in.orders.size() != in.errors.size()) {
        throw EmptyInput("morscore: need matching, nonempty orders and errors");
    }
    if (!(in.eps_min > 0.0) || in.kmax < 1) { throw InvalidRange("morscore: eps_min > 0 and kmax >= 1 required"); }
    for (std::size_t i = 1; i < in.orders.size(); ++i) {
        if (in.orders[i] <= in.orders[i - 1]) { throw InvalidRange("morscore: orders must be strictly increasing"); }
    }
    const double denom = std::floor(std::log10(in.eps_min));
    auto phi_eps = [&](double e) {
        e = std::clamp(e, in.eps_min, 1.0);
        return std::log10(e) / denom;
    };
    auto phi_k = [&](int k) { return static_cast<double>(k) / static_cast<double>(in.kmax); };

    double area = phi_k(in.orders.front()) * phi_eps(in.errors.front());
    for (std::size_t i = 1; i < in.orders.size(); ++i) {
        const double dk = phi_k(in.orders[i]) - phi_k(in.orders[i - 1]);
        area += 0.5 * dk * (phi_eps(in.errors[i]) + phi_eps(in.errors[i - 1]));
    }
    return area + 0.0; // normalizes a signed zero from log10(1)/negative
}

/// (order, squared residual norm) pairs from a finished fit; the objective
/// stored per record is the method's own residual definition.
inline std::vector<std::pair<int, double>> objective_trace(const FitTrace& trace) {
    std::vector<std::pair<int, double>> out;
    out.reserve(trace.records.size());
    for (const auto& rec : trace.records) { out.emplace_back(rec.realization_order, rec.objective); }
    return out;
}

} // namespace metrics
} // namespace baryfit
