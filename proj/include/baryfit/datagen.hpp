// datagen.hpp
// Deterministic synthetic ground truth: random stable first- and second-order
// systems plus frequency-response samplers. These are the oracles of the
// recovery tests and the benchmark generator behind the CLI.

#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>

#include "baryfit/statespace.hpp"
#include "baryfit/types.hpp"

namespace baryfit {
namespace datagen {

struct GenOptions {
    double freq_min = 1e1;     // resonance band, rad/s
    double freq_max = 1e3;
    double damping_min = 0.01;
    double damping_max = 0.5;
    bool real = true;          // real matrices (conjugate-symmetric response)
    double far_pole = 1e5;     // complex modes pair each resonance with a heavily
                               // damped pole of roughly this magnitude
    double magnitude_floor = 1e-12; // samples below this are dropped in relative mode
};

struct SyntheticSystem {
    std::optional<statespace::FirstOrderRealization> first_order;
    std::optional<statespace::SecondOrderRealization> second_order;
    std::uint64_t seed = 0;
    std::vector<Complex> poles;

    Complex eval(Complex s) const {
        if (second_order) { return statespace::eval_realization(*second_order, s); }
        if (first_order) { return statespace::eval_realization(*first_order, s); }
        throw EmptyInput("SyntheticSystem: no realization");
    }
};

namespace detail {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

inline RealMatrix random_orthogonal(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    RealMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) { g(i, j) = gauss(rng); }
    }
    const Eigen::HouseholderQR<RealMatrix> qr(g);
    RealMatrix q = qr.householderQ();
    const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) { q.col(j) = -q.col(j); }
    }
    return q;
}

inline std::vector<Complex> quadratic_roots(Complex d, Complex k) {
    // s^2 + d s + k
    const Complex disc = std::sqrt(d * d - 4.0 * k);
    return {(-d + disc) / 2.0, (-d - disc) / 2.0};
}

} // namespace detail

/// Wraps explicit second-order matrices (M = I implied identity scaling is
/// not required; any nonsingular M works for evaluation).
inline SyntheticSystem make_second_order(const ComplexMatrix& M, const ComplexMatrix& D, const ComplexMatrix& K,
                                         const ComplexVector& b, const ComplexVector& c, bool is_real = false) {
    SyntheticSystem sys;
    statespace::SecondOrderRealization r;
    r.is_real = is_real;
    r.M = M;
    r.D = D;
    r.K = K;
    r.b = b;
    r.c = c;
    sys.second_order = r;
    // poles from the linearized pencil
    const Eigen::Index n = M.rows();
    ComplexMatrix pencil = ComplexMatrix::Zero(2 * n, 2 * n);
    pencil.topRightCorner(n, n) = ComplexMatrix::Identity(n, n);
    const Eigen::FullPivLU<ComplexMatrix> lu(M);
    pencil.bottomLeftCorner(n, n) = -lu.solve(K);
    pencil.bottomRightCorner(n, n) = -lu.solve(D);
    Eigen::ComplexEigenSolver<ComplexMatrix> eig(pencil, false);
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) { sys.poles.push_back(eig.eigenvalues()(i)); }
    return sys;
}

/// Random stable order-k second-order system, deterministic per seed. Modal
/// frequencies are log-uniform in the requested band, damping ratios uniform;
/// in real mode the diagonal modal system is mixed by a random orthogonal
/// congruence, keeping D and K symmetric positive definite.
inline SyntheticSystem gen_second_order(int k, std::uint64_t seed, const GenOptions& opts = {}) {
    if (k < 1) { throw InvalidRange("gen_second_order: order must be at least 1"); }
    if (!(opts.freq_min > 0.0) || !(opts.freq_max > opts.freq_min) || !(opts.damping_min > 0.0) ||
        !(opts.damping_max >= opts.damping_min)) {
        throw InvalidRange("gen_second_order: bad frequency or damping range");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> zeta(opts.damping_min, opts.damping_max);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const auto n = static_cast<Eigen::Index>(k);
    SyntheticSystem sys;
    sys.seed = seed;

    if (opts.real) {
        // One resonance per logarithmic sub-band keeps the peaks separated,
        // matching the response shapes of lightly damped structures.
        std::uniform_real_distribution<double> offset(0.15, 0.85);
        const double lo = std::log(opts.freq_min);
        const double hi = std::log(opts.freq_max);
        RealVector d(n), kappa(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double t = (static_cast<double>(j) + offset(rng)) / static_cast<double>(k);
            const double omega = std::exp(lo + (hi - lo) * t);
            const double z = zeta(rng);
            d(j) = 2.0 * z * omega;
            kappa(j) = omega * omega;
        }
        const RealMatrix q = detail::random_orthogonal(rng, n);
        RealVector b(n), c(n);
        for (Eigen::Index j = 0; j < n; ++j) { b(j) = gauss(rng); }
        for (Eigen::Index j = 0; j < n; ++j) { c(j) = gauss(rng); }
        const RealMatrix D = q * d.asDiagonal() * q.transpose();
        const RealMatrix K = q * kappa.asDiagonal() * q.transpose();
        sys = make_second_order(ComplexMatrix::Identity(n, n), D.cast<Complex>(), K.cast<Complex>(),
                                b.cast<Complex>(), c.cast<Complex>(), true);
    } else {
        // Each complex mode couples an underdamped resonance in the band with
        // a heavily damped pole far in the left half-plane, the pole pattern
        // of frequency-dependent damping.
        std::uniform_real_distribution<double> jitter(-0.3, 0.3);
        const double io_scale = std::sqrt(opts.far_pole);
        ComplexVector d(n), kappa(n), b(n), c(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double omega = detail::log_uniform(rng, opts.freq_min, opts.freq_max);
            const double z = zeta(rng);
            const Complex p1(-z * omega, omega * std::sqrt(1.0 - z * z));
            const Complex p2(-opts.far_pole * (1.0 + jitter(rng)), -omega * (1.0 + jitter(rng)));
            d(j) = -(p1 + p2);
            kappa(j) = p1 * p2;
        }
        for (Eigen::Index j = 0; j < n; ++j) { b(j) = Complex(gauss(rng), gauss(rng)) * io_scale; }
        for (Eigen::Index j = 0; j < n; ++j) { c(j) = Complex(gauss(rng), gauss(rng)) * io_scale; }
        sys = make_second_order(ComplexMatrix::Identity(n, n), ComplexMatrix(d.asDiagonal()),
                                ComplexMatrix(kappa.asDiagonal()), b, c, false);
    }
    sys.seed = seed;
    return sys;
}

/// Random stable order-k first-order system (strictly proper degree-k
/// rational function). Real mode pairs poles and residues conjugately, with
/// one real pole when k is odd.
inline SyntheticSystem gen_first_order(int k, std::uint64_t seed, const GenOptions& opts = {}) {
    if (k < 1) { throw InvalidRange("gen_first_order: order must be at least 1"); }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> zeta(opts.damping_min, opts.damping_max);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Complex> poles;
    std::vector<Complex> residues;
    if (opts.real) {
        int remaining = k;
        if (k % 2 == 1) {
            poles.emplace_back(-detail::log_uniform(rng, opts.freq_min, opts.freq_max), 0.0);
            residues.emplace_back(gauss(rng), 0.0);
            --remaining;
        }
        for (int j = 0; j < remaining / 2; ++j) {
            const double omega = detail::log_uniform(rng, opts.freq_min, opts.freq_max);
            const double z = zeta(rng);
            const Complex p(-z * omega, omega * std::sqrt(1.0 - z * z));
            const Complex r(gauss(rng), gauss(rng));
            poles.push_back(p);
            residues.push_back(r);
            poles.push_back(std::conj(p));
            residues.push_back(std::conj(r));
        }
    } else {
        for (int j = 0; j < k; ++j) {
            const double omega = detail::log_uniform(rng, opts.freq_min, opts.freq_max);
            const double z = zeta(rng);
            poles.emplace_back(-z * omega, omega * std::sqrt(1.0 - z * z));
            residues.emplace_back(gauss(rng), gauss(rng));
        }
    }

    const auto n = static_cast<Eigen::Index>(poles.size());
    SyntheticSystem sys;
    sys.seed = seed;
    statespace::FirstOrderRealization r;
    r.is_real = false;
    r.E = ComplexMatrix::Identity(n, n);
    r.A = ComplexMatrix::Zero(n, n);
    r.b = ComplexVector::Ones(n);
    r.c.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        r.A(j, j) = poles[static_cast<std::size_t>(j)];
        r.c(j) = residues[static_cast<std::size_t>(j)];
    }
    sys.first_order = r;
    sys.poles = poles;
    return sys;
}

/// Logarithmically spaced points i*omega on the imaginary axis.
inline std::vector<Complex> log_grid_imag(double omega_min, double omega_max, int n) {
    if (!(omega_min > 0.0) || !(omega_max > omega_min) || n < 2) {
        throw InvalidRange("log_grid_imag: bad grid parameters");
    }
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    const double l0 = std::log10(omega_min);
    const double l1 = std::log10(omega_max);
    for (int i = 0; i < n; ++i) {
        const double w = std::pow(10.0, l0 + (l1 - l0) * i / (n - 1));
        out.emplace_back(0.0, w);
    }
    return out;
}

/// Linearly spaced points i*omega on the imaginary axis.
inline std::vector<Complex> linear_grid_imag(double omega_min, double omega_max, int n) {
    if (!(omega_max > omega_min) || n < 2) { throw InvalidRange("linear_grid_imag: bad grid parameters"); }
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.emplace_back(0.0, omega_min + (omega_max - omega_min) * i / (n - 1));
    }
    return out;
}

enum class SampleWeighting { unit, relative };

/// Samples g_i = H(mu_i) and attaches weights: unit, or relative
/// (eta_i = 1/|g_i|, dropping samples below the magnitude floor).
inline DataSet sample_frequency_response(const SyntheticSystem& sys, const std::vector<Complex>& points,
                                         SampleWeighting weighting = SampleWeighting::unit,
                                         double magnitude_floor = 1e-12) {
    DataSet out;
    for (const Complex& mu : points) {
        const Complex g = sys.eval(mu);
        if (weighting == SampleWeighting::relative) {
            if (std::abs(g) < magnitude_floor) { continue; }
            out.add({mu, g, 1.0 / std::abs(g)});
        } else {
            out.add({mu, g, 1.0});
        }
    }
    out.validate();
    return out;
}

} // namespace datagen
} // namespace baryfit
