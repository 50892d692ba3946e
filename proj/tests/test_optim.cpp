#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <baryfit/optim.hpp>

using namespace baryfit;

namespace {

std::mt19937 rng(20240915);

Complex rc(double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng)};
}

optim::NlsqProblem linear_problem(const ComplexMatrix& A, const ComplexVector& b) {
    optim::NlsqProblem p;
    p.param_dim = A.cols();
    p.residual_dim = A.rows();
    p.residual = [A, b](const ComplexVector& z) -> ComplexVector { return A * z - b; };
    p.jacobian = [A](const ComplexVector&) -> ComplexMatrix { return A; };
    return p;
}

} // namespace

TEST_CASE("scalar roots") {
    SECTION("real shift") {
        optim::NlsqProblem p;
        p.param_dim = 1;
        p.residual_dim = 1;
        p.residual = [](const ComplexVector& z) -> ComplexVector {
            return ComplexVector::Constant(1, z(0) - Complex(1, 0));
        };
        p.jacobian = [](const ComplexVector&) -> ComplexMatrix { return ComplexMatrix::Ones(1, 1); };
        const auto res = optim::minimize_nlsq(p, ComplexVector::Zero(1));
        CHECK(std::abs(res.params(0) - Complex(1, 0)) < 1e-10);
        CHECK(res.objective < 1e-20);
    }
    SECTION("complex shift") {
        optim::NlsqProblem p;
        p.param_dim = 1;
        p.residual_dim = 1;
        p.residual = [](const ComplexVector& z) -> ComplexVector {
            return ComplexVector::Constant(1, z(0) - Complex(1, 1));
        };
        p.jacobian = [](const ComplexVector&) -> ComplexMatrix { return ComplexMatrix::Ones(1, 1); };
        const auto res = optim::minimize_nlsq(p, ComplexVector::Zero(1));
        CHECK(std::abs(res.params(0) - Complex(1, 1)) < 1e-10);
    }
    SECTION("square root of two") {
        optim::NlsqProblem p;
        p.param_dim = 1;
        p.residual_dim = 1;
        p.residual = [](const ComplexVector& z) -> ComplexVector {
            return ComplexVector::Constant(1, z(0) * z(0) - Complex(2, 0));
        };
        p.jacobian = [](const ComplexVector& z) -> ComplexMatrix {
            return ComplexMatrix::Constant(1, 1, 2.0 * z(0));
        };
        const auto res = optim::minimize_nlsq(p, ComplexVector::Ones(1));
        CHECK(std::abs(res.params(0) - Complex(std::sqrt(2.0), 0)) < 1e-8);
    }
}

TEST_CASE("accepted objectives never increase") {
    // Rosenbrock-flavored complex residual
    optim::NlsqProblem p;
    p.param_dim = 2;
    p.residual_dim = 2;
    p.residual = [](const ComplexVector& z) -> ComplexVector {
        ComplexVector r(2);
        r(0) = 10.0 * (z(1) - z(0) * z(0));
        r(1) = Complex(1, 0) - z(0);
        return r;
    };
    p.jacobian = [](const ComplexVector& z) -> ComplexMatrix {
        ComplexMatrix J(2, 2);
        J(0, 0) = -20.0 * z(0);
        J(0, 1) = 10.0;
        J(1, 0) = -1.0;
        J(1, 1) = 0.0;
        return J;
    };
    ComplexVector init(2);
    init << Complex(-1.2, 0.3), Complex(1.0, -0.2);
    const auto res = optim::minimize_nlsq(p, init, {.max_iters = 200});
    for (std::size_t i = 1; i < res.objective_history.size(); ++i) {
        CHECK(res.objective_history[i] < res.objective_history[i - 1]);
    }
    CHECK(res.objective < 1e-12);
}

TEST_CASE("complex optimization equals the hand-stacked real system") {
    for (int trial = 0; trial < 10; ++trial) {
        const int m = 6, n = 2;
        ComplexMatrix A(m, n);
        ComplexVector b(m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) { A(i, j) = rc(1.0); }
            b(i) = rc(1.0);
        }
        const auto res_c = optim::minimize_nlsq(linear_problem(A, b), ComplexVector::Zero(n),
                                                {.max_iters = 200});

        const RealMatrix Ar = optim::realify_matrix(A);
        RealVector br(2 * m);
        br.head(m) = b.real();
        br.tail(m) = b.imag();
        const auto res_r = optim::lm_minimize(
            [&](const RealVector& x) -> RealVector { return Ar * x - br; },
            [&](const RealVector&) -> RealMatrix { return Ar; }, RealVector::Zero(2 * n),
            {.max_iters = 200});
        CHECK(std::abs(res_c.objective - res_r.objective) <= 1e-10 * std::max(1.0, res_r.objective));
    }
}

TEST_CASE("finite-difference Jacobian checking") {
    SECTION("linear maps are exact up to round-off") {
        ComplexMatrix A(3, 2);
        ComplexVector b(3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 2; ++j) { A(i, j) = rc(1.0); }
            b(i) = rc(1.0);
        }
        const auto p = linear_problem(A, b);
        ComplexVector at(2);
        at << rc(1.0), rc(1.0);
        // the difference quotient carries round-off of order eps/h
        for (const double h : {1e-5, 1e-4}) { CHECK(optim::check_jacobian(p, at, h) <= 1e-10); }
        CHECK(optim::check_jacobian(p, at, 1e-7) <= 1e-8);
    }
    SECTION("a sign flip is detected") {
        ComplexMatrix A(3, 2);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 2; ++j) { A(i, j) = rc(1.0); }
        }
        optim::NlsqProblem p;
        p.param_dim = 2;
        p.residual_dim = 3;
        p.residual = [A](const ComplexVector& z) -> ComplexVector { return A * z; };
        p.jacobian = [A](const ComplexVector&) -> ComplexMatrix { return -A; };
        ComplexVector at(2);
        at << rc(1.0), rc(1.0);
        CHECK(optim::check_jacobian(p, at, 1e-6) == Catch::Approx(2.0).epsilon(1e-6));
    }
    SECTION("conjugate Jacobians participate") {
        // r(z) = conj(z): J = 0, Jc = I
        optim::NlsqProblem p;
        p.param_dim = 1;
        p.residual_dim = 1;
        p.residual = [](const ComplexVector& z) -> ComplexVector {
            return ComplexVector::Constant(1, std::conj(z(0)));
        };
        p.jacobian = [](const ComplexVector&) -> ComplexMatrix { return ComplexMatrix::Zero(1, 1); };
        p.conj_jacobian = [](const ComplexVector&) -> ComplexMatrix { return ComplexMatrix::Ones(1, 1); };
        CHECK(optim::check_jacobian(p, ComplexVector::Constant(1, rc(1.0)), 1e-6) <= 1e-9);
    }
}

namespace {

// independent projected objective: normal-equation least squares per beta
double projected_objective(const std::function<ComplexMatrix(const ComplexVector&)>& psi, const ComplexVector& f,
                           Complex beta) {
    const ComplexMatrix P = psi(ComplexVector::Constant(1, beta));
    const ComplexVector alpha = (P.adjoint() * P).ldlt().solve(P.adjoint() * f);
    return (P * alpha - f).squaredNorm();
}

// brute-force scan over a complex box with repeated zooming
std::pair<Complex, double> grid_minimize(const std::function<ComplexMatrix(const ComplexVector&)>& psi,
                                         const ComplexVector& f, Complex center, double half_width,
                                         int stages) {
    Complex best = center;
    double best_obj = projected_objective(psi, f, center);
    for (int stage = 0; stage < stages; ++stage) {
        const int n = 41;
        const double step = 2.0 * half_width / (n - 1);
        Complex stage_best = best;
        double stage_obj = best_obj;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const Complex beta(best.real() - half_width + a * step, best.imag() - half_width + b * step);
                const double obj = projected_objective(psi, f, beta);
                if (obj < stage_obj) {
                    stage_obj = obj;
                    stage_best = beta;
                }
            }
        }
        best = stage_best;
        best_obj = stage_obj;
        half_width = 2.0 * step;
    }
    return {best, best_obj};
}

} // namespace

TEST_CASE("variable projection") {
    SECTION("constant column") {
        optim::VarProProblem p;
        p.residual_dim = 2;
        p.linear_dim = 1;
        p.f.resize(2);
        p.f << Complex(1, 0), Complex(3, 0);
        p.beta0 = ComplexVector::Constant(1, Complex(7, -2));
        p.psi = [](const ComplexVector&) -> ComplexMatrix { return ComplexMatrix::Ones(2, 1); };
        p.psi_dcol = [](const ComplexVector&) -> ComplexMatrix { return ComplexMatrix::Zero(2, 1); };
        const auto res = optim::varpro_minimize(p);
        CHECK(std::abs(res.alpha(0) - Complex(2, 0)) < 1e-12);
        CHECK(res.objective == Catch::Approx(2.0).margin(1e-12));
        CHECK(res.beta(0) == Complex(7, -2)); // nothing to optimize
    }

    SECTION("one nonlinear parameter with an exact fit") {
        optim::VarProProblem p;
        p.residual_dim = 2;
        p.linear_dim = 1;
        p.f.resize(2);
        p.f << Complex(1, 0), Complex(2, 0);
        p.beta0 = ComplexVector::Constant(1, Complex(0.5, 0.1));
        p.psi = [](const ComplexVector& beta) -> ComplexMatrix {
            ComplexMatrix m(2, 1);
            m << Complex(1, 0), beta(0);
            return m;
        };
        p.psi_dcol = [](const ComplexVector&) -> ComplexMatrix {
            ComplexMatrix m(2, 1);
            m << Complex(0, 0), Complex(1, 0);
            return m;
        };
        const auto res = optim::varpro_minimize(p, {.max_iters = 200});
        // grid oracle pins the optimum at beta = 2, alpha = 1, objective 0
        const auto [grid_beta, grid_obj] = grid_minimize(p.psi, p.f, Complex(0, 0), 3.0, 5);
        CHECK(std::abs(grid_beta - Complex(2, 0)) < 1e-3);
        CHECK(res.objective <= grid_obj + 1e-10);
        CHECK(std::abs(res.beta(0) - Complex(2, 0)) < 1e-6);
        CHECK(std::abs(res.alpha(0) - Complex(1, 0)) < 1e-6);
    }

    SECTION("optimum matches a brute-force scan on random instances") {
        for (int trial = 0; trial < 5; ++trial) {
            const int m = 6;
            ComplexVector v(m), u(m), f(m);
            for (int i = 0; i < m; ++i) {
                v(i) = rc(1.0);
                u(i) = rc(1.0);
                f(i) = rc(1.0);
            }
            optim::VarProProblem p;
            p.residual_dim = m;
            p.linear_dim = 1;
            p.f = f;
            p.beta0 = ComplexVector::Constant(1, Complex(0.3, -0.2));
            p.psi = [v, u](const ComplexVector& beta) -> ComplexMatrix { return v + beta(0) * u; };
            p.psi_dcol = [u](const ComplexVector&) -> ComplexMatrix { return u; };
            const auto res = optim::varpro_minimize(p, {.max_iters = 300});
            const auto [grid_beta, grid_obj] = grid_minimize(p.psi, p.f, res.beta(0), 2.0, 6);
            CHECK(res.objective <= grid_obj + 1e-8 * std::max(1.0, grid_obj));
        }
    }

    SECTION("returned linear parameters satisfy the projection relation") {
        optim::VarProProblem p;
        p.residual_dim = 5;
        p.linear_dim = 1;
        ComplexVector v(5), u(5), f(5);
        for (int i = 0; i < 5; ++i) {
            v(i) = rc(1.0);
            u(i) = rc(1.0);
            f(i) = rc(1.0);
        }
        p.f = f;
        p.beta0 = ComplexVector::Constant(1, Complex(0.1, 0.4));
        p.psi = [v, u](const ComplexVector& beta) -> ComplexMatrix { return v + beta(0) * u; };
        p.psi_dcol = [u](const ComplexVector&) -> ComplexMatrix { return u; };
        const auto res = optim::varpro_minimize(p, {.max_iters = 100});
        const ComplexMatrix P = p.psi(res.beta);
        const ComplexVector alpha = (P.adjoint() * P).ldlt().solve(P.adjoint() * f);
        CHECK((res.alpha - alpha).norm() <= 1e-12 * std::max(1.0, alpha.norm()));
    }

    SECTION("kaufman variant reaches the same optimum on a well-posed instance") {
        optim::VarProProblem p;
        p.residual_dim = 2;
        p.linear_dim = 1;
        p.f.resize(2);
        p.f << Complex(1, 0), Complex(2, 0);
        p.beta0 = ComplexVector::Constant(1, Complex(0.5, 0.1));
        p.psi = [](const ComplexVector& beta) -> ComplexMatrix {
            ComplexMatrix m(2, 1);
            m << Complex(1, 0), beta(0);
            return m;
        };
        p.psi_dcol = [](const ComplexVector&) -> ComplexMatrix {
            ComplexMatrix m(2, 1);
            m << Complex(0, 0), Complex(1, 0);
            return m;
        };
        const auto res = optim::varpro_minimize(p, {.max_iters = 300, .kaufman = true});
        CHECK(std::abs(res.beta(0) - Complex(2, 0)) < 1e-6);
    }
}
