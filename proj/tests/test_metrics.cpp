#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <baryfit/algorithms.hpp>
#include <baryfit/datagen.hpp>
#include <baryfit/metrics.hpp>

using namespace baryfit;
using metrics::MorscoreInput;

TEST_CASE("error report") {
    SECTION("single point by hand") {
        DataSet d;
        d.add({Complex(0, 1), Complex(2, 0), 1.0});
        const auto rep = metrics::error_report(d, [](Complex) { return Complex(3, 0); });
        CHECK(rep.eps_vector(0) == 1.0);
        CHECK(rep.l2_rel == 0.5);
        CHECK(rep.linf_rel == 0.5);
        CHECK(rep.ptw_max == 0.5);
        CHECK_FALSE(rep.ptw_has_zero_data);
    }
    SECTION("exact models report zero everywhere") {
        DataSet d;
        for (int i = 1; i <= 5; ++i) { d.add({Complex(0, i), Complex(i, -i), 0.5}); }
        const auto rep = metrics::error_report(d, [&](Complex mu) { return Complex(mu.imag(), -mu.imag()); });
        CHECK(rep.eps_vector.maxCoeff() == 0.0);
        CHECK(rep.l2_rel == 0.0);
        CHECK(rep.linf_rel == 0.0);
        CHECK(rep.ptw_max == 0.0);
    }
    SECTION("relative weights make the max norms coincide") {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> u(0.5, 3.0);
        DataSet d;
        for (int i = 1; i <= 8; ++i) {
            const Complex g(u(rng), u(rng));
            d.add({Complex(0, i), g, 1.0 / std::abs(g)});
        }
        const auto rep = metrics::error_report(d, [](Complex mu) { return Complex(0.3 * mu.imag(), 0.1); });
        CHECK(rep.linf_rel == Catch::Approx(rep.ptw_max).epsilon(1e-14));
    }
    SECTION("zero data flags the pointwise maximum") {
        DataSet d;
        d.add({Complex(0, 1), Complex(0, 0), 1.0});
        const auto rep = metrics::error_report(d, [](Complex) { return Complex(1, 0); });
        CHECK(rep.ptw_has_zero_data);
        CHECK(std::isinf(rep.ptw_max));
    }
}

TEST_CASE("morscore") {
    SECTION("constant curves hit the three reference values") {
        MorscoreInput in;
        in.kmax = 10;
        in.eps_min = 1e-8;
        for (int k = 1; k <= 10; ++k) { in.orders.push_back(k); }

        in.errors.assign(10, 1.0);
        CHECK(metrics::morscore(in) == 0.0);

        in.errors.assign(10, 1e-8);
        CHECK(metrics::morscore(in) == 1.0);

        in.errors.assign(10, 1e-4);
        CHECK(metrics::morscore(in) == 0.5);
    }
    SECTION("errors clamp to the admissible range") {
        MorscoreInput in;
        in.kmax = 4;
        in.eps_min = 1e-8;
        in.orders = {1, 2, 3, 4};
        in.errors = {10.0, 10.0, 10.0, 10.0}; // clamps to 1
        CHECK(metrics::morscore(in) == 0.0);
        in.errors = {1e-12, 1e-12, 1e-12, 1e-12}; // clamps to eps_min
        CHECK(metrics::morscore(in) == 1.0);
    }
    SECTION("lowering any error never lowers the score") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        MorscoreInput in;
        in.kmax = 6;
        in.eps_min = 1e-8;
        in.orders = {1, 2, 3, 4, 5, 6};
        for (int i = 0; i < 6; ++i) { in.errors.push_back(std::pow(10.0, -6.0 * u(rng))); }
        const double base = metrics::morscore(in);
        for (int i = 0; i < 6; ++i) {
            MorscoreInput better = in;
            better.errors[static_cast<std::size_t>(i)] /= 10.0;
            CHECK(metrics::morscore(better) >= base - 1e-15);
        }
    }
    SECTION("refining a constant stretch does not change the score") {
        MorscoreInput coarse;
        coarse.kmax = 4;
        coarse.eps_min = 1e-8;
        coarse.orders = {1, 3, 4};
        coarse.errors = {1e-3, 1e-3, 1e-5};
        MorscoreInput fine = coarse;
        fine.orders = {1, 2, 3, 4};
        fine.errors = {1e-3, 1e-3, 1e-3, 1e-5};
        CHECK(metrics::morscore(fine) == Catch::Approx(metrics::morscore(coarse)).epsilon(1e-14));
    }
    SECTION("input validation") {
        MorscoreInput in;
        in.kmax = 3;
        CHECK_THROWS_AS(metrics::morscore(in), EmptyInput);
        in.orders = {2, 2};
        in.errors = {1e-3, 1e-3};
        CHECK_THROWS_AS(metrics::morscore(in), InvalidRange);
    }
}

TEST_CASE("weight scaling moves the error report uniformly") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    DataSet a, b;
    const double factor = 7.25;
    for (int i = 1; i <= 6; ++i) {
        const Complex g(u(rng), u(rng));
        const double eta = u(rng);
        a.add({Complex(0, i), g, eta});
        b.add({Complex(0, i), g, factor * eta});
    }
    auto model = [](Complex mu) { return Complex(0.4 * mu.imag(), -0.2); };
    const auto ra = metrics::error_report(a, model);
    const auto rb = metrics::error_report(b, model);
    CHECK((rb.eps_vector - factor * ra.eps_vector).cwiseAbs().maxCoeff() <=
          1e-12 * ra.eps_vector.maxCoeff());
    CHECK(rb.l2_rel == Catch::Approx(ra.l2_rel).epsilon(1e-12));
    Eigen::Index ia, ib;
    ra.eps_vector.maxCoeff(&ia);
    rb.eps_vector.maxCoeff(&ib);
    CHECK(ia == ib); // the maximizing index is scale-invariant
}

TEST_CASE("objective trace") {
    SECTION("reads the per-iteration objectives") {
        FitTrace trace;
        FitRecord r;
        r.k = 1;
        r.realization_order = 1;
        r.objective = 0.0;
        trace.records.push_back(r);
        r.k = 2;
        r.realization_order = 2;
        r.objective = 9.0; // a single residual entry of 3
        trace.records.push_back(r);
        const auto pairs = metrics::objective_trace(trace);
        REQUIRE(pairs.size() == 2);
        CHECK(pairs[0] == std::pair<int, double>{1, 0.0});
        CHECK(pairs[1] == std::pair<int, double>{2, 9.0});
    }
    SECTION("matches independently recomputed residual norms on a finished fit") {
        const auto sys = datagen::gen_second_order(2, 321, {.freq_min = 10, .freq_max = 300, .real = false});
        const DataSet d = datagen::sample_frequency_response(sys, datagen::log_grid_imag(5, 600, 24),
                                                             datagen::SampleWeighting::relative);
        algorithms::FitConfig cfg;
        cfg.kmax = 2;
        const auto fit = algorithms::fit_lso_aaa(d, cfg);
        const auto pairs = metrics::objective_trace(fit.trace);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            // rebuild the working set after iteration i and recompute the
            // separable residual of the recorded iterate
            DataSet rest;
            std::set<std::size_t> used;
            for (std::size_t j = 0; j <= i; ++j) { used.insert(fit.trace.records[j].selected_index); }
            for (std::size_t j = 0; j < d.size(); ++j) {
                if (!used.count(j)) { rest.add(d[j]); }
            }
            const auto& m = fit.iterates[i];
            const double obj =
                algorithms::residual_separable(rest, m.lambdas, m.h_values, m.sigmas, m.weights).squaredNorm();
            CHECK(pairs[i].second == Catch::Approx(obj).epsilon(1e-12));
        }
    }
}
