#include <catch2/catch_amalgamated.hpp>

#include <baryfit/algorithms.hpp>
#include <baryfit/datagen.hpp>

using namespace baryfit;
using namespace baryfit::datagen;

TEST_CASE("explicit matrices pass through") {
    const auto sys = make_second_order(ComplexMatrix::Constant(1, 1, Complex(1, 0)),
                                       ComplexMatrix::Constant(1, 1, Complex(3, 0)),
                                       ComplexMatrix::Constant(1, 1, Complex(5, 0)),
                                       ComplexVector::Constant(1, Complex(3, 0)),
                                       ComplexVector::Constant(1, Complex(4, 0)), true);
    CHECK(std::abs(sys.eval(Complex(1, 0)) - Complex(12.0 / 9.0, 0)) < 1e-14);
    REQUIRE(sys.poles.size() == 2);
    for (const auto& p : sys.poles) { CHECK(p.real() < 0.0); }
}

TEST_CASE("generation is deterministic per seed") {
    const auto a = gen_second_order(3, 1234, {.real = true});
    const auto b = gen_second_order(3, 1234, {.real = true});
    CHECK(a.second_order->D == b.second_order->D);
    CHECK(a.second_order->K == b.second_order->K);
    CHECK(a.second_order->b == b.second_order->b);
    CHECK(a.second_order->c == b.second_order->c);

    const auto grid = log_grid_imag(5, 500, 17);
    const DataSet da = sample_frequency_response(a, grid, SampleWeighting::relative);
    const DataSet db = sample_frequency_response(b, grid, SampleWeighting::relative);
    REQUIRE(da.size() == db.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
        CHECK(da[i].mu == db[i].mu);
        CHECK(da[i].g == db[i].g);
        CHECK(da[i].eta == db[i].eta);
    }
}

TEST_CASE("generated poles stay in the open left half-plane") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const bool real = seed % 2 == 0;
        const int k = 1 + static_cast<int>(seed % 4);
        const auto sys = gen_second_order(k, seed, {.real = real});
        REQUIRE(sys.poles.size() == static_cast<std::size_t>(2 * k));
        for (const auto& p : sys.poles) { CHECK(p.real() < 0.0); }
        const auto fo = gen_first_order(k, seed, {.real = real});
        for (const auto& p : fo.poles) { CHECK(p.real() < 0.0); }
    }
}

TEST_CASE("frequency-response sampling") {
    const auto sys = make_second_order(ComplexMatrix::Constant(1, 1, Complex(1, 0)),
                                       ComplexMatrix::Constant(1, 1, Complex(3, 0)),
                                       ComplexMatrix::Constant(1, 1, Complex(5, 0)),
                                       ComplexVector::Constant(1, Complex(3, 0)),
                                       ComplexVector::Constant(1, Complex(4, 0)), true);
    SECTION("values come from the realization") {
        const DataSet d = sample_frequency_response(sys, {Complex(1, 0)});
        CHECK(std::abs(d[0].g - Complex(12.0 / 9.0, 0)) < 1e-14);
        CHECK(d[0].eta == 1.0);
    }
    SECTION("relative weighting normalizes the magnitudes") {
        const DataSet d = sample_frequency_response(sys, log_grid_imag(1, 100, 25), SampleWeighting::relative);
        // one rounding each for the division and the product
        for (const auto& t : d) { CHECK(t.eta * std::abs(t.g) == Catch::Approx(1.0).margin(1e-15)); }
    }
    SECTION("the logarithmic grid covers the band") {
        const auto grid = log_grid_imag(1e1, 1e4, 1000);
        REQUIRE(grid.size() == 1000);
        CHECK(grid.front() == Complex(0, 1e1));
        CHECK(std::abs(grid.back() - Complex(0, 1e4)) < 1e-9);
        // constant ratio between consecutive frequencies
        const double ratio = grid[1].imag() / grid[0].imag();
        for (std::size_t i = 2; i < grid.size(); ++i) {
            CHECK(grid[i].imag() / grid[i - 1].imag() == Catch::Approx(ratio).epsilon(1e-10));
        }
    }
    SECTION("bad ranges are rejected") {
        CHECK_THROWS_AS(log_grid_imag(10, 1, 5), InvalidRange);
        CHECK_THROWS_AS(gen_second_order(0, 1), InvalidRange);
        CHECK_THROWS_AS(gen_second_order(2, 1, {.freq_min = -1}), InvalidRange);
    }
}

TEST_CASE("recovery closure on generated systems") {
    // the generator and fit settings must together allow recovery; the full
    // sweep lives in the acceptance suite
    algorithms::FitConfig cfg;
    cfg.kmax = 2;
    cfg.tol = 1e-6;
    cfg.inner.max_iters = 2000;
    cfg.inner.grad_tol_rel = 1e-12;

    const auto complex_sys = gen_second_order(2, 5, {.freq_min = 10, .freq_max = 300, .real = false});
    const DataSet dc = sample_frequency_response(complex_sys, log_grid_imag(5, 600, 30),
                                                 SampleWeighting::relative);
    CHECK(algorithms::fit_so_aaa(dc, cfg).trace.records.back().l2_rel < 1e-6);
    CHECK(algorithms::fit_nso_aaa(dc, cfg).trace.records.back().l2_rel < 1e-6);

    const auto real_sys = gen_second_order(
        2, 6, {.freq_min = 10, .freq_max = 300, .damping_min = 0.1, .damping_max = 0.4, .real = true});
    const DataSet dr = sample_frequency_response(real_sys, log_grid_imag(5, 600, 30),
                                                 SampleWeighting::relative);
    auto rcfg = cfg;
    rcfg.real_mode = true;
    rcfg.sigma_real = -1e3;
    rcfg.inner.kaufman = true;
    CHECK(algorithms::fit_so_aaa(dr, rcfg).trace.records.back().l2_rel < 1e-6);
    rcfg.inner.kaufman = false;
    rcfg.inner.max_iters = 6000;
    rcfg.inner.grad_tol_rel = 1e-14;
    rcfg.inner.step_tol = 1e-15;
    CHECK(algorithms::fit_nso_aaa(dr, rcfg).trace.records.back().l2_rel < 1e-6);
}
