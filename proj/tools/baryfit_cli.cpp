// baryfit command-line frontend: fit models to frequency-response samples,
// evaluate stored models, score convergence reports, and generate synthetic
// benchmark data.
//
// Exit codes: 0 success, 2 input parse error, 3 fit failure (partial report
// still written when requested), 4 evaluation hit a model pole.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <baryfit/baryfit.hpp>

namespace {

using namespace baryfit;

constexpr int exit_ok = 0;
constexpr int exit_parse = 2;
constexpr int exit_fit = 3;
constexpr int exit_pole = 4;

struct FitArgs {
    std::string input;
    std::string method = "aaa";
    int kmax = 10;
    double tol = 0.0;
    std::string weighting = "data";
    bool real_mode = false;
    bool drop_nonpositive = false;
    double sigma_real = -1e5;
    double rank_tol = -1.0;
    int inner_iters = 100;
    std::optional<std::uint64_t> seed_report;
    std::string output;
    std::string report;
};

void write_report_file(const std::string& path, const FitTrace& trace) {
    if (path.empty()) { return; }
    std::ofstream out(path);
    io::write_report_csv(out, trace);
}

int run_fit(const FitArgs& args) {
    DataSet data;
    try {
        data = io::read_samples_csv_file(args.input);
    } catch (const Error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_parse;
    }

    algorithms::FitConfig cfg;
    FitTrace partial;
    try {
        const auto [method, aaa2] = io::parse_method(args.method);
        cfg.method = method;
        cfg.aaa2 = aaa2;
        cfg.kmax = args.kmax;
        cfg.tol = args.tol;
        cfg.weighting = io::parse_weighting(args.weighting);
        cfg.real_mode = args.real_mode;
        cfg.drop_nonpositive_imag = args.drop_nonpositive;
        cfg.sigma_real = args.sigma_real;
        cfg.rank_tol = args.rank_tol;
        cfg.inner.max_iters = args.inner_iters;
        cfg.on_iteration = [&partial](const FitRecord& r) { partial.records.push_back(r); };
    } catch (const Error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_parse;
    }

    io::ModelFile mf;
    mf.method = cfg.method;
    mf.aaa2 = cfg.aaa2;
    mf.real_mode = cfg.real_mode;
    mf.config = cfg;
    mf.seed_report = args.seed_report;

    try {
        if (cfg.method == algorithms::Method::aaa) {
            const algorithms::UnstructuredFit fit = algorithms::fit_aaa(data, cfg);
            mf.order = static_cast<int>(fit.model.order());
            mf.lambdas = fit.model.lambdas;
            mf.h_values = fit.model.h_values;
            mf.weights = fit.model.weights;
            mf.trace = fit.trace;
            if (cfg.real_mode) {
                realification::ConjugateClosedParams p{fit.model.lambdas, fit.model.h_values, {},
                                                       fit.model.weights};
                mf.first_order = statespace::to_first_order_real(p);
            } else {
                mf.first_order = statespace::to_first_order(fit.model);
            }
        } else {
            algorithms::SecondOrderFit fit;
            switch (cfg.method) {
            case algorithms::Method::so: fit = algorithms::fit_so_aaa(data, cfg); break;
            case algorithms::Method::lso: fit = algorithms::fit_lso_aaa(data, cfg); break;
            case algorithms::Method::nso: fit = algorithms::fit_nso_aaa(data, cfg); break;
            default: break;
            }
            mf.order = static_cast<int>(fit.model.order());
            mf.lambdas = fit.model.lambdas;
            mf.h_values = fit.model.h_values;
            mf.weights = fit.model.weights;
            mf.sigmas = fit.model.sigmas;
            mf.trace = fit.trace;
            if (cfg.real_mode) {
                realification::ConjugateClosedParams p{fit.model.lambdas, fit.model.h_values,
                                                       fit.model.sigmas, fit.model.weights};
                mf.second_order = statespace::to_second_order_real(p);
            } else {
                mf.second_order = statespace::to_second_order(fit.model);
            }
        }
    } catch (const Error& e) {
        std::cerr << "fit failed: " << e.what() << "\n";
        write_report_file(args.report, partial);
        return exit_fit;
    }

    if (!args.output.empty()) {
        std::ofstream out(args.output);
        if (!out) {
            std::cerr << "fit failed: cannot write '" << args.output << "'\n";
            return exit_fit;
        }
        io::write_model_json(out, mf);
    }
    write_report_file(args.report, mf.trace);

    if (!mf.trace.records.empty()) {
        const FitRecord& last = mf.trace.records.back();
        std::printf("fitted %s model: order %d, l2_rel %.3e, linf_rel %.3e\n", args.method.c_str(),
                    last.realization_order, last.l2_rel, last.linf_rel);
    }
    return exit_ok;
}

struct EvalArgs {
    std::string model_path;
    std::string points;
    std::string via = "barycentric";
    std::string output;
};

std::vector<Complex> parse_points(const std::string& spec) {
    auto parse_grid = [&](const std::string& body, bool log_spaced) {
        double a = 0.0, b = 0.0;
        int n = 0;
        if (std::sscanf(body.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3) {
            throw ParseError("bad grid spec '" + spec + "' (expected lo:hi:count)");
        }
        if (n <= 0) { return std::vector<Complex>{}; }
        if (n == 1) { return std::vector<Complex>{Complex(0.0, a)}; }
        return log_spaced ? datagen::log_grid_imag(a, b, n) : datagen::linear_grid_imag(a, b, n);
    };
    if (spec.rfind("log:", 0) == 0) { return parse_grid(spec.substr(4), true); }
    if (spec.rfind("lin:", 0) == 0) { return parse_grid(spec.substr(4), false); }

    // otherwise a CSV file with freq_real, freq_imag columns
    std::ifstream in(spec);
    if (!in) { throw ParseError("cannot open points file '" + spec + "'"); }
    std::vector<Complex> out;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::size_t col_re = 0, col_im = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') { continue; }
        const auto fields = io::detail::split_csv_line(line);
        if (!header_seen) {
            bool have_re = false, have_im = false;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] == "freq_real") {
                    col_re = i;
                    have_re = true;
                }
                if (fields[i] == "freq_imag") {
                    col_im = i;
                    have_im = true;
                }
            }
            if (!have_re || !have_im) {
                throw ParseError("points file needs freq_real and freq_imag columns");
            }
            header_seen = true;
            continue;
        }
        out.emplace_back(io::detail::parse_double(fields.at(col_re), line_no),
                         io::detail::parse_double(fields.at(col_im), line_no));
    }
    if (!header_seen) { throw ParseError("points file has no header line"); }
    return out;
}

int run_eval(const EvalArgs& args) {
    io::ModelFile mf;
    std::vector<Complex> points;
    try {
        mf = io::read_model_json_file(args.model_path);
        points = parse_points(args.points);
    } catch (const Error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_parse;
    }

    const bool use_bary = args.via == "barycentric" || args.via == "both";
    const bool use_real = args.via == "realization" || args.via == "both";
    if (!use_bary && !use_real) {
        std::cerr << "parse error: --via must be barycentric, realization or both\n";
        return exit_parse;
    }

    std::ofstream out;
    std::ostream* os = &std::cout;
    if (!args.output.empty()) {
        out.open(args.output);
        if (!out) {
            std::cerr << "cannot write '" << args.output << "'\n";
            return exit_fit;
        }
        os = &out;
    }

    std::function<Complex(Complex)> bary, realz;
    try {
        if (use_bary) { bary = io::model_evaluator(mf); }
        if (use_real) { realz = io::realization_evaluator(mf); }
    } catch (const Error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_parse;
    }

    *os << "s_real,s_imag,h_real,h_imag\n";
    double max_dev = 0.0;
    for (const Complex& s : points) {
        Complex value;
        try {
            if (use_bary) {
                value = bary(s);
                if (use_real) {
                    const Complex other = realz(s);
                    max_dev = std::max(max_dev, std::abs(value - other));
                }
            } else {
                value = realz(s);
            }
        } catch (const PoleHit& e) {
            std::cerr << "pole hit at s = (" << s.real() << ", " << s.imag() << "): " << e.what() << "\n";
            return exit_pole;
        } catch (const SingularShift& e) {
            std::cerr << "pole hit at s = (" << s.real() << ", " << s.imag() << "): " << e.what() << "\n";
            return exit_pole;
        }
        *os << io::detail::format_double(s.real()) << ',' << io::detail::format_double(s.imag()) << ','
            << io::detail::format_double(value.real()) << ',' << io::detail::format_double(value.imag())
            << '\n';
    }
    if (use_bary && use_real) { std::printf("max deviation barycentric vs realization: %.6e\n", max_dev); }
    return exit_ok;
}

struct MorscoreArgs {
    std::vector<std::string> reports;
    double eps_min = 1e-8;
    int kmax = 0; // 0: use the largest order across all reports
};

int run_morscore(const MorscoreArgs& args) {
    std::vector<std::vector<io::ReportRow>> reports;
    try {
        for (const auto& path : args.reports) { reports.push_back(io::read_report_csv_file(path)); }
    } catch (const Error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_parse;
    }

    int kmax = args.kmax;
    if (kmax == 0) {
        for (const auto& rows : reports) {
            for (const auto& r : rows) { kmax = std::max(kmax, r.k); }
        }
    }
    if (kmax < 1) {
        std::cerr << "parse error: reports contain no orders\n";
        return exit_parse;
    }

    std::printf("%-32s %10s %10s %10s\n", "report", "l2", "linf", "ptw");
    for (std::size_t i = 0; i < reports.size(); ++i) {
        metrics::MorscoreInput in;
        in.kmax = kmax;
        in.eps_min = args.eps_min;
        for (const auto& r : reports[i]) { in.orders.push_back(r.k); }
        auto score_of = [&](auto getter) {
            metrics::MorscoreInput local = in;
            local.errors.clear();
            for (const auto& r : reports[i]) { local.errors.push_back(getter(r)); }
            return metrics::morscore(local);
        };
        try {
            const double s2 = score_of([](const io::ReportRow& r) { return r.l2_rel; });
            const double si = score_of([](const io::ReportRow& r) { return r.linf_rel; });
            const double sp = score_of([](const io::ReportRow& r) { return r.ptw_max; });
            std::printf("%-32s %10.3f %10.3f %10.3f\n", args.reports[i].c_str(), s2, si, sp);
        } catch (const Error& e) {
            std::cerr << "parse error: " << e.what() << "\n";
            return exit_parse;
        }
    }
    return exit_ok;
}

struct GenArgs {
    int order = 2;
    std::uint64_t seed = 1;
    std::string kind = "so";
    bool real_mode = false;
    int points = 200;
    double wmin = 1.0;
    double wmax = 1e4;
    std::string weighting = "unit";
    std::string output;
};

int run_gen(const GenArgs& args) {
    try {
        datagen::GenOptions opts;
        opts.real = args.real_mode;
        opts.freq_min = args.wmin * 3.0;
        opts.freq_max = args.wmax / 3.0;
        datagen::SyntheticSystem sys = args.kind == "fo" ? datagen::gen_first_order(args.order, args.seed, opts)
                                                         : datagen::gen_second_order(args.order, args.seed, opts);
        const auto grid = datagen::log_grid_imag(args.wmin, args.wmax, args.points);
        const auto weighting = args.weighting == "relative" ? datagen::SampleWeighting::relative
                                                            : datagen::SampleWeighting::unit;
        const DataSet data = datagen::sample_frequency_response(sys, grid, weighting);
        std::ofstream out(args.output);
        if (!out) {
            std::cerr << "cannot write '" << args.output << "'\n";
            return exit_fit;
        }
        io::write_samples_csv(out, data);
        std::printf("wrote %zu samples to %s\n", data.size(), args.output.c_str());
        return exit_ok;
    } catch (const Error& e) {
        std::cerr << "generation failed: " << e.what() << "\n";
        return exit_parse;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"barycentric rational fitting of frequency-response data"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "fit a model to sampled data");
    fit->add_option("input", fit_args.input, "sample CSV file")->required();
    fit->add_option("--method", fit_args.method, "aaa | aaa2 | so | lso | nso")->required();
    fit->add_option("--kmax", fit_args.kmax, "maximum model order (greedy iterations)")->required();
    fit->add_option("--tol", fit_args.tol, "stop when the weighted relative L2 error falls below");
    fit->add_option("--weighting", fit_args.weighting, "unit | relative | data (default data)");
    fit->add_flag("--real", fit_args.real_mode, "produce a real state-space model");
    fit->add_flag("--drop-nonpositive", fit_args.drop_nonpositive,
                  "real mode: drop samples with nonpositive imaginary part instead of failing");
    fit->add_option("--sigma-real", fit_args.sigma_real, "real part for fresh quasi-support points");
    fit->add_option("--rank-tol", fit_args.rank_tol, "pseudoinverse truncation threshold");
    fit->add_option("--inner-iters", fit_args.inner_iters, "inner optimizer iteration budget");
    fit->add_option("--seed-report", fit_args.seed_report, "seed tag echoed into the model file");
    fit->add_option("--output", fit_args.output, "model JSON output path");
    fit->add_option("--report", fit_args.report, "per-iteration report CSV path");

    EvalArgs eval_args;
    CLI::App* ev = app.add_subcommand("eval", "evaluate a stored model");
    ev->add_option("model", eval_args.model_path, "model JSON file")->required();
    ev->add_option("--points", eval_args.points, "CSV file or grid spec log:lo:hi:n / lin:lo:hi:n")->required();
    ev->add_option("--via", eval_args.via, "barycentric | realization | both");
    ev->add_option("--output", eval_args.output, "output CSV path (default stdout)");

    MorscoreArgs mor_args;
    CLI::App* mor = app.add_subcommand("morscore", "summarize report CSVs into MORscores");
    mor->add_option("reports", mor_args.reports, "report CSV files")->required();
    mor->add_option("--eps-min", mor_args.eps_min, "minimum attainable error (default 1e-8)");
    mor->add_option("--kmax", mor_args.kmax, "order axis maximum (default: largest order seen)");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate synthetic benchmark samples");
    gen->add_option("--order", gen_args.order, "system order")->required();
    gen->add_option("--seed", gen_args.seed, "random seed")->required();
    gen->add_option("--kind", gen_args.kind, "so (second-order) | fo (first-order)");
    gen->add_flag("--real", gen_args.real_mode, "real system matrices");
    gen->add_option("--points", gen_args.points, "number of samples");
    gen->add_option("--wmin", gen_args.wmin, "lowest sample frequency, rad/s");
    gen->add_option("--wmax", gen_args.wmax, "highest sample frequency, rad/s");
    gen->add_option("--weighting", gen_args.weighting, "unit | relative");
    gen->add_option("--output", gen_args.output, "sample CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_parse;
    }

    if (fit->parsed()) { return run_fit(fit_args); }
    if (ev->parsed()) { return run_eval(eval_args); }
    if (mor->parsed()) { return run_morscore(mor_args); }
    if (gen->parsed()) { return run_gen(gen_args); }
    return exit_parse;
}
