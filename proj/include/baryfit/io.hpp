// io.hpp
// On-disk formats: the sample CSV the CLI ingests, the JSON model file it
// emits, and the per-iteration report CSV. Complex numbers appear in JSON as
// {re, im} pairs; matrices are row-major with separate real/imag arrays
// (imag omitted for real realizations). Model files round-trip losslessly.

#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "baryfit/algorithms.hpp"
#include "baryfit/statespace.hpp"
#include "baryfit/types.hpp"

namespace baryfit {
namespace io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Sample CSV: named columns freq_real, freq_imag, g_real, g_imag and an
// optional weight column; '#' starts a comment line.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        out.push_back(first == std::string::npos ? std::string{} : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') { out.emplace_back(); }
    return out;
}

inline double parse_double(const std::string& s, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) { throw ParseError("trailing characters"); }
        return v;
    } catch (const std::exception&) {
        throw ParseError("CSV line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
    }
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline DataSet read_samples_csv(std::istream& in) {
    std::string line;
    int line_no = 0;
    std::map<std::string, std::size_t> columns;
    bool header_seen = false;
    DataSet out;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') { continue; }
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (!header_seen) {
            for (std::size_t i = 0; i < fields.size(); ++i) { columns[fields[i]] = i; }
            for (const char* required : {"freq_real", "freq_imag", "g_real", "g_imag"}) {
                if (!columns.count(required)) {
                    throw ParseError(std::string("sample CSV header is missing column '") + required + "'");
                }
            }
            header_seen = true;
            continue;
        }
        if (fields.size() < columns.size()) {
            throw ParseError("CSV line " + std::to_string(line_no) + ": expected " +
                             std::to_string(columns.size()) + " fields");
        }
        DataTriple t;
        t.mu = Complex(detail::parse_double(fields[columns.at("freq_real")], line_no),
                       detail::parse_double(fields[columns.at("freq_imag")], line_no));
        t.g = Complex(detail::parse_double(fields[columns.at("g_real")], line_no),
                      detail::parse_double(fields[columns.at("g_imag")], line_no));
        if (columns.count("weight")) {
            t.eta = detail::parse_double(fields[columns.at("weight")], line_no);
            if (!(t.eta > 0.0)) {
                throw ParseError("CSV line " + std::to_string(line_no) + ": weight must be positive");
            }
        }
        out.add(t);
    }
    if (!header_seen) { throw ParseError("sample CSV has no header line"); }
    try {
        out.validate();
    } catch (const Error& e) {
        throw ParseError(std::string("sample CSV: ") + e.what());
    }
    return out;
}

inline DataSet read_samples_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) { throw ParseError("cannot open sample file '" + path + "'"); }
    return read_samples_csv(in);
}

inline void write_samples_csv(std::ostream& out, const DataSet& data) {
    out << "freq_real,freq_imag,g_real,g_imag,weight\n";
    for (const auto& t : data) {
        out << detail::format_double(t.mu.real()) << ',' << detail::format_double(t.mu.imag()) << ','
            << detail::format_double(t.g.real()) << ',' << detail::format_double(t.g.imag()) << ','
            << detail::format_double(t.eta) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Report CSV: one row per iteration, columns k, objective, l2_rel, linf_rel,
// ptw_max. The k column is the realization (state-space) order.
// ---------------------------------------------------------------------------

struct ReportRow {
    int k = 0;
    double objective = 0.0;
    double l2_rel = 0.0;
    double linf_rel = 0.0;
    double ptw_max = 0.0;
};

inline void write_report_csv(std::ostream& out, const FitTrace& trace) {
    out << "k,objective,l2_rel,linf_rel,ptw_max\n";
    for (const auto& r : trace.records) {
        out << r.realization_order << ',' << detail::format_double(r.objective) << ','
            << detail::format_double(r.l2_rel) << ',' << detail::format_double(r.linf_rel) << ','
            << detail::format_double(r.ptw_max) << '\n';
    }
}

inline std::vector<ReportRow> read_report_csv(std::istream& in) {
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::map<std::string, std::size_t> columns;
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') { continue; }
        const auto fields = detail::split_csv_line(line);
        if (!header_seen) {
            for (std::size_t i = 0; i < fields.size(); ++i) { columns[fields[i]] = i; }
            for (const char* required : {"k", "objective", "l2_rel", "linf_rel", "ptw_max"}) {
                if (!columns.count(required)) {
                    throw ParseError(std::string("report CSV header is missing column '") + required + "'");
                }
            }
            header_seen = true;
            continue;
        }
        if (fields.size() < columns.size()) {
            throw ParseError("report CSV line " + std::to_string(line_no) + ": too few fields");
        }
        ReportRow r;
        r.k = static_cast<int>(detail::parse_double(fields[columns.at("k")], line_no));
        r.objective = detail::parse_double(fields[columns.at("objective")], line_no);
        r.l2_rel = detail::parse_double(fields[columns.at("l2_rel")], line_no);
        r.linf_rel = detail::parse_double(fields[columns.at("linf_rel")], line_no);
        r.ptw_max = detail::parse_double(fields[columns.at("ptw_max")], line_no);
        rows.push_back(r);
    }
    if (!header_seen) { throw ParseError("report CSV has no header line"); }
    return rows;
}

inline std::vector<ReportRow> read_report_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) { throw ParseError("cannot open report file '" + path + "'"); }
    return read_report_csv(in);
}

// ---------------------------------------------------------------------------
// Model JSON
// ---------------------------------------------------------------------------

inline std::string method_name(algorithms::Method m, bool aaa2) {
    switch (m) {
    case algorithms::Method::aaa: return aaa2 ? "aaa2" : "aaa";
    case algorithms::Method::so: return "so";
    case algorithms::Method::lso: return "lso";
    case algorithms::Method::nso: return "nso";
    }
    throw Error("method_name: unknown method");
}

inline std::pair<algorithms::Method, bool> parse_method(const std::string& name) {
    if (name == "aaa") { return {algorithms::Method::aaa, false}; }
    if (name == "aaa2") { return {algorithms::Method::aaa, true}; }
    if (name == "so") { return {algorithms::Method::so, false}; }
    if (name == "lso") { return {algorithms::Method::lso, false}; }
    if (name == "nso") { return {algorithms::Method::nso, false}; }
    throw ParseError("unknown method '" + name + "'");
}

inline std::string weighting_name(algorithms::Weighting w) {
    switch (w) {
    case algorithms::Weighting::as_given: return "data";
    case algorithms::Weighting::unit: return "unit";
    case algorithms::Weighting::relative: return "relative";
    }
    throw Error("weighting_name: unknown weighting");
}

inline algorithms::Weighting parse_weighting(const std::string& name) {
    if (name == "data") { return algorithms::Weighting::as_given; }
    if (name == "unit") { return algorithms::Weighting::unit; }
    if (name == "relative") { return algorithms::Weighting::relative; }
    throw ParseError("unknown weighting '" + name + "'");
}

/// Everything the CLI persists about a finished fit.
struct ModelFile {
    algorithms::Method method = algorithms::Method::aaa;
    bool aaa2 = false;
    int order = 0; // barycentric order k (representatives in real mode)
    bool real_mode = false;
    algorithms::FitConfig config;
    std::vector<Complex> lambdas;
    std::vector<Complex> h_values;
    std::vector<Complex> weights;
    std::vector<Complex> sigmas; // empty for unstructured models
    std::optional<statespace::FirstOrderRealization> first_order;
    std::optional<statespace::SecondOrderRealization> second_order;
    FitTrace trace;
    std::optional<std::uint64_t> seed_report;
};

namespace detail {

inline json complex_to_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline Complex complex_from_json(const json& j) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
        throw ParseError("model JSON: complex values must be {re, im} objects");
    }
    return {j.at("re").get<double>(), j.at("im").get<double>()};
}

inline json complex_array_to_json(const std::vector<Complex>& v) {
    json out = json::array();
    for (const auto& z : v) { out.push_back(complex_to_json(z)); }
    return out;
}

inline std::vector<Complex> complex_array_from_json(const json& j) {
    std::vector<Complex> out;
    for (const auto& e : j) { out.push_back(complex_from_json(e)); }
    return out;
}

inline json matrix_to_json(const ComplexMatrix& m, bool is_real) {
    json out;
    out["rows"] = m.rows();
    out["cols"] = m.cols();
    json re = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) { re.push_back(m(i, j).real()); }
    }
    out["real"] = std::move(re);
    if (!is_real) {
        json im = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) { im.push_back(m(i, j).imag()); }
        }
        out["imag"] = std::move(im);
    }
    return out;
}

inline ComplexMatrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& re = j.at("real");
    if (static_cast<Eigen::Index>(re.size()) != rows * cols) {
        throw ParseError("model JSON: matrix size mismatch");
    }
    ComplexMatrix m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index jj = 0; jj < cols; ++jj) { m(i, jj) = Complex(re[idx++].get<double>(), 0.0); }
    }
    if (j.contains("imag")) {
        const auto& im = j.at("imag");
        idx = 0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index jj = 0; jj < cols; ++jj) {
                m(i, jj) += Complex(0.0, im[idx++].get<double>());
            }
        }
    }
    return m;
}

inline json vector_to_json(const ComplexVector& v, bool is_real) {
    ComplexMatrix m(v.size(), 1);
    m.col(0) = v;
    return matrix_to_json(m, is_real);
}

inline ComplexVector vector_from_json(const json& j) { return matrix_from_json(j).col(0); }

} // namespace detail

inline void write_model_json(std::ostream& out, const ModelFile& mf) {
    json j;
    j["format"] = "baryfit-model";
    j["version"] = 1;
    j["method"] = method_name(mf.method, mf.aaa2);
    j["order"] = mf.order;
    j["real_mode"] = mf.real_mode;

    json cfg;
    cfg["kmax"] = mf.config.kmax;
    cfg["tol"] = mf.config.tol;
    cfg["sigma_real"] = mf.config.sigma_real;
    cfg["weighting"] = weighting_name(mf.config.weighting);
    cfg["rank_tol"] = mf.config.rank_tol;
    cfg["inner_max_iters"] = mf.config.inner.max_iters;
    if (mf.seed_report) { cfg["seed_report"] = *mf.seed_report; }
    j["config"] = cfg;

    json bary;
    bary["lambda"] = detail::complex_array_to_json(mf.lambdas);
    bary["h"] = detail::complex_array_to_json(mf.h_values);
    bary["w"] = detail::complex_array_to_json(mf.weights);
    if (!mf.sigmas.empty()) { bary["sigma"] = detail::complex_array_to_json(mf.sigmas); }
    j["barycentric"] = bary;

    if (mf.first_order) {
        json r;
        r["kind"] = "first_order";
        r["scalar"] = mf.first_order->is_real ? "real" : "complex";
        r["E"] = detail::matrix_to_json(mf.first_order->E, mf.first_order->is_real);
        r["A"] = detail::matrix_to_json(mf.first_order->A, mf.first_order->is_real);
        r["b"] = detail::vector_to_json(mf.first_order->b, mf.first_order->is_real);
        r["c"] = detail::vector_to_json(mf.first_order->c, mf.first_order->is_real);
        j["realization"] = r;
    } else if (mf.second_order) {
        json r;
        r["kind"] = "second_order";
        r["scalar"] = mf.second_order->is_real ? "real" : "complex";
        r["M"] = detail::matrix_to_json(mf.second_order->M, mf.second_order->is_real);
        r["D"] = detail::matrix_to_json(mf.second_order->D, mf.second_order->is_real);
        r["K"] = detail::matrix_to_json(mf.second_order->K, mf.second_order->is_real);
        r["b"] = detail::vector_to_json(mf.second_order->b, mf.second_order->is_real);
        r["c"] = detail::vector_to_json(mf.second_order->c, mf.second_order->is_real);
        j["realization"] = r;
    }

    json trace = json::array();
    for (const auto& rec : mf.trace.records) {
        json t;
        t["k"] = rec.k;
        t["order"] = rec.realization_order;
        t["selected_index"] = rec.selected_index;
        t["objective"] = rec.objective;
        t["l2_rel"] = rec.l2_rel;
        t["linf_rel"] = rec.linf_rel;
        t["ptw_max"] = rec.ptw_max;
        t["seconds"] = rec.seconds;
        t["rank"] = rec.rank;
        t["fallback"] = rec.fallback;
        t["remaining"] = rec.remaining;
        trace.push_back(t);
    }
    j["trace"] = trace;

    out << j.dump(2) << '\n';
}

inline ModelFile read_model_json(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    if (!j.contains("format") || j["format"] != "baryfit-model") {
        throw ParseError("model JSON: not a baryfit model file");
    }
    ModelFile mf;
    const auto [method, aaa2] = parse_method(j.at("method").get<std::string>());
    mf.method = method;
    mf.aaa2 = aaa2;
    mf.order = j.at("order").get<int>();
    mf.real_mode = j.at("real_mode").get<bool>();

    const json& cfg = j.at("config");
    mf.config.kmax = cfg.at("kmax").get<int>();
    mf.config.tol = cfg.at("tol").get<double>();
    mf.config.sigma_real = cfg.at("sigma_real").get<double>();
    mf.config.weighting = parse_weighting(cfg.at("weighting").get<std::string>());
    mf.config.rank_tol = cfg.at("rank_tol").get<double>();
    mf.config.inner.max_iters = cfg.at("inner_max_iters").get<int>();
    mf.config.real_mode = mf.real_mode;
    mf.config.method = mf.method;
    mf.config.aaa2 = mf.aaa2;
    if (cfg.contains("seed_report")) { mf.seed_report = cfg.at("seed_report").get<std::uint64_t>(); }

    const json& bary = j.at("barycentric");
    mf.lambdas = detail::complex_array_from_json(bary.at("lambda"));
    mf.h_values = detail::complex_array_from_json(bary.at("h"));
    mf.weights = detail::complex_array_from_json(bary.at("w"));
    if (bary.contains("sigma")) { mf.sigmas = detail::complex_array_from_json(bary.at("sigma")); }

    if (j.contains("realization")) {
        const json& r = j.at("realization");
        const bool is_real = r.at("scalar").get<std::string>() == "real";
        if (r.at("kind") == "first_order") {
            statespace::FirstOrderRealization fo;
            fo.is_real = is_real;
            fo.E = detail::matrix_from_json(r.at("E"));
            fo.A = detail::matrix_from_json(r.at("A"));
            fo.b = detail::vector_from_json(r.at("b"));
            fo.c = detail::vector_from_json(r.at("c"));
            mf.first_order = std::move(fo);
        } else if (r.at("kind") == "second_order") {
            statespace::SecondOrderRealization so;
            so.is_real = is_real;
            so.M = detail::matrix_from_json(r.at("M"));
            so.D = detail::matrix_from_json(r.at("D"));
            so.K = detail::matrix_from_json(r.at("K"));
            so.b = detail::vector_from_json(r.at("b"));
            so.c = detail::vector_from_json(r.at("c"));
            mf.second_order = std::move(so);
        } else {
            throw ParseError("model JSON: unknown realization kind");
        }
    }

    for (const auto& t : j.at("trace")) {
        FitRecord rec;
        rec.k = t.at("k").get<int>();
        rec.realization_order = t.at("order").get<int>();
        rec.selected_index = t.at("selected_index").get<std::size_t>();
        rec.objective = t.at("objective").get<double>();
        rec.l2_rel = t.at("l2_rel").get<double>();
        rec.linf_rel = t.at("linf_rel").get<double>();
        rec.ptw_max = t.at("ptw_max").get<double>();
        rec.seconds = t.at("seconds").get<double>();
        rec.rank = t.at("rank").get<int>();
        rec.fallback = t.at("fallback").get<bool>();
        rec.remaining = t.at("remaining").get<std::size_t>();
        mf.trace.records.push_back(rec);
    }
    return mf;
}

inline ModelFile read_model_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) { throw ParseError("cannot open model file '" + path + "'"); }
    return read_model_json(in);
}

/// Barycentric transfer function of a loaded model (conjugate-augmented in
/// real mode).
inline std::function<Complex(Complex)> model_evaluator(const ModelFile& mf) {
    if (mf.sigmas.empty()) {
        UnstructuredBarycentric m{mf.lambdas, mf.h_values, mf.weights};
        return algorithms::evaluator(m, mf.real_mode);
    }
    SecondOrderBarycentric m{mf.lambdas, mf.h_values, mf.weights, mf.sigmas};
    return algorithms::evaluator(m, mf.real_mode);
}

/// Realization transfer function of a loaded model.
inline std::function<Complex(Complex)> realization_evaluator(const ModelFile& mf) {
    if (mf.first_order) {
        const auto r = *mf.first_order;
        return [r](Complex s) { return statespace::eval_realization(r, s); };
    }
    if (mf.second_order) {
        const auto r = *mf.second_order;
        return [r](Complex s) { return statespace::eval_realization(r, s); };
    }
    throw ParseError("model file has no realization");
}

} // namespace io
} // namespace baryfit
