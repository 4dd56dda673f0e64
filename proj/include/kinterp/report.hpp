#pragma once

// Convergence reports and their CSV, JSON and SVG forms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinterp/config.hpp"
#include "kinterp/error.hpp"
#include "kinterp/norms.hpp"

namespace kinterp {

struct LevelRow {
    int level = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    double q = 0, h = 0, rho = 0;
    double condition = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> errors;                              // one per sigma
    std::vector<std::pair<std::string, double>> metrics;     // kind-specific quantities, NaN when missing

    std::optional<double> metric(const std::string& name) const
    {
        for (const auto& [k, v] : metrics)
            if (k == name) return v;
        return std::nullopt;
    }
};

struct LevelFailure {
    int level = 0;
    std::string error;
};

struct SeriesFit {
    std::string series;   // e.g. "sigma=1", "lambda_min"
    std::string against;  // "h" or "q"
    RateFit fit;
};

struct CriterionResult {
    std::string id;  // acceptance criterion ID, e.g. "AC1/sigma=0"
    std::string quantity;
    double value = 0;
    std::optional<double> lower;
    std::optional<double> upper;
    bool passed = false;
    std::string note;
};

struct ConvergenceReport {
    std::string name;
    std::string kind;
    std::string kernel;
    IniDocument config;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<double> sigmas;
    std::vector<LevelRow> rows;
    std::vector<LevelFailure> failures;
    std::vector<SeriesFit> fits;
    std::vector<CriterionResult> criteria;
    bool completed = true;  // false when too few levels survived to fit

    bool all_passed() const
    {
        if (!completed) return false;
        return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed; });
    }
};

inline CriterionResult make_criterion(std::string id, std::string quantity, double value, std::optional<double> lower, std::optional<double> upper,
                                      std::string note = {})
{
    CriterionResult c{std::move(id), std::move(quantity), value, lower, upper, false, std::move(note)};
    c.passed = std::isfinite(value) && (!lower || value >= *lower) && (!upper || value <= *upper);
    return c;
}

inline std::string format_number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string sigma_label(double s) { return "sigma=" + format_number(s); }

// ---- JSON ----

namespace detail {

inline nlohmann::ordered_json number_or_null(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline double number_from(const nlohmann::ordered_json& j)
{
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const ConvergenceReport& r)
{
    using json = nlohmann::ordered_json;
    json j;
    j["name"] = r.name;
    j["kind"] = r.kind;
    j["kernel"] = r.kernel;
    json cfg = json::object();
    for (const auto& [sec, kvs] : r.config) {
        json s = json::object();
        for (const auto& [k, v] : kvs) s[k] = v;
        cfg[sec] = s;
    }
    j["config"] = cfg;
    json meta = json::object();
    for (const auto& [k, v] : r.metadata) meta[k] = v;
    j["metadata"] = meta;
    j["sigmas"] = r.sigmas;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json o;
        o["level"] = row.level;
        o["seed"] = row.seed;
        o["n"] = row.n;
        o["q"] = row.q;
        o["h"] = row.h;
        o["rho"] = row.rho;
        o["condition"] = detail::number_or_null(row.condition);
        json errs = json::array();
        for (double e : row.errors) errs.push_back(detail::number_or_null(e));
        o["errors"] = errs;
        json m = json::object();
        for (const auto& [k, v] : row.metrics) m[k] = detail::number_or_null(v);
        o["metrics"] = m;
        rows.push_back(o);
    }
    j["rows"] = rows;
    json fails = json::array();
    for (const auto& f : r.failures) fails.push_back({{"level", f.level}, {"error", f.error}});
    j["failures"] = fails;
    json fits = json::array();
    for (const auto& f : r.fits) {
        json o;
        o["series"] = f.series;
        o["against"] = f.against;
        o["slope"] = f.fit.slope;
        o["intercept"] = f.fit.intercept;
        o["residual"] = f.fit.residual;
        o["x"] = f.fit.x;
        o["e"] = f.fit.e;
        o["used"] = f.fit.used;
        o["excluded"] = f.fit.excluded;
        fits.push_back(o);
    }
    j["fits"] = fits;
    json crit = json::array();
    for (const auto& c : r.criteria) {
        json o;
        o["id"] = c.id;
        o["quantity"] = c.quantity;
        o["value"] = detail::number_or_null(c.value);
        o["lower"] = c.lower ? json(*c.lower) : json(nullptr);
        o["upper"] = c.upper ? json(*c.upper) : json(nullptr);
        o["passed"] = c.passed;
        o["note"] = c.note;
        crit.push_back(o);
    }
    j["criteria"] = crit;
    j["completed"] = r.completed;
    j["all_passed"] = r.all_passed();
    return j;
}

inline ConvergenceReport report_from_json(const nlohmann::ordered_json& j)
{
    try {
        ConvergenceReport r;
        r.name = j.at("name").get<std::string>();
        r.kind = j.at("kind").get<std::string>();
        r.kernel = j.at("kernel").get<std::string>();
        for (const auto& [sec, kvs] : j.at("config").items()) {
            IniSection s{sec, {}};
            for (const auto& [k, v] : kvs.items()) s.second.emplace_back(k, v.get<std::string>());
            r.config.push_back(std::move(s));
        }
        for (const auto& [k, v] : j.at("metadata").items()) r.metadata.emplace_back(k, v.get<std::string>());
        r.sigmas = j.at("sigmas").get<std::vector<double>>();
        for (const auto& o : j.at("rows")) {
            LevelRow row;
            row.level = o.at("level").get<int>();
            row.seed = o.at("seed").get<std::uint64_t>();
            row.n = o.at("n").get<std::size_t>();
            row.q = o.at("q").get<double>();
            row.h = o.at("h").get<double>();
            row.rho = o.at("rho").get<double>();
            row.condition = detail::number_from(o.at("condition"));
            for (const auto& e : o.at("errors")) row.errors.push_back(detail::number_from(e));
            for (const auto& [k, v] : o.at("metrics").items()) row.metrics.emplace_back(k, detail::number_from(v));
            r.rows.push_back(std::move(row));
        }
        for (const auto& o : j.at("failures")) r.failures.push_back({o.at("level").get<int>(), o.at("error").get<std::string>()});
        for (const auto& o : j.at("fits")) {
            SeriesFit f;
            f.series = o.at("series").get<std::string>();
            f.against = o.at("against").get<std::string>();
            f.fit.slope = o.at("slope").get<double>();
            f.fit.intercept = o.at("intercept").get<double>();
            f.fit.residual = o.at("residual").get<double>();
            f.fit.x = o.at("x").get<std::vector<double>>();
            f.fit.e = o.at("e").get<std::vector<double>>();
            f.fit.used = o.at("used").get<std::vector<std::size_t>>();
            f.fit.excluded = o.at("excluded").get<std::vector<std::size_t>>();
            r.fits.push_back(std::move(f));
        }
        for (const auto& o : j.at("criteria")) {
            CriterionResult c;
            c.id = o.at("id").get<std::string>();
            c.quantity = o.at("quantity").get<std::string>();
            c.value = detail::number_from(o.at("value"));
            if (!o.at("lower").is_null()) c.lower = o.at("lower").get<double>();
            if (!o.at("upper").is_null()) c.upper = o.at("upper").get<double>();
            c.passed = o.at("passed").get<bool>();
            c.note = o.at("note").get<std::string>();
            r.criteria.push_back(std::move(c));
        }
        r.completed = j.at("completed").get<bool>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("malformed report document: ") + e.what());
    }
}

// ---- CSV ----

inline void write_csv(std::ostream& os, const ConvergenceReport& r)
{
    std::vector<std::string> metric_names;
    for (const auto& row : r.rows)
        for (const auto& [k, v] : row.metrics)
            if (std::find(metric_names.begin(), metric_names.end(), k) == metric_names.end()) metric_names.push_back(k);
    os << "level,seed,n,q,h,rho,condition";
    for (double s : r.sigmas) os << ',' << sigma_label(s);
    for (const auto& k : metric_names) os << ',' << k;
    os << '\n';
    auto field = [&](double v) {
        if (std::isfinite(v)) os << format_number(v);
    };
    for (const auto& row : r.rows) {
        os << row.level << ',' << row.seed << ',' << row.n << ',';
        field(row.q);
        os << ',';
        field(row.h);
        os << ',';
        field(row.rho);
        os << ',';
        field(row.condition);
        for (double e : row.errors) {
            os << ',';
            field(e);
        }
        for (const auto& k : metric_names) {
            os << ',';
            if (auto v = row.metric(k)) field(*v);
        }
        os << '\n';
    }
    // fit metadata as trailing comment lines
    for (const auto& f : r.fits)
        os << "# fit " << f.series << " vs " << f.against << ": slope=" << format_number(f.fit.slope) << " intercept=" << format_number(f.fit.intercept)
           << " residual=" << format_number(f.fit.residual) << '\n';
    if (!os) throw io_error("failed writing CSV report");
}

// ---- SVG ----

inline void write_svg(std::ostream& os, const ConvergenceReport& r)
{
    constexpr double width = 640, height = 480, left = 70, right = 160, top = 30, bottom = 50;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& f : r.fits)
        for (std::size_t i = 0; i < f.fit.x.size(); ++i) {
            xmin = std::min(xmin, std::log10(f.fit.x[i]));
            xmax = std::max(xmax, std::log10(f.fit.x[i]));
            ymin = std::min(ymin, std::log10(f.fit.e[i]));
            ymax = std::max(ymax, std::log10(f.fit.e[i]));
        }
    if (!std::isfinite(xmin)) {
        xmin = -3;
        xmax = 0;
        ymin = -3;
        ymax = 0;
    }
    xmin = std::floor(xmin);
    xmax = std::max(std::ceil(xmax), xmin + 1);
    ymin = std::floor(ymin);
    ymax = std::max(std::ceil(ymax), ymin + 1);
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * ph; };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
       << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << r.name << " (" << r.kind << ", " << r.kernel
       << ")</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t = xmin; t <= xmax + 1e-9; t += 1)
        os << "<text x=\"" << px(t) << "\" y=\"" << top + ph + 18 << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e"
           << static_cast<int>(t) << "</text>\n";
    for (double t = ymin; t <= ymax + 1e-9; t += 1)
        os << "<text x=\"" << left - 6 << "\" y=\"" << py(t) + 4 << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e"
           << static_cast<int>(t) << "</text>\n";
    const std::string xlabel = r.fits.empty() ? "h" : r.fits.front().against;
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << xlabel
       << "</text>\n";
    for (std::size_t s = 0; s < r.fits.size(); ++s) {
        const auto& f = r.fits[s];
        const char* color = colors[s % std::size(colors)];
        os << "<polyline class=\"data\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < f.fit.x.size(); ++i) os << (i ? " " : "") << px(std::log10(f.fit.x[i])) << ',' << py(std::log10(f.fit.e[i]));
        os << "\"/>\n";
        const double x0 = std::log(f.fit.x.front()), x1 = std::log(f.fit.x.back());
        const double y0 = (f.fit.intercept + f.fit.slope * x0) / std::log(10.0), y1 = (f.fit.intercept + f.fit.slope * x1) / std::log(10.0);
        os << "<line class=\"fit\" x1=\"" << px(x0 / std::log(10.0)) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1 / std::log(10.0)) << "\" y2=\"" << py(y1)
           << "\" stroke=\"" << color << "\" stroke-dasharray=\"6 4\"/>\n";
        os << "<text x=\"" << left + pw + 8 << "\" y=\"" << top + 16 * (s + 1) << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
           << f.series << " slope " << format_number(std::round(f.fit.slope * 1000) / 1000) << "</text>\n";
    }
    os << "</svg>\n";
    if (!os) throw io_error("failed writing SVG report");
}

enum class ReportFormat { Csv, Json, Svg };

inline void emit_report(const ConvergenceReport& r, ReportFormat format, const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw io_error("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open '" + path.string() + "' for writing");
    try {
        switch (format) {
            case ReportFormat::Csv: write_csv(os, r); break;
            case ReportFormat::Json: os << to_json(r).dump(2) << '\n'; break;
            case ReportFormat::Svg: write_svg(os, r); break;
        }
        os.flush();
        if (!os) throw io_error("write failed");
    } catch (const io_error& e) {
        throw io_error("'" + path.string() + "': " + e.what());
    }
}

}  // namespace kinterp
