#pragma once

/**
 * @file io.hpp
 * @brief CSV point-set files and the JSON run report.
 */

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuzzykm/core.hpp"
#include "fuzzykm/error.hpp"

namespace fuzzykm {

// ---------------------------------------------------------------------------
// CSV

/// No weight column, a header name, or a zero-based column index.
using WeightColumn = std::variant<std::monostate, std::string, std::size_t>;

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

inline std::optional<double> parse_double(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* begin = cell.data();
    if (*begin == '+') ++begin;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
}

inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Reads comma-separated rows into a point set. A first row containing any
/// non-numeric cell is a header. Blank lines are skipped; row numbers in
/// errors count file lines from 1.
inline WeightedPointSet read_csv(std::istream& in, const WeightColumn& weight_column = {}) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (detail::trim(line).empty()) continue;
        rows.push_back(detail::split_csv_line(line));
        line_numbers.push_back(line_no);
    }
    detail::require(!rows.empty(), ErrorKind::invalid_input, "input has no rows");

    std::optional<std::vector<std::string>> header;
    for (const auto& cell : rows.front()) {
        if (!detail::parse_double(cell)) {
            header = rows.front();
            break;
        }
    }
    const std::size_t first_data = header ? 1 : 0;
    const std::size_t columns = rows.front().size();

    std::optional<std::size_t> wcol;
    if (const auto* name = std::get_if<std::string>(&weight_column)) {
        detail::require(header.has_value(), ErrorKind::invalid_input,
                        "weight column '" + *name + "' named but the input has no header");
        for (std::size_t c = 0; c < header->size(); ++c) {
            if ((*header)[c] == *name) wcol = c;
        }
        detail::require(wcol.has_value(), ErrorKind::invalid_input,
                        "header has no column named '" + *name + "'");
    } else if (const auto* index = std::get_if<std::size_t>(&weight_column)) {
        detail::require(*index < columns, ErrorKind::invalid_input,
                        "weight column index " + std::to_string(*index) + " but rows have " +
                            std::to_string(columns) + " columns");
        wcol = *index;
    }
    detail::require(columns > (wcol ? 1u : 0u), ErrorKind::invalid_input,
                    "rows have no coordinate columns");
    detail::require(rows.size() > first_data, ErrorKind::invalid_input, "input has no data rows");

    std::vector<Point> points;
    std::vector<double> weights;
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        const std::string where = "row " + std::to_string(line_numbers[r]) + ": ";
        const auto& cells = rows[r];
        detail::require(cells.size() == columns, ErrorKind::invalid_input,
                        where + "expected " + std::to_string(columns) + " columns, found " +
                            std::to_string(cells.size()));
        Point p;
        double w = 1.0;
        for (std::size_t c = 0; c < columns; ++c) {
            const auto v = detail::parse_double(cells[c]);
            detail::require(v.has_value() && std::isfinite(*v), ErrorKind::invalid_input,
                            where + "column " + std::to_string(c) + " is not a finite number: '" +
                                cells[c] + "'");
            if (wcol && c == *wcol) {
                detail::require(*v >= 0.0, ErrorKind::invalid_input,
                                where + "negative weight " + cells[c]);
                w = *v;
            } else {
                p.push_back(*v);
            }
        }
        points.push_back(std::move(p));
        weights.push_back(w);
    }
    return WeightedPointSet(std::move(points), std::move(weights));
}

inline WeightedPointSet ingest_csv(const std::string& path, const WeightColumn& weight_column = {}) {
    std::ifstream in(path);
    detail::require(in.good(), ErrorKind::invalid_input, "cannot open '" + path + "'");
    return read_csv(in, weight_column);
}

/// Header x0..x{D-1} plus a trailing `w` column when `with_weights`. Values
/// use the shortest round-trip representation.
inline void write_csv(std::ostream& out, const WeightedPointSet& x, bool with_weights = true) {
    for (std::size_t d = 0; d < x.dim(); ++d) out << (d ? "," : "") << 'x' << d;
    if (with_weights) out << ",w";
    out << '\n';
    for (std::size_t n = 0; n < x.size(); ++n) {
        for (std::size_t d = 0; d < x.dim(); ++d) {
            out << (d ? "," : "") << detail::format_double(x.point(n)[d]);
        }
        if (with_weights) out << ',' << detail::format_double(x.weight(n));
        out << '\n';
    }
}

inline void export_csv(const std::string& path, const WeightedPointSet& x, bool with_weights = true) {
    std::ofstream out(path);
    detail::require(out.good(), ErrorKind::invalid_input, "cannot write '" + path + "'");
    write_csv(out, x, with_weights);
}

// ---------------------------------------------------------------------------
// Run report

inline constexpr int kReportSchemaVersion = 1;

struct ReportParameters {
    std::size_t k = 0;
    int m = 2;
    std::optional<double> epsilon;
    std::optional<double> alpha;
    std::uint64_t seed = 0;
    /// Size overrides and other solver-specific settings.
    nlohmann::json overrides = nlohmann::json::object();

    friend bool operator==(const ReportParameters&, const ReportParameters&) = default;
};

struct TraceSummary {
    std::size_t iterations = 0;
    std::string termination;
    double initial_cost = 0.0;

    friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

/// Thresholds and factors the analysis implies for this run.
struct AnalyticConstants {
    /// Cluster weight at or below which a fuzzy cluster can be merged away.
    std::optional<double> pruning_rmin;
    /// Minimum cluster weight assumed by the rounding guarantee.
    std::optional<double> rounding_rmin;
    /// Copies per point assumed by the analysis (never materialized).
    std::optional<double> duplication_factor;

    friend bool operator==(const AnalyticConstants&, const AnalyticConstants&) = default;
};

struct RunReport {
    int schema_version = kReportSchemaVersion;
    std::string solver;
    ReportParameters parameters;
    std::vector<Point> means;
    double cost = 0.0;
    std::vector<double> cluster_weights;
    std::optional<TraceSummary> trace;
    double wall_time_seconds = 0.0;
    AnalyticConstants constants;
    nlohmann::json details = nlohmann::json::object();

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

namespace detail {

/// JSON has no infinities; they travel as strings.
inline nlohmann::json number_to_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan") return NAN;
    }
    fail(ErrorKind::invalid_input, "expected a number, got " + j.dump());
}

inline void require_known_keys(const nlohmann::json& j, std::initializer_list<const char*> keys,
                               const std::string& where) {
    require(j.is_object(), ErrorKind::invalid_input, where + " must be an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        require(known, ErrorKind::invalid_input, "unknown field '" + item.key() + "' in " + where);
    }
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* key,
                                   const std::string& where) {
    require(j.contains(key), ErrorKind::invalid_input,
            "missing field '" + std::string(key) + "' in " + where);
    return j.at(key);
}

inline std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return number_from_json(j.at(key));
}

inline nlohmann::json optional_to_json(const std::optional<double>& v) {
    return v ? number_to_json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json to_json(const RunReport& r) {
    nlohmann::json means = nlohmann::json::array();
    for (const auto& mu : r.means) {
        nlohmann::json row = nlohmann::json::array();
        for (double v : mu) row.push_back(detail::number_to_json(v));
        means.push_back(std::move(row));
    }
    nlohmann::json weights = nlohmann::json::array();
    for (double v : r.cluster_weights) weights.push_back(detail::number_to_json(v));

    nlohmann::json j = {
        {"schema_version", r.schema_version},
        {"solver", r.solver},
        {"parameters",
         {{"k", r.parameters.k},
          {"m", r.parameters.m},
          {"epsilon", detail::optional_to_json(r.parameters.epsilon)},
          {"alpha", detail::optional_to_json(r.parameters.alpha)},
          {"seed", r.parameters.seed},
          {"overrides", r.parameters.overrides}}},
        {"means", std::move(means)},
        {"cost", detail::number_to_json(r.cost)},
        {"cluster_weights", std::move(weights)},
        {"trace", nullptr},
        {"wall_time_seconds", r.wall_time_seconds},
        {"constants",
         {{"pruning_rmin", detail::optional_to_json(r.constants.pruning_rmin)},
          {"rounding_rmin", detail::optional_to_json(r.constants.rounding_rmin)},
          {"duplication_factor", detail::optional_to_json(r.constants.duplication_factor)}}},
        {"details", r.details},
    };
    if (r.trace) {
        j["trace"] = {{"iterations", r.trace->iterations},
                      {"termination", r.trace->termination},
                      {"initial_cost", detail::number_to_json(r.trace->initial_cost)}};
    }
    return j;
}

/// Strict reader: unknown fields and other schema versions are rejected.
inline RunReport report_from_json(const nlohmann::json& j) {
    using detail::field;
    detail::require_known_keys(j,
                               {"schema_version", "solver", "parameters", "means", "cost",
                                "cluster_weights", "trace", "wall_time_seconds", "constants",
                                "details"},
                               "report");
    RunReport r;
    try {
        r.schema_version = field(j, "schema_version", "report").get<int>();
        detail::require(r.schema_version == kReportSchemaVersion, ErrorKind::invalid_input,
                        "unsupported report schema version " + std::to_string(r.schema_version));
        r.solver = field(j, "solver", "report").get<std::string>();

        const auto& p = field(j, "parameters", "report");
        detail::require_known_keys(p, {"k", "m", "epsilon", "alpha", "seed", "overrides"},
                                   "parameters");
        r.parameters.k = field(p, "k", "parameters").get<std::size_t>();
        r.parameters.m = field(p, "m", "parameters").get<int>();
        r.parameters.epsilon = detail::optional_number(p, "epsilon");
        r.parameters.alpha = detail::optional_number(p, "alpha");
        r.parameters.seed = field(p, "seed", "parameters").get<std::uint64_t>();
        r.parameters.overrides = field(p, "overrides", "parameters");

        for (const auto& row : field(j, "means", "report")) {
            Point mu;
            for (const auto& v : row) mu.push_back(detail::number_from_json(v));
            r.means.push_back(std::move(mu));
        }
        r.cost = detail::number_from_json(field(j, "cost", "report"));
        for (const auto& v : field(j, "cluster_weights", "report")) {
            r.cluster_weights.push_back(detail::number_from_json(v));
        }
        const auto& t = field(j, "trace", "report");
        if (!t.is_null()) {
            detail::require_known_keys(t, {"iterations", "termination", "initial_cost"}, "trace");
            r.trace = TraceSummary{field(t, "iterations", "trace").get<std::size_t>(),
                                   field(t, "termination", "trace").get<std::string>(),
                                   detail::number_from_json(field(t, "initial_cost", "trace"))};
        }
        r.wall_time_seconds = field(j, "wall_time_seconds", "report").get<double>();

        const auto& c = field(j, "constants", "report");
        detail::require_known_keys(c, {"pruning_rmin", "rounding_rmin", "duplication_factor"},
                                   "constants");
        r.constants.pruning_rmin = detail::optional_number(c, "pruning_rmin");
        r.constants.rounding_rmin = detail::optional_number(c, "rounding_rmin");
        r.constants.duplication_factor = detail::optional_number(c, "duplication_factor");
        r.details = field(j, "details", "report");
    } catch (const nlohmann::json::exception& e) {
        detail::fail(ErrorKind::invalid_input, std::string("malformed report: ") + e.what());
    }
    return r;
}

inline std::string dump_report(const RunReport& r, bool compact = false) {
    return to_json(r).dump(compact ? -1 : 2);
}

inline RunReport parse_report(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        detail::fail(ErrorKind::invalid_input, std::string("report is not valid JSON: ") + e.what());
    }
    return report_from_json(j);
}

}  // namespace fuzzykm
