#pragma once

// Serialization: the flat JSON schema for parameter bundles, the fixed-header
// CSV formats for sweeps and experiment tables, and line-oriented input
// parsing. All reals are rendered with up to 17 significant digits so files
// round-trip losslessly.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ptt/aggregate.hpp"
#include "ptt/analysis.hpp"
#include "ptt/core.hpp"

namespace ptt {

inline std::string format_real(double v) { return detail::real_to_string(v); }

// ---------------------------------------------------------------------------
// PttParams <-> JSON. Key order is part of the format.
// ---------------------------------------------------------------------------

inline std::string params_to_json(const PttParams& prm) {
    std::string out = "{";
    auto field = [&out](const char* key, double v, bool first = false) {
        if (!first) out += ", ";
        out += '"';
        out += key;
        out += "\": ";
        out += format_real(v);
    };
    field("epsilon", prm.epsilon, true);
    field("eta", prm.eta);
    field("k", prm.k);
    field("a", prm.a);
    field("B", prm.B);
    field("p", prm.p);
    field("q", prm.q);
    out += ", \"family\": \"";
    out += family_name(prm.family);
    out += "\", \"analysis_only\": ";
    out += prm.analysis_only ? "true" : "false";
    out += "}";
    return out;
}

inline PttParams params_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw argument_error(std::string("malformed params JSON: ") + e.what());
    }
    PttParams prm;
    auto real = [&doc](const char* key) {
        if (!doc.contains(key) || !doc[key].is_number())
            throw argument_error(std::string("params JSON missing numeric field '") + key + "'");
        return doc[key].get<double>();
    };
    prm.epsilon = real("epsilon");
    prm.eta = real("eta");
    prm.k = real("k");
    prm.a = real("a");
    prm.B = real("B");
    prm.p = real("p");
    prm.q = real("q");
    if (!doc.contains("family") || !doc["family"].is_string())
        throw argument_error("params JSON missing string field 'family'");
    prm.family = family_from_name(doc["family"].get<std::string>());
    prm.analysis_only = doc.value("analysis_only", false);
    return prm;
}

inline PttParams load_params_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open params file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return params_from_json(buffer.str());
}

// ---------------------------------------------------------------------------
// CSV writers with fixed headers.
// ---------------------------------------------------------------------------

inline std::string curve_csv(std::span<const CurvePoint> points) {
    std::string out = "x,y,series\n";
    for (const auto& point : points) {
        out += format_real(point.x);
        out += ',';
        out += format_real(point.y);
        out += ',';
        out += point.series;
        out += '\n';
    }
    return out;
}

inline std::string feasibility_csv(std::span<const FeasibilityReport> reports) {
    std::string out = "eta,f1,f2,f3,f4,sys29,sys30\n";
    for (const auto& r : reports) {
        out += format_real(r.eta);
        for (double v : {r.f1, r.f2, r.f3, r.f4}) {
            out += ',';
            out += format_real(v);
        }
        out += r.sys29 ? ",1" : ",0";
        out += r.sys30 ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

inline std::string error_table_csv(const ErrorTable& table) {
    std::string out = "n,d,epsilon,mechanism,mean_abs_err,max_err,quantile_err,beta,trials,m_bound\n";
    for (const auto& row : table.rows) {
        out += std::to_string(row.n);
        out += ',';
        out += std::to_string(row.d);
        out += ',';
        out += format_real(row.epsilon);
        out += ',';
        out += row.mechanism;
        for (double v : {row.mean_abs_err, row.max_err, row.quantile_err, row.beta}) {
            out += ',';
            out += format_real(v);
        }
        out += ',';
        out += std::to_string(row.trials);
        out += ',';
        out += format_real(row.m_bound);
        out += '\n';
    }
    return out;
}

inline std::string slope_fit_json(const SlopeFit& fit) {
    return "{\"slope\": " + format_real(fit.slope) +
           ", \"intercept\": " + format_real(fit.intercept) +
           ", \"r_squared\": " + format_real(fit.r_squared) + "}";
}

// write-then-rename so readers never observe a partial file
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw io_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("cannot rename " + tmp.string() + " to " + path.string());
}

// ---------------------------------------------------------------------------
// Input parsing: newline-delimited reals, or CSV whose first row is a header.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    fields.push_back(field);
    return fields;
}

inline bool parse_real(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0';
}

inline double parse_real_or_throw(const std::string& token, std::size_t row) {
    double v = 0.0;
    if (!parse_real(token, v))
        throw argument_error("row " + std::to_string(row) + ": cannot parse '" + token +
                             "' as a real");
    return v;
}

}  // namespace detail

// Single-column ingest. Lines containing a comma are treated as CSV with a
// header row; `column` selects by header name, or by 0-based index when it
// parses as an integer (default: first column). A non-numeric first line of
// comma-free input is skipped as a single-column header.
inline std::vector<double> read_values(std::istream& in, const std::string& column = "") {
    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    bool csv_mode = false;
    std::size_t column_index = 0;
    bool saw_first = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_first) {
            saw_first = true;
            csv_mode = line.find(',') != std::string::npos;
            if (csv_mode) {
                const auto header = detail::split_csv_row(line);
                if (column.empty()) {
                    column_index = 0;
                } else {
                    char* end = nullptr;
                    const long idx = std::strtol(column.c_str(), &end, 10);
                    if (end != column.c_str() && *end == '\0') {
                        column_index = static_cast<std::size_t>(idx);
                    } else {
                        const auto it = std::find(header.begin(), header.end(), column);
                        if (it == header.end())
                            throw argument_error("column '" + column + "' not in CSV header");
                        column_index = static_cast<std::size_t>(it - header.begin());
                    }
                }
                if (column_index >= header.size())
                    throw argument_error("column index " + std::to_string(column_index) +
                                         " out of range for CSV with " +
                                         std::to_string(header.size()) + " columns");
                continue;  // header row carries no value
            }
            double probe = 0.0;
            if (!detail::parse_real(line, probe)) continue;  // single-column header
        }
        if (csv_mode) {
            const auto fields = detail::split_csv_row(line);
            if (column_index >= fields.size())
                throw argument_error("row " + std::to_string(row) + ": only " +
                                     std::to_string(fields.size()) + " columns");
            values.push_back(detail::parse_real_or_throw(fields[column_index], row));
        } else {
            values.push_back(detail::parse_real_or_throw(line, row));
        }
    }
    return values;
}

// d-column CSV ingest for multidimensional tuples; a leading non-numeric row
// is skipped as a header.
inline std::vector<std::vector<double>> read_tuples(std::istream& in, std::size_t dimension) {
    std::vector<std::vector<double>> tuples;
    std::string line;
    std::size_t row = 0;
    bool saw_first = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_row(line);
        if (!saw_first) {
            saw_first = true;
            double probe = 0.0;
            if (!detail::parse_real(fields[0], probe)) continue;  // header row
        }
        if (fields.size() != dimension)
            throw argument_error("row " + std::to_string(row) + ": expected " +
                                 std::to_string(dimension) + " columns, got " +
                                 std::to_string(fields.size()));
        std::vector<double> tuple(dimension);
        for (std::size_t j = 0; j < dimension; ++j)
            tuple[j] = detail::parse_real_or_throw(fields[j], row);
        tuples.push_back(std::move(tuple));
    }
    return tuples;
}

}  // namespace ptt
