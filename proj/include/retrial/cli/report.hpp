#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "retrial/cli/config.hpp"
#include "retrial/cli/runner.hpp"

namespace retrial::cli {

inline constexpr const char* csv_header =
    "param,value,engine,stable,e_n,e_m,p_a,p_f,p_w,e_w,e_n_hw,e_m_hw,p_a_hw,p_f_hw,p_w_hw,e_w_hw";

/// 17 significant digits: enough for every double to parse back to itself.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << csv_header << '\n';
    for (const auto& r : rows) {
        os << r.param << ',' << (r.value ? format_number(*r.value) : "") << ','
           << engine_name(r.engine) << ',' << (r.stable ? "true" : "false");
        for (int k = 0; k < metric_count; ++k) {
            os << ',' << (r.metrics ? format_number((*r.metrics)[k]) : "");
        }
        for (int k = 0; k < metric_count; ++k) {
            os << ',' << (r.half_widths ? format_number((*r.half_widths)[k]) : "");
        }
        os << '\n';
    }
}

inline json row_to_json(const ResultRow& r) {
    json j;
    j["param"] = r.param;
    j["value"] = r.value ? json(*r.value) : json(nullptr);
    j["engine"] = engine_name(r.engine);
    j["stable"] = r.stable;
    j["rho_eff"] = r.rho_eff;
    for (int k = 0; k < metric_count; ++k) {
        j[metric_names[k]] = r.metrics ? json((*r.metrics)[k]) : json(nullptr);
        j[std::string(metric_names[k]) + "_hw"] = r.half_widths ? json((*r.half_widths)[k]) : json(nullptr);
    }
    if (r.wait_parts) {
        j["e_w0"] = r.wait_parts->idle;
        j["e_w1"] = r.wait_parts->inbound;
        j["e_w2"] = r.wait_parts->outbound;
    }
    if (r.oracle_n_max) j["n_max"] = *r.oracle_n_max;
    return j;
}

inline void write_json(std::ostream& os, const std::vector<ResultRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(row_to_json(r));
    os << arr.dump(2) << '\n';
}

inline void write_rows(std::ostream& os, const std::vector<ResultRow>& rows, const std::string& format) {
    if (format == "json") {
        write_json(os, rows);
    } else {
        write_csv(os, rows);
    }
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline void write_report(std::ostream& os, const ValidationReport& report, const std::string& format) {
    if (format == "json") {
        json checks = json::array();
        for (const auto& c : report.checks) {
            checks.push_back({{"check", c.name},
                              {"status", status_name(c.status)},
                              {"value", std::isnan(c.value) ? json(nullptr) : json(c.value)},
                              {"tolerance", std::isnan(c.tolerance) ? json(nullptr) : json(c.tolerance)},
                              {"detail", c.detail}});
        }
        os << json{{"passed", report.passed()}, {"checks", checks}}.dump(2) << '\n';
        return;
    }
    os << "check,status,value,tolerance,detail\n";
    for (const auto& c : report.checks) {
        os << c.name << ',' << status_name(c.status) << ','
           << (std::isnan(c.value) ? "" : format_number(c.value)) << ','
           << (std::isnan(c.tolerance) ? "" : format_number(c.tolerance)) << ',' << csv_field(c.detail)
           << '\n';
    }
}

}  // namespace retrial::cli
