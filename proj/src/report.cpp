#include "cbd/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cbd {

CheckRow CheckRow::leq(const std::string& anchor, double lhs, double rhs, double rel_tol) {
    CheckRow row;
    row.anchor = anchor;
    row.lhs = lhs;
    row.rhs = rhs;
    row.ratio = rhs != 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    row.pass = std::isfinite(lhs) && lhs <= rhs + rel_tol * std::max(std::abs(rhs), 1.0);
    return row;
}

nlohmann::json json_num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

namespace {
double num_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}
} // namespace

nlohmann::json checks_to_json(const std::vector<CheckRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"anchor", r.anchor},
                       {"lhs", json_num(r.lhs)},
                       {"rhs", json_num(r.rhs)},
                       {"ratio", json_num(r.ratio)},
                       {"pass", r.pass}});
    }
    return arr;
}

std::vector<CheckRow> checks_from_json(const nlohmann::json& j) {
    std::vector<CheckRow> rows;
    for (const auto& e : j) {
        CheckRow r;
        r.anchor = e.at("anchor").get<std::string>();
        r.lhs = num_from_json(e.at("lhs"));
        r.rhs = num_from_json(e.at("rhs"));
        r.ratio = num_from_json(e.at("ratio"));
        r.pass = e.at("pass").get<bool>();
        rows.push_back(r);
    }
    return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
    os << "anchor,lhs,rhs,ratio,pass\n";
    os.precision(17);
    for (const auto& r : rows)
        os << r.anchor << "," << r.lhs << "," << r.rhs << "," << r.ratio << "," << (r.pass ? "true" : "false")
           << "\n";
}

bool all_pass(const std::vector<CheckRow>& rows) {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
        os << contents;
        if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("rename failed: " + path);
}

} // namespace cbd
