#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace cbd {

// One checked inequality: lhs <= rhs with the measured ratio. The anchor is a
// stable machine-readable name of the inequality, so failures in summary.csv
// are self-documenting.
struct CheckRow {
    std::string anchor;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool pass = false;

    static CheckRow leq(const std::string& anchor, double lhs, double rhs, double rel_tol = 1e-9);
};

// JSON-safe number: non-finite doubles become strings ("inf", "-inf", "nan").
nlohmann::json json_num(double v);

nlohmann::json checks_to_json(const std::vector<CheckRow>& rows);
std::vector<CheckRow> checks_from_json(const nlohmann::json& j);
void write_summary_csv(std::ostream& os, const std::vector<CheckRow>& rows);
bool all_pass(const std::vector<CheckRow>& rows);

// Atomic file write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

} // namespace cbd
