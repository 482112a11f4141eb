#include "cbd/config.hpp"
#include "cbd/report.hpp"
#include "cbd/suites.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

int run_suite_command(const std::string& suite, const std::string& config_path, std::uint64_t seed_override,
                      bool has_seed, const std::string& out_dir) {
    cbd::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = cbd::ExperimentConfig::parse_file(config_path);
        if (has_seed) cfg.seed = seed_override;
        cfg.validate();
    } catch (const cbd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    nlohmann::json report = cbd::run_suite_json(suite, cfg);
    // timestamp is informational only and excluded from determinism comparisons
    report["timestamp"] = timestamp_utc();

    std::filesystem::create_directories(out_dir);
    cbd::write_file_atomic(out_dir + "/report.json", report.dump(2) + "\n");
    std::ostringstream csv;
    cbd::write_summary_csv(csv, cbd::checks_from_json(report.at("checks")));
    cbd::write_file_atomic(out_dir + "/summary.csv", csv.str());

    int failures = 0;
    for (const auto& row : cbd::checks_from_json(report.at("checks"))) {
        std::cout << (row.pass ? "pass" : "FAIL") << "  " << row.anchor << "  lhs=" << row.lhs
                  << "  rhs=" << row.rhs << "\n";
        if (!row.pass) ++failures;
    }
    std::cout << (failures == 0 ? "all checks passed" : "checks failed") << "; reports in " << out_dir << "\n";
    return failures == 0 ? 0 : 1;
}

int rerender_report(const std::string& in_path, const std::string& out_dir) {
    std::ifstream is(in_path);
    if (!is) {
        std::cerr << "error: cannot read " << in_path << "\n";
        return 2;
    }
    nlohmann::json report;
    try {
        is >> report;
        std::ostringstream csv;
        cbd::write_summary_csv(csv, cbd::checks_from_json(report.at("checks")));
        std::filesystem::create_directories(out_dir);
        cbd::write_file_atomic(out_dir + "/summary.csv", csv.str());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cout << "summary.csv written to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cbdlab: convex-body sparse domination toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool has_seed = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file (key = value sections)");
        sub->add_option("--out", out_dir, "output directory for report.json and summary.csv");
        sub->add_option("--seed", seed, "override the configured seed")->each([&](const std::string&) {
            has_seed = true;
        });
    };

    for (const std::string name : {"verify", "dominate", "weights", "commutator", "equivalence"})
        add_common(app.add_subcommand(name, "run the " + name + " suite"));

    std::string report_in = "out/report.json";
    auto* rep = app.add_subcommand("report", "re-render report.json to summary.csv");
    rep->add_option("--in", report_in, "input report.json");
    rep->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string suite = app.get_subcommands().front()->get_name();
    if (suite == "report") return rerender_report(report_in, out_dir);
    return run_suite_command(suite, config_path, seed, has_seed, out_dir);
}
