#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cbd {

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error("config line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Line-structured plain-text experiment configuration: [section] headers with
// key = value entries, '#' comments. Unknown sections or keys are rejected
// with the offending line number. Every field has a validated default.
struct ExperimentConfig {
    // [grid]
    int d = 1;
    int L = 8;
    // [value]
    int n = 2;
    int m = 1;
    double r = 2.0; // "inf" accepted
    // [operator]
    std::string kernel = "hilbert_periodic";
    double kernel_c = 1.0;
    double kernel_delta = 0.7;
    // [dominate]
    double epsilon = 0.05;
    double eps_mvee = 1e-6;
    // [equivalence]
    double eq_p = 1.0;
    double eq_q = 1.0;
    double eq_delta = 0.5;
    int eq_seeds = 5;
    // [weights]
    int weight_directions = 64;
    // [commutator]
    std::string commutator_kind = "classical";
    double comm_s = 4.0;
    double comm_t = 4.0;
    double comm_p = 2.0;
    int comm_k = 2;
    // [run]
    std::uint64_t seed = 1234;

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_string(const std::string& text);
    void validate() const; // throws std::invalid_argument on bad combinations
};

} // namespace cbd
