#pragma once

// Structured-text run reports:
//
//   [run]
//   command: fit
//   version: 1.0.0
//   ...
//   [config]
//   ...
//   [result]
//   ...
//
// One `key: value` per line, sections in fixed order, keys in insertion
// order. Wall time is only written when requested so that reports for the
// same input, config and seed are byte-identical.

#include "alphacomp/io.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace alphacomp {

class RunReport {
public:
    using Entries = std::vector<std::pair<std::string, std::string>>;

    explicit RunReport(std::string command) : command_(std::move(command)) {}

    void set_input(const std::string& path, const std::string& digest) {
        input_ = path;
        digest_ = digest;
    }
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void set_wall_time(double seconds) { wall_time_ = seconds; }

    void config(std::string key, std::string value) { config_.emplace_back(std::move(key), std::move(value)); }
    void config(std::string key, double value) { config(std::move(key), format_double(value)); }

    void result(std::string key, std::string value) { result_.emplace_back(std::move(key), std::move(value)); }
    void result(std::string key, double value) { result(std::move(key), format_double(value)); }
    void result(std::string key, bool value) { result(std::move(key), std::string(value ? "true" : "false")); }

    const Entries& results() const { return result_; }

    void write(std::ostream& out) const {
        out << "[run]\n";
        out << "command: " << command_ << '\n';
        out << "version: " << kVersion << '\n';
        if (input_) out << "input: " << *input_ << '\n' << "input_digest: fnv1a64:" << digest_ << '\n';
        if (seed_) out << "seed: " << *seed_ << '\n';
        if (wall_time_) out << "wall_time_s: " << format_double(*wall_time_) << '\n';
        out << "[config]\n";
        for (const auto& [k, v] : config_) out << k << ": " << v << '\n';
        out << "[result]\n";
        for (const auto& [k, v] : result_) out << k << ": " << v << '\n';
    }

private:
    std::string command_;
    std::optional<std::string> input_;
    std::string digest_;
    std::optional<std::uint64_t> seed_;
    std::optional<double> wall_time_;
    Entries config_;
    Entries result_;
};

} // namespace alphacomp
