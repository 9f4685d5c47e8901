#pragma once

// CSV ingestion, number formatting and the flat key=value config format.

#include "alphacomp/errors.hpp"
#include "alphacomp/sim_harness.hpp"
#include "alphacomp/simplex.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace alphacomp {

inline constexpr const char* kVersion = "1.0.0";

// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> lines;
    for (auto piece : split(text, '\n')) {
        if (!piece.empty() && piece.back() == '\r') piece.remove_suffix(1);
        lines.emplace_back(piece);
    }
    return lines;
}

} // namespace detail

enum class HeaderMode { auto_detect, present, absent };
enum class ZeroPolicy { error, epsilon_replace };
enum class ClosurePolicy { strict, renormalize };

// Row sums may be this far from one under the strict policy.
inline constexpr double kStrictClosureTolerance = 1e-3;

struct LoadOptions {
    HeaderMode header = HeaderMode::auto_detect;
    ZeroPolicy zero_policy = ZeroPolicy::error;
    double epsilon = 1e-6;
    ClosurePolicy closure = ClosurePolicy::renormalize;
};

struct Dataset {
    std::string name;
    std::vector<std::string> component_labels;
    std::vector<Composition> rows;
    std::string provenance;

    std::size_t dimension() const { return component_labels.size(); }
    LogData logs() const { return LogData::from_compositions(rows); }
};

inline Dataset parse_csv(std::string_view text, const LoadOptions& options, const std::string& name = "data") {
    Dataset ds;
    ds.name = name;
    ds.provenance = "user-supplied CSV";

    auto lines = detail::lines_of(text);
    std::erase_if(lines, [](const std::string& l) { return detail::trim(l).empty(); });
    if (lines.empty()) throw IoError(name + ": no rows");

    std::size_t first_data = 0;
    const auto first_cells = detail::split(lines.front(), ',');
    bool header = options.header == HeaderMode::present;
    if (options.header == HeaderMode::auto_detect) {
        double tmp;
        header = std::any_of(first_cells.begin(), first_cells.end(),
                             [&](std::string_view c) { return !detail::parse_double(c, tmp); });
    }
    const std::size_t dim = first_cells.size();
    if (header) {
        for (auto c : first_cells) ds.component_labels.push_back(detail::unquote(c));
        first_data = 1;
    } else {
        ds.component_labels = default_labels(dim);
    }
    if (dim < 2) throw IoError(name + ": need at least 2 columns");

    for (std::size_t li = first_data; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        const auto cells = detail::split(lines[li], ',');
        if (cells.size() != dim) {
            throw IoError(name + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                          " cells, expected " + std::to_string(dim));
        }
        std::vector<double> values(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            if (!detail::parse_double(cells[j], values[j]) || !std::isfinite(values[j])) {
                throw IoError(name + ": line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                              " is not a number: '" + std::string(detail::trim(cells[j])) + "'");
            }
            if (values[j] < 0.0) {
                throw DomainError(name + ": line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                                  " is negative");
            }
            if (values[j] == 0.0) {
                if (options.zero_policy == ZeroPolicy::error) {
                    throw DomainError(name + ": zero at line " + std::to_string(line_no) + ", column " +
                                      std::to_string(j + 1) + " (" + ds.component_labels[j] +
                                      "); use the epsilon zero policy to replace zeros");
                }
                values[j] = options.epsilon;
            }
        }
        if (options.closure == ClosurePolicy::strict) {
            const double sum = std::accumulate(values.begin(), values.end(), 0.0);
            if (std::abs(sum - 1.0) > kStrictClosureTolerance) {
                throw DomainError(name + ": line " + std::to_string(line_no) + " sums to " + format_double(sum) +
                                  " (strict closure allows deviation " + format_double(kStrictClosureTolerance) +
                                  ")");
            }
        }
        ds.rows.push_back(Composition::closure(std::move(values)));
    }
    if (ds.rows.empty()) throw IoError(name + ": no data rows");
    return ds;
}

inline Dataset load_csv(const std::string& path, const LoadOptions& options = {}) {
    return parse_csv(read_file(path), options, path);
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out << ',';
        out << cells[k];
    }
    out << '\n';
}

inline void write_csv_row(std::ostream& out, std::span<const double> values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out << ',';
        out << format_double(values[k]);
    }
    out << '\n';
}

// ---------------------------------------------------------------------------
// key = value configs

using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(std::string_view text) {
    KeyValues kv;
    const auto lines = detail::lines_of(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        std::string_view line = lines[li];
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(li + 1) + ": expected key = value");
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("config line " + std::to_string(li + 1) + ": empty key");
        if (!kv.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(li + 1) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

namespace detail {

// Real-valued config fields must be written with a decimal point.
inline double config_real(const std::string& key, std::string_view text) {
    text = trim(text);
    double v;
    if (text.find('.') == std::string_view::npos || !parse_double(text, v) || !std::isfinite(v)) {
        throw ConfigError("config '" + key + "': '" + std::string(text) +
                          "' is not a real number with an explicit decimal point");
    }
    return v;
}

inline std::vector<double> config_reals(const std::string& key, std::string_view text) {
    std::vector<double> out;
    for (auto piece : split(text, ',')) out.push_back(config_real(key, piece));
    return out;
}

inline std::uint64_t config_count(const std::string& key, std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ConfigError("config '" + key + "': '" + std::string(text) + "' is not a non-negative integer");
    }
    return v;
}

} // namespace detail

enum class StudyKind { curve, order };

struct SimulationRequest {
    StudyKind study = StudyKind::curve;
    SimConfig config;
};

/// Keys: study (curve|order), mode (coalescing|general), alphas, b, c, b_vec,
/// n, seed, D. Without `alphas` the grid is 10 geometric points from 0.5 down
/// to 0.001.
inline SimulationRequest parse_simulation_config(std::string_view text) {
    const auto kv = parse_key_values(text);
    static const std::vector<std::string> known{"study", "mode", "alphas", "b", "c", "b_vec", "n", "seed", "D"};
    for (const auto& [k, v] : kv) {
        if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
    }
    SimulationRequest req;
    auto get = [&](const std::string& k) -> const std::string* {
        const auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (const auto* s = get("study")) {
        if (*s == "curve") req.study = StudyKind::curve;
        else if (*s == "order") req.study = StudyKind::order;
        else throw ConfigError("study must be 'curve' or 'order'");
    }
    auto& cfg = req.config;
    if (const auto* s = get("mode")) {
        if (*s == "coalescing") cfg.mode = SimMode::coalescing;
        else if (*s == "general") cfg.mode = SimMode::general;
        else throw ConfigError("mode must be 'coalescing' or 'general'");
    }
    cfg.alpha_grid = get("alphas") ? detail::config_reals("alphas", *get("alphas")) : geometric_grid(0.5, 1e-3, 10);
    if (const auto* s = get("b")) cfg.b = detail::config_real("b", *s);
    if (const auto* s = get("c")) cfg.c = detail::config_reals("c", *s);
    if (const auto* s = get("b_vec")) cfg.b_vec = detail::config_reals("b_vec", *s);
    if (cfg.mode == SimMode::coalescing && cfg.c.empty()) throw ConfigError("coalescing mode needs c");
    if (cfg.mode == SimMode::general && cfg.b_vec.empty()) throw ConfigError("general mode needs b_vec");
    if (const auto* s = get("n")) cfg.n = detail::config_count("n", *s);
    if (const auto* s = get("seed")) cfg.seed = detail::config_count("seed", *s);
    if (const auto* s = get("D")) {
        if (detail::config_count("D", *s) != cfg.dimension()) throw ConfigError("D does not match the parameter vectors");
    }
    if (req.study == StudyKind::curve && cfg.n < 100) throw ConfigError("curve studies need n >= 100");
    cfg.validate();
    return req;
}

} // namespace alphacomp
