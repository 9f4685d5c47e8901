// alphacomp: command-line front end.
//
//   alphacomp transform data.csv --alpha 0.5 [--inverse | --clr]
//   alphacomp fit data.csv [--alpha-min -1 --alpha-max 1 --grid 82 --delta 0.001]
//   alphacomp profile data.csv
//   alphacomp asymptotic data.csv --alpha 0.06
//   alphacomp simulate study.cfg [--seed 7]
//   alphacomp compare data.csv [--alpha 0.06] [--dataset mammals]
//   alphacomp verify
//
// Exit codes: 0 success, 1 usage or failed verification, 2 I/O, 3 domain or
// config, 4 convergence.

#include "alphacomp/alphacomp.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace alphacomp;

namespace {

struct InputOptions {
    std::string path;
    bool no_header = false;
    std::string zero_policy = "error";
    double epsilon = 1e-6;
    std::string closure = "renormalize";
    std::string dataset;
};

struct SearchFlags {
    double alpha_min = -1.0;
    double alpha_max = 1.0;
    double delta = 1e-3;
    std::size_t grid = 82;

    SearchOptions options() const {
        SearchOptions opt;
        opt.bounds = {alpha_min, alpha_max};
        opt.delta = delta;
        opt.grid_size = grid;
        return opt;
    }
};

struct Globals {
    std::string out;
    bool timing = false;
    std::optional<std::uint64_t> seed;
};

void add_input(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("input", in.path, "CSV file of compositions")->required();
    cmd->add_flag("--no-header", in.no_header, "first row is data");
    cmd->add_option("--zero-policy", in.zero_policy, "error | epsilon")
        ->check(CLI::IsMember({"error", "epsilon"}));
    cmd->add_option("--epsilon", in.epsilon, "replacement value for zeros under --zero-policy epsilon");
    cmd->add_option("--closure", in.closure, "strict | renormalize")->check(CLI::IsMember({"strict", "renormalize"}));
    cmd->add_option("--dataset", in.dataset, "registry key to validate columns against");
}

void add_search(CLI::App* cmd, SearchFlags& s) {
    cmd->add_option("--alpha-min", s.alpha_min, "lower end of the alpha search");
    cmd->add_option("--alpha-max", s.alpha_max, "upper end of the alpha search");
    cmd->add_option("--delta", s.delta, "half-width of the excluded neighbourhood of 0");
    cmd->add_option("--grid", s.grid, "total grid points across both sides of 0");
}

struct Loaded {
    Dataset data;
    std::string digest;
};

Loaded load(const InputOptions& in) {
    LoadOptions opt;
    opt.header = in.no_header ? HeaderMode::absent : HeaderMode::auto_detect;
    opt.zero_policy = in.zero_policy == "epsilon" ? ZeroPolicy::epsilon_replace : ZeroPolicy::error;
    opt.epsilon = in.epsilon;
    opt.closure = in.closure == "strict" ? ClosurePolicy::strict : ClosurePolicy::renormalize;
    const std::string text = read_file(in.path);
    Loaded l{parse_csv(text, opt, in.path), fnv1a64_hex(text)};
    if (!in.dataset.empty()) {
        const auto spec = find_dataset(in.dataset);
        if (!spec) throw ConfigError("unknown dataset '" + in.dataset + "'");
        validate_against(l.data, *spec);
    }
    return l;
}

void echo_input(RunReport& r, const InputOptions& in, const Loaded& l) {
    r.set_input(in.path, l.digest);
    r.config("header", std::string(in.no_header ? "absent" : "auto"));
    r.config("zero_policy", in.zero_policy);
    if (in.zero_policy == "epsilon") r.config("epsilon", in.epsilon);
    r.config("closure", in.closure);
    if (!in.dataset.empty()) r.config("dataset", in.dataset);
    r.config("rows", std::to_string(l.data.rows.size()));
    r.config("components", std::to_string(l.data.dimension()));
}

void echo_search(RunReport& r, const SearchFlags& s) {
    r.config("alpha_min", s.alpha_min);
    r.config("alpha_max", s.alpha_max);
    r.config("delta", s.delta);
    r.config("grid", std::to_string(s.grid));
}

std::string join(std::span<const double> v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += ',';
        s += format_double(v[k]);
    }
    return s;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw IoError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw IoError("write failed");
    }

private:
    std::ofstream file_;
};

using Clock = std::chrono::steady_clock;

void stamp(RunReport& r, const Globals& g, Clock::time_point start) {
    if (g.timing) r.set_wall_time(std::chrono::duration<double>(Clock::now() - start).count());
}

int run_transform(const InputOptions& in, double alpha, bool inverse, bool to_clr, const Globals& g) {
    const auto l = load(in);
    Output out(g.out);
    auto& os = out.stream();
    write_csv_row(os, l.data.component_labels);
    for (const auto& x : l.data.rows) {
        if (to_clr) {
            write_csv_row(os, std::span<const double>(clr(x).w));
        } else {
            const auto y = inverse ? alpha_inverse(x, alpha) : alpha_transform(x, alpha);
            write_csv_row(os, y.values());
        }
    }
    out.finish();
    return 0;
}

int run_fit(const InputOptions& in, const SearchFlags& s, const Globals& g) {
    const auto start = Clock::now();
    const auto l = load(in);
    const auto fit = fit_direct(l.data.logs(), s.options());
    RunReport r("fit");
    echo_input(r, in, l);
    echo_search(r, s);
    r.result("alpha_hat", fit.alpha_hat);
    r.result("gamma_hat", join(fit.gamma_hat.gamma()));
    r.result("gamma_plus", fit.gamma_hat.gamma_plus());
    r.result("loglik", fit.loglik);
    r.result("evaluations", std::to_string(fit.iterations));
    r.result("converged", fit.converged);
    r.result("at_boundary", fit.at_boundary);
    r.result("bracket_width", fit.bracket_width);
    stamp(r, g, start);
    Output out(g.out);
    r.write(out.stream());
    out.finish();
    return 0;
}

int run_profile(const InputOptions& in, const SearchFlags& s, const Globals& g) {
    const auto l = load(in);
    const auto curve = profile_curve(l.data.logs(), s.options());
    Output out(g.out);
    auto& os = out.stream();
    std::vector<std::string> header{"alpha", "profile_loglik"};
    for (const auto& lab : l.data.component_labels) header.push_back("gamma_" + lab);
    write_csv_row(os, header);
    for (std::size_t k = 0; k < curve.alphas.size(); ++k) {
        std::vector<std::string> cells{format_double(curve.alphas[k])};
        if (curve.values[k]) {
            cells.push_back(format_double(*curve.values[k]));
            for (double v : curve.params[k]->gamma()) cells.push_back(format_double(v));
        } else {
            cells.push_back("NA");
            cells.insert(cells.end(), l.data.dimension(), "NA");
        }
        write_csv_row(os, cells);
    }
    out.finish();
    return 0;
}

int run_asymptotic(const InputOptions& in, double alpha, const std::string& variant, const Globals& g) {
    const auto start = Clock::now();
    const auto l = load(in);
    const auto data = l.data.logs();
    RunReport r("asymptotic");
    echo_input(r, in, l);
    r.config("alpha", alpha);
    r.config("variant", variant);
    auto emit = [&](const AsymptoticFit& f) {
        const std::string p = to_string(f.variant);
        r.result(p + ".b_hat", f.b_hat);
        r.result(p + ".c_hat", join(f.c_hat));
        r.result(p + ".implied_gamma", join(f.implied_gamma.gamma()));
        if (!f.b_vec.empty()) r.result(p + ".b_vec", join(f.b_vec));
    };
    if (variant == "1" || variant == "both") emit(fit_asymptotic1(data, alpha));
    if (variant == "2" || variant == "both") emit(fit_asymptotic2(data, alpha));
    stamp(r, g, start);
    Output out(g.out);
    r.write(out.stream());
    out.finish();
    return 0;
}

int run_simulate(const std::string& config_path, const Globals& g) {
    auto req = parse_simulation_config(read_file(config_path));
    if (g.seed) req.config.seed = *g.seed;
    const auto& cfg = req.config;
    Output out(g.out);
    auto& os = out.stream();
    if (req.study == StudyKind::curve) {
        const auto labels = default_labels(cfg.dimension());
        std::vector<std::string> header{"alpha"};
        for (const auto& lab : labels) header.push_back("mean_" + lab);
        for (const auto& lab : labels) header.push_back("se_" + lab);
        write_csv_row(os, header);
        for (const auto& pt : mean_logratio_curve(cfg)) {
            std::vector<double> row{pt.alpha};
            row.insert(row.end(), pt.mean.begin(), pt.mean.end());
            row.insert(row.end(), pt.std_error.begin(), pt.std_error.end());
            write_csv_row(os, std::span<const double>(row));
        }
    } else {
        write_csv_row(os, std::vector<std::string>{"alpha", "exact", "asymptotic", "gap", "ratio"});
        for (const auto& pt : order_study(cfg)) {
            write_csv_row(os, std::vector<std::string>{format_double(pt.alpha), format_double(pt.exact),
                                                       format_double(pt.asymptotic), format_double(pt.gap),
                                                       std::isnan(pt.ratio) ? "NA" : format_double(pt.ratio)});
        }
    }
    out.finish();
    return 0;
}

int run_compare(const InputOptions& in, std::optional<double> alpha, const SearchFlags& s, const Globals& g) {
    const auto l = load(in);
    const auto table = estimator_comparison(l.data.logs(), alpha, l.data.component_labels, s.options());
    Output out(g.out);
    auto& os = out.stream();
    os << "# alpha: " << format_double(table.alpha_used) << '\n';
    std::vector<std::string> header{"method"};
    header.insert(header.end(), table.component_labels.begin(), table.component_labels.end());
    write_csv_row(os, header);
    for (const auto& row : table.rows) {
        std::vector<std::string> cells{row.method};
        for (std::size_t j = 0; j < table.component_labels.size(); ++j) {
            cells.push_back(row.estimates ? format_double((*row.estimates)[j]) : "NA");
        }
        write_csv_row(os, cells);
    }
    for (const auto& row : table.rows) {
        if (!row.estimates) std::cerr << "alphacomp: " << row.method << " failed: " << row.failure << '\n';
    }
    out.finish();
    return 0;
}

int run_verify(const Globals& g) {
    Output out(g.out);
    auto& os = out.stream();
    bool ok = true;
    for (const auto& c : run_verification()) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name << ": residual " << format_double(c.residual) << " ("
           << c.detail << ")\n";
        ok = ok && c.passed;
    }
    out.finish();
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Alpha-transformation tools for compositional data", "alphacomp"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed_value = 0;
    app.add_option("--out", g.out, "write output here instead of stdout");
    app.add_flag("--timing", g.timing, "include wall time in reports");
    auto* seed_opt = app.add_option("--seed", seed_value, "override the seed of a simulation config");

    InputOptions in;
    SearchFlags search;
    double alpha = 0.0;
    std::optional<double> compare_alpha;
    bool inverse = false;
    bool to_clr = false;
    std::string variant = "both";
    std::string config_path;

    auto* transform = app.add_subcommand("transform", "apply the alpha-transformation, its inverse, or clr");
    add_input(transform, in);
    auto* t_alpha = transform->add_option("--alpha", alpha, "transformation parameter");
    auto* t_inv = transform->add_flag("--inverse", inverse, "apply the inverse transformation");
    auto* t_clr = transform->add_flag("--clr", to_clr, "centred log-ratios instead");
    t_inv->excludes(t_clr);
    t_clr->excludes(t_alpha);

    auto* fit = app.add_subcommand("fit", "joint maximum likelihood of alpha and the Dirichlet shapes");
    add_input(fit, in);
    add_search(fit, search);

    auto* profile = app.add_subcommand("profile", "profile log-likelihood over the alpha grid (CSV)");
    add_input(profile, in);
    add_search(profile, search);

    auto* asym = app.add_subcommand("asymptotic", "small-alpha estimators at a fixed alpha");
    add_input(asym, in);
    asym->add_option("--alpha", alpha, "alpha")->required();
    asym->add_option("--variant", variant, "1 | 2 | both")->check(CLI::IsMember({"1", "2", "both"}));

    auto* sim = app.add_subcommand("simulate", "mean-curve or remainder-order study from a config file");
    sim->add_option("config", config_path, "key = value study config")->required();

    auto* compare = app.add_subcommand("compare", "direct and asymptotic shape estimates side by side (CSV)");
    add_input(compare, in);
    add_search(compare, search);
    compare->add_option("--alpha", compare_alpha, "fixed alpha; fitted when omitted");

    auto* verify = app.add_subcommand("verify", "check the expansions and identities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (seed_opt->count() > 0) g.seed = seed_value;

    try {
        if (*transform) {
            if (!to_clr && t_alpha->count() == 0) throw ConfigError("transform needs --alpha (or --clr)");
            return run_transform(in, alpha, inverse, to_clr, g);
        }
        if (*fit) return run_fit(in, search, g);
        if (*profile) return run_profile(in, search, g);
        if (*asym) return run_asymptotic(in, alpha, variant, g);
        if (*sim) return run_simulate(config_path, g);
        if (*compare) return run_compare(in, compare_alpha, search, g);
        if (*verify) return run_verify(g);
    } catch (const Error& e) {
        std::cerr << "alphacomp: " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "alphacomp: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
