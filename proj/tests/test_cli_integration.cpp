#include "alphacomp/alphacomp.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace alphacomp;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    auto dir = fs::path(ALPHACOMP_WORK_DIR) / (info ? info->name() : "shared");
    fs::create_directories(dir);
    return dir;
}

struct Run {
    int code;
    std::string out;
};

Run cli(const std::string& args) {
    const auto work = work_dir();
    const auto out_path = work / "stdout.txt";
    const std::string cmd = std::string("\"") + ALPHACOMP_CLI + "\" " + args + " > \"" + out_path.string() +
                            "\" 2> \"" + (work / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out_path.string())};
}

std::string write(const std::string& name, const std::string& text) {
    const auto p = work_dir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return "\"" + p.string() + "\"";
}

std::string write_data(const std::string& name, const LogData& y, const std::string& header) {
    std::ostringstream os;
    os << header << '\n';
    for (const auto& x : y.to_compositions()) write_csv_row(os, x.values());
    return write(name, os.str());
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string report_value(const std::string& report, const std::string& key) {
    std::istringstream in(report);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    }
    return {};
}

}  // namespace

TEST(Cli, Version) {
    const auto r = cli("--version");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("1.0.0"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli("").code, 1);
    EXPECT_EQ(cli("fit").code, 1);
    EXPECT_EQ(cli("fit x.csv --bogus").code, 1);
    EXPECT_EQ(cli("transform x.csv --zero-policy maybe --alpha 1").code, 1);
}

TEST(Cli, ErrorCategoriesMapToExitCodes) {
    EXPECT_EQ(cli("fit /nonexistent/file.csv").code, 2);
    const auto zero = write("zero.csv", "a,b,c\n0.5,0.5,0\n0.2,0.3,0.5\n");
    EXPECT_EQ(cli("transform " + zero + " --alpha 0.5").code, 3);
    EXPECT_EQ(cli("transform " + zero + " --alpha 0.5 --zero-policy epsilon").code, 0);
    EXPECT_EQ(cli("transform " + zero + " --alpha 0").code, 3);
    const auto ragged = write("ragged.csv", "a,b\n0.5,0.5\n0.1,0.2,0.7\n");
    EXPECT_EQ(cli("profile " + ragged).code, 2);
    const auto bad_cfg = write("bad.cfg", "mode = coalescing\nc = 0.1, 0.2\n");
    EXPECT_EQ(cli("simulate " + bad_cfg).code, 3);
    const auto replicated = write("replicated.csv", "a,b\n0.3,0.7\n0.3,0.7\n0.3,0.7\n");
    EXPECT_EQ(cli("fit " + replicated + " --grid 6").code, 4);
    const auto clams = write("notclams.csv", "dl,dm,xx\n0.2,0.3,0.5\n");
    EXPECT_EQ(cli("fit " + clams + " --dataset clams").code, 3);
}

TEST(Cli, TransformRoundTrip) {
    const auto y = sample_log(DirichletParams({2.0, 3.0, 4.0, 1.5}), 40, 5);
    const auto in = write_data("rt.csv", y, "p,q,r,s");
    for (const std::string alpha : {"0.5", "-0.3", "0.01"}) {
        const auto fwd = cli("transform " + in + " --alpha " + alpha);
        ASSERT_EQ(fwd.code, 0);
        const auto mid = write("rt_mid.csv", fwd.out);
        const auto back = cli("transform " + mid + " --inverse --alpha " + alpha);
        ASSERT_EQ(back.code, 0);
        const auto a = parse_csv(read_file((work_dir() / "rt.csv").string()), {});
        const auto b = parse_csv(back.out, {});
        EXPECT_EQ(b.component_labels, a.component_labels);
        ASSERT_EQ(a.rows.size(), b.rows.size());
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(b.rows[i][j], a.rows[i][j], 1e-9 * a.rows[i][j]);
        }
    }
    const auto c = cli("transform " + in + " --clr");
    ASSERT_EQ(c.code, 0);
    EXPECT_EQ(count_lines(c.out), 41u);
}

TEST(Cli, FitRecoversAlphaOneAndIsReproducible) {
    const auto y = sample_log(DirichletParams({3.0, 5.0, 4.0}), 2000, 17);
    const auto in = write_data("plain.csv", y, "a,b,c");
    const auto r = cli("fit " + in + " --alpha-max 2");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(std::stod(report_value(r.out, "alpha_hat")), 1.0, 0.1);
    EXPECT_EQ(report_value(r.out, "converged"), "true");
    EXPECT_NE(r.out.find("input_digest: fnv1a64:"), std::string::npos);
    EXPECT_EQ(cli("fit " + in + " --alpha-max 2").out, r.out);
    const auto timed = cli("fit " + in + " --alpha-max 2 --timing");
    EXPECT_NE(timed.out.find("wall_time_s:"), std::string::npos);
}

TEST(Cli, ProfileRowCountEqualsGrid) {
    const auto y = sample_log(DirichletParams({3.0, 5.0, 4.0}), 200, 18);
    const auto in = write_data("prof.csv", y, "a,b,c");
    const auto r = cli("profile " + in + " --grid 17");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 18u);  // header plus one row per grid point
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "alpha,profile_loglik,gamma_a,gamma_b,gamma_c");
}

TEST(Cli, OutFileMatchesStdout) {
    const auto y = sample_log(DirichletParams({3.0, 5.0}), 100, 19);
    const auto in = write_data("out.csv", y, "a,b");
    const auto target = work_dir() / "profile_out.csv";
    ASSERT_EQ(cli("--out \"" + target.string() + "\" profile " + in + " --grid 8").code, 0);
    EXPECT_EQ(read_file(target.string()), cli("profile " + in + " --grid 8").out);
}

TEST(Cli, AsymptoticAndCompare) {
    SimConfig cfg;
    cfg.alpha_grid = {0.05};
    cfg.c = {0.1, 0.3, -0.4};
    cfg.n = 300;
    const auto in = write_data("coal.csv", simulate_dataset(cfg, 0.05), "dl,dm,ds");
    const auto a = cli("asymptotic " + in + " --alpha 0.05");
    ASSERT_EQ(a.code, 0);
    EXPECT_FALSE(report_value(a.out, "Asymptotic1.b_hat").empty());
    EXPECT_FALSE(report_value(a.out, "Asymptotic2.b_vec").empty());
    const auto c = cli("compare " + in + " --alpha 0.05 --dataset clams");
    ASSERT_EQ(c.code, 0);
    std::istringstream lines(c.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "# alpha: 0.05");
    std::getline(lines, line);
    EXPECT_EQ(line, "method,dl,dm,ds");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
        EXPECT_EQ(line.find("NA"), std::string::npos);
    }
    EXPECT_EQ(rows, 3);
}

TEST(Cli, SimulateOrderStudyAndSeedOverride) {
    const auto cfg = write("order.cfg",
                           "study = order\nmode = coalescing\nalphas = 0.04, 0.02, 0.01\nb = 1.0\n"
                           "c = 0.1, 0.3, -0.4\nn = 200\nseed = 1\n");
    const auto r = cli("simulate " + cfg);
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 4u);
    EXPECT_EQ(cli("simulate " + cfg).out, r.out);
    EXPECT_NE(cli("--seed 2 simulate " + cfg).out, r.out);
    const auto curve = write("curve.cfg", "mode = general\nalphas = 0.1, 0.05\nb_vec = 1.1, 1.3, 0.6\nn = 500\n");
    const auto c = cli("simulate " + curve);
    ASSERT_EQ(c.code, 0);
    EXPECT_EQ(c.out.substr(0, c.out.find('\n')), "alpha,mean_x1,mean_x2,mean_x3,se_x1,se_x2,se_x3");
}

TEST(Cli, VerifyPasses) {
    const auto r = cli("verify");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 4u);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}
