#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <wwave/experiments.hpp>

using namespace wwave;
namespace fs = std::filesystem;

namespace {

const char* base_config = R"(# flat rest configuration
grid.N = 32
grid.L = 2pi
physics.epsilon = 0
stepping.dt = 0.05
stepping.T_final = 0.2
diagnostics.max_j = 0
)";

fs::path scratch_dir(const std::string& name) {
    auto d = fs::temp_directory_path() / ("wwave_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(WWAVE_CLI) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    auto p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, ParsesDefaultsAndValues) {
    auto c = parse_config_string(std::string(base_config) + "stepping.filter = krasny\nnumerics.precision = long_double\n");
    EXPECT_EQ(c.grid.N, 32u);
    EXPECT_NEAR(double(c.grid.L), 2 * std::numbers::pi, 1e-15);
    EXPECT_EQ(c.stepping.filter.kind, FilterRule::Kind::krasny);
    EXPECT_EQ(c.precision, "long_double");
    EXPECT_EQ(c.effective_jet_order(), 2);
    auto d = parse_config_string("grid.N=64\nphysics.epsilon=0.1\nstepping.cfl=0.5\nstepping.T_final=1\nphysics.coeffs = 1, 0:1, -2:0.5\nphysics.profile=custom\n");
    ASSERT_EQ(d.physics.coeffs.size(), 3u);
    EXPECT_EQ(d.physics.coeffs[1], std::complex<double>(0, 1));
}

TEST(Config, MissingStepIsRejected) {
    try {
        parse_config_string("grid.N = 32\nphysics.epsilon = 0.1\nstepping.T_final = 1\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key, "stepping.dt");
        EXPECT_NE(std::string(e.what()).find("stepping.cfl"), std::string::npos);
    }
}

TEST(Config, DiagnosticsCarryLineAndKey) {
    try {
        parse_config_string("grid.N = 32\n\n# comment\ngrid.N = 64\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line, 4);
        EXPECT_EQ(e.key, "grid.N");
    }
    auto expect_line = [](const std::string& text, int line, const std::string& key) {
        try {
            parse_config_string(text);
            ADD_FAILURE() << text;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.line, line) << text;
            EXPECT_EQ(e.key, key) << text;
        }
    };
    expect_line("grid.N = 48\n", 1, "grid.N");
    expect_line("grid.N = 32\nphysics.epsilon = abc\n", 2, "physics.epsilon");
    expect_line("grid.N = 32\nbogus.key = 1\n", 2, "bogus.key");
    expect_line("grid.N 32\n", 1, "");
    expect_line("stepping.filter = gaussian\n", 1, "stepping.filter");
    expect_line(std::string(base_config) + "diagnostics.jet_order = 1\n", 8, "diagnostics.jet_order");
}

TEST(Run, RestConfigGivesZeroEnergies) {
    auto c = parse_config_string(base_config);
    auto out = run_simulation<double>(c);
    EXPECT_EQ(out.status, "completed");
    EXPECT_EQ(out.steps, 4);
    ASSERT_EQ(out.rows.size(), 5u);
    for (const auto& r : out.rows) {
        EXPECT_EQ(r.E[0], 0);
        EXPECT_EQ(r.frakE[0], 0);
        EXPECT_EQ(r.min_A1, 1);
    }
}

TEST(Run, SingleModeExampleStaysBounded) {
    auto c = load_config(std::string(WWAVE_CONFIG_DIR) + "/single_mode.cfg");
    auto out = run_simulation<double>(c);
    ASSERT_EQ(out.status, "completed") << out.message;
    EXPECT_NEAR(double(out.L0), 0.05, 1e-12);
    EXPECT_LE(out.max_L, 2 * out.L0);
    EXPECT_GE(out.min_A1, 1 - taylor_floor);
}

TEST(Run, HolomorphyBudgetOverLongRun) {
    auto c = parse_config_string("grid.N = 512\nphysics.epsilon = 0.05\nstepping.dt = 0.01\nstepping.T_final = 10\n"
                                 "stepping.residual_tol = 1e-8\ndiagnostics.max_j = 0\ndiagnostics.report_every = 25\n");
    auto out = run_simulation<double>(c);
    ASSERT_EQ(out.status, "completed") << out.message;
    EXPECT_LT(out.max_holomorphy, 1e-8);
    // without the filter the roundoff in the top modes grows until the budget is lost
    c.stepping.filter = FilterRule::none();
    EXPECT_EQ(run_simulation<double>(c).status, "constraint_breach");
}

TEST(Run, ShippedConfigsParse) {
    for (const auto& e : fs::recursive_directory_iterator(WWAVE_CONFIG_DIR)) {
        if (e.path().extension() == ".cfg") {
            EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
        }
    }
}

TEST(Run, CsvIsReproducibleAndVersioned) {
    auto text = std::string(base_config) + "physics.epsilon = 0.05\nphysics.profile = random\nseed = 7\n";
    text.replace(text.find("physics.epsilon = 0\n"), 20, "");
    auto c = parse_config_string(text);
    std::ostringstream a, b;
    write_results_csv(a, run_simulation<double>(c).rows, c.diagnostics.max_j);
    write_results_csv(b, run_simulation<double>(c).rows, c.diagnostics.max_j);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().rfind("# wwave results schema 1\r\n", 0), 0u);
    EXPECT_NE(a.str().find("step,t,L,min_A1,holomorphy,steepness,b_mean,frakE0_rate,E1E3,E_0,frakE_0,calE_0\r\n"),
              std::string::npos);
    c.seed = 8;
    std::ostringstream d;
    write_results_csv(d, run_simulation<double>(c).rows, c.diagnostics.max_j);
    EXPECT_NE(a.str(), d.str());
}

TEST(Sweep, SlopeFitRecoversPowerLaw) {
    std::vector<double> x{0.08, 0.04, 0.02}, y;
    for (double e : x) y.push_back(3 * std::pow(e, 5));
    auto f = fit_loglog(x, y);
    EXPECT_NEAR(f.slope, 5, 1e-12);
    EXPECT_NEAR(f.halfwidth, 0, 1e-9);
    EXPECT_TRUE(std::isnan(fit_loglog({0.1, 0.05}, {1.0, -1.0}).slope));
}

TEST(Sweep, LinearLimitConservesEnergy) {
    auto c = parse_config_string("grid.N = 32\nphysics.epsilon = 1e-6\nstepping.dt = 0.02\nstepping.T_final = 0.2\n"
                                 "diagnostics.max_j = 0\nsweep.epsilon0 = 1e-6\nsweep.ratio = 0.5\nsweep.count = 3\n");
    auto res = run_sweep(c);
    ASSERT_TRUE(res.all_completed());
    for (const auto& m : res.members) EXPECT_LT(double(m.rates.max_dE[0]), 1e-15);
}

TEST(Converge, ZeroDurationGivesEmptyTables) {
    auto c = parse_config_string("grid.N = 32\nphysics.epsilon = 0.05\nstepping.dt = 0.01\nstepping.T_final = 0\n");
    auto rep = run_converge<double>(c);
    EXPECT_TRUE(rep.dt_table.empty());
    EXPECT_TRUE(rep.N_table.empty());
}

TEST(Converge, TimeRefinementIsFourthOrder) {
    auto c = parse_config_string("grid.N = 64\nphysics.epsilon = 0.05\nstepping.dt = 0.05\nstepping.T_final = 1\n"
                                 "converge.N_list = 32, 64\nconverge.N_ref = 128\n");
    auto rep = run_converge<double>(c);
    ASSERT_EQ(rep.dt_table.size(), 3u);
    EXPECT_NEAR(rep.dt_table[0].order, 4.0, 0.2);
    ASSERT_EQ(rep.N_table.size(), 2u);
    EXPECT_LT(rep.N_table[1].error, rep.N_table[0].error);
}

TEST(Verify, MutatedHilbertSignIsCaught) {
    mutation::hilbert_sign() = -1;
    auto rep = run_verify<double>(0, 128, 20);
    mutation::hilbert_sign() = 1;
    ASSERT_NE(rep.find("projection_sum"), nullptr);
    EXPECT_TRUE(rep.find("projection_sum")->passed);
    ASSERT_NE(rep.find("dtQ_identity"), nullptr);
    EXPECT_FALSE(rep.find("dtQ_identity")->passed);
    EXPECT_FALSE(rep.all_mandatory_passed());
    EXPECT_TRUE(run_verify<double>(0, 128, 20).all_mandatory_passed());
}

TEST(Cli, ExitCodes) {
    auto dir = scratch_dir("exit");
    // completed rest run
    auto cfg = write_config(dir, base_config);
    EXPECT_EQ(run_cli("run --config " + cfg.string() + " --out " + (dir / "rest").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "rest" / "results.csv"));
    EXPECT_TRUE(fs::exists(dir / "rest" / "summary.json"));
    // missing dt and cfl
    cfg = write_config(dir, "grid.N = 32\nphysics.epsilon = 0.1\nstepping.T_final = 1\n");
    EXPECT_EQ(run_cli("run --config " + cfg.string()), 1);
    EXPECT_EQ(run_cli("run"), 1);
    // blow-up from an absurd step
    cfg = write_config(dir, "grid.N = 32\nphysics.epsilon = 0.4\nphysics.profile = packet\nphysics.k_center = 5\n"
                            "stepping.dt = 1e100\nstepping.T_final = 1e101\nstepping.residual_tol = 1e300\n");
    EXPECT_EQ(run_cli("run --config " + cfg.string() + " --out " + (dir / "blow").string()), 2);
    // residual breach
    cfg = write_config(dir, "grid.N = 32\nphysics.epsilon = 0.1\nstepping.dt = 0.05\nstepping.T_final = 0.2\n"
                            "stepping.residual_tol = 1e-300\n");
    EXPECT_EQ(run_cli("run --config " + cfg.string() + " --out " + (dir / "breach").string()), 3);
    // sweep with an inadmissible member
    cfg = write_config(dir, "grid.N = 32\nphysics.epsilon = 0.1\nstepping.dt = 0.05\nstepping.T_final = 0.1\n"
                            "diagnostics.max_j = 0\nsweep.epsilon0 = 40\nsweep.ratio = 0.01\nsweep.count = 3\n");
    EXPECT_EQ(run_cli("sweep --config " + cfg.string() + " --out " + (dir / "sweep").string()), 4);
    EXPECT_TRUE(fs::exists(dir / "sweep" / "summary.json"));
    // verify
    EXPECT_EQ(run_cli("verify --seed 0 --N 128 --samples 50 --out " + (dir / "verify").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "verify" / "verify.json"));
}

TEST(Cli, OverridesAndByteIdenticalOutput) {
    auto dir = scratch_dir("repro");
    auto cfg = write_config(dir, "grid.N = 32\nphysics.epsilon = 0.02\nphysics.profile = random\nstepping.dt = 0.05\n"
                                 "stepping.T_final = 0.2\ndiagnostics.max_j = 0\n");
    ASSERT_EQ(run_cli("run --config " + cfg.string() + " --seed 3 --epsilon 0.03 --out " + (dir / "a").string()), 0);
    ASSERT_EQ(run_cli("run --config " + cfg.string() + " --seed 3 --epsilon 0.03 --out " + (dir / "b").string()), 0);
    EXPECT_EQ(slurp(dir / "a" / "results.csv"), slurp(dir / "b" / "results.csv"));
    auto summary = slurp(dir / "a" / "summary.json");
    EXPECT_NE(summary.find("\"epsilon\": 0.03"), std::string::npos);
    EXPECT_EQ(run_cli("run --config " + cfg.string() + " --max-j 1 --project --out " + (dir / "c").string()), 0);
    EXPECT_NE(slurp(dir / "c" / "results.csv").find("frakE_1"), std::string::npos);
}
