#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include <wwave/experiments.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace wwave;

namespace {

enum Exit { ok = 0, config_error = 1, blow_up = 2, breach = 3, partial = 4 };

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::optional<int> max_j;
    bool project = false;
};

RunConfig load(const Overrides& o) {
    RunConfig c = load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.epsilon) {
        if (*o.epsilon < 0) throw ConfigError(0, "--epsilon", "epsilon must be >= 0");
        c.physics.epsilon = *o.epsilon;
    }
    if (o.max_j) {
        if (*o.max_j < 0 || *o.max_j > 4) throw ConfigError(0, "--max-j", "max_j must be in [0, 4]");
        c.diagnostics.max_j = *o.max_j;
        if (c.effective_jet_order() < c.diagnostics.max_j + 2)
            throw ConfigError(0, "diagnostics.jet_order", "jet_order must be at least max_j + 2");
    }
    if (o.project) c.stepping.project_constraints = true;
    if (!o.out.empty()) c.output.directory = o.out;
    return c;
}

json num(long double v) {
    if (!std::isfinite(v)) return nullptr;
    return double(v);
}

json config_echo(const RunConfig& c) {
    return {{"N", c.grid.N},
            {"L", double(c.grid.L)},
            {"epsilon", c.physics.epsilon},
            {"profile", c.physics.profile},
            {"T_final", c.stepping.T_final},
            {"filter", c.stepping.filter.name()},
            {"dealias", c.stepping.dealias.name()},
            {"project_constraints", c.stepping.project_constraints},
            {"max_j", c.diagnostics.max_j},
            {"jet_order", c.effective_jet_order()},
            {"precision", c.precision},
            {"seed", c.seed}};
}

fs::path outdir(const RunConfig& c) {
    fs::path d(c.output.directory);
    fs::create_directories(d);
    return d;
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream f(p);
    f << j.dump(2) << "\n";
}

int cmd_run(const RunConfig& c) {
    auto out = run_simulation_any(c);
    auto dir = outdir(c);
    if (c.output.formats.count("csv")) {
        std::ofstream f(dir / "results.csv", std::ios::binary);
        write_results_csv(f, out.rows, c.diagnostics.max_j);
    }
    if (c.output.formats.count("json")) {
        json s{{"schema_version", csv_schema_version},
               {"status", out.status},
               {"message", out.message},
               {"exit_code", out.exit_code()},
               {"dt", out.dt},
               {"steps", out.steps},
               {"min_A1", num(out.min_A1)},
               {"max_holomorphy_residual", num(out.max_holomorphy)},
               {"L0", num(out.L0)},
               {"max_L", num(out.max_L)},
               {"wall_seconds", out.wall_seconds},
               {"config", config_echo(c)}};
        if (!out.rows.empty()) {
            const auto& r = out.rows.back();
            s["final"] = {{"t", num(r.t)}, {"L", num(r.L)}, {"min_A1", num(r.min_A1)}, {"holomorphy", num(r.holomorphy)},
                          {"steepness", num(r.steepness)}};
        }
        write_json(dir / "summary.json", s);
    }
    std::cout << "run: " << out.status << " after " << out.steps << " steps (dt = " << out.dt << ")";
    if (!out.message.empty()) std::cout << ": " << out.message;
    std::cout << "\n";
    return out.exit_code();
}

json fit_json(const SlopeFit& f) { return {{"slope", num(f.slope)}, {"halfwidth", num(f.halfwidth)}}; }

int cmd_sweep(const RunConfig& c) {
    auto res = run_sweep(c);
    auto dir = outdir(c);
    std::ofstream f(dir / "sweep.csv", std::ios::binary);
    f << "# wwave sweep schema " << csv_schema_version << "\r\n";
    f << "period_multiplier,epsilon,status";
    for (int j = 0; j <= c.diagnostics.max_j; ++j) f << ",max_dE_" << j << ",max_dfrakE_" << j;
    f << "\r\n";
    json members = json::array();
    for (const auto& m : res.members) {
        f << m.period_multiplier << ',' << format_number(m.epsilon) << ',' << m.status;
        json jm{{"period_multiplier", m.period_multiplier}, {"epsilon", m.epsilon}, {"status", m.status}, {"message", m.message},
                {"wall_seconds", m.wall_seconds}};
        for (int j = 0; j <= c.diagnostics.max_j; ++j) {
            long double a = j < int(m.rates.max_dE.size()) ? m.rates.max_dE[j] : NAN;
            long double b = j < int(m.rates.max_dfrakE.size()) ? m.rates.max_dfrakE[j] : NAN;
            f << ',' << format_number(a) << ',' << format_number(b);
            jm["max_dE"].push_back(num(a));
            jm["max_dfrakE"].push_back(num(b));
        }
        f << "\r\n";
        members.push_back(jm);
    }
    json slopes = json::array();
    for (const auto& s : res.slopes) {
        json js{{"period_multiplier", s.period_multiplier}};
        for (int j = 0; j <= c.diagnostics.max_j; ++j) {
            js["E"].push_back(fit_json(s.E[j]));
            js["frakE"].push_back(fit_json(s.frakE[j]));
            std::cout << "period x" << s.period_multiplier << " j=" << j << ": slope max|dE/dt| = " << s.E[j].slope
                      << ", slope max|dfrakE/dt| = " << s.frakE[j].slope << "\n";
        }
        slopes.push_back(js);
    }
    write_json(dir / "summary.json", {{"schema_version", csv_schema_version},
                                      {"epsilons", res.epsilons},
                                      {"members", members},
                                      {"slopes", slopes},
                                      {"complete", res.all_completed()},
                                      {"config", config_echo(c)}});
    return res.all_completed() ? ok : partial;
}

int cmd_converge(const RunConfig& c) {
    auto rep = c.precision == "long_double" ? run_converge<long double>(c) : run_converge<double>(c);
    auto dir = outdir(c);
    std::ofstream f(dir / "converge.csv", std::ios::binary);
    f << "# wwave converge schema " << csv_schema_version << "\r\n";
    f << "study,dt,N,error,order\r\n";
    json jd = json::array(), jn = json::array();
    for (const auto& r : rep.dt_table) {
        f << "dt," << format_number(r.dt) << ',' << r.N << ',' << format_number(r.error) << ',' << format_number(r.order) << "\r\n";
        jd.push_back({{"dt", r.dt}, {"error", num(r.error)}, {"order", num(r.order)}});
    }
    for (const auto& r : rep.N_table) {
        f << "N," << format_number(r.dt) << ',' << r.N << ',' << format_number(r.error) << ',' << format_number(r.order) << "\r\n";
        jn.push_back({{"N", r.N}, {"error", num(r.error)}, {"order", num(r.order)}});
    }
    write_json(dir / "summary.json", {{"status", rep.status}, {"message", rep.message}, {"dt_refinement", jd},
                                      {"N_refinement", jn}, {"config", config_echo(c)}});
    if (!rep.dt_table.empty()) std::cout << "dt refinement order: " << rep.dt_table[0].order << "\n";
    if (rep.status == "blow_up") return blow_up;
    if (rep.status == "constraint_breach") return breach;
    return ok;
}

int cmd_verify(std::uint64_t seed, std::size_t N, int samples, const std::string& out) {
    auto rep = run_verify<double>(seed, N, samples);
    json arr = json::array();
    for (const auto& r : rep.results) {
        arr.push_back({{"name", r.name}, {"description", r.description}, {"mandatory", r.mandatory}, {"passed", r.passed},
                       {"value", num(r.value)}, {"tolerance", num(r.tolerance)}, {"detail", r.detail}});
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  value=" << r.value << "  tol=" << r.tolerance;
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << "\n";
    }
    fs::path dir(out.empty() ? "out" : out);
    fs::create_directories(dir);
    write_json(dir / "verify.json", {{"seed", seed}, {"N", N}, {"all_mandatory_passed", rep.all_mandatory_passed()},
                                     {"wall_seconds", rep.wall_seconds}, {"properties", arr}});
    return rep.all_mandatory_passed() ? ok : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic water-wave solver and energy diagnostics"};
    app.require_subcommand(1);
    Overrides o;
    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--config", o.config, "config file")->required()->check(CLI::ExistingFile);
        sc->add_option("--out", o.out, "output directory (overrides output.directory)");
        sc->add_option("--seed", o.seed, "seed (overrides seed)");
        sc->add_option("--epsilon", o.epsilon, "amplitude (overrides physics.epsilon)");
        sc->add_option("--max-j", o.max_j, "highest energy level (overrides diagnostics.max_j)");
        sc->add_flag("--project", o.project, "project onto the holomorphy constraints after each step");
    };
    auto* run = app.add_subcommand("run", "single run: results.csv + summary.json");
    auto* sweep = app.add_subcommand("sweep", "epsilon ladder with log-log slope fits");
    auto* converge = app.add_subcommand("converge", "dt and N refinement tables");
    add_common(run);
    add_common(sweep);
    add_common(converge);
    auto* verify = app.add_subcommand("verify", "identity and inequality suite: verify.json");
    std::uint64_t vseed = 0;
    std::size_t vN = 256;
    int samples = 1000;
    std::string vout;
    verify->add_option("--seed", vseed, "seed");
    verify->add_option("--N", vN, "grid size")->check([](const std::string& s) {
        long v = std::atol(s.c_str());
        return (v >= 128 && (v & (v - 1)) == 0) ? std::string() : std::string("N must be a power of two >= 128");
    });
    verify->add_option("--samples", samples, "samples per inequality")->check(CLI::PositiveNumber);
    verify->add_option("--out", vout, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }
    try {
        if (*verify) return cmd_verify(vseed, vN, samples, vout);
        RunConfig c = load(o);
        if (*run) return cmd_run(c);
        if (*sweep) return cmd_sweep(c);
        if (*converge) return cmd_converge(c);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_error;
    } catch (const BlowUpError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return blow_up;
    } catch (const WaveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_error;
    }
    return ok;
}
