#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <thread>

#include "config.hpp"
#include "energy_diagnostics.hpp"

namespace wwave {

inline constexpr int csv_schema_version = 1;
inline constexpr double taylor_floor = 1e-10;  // accepted runs keep min A₁ ≥ 1 − this

// ---------------------------------------------------------------- runs

inline std::string format_time(long double t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6Lg", t);
    return buf;
}

inline InitialProfile make_profile(const RunConfig& cfg) {
    InitialProfile p;
    p.velocity_phase = cfg.physics.velocity_phase;
    const auto& ph = cfg.physics;
    if (ph.profile == "single_mode") {
        p.kind = InitialProfile::Kind::single_mode;
        p.k0 = ph.k0;
    } else if (ph.profile == "packet") {
        p = InitialProfile::packet(ph.k_center, ph.width);
        p.velocity_phase = ph.velocity_phase;
    } else if (ph.profile == "custom") {
        p.kind = InitialProfile::Kind::custom;
        p.coeffs = ph.coeffs;
    } else {
        // seeded random holomorphic profile with geometric decay
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> nd;
        p.kind = InitialProfile::Kind::custom;
        for (int n = 1; n <= ph.modes; ++n) {
            double a = std::exp(-2.0 * (n - 1) / ph.modes);
            double re = nd(rng), im = nd(rng);
            p.coeffs.emplace_back(a * re, a * im);
        }
    }
    return p;
}

struct ReportRow {
    long step = 0;
    long double t = 0;
    long double L = 0, min_A1 = 1, holomorphy = 0, steepness = 0, b_mean = 0, e0_rate = 0, E1E3 = NAN;
    std::vector<long double> E, frakE, calE;
};

struct RunOutput {
    std::string status = "completed";  // completed | blow_up | constraint_breach
    std::string message;
    double dt = 0;
    long steps = 0;
    std::vector<ReportRow> rows;
    long double min_A1 = INFINITY;  // over recorded rows
    long double max_holomorphy = 0;
    long double L0 = 0, max_L = 0;
    double wall_seconds = 0;

    int exit_code() const { return status == "completed" ? 0 : status == "blow_up" ? 2 : 3; }
};

template <class R>
ReportRow make_row(const WaveState<R>& s, long step, const RunConfig& cfg) {
    ReportOptions opt;
    opt.max_j = cfg.diagnostics.max_j;
    opt.jet_order = cfg.effective_jet_order();
    opt.quintic = cfg.diagnostics.quintic;
    opt.e0_rate = cfg.diagnostics.e0_rate;
    auto rep = energy_report(s, opt, cfg.stepping.dealias);
    ReportRow r;
    r.step = step;
    r.t = s.t;
    r.L = rep.L;
    r.min_A1 = rep.res.min_A1;
    r.holomorphy = rep.res.holomorphy();
    r.steepness = rep.res.steepness;
    r.b_mean = rep.res.b_mean;
    r.e0_rate = rep.frakE0_rate;
    r.E1E3 = rep.E1E3;
    for (const auto& lv : rep.levels) {
        r.E.push_back(lv.E);
        r.frakE.push_back(lv.frakE);
        r.calE.push_back(cfg.diagnostics.quintic ? static_cast<long double>(lv.calE) : NAN);
    }
    return r;
}

// Fixed step: stepping.dt, or the CFL step of the initial state; shrunk so that T_final is hit exactly.
template <class R>
double resolve_dt(const RunConfig& cfg, const WaveState<R>& s0, long& nsteps) {
    double dt = cfg.stepping.dt ? *cfg.stepping.dt : cfl_dt(s0, *cfg.stepping.cfl);
    const double T = cfg.stepping.T_final;
    if (T <= 0) {
        nsteps = 0;
        return dt;
    }
    nsteps = std::max(1L, long(std::ceil(T / dt - 1e-9)));
    return T / double(nsteps);
}

template <class R>
using StepObserver = std::function<void(const WaveState<R>&, long)>;

template <class R>
RunOutput run_simulation(const RunConfig& cfg, const StepObserver<R>& observer = {}, WaveState<R>* final_state = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    Grid g(cfg.grid.N, cfg.grid.L);
    auto s = make_initial_data<R>(g, make_profile(cfg), R(cfg.physics.epsilon));
    StepOptions opt{cfg.stepping.filter, cfg.stepping.dealias, cfg.stepping.project_constraints};
    long nsteps = 0;
    out.dt = resolve_dt(cfg, s, nsteps);
    const int every = cfg.diagnostics.report_every;

    auto record = [&](long n) {
        auto row = make_row(s, n, cfg);
        out.min_A1 = std::min(out.min_A1, row.min_A1);
        out.max_holomorphy = std::max(out.max_holomorphy, row.holomorphy);
        if (out.rows.empty()) out.L0 = row.L;
        out.max_L = std::max(out.max_L, row.L);
        out.rows.push_back(std::move(row));
        const auto& r = out.rows.back();
        if (r.holomorphy > cfg.stepping.residual_tol || r.min_A1 < 1 - taylor_floor) {
            out.status = "constraint_breach";
            char buf[200];
            std::snprintf(buf, sizeof buf, "constraint residual breach at t = %.6g (holomorphy %.3e, min A1 - 1 = %.3e)",
                          double(r.t), double(r.holomorphy), double(r.min_A1 - 1));
            out.message = buf;
            return false;
        }
        return true;
    };

    try {
        bool ok = record(0);
        if (observer) observer(s, 0);
        for (long n = 1; ok && n <= nsteps; ++n) {
            s = step(s, out.dt, opt);
            if (n == nsteps) s.t = cfg.stepping.T_final;
            out.steps = n;
            if (observer) observer(s, n);
            if (n % every == 0 || n == nsteps) ok = record(n);
        }
    } catch (const BlowUpError& e) {
        out.status = "blow_up";
        out.message = std::string(e.what()) + " at t = " + format_time(e.time);
    } catch (const WaveError& e) {
        out.status = "blow_up";
        out.message = std::string("blow-up detected: ") + e.what() + " at t = " + format_time(s.t);
    }
    if (final_state) *final_state = s;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

inline RunOutput run_simulation_any(const RunConfig& cfg) {
    if (cfg.precision == "long_double") return run_simulation<long double>(cfg);
    return run_simulation<double>(cfg);
}

inline std::string format_number(long double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17Lg", v);
    return buf;
}

inline std::vector<std::string> csv_columns(int max_j) {
    std::vector<std::string> c{"step", "t", "L", "min_A1", "holomorphy", "steepness", "b_mean", "frakE0_rate", "E1E3"};
    for (int j = 0; j <= max_j; ++j) {
        c.push_back("E_" + std::to_string(j));
        c.push_back("frakE_" + std::to_string(j));
        c.push_back("calE_" + std::to_string(j));
    }
    return c;
}

// RFC 4180 records (CRLF) after one schema comment line
inline void write_results_csv(std::ostream& os, const std::vector<ReportRow>& rows, int max_j) {
    os << "# wwave results schema " << csv_schema_version << "\r\n";
    auto cols = csv_columns(max_j);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\r\n";
    for (const auto& r : rows) {
        os << r.step << ',' << format_number(r.t) << ',' << format_number(r.L) << ',' << format_number(r.min_A1) << ','
           << format_number(r.holomorphy) << ',' << format_number(r.steepness) << ',' << format_number(r.b_mean) << ','
           << format_number(r.e0_rate) << ',' << format_number(r.E1E3);
        for (int j = 0; j <= max_j; ++j) {
            auto at = [&](const std::vector<long double>& v) { return j < int(v.size()) ? v[j] : (long double)NAN; };
            os << ',' << format_number(at(r.E)) << ',' << format_number(at(r.frakE)) << ',' << format_number(at(r.calE));
        }
        os << "\r\n";
    }
}

// ---------------------------------------------------------------- rates and slopes

// five-point centered differences of a uniformly sampled series; interior points only
inline std::vector<long double> centered_rate(const std::vector<long double>& v, long double h) {
    std::vector<long double> d;
    for (std::size_t i = 2; i + 2 < v.size(); ++i)
        d.push_back((8 * (v[i + 1] - v[i - 1]) - (v[i + 2] - v[i - 2])) / (12 * h));
    return d;
}

inline long double max_abs_of(const std::vector<long double>& v) {
    long double m = 0;
    for (auto x : v) m = std::max(m, std::fabs(x));
    return m;
}

struct SlopeFit {
    double slope = NAN;
    double intercept = NAN;
    double halfwidth = NAN;  // 95% confidence
};

inline double student_t975(int dof) {
    static const double tab[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228};
    if (dof < 1) return NAN;
    return dof <= 10 ? tab[dof - 1] : 1.96;
}

inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    SlopeFit f;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return f;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) return f;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = ly[i] - f.intercept - f.slope * lx[i];
            rss += r * r;
        }
        f.halfwidth = student_t975(int(n) - 2) * std::sqrt(rss / double(n - 2) / sxx);
    }
    return f;
}

struct RateSummary {
    std::vector<long double> max_dE, max_dfrakE;  // per j
};

// max |dE_j/dt| and |d𝔈_j/dt| over the uniformly spaced rows of a run
inline RateSummary run_rates(const RunOutput& run, int every, int max_j) {
    RateSummary rs;
    std::vector<const ReportRow*> uni;
    for (const auto& r : run.rows)
        if (r.step % every == 0) uni.push_back(&r);
    const long double h = (long double)run.dt * every;
    for (int j = 0; j <= max_j; ++j) {
        std::vector<long double> E, F;
        for (auto* r : uni) {
            E.push_back(r->E[j]);
            F.push_back(r->frakE[j]);
        }
        rs.max_dE.push_back(uni.size() >= 5 ? max_abs_of(centered_rate(E, h)) : (long double)NAN);
        rs.max_dfrakE.push_back(uni.size() >= 5 ? max_abs_of(centered_rate(F, h)) : (long double)NAN);
    }
    return rs;
}

struct SweepMember {
    int period_multiplier = 1;
    double epsilon = 0;
    std::string status;
    std::string message;
    RateSummary rates;
    long double min_A1 = NAN;
    long double max_holomorphy = NAN;
    double wall_seconds = 0;
};

struct SweepSlopes {
    int period_multiplier = 1;
    std::vector<SlopeFit> E, frakE;  // per j
};

struct SweepResult {
    std::vector<double> epsilons;
    std::vector<SweepMember> members;  // ordered by (period multiplier, ε)
    std::vector<SweepSlopes> slopes;
    bool all_completed() const {
        for (const auto& m : members)
            if (m.status != "completed") return false;
        return true;
    }
};

inline std::vector<double> ladder(const RunConfig& cfg) {
    std::vector<double> e;
    double v = cfg.sweep.epsilon0;
    for (int i = 0; i < cfg.sweep.count; ++i, v *= cfg.sweep.ratio) e.push_back(v);
    return e;
}

// Runs every (period, ε) member; periods are multiples of grid.L with the profile unchanged.
inline SweepResult run_sweep(const RunConfig& cfg) {
    SweepResult res;
    res.epsilons = ladder(cfg);
    for (int m : cfg.sweep.period_multipliers)
        for (double e : res.epsilons) {
            SweepMember mem;
            mem.period_multiplier = m;
            mem.epsilon = e;
            res.members.push_back(mem);
        }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < res.members.size();) {
            auto& mem = res.members[i];
            RunConfig c = cfg;
            c.grid.L = cfg.grid.L * mem.period_multiplier;
            c.physics.epsilon = mem.epsilon;
            try {
                auto run = run_simulation_any(c);
                mem.status = run.status;
                mem.message = run.message;
                mem.wall_seconds = run.wall_seconds;
                mem.min_A1 = run.min_A1;
                mem.max_holomorphy = run.max_holomorphy;
                if (run.status == "completed") mem.rates = run_rates(run, c.diagnostics.report_every, c.diagnostics.max_j);
            } catch (const std::exception& ex) {
                mem.status = "failed";
                mem.message = ex.what();
            }
        }
    };
    int nthreads = std::max(1, std::min<int>(cfg.sweep.threads, int(res.members.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (int m : cfg.sweep.period_multipliers) {
        SweepSlopes sl;
        sl.period_multiplier = m;
        for (int j = 0; j <= cfg.diagnostics.max_j; ++j) {
            std::vector<double> x, yE, yF;
            for (const auto& mem : res.members) {
                if (mem.period_multiplier != m || mem.status != "completed") continue;
                x.push_back(mem.epsilon);
                yE.push_back(double(mem.rates.max_dE[j]));
                yF.push_back(double(mem.rates.max_dfrakE[j]));
            }
            sl.E.push_back(x.size() >= 3 ? fit_loglog(x, yE) : SlopeFit{});
            sl.frakE.push_back(x.size() >= 3 ? fit_loglog(x, yF) : SlopeFit{});
        }
        res.slopes.push_back(sl);
    }
    return res;
}

// ---------------------------------------------------------------- convergence

struct ConvergeRow {
    double dt = 0;
    std::size_t N = 0;
    double error = NAN;
    double order = NAN;
};

struct ConvergeReport {
    std::vector<ConvergeRow> dt_table;  // error: difference to the next finer dt
    std::vector<ConvergeRow> N_table;   // error: Θ^(2) against the N_ref run
    std::string status = "completed";
    std::string message;
};

template <class R>
R state_distance(const WaveState<R>& a, const WaveState<R>& b) {
    R num = std::pow(norm(a.zeta - b.zeta, NormKind::L2), 2) + std::pow(norm(a.zt - b.zt, NormKind::L2), 2);
    R den = std::pow(norm(b.zeta, NormKind::L2), 2) + std::pow(norm(b.zt, NormKind::L2), 2);
    return std::sqrt(num / std::max(den, std::numeric_limits<R>::min()));
}

// relative ℓ² distance of Fourier coefficients, modes matched by wavenumber
template <class R>
R coefficient_distance(const SpectralField<R>& f, const SpectralField<R>& ref) {
    auto cf = f.coeffs(), cr = ref.coeffs();
    const Grid &gf = f.grid(), &gr = ref.grid();
    std::map<long, std::complex<R>> a;
    for (std::size_t i = 0; i < gf.N; ++i)
        if (std::abs(gf.mode(i)) < long(gf.N / 2)) a[gf.mode(i)] = cf[i];
    R num = 0, den = 0;
    for (std::size_t i = 0; i < gr.N; ++i) {
        long n = gr.mode(i);
        auto it = a.find(n);
        std::complex<R> d = cr[i] - (it == a.end() ? std::complex<R>(0) : it->second);
        num += std::norm(d);
        den += std::norm(cr[i]);
    }
    return std::sqrt(num / std::max(den, std::numeric_limits<R>::min()));
}

template <class R>
ConvergeReport run_converge(const RunConfig& cfg) {
    ConvergeReport rep;
    if (cfg.stepping.T_final <= 0) return rep;
    auto final_of = [&](RunConfig c, WaveState<R>& s) {
        c.diagnostics.report_every = 1 << 30;
        auto out = run_simulation<R>(c, {}, &s);
        if (out.status != "completed") {
            rep.status = out.status;
            rep.message = out.message;
            return false;
        }
        return true;
    };
    // dt, dt/2, dt/4
    Grid g(cfg.grid.N, cfg.grid.L);
    long nsteps = 0;
    double dt0 = resolve_dt(cfg, make_initial_data<R>(g, make_profile(cfg), R(cfg.physics.epsilon)), nsteps);
    std::vector<WaveState<R>> finals;
    for (int k = 0; k < 3; ++k) {
        RunConfig c = cfg;
        c.stepping.cfl.reset();
        c.stepping.dt = dt0 / double(1 << k);
        WaveState<R> s;
        if (!final_of(c, s)) return rep;
        finals.push_back(s);
        rep.dt_table.push_back({*c.stepping.dt, cfg.grid.N, NAN, NAN});
    }
    rep.dt_table[0].error = double(state_distance(finals[0], finals[1]));
    rep.dt_table[1].error = double(state_distance(finals[1], finals[2]));
    rep.dt_table[0].order = std::log2(rep.dt_table[0].error / rep.dt_table[1].error);
    // N refinement at fixed dt
    auto theta2 = [&](std::size_t N, SpectralField<R>& th) {
        RunConfig c = cfg;
        c.grid.N = N;
        c.stepping.cfl.reset();
        c.stepping.dt = dt0;
        WaveState<R> s;
        if (!final_of(c, s)) return false;
        SliceContext<R> ctx(s, 2, cfg.stepping.dealias);
        th = remove_mean(ctx.theta(2));
        return true;
    };
    SpectralField<R> ref;
    if (!theta2(cfg.converge.N_ref, ref)) return rep;
    for (std::size_t N : cfg.converge.N_list) {
        SpectralField<R> th;
        if (!theta2(N, th)) return rep;
        ConvergeRow row{dt0, N, double(coefficient_distance(th, ref)), NAN};
        if (!rep.N_table.empty())
            row.order = std::log(rep.N_table.back().error / row.error) / std::log(double(N) / double(rep.N_table.back().N));
        rep.N_table.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------- verification suite

struct PropertyResult {
    std::string name;
    std::string description;
    bool mandatory = true;
    bool passed = false;
    double value = NAN;      // error measure or violation count
    double tolerance = NAN;
    std::string detail;
};

struct VerifyReport {
    std::uint64_t seed = 0;
    std::size_t N = 0;
    std::vector<PropertyResult> results;
    double wall_seconds = 0;

    bool all_mandatory_passed() const {
        for (const auto& r : results)
            if (r.mandatory && !r.passed) return false;
        return true;
    }
    const PropertyResult* find(const std::string& name) const {
        for (const auto& r : results)
            if (r.name == name) return &r;
        return nullptr;
    }
};

namespace detail {

// band-limited random field with modes in [lo, hi], amplitudes decaying in |n|
template <class R>
SpectralField<R> random_band(const Grid& g, std::mt19937_64& rng, long lo, long hi, double decay = 8.0) {
    std::normal_distribution<double> nd;
    std::vector<std::complex<R>> c(g.N, 0);
    for (long n = lo; n <= hi; ++n) {
        double a = std::exp(-std::abs(double(n)) / decay);
        double re = nd(rng), im = nd(rng);
        c[std::size_t((n + long(g.N)) % long(g.N))] = std::complex<R>(R(a * re), R(a * im));
    }
    return SpectralField<R>::from_coeffs(g, c);
}

template <class R>
R rel(const SpectralField<R>& a, const SpectralField<R>& b) {
    R den = std::max(norm(b, NormKind::L2), norm(a, NormKind::L2));
    return den > 0 ? norm(a - b, NormKind::L2) / den : R(0);
}

}  // namespace detail

// admissible random state used by the identity checks
template <class R>
WaveState<R> random_admissible_state(const Grid& g, std::uint64_t seed, R eps = R(0.2)) {
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    std::normal_distribution<double> nd;
    InitialProfile p;
    p.kind = InitialProfile::Kind::custom;
    for (int n = 1; n <= 10; ++n) {
        double a = std::exp(-0.3 * (n - 1));
        double c1 = nd(rng), c2 = nd(rng), c3 = nd(rng), c4 = nd(rng);
        p.coeffs.emplace_back(a * c1, a * c2);
        p.velocity_coeffs.emplace_back(a * c3, a * c4);
    }
    return make_initial_data<R>(g, p, eps);
}

template <class R = double>
VerifyReport run_verify(std::uint64_t seed, std::size_t N, int inequality_samples = 1000) {
    using F = SpectralField<R>;
    using C = std::complex<R>;
    auto t0 = std::chrono::steady_clock::now();
    VerifyReport rep;
    rep.seed = seed;
    rep.N = N;
    Grid g(N, 2 * std::numbers::pi_v<long double>);
    std::mt19937_64 rng(seed);
    const long kb = long(N) / 8;  // band limit leaving room for triple products
    auto add = [&](std::string name, std::string desc, double value, double tol, bool ok, std::string detail = "") {
        rep.results.push_back({std::move(name), std::move(desc), true, ok, value, tol, std::move(detail)});
    };
    auto add_err = [&](std::string name, std::string desc, double err, double tol) {
        add(std::move(name), std::move(desc), err, tol, std::isfinite(err) && err < tol);
    };
    auto guarded = [&](const std::string& name, const std::string& desc, double tol, const std::function<double()>& fn) {
        try {
            add_err(name, desc, fn(), tol);
        } catch (const std::exception& e) {
            add(name, desc, NAN, tol, false, e.what());
        }
    };

    // projections: white-noise samples exercise every mode
    guarded("projection_sum", "P_H + P_A = I", 1e-13, [&] {
        std::uniform_real_distribution<double> u(-1, 1);
        F f = F::from_function(g, [&](R) { return C(R(u(rng)), R(u(rng))); });
        return double(max_abs(project(f, Side::holo) + project(f, Side::anti) - f) / max_abs(f));
    });
    guarded("projection_orthogonality", "P_H P_A = P_A P_H = 0", 1e-13, [&] {
        std::uniform_real_distribution<double> u(-1, 1);
        F f = F::from_function(g, [&](R) { return C(R(u(rng)), R(u(rng))); });
        return double(std::max(max_abs(project(project(f, Side::anti), Side::holo)),
                               max_abs(project(project(f, Side::holo), Side::anti))) /
                      max_abs(f));
    });
    guarded("hilbert_involution", "H(H f) = f for mean-zero f", 1e-13, [&] {
        auto f = remove_mean(detail::random_band<R>(g, rng, -kb, kb));
        return double(detail::rel(hilbert(hilbert(f)), f));
    });
    guarded("hhalf_split", "|f|^2 = |P_H f|^2 + |P_A f|^2 in H^1/2", 1e-10, [&] {
        auto f = detail::random_band<R>(g, rng, -kb, kb);
        R a = std::pow(norm(f, NormKind::Hhalf), 2);
        R b = std::pow(norm(project(f, Side::holo), NormKind::Hhalf), 2) + std::pow(norm(project(f, Side::anti), NormKind::Hhalf), 2);
        return double(std::abs(a - b) / a);
    });
    guarded("hhalf_signed_pairing", "int i f' conj f = |P_H f|^2 - |P_A f|^2", 1e-10, [&] {
        auto f = detail::random_band<R>(g, rng, -kb, kb);
        C a = i_dpair(f, f);
        R b = std::pow(norm(project(f, Side::holo), NormKind::Hhalf), 2) - std::pow(norm(project(f, Side::anti), NormKind::Hhalf), 2);
        return double(std::abs(a - C(b)) / std::pow(norm(f, NormKind::Hhalf), 2));
    });
    guarded("hhalf_double_integral", "multiplier H^1/2 norm equals the double-integral norm", 1e-6, [&] {
        auto f = detail::random_band<R>(g, rng, -kb / 2, kb / 2);
        R a = std::pow(norm(f, NormKind::Hhalf), 2);
        return double(std::abs(a - oracle::hhalf_squared(f)) / a);
    });
    {
        int viol = 0;
        std::uniform_int_distribution<long> kd(1, kb);
        for (int s = 0; s < inequality_samples; ++s) {
            long k = kd(rng);
            auto f = remove_mean(detail::random_band<R>(g, rng, -k, k, double(k)));
            R n2 = norm(f, NormKind::L2), d2 = norm(derivative(f), NormKind::L2);
            R slack = R(1) + R(1e-12);
            if (std::pow(max_abs(f), 2) > slack * 2 * n2 * d2) ++viol;
            if (std::pow(norm(f, NormKind::Hhalf), 2) > slack * n2 * d2) ++viol;
        }
        add("sobolev", "|f|_inf^2 <= 2|f||f'| and |f|_{H^1/2}^2 <= |f||f'|", viol, 0.5, viol == 0,
            std::to_string(inequality_samples) + " samples");
    }

    // singular integral identities
    guarded("bracket_commutator_form", "[f,g;h] from the double integral equals the commutator form", 1e-8, [&] {
        R worst = 0;
        for (int r = 0; r < 3; ++r) {
            auto f = detail::random_band<R>(g, rng, -kb, kb), gg = detail::random_band<R>(g, rng, -kb, kb),
                 h = detail::random_band<R>(g, rng, -kb, kb);
            worst = std::max(worst, detail::rel(bracket(f, gg, h), oracle::bracket(f, gg, h)));
        }
        return double(worst);
    });
    guarded("holomorphic_bracket_projection", "P_H[f,g;h] = -2P_H(f dP_A(gh)) - 2P_H(g dP_A(fh)) for holomorphic h", 1e-8, [&] {
        auto f = detail::random_band<R>(g, rng, -kb, kb), gg = detail::random_band<R>(g, rng, -kb, kb),
             h = detail::random_band<R>(g, rng, -kb, 0);
        auto lhs = project(bracket(f, gg, h), Side::holo);
        auto rhs = C(-2) * project(f * derivative(project(gg * h, Side::anti)), Side::holo) -
                   C(2) * project(gg * derivative(project(f * h, Side::anti)), Side::holo);
        return double(detail::rel(lhs, rhs));
    });
    guarded("cubic_symmetry", "<f,g,h> invariant under argument permutations", 1e-12, [&] {
        std::array<F, 3> a{detail::random_band<R>(g, rng, -kb, kb), detail::random_band<R>(g, rng, -kb, kb),
                           detail::random_band<R>(g, rng, -kb, kb)};
        auto base = cubic_form(a[0], a[1], a[2]);
        std::array<int, 3> p{0, 1, 2};
        R worst = 0;
        while (std::next_permutation(p.begin(), p.end()))
            worst = std::max(worst, detail::rel(cubic_form(a[p[0]], a[p[1]], a[p[2]]), base));
        return double(worst);
    });
    guarded("antiholomorphic_pairing", "int dP_A(conj f g) f1 conj g1 equals its double-integral form", 1e-8, [&] {
        auto f = detail::random_band<R>(g, rng, -kb, 0), gg = detail::random_band<R>(g, rng, -kb, 0),
             f1 = detail::random_band<R>(g, rng, -kb, 0), g1 = detail::random_band<R>(g, rng, -kb, 0);
        C lhs = integral(derivative(project(conj(f) * gg, Side::anti)) * f1 * conj(g1));
        KernelSpec<R> ks;
        ks.diff_factors = {conj(f), f1};
        ks.beta_factors = {gg};
        ks.point_factors = {conj(g1)};
        C rhs = -oracle_quadrature(ks) / C(0, 2 * std::numbers::pi_v<R>);
        return double(std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
    });

    // inequalities with seeded random data
    {
        int viol = 0;
        std::uniform_real_distribution<double> ud(0.05, 0.95);
        const long kl = std::min<long>(kb, 20);
        for (int s = 0; s < inequality_samples; ++s) {
            auto f = detail::random_band<R>(g, rng, -kl, -1);
            auto h = detail::random_band<R>(g, rng, -kl, -1);
            R delta = R(ud(rng));
            h = h * C((1 - delta) / max_abs(h));  // 1/Z_α − 1 with sup norm 1 − δ
            auto q = project(f * conj(h + C(1)), Side::holo);
            if (delta * norm(f, NormKind::Hhalf) > (R(1) + R(1e-12)) * norm(q, NormKind::Hhalf)) ++viol;
        }
        add("coercivity_inequality", "delta |f|_{H^1/2} <= |P_H(f / conj Z_a)|_{H^1/2}", viol, 0.5, viol == 0,
            std::to_string(inequality_samples) + " samples");
    }
    {
        int viol = 0;
        std::uniform_real_distribution<double> ud(0.05, 1.0);
        const long kl = std::min<long>(kb, 20);
        for (int s = 0; s < inequality_samples; ++s) {
            auto h = detail::random_band<R>(g, rng, -kl, -1);
            h = h * C(R(ud(rng)) / max_abs(h));
            auto f = h + C(1);
            R lhs = std::pow(max_abs(h), 2);
            R rhs = 18 * norm(h, NormKind::L2) * norm(f * f * derivative(f), NormKind::L2);
            if (lhs > (R(1) + R(1e-12)) * rhs) ++viol;
        }
        add("sup_norm_inequality", "|f-1|_inf^2 <= 18 |f-1| |f^2 f'|", viol, 0.5, viol == 0, std::to_string(inequality_samples) + " samples");
    }

    // identities on an admissible state, all time derivatives from jets
    try {
        auto s = random_admissible_state<R>(g, seed);
        SliceContext<R> ctx(s, 4);
        const auto& B = ctx.base();
        auto ztb = conj(s.zt);
        auto Q = ctx.theta_jet(0);
        guarded("dtQ_identity", "D_t Q = i(Z - a) + P_A |Z_t|^2", 1e-8, [&] {
            auto resid = remove_mean(Q[1] - C(0, 1) * s.zeta - project(abs_squared(s.zt), Side::anti));
            return double(norm(resid, NormKind::L2) / norm(remove_mean(Q[0]), NormKind::L2));
        });
        guarded("second_order_Q_identity", "D_t P_H D_t Q + i|Z_a|^-2 dQ = i P_A(Z_t(1 - 1/Z_a) + conj Z_t(1/conj Z_a - 1))", 1e-7, [&] {
            auto w = abs_squared(B.inv_Za[0]);
            auto t1 = ctx.theta_jet(1)[1];
            auto t2 = C(0, 1) * (w * derivative(Q[0]));
            auto t3 = C(0, 1) * project(s.zt * (C(1) - B.inv_Za[0]) + ztb * (conj(B.inv_Za[0]) - C(1)), Side::anti);
            auto resid = remove_mean(t1 + t2 - t3);
            R scale = std::max({norm(remove_mean(t1), NormKind::L2), norm(remove_mean(t2), NormKind::L2),
                                norm(remove_mean(t3), NormKind::L2)});
            return double(norm(resid, NormKind::L2) / scale);
        });
        for (int j = 1; j <= 2; ++j)
            guarded("G_recursion_" + std::to_string(j), "P_H G^(j) by recursion equals the direct definition", 1e-6,
                    [&] { return double(detail::rel(remove_mean(ctx.phg(j)), remove_mean(ctx.phg_direct(j)))); });
        guarded("b_alpha_identity", "b_a - 2Re D_a Z_t = 1/2[1/Z_a, Z_t; 1] - 1/2[conj Z_t, 1/conj Z_a; 1]", 1e-9, [&] {
            auto lhs = derivative(B.b[0]) - C(2) * real_part(B.inv_Za[0] * derivative(s.zt));
            auto rhs = C(R(0.5)) * bracket(B.inv_Za[0], s.zt) - C(R(0.5)) * bracket(ztb, conj(B.inv_Za[0]));
            return double(detail::rel(lhs, rhs));
        });
        guarded("dt_inverse_za_identity", "D_t(1/Z_a) from jets equals (1/Z_a)(b_a - D_a Z_t)", 1e-9, [&] {
            auto rhs = B.inv_Za[0] * (derivative(B.b[0]) - B.inv_Za[0] * derivative(s.zt));
            return double(detail::rel(B.inv_Za[1], rhs));
        });
        guarded("dt_weighted_derivative_commutator", "[D_t, |Z_a|^-2 d] f = (b_a - 2Re D_a Z_t)|Z_a|^-2 df", 1e-9, [&] {
            MaterialJet<R> f({detail::random_band<R>(g, rng, -kb, kb), detail::random_band<R>(g, rng, -kb, kb)});
            auto inv = B.inv_Za.truncate(1);
            auto w = jet_product(inv, conj(inv));
            auto wdf = jet_product(w, jet_derivative(f, B.flow));
            auto lhs = wdf[1] - w[0] * derivative(f[1]);
            auto ba = derivative(B.b[0]) - C(2) * real_part(B.inv_Za[0] * derivative(s.zt));
            return double(detail::rel(lhs, ba * w[0] * derivative(f[0])));
        });
        guarded("energy_decomposition", "E_j equals its Theta/G decomposition (j = 0, 1)", 1e-8, [&] {
            R worst = 0;
            for (int j = 0; j <= 1; ++j) {
                auto q = energy_quadratic(ctx, j);
                worst = std::max(worst, std::abs(q.value - q.alt) / std::abs(q.value));
            }
            return double(worst);
        });
    } catch (const std::exception& e) {
        add("admissible_state", "construction of the random admissible state", NAN, 0, false, e.what());
    }
    guarded("flat_nilpotence", "jets of the flat state vanish beyond order 0", 1e-300, [&] {
        SliceContext<R> ctx(WaveState<R>::rest(g), 3);
        R worst = 0;
        const auto& B = ctx.base();
        for (int k = 1; k <= 3; ++k)
            worst = std::max({worst, max_abs(B.b[k]), max_abs(B.inv_Za[k]), max_abs(B.A1[k]), max_abs(B.zt[k])});
        return double(worst);
    });
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace wwave
