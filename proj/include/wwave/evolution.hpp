#pragma once

#include "jet_algebra.hpp"

namespace wwave {

struct InitialProfile {
    enum class Kind { single_mode, packet, custom } kind = Kind::single_mode;
    int k0 = 1;                 // single_mode: e^{−i k0 (2π/L) α}
    double k_center = 4;        // packet
    double width = 1.5;
    std::vector<std::complex<double>> coeffs;  // custom: amplitude of e^{−i n (2π/L) α}, n = 1, 2, ...
    // Z̄_t profile = velocity_phase · geometric profile; i gives equal counter-propagating waves
    std::complex<double> velocity_phase{0, 1};
    // when nonempty, Z̄_t uses its own custom profile instead of velocity_phase · geometric profile
    std::vector<std::complex<double>> velocity_coeffs;

    static InitialProfile single_mode(int k) { InitialProfile p; p.k0 = k; return p; }
    static InitialProfile packet(double kc, double w) {
        InitialProfile p;
        p.kind = Kind::packet;
        p.k_center = kc;
        p.width = w;
        return p;
    }
};

// holomorphic profile built from negative modes only
template <class R>
SpectralField<R> profile_field(const Grid& g, const InitialProfile& p) {
    std::vector<std::complex<R>> c(g.N, 0);
    auto set = [&](long n, std::complex<R> a) {
        if (n <= 0 || n >= long(g.N / 2)) throw WaveError("profile mode outside the resolved band");
        c[g.N - n] = a;
    };
    switch (p.kind) {
        case InitialProfile::Kind::single_mode: set(p.k0, 1); break;
        case InitialProfile::Kind::packet:
            for (long n = 1; n < long(g.N / 4); ++n) {
                R x = (R(n) - R(p.k_center)) / R(p.width);
                R a = std::exp(-x * x / 2);
                if (a > R(1e-30)) set(n, a);
            }
            break;
        case InitialProfile::Kind::custom:
            if (p.coeffs.empty()) throw WaveError("custom profile needs coefficients");
            for (std::size_t n = 0; n < p.coeffs.size(); ++n)
                set(long(n + 1), std::complex<R>(R(p.coeffs[n].real()), R(p.coeffs[n].imag())));
            break;
    }
    return SpectralField<R>::from_coeffs(g, c);
}

// 1/Z_{,α} − 1 = c₁ g, Z̄_t = c₂ v with the geometric pair of L(0) and the velocity pair each equal to ε/2.
template <class R>
WaveState<R> make_initial_data(const Grid& g, const InitialProfile& p, R eps) {
    using C = std::complex<R>;
    if (eps < 0) throw WaveError("epsilon must be nonnegative");
    if (eps == 0) return WaveState<R>::rest(g);
    auto gf = profile_field<R>(g, p);
    SpectralField<R> vf;
    if (p.velocity_coeffs.empty()) {
        vf = gf * C(R(p.velocity_phase.real()), R(p.velocity_phase.imag()));
    } else {
        InitialProfile q;
        q.kind = InitialProfile::Kind::custom;
        q.coeffs = p.velocity_coeffs;
        vf = profile_field<R>(g, q);
    }
    R geo = norm(gf, NormKind::Hhalf) + norm(derivative(gf), NormKind::Hhalf);
    R vel = norm(derivative(vf), NormKind::L2) + norm(derivative(vf, 2), NormKind::L2);
    R c1 = eps / 2 / geo, c2 = eps / 2 / vel;
    auto h = gf * c1;
    if (!(max_abs(h) < R(1))) throw WaveError("steepness bound violated: ||1 - 1/Z_a||_inf >= 1");
    auto Za = reciprocal(h + C(1));
    WaveState<R> s;
    s.t = 0;
    s.zeta = antiderivative_unchecked(Za - C(1));
    s.zt = conj(vf * c2);
    return s;
}

struct StepOptions {
    FilterRule filter;           // applied once per step to both fields
    FilterRule product_filter;   // dealiasing inside products
    bool project_constraints = false;
};

template <class R>
struct Tendency {
    SpectralField<R> zeta;
    SpectralField<R> zt;
};

// ∂_t(Z − α) = Z_t − b Z_{,α}, ∂_t Z_t = Z_tt − b ∂Z_t
template <class R>
Tendency<R> rhs(const WaveState<R>& s, const FilterRule& rule = {}) {
    auto aux = compute_aux(s, rule);
    return {s.zt - filtered_product(aux.b, aux.Za, rule), aux.Ztt - filtered_product(aux.b, derivative(s.zt), rule)};
}

template <class R>
WaveState<R> step(const WaveState<R>& s, double dt, const StepOptions& opt = {}) {
    if (!(dt != 0) || !std::isfinite(dt)) throw WaveError("time step must be finite and nonzero");
    const R h = R(dt);
    auto shifted = [&](const Tendency<R>& k, R c) {
        return WaveState<R>{s.t, s.zeta + k.zeta * c, s.zt + k.zt * c};
    };
    WaveState<R> out;
    try {
        auto k1 = rhs(s, opt.product_filter);
        auto k2 = rhs(shifted(k1, h / 2), opt.product_filter);
        auto k3 = rhs(shifted(k2, h / 2), opt.product_filter);
        auto k4 = rhs(shifted(k3, h), opt.product_filter);
        const R w = h / 6;
        out.zeta = s.zeta + (k1.zeta + k2.zeta * R(2) + k3.zeta * R(2) + k4.zeta) * w;
        out.zt = s.zt + (k1.zt + k2.zt * R(2) + k3.zt * R(2) + k4.zt) * w;
    } catch (const BlowUpError&) {
        throw;
    } catch (const WaveError& e) {
        throw BlowUpError(std::string("blow-up detected: ") + e.what(), s.t);
    }
    out.t = s.t + dt;
    out.zeta = spectral_filter(out.zeta, opt.filter);
    out.zt = spectral_filter(out.zt, opt.filter);
    if (opt.project_constraints) {
        out.zeta = project(out.zeta, Side::holo);
        out.zt = conj(project(conj(out.zt), Side::holo));
    }
    if (!out.zeta.is_finite() || !out.zt.is_finite()) throw BlowUpError("blow-up detected", out.t);
    return out;
}

// dt = cfl · h / max(1, max|b|, max|Z_t|)
template <class R>
double cfl_dt(const WaveState<R>& s, double cfl) {
    auto aux = compute_aux(s);
    double speed = std::max({1.0, double(max_abs(aux.b)), double(max_abs(s.zt))});
    return cfl * double(s.grid().template spacing<R>()) / speed;
}

// Rescaled data (λ^{−1/2} Z̄_t(λα), λ^{−1} Z(λα)) on period L/λ; same grid samples.
template <class R>
WaveState<R> rescale(const WaveState<R>& s, R lambda) {
    Grid g(s.grid().N, s.grid().L / static_cast<long double>(lambda));
    WaveState<R> out;
    out.t = s.t / std::sqrt(double(lambda));
    out.zeta = SpectralField<R>(g, (s.zeta * (R(1) / lambda)).values());
    out.zt = SpectralField<R>(g, (s.zt * (R(1) / std::sqrt(lambda))).values());
    return out;
}

}  // namespace wwave
