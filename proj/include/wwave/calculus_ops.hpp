#pragma once

#include <optional>

#include "spectral_core.hpp"

namespace wwave {

template <class R>
SpectralField<R> filtered_product(const SpectralField<R>& f, const SpectralField<R>& g, const FilterRule& rule) {
    return spectral_filter(f * g, rule);
}

// [f,ℍ]g = f ℍg − ℍ(fg), or [f,ℍ]∂g
template <class R>
SpectralField<R> commutator_hilbert(const SpectralField<R>& f, const SpectralField<R>& g, bool differentiate,
                                    const FilterRule& rule = {}) {
    f.check(g);
    SpectralField<R> u = differentiate ? derivative(g) : g;
    return filtered_product(f, hilbert(u), rule) - hilbert(filtered_product(f, u, rule));
}

// [f,g;h] = (1/πi)∫ Δf Δg h(β)/(α−β)² dβ through
// [f,ℍ]∂(gh) + [g,ℍ]∂(fh) − [fg,ℍ]∂h
template <class R>
SpectralField<R> bracket(const SpectralField<R>& f, const SpectralField<R>& g, const SpectralField<R>& h,
                         const FilterRule& rule = {}) {
    f.check(g);
    f.check(h);
    return commutator_hilbert(f, filtered_product(g, h, rule), true, rule) +
           commutator_hilbert(g, filtered_product(f, h, rule), true, rule) -
           commutator_hilbert(filtered_product(f, g, rule), h, true, rule);
}

template <class R>
SpectralField<R> bracket(const SpectralField<R>& f, const SpectralField<R>& g, const FilterRule& rule = {}) {
    // h ≡ 1: the last commutator vanishes
    return commutator_hilbert(f, g, true, rule) + commutator_hilbert(g, f, true, rule);
}

// ⟨f,g,h⟩ = (1/πi)∫ Δf Δg Δh/(α−β)² dβ = h[f,g;1] − [f,g;h]
template <class R>
SpectralField<R> cubic_form(const SpectralField<R>& f, const SpectralField<R>& g, const SpectralField<R>& h,
                            const FilterRule& rule = {}) {
    return filtered_product(h, bracket(f, g, rule), rule) - bracket(f, g, h, rule);
}

// ∬ F(α) Δf1 Δf2 Δf3 /(α−β)² dβ dα = πi ∫ F ⟨f1,f2,f3⟩
template <class R>
std::complex<R> quartic_pairing(const SpectralField<R>& F, const SpectralField<R>& f1, const SpectralField<R>& f2,
                                const SpectralField<R>& f3, const FilterRule& rule = {}) {
    const std::complex<R> pii(0, std::numbers::pi_v<R>);
    return pii * integral(F * cubic_form(f1, f2, f3, rule));
}

// ∬ w(α) Δf1 Δf2 Δf3 Δf4 /(α−β)² dβ dα, w ≡ 1 when absent
template <class R>
std::complex<R> quartic_4diff(const std::optional<SpectralField<R>>& w, const SpectralField<R>& f1,
                              const SpectralField<R>& f2, const SpectralField<R>& f3, const SpectralField<R>& f4,
                              const FilterRule& rule = {}) {
    const std::complex<R> pii(0, std::numbers::pi_v<R>);
    auto inner = filtered_product(f4, cubic_form(f1, f2, f3, rule), rule) -
                 filtered_product(f3, bracket(f1, f2, f4, rule), rule) +
                 bracket(f1, f2, filtered_product(f3, f4, rule), rule);
    if (w) inner = *w * inner;
    return pii * integral(inner);
}

struct KernelWeight {
    enum class Kind { none, alpha_only, b_symmetric } kind = Kind::none;
};

template <class R>
struct KernelSpec {
    int power = 2;
    KernelWeight::Kind weight = KernelWeight::Kind::none;
    std::optional<SpectralField<R>> weight_field;  // w for alpha_only, b for b_symmetric
    std::vector<SpectralField<R>> diff_factors;
    std::vector<SpectralField<R>> point_factors;  // evaluated at α
    std::vector<SpectralField<R>> beta_factors;   // evaluated at β
};

namespace detail {

template <class T>
T pairwise_sum(const T* v, std::size_t n) {
    if (n <= 8) {
        T s(0);
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace detail

// Row integrals ∫ K_p(α−β) W(α,β) Π Δf_i Π p(α) Π q(β) dβ by the trapezoid rule on the periodic
// kernels K_1 = (π/L)cot(πx/L), K_2 = (π/L)²/sin²(πx/L), K_3 = (π/L)³cos/sin³.
// Diagonal: analytic limit when #diff ≥ power; odd-offset rule (step 2h) for the principal value when
// #diff = power − 1.
template <class R>
SpectralField<R> oracle_rows(const KernelSpec<R>& spec) {
    using C = std::complex<R>;
    if (spec.power < 1 || spec.power > 3) throw WaveError("kernel power must be 1, 2 or 3");
    const int d = static_cast<int>(spec.diff_factors.size());
    const bool weighted = spec.weight != KernelWeight::Kind::none;
    if (weighted && !spec.weight_field) throw WaveError("weight field missing");
    const bool bsym = spec.weight == KernelWeight::Kind::b_symmetric;
    // b_symmetric vanishes to second order on the diagonal
    const int eff = d + (bsym ? 2 : 0);
    if (d < spec.power - 1) throw WaveError("insufficient diff factors: non-integrable diagonal");
    const bool pv = eff == spec.power - 1;

    const SpectralField<R>* any = nullptr;
    if (!spec.diff_factors.empty()) any = &spec.diff_factors.front();
    else if (!spec.point_factors.empty()) any = &spec.point_factors.front();
    else if (!spec.beta_factors.empty()) any = &spec.beta_factors.front();
    else if (spec.weight_field) any = &*spec.weight_field;
    if (!any) throw WaveError("empty kernel spec");
    const Grid& g = any->grid();
    const std::size_t N = g.N;
    const R pil = std::numbers::pi_v<R> / R(g.L);
    const R h = R(g.L) / R(N);

    std::vector<R> K1(N, 0), Kp(N, 0);
    for (std::size_t s = 1; s < N; ++s) {
        R x = std::numbers::pi_v<R> * R(s) / R(N);
        R sn = std::sin(x), cs = std::cos(x);
        K1[s] = pil * cs / sn;
        if (spec.power == 1) Kp[s] = K1[s];
        else if (spec.power == 2) Kp[s] = pil * pil / (sn * sn);
        else Kp[s] = pil * pil * pil * cs / (sn * sn * sn);
    }

    std::vector<SpectralField<R>> dfs;
    if (!pv && eff == spec.power)
        for (const auto& f : spec.diff_factors) dfs.push_back(derivative(f));
    std::optional<SpectralField<R>> bder;
    if (bsym) bder = derivative(*spec.weight_field);

    std::vector<C> out(N), row(N);
    for (std::size_t m = 0; m < N; ++m) {
        C pa(1);
        for (const auto& p : spec.point_factors) pa *= p[m];
        if (spec.weight == KernelWeight::Kind::alpha_only) pa *= (*spec.weight_field)[m];
        std::size_t cnt = 0;
        for (std::size_t j = 0; j < N; ++j) {
            std::size_t s = (m + N - j) % N;
            if (pv && (s % 2 == 0)) continue;
            C val(1);
            for (const auto& q : spec.beta_factors) val *= q[j];
            if (s == 0) {
                if (eff > spec.power) {
                    val = 0;
                } else {
                    for (const auto& df : dfs) val *= df[m];
                }
            } else {
                for (const auto& f : spec.diff_factors) val *= (f[m] - f[j]);
                val *= Kp[s];
                if (bsym) {
                    const auto& b = *spec.weight_field;
                    val *= ((*bder)[m] + (*bder)[j] - R(2) * (b[m] - b[j]) * K1[s]);
                }
            }
            row[cnt++] = val;
        }
        out[m] = pa * detail::pairwise_sum(row.data(), cnt) * (pv ? 2 * h : h);
    }
    return SpectralField<R>(g, std::move(out));
}

template <class R>
std::complex<R> oracle_quadrature(const KernelSpec<R>& spec) {
    return integral(oracle_rows(spec));
}

namespace oracle {

template <class R>
SpectralField<R> hilbert(const SpectralField<R>& f) {
    KernelSpec<R> s;
    s.power = 1;
    s.beta_factors = {f};
    return oracle_rows(s) * std::complex<R>(0, -1 / std::numbers::pi_v<R>);
}

template <class R>
SpectralField<R> commutator_hilbert(const SpectralField<R>& f, const SpectralField<R>& g) {
    KernelSpec<R> s;
    s.power = 1;
    s.diff_factors = {f};
    s.beta_factors = {g};
    return oracle_rows(s) * std::complex<R>(0, -1 / std::numbers::pi_v<R>);
}

template <class R>
SpectralField<R> bracket(const SpectralField<R>& f, const SpectralField<R>& g, const SpectralField<R>& h) {
    KernelSpec<R> s;
    s.diff_factors = {f, g};
    s.beta_factors = {h};
    return oracle_rows(s) * std::complex<R>(0, -1 / std::numbers::pi_v<R>);
}

template <class R>
SpectralField<R> cubic_form(const SpectralField<R>& f, const SpectralField<R>& g, const SpectralField<R>& h) {
    KernelSpec<R> s;
    s.diff_factors = {f, g, h};
    return oracle_rows(s) * std::complex<R>(0, -1 / std::numbers::pi_v<R>);
}

template <class R>
std::complex<R> quartic_pairing(const SpectralField<R>& F, const SpectralField<R>& f1, const SpectralField<R>& f2,
                                const SpectralField<R>& f3) {
    KernelSpec<R> s;
    s.diff_factors = {f1, f2, f3};
    s.point_factors = {F};
    return oracle_quadrature(s);
}

template <class R>
std::complex<R> quartic_4diff(const std::optional<SpectralField<R>>& w, const SpectralField<R>& f1,
                              const SpectralField<R>& f2, const SpectralField<R>& f3, const SpectralField<R>& f4) {
    KernelSpec<R> s;
    s.diff_factors = {f1, f2, f3, f4};
    if (w) s.point_factors = {*w};
    return oracle_quadrature(s);
}

// (1/2π)∬|Δf|²/(α−β)²
template <class R>
R hhalf_squared(const SpectralField<R>& f) {
    KernelSpec<R> s;
    s.diff_factors = {f, conj(f)};
    return oracle_quadrature(s).real() / (2 * std::numbers::pi_v<R>);
}

}  // namespace oracle

}  // namespace wwave
