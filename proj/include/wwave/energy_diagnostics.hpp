#pragma once

#include <array>
#include <cmath>

#include "evolution.hpp"

namespace wwave {

// Everything needed at one time slice: base jets, the Θ^(j) jets and cached P_H G^(j).
template <class R>
class SliceContext {
public:
    using Field = SpectralField<R>;
    using Jet = MaterialJet<R>;
    using C = std::complex<R>;

    SliceContext(const WaveState<R>& s, int jet_order, const FilterRule& rule = {})
        : state_(s), rule_(rule), base_(build_base_jets(s, jet_order, rule)) {
        // Θ^(0) = Q = ∂^{-1}(Z̄_t Z_{,α}) with zero mean; Θ^(j+1) = P_H D_t Θ^(j)
        auto dQ = jet_product(base_.Ztbar(), base_.Za, rule);
        theta_.push_back(jet_multiplier(JetMultiplier::antiderivative, dQ, base_.flow));
        while (theta_.back().order() > 0) theta_.push_back(jet_project(theta_.back().shift(), base_.flow, Side::holo));
        zt_.reserve(base_.zt.order() + 1);
        for (int k = 0; k <= base_.zt.order(); ++k) {
            zt_.push_back(base_.zt[k]);
            ztb_.push_back(conj(base_.zt[k]));
        }
    }

    const WaveState<R>& state() const { return state_; }
    const BaseJets<R>& base() const { return base_; }
    const FilterRule& rule() const { return rule_; }
    const Grid& grid() const { return state_.grid(); }
    int jet_order() const { return base_.order; }
    int max_theta() const { return static_cast<int>(theta_.size()) - 1; }

    const Jet& theta_jet(int j) const {
        if (j < 0 || j > max_theta()) throw WaveError("insufficient jet order for theta");
        return theta_[j];
    }
    const Field& theta(int j) const { return theta_jet(j)[0]; }
    // D_t^k Z_t and D_t^k Z̄_t
    const Field& Zt(int k) const {
        if (k < 0 || k >= int(zt_.size())) throw WaveError("insufficient jet order for D_t^k Z_t");
        return zt_[k];
    }
    const Field& Ztb(int k) const { Zt(k); return ztb_[k]; }

    // D_α f = (1/Z_{,α}) ∂f as a jet
    Jet d_alpha(const Jet& f) const {
        auto inv = base_.inv_Za.truncate(f.order());
        return jet_product(inv, jet_derivative(f, base_.flow), rule_);
    }

    // P_H G^(j) from the recursion Σ_l (P_H D_t)^l ½P_H{(1/Z̄_{,α})(⟨Z̄_t, i/Z̄_{,α}, D_αΘ⟩ + ⟨−i/Z_{,α}, Z_t, D_αΘ⟩)}
    const Field& phg(int j) const {
        if (j < 0) throw WaveError("negative energy index");
        if (auto it = phg_cache_.find(j); it != phg_cache_.end()) return it->second;
        Field acc(grid());
        for (int l = 0; l <= j - 1; ++l) {
            int m = j - l - 1;
            if (theta_jet(m).order() < l) throw WaveError("insufficient jet order for P_H G");
            auto dth = d_alpha(theta_jet(m).truncate(l));
            auto inv = base_.inv_Za.truncate(l);
            auto invb = conj(inv);
            auto Zt = base_.Zt().truncate(l);
            auto Ztb = conj(Zt);
            const auto& fl = base_.flow;
            auto inner = jet_cubic_form(Ztb, C(0, 1) * invb, dth, fl) + jet_cubic_form(C(0, -1) * inv, Zt, dth, fl);
            auto block = jet_project(C(R(0.5)) * jet_product(invb, inner, rule_), fl, Side::holo);
            for (int r = 0; r < l; ++r) block = jet_project(block.shift(), fl, Side::holo);
            acc += block[0];
        }
        return phg_cache_.emplace(j, acc).first->second;
    }

    // P_H G^(j) directly from G^(j) = D_t P_H D_t Θ^(j) + i(1/|Z_{,α}|²)∂Θ^(j)
    Field phg_direct(int j) const {
        const auto& next = theta_jet(j + 1);
        if (next.order() < 1) throw WaveError("insufficient jet order for direct G");
        auto w = abs_squared(base_.inv_Za[0]);
        return project(next[1] + C(0, 1) * (w * derivative(theta(j))), Side::holo);
    }

private:
    WaveState<R> state_;
    FilterRule rule_;
    BaseJets<R> base_;
    std::vector<Jet> theta_;
    std::vector<Field> zt_, ztb_;
    mutable std::map<int, Field> phg_cache_;
};

// ∫ i∂f ḡ
template <class R>
std::complex<R> i_dpair(const SpectralField<R>& f, const SpectralField<R>& g) {
    return std::complex<R>(0, 1) * integral(derivative(f) * conj(g));
}

template <class R>
struct PairEnergy {
    R value = 0;  // Re(∫ i∂Θ₂ conj D_tΘ₁ − ∫ i∂Θ₁ conj D_tΘ₂)
    R rate = 0;   // Re(∫ i∂Θ₂ conj P_H G₁ − ∫ i∂Θ₁ conj P_H G₂)
};

// basic energy form for the pair Θ₁ = Θ^(j1), Θ₂ = Θ^(j2)
template <class R>
PairEnergy<R> theta_pair_energy(const SliceContext<R>& ctx, int j1, int j2) {
    const auto &t1 = ctx.theta_jet(j1), &t2 = ctx.theta_jet(j2);
    if (t1.order() < 1 || t2.order() < 1) throw WaveError("insufficient jet order for the pair energy");
    PairEnergy<R> e;
    e.value = (i_dpair(t2[0], t1[1]) - i_dpair(t1[0], t2[1])).real();
    e.rate = (i_dpair(t2[0], ctx.phg_direct(j1)) - i_dpair(t1[0], ctx.phg_direct(j2))).real();
    return e;
}

template <class R>
struct QuadraticEnergy {
    R value = 0;        // E_j from the defining formula
    R alt = 0;          // the decomposition ∫i∂Θ^(j+1)·conj Θ^(j+1) + ∫|D_αΘ^(j)|² + ∫i∂Θ̄^(j) P_H G^(j)
    R imag = 0;
};

// E_j = Re(∫ i∂Θ^(j+1) conj Θ^(j+1) − ∫ i∂Θ^(j) conj Θ^(j+2))
template <class R>
QuadraticEnergy<R> energy_quadratic(const SliceContext<R>& ctx, int j, bool with_alt = true) {
    QuadraticEnergy<R> e;
    auto z = i_dpair(ctx.theta(j + 1), ctx.theta(j + 1)) - i_dpair(ctx.theta(j), ctx.theta(j + 2));
    e.value = z.real();
    e.imag = z.imag();
    if (with_alt) {
        auto da = ctx.base().inv_Za[0] * derivative(ctx.theta(j));
        auto y = i_dpair(ctx.theta(j + 1), ctx.theta(j + 1)) + integral(abs_squared(da)) +
                 std::complex<R>(0, 1) * integral(derivative(conj(ctx.theta(j))) * ctx.phg(j));
        e.alt = y.real();
    }
    return e;
}

namespace detail {

// Δ(D_t^order Z̄_t) when bar == false (θ-type), Δ(D_t^order Z_t) when bar == true
struct DiffFactor {
    bool bar;
    int order;
};

using DiffProduct = std::vector<DiffFactor>;

// 𝔇_t^n applied to a product of differences, by the multinomial Leibniz rule
inline void expand_leibniz(int n, const DiffProduct& p, const std::function<void(double, const DiffProduct&)>& emit) {
    DiffProduct cur = p;
    std::function<void(std::size_t, int, double)> rec = [&](std::size_t i, int left, double coef) {
        if (i + 1 == p.size()) {
            cur[i].order = p[i].order + left;
            emit(coef, cur);
            return;
        }
        for (int a = 0; a <= left; ++a) {
            cur[i].order = p[i].order + a;
            rec(i + 1, left - a, coef * binom(left, a));
        }
    };
    if (p.empty()) return;
    rec(0, n, 1.0);
}

}  // namespace detail

template <class R>
struct Corrections {
    std::complex<R> theta_phg;  // ∫ i∂Θ^(j) conj(P_H G^(j))
    std::complex<R> C1, C2, F, D, H;
};

template <class R>
class CorrectionBuilder {
public:
    using Field = SpectralField<R>;
    using C = std::complex<R>;
    using DP = detail::DiffProduct;

    explicit CorrectionBuilder(const SliceContext<R>& ctx) : ctx_(ctx) {}

    const Field& diff_field(const detail::DiffFactor& f) const { return f.bar ? ctx_.Zt(f.order) : ctx_.Ztb(f.order); }

    // ∬ w(α) Π Δ(...) /(α−β)²
    C pairing(const Field* w, const DP& p) const {
        const auto& r = ctx_.rule();
        if (p.size() == 3) {
            if (!w) throw WaveError("three-difference pairing needs a point factor");
            return quartic_pairing(*w, diff_field(p[0]), diff_field(p[1]), diff_field(p[2]), r);
        }
        if (p.size() == 4) {
            std::optional<Field> wf;
            if (w) wf = *w;
            return quartic_4diff(wf, diff_field(p[0]), diff_field(p[1]), diff_field(p[2]), diff_field(p[3]), r);
        }
        throw WaveError("unsupported difference product");
    }

    C pairing_d(const Field* w, int n, const DP& p) const {
        C acc(0);
        detail::expand_leibniz(n, p, [&](double c, const DP& q) { acc += R(c) * pairing(w, q); });
        return acc;
    }

    // ∬ (D_t^j Z_t 𝔇_t − D_t^{j+1} Z_t) 𝔇_t^n(p)
    C op_pair(int j, int n, const DP& p) const {
        return pairing_d(&ctx_.Zt(j), n + 1, p) - pairing_d(&ctx_.Zt(j + 1), n, p);
    }

    // ∬ (θ𝔇_t − 𝔇_tθ) p
    C theta_op_pair(const DP& p) const {
        C acc(0);
        detail::expand_leibniz(1, p, [&](double c, const DP& q) {
            DP r{{false, 0}};
            r.insert(r.end(), q.begin(), q.end());
            acc += R(c) * pairing(nullptr, r);
        });
        DP r{{false, 1}};
        r.insert(r.end(), p.begin(), p.end());
        return acc - pairing(nullptr, r);
    }

    static R sgn(int k) { return (k % 2 == 0) ? R(1) : R(-1); }

    C C1(int j) const {
        const R pi = std::numbers::pi_v<R>;
        C t1(0), t2(0), t3(0), t4(0);
        for (int l = 0; l <= j - 1; ++l)
            for (int k = 0; k <= l; ++k) t1 += op_pair(j, l - k, {{false, k}, {true, 0}, {false, j - l - 1}});
        for (int l = 0; l <= j - 2; ++l)
            for (int k = 0; k <= j - l - 2; ++k)
                t2 += sgn(k) * op_pair(j, 0, {{false, 1 + l}, {true, k}, {false, j - l - 2 - k}});
        for (int l = 0; l <= j - 2; ++l)
            for (int k = 0; k <= j - l - 2; ++k)
                t3 += sgn(k) * theta_op_pair({{true, j - l - 1}, {false, j - k - 1}, {true, k + l + 1}});
        for (int l = 0; l <= j - 1; ++l) t4 += pairing(&ctx_.Zt(j), {{false, j - l - 1}, {true, 0}, {false, 1 + l}});
        return t1 / (2 * pi) + t2 / (4 * pi) - t3 / (8 * pi) + t4 / (2 * pi);
    }

    C C2(int j) const {
        const R pi = std::numbers::pi_v<R>;
        C t(0);
        for (int k = 0; k <= j - 1; ++k) t += sgn(k) * op_pair(j, 0, {{false, 0}, {true, k}, {false, j - k - 1}});
        t += sgn(j) * pairing(&ctx_.Zt(j), {{false, 0}, {true, j}, {false, 0}});
        return t / (4 * pi);
    }

    // F^(m)_{j̄;l,ī,k}
    C Fm(int j, int m, int l, int i, int k) const {
        const auto& base = ctx_.base();
        // 𝒫 D_t^{j−1} Z̄_t = D_t^{j+1} Z̄_t + i(A₁/|Z_{,α}|²) ∂ D_t^{j−1} Z̄_t
        Field P = ctx_.Ztb(j + 1) +
                  C(0, 1) * (base.A1[0] * abs_squared(base.inv_Za[0]) * derivative(ctx_.Ztb(j - 1)));
        Field Pb = conj(P);
        C acc = pairing_d(&Pb, m, {{false, l}, {true, i}, {false, k}});
        detail::expand_leibniz(m, {{false, l}, {true, i}, {false, k}}, [&](double c, const DP& q) {
            KernelSpec<R> s;
            s.weight = KernelWeight::Kind::b_symmetric;
            s.weight_field = base.b[0];
            s.point_factors = {ctx_.Zt(j)};
            for (const auto& f : q) s.diff_factors.push_back(diff_field(f));
            acc += R(c) * oracle_quadrature(s);
        });
        return acc;
    }

    C F(int j) const {
        if (j < 2) return 0;
        const R pi = std::numbers::pi_v<R>;
        C t1(0), t2(0), t3(0);
        for (int l = 0; l <= j - 1; ++l)
            for (int k = 0; k <= l; ++k) t1 += Fm(j, l - k, k, 0, j - l - 1);
        for (int l = 0; l <= j - 2; ++l)
            for (int k = 0; k <= j - l - 2; ++k) t2 += sgn(k) * Fm(j, 0, 1 + l, k, j - l - 2 - k);
        for (int k = 0; k <= j - 1; ++k) t3 += sgn(k) * Fm(j, 0, 0, k, j - k - 1);
        return t1 / (2 * pi) + t2 / (4 * pi) + t3 / (4 * pi);
    }

    C D(int j) const {
        if (j != 2) return 0;
        const R pi = std::numbers::pi_v<R>;
        Field w = hilbert(derivative(ctx_.base().b[0]));
        return pairing(&w, {{true, 0}, {false, 1}, {true, 1}, {false, 1}}) / (4 * pi);
    }

    // H_j with λ^j = Δ(D_αΘ^(j))
    C H(int j) const {
        const R pi = std::numbers::pi_v<R>;
        const auto& r = ctx_.rule();
        Field lam = ctx_.base().inv_Za[0] * derivative(ctx_.theta(j));
        Field lamb = conj(lam);
        const Field& th = ctx_.Ztb(0);
        const Field& thb = ctx_.Zt(0);
        std::optional<Field> none;
        C a = quartic_4diff(none, lamb, lam, th, thb, r) + quartic_4diff(none, lamb, lamb, th, th, r);
        C b = quartic_4diff(none, ctx_.Zt(j), ctx_.Ztb(j), th, thb, r) + quartic_4diff(none, ctx_.Zt(j), ctx_.Zt(j), th, th, r);
        return C((a - b).real() / (4 * pi), 0);
    }

    Corrections<R> all(int j, bool quintic) const {
        Corrections<R> c;
        c.theta_phg = i_dpair(ctx_.theta(j), ctx_.phg(j));
        c.C1 = C1(j);
        c.C2 = C2(j);
        if (quintic) {
            c.F = F(j);
            c.D = D(j);
            c.H = H(j);
        }
        return c;
    }

private:
    const SliceContext<R>& ctx_;
};

template <class R>
struct EnergyLevel {
    int j = 0;
    R E = 0, E_alt = 0;
    R frakE = 0;  // 𝔈_j
    R calE = 0;   // ℰ_j
    Corrections<R> corr;
    R imag = 0;   // largest imaginary residue of real-by-construction pieces
};

template <class R>
EnergyLevel<R> energy_level(const SliceContext<R>& ctx, int j, bool quintic = true) {
    EnergyLevel<R> lv;
    lv.j = j;
    auto q = energy_quadratic(ctx, j);
    lv.E = q.value;
    lv.E_alt = q.alt;
    lv.imag = std::abs(q.imag);
    CorrectionBuilder<R> cb(ctx);
    lv.corr = cb.all(j, quintic);
    lv.frakE = lv.E - (lv.corr.theta_phg + lv.corr.C1 + lv.corr.C2).real();
    lv.calE = lv.frakE - lv.corr.F.real() + lv.corr.D.real() - lv.corr.H.real();
    return lv;
}

template <class R>
R energy_frak(const SliceContext<R>& ctx, int j) { return energy_level(ctx, j, false).frakE; }

template <class R>
R energy_cal(const SliceContext<R>& ctx, int j) { return energy_level(ctx, j, true).calE; }

// 𝔈₀ = ∫(i∂(Z−α) conj(Z−α) + |Z_t|²) − (1/8π)∬|ΔZ_t|⁴/(α−β)²
template <class R>
R frakE0_explicit(const WaveState<R>& s, const FilterRule& rule = {}) {
    const R pi = std::numbers::pi_v<R>;
    auto zb = conj(s.zt);
    std::optional<SpectralField<R>> none;
    auto quad = i_dpair(s.zeta, s.zeta) + integral(abs_squared(s.zt));
    auto quart = quartic_4diff(none, s.zt, zb, s.zt, zb, rule);
    return quad.real() - quart.real() / (8 * pi);
}

template <class R>
struct RateValue {
    R value = 0;
    R imag = 0;
};

// right side of the j = 0 energy identity
template <class R>
RateValue<R> frakE0_rhs(const WaveState<R>& s, const FilterRule& rule = {}) {
    using C = std::complex<R>;
    const R pi = std::numbers::pi_v<R>;
    auto aux = compute_aux(s, rule);
    auto zb = conj(s.zt);
    auto one_minus = C(1) - aux.A1;
    auto f1 = C(0, 1) * (one_minus * conj(aux.inv_Za));
    auto f2 = C(0, -1) * (one_minus * aux.inv_Za);
    auto cub = cubic_form(zb, f1, zb, rule) + cubic_form(f2, s.zt, zb, rule);
    C t1 = C(R(0.5)) * C(0, 1) * integral(s.zt * cub);
    KernelSpec<R> ks;
    ks.weight = KernelWeight::Kind::b_symmetric;
    ks.weight_field = aux.b;
    ks.diff_factors = {s.zt, zb, s.zt, zb};
    C t2 = oracle_quadrature(ks) / (8 * pi);
    C tot = t1 - t2;
    return {tot.real(), tot.imag()};
}

template <class R>
struct EnergyReport {
    double t = 0;
    std::vector<EnergyLevel<R>> levels;
    R L = 0;
    R E1E3 = std::numeric_limits<R>::quiet_NaN();
    R frakE0_rate = 0;  // right side of the j = 0 identity
    Residuals<R> res;
};

struct ReportOptions {
    int max_j = 2;
    int jet_order = 4;
    bool quintic = true;
    bool e0_rate = true;
};

template <class R>
EnergyReport<R> energy_report(const WaveState<R>& s, const ReportOptions& opt, const FilterRule& rule = {}) {
    EnergyReport<R> rep;
    rep.t = s.t;
    rep.res = residuals(s, rule);
    rep.L = rep.res.L;
    SliceContext<R> ctx(s, opt.jet_order, rule);
    for (int j = 0; j <= opt.max_j; ++j) rep.levels.push_back(energy_level(ctx, j, opt.quintic));
    if (ctx.max_theta() >= 5) rep.E1E3 = energy_quadratic(ctx, 1, false).value * energy_quadratic(ctx, 3, false).value;
    if (opt.e0_rate) rep.frakE0_rate = frakE0_rhs(s, rule).value;
    return rep;
}

}  // namespace wwave
