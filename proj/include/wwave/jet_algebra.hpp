#pragma once

#include "state.hpp"

namespace wwave {

// A field together with its material derivatives: component k holds D_t^k f.
template <class R>
class MaterialJet {
public:
    using Field = SpectralField<R>;

    MaterialJet() = default;
    explicit MaterialJet(std::vector<Field> comps) : c_(std::move(comps)) {
        if (c_.empty()) throw WaveError("empty jet");
        for (const auto& f : c_) c_.front().check(f);
    }
    static MaterialJet constant(const Grid& g, std::complex<R> v, int order) {
        std::vector<Field> c(order + 1, Field(g));
        c[0] = Field::constant(g, v);
        return MaterialJet(std::move(c));
    }
    static MaterialJet zero(const Grid& g, int order) { return constant(g, 0, order); }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    const Grid& grid() const { return c_.front().grid(); }
    const Field& operator[](int k) const { return c_.at(k); }
    Field& operator[](int k) { return c_.at(k); }
    const std::vector<Field>& components() const { return c_; }
    void push_back(Field f) { c_.push_back(std::move(f)); }

    MaterialJet truncate(int n) const {
        if (n > order()) throw WaveError("insufficient jet order");
        return MaterialJet(std::vector<Field>(c_.begin(), c_.begin() + n + 1));
    }
    // jet of D_t f, one order lower
    MaterialJet shift() const {
        if (order() < 1) throw WaveError("insufficient jet order");
        return MaterialJet(std::vector<Field>(c_.begin() + 1, c_.end()));
    }

private:
    std::vector<Field> c_;
};

namespace detail {

inline double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

template <class R>
void check_orders(const MaterialJet<R>& a, const MaterialJet<R>& b) {
    if (a.order() != b.order()) throw WaveError("jet order mismatch");
    a[0].check(b[0]);
}

}  // namespace detail

template <class R, class Fn>
MaterialJet<R> jet_map(const MaterialJet<R>& a, Fn fn) {
    std::vector<SpectralField<R>> c;
    for (const auto& f : a.components()) c.push_back(fn(f));
    return MaterialJet<R>(std::move(c));
}

template <class R>
MaterialJet<R> operator+(const MaterialJet<R>& a, const MaterialJet<R>& b) {
    detail::check_orders(a, b);
    std::vector<SpectralField<R>> c;
    for (int k = 0; k <= a.order(); ++k) c.push_back(a[k] + b[k]);
    return MaterialJet<R>(std::move(c));
}
template <class R>
MaterialJet<R> operator-(const MaterialJet<R>& a, const MaterialJet<R>& b) {
    detail::check_orders(a, b);
    std::vector<SpectralField<R>> c;
    for (int k = 0; k <= a.order(); ++k) c.push_back(a[k] - b[k]);
    return MaterialJet<R>(std::move(c));
}
template <class R>
MaterialJet<R> operator*(std::complex<R> s, const MaterialJet<R>& a) {
    return jet_map(a, [&](const SpectralField<R>& f) { return f * s; });
}
// adds a constant to component 0 only (D_t of a constant vanishes)
template <class R>
MaterialJet<R> operator+(const MaterialJet<R>& a, std::complex<R> s) {
    auto out = a;
    out[0] = out[0] + s;
    return out;
}
template <class R> MaterialJet<R> conj(const MaterialJet<R>& a) { return jet_map(a, [](const auto& f) { return conj(f); }); }
template <class R> MaterialJet<R> real_part(const MaterialJet<R>& a) { return jet_map(a, [](const auto& f) { return real_part(f); }); }
template <class R> MaterialJet<R> imag_part(const MaterialJet<R>& a) { return jet_map(a, [](const auto& f) { return imag_part(f); }); }

// Leibniz: D_t^k(ab) = Σ C(k,i) D_t^i a D_t^{k−i} b
template <class R>
MaterialJet<R> jet_product(const MaterialJet<R>& a, const MaterialJet<R>& b, const FilterRule& rule = {}) {
    detail::check_orders(a, b);
    std::vector<SpectralField<R>> c;
    for (int k = 0; k <= a.order(); ++k) {
        SpectralField<R> s(a.grid());
        for (int i = 0; i <= k; ++i) s += (a[i] * b[k - i]) * R(detail::binom(k, i));
        c.push_back(spectral_filter(s, rule));
    }
    return MaterialJet<R>(std::move(c));
}

// 1/f from f·(1/f) = 1
template <class R>
MaterialJet<R> jet_reciprocal(const MaterialJet<R>& a, const FilterRule& rule = {}) {
    auto inv = reciprocal(a[0]);
    std::vector<SpectralField<R>> r{inv};
    for (int k = 1; k <= a.order(); ++k) {
        SpectralField<R> s(a.grid());
        for (int i = 1; i <= k; ++i) s += (a[i] * r[k - i]) * R(detail::binom(k, i));
        r.push_back(spectral_filter(-(inv * s), rule));
    }
    return MaterialJet<R>(std::move(r));
}

// Jets of the advection velocity b and of b_α, shared by the derivative and multiplier rules.
template <class R>
struct FlowJets {
    MaterialJet<R> b;
    MaterialJet<R> b_alpha;
    FilterRule rule;

    int order() const { return b.order(); }
};

namespace detail {

// g[m][k] = D_t^k ∂ D_t^m f; g[m][k+1] = g[m+1][k] − Σ C(k,i) D_t^i b_α g[m][k−i].
// With balpha == nullptr the input is b itself and b_α's components are read off the table.
template <class R>
MaterialJet<R> derivative_table(const MaterialJet<R>& a, const MaterialJet<R>* balpha, const FilterRule& rule) {
    const int n = a.order();
    if (balpha && balpha->order() < n - 1) throw WaveError("insufficient b jet order");
    std::vector<std::vector<SpectralField<R>>> g(n + 1);
    for (int m = 0; m <= n; ++m) g[m].push_back(derivative(a[m]));
    for (int k = 0; k < n; ++k) {
        for (int m = 0; m + k + 1 <= n; ++m) {
            SpectralField<R> s = g[m + 1][k];
            for (int i = 0; i <= k; ++i) {
                const SpectralField<R>& bi = balpha ? (*balpha)[i] : g[0][i];
                s -= spectral_filter(bi * g[m][k - i], rule) * R(binom(k, i));
            }
            g[m].push_back(s);
        }
    }
    return MaterialJet<R>(g[0]);
}

}  // namespace detail

template <class R>
FlowJets<R> make_flow(const MaterialJet<R>& bjet, const FilterRule& rule = {}) {
    return {bjet, detail::derivative_table<R>(bjet, nullptr, rule), rule};
}

// jet of ∂_α f using [D_t, ∂] = −b_α ∂
template <class R>
MaterialJet<R> jet_derivative(const MaterialJet<R>& a, const FlowJets<R>& flow) {
    if (a.order() == 0) return MaterialJet<R>({derivative(a[0])});
    if (flow.order() < a.order() - 1) throw WaveError("insufficient b jet order");
    auto ba = flow.b_alpha.truncate(a.order() - 1);
    return detail::derivative_table<R>(a, &ba, flow.rule);
}

enum class JetMultiplier { hilbert, holo, anti, antiderivative };

template <class R>
SpectralField<R> apply(JetMultiplier T, const SpectralField<R>& f) {
    switch (T) {
        case JetMultiplier::hilbert: return hilbert(f);
        case JetMultiplier::holo: return project(f, Side::holo);
        case JetMultiplier::anti: return project(f, Side::anti);
        default: return antiderivative_unchecked(f);
    }
}

// Any Fourier multiplier T commutes with ∂_t, so [D_t, T]u = [b, T]∂u, which gives
// D_t^{k+1} T u = D_t^k T D_t u + D_t^k(b T∂u) − D_t^k T(b∂u).
template <class R>
MaterialJet<R> jet_multiplier(JetMultiplier T, const MaterialJet<R>& u, const FlowJets<R>& flow) {
    const int n = u.order();
    std::vector<SpectralField<R>> out{apply(T, u[0])};
    if (n == 0) return MaterialJet<R>(std::move(out));
    if (flow.order() < n - 1) throw WaveError("insufficient b jet order");
    auto b = flow.b.truncate(n - 1);
    auto A = jet_multiplier(T, u.shift(), flow);
    auto du = jet_derivative(u, flow).truncate(n - 1);
    auto B = jet_product(b, jet_multiplier(T, du, flow), flow.rule);
    auto C = jet_multiplier(T, jet_product(b, du, flow.rule), flow);
    for (int k = 0; k < n; ++k) out.push_back(A[k] + B[k] - C[k]);
    return MaterialJet<R>(std::move(out));
}

enum class HilbertSide { H, holo, anti };

template <class R>
MaterialJet<R> jet_hilbert(const MaterialJet<R>& a, const FlowJets<R>& flow, HilbertSide side = HilbertSide::H) {
    JetMultiplier T = side == HilbertSide::H ? JetMultiplier::hilbert
                      : side == HilbertSide::holo ? JetMultiplier::holo
                                                  : JetMultiplier::anti;
    return jet_multiplier(T, a, flow);
}

template <class R>
MaterialJet<R> jet_project(const MaterialJet<R>& a, const FlowJets<R>& flow, Side side) {
    return jet_hilbert(a, flow, side == Side::holo ? HilbertSide::holo : HilbertSide::anti);
}

// [f,ℍ]∂g
template <class R>
MaterialJet<R> jet_commutator(const MaterialJet<R>& f, const MaterialJet<R>& g, const FlowJets<R>& flow) {
    auto dg = jet_derivative(g, flow);
    return jet_product(f, jet_hilbert(dg, flow), flow.rule) - jet_hilbert(jet_product(f, dg, flow.rule), flow);
}

template <class R>
MaterialJet<R> jet_bracket(const MaterialJet<R>& f, const MaterialJet<R>& g, const MaterialJet<R>& h,
                           const FlowJets<R>& flow) {
    const auto& r = flow.rule;
    return jet_commutator(f, jet_product(g, h, r), flow) + jet_commutator(g, jet_product(f, h, r), flow) -
           jet_commutator(jet_product(f, g, r), h, flow);
}

template <class R>
MaterialJet<R> jet_bracket(const MaterialJet<R>& f, const MaterialJet<R>& g, const FlowJets<R>& flow) {
    return jet_commutator(f, g, flow) + jet_commutator(g, f, flow);
}

template <class R>
MaterialJet<R> jet_cubic_form(const MaterialJet<R>& f, const MaterialJet<R>& g, const MaterialJet<R>& h,
                              const FlowJets<R>& flow) {
    return jet_product(h, jet_bracket(f, g, flow), flow.rule) - jet_bracket(f, g, h, flow);
}

template <class R>
struct BaseJets {
    int order = 0;
    MaterialJet<R> zeta;   // Z − α
    MaterialJet<R> zt;     // Z_t, one order higher than the rest
    MaterialJet<R> Za;     // Z_{,α}
    MaterialJet<R> inv_Za; // 1/Z_{,α}
    MaterialJet<R> b;
    MaterialJet<R> A1;
    FlowJets<R> flow;

    MaterialJet<R> Zt() const { return zt.truncate(order); }
    MaterialJet<R> Ztbar() const { return conj(Zt()); }
};

// Induction on the order k: Z_t to order k, then A₁ and b to order k, then Z_t to order k + 1
// through Z_tt = −i + iA₁/Z̄_{,α}; D_t(Z − α) = Z_t − b.
template <class R>
BaseJets<R> build_base_jets(const WaveState<R>& s, int J, const FilterRule& rule = {}) {
    using C = std::complex<R>;
    if (J < 0 || J > 8) throw WaveError("jet order out of range");
    const Grid& g = s.grid();
    std::vector<SpectralField<R>> zt_c{s.zt};
    BaseJets<R> out;
    MaterialJet<R> b_prev;
    for (int k = 0; k <= J; ++k) {
        FlowJets<R> flow = k == 0 ? FlowJets<R>{MaterialJet<R>::zero(g, 0), MaterialJet<R>::zero(g, 0), rule}
                                  : make_flow(b_prev, rule);
        MaterialJet<R> Zt(zt_c);
        std::vector<SpectralField<R>> zc{s.zeta};
        for (int m = 1; m <= k; ++m) zc.push_back(Zt[m - 1] - b_prev[m - 1]);
        MaterialJet<R> zeta(zc);
        auto Za = jet_derivative(zeta, flow) + C(1);
        check_chord_arc(Za[0]);
        auto inv = jet_reciprocal(Za, rule);
        auto A1 = MaterialJet<R>::constant(g, 1, k) - imag_part(jet_commutator(Zt, conj(Zt), flow));
        auto u = jet_product(Zt, inv, rule);
        auto b = real_part(u - jet_hilbert(u, flow));
        auto ztt = jet_product(A1, conj(inv), rule);
        zt_c.push_back(ztt[k] * C(0, 1) + (k == 0 ? SpectralField<R>::constant(g, C(0, -1)) : SpectralField<R>(g)));
        b_prev = b;
        if (k == J) {
            out.order = J;
            out.zeta = zeta;
            out.Za = Za;
            out.inv_Za = inv;
            out.b = b;
            out.A1 = A1;
            out.flow = make_flow(b, rule);
        }
    }
    out.zt = MaterialJet<R>(zt_c);
    return out;
}

}  // namespace wwave
