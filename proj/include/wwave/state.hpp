#pragma once

#include "calculus_ops.hpp"

namespace wwave {

class BlowUpError : public WaveError {
public:
    BlowUpError(const std::string& what, double t) : WaveError(what), time(t) {}
    double time;
};

template <class R>
struct WaveState {
    double t = 0;
    SpectralField<R> zeta;  // Z − α
    SpectralField<R> zt;    // Z_t

    const Grid& grid() const { return zeta.grid(); }

    static WaveState rest(const Grid& g) { return {0, SpectralField<R>(g), SpectralField<R>(g)}; }
};

template <class R>
struct AuxFields {
    SpectralField<R> A1;
    SpectralField<R> b;
    SpectralField<R> Ztt;
    SpectralField<R> Za;      // Z_{,α}
    SpectralField<R> inv_Za;  // 1/Z_{,α}
    R a1_imag = 0;            // max |Im| of A₁ built as 1 + (i/2)[Z_t, Z̄_t; 1]
    R a1_mismatch = 0;        // max |A₁ − Re of that construction|
};

inline constexpr double chord_arc_floor = 1e-8;

template <class R>
SpectralField<R> z_alpha(const WaveState<R>& s) {
    return derivative(s.zeta) + std::complex<R>(1);
}

template <class R>
void check_chord_arc(const SpectralField<R>& Za) {
    R m = std::numeric_limits<R>::max();
    for (const auto& v : Za.values()) m = std::min(m, std::abs(v));
    if (!(m > R(chord_arc_floor))) throw WaveError("chord-arc failure");
}

// A₁ = 1 − Im[Z_t,ℍ]Z̄_{t,α}, b = Re(I − ℍ)(Z_t/Z_{,α}), Z_tt = −i + iA₁/Z̄_{,α}
template <class R>
AuxFields<R> compute_aux(const WaveState<R>& s, const FilterRule& rule = {}) {
    using C = std::complex<R>;
    AuxFields<R> a;
    a.Za = z_alpha(s);
    check_chord_arc(a.Za);
    a.inv_Za = reciprocal(a.Za);
    auto ztb = conj(s.zt);
    a.A1 = C(1) - imag_part(commutator_hilbert(s.zt, ztb, true, rule));
    auto alt = C(1) + C(0, R(0.5)) * bracket(s.zt, ztb, rule);
    for (std::size_t i = 0; i < alt.size(); ++i) {
        a.a1_imag = std::max(a.a1_imag, std::abs(alt[i].imag()));
        a.a1_mismatch = std::max(a.a1_mismatch, std::abs(alt[i].real() - a.A1[i].real()));
    }
    auto u = filtered_product(s.zt, a.inv_Za, rule);
    a.b = real_part(u - hilbert(u));
    a.Ztt = C(0, 1) * (a.A1 * conj(a.inv_Za)) + C(0, -1);
    return a;
}

// Periodic L(t): ‖1/Z_{,α} − mean‖_{Ḣ½} + ‖Z̄_{t,α}‖_{L²} + ‖∂(1/Z_{,α})‖_{Ḣ½} + ‖∂²Z̄_t‖_{L²}
template <class R>
R norm_L(const WaveState<R>& s) {
    auto inv = reciprocal(z_alpha(s));
    auto ztb = conj(s.zt);
    return norm(remove_mean(inv), NormKind::Hhalf) + norm(derivative(ztb), NormKind::L2) +
           norm(derivative(inv), NormKind::Hhalf) + norm(derivative(ztb, 2), NormKind::L2);
}

template <class R>
struct Residuals {
    R holo_zt = 0;       // ‖P_A Z̄_t‖_{L²}
    R holo_inv_za = 0;   // ‖P_A(1/Z_{,α} − 1)‖_{L²}
    R min_A1 = 1;
    R min_abs_Za = 1;
    R steepness = 0;     // ‖1 − 1/Z_{,α}‖_{L∞}
    R L = 0;
    R b_mean = 0;        // zero mode of b (logged, not asserted)
    R a1_imag = 0;

    R holomorphy() const { return std::max(holo_zt, holo_inv_za); }
};

template <class R>
Residuals<R> residuals(const WaveState<R>& s, const FilterRule& rule = {}) {
    Residuals<R> r;
    auto Za = z_alpha(s);
    r.min_abs_Za = std::numeric_limits<R>::max();
    for (const auto& v : Za.values()) r.min_abs_Za = std::min(r.min_abs_Za, std::abs(v));
    auto inv = reciprocal(Za);
    r.holo_zt = norm(project(conj(s.zt), Side::anti), NormKind::L2);
    r.holo_inv_za = norm(project(inv, Side::anti), NormKind::L2);
    r.steepness = max_abs(std::complex<R>(1) - inv);
    r.L = norm_L(s);
    auto aux = compute_aux(s, rule);
    r.min_A1 = std::numeric_limits<R>::max();
    for (const auto& v : aux.A1.values()) r.min_A1 = std::min(r.min_A1, v.real());
    r.b_mean = mean(aux.b).real();
    r.a1_imag = aux.a1_imag;
    return r;
}

}  // namespace wwave
