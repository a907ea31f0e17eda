#pragma once

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace wwave {

class WaveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Grid {
    std::size_t N = 256;
    long double L = 2.0L * std::numbers::pi_v<long double>;

    Grid() = default;
    Grid(std::size_t n, long double period) : N(n), L(period) {
        if (N < 16 || (N & (N - 1)) != 0)
            throw WaveError("grid size must be a power of two >= 16");
        if (!(L > 0))
            throw WaveError("period must be positive");
    }

    // signed mode index of FFT slot i, in [-N/2, N/2)
    long mode(std::size_t i) const {
        return i < N / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(N);
    }
    template <class Real>
    Real wavenumber(std::size_t i) const {
        return Real(2) * std::numbers::pi_v<Real> * Real(mode(i)) / Real(L);
    }
    template <class Real>
    Real point(std::size_t m) const {
        return Real(L) * Real(m) / Real(N);
    }
    template <class Real>
    Real spacing() const { return Real(L) / Real(N); }

    bool operator==(const Grid& o) const { return N == o.N && L == o.L; }
};

namespace detail {

template <class Real>
struct FftBackend;

template <>
struct FftBackend<double> {
    using plan_t = fftw_plan;
    using cplx_t = fftw_complex;
    static plan_t make(int n, int sign) {
        std::vector<std::complex<double>> a(n), b(n);
        return fftw_plan_dft_1d(n, reinterpret_cast<cplx_t*>(a.data()), reinterpret_cast<cplx_t*>(b.data()),
                                sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    static void run(plan_t p, const std::complex<double>* in, std::complex<double>* out) {
        fftw_execute_dft(p, reinterpret_cast<cplx_t*>(const_cast<std::complex<double>*>(in)),
                         reinterpret_cast<cplx_t*>(out));
    }
};

template <>
struct FftBackend<long double> {
    using plan_t = fftwl_plan;
    using cplx_t = fftwl_complex;
    static plan_t make(int n, int sign) {
        std::vector<std::complex<long double>> a(n), b(n);
        return fftwl_plan_dft_1d(n, reinterpret_cast<cplx_t*>(a.data()), reinterpret_cast<cplx_t*>(b.data()),
                                 sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    static void run(plan_t p, const std::complex<long double>* in, std::complex<long double>* out) {
        fftwl_execute_dft(p, reinterpret_cast<cplx_t*>(const_cast<std::complex<long double>*>(in)),
                          reinterpret_cast<cplx_t*>(out));
    }
};

// Plans are created once per (size, direction) and reused; planning is not thread safe in FFTW.
template <class Real>
class PlanCache {
public:
    using plan_t = typename FftBackend<Real>::plan_t;

    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }
    plan_t get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        plan_t p = FftBackend<Real>::make(static_cast<int>(n), sign);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, plan_t> plans_;
};

}  // namespace detail

template <class Real>
std::vector<std::complex<Real>> forward_fft(const std::vector<std::complex<Real>>& v) {
    std::vector<std::complex<Real>> out(v.size());
    auto plan = detail::PlanCache<Real>::instance().get(v.size(), FFTW_FORWARD);
    detail::FftBackend<Real>::run(plan, v.data(), out.data());
    const Real scale = Real(1) / Real(v.size());
    for (auto& c : out) c *= scale;
    return out;
}

template <class Real>
std::vector<std::complex<Real>> inverse_fft(const std::vector<std::complex<Real>>& c) {
    std::vector<std::complex<Real>> out(c.size());
    auto plan = detail::PlanCache<Real>::instance().get(c.size(), FFTW_BACKWARD);
    detail::FftBackend<Real>::run(plan, c.data(), out.data());
    return out;
}

// Periodic grid function. Samples are the stored representation; Fourier
// coefficients (normalized by 1/N, FFT slot order) are produced on demand.
template <class Real>
class SpectralField {
public:
    using real_type = Real;
    using cplx = std::complex<Real>;

    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid_(g), values_(g.N, cplx(0)) {}
    SpectralField(const Grid& g, std::vector<cplx> values) : grid_(g), values_(std::move(values)) {
        if (values_.size() != grid_.N) throw WaveError("sample count does not match grid");
    }

    static SpectralField constant(const Grid& g, cplx c) {
        return SpectralField(g, std::vector<cplx>(g.N, c));
    }
    static SpectralField from_function(const Grid& g, const std::function<cplx(Real)>& fn) {
        std::vector<cplx> v(g.N);
        for (std::size_t m = 0; m < g.N; ++m) v[m] = fn(g.point<Real>(m));
        return SpectralField(g, std::move(v));
    }
    static SpectralField from_coeffs(const Grid& g, const std::vector<cplx>& c) {
        if (c.size() != g.N) throw WaveError("coefficient count does not match grid");
        return SpectralField(g, inverse_fft<Real>(c));
    }
    // e^{i n (2π/L) α}
    static SpectralField mode(const Grid& g, long n, cplx amp = cplx(1)) {
        std::vector<cplx> c(g.N, cplx(0));
        c[static_cast<std::size_t>((n % long(g.N) + long(g.N)) % long(g.N))] = amp;
        return from_coeffs(g, c);
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<cplx>& values() const { return values_; }
    std::vector<cplx>& values() { return values_; }
    const cplx& operator[](std::size_t m) const { return values_[m]; }
    cplx& operator[](std::size_t m) { return values_[m]; }
    std::vector<cplx> coeffs() const { return forward_fft<Real>(values_); }

    bool is_finite() const {
        return std::all_of(values_.begin(), values_.end(),
                           [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    SpectralField& operator+=(const SpectralField& o) { check(o); for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i]; return *this; }
    SpectralField& operator-=(const SpectralField& o) { check(o); for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i]; return *this; }
    SpectralField& operator*=(const SpectralField& o) { check(o); for (std::size_t i = 0; i < size(); ++i) values_[i] *= o.values_[i]; return *this; }
    SpectralField& operator/=(const SpectralField& o) { check(o); for (std::size_t i = 0; i < size(); ++i) values_[i] /= o.values_[i]; return *this; }
    SpectralField& operator*=(cplx s) { for (auto& v : values_) v *= s; return *this; }
    SpectralField& operator+=(cplx s) { for (auto& v : values_) v += s; return *this; }

    void check(const SpectralField& o) const {
        if (!(grid_ == o.grid_)) throw WaveError("grid mismatch");
    }

private:
    Grid grid_;
    std::vector<cplx> values_;
};

template <class R> SpectralField<R> operator+(SpectralField<R> a, const SpectralField<R>& b) { return a += b; }
template <class R> SpectralField<R> operator-(SpectralField<R> a, const SpectralField<R>& b) { return a -= b; }
template <class R> SpectralField<R> operator*(SpectralField<R> a, const SpectralField<R>& b) { return a *= b; }
template <class R> SpectralField<R> operator/(SpectralField<R> a, const SpectralField<R>& b) { return a /= b; }
template <class R> SpectralField<R> operator*(SpectralField<R> a, std::complex<R> s) { return a *= s; }
template <class R> SpectralField<R> operator*(std::complex<R> s, SpectralField<R> a) { return a *= s; }
template <class R> SpectralField<R> operator*(SpectralField<R> a, R s) { return a *= std::complex<R>(s); }
template <class R> SpectralField<R> operator*(R s, SpectralField<R> a) { return a *= std::complex<R>(s); }
template <class R> SpectralField<R> operator+(SpectralField<R> a, std::complex<R> s) { return a += s; }
template <class R> SpectralField<R> operator+(std::complex<R> s, SpectralField<R> a) { return a += s; }
template <class R> SpectralField<R> operator-(SpectralField<R> a) { return a *= std::complex<R>(-1); }
template <class R> SpectralField<R> operator-(SpectralField<R> a, std::complex<R> s) { return a += -s; }
template <class R> SpectralField<R> operator-(std::complex<R> s, SpectralField<R> a) { return (a *= std::complex<R>(-1)) += s; }

template <class R, class Fn>
SpectralField<R> pointwise(const SpectralField<R>& f, Fn fn) {
    auto out = f;
    for (auto& v : out.values()) v = fn(v);
    return out;
}

template <class R> SpectralField<R> conj(const SpectralField<R>& f) { return pointwise(f, [](auto z) { return std::conj(z); }); }
template <class R> SpectralField<R> real_part(const SpectralField<R>& f) { return pointwise(f, [](auto z) { return decltype(z)(z.real()); }); }
template <class R> SpectralField<R> imag_part(const SpectralField<R>& f) { return pointwise(f, [](auto z) { return decltype(z)(z.imag()); }); }
template <class R> SpectralField<R> reciprocal(const SpectralField<R>& f) { return pointwise(f, [](auto z) { return decltype(z)(1) / z; }); }
template <class R> SpectralField<R> abs_squared(const SpectralField<R>& f) { return pointwise(f, [](auto z) { return decltype(z)(std::norm(z)); }); }

template <class R>
std::complex<R> mean(const SpectralField<R>& f) {
    std::complex<R> s(0);
    for (const auto& v : f.values()) s += v;
    return s / R(f.size());
}

// ∫_0^L f dα (trapezoid, exact for band-limited data)
template <class R>
std::complex<R> integral(const SpectralField<R>& f) {
    return mean(f) * R(f.grid().L);
}

template <class R>
R max_abs(const SpectralField<R>& f) {
    R m = 0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

template <class R>
R max_imag(const SpectralField<R>& f) {
    R m = 0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v.imag()));
    return m;
}

template <class R, class Mult>
SpectralField<R> apply_multiplier(const SpectralField<R>& f, Mult mult) {
    auto c = f.coeffs();
    const Grid& g = f.grid();
    for (std::size_t i = 0; i < g.N; ++i) c[i] *= mult(i);
    return SpectralField<R>::from_coeffs(g, c);
}

enum class Side { holo, anti };

namespace mutation {
// Sign applied to ℍ; only mutation tests touch it.
inline std::atomic<int>& hilbert_sign() {
    static std::atomic<int> s{1};
    return s;
}
}  // namespace mutation

// ℍ for the lower half plane: multiplier −sgn(k), zero at k = 0.
template <class R>
SpectralField<R> hilbert(const SpectralField<R>& f) {
    const Grid& g = f.grid();
    const R sgn = R(mutation::hilbert_sign().load());
    return apply_multiplier(f, [&](std::size_t i) {
        long n = g.mode(i);
        return std::complex<R>(n > 0 ? -sgn : (n < 0 ? sgn : R(0)));
    });
}

template <class R>
SpectralField<R> project(const SpectralField<R>& f, Side side) {
    const Grid& g = f.grid();
    return apply_multiplier(f, [&](std::size_t i) {
        long n = g.mode(i);
        bool keep = side == Side::holo ? n <= 0 : n > 0;
        return std::complex<R>(keep ? R(1) : R(0));
    });
}

template <class R>
SpectralField<R> derivative(const SpectralField<R>& f) {
    const Grid& g = f.grid();
    return apply_multiplier(f, [&](std::size_t i) { return std::complex<R>(0, g.wavenumber<R>(i)); });
}

template <class R>
SpectralField<R> derivative(const SpectralField<R>& f, int order) {
    const Grid& g = f.grid();
    return apply_multiplier(f, [&](std::size_t i) { return std::pow(std::complex<R>(0, g.wavenumber<R>(i)), order); });
}

// 1/(ik) with the zero mode of the output set to 0; the input mean is ignored.
template <class R>
SpectralField<R> antiderivative_unchecked(const SpectralField<R>& f) {
    const Grid& g = f.grid();
    return apply_multiplier(f, [&](std::size_t i) {
        if (g.mode(i) == 0) return std::complex<R>(0);
        return std::complex<R>(1) / std::complex<R>(0, g.wavenumber<R>(i));
    });
}

template <class R>
SpectralField<R> antiderivative(const SpectralField<R>& f, R mean_tol = R(1e-10)) {
    R scale = std::max(R(1), max_abs(f));
    if (std::abs(mean(f)) > mean_tol * scale) throw WaveError("nonzero mean");
    return antiderivative_unchecked(f);
}

enum class NormKind { L2, Linf, Hhalf, Hs };

// Homogeneous norms in the normalization ‖f‖²_{Ḣ^s} = L Σ |k|^{2s} |f̂_k|²; for s = 1/2 this is
// ∫ iℍ∂f f̄ = (1/2π)∬|Δf|²/(α−β)² with the periodic kernel.
template <class R>
R norm(const SpectralField<R>& f, NormKind kind, R s = R(0.5)) {
    const Grid& g = f.grid();
    if (kind == NormKind::Linf) return max_abs(f);
    if (kind == NormKind::Hs && (s < 0 || s > 4)) throw WaveError("Sobolev index out of range");
    if (kind == NormKind::Hhalf) s = R(0.5);
    auto c = f.coeffs();
    R acc = 0;
    for (std::size_t i = 0; i < g.N; ++i) {
        R w = 1;
        if (kind != NormKind::L2) {
            R k = std::abs(g.wavenumber<R>(i));
            w = (k == 0) ? R(0) : std::pow(k, 2 * s);
        }
        acc += w * std::norm(c[i]);
    }
    return std::sqrt(acc * R(g.L));
}

struct FilterRule {
    enum class Kind { none, krasny, smooth36 } kind = Kind::none;
    double threshold = 1e-13;

    static FilterRule none() { return {}; }
    static FilterRule krasny(double t) { return {Kind::krasny, t}; }
    static FilterRule smooth36() { return {Kind::smooth36, 0.0}; }
    bool active() const { return kind != Kind::none; }
    std::string name() const {
        switch (kind) {
            case Kind::krasny: return "krasny";
            case Kind::smooth36: return "smooth36";
            default: return "none";
        }
    }
};

template <class R>
SpectralField<R> spectral_filter(const SpectralField<R>& f, const FilterRule& rule) {
    if (!rule.active()) return f;
    const Grid& g = f.grid();
    auto c = f.coeffs();
    const R kmax = R(g.N / 2);
    for (std::size_t i = 0; i < g.N; ++i) {
        if (rule.kind == FilterRule::Kind::krasny) {
            if (std::abs(c[i]) < R(rule.threshold)) c[i] = 0;
        } else {
            R r = std::abs(R(g.mode(i))) / kmax;
            c[i] *= std::exp(-R(36) * std::pow(r, 36));
        }
    }
    return SpectralField<R>::from_coeffs(g, c);
}

// relative L2 distance, guarded against a vanishing reference
template <class R>
R rel_error(const SpectralField<R>& a, const SpectralField<R>& ref, R floor = R(1e-300)) {
    R num = norm(a - ref, NormKind::L2);
    R den = norm(ref, NormKind::L2);
    return num / std::max(den, floor);
}

template <class R>
SpectralField<R> remove_mean(const SpectralField<R>& f) {
    return f + (-mean(f));
}

}  // namespace wwave
