#include <gtest/gtest.h>

#include <array>
#include <random>

#include <wwave/calculus_ops.hpp>

using namespace wwave;
using F = SpectralField<double>;
using C = std::complex<double>;

namespace {

const double twopi = 2 * std::numbers::pi;

F band(const Grid& g, std::mt19937_64& rng, long lo, long hi) {
    std::normal_distribution<double> nd;
    std::vector<C> c(g.N, 0);
    for (long n = lo; n <= hi; ++n) c[(n + long(g.N)) % long(g.N)] = C(nd(rng), nd(rng)) * std::exp(-std::abs(n) / 5.0);
    return F::from_coeffs(g, c);
}

double rel(const F& a, const F& b) { return norm(a - b, NormKind::L2) / norm(b, NormKind::L2); }
double rel(C a, C b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Bracket, ClosedFormForConjugateModes) {
    // (e^{−iα} − e^{−iβ})(e^{iα} − e^{iβ}) = 4 sin²((α−β)/2) cancels the kernel: [·,·;1] = 2π/(πi) = −2i
    Grid g(64, twopi);
    auto b = bracket(F::mode(g, -1), F::mode(g, 1));
    EXPECT_LT(max_abs(b - F::constant(g, C(0, -2))), 1e-13);
    auto bo = oracle::bracket(F::mode(g, -1), F::mode(g, 1), F::constant(g, C(1)));
    EXPECT_LT(max_abs(bo - F::constant(g, C(0, -2))), 1e-12);
}

TEST(Bracket, CommutatorFormMatchesDoubleIntegral) {
    Grid g(128, twopi);
    std::mt19937_64 rng(10);
    for (int r = 0; r < 5; ++r) {
        auto f = band(g, rng, -20, 20), h = band(g, rng, -20, 20), k = band(g, rng, -20, 20);
        EXPECT_LT(rel(bracket(f, h, k), oracle::bracket(f, h, k)), 1e-10);
    }
}

TEST(Hilbert, OracleAgreesWithMultiplier) {
    Grid g(128, twopi);
    std::mt19937_64 rng(11);
    auto f = band(g, rng, -20, 20);
    EXPECT_LT(rel(oracle::hilbert(f), hilbert(f)), 1e-10);
    auto h = band(g, rng, -20, 20);
    EXPECT_LT(rel(oracle::commutator_hilbert(f, h), commutator_hilbert(f, h, false)), 1e-10);
}

TEST(CubicForm, OracleAndPermutations) {
    Grid g(128, twopi);
    std::mt19937_64 rng(12);
    std::array<F, 3> a{band(g, rng, -15, 15), band(g, rng, -15, 15), band(g, rng, -15, 15)};
    auto base = cubic_form(a[0], a[1], a[2]);
    EXPECT_LT(rel(base, oracle::cubic_form(a[0], a[1], a[2])), 1e-10);
    std::array<int, 3> p{0, 1, 2};
    int count = 0;
    do {
        EXPECT_LT(rel(cubic_form(a[p[0]], a[p[1]], a[p[2]]), base), 1e-12);
        ++count;
    } while (std::next_permutation(p.begin(), p.end()));
    EXPECT_EQ(count, 6);
}

TEST(CubicForm, HolomorphicProjectionIdentity) {
    Grid g(128, twopi);
    std::mt19937_64 rng(13);
    for (int r = 0; r < 5; ++r) {
        auto f = band(g, rng, -20, 20), h = band(g, rng, -20, 20), k = band(g, rng, -20, 0);
        auto lhs = project(bracket(f, h, k), Side::holo);
        auto rhs = C(-2) * project(f * derivative(project(h * k, Side::anti)), Side::holo) -
                   C(2) * project(h * derivative(project(f * k, Side::anti)), Side::holo);
        EXPECT_LT(rel(lhs, rhs), 1e-10);
    }
}

TEST(Quartic, PairingsMatchOracle) {
    Grid g(128, twopi);
    std::mt19937_64 rng(14);
    for (int r = 0; r < 5; ++r) {
        auto w = band(g, rng, -10, 10), f1 = band(g, rng, -10, 10), f2 = band(g, rng, -10, 10),
             f3 = band(g, rng, -10, 10), f4 = band(g, rng, -10, 10);
        EXPECT_LT(rel(quartic_pairing(w, f1, f2, f3), oracle::quartic_pairing(w, f1, f2, f3)), 1e-9);
        std::optional<F> none, some = w;
        EXPECT_LT(rel(quartic_4diff(none, f1, f2, f3, f4), oracle::quartic_4diff(none, f1, f2, f3, f4)), 1e-9);
        EXPECT_LT(rel(quartic_4diff(some, f1, f2, f3, f4), oracle::quartic_4diff(some, f1, f2, f3, f4)), 1e-9);
    }
}

TEST(Oracle, HhalfDoubleIntegral) {
    Grid g(128, twopi);
    EXPECT_NEAR(oracle::hhalf_squared(F::mode(g, -1, C(0, 1))), twopi, 1e-10);
    std::mt19937_64 rng(15);
    auto f = band(g, rng, -15, 15);
    double a = std::pow(norm(f, NormKind::Hhalf), 2);
    EXPECT_LT(std::abs(oracle::hhalf_squared(f) - a) / a, 1e-10);
}

TEST(Oracle, AntiholomorphicPairingIdentity) {
    Grid g(128, twopi);
    std::mt19937_64 rng(16);
    for (int r = 0; r < 3; ++r) {
        auto f = band(g, rng, -12, 0), h = band(g, rng, -12, 0), f1 = band(g, rng, -12, 0), g1 = band(g, rng, -12, 0);
        C lhs = integral(derivative(project(conj(f) * h, Side::anti)) * f1 * conj(g1));
        KernelSpec<double> ks;
        ks.diff_factors = {conj(f), f1};
        ks.beta_factors = {h};
        ks.point_factors = {conj(g1)};
        C rhs = -oracle_quadrature(ks) / C(0, twopi);
        EXPECT_LT(rel(lhs, rhs), 1e-10);
    }
}

TEST(Oracle, WeightedKernels) {
    Grid g(64, twopi);
    std::mt19937_64 rng(17);
    auto f = band(g, rng, -6, 6), w = band(g, rng, -6, 6);
    KernelSpec<double> a;
    a.diff_factors = {f, conj(f)};
    a.weight = KernelWeight::Kind::alpha_only;
    a.weight_field = w;
    KernelSpec<double> b;
    b.diff_factors = {f, conj(f)};
    b.point_factors = {w};
    EXPECT_LT(rel(oracle_quadrature(a), oracle_quadrature(b)), 1e-13);
    // a constant b makes the symmetric weight vanish
    KernelSpec<double> s;
    s.diff_factors = {f, conj(f), f, conj(f)};
    s.weight = KernelWeight::Kind::b_symmetric;
    s.weight_field = F::constant(g, C(3));
    EXPECT_LT(std::abs(oracle_quadrature(s)), 1e-12);
}

TEST(Oracle, RejectsNonIntegrableKernels) {
    Grid g(32, twopi);
    KernelSpec<double> s;
    s.beta_factors = {F::mode(g, 1)};
    EXPECT_THROW(oracle_rows(s), WaveError);
    s.power = 4;
    EXPECT_THROW(oracle_rows(s), WaveError);
    KernelSpec<double> empty;
    empty.power = 1;
    EXPECT_THROW(oracle_rows(empty), WaveError);
}

TEST(Product, FilteredProductDealiases) {
    Grid g(32, twopi);
    FilterRule k;
    k.kind = FilterRule::Kind::krasny;
    auto p = filtered_product(F::mode(g, 2), F::mode(g, 3), k);
    EXPECT_LT(max_abs(p - F::mode(g, 5)), 1e-14);
}
