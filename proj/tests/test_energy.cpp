#include <gtest/gtest.h>

#include <wwave/energy_diagnostics.hpp>

using namespace wwave;
using F = SpectralField<double>;
using C = std::complex<double>;
using S = WaveState<double>;

namespace {

const double twopi = 2 * std::numbers::pi;

S packet(double eps, std::size_t N = 128) { return make_initial_data<double>(Grid(N, twopi), InitialProfile::packet(3, 1.5), eps); }

double rel(const F& a, const F& b) { return norm(a - b, NormKind::L2) / norm(b, NormKind::L2); }

}  // namespace

TEST(Theta, LowOrderClosedForms) {
    // Θ^(1) = iζ and Θ^(2) = −iP_H b up to constants
    auto s = packet(0.2);
    SliceContext<double> ctx(s, 4);
    EXPECT_LT(rel(remove_mean(ctx.theta(1)), remove_mean(C(0, 1) * s.zeta)), 1e-12);
    EXPECT_LT(rel(remove_mean(ctx.theta(2)), remove_mean(C(0, -1) * project(ctx.base().b[0], Side::holo))), 1e-12);
    EXPECT_EQ(ctx.max_theta(), 4);
    EXPECT_THROW(ctx.theta(5), WaveError);
}

TEST(Theta, GRecursionMatchesDirect) {
    auto s = packet(0.2);
    SliceContext<double> ctx(s, 4);
    EXPECT_LT(norm(remove_mean(ctx.phg_direct(0)), NormKind::L2), 1e-12);
    for (int j = 1; j <= 2; ++j) EXPECT_LT(rel(remove_mean(ctx.phg(j)), remove_mean(ctx.phg_direct(j))), 1e-6) << j;
}

TEST(Theta, ThirdLevelRecursion) {
    // Θ^(j+2) = −iP_H(|Z_α|⁻²∂Θ^(j)) + P_H G^(j)
    auto s = packet(0.2);
    SliceContext<double> ctx(s, 4);
    auto w = abs_squared(ctx.base().inv_Za[0]);
    for (int j = 1; j <= 2; ++j) {
        auto r = C(0, -1) * project(w * derivative(ctx.theta(j)), Side::holo) + ctx.phg(j);
        EXPECT_LT(rel(remove_mean(ctx.theta(j + 2)), remove_mean(r)), 1e-9) << j;
    }
}

TEST(Energy, QuadraticDecompositionAndReality) {
    auto s = packet(0.1);
    SliceContext<double> ctx(s, 4);
    for (int j = 0; j <= 2; ++j) {
        auto q = energy_quadratic(ctx, j);
        EXPECT_LT(std::abs(q.value - q.alt), 1e-10 * std::abs(q.value)) << j;
        EXPECT_LT(std::abs(q.imag), 1e-10 * std::abs(q.value)) << j;
        EXPECT_GT(q.value, 0) << j;
    }
}

TEST(Energy, LowestLevelMatchesExplicitForm) {
    auto s = packet(0.1);
    SliceContext<double> ctx(s, 3);
    auto lv = energy_level(ctx, 0, false);
    EXPECT_NEAR(lv.frakE, frakE0_explicit(s), 1e-12 * std::abs(lv.frakE));
}

TEST(Energy, QuadraticScalingInAmplitude) {
    double e1 = 0, e2 = 0;
    for (double eps : {0.01, 0.02}) {
        SliceContext<double> ctx(packet(eps), 3);
        (eps == 0.01 ? e1 : e2) = energy_quadratic(ctx, 0, false).value;
    }
    EXPECT_NEAR(e2 / e1, 4.0, 0.05);
}

TEST(Energy, RestIsZero) {
    auto rest = S::rest(Grid(64, twopi));
    ReportOptions opt;
    opt.max_j = 1;
    opt.jet_order = 3;
    auto rep = energy_report(rest, opt);
    for (const auto& lv : rep.levels) {
        EXPECT_EQ(lv.E, 0);
        EXPECT_EQ(lv.frakE, 0);
        EXPECT_EQ(lv.calE, 0);
    }
    EXPECT_EQ(rep.frakE0_rate, 0);
    EXPECT_EQ(rep.res.min_A1, 1);
}

TEST(Energy, CorrectionStructure) {
    auto s = packet(0.1);
    SliceContext<double> ctx(s, 4);
    CorrectionBuilder<double> cb(ctx);
    for (int j = 0; j <= 1; ++j) {
        EXPECT_EQ(cb.F(j), C(0)) << j;
        EXPECT_EQ(cb.D(j), C(0)) << j;
    }
    auto lv = energy_level(ctx, 1, true);
    EXPECT_TRUE(std::isfinite(lv.calE));
    // corrections are quartic: halving ε scales them by ≈ 1/16
    SliceContext<double> half(packet(0.05), 4);
    auto c1 = energy_level(ctx, 0, false).corr, c2 = energy_level(half, 0, false).corr;
    double a = std::abs(c1.theta_phg + c1.C1 + c1.C2), b = std::abs(c2.theta_phg + c2.C1 + c2.C2);
    EXPECT_NEAR(a / b, 16.0, 1.0);
}

TEST(Energy, SmallAmplitudeStructureOfFirstLevel) {
    // E₁ ≈ ‖1 − 1/Z_α‖²_{L²} + ‖Θ^(2)‖²_{Ḣ^{1/2}} at small ε
    auto s = packet(0.02);
    SliceContext<double> ctx(s, 4);
    double E1 = energy_quadratic(ctx, 1, false).value;
    double approx = std::pow(norm(C(1) - ctx.base().inv_Za[0], NormKind::L2), 2) + std::pow(norm(ctx.theta(2), NormKind::Hhalf), 2);
    EXPECT_GT(E1, approx / 1.5);
    EXPECT_LT(E1, approx * 1.5);
}

// centered differences along a trajectory against the analytic rates
TEST(EnergyIdentity, LowestLevelRate) {
    auto s = packet(0.1, 64);
    const double dt = 0.005;
    std::vector<double> v;
    std::vector<S> traj{s};
    for (int i = 0; i < 4; ++i) traj.push_back(s = step(s, dt));
    for (const auto& x : traj) v.push_back(frakE0_explicit(x));
    double d = (8 * (v[3] - v[1]) - (v[4] - v[0])) / (12 * dt);
    auto rhs = frakE0_rhs(traj[2]);
    EXPECT_LT(std::abs(d - rhs.value) / std::abs(rhs.value), 2e-3);
    EXPECT_LT(std::abs(rhs.imag), 1e-6 * std::abs(rhs.value) + 1e-18);
}

TEST(EnergyIdentity, ThetaPairRate) {
    auto s = packet(0.1, 64);
    const double dt = 0.005;
    std::vector<double> v;
    PairEnergy<double> mid;
    for (int i = 0; i < 5; ++i) {
        SliceContext<double> ctx(s, 4);
        auto e = theta_pair_energy(ctx, 1, 2);
        v.push_back(e.value);
        if (i == 2) mid = e;
        s = step(s, dt);
    }
    double d = (8 * (v[3] - v[1]) - (v[4] - v[0])) / (12 * dt);
    EXPECT_LT(std::abs(d - mid.rate), 1e-3 * std::abs(mid.rate)) << d << " vs " << mid.rate;
}

TEST(Report, FieldsAndFourthLevelProduct) {
    auto s = packet(0.05);
    ReportOptions opt;
    opt.max_j = 1;
    opt.jet_order = 5;
    opt.quintic = false;
    auto rep = energy_report(s, opt);
    ASSERT_EQ(rep.levels.size(), 2u);
    EXPECT_TRUE(std::isfinite(rep.E1E3));
    EXPECT_NEAR(rep.L, 0.05, 1e-12);
    opt.jet_order = 3;
    EXPECT_TRUE(std::isnan(energy_report(s, opt).E1E3));
}
