#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "hrcm/thresholds.hpp"

using namespace hrcm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

AdjacencyModel boolean_volscale(double L, double radius = 1.0, int d = 3) {
    AdjacencyModel m;
    m.d = d;
    m.marks = MarkSpace::finite({{radius, 1.0}});
    m.base = BaseKind::BooleanDisc;
    m.scaling = ScalingFunction::volume_linear(d, L);
    m.validate();
    return m;
}

DegreeMatrix const_degree(double v) {
    DegreeMatrix D;
    D.n = 1;
    D.values = {v};
    D.weights = {1.0};
    return D;
}

} // namespace

TEST_CASE("uniqueness bound is the reciprocal transform norm") {
    SpectralReport rep;
    rep.norm_2to2 = 4.0;
    const UniquenessBound u = lambda_u_lower_bound(rep);
    CHECK(u.value == doctest::Approx(0.25));
    CHECK_FALSE(u.vacuous);
    rep.norm_2to2 = kInf;
    rep.diverged = true;
    const UniquenessBound v = lambda_u_lower_bound(rep);
    CHECK(v.value == 0.0);
    CHECK(v.vacuous);
}

TEST_CASE("triangle bound: hand arithmetic and limiting cases") {
    // lambda ||Phi|| = 0.5 gives T = 2 ||Phi||; with phi_norm 1, lambda 0.5,
    // sq_mass 1: (0.5*2 + 2*0.25*4 + 0.125*8) * 0.5 = (1 + 2 + 1) * 0.5 = 2.
    CHECK(triangle_bound(1.0, 0.5, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(triangle_bound(1.0, 0.5, 3.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(std::isinf(triangle_bound(1.0, 1.0, 1.0)));   // lambda phi = 1
    CHECK(std::isinf(triangle_bound(2.0, 0.7, 1.0)));   // past the pole
    CHECK(std::isinf(triangle_bound(1.0, 0.5, kInf)));
    CHECK(triangle_bound(1.0, 0.0, 5.0) == 0.0);
    // Strictly increasing in lambda below the pole.
    double prev = 0.0;
    for (double lam : {0.1, 0.2, 0.4, 0.8}) {
        const double t = triangle_bound(1.0, lam, 1.0);
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("squared-adjacency mass: 0/1 adjacency reduces to the degree") {
    const AdjacencyModel m = boolean_volscale(1.0);
    const DegreeMatrix D = degree_matrix(m);
    CHECK(sq_mass(m) == doctest::Approx(D.at(0, 0)).epsilon(1e-7));
}

TEST_CASE("finite-variant critical bound: scaling by L through D") {
    const double theta = 0.75 * M_PI, eps = 0.375 * M_PI;
    const CriticalBound b1 = lambda_c_upper_bound_finite(
        boolean_volscale(1e4), theta, eps, 1e4);
    const CriticalBound b2 = lambda_c_upper_bound_finite(
        boolean_volscale(2e4), theta, eps, 2e4);
    CHECK(b1.variant == "finite");
    CHECK(b1.valid);
    CHECK(b2.valid);
    CHECK(b1.min_P == doctest::Approx(1.0));
    // D_L doubles with L, so the bound halves.
    CHECK(b2.value == doctest::Approx(0.5 * b1.value).epsilon(1e-6));
    // Reconstruct the formula from the reported ingredients.
    CHECK(b1.value ==
          doctest::Approx(2.0 * sphere_surface(3) * std::log(2.0) /
                          (b1.c_d * b1.min_P * b1.D_star)).epsilon(1e-12));
    CHECK(b1.c_d == doctest::Approx(cap_volume(Dimension(3), eps)));
}

TEST_CASE("finite-variant precondition failure reports a workable L") {
    // At tiny L almost all mass sits inside the clearance radius.
    const double theta = 0.5 * M_PI, eps = M_PI / 12.0;
    const CriticalBound b = lambda_c_upper_bound_finite(
        boolean_volscale(1.0), theta, eps, 1.0);
    CHECK_FALSE(b.valid);
    CHECK(b.trunc_fraction < 0.5);
    CHECK(b.suggested_L > 1.0);
    const double Ls = b.suggested_L;
    const CriticalBound ok = lambda_c_upper_bound_finite(
        boolean_volscale(Ls), theta, eps, Ls);
    CHECK(ok.valid);
    CHECK(ok.trunc_fraction >= 0.5);
}

TEST_CASE("volume-scaled bound halves exactly when L doubles") {
    AdjacencyModel m;
    m.d = 3;
    m.marks = MarkSpace::unit_interval_graded(8, 3);
    m.base = BaseKind::WeightDependent;
    m.profile.kind = ProfileKind::Indicator;
    m.profile.cut = 1.0;
    m.kernel.kind = KernelKind::Product;
    m.kernel.zeta = 0.2;
    const double theta = 0.5 * M_PI, eps = M_PI / 12.0;
    m.scaling = ScalingFunction::volume_linear(3, 1e5);
    m.validate();
    const CriticalBound b1 = lambda_c_upper_bound_volscale(
        m, theta, eps, 0.0, 1.0, 0.0, 1.0);
    m.scaling = ScalingFunction::volume_linear(3, 2e5);
    const CriticalBound b2 = lambda_c_upper_bound_volscale(
        m, theta, eps, 0.0, 1.0, 0.0, 1.0);
    CHECK(b1.variant == "volume_scaled");
    CHECK(b1.P_E == doctest::Approx(1.0));
    CHECK(b1.eps_D > 0.0);
    CHECK(b2.value == doctest::Approx(0.5 * b1.value).epsilon(1e-12));
    // Mark sets that miss every grid node are rejected.
    CHECK_THROWS(lambda_c_upper_bound_volscale(m, theta, eps, 0.998, 0.999,
                                               0.0, 1.0));
}

TEST_CASE("certification: gap at large L, never from vacuous inputs") {
    const double theta = 0.5 * M_PI, eps = M_PI / 12.0;
    const ThresholdBounds far = certify_nonuniqueness(
        boolean_volscale(2e5), 2e5, theta, eps);
    CHECK(far.gap_certified);
    CHECK(far.lambda_c_upper < far.lambda_u_lower);
    CHECK_FALSE(far.vacuous);

    const ThresholdBounds near = certify_nonuniqueness(
        boolean_volscale(2.0), 2.0, theta, eps);
    CHECK_FALSE(near.gap_certified);

    // Divergent transform: bounds must refuse to certify.
    AdjacencyModel heavy;
    heavy.d = 3;
    heavy.marks = MarkSpace::finite({{0.5, 1.0}});
    heavy.base = BaseKind::WeightDependent;
    heavy.profile.kind = ProfileKind::ExpDecay;
    heavy.profile.rate = 0.5;
    heavy.kernel.kind = KernelKind::Constant;
    heavy.kernel.value = 1.0;
    heavy.scaling = ScalingFunction::identity(3);
    heavy.validate();
    const ThresholdBounds bad = certify_nonuniqueness(heavy, 1.0, theta, eps);
    CHECK(bad.vacuous);
    CHECK_FALSE(bad.gap_certified);
}

TEST_CASE("mean-field constants: 1x1 constant degree by hand") {
    // D = 3, lambda = 1: D^(k) = 3^k, (lam/(1+lam))^k = 2^{-k}, so the sup
    // over k of (3/2)^k is unbounded -> I = 0 achieved at the cap.  Use
    // D = 1.5, lambda = 1 instead: (1.5/2)^k decreases, argmax k = 1,
    // I = 1/(0.75) = 4/3; J uses lam/(2(1+lam)) = 1/4 -> J = 1/0.375 = 8/3.
    const MeanFieldConstants mf =
        meanfield_constants(const_degree(1.5), 1.0, 0.01);
    REQUIRE(mf.I_per_mark.size() == 1);
    CHECK(mf.I_per_mark[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(mf.argmax_k_I[0] == 1);
    CHECK(mf.J_per_mark[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
    CHECK(mf.condition_D1);
    CHECK(mf.condition_D2);
    // c_bar = 1 + lam * esssup D * esssup J = 1 + 1.5 * 8/3 = 5.
    CHECK(mf.c_bar == doctest::Approx(5.0).epsilon(1e-12));
    // First C_delta branch: (1 + lam D I)^{-2} = (1 + 1.5 * 4/3)^{-2} = 1/9.
    // Second branch: (1/5) * (1.5)^2 / (1 + 2*1.5) = 0.45/4 = 0.1125.
    CHECK(mf.C_delta == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(mf.condition_T);  // 0.01 < 1/9
}

TEST_CASE("mean-field constants: growth beyond the cap and divergence") {
    // D = 3, lambda = 1: the sup grows without bound, so argmax hits k_cap.
    const MeanFieldConstants grow =
        meanfield_constants(const_degree(3.0), 1.0, 0.01, 32);
    CHECK(grow.argmax_k_I[0] == 32);
    CHECK(grow.I_per_mark[0] < 1e-4);
    // Infinite degree: vacuous, (D.1) fails.
    const MeanFieldConstants inf_d =
        meanfield_constants(const_degree(kInf), 1.0, 0.01);
    CHECK(inf_d.vacuous);
    CHECK_FALSE(inf_d.condition_D1);
}

TEST_CASE("mean-field constants: 2x2 degree matrix") {
    DegreeMatrix D;
    D.n = 2;
    D.values = {1.0, 0.5, 0.5, 1.0};
    D.weights = {0.5, 0.5};
    const double lam = 1.0;
    // Row mins of D are 0.5; D^(2) = D * diag(w) * D has entries
    // [[0.625, 0.5], [0.5, 0.625]] * ... compute: row a: sum_b w_b D(a,b)D(b,c).
    // D2(0,0) = 0.5*1*1 + 0.5*0.5*0.5 = 0.625; D2(0,1) = 0.5*1*0.5 +
    // 0.5*0.5*1 = 0.5; min over c is 0.5 for both rows.
    // (1/2)^1 * 0.5 = 0.25; (1/2)^2 * 0.5 = 0.125: argmax k = 1, I = 4.
    const MeanFieldConstants mf = meanfield_constants(D, lam, 1e-4, 8);
    CHECK(mf.I_per_mark[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(mf.I_per_mark[1] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(mf.argmax_k_I[0] == 1);
    CHECK(mf.condition_D2);
}

TEST_CASE("assumption report covers the declared hypotheses") {
    const AdjacencyModel m = boolean_volscale(1.0);
    const AssumptionReport rep = check_assumptions(m, {10.0, 100.0, 1000.0});
    CHECK(rep.rows.size() >= 5);
    bool saw_ratio = false, saw_norm = false;
    for (const AssumptionRow &row : rep.rows) {
        CHECK(!row.name.empty());
        CHECK(!row.evidence.empty());
        if (row.name.find("ratio") != std::string::npos) {
            saw_ratio = true;
            CHECK(row.verdict == Verdict::Holds);
        }
        if (row.name.find("norm") != std::string::npos) saw_norm = true;
    }
    CHECK(saw_ratio);
    CHECK(saw_norm);
    CHECK(std::string(verdict_name(Verdict::Holds)) == "holds");
}

TEST_CASE("assumption report flags the ladder counterexample") {
    AdjacencyModel ladder;
    ladder.d = 3;
    ladder.marks = MarkSpace::finite({{1.0, 1.0}});
    ladder.base = BaseKind::DyadicAnnuli;
    ladder.scaling = ScalingFunction::many_annuli(3, 2.0, 0.5);
    ladder.validate();
    const AssumptionReport rep = check_assumptions(ladder, {2.0, 4.0, 8.0});
    bool flagged = false;
    for (const AssumptionRow &row : rep.rows)
        if (row.name.find("ratio") != std::string::npos &&
            row.verdict != Verdict::Holds)
            flagged = true;
    CHECK(flagged);
}
