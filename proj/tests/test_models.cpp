#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hrcm/models.hpp"
#include "hrcm/quadrature.hpp"

using namespace hrcm;

namespace {

AdjacencyModel boolean_single(double radius = 1.0, int d = 3) {
    AdjacencyModel m;
    m.d = d;
    m.marks = MarkSpace::finite({{radius, 1.0}});
    m.base = BaseKind::BooleanDisc;
    m.scaling = ScalingFunction::identity(d);
    m.validate();
    return m;
}

AdjacencyModel product_kernel_model(double zeta, int grid = 48) {
    AdjacencyModel m;
    m.d = 3;
    m.marks = MarkSpace::unit_interval_graded(12, grid / 12);
    m.base = BaseKind::WeightDependent;
    m.profile.kind = ProfileKind::Indicator;
    m.profile.cut = 1.0;
    m.kernel.kind = KernelKind::Product;
    m.kernel.zeta = zeta;
    m.scaling = ScalingFunction::identity(3);
    m.validate();
    return m;
}

/** Brute-force oracle: adaptive quadrature of phi_L sinh^{d-1} done on the
 * scaled axis without any knowledge of the breakpoint structure. */
double brute_degree(const AdjacencyModel &m, std::size_t i, std::size_t j,
                    double upto) {
    return adaptive_integrate(
        [&](double r) {
            return m.phi_scaled(r, i, j) * std::pow(std::sinh(r), m.d - 1);
        },
        0.0, upto, 1e-11);
}

} // namespace

TEST_CASE("finite mark space invariants") {
    CHECK_THROWS(MarkSpace::finite({}));
    CHECK_THROWS(MarkSpace::finite({{1.0, 0.7}}));          // weights != 1
    CHECK_THROWS(MarkSpace::finite({{1.0, 0.5}, {1.0, 0.5}}));  // duplicate
    const MarkSpace m = MarkSpace::finite({{0.5, 0.25}, {2.0, 0.75}});
    CHECK(m.size() == 2);
    CHECK(m.index_of(2.0) == 1);
    CHECK_THROWS(m.index_of(3.0));
    CHECK(m.nearest_index(1.9) == 1);
    CHECK(m.nearest_index(0.0) == 0);
}

TEST_CASE("unit interval grids integrate polynomials exactly") {
    for (const MarkSpace &m :
         {MarkSpace::unit_interval(16), MarkSpace::unit_interval_graded(6, 4)}) {
        double w = 0.0, x2 = 0.0;
        for (std::size_t i = 0; i < m.size(); i++) {
            w += m.weights[i];
            x2 += m.weights[i] * m.values[i] * m.values[i];
        }
        CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(x2 == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    }
}

TEST_CASE("graded grid refines toward zero") {
    const MarkSpace m = MarkSpace::unit_interval_graded(8, 3);
    CHECK(m.values.front() < 1e-2);  // reaches deep toward 0
    CHECK(m.values.back() > 0.5);
    for (std::size_t i = 1; i < m.size(); i++) CHECK(m.values[i] > m.values[i - 1]);
}

TEST_CASE("mark sampling follows the law") {
    const MarkSpace m = MarkSpace::finite({{1.0, 0.2}, {2.0, 0.8}});
    RandomStream rng = RandomStream::from_seed(11);
    int hi = 0;
    const int n = 20000;
    for (int i = 0; i < n; i++)
        if (sample_mark(m, rng) == 2.0) hi++;
    CHECK(std::fabs(hi / static_cast<double>(n) - 0.8) <
          5.0 * std::sqrt(0.16 / n));
    const MarkSpace u = MarkSpace::unit_interval(8);
    double mean = 0.0;
    for (int i = 0; i < n; i++) mean += sample_mark(u, rng);
    CHECK(std::fabs(mean / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("volume-linear scaling multiplies ball volumes by exactly L") {
    for (int d : {2, 3, 5})
        for (double L : {10.0, 1000.0}) {
            const ScalingFunction s = ScalingFunction::volume_linear(d, L);
            for (double r : {0.3, 1.0, 4.0}) {
                CHECK(volume_fn(Dimension(d), s.forward(r)) ==
                      doctest::Approx(L * volume_fn(Dimension(d), r))
                          .epsilon(1e-8));
                CHECK(s.inverse(s.forward(r)) == doctest::Approx(r).epsilon(1e-8));
            }
        }
}

TEST_CASE("length-linear scaling is plain multiplication") {
    const ScalingFunction s = ScalingFunction::length_linear(3, 7.0);
    CHECK(s.forward(2.0) == doctest::Approx(14.0));
    CHECK(s.inverse(14.0) == doctest::Approx(2.0));
}

TEST_CASE("annulus scaling: slopes, continuity, inverse") {
    const ScalingFunction s = ScalingFunction::annulus(3, 4.0);
    CHECK(s.a_L() == doctest::Approx(std::exp(-16.0)));
    CHECK(s.forward(0.0) == doctest::Approx(0.0));
    CHECK(s.forward(1.0) == doctest::Approx(4.0));             // slope L to 1
    CHECK(s.forward(1.5) == doctest::Approx(4.0 + 0.5 * s.a_L()));
    // Continuity at every knot and an exact inverse.
    for (double y : {0.5, 1.0, 3.9, 4.1, 10.0}) {
        CHECK(s.inverse(s.forward(y)) == doctest::Approx(y).epsilon(1e-9));
        const double h = 1e-9;
        CHECK(std::fabs(s.forward(y + h) - s.forward(y)) < 1e-3);  // no jump
    }
    // Far out it rejoins the identity exactly.
    CHECK(s.forward(100.0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK_THROWS(ScalingFunction::annulus(3, 1.0));  // L >= 2 required
}

TEST_CASE("many-annuli ladder: monotone, continuous, little-o slope") {
    const ScalingFunction s = ScalingFunction::many_annuli(3, 8.0, 0.5);
    double prev = -1.0;
    for (double y = 0.0; y <= 2.0; y += 0.01) {
        const double v = s.forward(y);
        CHECK(v > prev);
        prev = v;
        CHECK(s.inverse(v) == doctest::Approx(y).epsilon(1e-9));
    }
    // Steep gap segments each add exactly 1 to the image.
    const double below = s.forward(0.25), above = s.forward(0.5);
    CHECK(above - below > 0.99);  // gap (1/4,1/2) contributes ~1
    CHECK(s.a_L() < 1e-3);        // shallow support slope
}

TEST_CASE("profiles: evaluation, support, tail classification") {
    ProfileSpec ind;  // indicator
    ind.kind = ProfileKind::Indicator;
    ind.cut = 2.0;
    CHECK(ind.eval(1.9) == 1.0);
    CHECK(ind.eval(2.1) == 0.0);
    CHECK(ind.support() == doctest::Approx(2.0));
    CHECK(ind.tail_integrable(5.0));

    ProfileSpec ex;
    ex.kind = ProfileKind::ExpDecay;
    ex.rate = 2.0;
    CHECK(ex.eval(1.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(ex.tail_integrable(1.0));
    CHECK_FALSE(ex.tail_integrable(2.0));  // polynomial factor breaks ties
    CHECK_FALSE(ex.tail_integrable(3.0));

    ProfileSpec pw;
    pw.kind = ProfileKind::PowerTail;
    pw.exponent = 3.0;
    pw.scale = 1.0;
    CHECK(pw.eval(1.0) == doctest::Approx(0.125));
    CHECK(pw.tail_integrable(-1.0));
    CHECK_FALSE(pw.tail_integrable(0.0));  // power tails never beat exponentials

    ProfileSpec tb;
    tb.kind = ProfileKind::Table;
    tb.table = {{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.0}};
    CHECK(tb.eval(0.5) == doctest::Approx(0.75));
    CHECK(tb.eval(3.0) == 0.0);
    CHECK(tb.support() == doctest::Approx(2.0));
}

TEST_CASE("kernel closed-form norms") {
    KernelSpec k;
    k.kind = KernelKind::Product;
    k.zeta = 0.25;
    CHECK(kernel_norm_analytic(k) == doctest::Approx(2.0));  // 1/(1-2z)
    k.zeta = 0.5;
    CHECK(std::isinf(kernel_norm_analytic(k)));
    k.kind = KernelKind::Strong;
    k.zeta = 0.25;
    CHECK(kernel_norm_analytic(k) ==
          doctest::Approx(std::sqrt(1.0 / (0.5 * 0.75))));
    k.kind = KernelKind::Sum;
    CHECK(kernel_norm_analytic(k) ==
          doctest::Approx(2.0 * std::sqrt(1.0 / (0.5 * 0.75))));
    k.kind = KernelKind::Weak;
    CHECK(std::isinf(kernel_norm_analytic(k)));
    k.kind = KernelKind::PrefAttach;
    CHECK(std::isinf(kernel_norm_analytic(k)));
    k.kind = KernelKind::Constant;
    k.value = 3.0;
    CHECK(kernel_norm_analytic(k) == doctest::Approx(3.0));
}

TEST_CASE("kernel evaluation symmetry and monotonicity") {
    for (KernelKind kind : {KernelKind::Product, KernelKind::Strong,
                            KernelKind::Sum, KernelKind::Weak,
                            KernelKind::PrefAttach}) {
        KernelSpec k;
        k.kind = kind;
        k.zeta = 0.3;
        CHECK(k.eval(0.2, 0.7) == doctest::Approx(k.eval(0.7, 0.2)));
        CHECK(k.eval(0.2, 0.7) >= k.eval(0.3, 0.7));  // non-increasing
    }
}

TEST_CASE("Boolean degree matrix equals the closed form") {
    AdjacencyModel m;
    m.d = 3;
    m.marks = MarkSpace::finite({{0.5, 0.5}, {1.5, 0.5}});
    m.base = BaseKind::BooleanDisc;
    m.scaling = ScalingFunction::identity(3);
    m.validate();
    const DegreeMatrix D = degree_matrix(m);
    for (std::size_t i = 0; i < 2; i++)
        for (std::size_t j = 0; j < 2; j++) {
            const double sum = m.marks.values[i] + m.marks.values[j];
            CHECK(D.at(i, j) ==
                  doctest::Approx(sphere_surface(3) * volume_fn(Dimension(3), sum))
                      .epsilon(1e-9));
        }
}

TEST_CASE("volume-linear transport: D_L = L * D_1 entrywise") {
    for (AdjacencyModel base : {boolean_single(), product_kernel_model(0.25, 24)}) {
        const DegreeMatrix D1 = degree_matrix(base);
        for (double L : {10.0, 1000.0}) {
            AdjacencyModel mm = base;
            mm.scaling = ScalingFunction::volume_linear(base.d, L);
            const DegreeMatrix DL = degree_matrix(mm);
            for (std::size_t k = 0; k < D1.values.size(); k++)
                CHECK(DL.values[k] ==
                      doctest::Approx(L * D1.values[k]).epsilon(1e-7));
        }
    }
}

TEST_CASE("radial integration agrees with a structure-blind oracle") {
    // Piecewise annulus scaling: the integrand is supported on thin slivers
    // the oracle has to hunt for, so compare on the generous bracket.
    AdjacencyModel m = boolean_single(0.3);
    m.scaling = ScalingFunction::annulus(3, 2.0);
    const double lib = radial_integral(m, 0, 0, 0.0,
                                       std::numeric_limits<double>::infinity());
    CHECK(lib == doctest::Approx(brute_degree(m, 0, 0, 1.5)).epsilon(1e-6));

    AdjacencyModel w = product_kernel_model(0.1, 12);
    const std::size_t mid = w.marks.size() / 2;
    const double lib2 = radial_integral(w, mid, mid, 0.0,
                                        std::numeric_limits<double>::infinity());
    CHECK(lib2 == doctest::Approx(brute_degree(w, mid, mid, 20.0)).epsilon(1e-6));
}

TEST_CASE("squared adjacency integral via phi_power") {
    // For a 0/1 adjacency, phi^2 = phi: the two integrals must coincide.
    AdjacencyModel m = boolean_single(1.0);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(radial_integral(m, 0, 0, 0.0, inf, nullptr, 1e-10, 2) ==
          doctest::Approx(radial_integral(m, 0, 0, 0.0, inf)).epsilon(1e-9));
    // For an exponential profile, squaring doubles the decay rate.
    AdjacencyModel e;
    e.d = 3;
    e.marks = MarkSpace::finite({{0.5, 1.0}});
    e.base = BaseKind::WeightDependent;
    e.profile.kind = ProfileKind::ExpDecay;
    e.profile.rate = 6.0;
    e.kernel.kind = KernelKind::Constant;
    e.kernel.value = 1.0;
    e.scaling = ScalingFunction::identity(3);
    e.validate();
    const double sq = radial_integral(e, 0, 0, 0.0, inf, nullptr, 1e-10, 2);
    const double oracle = adaptive_integrate(
        [&](double r) {
            const double p = e.phi_scaled(r, 0, 0);
            return p * p * std::pow(std::sinh(r), 2);
        },
        0.0, 40.0, 1e-11);
    CHECK(sq == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("divergence flags follow the tail classification") {
    AdjacencyModel e;
    e.d = 3;
    e.marks = MarkSpace::finite({{0.5, 1.0}});
    e.base = BaseKind::WeightDependent;
    e.profile.kind = ProfileKind::ExpDecay;
    e.profile.rate = 1.5;
    e.kernel.kind = KernelKind::Constant;
    e.kernel.value = 1.0;
    e.scaling = ScalingFunction::identity(3);
    // Degree integrand grows like e^{2r}: rate 1.5 diverges, rate 2.5 too
    // (linear factor), rate 3 converges.
    CHECK(radial_integral_diverges(e, 0, 0, 2.0));
    e.profile.rate = 2.0;
    CHECK(radial_integral_diverges(e, 0, 0, 2.0));
    e.profile.rate = 3.0;
    CHECK_FALSE(radial_integral_diverges(e, 0, 0, 2.0));
    // Squaring rescues the rate-1.5 profile.
    e.profile.rate = 1.5;
    CHECK_FALSE(radial_integral_diverges(e, 0, 0, 2.0, 2));
    const DegreeMatrix D = degree_matrix(e);
    CHECK(D.any_infinite());
    CHECK_THROWS(degree_k_matrix(D, 2));
}

TEST_CASE("annulus example: expected degree plummets") {
    double prev = std::numeric_limits<double>::infinity();
    for (double L : {2.0, 4.0, 8.0, 16.0}) {
        const double deg = example_scaling_expected_degree(L, Dimension(3), 1.0);
        CHECK(deg > 0.0);
        CHECK(deg < prev);
        prev = deg;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("ratio condition: volume-linear passes, ladder does not vanish") {
    AdjacencyModel vb = boolean_single();
    vb.scaling = ScalingFunction::volume_linear(3, 1.0);
    const RatioSeries ok = check_ratio_condition(vb, 2.0, {1.0, 10.0, 100.0});
    for (std::size_t i = 1; i < ok.ratio.size(); i++)
        CHECK(ok.ratio[i] < ok.ratio[i - 1]);

    AdjacencyModel ladder;
    ladder.d = 3;
    ladder.marks = MarkSpace::finite({{1.0, 1.0}});
    ladder.base = BaseKind::DyadicAnnuli;
    ladder.scaling = ScalingFunction::many_annuli(3, 2.0, 0.5);
    ladder.validate();
    for (double L : {2.0, 8.0, 32.0}) {
        ladder.scaling = ScalingFunction::many_annuli(3, L, 0.5);
        const RatioSeries rs = check_ratio_condition(ladder, 0.5, {L});
        CHECK(rs.ratio[0] > 0.1);
    }
}

TEST_CASE("model validation rejects inconsistent combinations") {
    AdjacencyModel m = product_kernel_model(0.25, 24);
    m.scaling = ScalingFunction::annulus(3, 4.0);  // weight-dependent + example
    CHECK_THROWS(m.validate());
    AdjacencyModel b;
    b.d = 3;
    b.marks = MarkSpace::finite({{1.0, 1.0}});
    b.marks.values[0] = 0.0;  // zero Boolean radius
    b.base = BaseKind::BooleanDisc;
    b.scaling = ScalingFunction::identity(3);
    CHECK_THROWS(b.validate());
}
