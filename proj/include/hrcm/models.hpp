#ifndef HRCM_MODELS_HPP
#define HRCM_MODELS_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hrcm/hypgeo.hpp"
#include "hrcm/rng.hpp"

namespace hrcm {

// ---------------------------------------------------------------------------
// Mark spaces
// ---------------------------------------------------------------------------

enum class MarkKind { Finite, UnitInterval };

/** Probability space of marks: either a finite set of (value, weight) pairs
 * or the unit interval (0,1) with Lebesgue measure discretized on a
 * quadrature grid.  Weights always sum to 1. */
struct MarkSpace {
    MarkKind kind = MarkKind::Finite;
    std::vector<double> values;   // finite labels or grid nodes, increasing
    std::vector<double> weights;  // probabilities / quadrature weights
    // Construction parameters, kept for lossless serialization:
    int grid_size = 0;            // UnitInterval: requested node count
    bool graded = false;          // UnitInterval: geometric refinement at 0
    int graded_cells = 0, graded_per_cell = 0;

    static MarkSpace finite(const std::vector<std::pair<double, double>> &vw);
    static MarkSpace unit_interval(int n);
    /** Composite Gauss-Legendre on geometric cells [2^{-k-1}, 2^{-k}],
     * refined toward 0 for kernels singular at small marks. */
    static MarkSpace unit_interval_graded(int cells, int per_cell);

    std::size_t size() const { return values.size(); }
    std::size_t index_of(double mark) const;  // throws on unknown mark
    std::size_t nearest_index(double mark) const;  // closest grid node
};

/** Draws a mark from the underlying law (finite: inverse CDF on weights;
 * unit interval: the continuous Lebesgue law, not the grid). */
double sample_mark(const MarkSpace &m, RandomStream &rng);

// ---------------------------------------------------------------------------
// Scaling functions
// ---------------------------------------------------------------------------

enum class ScalingKind {
    Identity,
    VolumeLinear,       // V_d^{-1}(L V_d(r))
    LengthLinear,       // L r
    AnnulusExample,     // piecewise-linear counterexample (vanishing degree)
    ManyAnnuliExample,  // piecewise-linear counterexample (ratio condition)
};

/** Strictly increasing bijection of [0, infinity) used to rescale radial
 * adjacency: phi_L(r) = phi(inverse(r)).  The two appendix examples are
 * piecewise linear and expose their breakpoints for exact integration. */
class ScalingFunction {
  public:
    static ScalingFunction identity(int d);
    static ScalingFunction volume_linear(int d, double L);
    static ScalingFunction length_linear(int d, double L);
    /** Slope L on [0,1], then a_L = e^{-2L(d-1)} until rejoining the
     * identity; throws if a_L underflows to zero. */
    static ScalingFunction annulus(int d, double L);
    /** Dyadic ladder on [R/L, 1]: slope a_L on the annuli carrying adjacency
     * mass, steep dyadic slopes on the gaps, L below R/L, 1 beyond 1.
     * a_L = 1 / (L^2 I_L) with I_L the sinh-mass of the unit-slope dummy
     * ladder, a valid little-o choice recorded in metadata. */
    static ScalingFunction many_annuli(int d, double L, double R_param);

    double forward(double r) const;
    double inverse(double r) const;

    /** Same variant and shape parameters with a different L. */
    ScalingFunction with_L(double L) const;

    ScalingKind kind() const { return kind_; }
    int dim() const { return d_; }
    double L() const { return L_; }
    double R_param() const { return R_param_; }
    double a_L() const { return a_L_; }
    bool piecewise() const {
        return kind_ == ScalingKind::AnnulusExample ||
               kind_ == ScalingKind::ManyAnnuliExample;
    }
    /** Piecewise variants: knots y_0=0 < y_1 < ... in reference coordinates,
     * images r_i = forward(y_i) and slope on each [y_i, y_{i+1}] (the last
     * slope extends to infinity). */
    const std::vector<double> &knots_y() const { return bp_y_; }
    const std::vector<double> &knots_r() const { return bp_r_; }
    const std::vector<double> &slopes() const { return slope_; }
    /** Exact derivative at y (piecewise variants; constant per segment). */
    double slope_at(double y) const;

  private:
    ScalingFunction() = default;
    void build_table();  // fills bp_r_ from bp_y_ and slope_

    ScalingKind kind_ = ScalingKind::Identity;
    int d_ = 2;
    double L_ = 1.0, R_param_ = 0.0, a_L_ = 0.0;
    std::vector<double> bp_y_, bp_r_, slope_;
};

// ---------------------------------------------------------------------------
// Profiles, kernels, adjacency
// ---------------------------------------------------------------------------

enum class ProfileKind { Indicator, ExpDecay, PowerTail, Table };

/** Non-increasing profile rho: [0,inf) -> [0,1]. */
struct ProfileSpec {
    ProfileKind kind = ProfileKind::Indicator;
    double cut = 1.0;       // Indicator
    double rate = 1.0;      // ExpDecay: e^{-rate r}
    double exponent = 2.0;  // PowerTail: (1 + r/scale)^{-exponent}
    double scale = 1.0;
    std::vector<std::pair<double, double>> table;  // sorted; linear interp

    double eval(double r) const;
    double support() const;  // sup{r : rho(r) > 0}; may be +infinity
    /** Whether integral rho(r) e^{growth r} (times polynomial factors) is
     * finite: the tail classification driving divergence flags. */
    bool tail_integrable(double growth) const;
};

enum class KernelKind { Product, Strong, Sum, Weak, PrefAttach, Constant };

/** Symmetric positive kernel on (0,1)^2, non-increasing in each argument. */
struct KernelSpec {
    KernelKind kind = KernelKind::Constant;
    double zeta = 0.25;
    double value = 1.0;  // Constant

    double eval(double a, double b) const;
};

/** Closed-form L^2 operator norm or finite Hilbert-Schmidt upper bound;
 * +infinity for the weak / preferential-attachment kernels and for
 * zeta >= 1/2 where applicable. */
double kernel_norm_analytic(const KernelSpec &k);

enum class BaseKind {
    BooleanDisc,      // 1{r < a + b}, marks are radii
    WeightDependent,  // rho(s_{kappa(a,b)}^{-1}(r))
    RadialTable,      // tabulated radial adjacency, linear interpolation
    DyadicAnnuli,     // markless union of annuli 2^{-2i-1} < r < 2^{-2i}
};

/** A marked radial adjacency model: base function phi(r;a,b) composed with
 * an outer scaling, phi_L(r;a,b) = phi(scaling.inverse(r); a, b). */
struct AdjacencyModel {
    int d = 3;
    MarkSpace marks;
    BaseKind base = BaseKind::BooleanDisc;
    ProfileSpec profile;  // WeightDependent only
    KernelSpec kernel;    // WeightDependent only
    /** RadialTable: either one shared table or one per unordered mark pair
     * (row-major upper triangle, size n(n+1)/2). */
    std::vector<std::vector<std::pair<double, double>>> tables;
    ScalingFunction scaling = ScalingFunction::identity(3);

    void validate() const;  // invariants incl. weight-dependent scaling rule

    /** Base adjacency in reference (unscaled) coordinates. */
    double phi_base(double r, std::size_t i, std::size_t j) const;
    /** Scaled adjacency phi_L at mark indices. */
    double phi_scaled(double r, std::size_t i, std::size_t j) const;
    /** Scaled adjacency at raw mark values (off-grid marks allowed; the
     * tabulated base snaps to the nearest grid pair). */
    double phi_value(double r, double a, double b) const;
    /** sup{r : phi(r; a_i, a_j) > 0} in reference coordinates. */
    double base_support(std::size_t i, std::size_t j) const;
    /** Same model with the scaling rebuilt at a different L. */
    AdjacencyModel with_L(double L) const;
};

/** Scaled adjacency at mark values (looked up in the mark space). */
double eval_phi(const AdjacencyModel &m, double r, double a, double b);

/** Expected-degree density matrix D_L(a,b) = S_{d-1} integral phi_L(r;a,b)
 * sinh^{d-1} r dr; entries flagged +infinity when the tail diverges. */
struct DegreeMatrix {
    std::size_t n = 0;
    std::vector<double> values;   // n x n, row-major; +inf entries allowed
    std::vector<double> weights;  // mark weights, copied for convenience

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
    double &at(std::size_t i, std::size_t j) { return values[i * n + j]; }
    bool any_infinite() const;
    double max_entry() const;
};

DegreeMatrix degree_matrix(const AdjacencyModel &m, double rel_tol = 1e-9);

/** k-fold mark-weighted product D^{(k)}; throws on infinite entries. */
DegreeMatrix degree_k_matrix(const DegreeMatrix &D, int k);

/** Radial integral of phi_L(.; a_i, a_j) sinh^{d-1} against an optional
 * extra weight, over [r_lo, r_hi] (r_hi may be +infinity).  The workhorse
 * behind degrees, transforms, and the ratio diagnostics. */
double radial_integral(const AdjacencyModel &m, std::size_t i, std::size_t j,
                       double r_lo, double r_hi,
                       const std::function<double(double)> *weight = nullptr,
                       double rel_tol = 1e-9, int phi_power = 1);

/** Tail test: does the full-space radial integral of phi^phi_power with an
 * integrand growing like e^{growth r} diverge for this pair? */
bool radial_integral_diverges(const AdjacencyModel &m, std::size_t i,
                              std::size_t j, double growth, int phi_power = 1);

/** Truncated-to-total mass ratio series over L: max over mark pairs of the
 * [0,R] mass divided by max full mass, per L. */
struct RatioSeries {
    std::vector<double> L, ratio;
    std::vector<bool> undefined;  // denominator zero
};

RatioSeries check_ratio_condition(const AdjacencyModel &m, double R,
                                  const std::vector<double> &Ls);

/** Expected degree of the annulus counterexample at intensity lambda:
 * lambda S_{d-1} integral_1^2 sigma'(y) sinh^{d-1}(sigma(y)) dy, evaluated
 * in log space.  Decreases to 0 as L grows. */
double example_scaling_expected_degree(double L, Dimension d, double lambda);

} // namespace hrcm

#endif
