#ifndef HRCM_THRESHOLDS_HPP
#define HRCM_THRESHOLDS_HPP

#include <string>
#include <vector>

#include "hrcm/models.hpp"
#include "hrcm/spectral.hpp"

namespace hrcm {

/** Branching-tree upper bound on the percolation threshold, finite-mark
 * variant.  The bound is only valid once at least half the pair's degree
 * mass sits beyond the tree clearance 2 L*(theta); `valid` records whether
 * that precondition holds at this L, and `suggested_L` the smallest L
 * (found by doubling) at which it does. */
struct CriticalBound {
    double value = 0.0;      // the upper bound on lambda_c; may be +inf
    double theta = 0.0, eps = 0.0;
    double L = 0.0;
    double c_d = 0.0;        // spherical-cap volume c_d(eps)
    double min_P = 0.0;      // min of the two argmax mark probabilities
    double D_star = 0.0;     // D_L at the maximizing mark pair
    std::size_t a_star = 0, b_star = 0;
    double trunc_fraction = 0.0;  // mass beyond 2 L*(theta) / total mass
    bool valid = false;
    double suggested_L = 0.0;     // smallest valid L when !valid, else L
    std::string variant;          // "finite" or "volume_scaled"
    // Volume-scaled variant extras:
    double eps_D = 0.0;           // grid essinf of D_1 on E x F
    double P_E = 0.0, P_F = 0.0;  // masses of the mark sets E, F
};

CriticalBound lambda_c_upper_bound_finite(const AdjacencyModel &m,
                                          double theta, double eps, double L);

/** Volume-linear variant: bound 2 S_{d-1} log2 / (c_d(eps) min{P(E),P(F)}
 * L eps_D) with eps_D a verified grid lower bound of D_1 on E x F.  Pass
 * eps_D <= 0 to take the grid minimum automatically.  The bound is valid
 * once L eps_D >= 2 S_{d-1} V_d(2 L*(theta)). */
CriticalBound lambda_c_upper_bound_volscale(const AdjacencyModel &m,
                                            double theta, double eps,
                                            double E_lo, double E_hi,
                                            double F_lo, double F_hi,
                                            double eps_D = 0.0);

/** Lower bound on the uniqueness threshold: 1 / ||Phi_L||_{2->2}.  A
 * divergent norm gives value 0 with the vacuous flag set. */
struct UniquenessBound {
    double value = 0.0;
    bool vacuous = false;
};

UniquenessBound lambda_u_lower_bound(const SpectralReport &report);

/** The two bounds side by side; gap_certified only when both are usable
 * and the critical upper bound sits strictly below the uniqueness lower
 * bound (never from vacuous or invalid inputs). */
struct ThresholdBounds {
    double lambda_u_lower = 0.0;
    double lambda_c_upper = 0.0;
    double theta = 0.0, eps = 0.0;
    double L = 0.0;
    bool gap_certified = false;
    bool vacuous = false;       // ||Phi_L|| divergent
    CriticalBound critical;     // full metadata
    SpectralReport spectral;
};

ThresholdBounds certify_nonuniqueness(const AdjacencyModel &m, double L,
                                      double theta, double eps);

/** Geometric-series bound on the triangle diagram:
 * (lambda T + 2 lambda^2 T^2 + lambda^3 T^3) lambda sq_mass with
 * T = phi_norm / (1 - lambda phi_norm); +inf when lambda phi_norm >= 1 or
 * sq_mass is infinite. */
double triangle_bound(double phi_norm, double lambda, double sq_mass);

/** esssup_a sum_b w_b S_{d-1} int phi_L(r;a,b)^2 sinh^{d-1} r dr, the
 * squared-adjacency mass entering the triangle bound; +inf on divergence. */
double sq_mass(const AdjacencyModel &m, double rel_tol = 1e-8);

/** Mean-field hypothesis constants at a proxy intensity lambda (the exact
 * threshold is defined through a divergence and never computed). */
struct MeanFieldConstants {
    double lambda = 0.0;            // the proxy intensity used throughout
    std::vector<double> I_per_mark; // 1 / sup_k (lam/(1+lam))^k min_b D^(k)
    std::vector<double> J_per_mark; // same with lam/(2(1+lam))
    std::vector<int> argmax_k_I, argmax_k_J;
    double c_bar = 1.0;
    double C_delta = 0.0;
    double triangle = 0.0;          // triangle bound evaluated at lambda
    bool condition_D1 = false;      // esssup D < inf
    bool condition_D2 = false;      // sup_k essinf D^(k) > 0
    bool condition_T = false;       // triangle < C_delta
    bool vacuous = false;           // infinite D entries
    int k_cap = 64;
};

MeanFieldConstants meanfield_constants(const DegreeMatrix &D, double lambda,
                                       double triangle_value, int k_cap = 64);

/** One checked hypothesis: a named condition with a verdict and the numbers
 * behind it.  Limit conditions over L report trend evidence, not proofs. */
enum class Verdict { Holds, Fails, Undecidable };

struct AssumptionRow {
    std::string name;
    Verdict verdict = Verdict::Undecidable;
    std::string evidence;            // human-readable computed quantities
    std::vector<double> values;      // per-L or scalar evidence values
};

struct AssumptionReport {
    std::vector<double> L_list;
    std::vector<AssumptionRow> rows;
};

AssumptionReport check_assumptions(const AdjacencyModel &m,
                                   const std::vector<double> &L_list);

const char *verdict_name(Verdict v);

} // namespace hrcm

#endif
