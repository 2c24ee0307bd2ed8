#ifndef HRCM_PERCOLATION_HPP
#define HRCM_PERCOLATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hrcm/models.hpp"

namespace hrcm {

/** Simulation window and budget for one Monte-Carlo percolation run. */
struct PercConfig {
    AdjacencyModel model;
    double lambda = 1.0;    // Poisson intensity
    double R = 10.0;        // hyperbolic ball radius
    double R_core = 4.0;    // core ball used for low-bias estimators
    double R_shell = 8.0;   // shell start: crossing = core <-> B_R \ B_shell
    int replicas = 1;
    std::uint64_t seed = 0;
    std::uint64_t point_cap = 2000000;
    int two_point_bins = 24;  // distance bins on [0, R] for core pairs

    void validate() const;  // 0 < R_core < R_shell < R, replicas >= 1, ...
};

/** Union-find over sampled points (path halving + union by rank). */
class ClusterForest {
  public:
    explicit ClusterForest(std::size_t n);
    std::size_t find(std::size_t x);
    void unite(std::size_t x, std::size_t y);
    std::size_t components() const { return components_; }
    std::size_t size() const { return parent_.size(); }

  private:
    std::vector<std::size_t> parent_;
    std::vector<std::uint8_t> rank_;
    std::size_t components_;
};

/** One replica's statistics.  Two-point tallies are over core-point pairs,
 * binned by hyperbolic distance; "connected" means same cluster. */
struct PercResult {
    int replica = 0;
    std::uint64_t points = 0;
    std::uint64_t core_points = 0;
    std::uint64_t edges = 0;
    double mean_degree = 0.0;         // 2 edges / points
    double core_mean_degree = 0.0;    // average degree over core points only
    std::uint64_t largest_cluster = 0;
    double largest_core_fraction = 0.0;  // largest cluster's core share
    double richest_core_fraction = 0.0;  // best single-cluster core share
    std::uint64_t clusters = 0;
    std::uint64_t crossing_clusters = 0;
    std::vector<std::uint64_t> size_histogram;  // log2-binned cluster sizes
    std::vector<std::uint64_t> pair_count;      // two-point: pairs per bin
    std::vector<std::uint64_t> conn_count;      // two-point: connected pairs
    double bin_width = 0.0;
    bool truncation_warning = false;  // adjacency support exceeds the window
};

/** Largest scaled radial support over mark pairs; for non-compact adjacency
 * the radius where the residual degree mass drops below 1e-3 of the total
 * (the decay-based effective interaction range). */
double effective_range(const AdjacencyModel &m);

PercResult run_replica(const PercConfig &cfg, int replica_id);

/** Wilson-interval binomial estimate. */
struct BinnedEstimate {
    std::vector<double> r_mid, freq, ci_lo, ci_hi;
    std::vector<std::uint64_t> samples;
    std::vector<bool> empty;
};

/** Pooled two-point function over replicas. */
BinnedEstimate two_point_estimate(const std::vector<PercResult> &results);

std::uint64_t crossing_cluster_count(const PercResult &r);

/** Size-biased mean cluster size of a uniformly chosen core point, with a
 * normal-approximation confidence interval over replicas. */
struct SusceptibilityEstimate {
    double value = 0.0;
    double ci_half_width = 0.0;
    bool no_core_points = false;
};

SusceptibilityEstimate susceptibility_proxy(const std::vector<PercResult> &rs);

/** One aggregated sweep row: a (lambda, L) grid point with replica means. */
struct SweepRow {
    double lambda = 0.0, L = 0.0;
    int replicas = 0;
    double mean_points = 0.0, mean_degree = 0.0, core_mean_degree = 0.0;
    double mean_largest_core_fraction = 0.0;
    double median_crossing = 0.0, mean_crossing = 0.0;
    double susceptibility = 0.0;
    double lambda_u_lower = 0.0, lambda_c_upper = 0.0;  // threshold bounds
    bool bounds_vacuous = false;
    std::string error;  // nonempty when this grid point failed
};

/** Runs the full (lambda, L) grid; replicas execute in parallel with
 * deterministic slot assignment (identical output for any thread count).
 * Thread count: HRCM_THREADS override, else hardware concurrency. */
std::vector<SweepRow> sweep(const PercConfig &base,
                            const std::vector<double> &lambdas,
                            const std::vector<double> &Ls,
                            bool annotate_bounds = true, double theta = M_PI_2,
                            double eps = M_PI / 12.0);

/** Per-replica rows of the last sweep grid point layout: exposed so the CLI
 * can emit both raw and aggregated tables deterministically. */
std::vector<PercResult> run_replicas(const PercConfig &cfg);

/** Least-squares slope of log y against log x. */
struct PowerLawFit {
    double exponent = 0.0;
    double stderr_ = 0.0;
};

PowerLawFit fit_power_law(const std::vector<double> &xs,
                          const std::vector<double> &ys);

int thread_count();  // HRCM_THREADS override, else hardware concurrency

} // namespace hrcm

#endif
