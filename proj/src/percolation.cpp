#include "hrcm/percolation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hrcm/thresholds.hpp"

namespace hrcm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void PercConfig::validate() const {
    model.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("perc: lambda <= 0");
    if (!(R_core > 0.0 && R_core < R_shell && R_shell < R))
        throw std::invalid_argument("perc: need 0 < R_core < R_shell < R");
    if (R > kMaxRadius) throw std::invalid_argument("perc: R beyond radius cap");
    if (replicas < 1) throw std::invalid_argument("perc: replicas < 1");
    if (two_point_bins < 1) throw std::invalid_argument("perc: bins < 1");
}

ClusterForest::ClusterForest(std::size_t n)
    : parent_(n), rank_(n, 0), components_(n) {
    for (std::size_t i = 0; i < n; i++) parent_[i] = i;
}

std::size_t ClusterForest::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];  // path halving
        x = parent_[x];
    }
    return x;
}

void ClusterForest::unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    if (rank_[x] < rank_[y]) std::swap(x, y);
    parent_[y] = x;
    if (rank_[x] == rank_[y]) rank_[x]++;
    components_--;
}

double effective_range(const AdjacencyModel &m) {
    const std::size_t n = m.marks.size();
    // Boolean discs with continuous unit-interval radii can pair up to
    // radius-sum 2 even though the grid tops out below 1.
    if (m.base == BaseKind::BooleanDisc && m.marks.kind == MarkKind::UnitInterval)
        return m.scaling.forward(2.0);
    double sup = 0.0;
    bool infinite = false;
    std::size_t ai = 0, bi = 0;
    double best_deg = -1.0;
    for (std::size_t i = 0; i < n; i++)
        for (std::size_t j = i; j < n; j++) {
            const double s = m.base_support(i, j);
            if (!std::isfinite(s)) {
                infinite = true;
                const double deg = radial_integral_diverges(m, i, j, m.d - 1)
                                       ? kInf
                                       : radial_integral(m, i, j, 0.0, kInf);
                if (deg > best_deg) { best_deg = deg; ai = i; bi = j; }
            } else {
                sup = std::max(sup, m.scaling.forward(s));
            }
        }
    if (!infinite) return sup;
    if (!std::isfinite(best_deg)) return kInf;  // non-locally-finite regime
    // Decay-based range: where the residual degree mass is below 1e-3.
    double r = 1.0;
    while (r < kMaxRadius &&
           radial_integral(m, ai, bi, r, kInf) > 1e-3 * best_deg)
        r += 1.0;
    return std::max(sup, r);
}

PercResult run_replica(const PercConfig &cfg, int replica_id) {
    cfg.validate();
    const AdjacencyModel &m = cfg.model;
    const Dimension dim(m.d);
    PercResult res;
    res.replica = replica_id;

    const RandomStream root = RandomStream::from_seed(cfg.seed);
    RandomStream rng = root.split(static_cast<std::uint64_t>(replica_id), 1);
    const RandomStream pair_base =
        root.split(static_cast<std::uint64_t>(replica_id), 2);

    const double n_expected =
        cfg.lambda * sphere_surface(m.d) * volume_fn(dim, cfg.R);
    const std::vector<BallPoint> pts =
        sample_ball(dim, cfg.R, n_expected, rng, cfg.point_cap);
    const std::size_t n = pts.size();
    res.points = n;

    std::vector<double> marks(n), radius(n);
    for (std::size_t i = 0; i < n; i++) {
        marks[i] = sample_mark(m.marks, rng);
        radius[i] = 2.0 * std::atanh(pts[i].euclid_norm());
    }
    std::vector<bool> core(n), shell(n);
    for (std::size_t i = 0; i < n; i++) {
        core[i] = radius[i] <= cfg.R_core;
        shell[i] = radius[i] >= cfg.R_shell;
        if (core[i]) res.core_points++;
    }

    const double range = effective_range(m);
    res.truncation_warning = !(range < cfg.R - cfg.R_core);
    // Exact cheap prefilter: hyp_dist(x,y) > range is equivalent to
    // |x-y|^2 > C (1-|x|^2)(1-|y|^2) with C = (cosh(range) - 1)/2, so the
    // acosh and the adjacency evaluation only run for pairs in range.
    const double chord_coeff =
        std::isfinite(range) ? 0.5 * (std::cosh(std::min(range, kMaxRadius)) - 1.0)
                             : kInf;
    std::vector<double> one_minus(n);
    for (std::size_t i = 0; i < n; i++) {
        const double nrm = pts[i].euclid_norm();
        one_minus[i] = 1.0 - nrm * nrm;
    }

    ClusterForest forest(n);
    std::vector<std::uint32_t> degree(n, 0);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = i + 1; j < n; j++) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < pts[i].coords.size(); c++) {
                const double t = pts[i].coords[c] - pts[j].coords[c];
                d2 += t * t;
            }
            if (d2 > chord_coeff * one_minus[i] * one_minus[j]) continue;
            const double r = hyp_dist(pts[i], pts[j]);
            const double p = m.phi_value(r, marks[i], marks[j]);
            if (p <= 0.0) continue;
            RandomStream prng = pair_base.split(i, j);
            if (prng.next_double() < p) {
                res.edges++;
                degree[i]++;
                degree[j]++;
                forest.unite(i, j);
            }
        }
    }
    res.mean_degree = n ? 2.0 * static_cast<double>(res.edges) / n : 0.0;
    if (res.core_points) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; i++)
            if (core[i]) s += degree[i];
        res.core_mean_degree = s / static_cast<double>(res.core_points);
    }

    // Cluster statistics keyed by root.
    std::map<std::size_t, std::uint64_t> size_of, core_of;
    std::map<std::size_t, bool> touches_shell;
    for (std::size_t i = 0; i < n; i++) {
        const std::size_t r = forest.find(i);
        size_of[r]++;
        if (core[i]) core_of[r]++;
        if (shell[i]) touches_shell[r] = true;
    }
    res.clusters = size_of.size();
    for (auto &[r, sz] : size_of) {
        res.largest_cluster = std::max(res.largest_cluster, sz);
        const int bin = sz ? static_cast<int>(std::floor(std::log2(static_cast<double>(sz)))) : 0;
        if (static_cast<std::size_t>(bin) >= res.size_histogram.size())
            res.size_histogram.resize(bin + 1, 0);
        res.size_histogram[bin]++;
    }
    for (auto &[r, c] : core_of)
        if (c > 0 && touches_shell.count(r)) res.crossing_clusters++;
    // Core share of the overall-largest cluster.  Ties break toward the
    // smallest root index: a core-count tie-break would bias the subcritical
    // regime, where many clusters share the maximal (tiny) size.
    std::uint64_t big_size = 0, big_core = 0;
    for (auto &[r, sz] : size_of) {
        if (sz > big_size) {
            big_size = sz;
            big_core = core_of.count(r) ? core_of[r] : 0;
        }
    }
    res.largest_core_fraction =
        res.core_points ? static_cast<double>(big_core) / res.core_points : 0.0;
    std::uint64_t richest = 0;
    for (auto &[r, c] : core_of) richest = std::max(richest, c);
    res.richest_core_fraction =
        res.core_points ? static_cast<double>(richest) / res.core_points : 0.0;

    // Two-point tallies over core pairs, distance-binned on [0, 2 R_core].
    res.bin_width = 2.0 * cfg.R_core / cfg.two_point_bins;
    res.pair_count.assign(cfg.two_point_bins, 0);
    res.conn_count.assign(cfg.two_point_bins, 0);
    std::vector<std::size_t> core_idx;
    for (std::size_t i = 0; i < n; i++)
        if (core[i]) core_idx.push_back(i);
    for (std::size_t a = 0; a < core_idx.size(); a++)
        for (std::size_t b = a + 1; b < core_idx.size(); b++) {
            const std::size_t i = core_idx[a], j = core_idx[b];
            const double r = hyp_dist(pts[i], pts[j]);
            int bin = static_cast<int>(r / res.bin_width);
            if (bin >= cfg.two_point_bins) bin = cfg.two_point_bins - 1;
            res.pair_count[bin]++;
            if (forest.find(i) == forest.find(j)) res.conn_count[bin]++;
        }
    return res;
}

BinnedEstimate two_point_estimate(const std::vector<PercResult> &results) {
    if (results.empty())
        throw std::invalid_argument("two_point_estimate: no replicas");
    const std::size_t bins = results.front().pair_count.size();
    const double w = results.front().bin_width;
    BinnedEstimate out;
    out.r_mid.resize(bins);
    out.freq.assign(bins, 0.0);
    out.ci_lo.assign(bins, 0.0);
    out.ci_hi.assign(bins, 0.0);
    out.samples.assign(bins, 0);
    out.empty.assign(bins, true);
    std::vector<std::uint64_t> conn(bins, 0);
    for (const PercResult &r : results)
        for (std::size_t b = 0; b < bins; b++) {
            out.samples[b] += r.pair_count[b];
            conn[b] += r.conn_count[b];
        }
    const double z = 1.959963984540054;  // 95% normal quantile
    for (std::size_t b = 0; b < bins; b++) {
        out.r_mid[b] = (b + 0.5) * w;
        const double nn = static_cast<double>(out.samples[b]);
        if (nn == 0.0) continue;
        out.empty[b] = false;
        const double p = static_cast<double>(conn[b]) / nn;
        out.freq[b] = p;
        // Wilson interval
        const double den = 1.0 + z * z / nn;
        const double centre = (p + z * z / (2.0 * nn)) / den;
        const double half =
            z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / den;
        out.ci_lo[b] = std::max(0.0, centre - half);
        out.ci_hi[b] = std::min(1.0, centre + half);
    }
    return out;
}

std::uint64_t crossing_cluster_count(const PercResult &r) {
    return r.crossing_clusters;
}

SusceptibilityEstimate susceptibility_proxy(const std::vector<PercResult> &rs) {
    SusceptibilityEstimate out;
    std::vector<double> vals;
    for (const PercResult &r : rs) {
        if (r.core_points == 0) continue;
        // Size-biased mean: the two-point tallies only carry core pairs, so
        // recover sum over core points of its cluster's core size via
        // connected core pairs: size-biased core-cluster size
        //   = 1 + 2 * (connected core pairs) / core_points.
        std::uint64_t conn = 0;
        for (std::uint64_t c : r.conn_count) conn += c;
        vals.push_back(1.0 + 2.0 * static_cast<double>(conn) /
                                 static_cast<double>(r.core_points));
    }
    if (vals.empty()) {
        out.no_core_points = true;
        return out;
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = vals.size() > 1 ? var / (vals.size() - 1) : 0.0;
    out.value = mean;
    out.ci_half_width = 1.959963984540054 * std::sqrt(var / vals.size());
    return out;
}

int thread_count() {
    if (const char *env = std::getenv("HRCM_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

std::vector<PercResult> run_replicas(const PercConfig &cfg) {
    cfg.validate();
    std::vector<PercResult> out(cfg.replicas);
    const int threads = std::min(thread_count(), cfg.replicas);
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex err_mutex;
    auto worker = [&]() {
        for (;;) {
            const int id = next.fetch_add(1);
            if (id >= cfg.replicas || failed.load()) break;
            try {
                out[id] = run_replica(cfg, id);
            } catch (const std::exception &e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                failed.store(true);
                if (error.empty()) error = e.what();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; t++) pool.emplace_back(worker);
        for (std::thread &t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("replica failed: " + error);
    return out;
}

std::vector<SweepRow> sweep(const PercConfig &base,
                            const std::vector<double> &lambdas,
                            const std::vector<double> &Ls,
                            bool annotate_bounds, double theta, double eps) {
    if (lambdas.empty() || Ls.empty())
        throw std::invalid_argument("sweep: empty grid");
    // Threshold bounds depend only on (model, L): compute once per L.
    std::map<double, ThresholdBounds> bounds;
    if (annotate_bounds)
        for (double L : Ls)
            if (!bounds.count(L))
                bounds.emplace(L, certify_nonuniqueness(base.model, L, theta, eps));

    std::vector<SweepRow> rows;
    for (double L : Ls)
        for (double lam : lambdas) {
            SweepRow row;
            row.L = L;
            row.lambda = lam;
            row.replicas = base.replicas;
            try {
                PercConfig cfg = base;
                cfg.model = base.model.with_L(L);
                cfg.lambda = lam;
                const std::vector<PercResult> rs = run_replicas(cfg);
                std::vector<double> crossing;
                for (const PercResult &r : rs) {
                    row.mean_points += static_cast<double>(r.points);
                    row.mean_degree += r.mean_degree;
                    row.core_mean_degree += r.core_mean_degree;
                    row.mean_largest_core_fraction += r.largest_core_fraction;
                    row.mean_crossing += static_cast<double>(r.crossing_clusters);
                    crossing.push_back(static_cast<double>(r.crossing_clusters));
                }
                const double nr = static_cast<double>(rs.size());
                row.mean_points /= nr;
                row.mean_degree /= nr;
                row.core_mean_degree /= nr;
                row.mean_largest_core_fraction /= nr;
                row.mean_crossing /= nr;
                std::sort(crossing.begin(), crossing.end());
                row.median_crossing =
                    crossing.size() % 2
                        ? crossing[crossing.size() / 2]
                        : 0.5 * (crossing[crossing.size() / 2 - 1] +
                                 crossing[crossing.size() / 2]);
                row.susceptibility = susceptibility_proxy(rs).value;
                if (annotate_bounds) {
                    const ThresholdBounds &b = bounds.at(L);
                    row.lambda_u_lower = b.lambda_u_lower;
                    row.lambda_c_upper = b.lambda_c_upper;
                    row.bounds_vacuous = b.vacuous;
                }
            } catch (const std::exception &e) {
                row.error = e.what();
            }
            rows.push_back(row);
        }
    return rows;
}

PowerLawFit fit_power_law(const std::vector<double> &xs,
                          const std::vector<double> &ys) {
    if (xs.size() != ys.size() || xs.size() < 4)
        throw std::invalid_argument("fit_power_law: need >= 4 points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); i++) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_power_law: nonpositive data");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); i++) { mx += lx[i]; my += ly[i]; }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); i++) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: degenerate x");
    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); i++) {
        const double resid = (ly[i] - my) - fit.exponent * (lx[i] - mx);
        ss += resid * resid;
    }
    fit.stderr_ = std::sqrt(ss / ((n - 2.0) * sxx));
    return fit;
}

} // namespace hrcm
