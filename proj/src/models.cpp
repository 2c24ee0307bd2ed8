#include "hrcm/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hrcm/quadrature.hpp"

namespace hrcm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/** log(sinh x) without overflow, valid for x > 0. */
double log_sinh(double x) {
    return x + std::log1p(-std::exp(-2.0 * x)) - M_LN2;
}

} // namespace

// ---------------------------------------------------------------------------
// MarkSpace
// ---------------------------------------------------------------------------

MarkSpace MarkSpace::finite(const std::vector<std::pair<double, double>> &vw) {
    if (vw.empty()) throw std::invalid_argument("MarkSpace: empty mark set");
    MarkSpace m;
    m.kind = MarkKind::Finite;
    double total = 0.0;
    for (auto &[v, w] : vw) {
        if (!(w > 0.0)) throw std::invalid_argument("MarkSpace: weight <= 0");
        m.values.push_back(v);
        m.weights.push_back(w);
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("MarkSpace: weights must sum to 1");
    for (std::size_t i = 1; i < m.values.size(); i++)
        if (m.values[i] <= m.values[i - 1])
            throw std::invalid_argument("MarkSpace: labels must be distinct and increasing");
    return m;
}

MarkSpace MarkSpace::unit_interval(int n) {
    if (n < 1) throw std::invalid_argument("MarkSpace: grid size < 1");
    MarkSpace m;
    m.kind = MarkKind::UnitInterval;
    m.grid_size = n;
    const GaussLegendre &q = gl_rule(n);
    for (int i = 0; i < n; i++) {
        m.values.push_back(0.5 * (1.0 + q.x[i]));
        m.weights.push_back(0.5 * q.w[i]);
    }
    return m;
}

MarkSpace MarkSpace::unit_interval_graded(int cells, int per_cell) {
    if (cells < 2 || per_cell < 1)
        throw std::invalid_argument("MarkSpace: bad graded grid parameters");
    MarkSpace m;
    m.kind = MarkKind::UnitInterval;
    m.grid_size = cells * per_cell;
    m.graded = true;
    m.graded_cells = cells;
    m.graded_per_cell = per_cell;
    const GaussLegendre &q = gl_rule(per_cell);
    // Geometric cells [2^{-k-1}, 2^{-k}] plus a terminal cell reaching 0
    for (int k = cells - 1; k >= 0; k--) {
        const double hi = std::ldexp(1.0, -k);
        const double lo = (k == cells - 1) ? 0.0 : 0.5 * hi;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int i = 0; i < per_cell; i++) {
            m.values.push_back(mid + half * q.x[i]);
            m.weights.push_back(half * q.w[i]);
        }
    }
    return m;
}

std::size_t MarkSpace::nearest_index(double mark) const {
    std::size_t best = 0;
    double dist = std::fabs(values[0] - mark);
    for (std::size_t i = 1; i < values.size(); i++) {
        const double d = std::fabs(values[i] - mark);
        if (d < dist) { dist = d; best = i; }
    }
    return best;
}

std::size_t MarkSpace::index_of(double mark) const {
    for (std::size_t i = 0; i < values.size(); i++) {
        const double tol = 1e-12 * std::max(1.0, std::fabs(values[i]));
        if (std::fabs(values[i] - mark) <= tol) return i;
    }
    throw std::invalid_argument("MarkSpace: unknown mark value");
}

double sample_mark(const MarkSpace &m, RandomStream &rng) {
    if (m.kind == MarkKind::UnitInterval) {
        double u;
        do { u = rng.next_double(); } while (u == 0.0);
        return u;  // Lebesgue law on (0,1), independent of the grid
    }
    const double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i < m.values.size(); i++) {
        acc += m.weights[i];
        if (u < acc) return m.values[i];
    }
    return m.values.back();
}

// ---------------------------------------------------------------------------
// ScalingFunction
// ---------------------------------------------------------------------------

ScalingFunction ScalingFunction::identity(int d) {
    ScalingFunction s;
    s.kind_ = ScalingKind::Identity;
    s.d_ = d;
    return s;
}

ScalingFunction ScalingFunction::volume_linear(int d, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("scaling: L <= 0");
    ScalingFunction s;
    s.kind_ = L == 1.0 ? ScalingKind::Identity : ScalingKind::VolumeLinear;
    s.d_ = d;
    s.L_ = L;
    return s;
}

ScalingFunction ScalingFunction::length_linear(int d, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("scaling: L <= 0");
    ScalingFunction s;
    s.kind_ = L == 1.0 ? ScalingKind::Identity : ScalingKind::LengthLinear;
    s.d_ = d;
    s.L_ = L;
    return s;
}

void ScalingFunction::build_table() {
    bp_r_.assign(bp_y_.size(), 0.0);
    for (std::size_t i = 1; i < bp_y_.size(); i++)
        bp_r_[i] = bp_r_[i - 1] + slope_[i - 1] * (bp_y_[i] - bp_y_[i - 1]);
}

ScalingFunction ScalingFunction::annulus(int d, double L) {
    if (!(L >= 2.0)) throw std::invalid_argument("annulus scaling: L >= 2 required");
    ScalingFunction s;
    s.kind_ = ScalingKind::AnnulusExample;
    s.d_ = d;
    s.L_ = L;
    s.a_L_ = std::exp(-2.0 * L * (d - 1));
    if (s.a_L_ <= 0.0)
        throw std::overflow_error("annulus scaling: a_L underflows at this L");
    // Slope L to 1, then a_L until rejoining the identity continuously at
    // r* solving L + a_L (r*-1) = r*.
    const double rstar = (L - s.a_L_) / (1.0 - s.a_L_);
    s.bp_y_ = {0.0, 1.0, rstar};
    s.slope_ = {L, s.a_L_, 1.0};
    s.build_table();
    return s;
}

ScalingFunction ScalingFunction::many_annuli(int d, double L, double R_param) {
    if (!(R_param > 0.0 && R_param < 1.0))
        throw std::invalid_argument("many-annuli scaling: R in (0,1) required");
    if (!(L >= R_param))
        throw std::invalid_argument("many-annuli scaling: L >= R required");
    // Knots: 0, R/L, dyadic points of (R/L, 1), 1.  On (2^{-2i-1}, 2^{-2i})
    // (adjacency support) the slope is the small a_L; on the gap
    // (2^{-2i-2}, 2^{-2i-1}) it is 2^{2i+2}; below R/L it is L.
    const double rl = R_param / L;
    std::vector<double> knots = {0.0, rl};
    for (int j = 0; std::ldexp(1.0, -j) > rl && j < 1060; j++) {
        const double p = std::ldexp(1.0, -j);
        if (p < 1.0 && p > rl) knots.push_back(p);
    }
    knots.push_back(1.0);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    auto slope_for = [&](double lo, double hi, double a_L) {
        const double mid = 0.5 * (lo + hi);
        if (mid < rl) return L;
        if (mid >= 1.0) return 1.0;
        const int j = static_cast<int>(std::floor(-std::log2(mid)));
        if (j % 2 == 0) return a_L;          // support annulus, j = 2i
        return std::ldexp(1.0, j + 1);       // gap, slope 2^{2i+2}
    };

    // Dummy ladder (slope 1 on the support annuli) fixes a_L via its
    // sinh-mass over [1/3, 1].
    ScalingFunction dummy;
    dummy.kind_ = ScalingKind::ManyAnnuliExample;
    dummy.d_ = d;
    dummy.bp_y_ = knots;
    for (std::size_t i = 0; i + 1 < knots.size(); i++)
        dummy.slope_.push_back(slope_for(knots[i], knots[i + 1], 1.0));
    dummy.slope_.push_back(1.0);  // identity slope beyond the last knot
    dummy.build_table();
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < dummy.bp_y_.size(); i++) {
        const double lo = std::max(dummy.bp_y_[i], 1.0 / 3.0);
        const double hi = std::min(dummy.bp_y_[i + 1], 1.0);
        if (hi <= lo) continue;
        mass += gl_integrate(
            [&](double y) { return std::pow(std::sinh(dummy.forward(y)), d - 1); },
            lo, hi, 32);
    }
    // Any o(1/I_L) choice works; 1/(L^2 I_L) keeps the truncated share
    // visibly bounded away from zero already at small L.
    const double a_L = 1.0 / (L * L * mass);

    ScalingFunction s;
    s.kind_ = ScalingKind::ManyAnnuliExample;
    s.d_ = d;
    s.L_ = L;
    s.R_param_ = R_param;
    s.a_L_ = a_L;
    s.bp_y_ = knots;
    for (std::size_t i = 0; i + 1 < knots.size(); i++)
        s.slope_.push_back(slope_for(knots[i], knots[i + 1], a_L));
    s.slope_.push_back(1.0);  // identity slope beyond 1
    s.build_table();
    return s;
}

double ScalingFunction::forward(double r) const {
    if (!(r >= 0.0)) throw std::invalid_argument("scaling: r < 0");
    switch (kind_) {
        case ScalingKind::Identity:
            return r;
        case ScalingKind::VolumeLinear:
            return volume_fn_inv(Dimension(d_), L_ * volume_fn(Dimension(d_), r));
        case ScalingKind::LengthLinear:
            return L_ * r;
        default: {
            auto it = std::upper_bound(bp_y_.begin(), bp_y_.end(), r);
            std::size_t k = it - bp_y_.begin();
            if (k == 0) return r * slope_.front();
            k--;
            if (k >= slope_.size()) k = slope_.size() - 1;
            return bp_r_[k] + slope_[k] * (r - bp_y_[k]);
        }
    }
}

double ScalingFunction::inverse(double r) const {
    if (!(r >= 0.0)) throw std::invalid_argument("scaling: r < 0");
    switch (kind_) {
        case ScalingKind::Identity:
            return r;
        case ScalingKind::VolumeLinear:
            return volume_fn_inv(Dimension(d_), volume_fn(Dimension(d_), r) / L_);
        case ScalingKind::LengthLinear:
            return r / L_;
        default: {
            auto it = std::upper_bound(bp_r_.begin(), bp_r_.end(), r);
            std::size_t k = it - bp_r_.begin();
            if (k == 0) return r / slope_.front();
            k--;
            if (k >= slope_.size()) k = slope_.size() - 1;
            return bp_y_[k] + (r - bp_r_[k]) / slope_[k];
        }
    }
}

double ScalingFunction::slope_at(double y) const {
    if (!piecewise())
        throw std::logic_error("scaling: slope_at is for piecewise variants");
    auto it = std::upper_bound(bp_y_.begin(), bp_y_.end(), y);
    std::size_t k = it - bp_y_.begin();
    if (k > 0) k--;
    if (k >= slope_.size()) k = slope_.size() - 1;
    return slope_[k];
}

ScalingFunction ScalingFunction::with_L(double L) const {
    switch (kind_) {
        case ScalingKind::Identity:
            return L == 1.0 ? *this : volume_linear(d_, L);
        case ScalingKind::VolumeLinear:
            return volume_linear(d_, L);
        case ScalingKind::LengthLinear:
            return length_linear(d_, L);
        case ScalingKind::AnnulusExample:
            return annulus(d_, L);
        case ScalingKind::ManyAnnuliExample:
            return many_annuli(d_, L, R_param_);
    }
    throw std::logic_error("scaling: unknown kind");
}

// ---------------------------------------------------------------------------
// Profiles and kernels
// ---------------------------------------------------------------------------

double ProfileSpec::eval(double r) const {
    if (r < 0.0) throw std::invalid_argument("profile: r < 0");
    switch (kind) {
        case ProfileKind::Indicator:
            return r < cut ? 1.0 : 0.0;
        case ProfileKind::ExpDecay:
            return std::exp(-rate * r);
        case ProfileKind::PowerTail:
            return std::pow(1.0 + r / scale, -exponent);
        case ProfileKind::Table: {
            if (table.empty() || r >= table.back().first) return 0.0;
            if (r <= table.front().first) return table.front().second;
            auto it = std::lower_bound(
                table.begin(), table.end(), std::make_pair(r, -1.0));
            const auto [r1, v1] = *it;
            const auto [r0, v0] = *(it - 1);
            return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
        }
    }
    throw std::logic_error("profile: unknown kind");
}

double ProfileSpec::support() const {
    switch (kind) {
        case ProfileKind::Indicator: return cut;
        case ProfileKind::ExpDecay:
        case ProfileKind::PowerTail: return kInf;
        case ProfileKind::Table: return table.empty() ? 0.0 : table.back().first;
    }
    throw std::logic_error("profile: unknown kind");
}

bool ProfileSpec::tail_integrable(double growth) const {
    switch (kind) {
        case ProfileKind::Indicator:
        case ProfileKind::Table:
            return true;                  // compact support
        case ProfileKind::ExpDecay:
            return rate > growth;         // equality diverges (poly factors)
        case ProfileKind::PowerTail:
            return growth < 0.0;          // power decay never beats exp growth
    }
    throw std::logic_error("profile: unknown kind");
}

double KernelSpec::eval(double a, double b) const {
    if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0))
        throw std::invalid_argument("kernel: marks must lie in (0,1)");
    switch (kind) {
        case KernelKind::Product:    return std::pow(a * b, -zeta);
        case KernelKind::Strong:     return std::pow(std::min(a, b), -zeta);
        case KernelKind::Sum:        return std::pow(a, -zeta) + std::pow(b, -zeta);
        case KernelKind::Weak:       return std::pow(std::max(a, b), -1.0 - zeta);
        case KernelKind::PrefAttach:
            return std::pow(std::max(a, b), -1.0 + zeta) *
                   std::pow(std::min(a, b), -zeta);
        case KernelKind::Constant:   return value;
    }
    throw std::logic_error("kernel: unknown kind");
}

double kernel_norm_analytic(const KernelSpec &k) {
    switch (k.kind) {
        case KernelKind::Product:
            return k.zeta < 0.5 ? 1.0 / (1.0 - 2.0 * k.zeta) : kInf;
        case KernelKind::Strong:
            // Hilbert-Schmidt bound, finite exactly when zeta < 1/2
            return k.zeta < 0.5
                       ? std::sqrt(1.0 / ((1.0 - 2.0 * k.zeta) * (1.0 - k.zeta)))
                       : kInf;
        case KernelKind::Sum:
            // sandwich kappa_strong <= kappa_sum <= 2 kappa_strong
            return k.zeta < 0.5
                       ? 2.0 * std::sqrt(1.0 / ((1.0 - 2.0 * k.zeta) * (1.0 - k.zeta)))
                       : kInf;
        case KernelKind::Weak:
        case KernelKind::PrefAttach:
            return kInf;  // divergent for every zeta > 0
        case KernelKind::Constant:
            return k.value;
    }
    throw std::logic_error("kernel: unknown kind");
}

// ---------------------------------------------------------------------------
// AdjacencyModel
// ---------------------------------------------------------------------------

void AdjacencyModel::validate() const {
    Dimension dim(d);  // range check
    if (marks.size() == 0) throw std::invalid_argument("model: empty mark space");
    double total = 0.0;
    for (double w : marks.weights) total += w;
    if (std::fabs(total - 1.0) > 1e-10)
        throw std::invalid_argument("model: mark weights must sum to 1");
    if (scaling.dim() != d)
        throw std::invalid_argument("model: scaling dimension mismatch");
    switch (base) {
        case BaseKind::BooleanDisc:
            for (double v : marks.values)
                if (!(v > 0.0))
                    throw std::invalid_argument("model: Boolean radii must be > 0");
            break;
        case BaseKind::WeightDependent:
            if (marks.kind != MarkKind::UnitInterval &&
                (marks.values.front() <= 0.0 || marks.values.back() >= 1.0))
                throw std::invalid_argument(
                    "model: weight-dependent marks must lie in (0,1)");
            // The inner mark-scaling is only defined jointly with an outer
            // volume-linear (or trivial) rescaling.
            if (scaling.kind() != ScalingKind::Identity &&
                scaling.kind() != ScalingKind::VolumeLinear)
                throw std::invalid_argument(
                    "model: weight-dependent base requires volume-linear scaling");
            break;
        case BaseKind::RadialTable: {
            const std::size_t n = marks.size();
            if (tables.size() != 1 && tables.size() != n * (n + 1) / 2)
                throw std::invalid_argument("model: bad radial-table count");
            for (auto &t : tables)
                for (auto &[r, v] : t)
                    if (v < 0.0 || v > 1.0)
                        throw std::invalid_argument("model: table values outside [0,1]");
            break;
        }
        case BaseKind::DyadicAnnuli:
            if (marks.size() != 1)
                throw std::invalid_argument("model: dyadic-annuli base is markless");
            break;
    }
}

namespace {

/** Upper-triangle index for per-pair radial tables. */
std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + j;
}

double interp_table(const std::vector<std::pair<double, double>> &t, double r) {
    if (t.empty() || r >= t.back().first) return 0.0;
    if (r <= t.front().first) return t.front().second;
    auto it = std::lower_bound(t.begin(), t.end(), std::make_pair(r, -1.0));
    const auto [r1, v1] = *it;
    const auto [r0, v0] = *(it - 1);
    return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
}

} // namespace

double AdjacencyModel::phi_base(double r, std::size_t i, std::size_t j) const {
    const double a = marks.values[i], b = marks.values[j];
    switch (base) {
        case BaseKind::BooleanDisc:
            return r < a + b ? 1.0 : 0.0;
        case BaseKind::WeightDependent: {
            // rho(s_kappa^{-1}(r)) with s_m(r) = V_d^{-1}(m V_d(r))
            const double m = kernel.eval(a, b);
            const double y =
                volume_fn_inv(Dimension(d), volume_fn(Dimension(d), r) / m);
            return profile.eval(y);
        }
        case BaseKind::RadialTable:
            return interp_table(
                tables[tables.size() == 1 ? 0 : pair_index(marks.size(), i, j)], r);
        case BaseKind::DyadicAnnuli: {
            // 1 on the annuli (2^{-2i-1}, 2^{-2i}), i >= 0
            if (r >= 1.0 || r <= 0.0) return 0.0;
            const int k = static_cast<int>(std::floor(-std::log2(r)));
            return k % 2 == 0 ? 1.0 : 0.0;
        }
    }
    throw std::logic_error("model: unknown base");
}

double AdjacencyModel::phi_scaled(double r, std::size_t i, std::size_t j) const {
    return phi_base(scaling.inverse(r), i, j);
}

double AdjacencyModel::phi_value(double r, double a, double b) const {
    const double y = scaling.inverse(r);
    switch (base) {
        case BaseKind::BooleanDisc:
            return y < a + b ? 1.0 : 0.0;
        case BaseKind::WeightDependent: {
            const double m = kernel.eval(a, b);
            const double yy =
                volume_fn_inv(Dimension(d), volume_fn(Dimension(d), y) / m);
            return profile.eval(yy);
        }
        case BaseKind::RadialTable:
            return phi_base(y, marks.nearest_index(a), marks.nearest_index(b));
        case BaseKind::DyadicAnnuli: {
            if (y >= 1.0 || y <= 0.0) return 0.0;
            const int k = static_cast<int>(std::floor(-std::log2(y)));
            return k % 2 == 0 ? 1.0 : 0.0;
        }
    }
    throw std::logic_error("model: unknown base");
}

double AdjacencyModel::base_support(std::size_t i, std::size_t j) const {
    const double a = marks.values[i], b = marks.values[j];
    switch (base) {
        case BaseKind::BooleanDisc:
            return a + b;
        case BaseKind::WeightDependent: {
            const double s = profile.support();
            if (!std::isfinite(s)) return kInf;
            const double m = kernel.eval(a, b);
            return volume_fn_inv(Dimension(d), m * volume_fn(Dimension(d), s));
        }
        case BaseKind::RadialTable: {
            const auto &t =
                tables[tables.size() == 1 ? 0 : pair_index(marks.size(), i, j)];
            return t.empty() ? 0.0 : t.back().first;
        }
        case BaseKind::DyadicAnnuli:
            return 1.0;
    }
    throw std::logic_error("model: unknown base");
}

AdjacencyModel AdjacencyModel::with_L(double L) const {
    AdjacencyModel m = *this;
    m.scaling = scaling.with_L(L);
    return m;
}

double eval_phi(const AdjacencyModel &m, double r, double a, double b) {
    if (!(r >= 0.0)) throw std::invalid_argument("eval_phi: r < 0");
    return m.phi_value(r, a, b);
}

// ---------------------------------------------------------------------------
// Radial integration engine
// ---------------------------------------------------------------------------

namespace {

/** Structure knots of the base function in reference coordinates within
 * (lo, hi): points where phi(.; a_i, a_j) kinks or jumps. */
std::vector<double> base_knots(const AdjacencyModel &m, std::size_t i,
                               std::size_t j, double lo, double hi) {
    std::vector<double> ks;
    auto add = [&](double y) { if (y > lo && y < hi) ks.push_back(y); };
    switch (m.base) {
        case BaseKind::BooleanDisc:
            add(m.marks.values[i] + m.marks.values[j]);
            break;
        case BaseKind::WeightDependent: {
            const double mker = m.kernel.eval(m.marks.values[i], m.marks.values[j]);
            auto map = [&](double y) {
                return volume_fn_inv(Dimension(m.d),
                                     mker * volume_fn(Dimension(m.d), y));
            };
            if (m.profile.kind == ProfileKind::Indicator) {
                add(map(m.profile.cut));
            } else if (m.profile.kind == ProfileKind::Table) {
                for (auto &[r, v] : m.profile.table) add(map(r));
            }
            break;
        }
        case BaseKind::RadialTable: {
            const auto &t = m.tables[m.tables.size() == 1
                                         ? 0
                                         : pair_index(m.marks.size(), i, j)];
            for (auto &[r, v] : t) add(r);
            break;
        }
        case BaseKind::DyadicAnnuli:
            for (int k = 0; k < 1060; k++) {
                const double p = std::ldexp(1.0, -k);
                if (p <= lo || p < 1e-14) break;
                add(p);
            }
            break;
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

} // namespace

double radial_integral(const AdjacencyModel &m, std::size_t i, std::size_t j,
                       double r_lo, double r_hi,
                       const std::function<double(double)> *weight,
                       double rel_tol, int phi_power) {
    const int d = m.d;
    auto wfun = [&](double r) { return weight ? (*weight)(r) : 1.0; };
    auto powphi = [&](double p) {
        return phi_power == 1 ? p : std::pow(p, phi_power);
    };
    const double support = m.base_support(i, j);

    if (m.scaling.piecewise()) {
        // Integrate in reference coordinates: within each scaling segment the
        // map is linear, so knots of the base and of the scaling tile the
        // domain into smooth pieces.
        if (!std::isfinite(support))
            throw std::invalid_argument(
                "radial_integral: non-compact base with piecewise scaling");
        double y_lo = m.scaling.inverse(r_lo);
        double y_hi = std::isfinite(r_hi)
                          ? std::min(m.scaling.inverse(r_hi), support)
                          : support;
        if (y_hi <= y_lo) return 0.0;
        std::vector<double> cuts = base_knots(m, i, j, y_lo, y_hi);
        for (double y : m.scaling.knots_y())
            if (y > y_lo && y < y_hi) cuts.push_back(y);
        cuts.push_back(y_lo);
        cuts.push_back(y_hi);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        double total = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); k++) {
            const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
            if (m.phi_base(mid, i, j) == 0.0 &&
                m.base != BaseKind::RadialTable)  // indicator-type shortcut
                continue;
            const double slope = m.scaling.slope_at(mid);
            total += adaptive_integrate(
                [&](double y) {
                    const double r = m.scaling.forward(y);
                    return powphi(m.phi_base(y, i, j)) *
                           std::pow(std::sinh(r), d - 1) * slope * wfun(r);
                },
                cuts[k], cuts[k + 1], rel_tol);
        }
        return total;
    }

    // Smooth scalings: integrate in scaled coordinates.
    double hi = r_hi;
    if (std::isfinite(support)) {
        const double s_scaled = m.scaling.forward(support);
        hi = std::isfinite(r_hi) ? std::min(r_hi, s_scaled) : s_scaled;
    }
    auto integrand = [&](double r) {
        if (r <= 0.0) return 0.0;
        return powphi(m.phi_scaled(r, i, j)) * std::pow(std::sinh(r), d - 1) *
               wfun(r);
    };
    auto piecewise_adapt = [&](double lo2, double hi2) {
        std::vector<double> cuts;
        for (double y : base_knots(m, i, j, m.scaling.inverse(lo2),
                                   m.scaling.inverse(hi2)))
            cuts.push_back(m.scaling.forward(y));
        cuts.push_back(lo2);
        cuts.push_back(hi2);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        double tot = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); k++)
            tot += adaptive_integrate(integrand, cuts[k], cuts[k + 1], rel_tol);
        return tot;
    };

    if (std::isfinite(hi)) return piecewise_adapt(r_lo, hi);

    // Non-compact support: expanding windows until the contribution fades.
    // Callers are expected to have run the divergence test first.
    double total = 0.0, cur = r_lo;
    const double win = 4.0, cap = 690.0 / (d - 1);
    for (int k = 0; k < 400; k++) {
        const double next = std::min(cur + win, cap);
        const double part = piecewise_adapt(cur, next);
        total += part;
        cur = next;
        if (cur >= cap) break;
        if (k >= 2 && std::fabs(part) <= 1e-13 * std::fabs(total)) break;
    }
    return total;
}

bool radial_integral_diverges(const AdjacencyModel &m, std::size_t i,
                              std::size_t j, double growth, int phi_power) {
    if (std::isfinite(m.base_support(i, j))) return false;
    // Only the weight-dependent base can have unbounded support; the inner
    // mark scaling shifts the profile argument by a constant and cannot
    // change the exponential decay rate.
    if (m.base == BaseKind::WeightDependent) {
        ProfileSpec p = m.profile;
        if (p.kind == ProfileKind::ExpDecay) p.rate *= phi_power;
        if (p.kind == ProfileKind::PowerTail) p.exponent *= phi_power;
        return !p.tail_integrable(growth);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Degree functionals
// ---------------------------------------------------------------------------

bool DegreeMatrix::any_infinite() const {
    for (double v : values)
        if (!std::isfinite(v)) return true;
    return false;
}

double DegreeMatrix::max_entry() const {
    double mx = 0.0;
    for (double v : values) mx = std::max(mx, v);
    return mx;
}

DegreeMatrix degree_matrix(const AdjacencyModel &m, double rel_tol) {
    m.validate();
    const std::size_t n = m.marks.size();
    const double surf = sphere_surface(m.d);
    DegreeMatrix D;
    D.n = n;
    D.weights = m.marks.weights;
    D.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; i++)
        for (std::size_t j = i; j < n; j++) {
            double v;
            if (radial_integral_diverges(m, i, j, m.d - 1))
                v = kInf;
            else
                v = surf * radial_integral(m, i, j, 0.0, kInf, nullptr, rel_tol);
            D.at(i, j) = D.at(j, i) = v;
        }
    return D;
}

DegreeMatrix degree_k_matrix(const DegreeMatrix &D, int k) {
    if (k < 1) throw std::invalid_argument("degree_k_matrix: k < 1");
    if (D.any_infinite())
        throw std::invalid_argument("degree_k_matrix: infinite entries");
    DegreeMatrix out = D;
    for (int step = 1; step < k; step++) {
        DegreeMatrix next = out;
        for (std::size_t i = 0; i < D.n; i++)
            for (std::size_t j = 0; j < D.n; j++) {
                double s = 0.0;
                for (std::size_t c = 0; c < D.n; c++)
                    s += D.at(i, c) * D.weights[c] * out.at(c, j);
                next.at(i, j) = s;
            }
        out = next;
    }
    return out;
}

RatioSeries check_ratio_condition(const AdjacencyModel &m, double R,
                                  const std::vector<double> &Ls) {
    if (!(R > 0.0)) throw std::invalid_argument("check_ratio_condition: R <= 0");
    RatioSeries out;
    const std::size_t n = m.marks.size();
    for (double L : Ls) {
        const AdjacencyModel mm = m.with_L(L);
        double num = 0.0, den = 0.0;
        bool den_inf = false;
        for (std::size_t i = 0; i < n; i++)
            for (std::size_t j = i; j < n; j++) {
                num = std::max(num, radial_integral(mm, i, j, 0.0, R));
                if (radial_integral_diverges(mm, i, j, mm.d - 1))
                    den_inf = true;
                else
                    den = std::max(den, radial_integral(mm, i, j, 0.0, kInf));
            }
        out.L.push_back(L);
        if (den_inf) {
            out.ratio.push_back(0.0);  // finite numerator over infinite mass
            out.undefined.push_back(false);
        } else if (den == 0.0) {
            out.ratio.push_back(0.0);
            out.undefined.push_back(true);
        } else {
            out.ratio.push_back(num / den);
            out.undefined.push_back(false);
        }
    }
    return out;
}

double example_scaling_expected_degree(double L, Dimension dim, double lambda) {
    if (lambda == 0.0) return 0.0;
    const int d = dim.d;
    const ScalingFunction s = ScalingFunction::annulus(d, L);
    const double log_a = -2.0 * L * (d - 1);
    // lambda S_{d-1} integral_1^2 a_L sinh^{d-1}(L + a_L (y-1)) dy, in log
    // space: the a_L e^{(d-1)L} product is representable even when the
    // factors separately under/overflow.
    const GaussLegendre &q = gl_rule(64);
    double lse_max = -kInf;
    std::vector<double> terms(64);
    for (int k = 0; k < 64; k++) {
        const double y = 1.5 + 0.5 * q.x[k];
        const double sig = s.forward(y);
        terms[k] = log_a + (d - 1) * log_sinh(sig) + std::log(0.5 * q.w[k]);
        lse_max = std::max(lse_max, terms[k]);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - lse_max);
    return lambda * sphere_surface(d) * std::exp(lse_max) * acc;
}

} // namespace hrcm
