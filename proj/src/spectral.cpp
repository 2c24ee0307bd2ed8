#include "hrcm/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hrcm/quadrature.hpp"
#include "hrcm/rng.hpp"

namespace hrcm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

QdEvaluator::QdEvaluator(Dimension d, int base_order)
    : d_(d.d), order_(base_order) {
    if (base_order < 8) throw std::invalid_argument("QdEvaluator: order < 8");
}

/** Shared panel layout: [0, pi] split geometrically toward 0 so that the
 * near-singular peak of width ~e^{-r} at theta = 0 is resolved at every r
 * in the working range.  `scale` is the hyperbolic distance r. */
static std::vector<double> theta_panels(double r) {
    const int extra = static_cast<int>(std::ceil((r + 4.0) / M_LN2)) + 2;
    std::vector<double> cuts;
    cuts.push_back(0.0);
    for (int k = extra; k >= 0; k--) cuts.push_back(M_PI * std::ldexp(1.0, -k));
    return cuts;
}

double QdEvaluator::q_hyp_order(double r, int order) const {
    // Q_d(r) = (S_{d-2}/S_{d-1}) int_0^pi (sin t)^{d-2}
    //          (e^{-r} + 2 sinh r sin^2(t/2))^{-(d-1)/2} dt
    // The base never cancels, unlike the ball form at rho -> 1.
    const double pre = sphere_surface(d_ - 1) / sphere_surface(d_);
    const double emr = std::exp(-r), sh2 = 2.0 * std::sinh(r);
    const std::vector<double> cuts = theta_panels(r);
    const GaussLegendre &q = gl_rule(order);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); p++) {
        const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
        const double half = 0.5 * (cuts[p + 1] - cuts[p]);
        double part = 0.0;
        for (int i = 0; i < order; i++) {
            const double t = mid + half * q.x[i];
            const double st = std::sin(0.5 * t);
            const double base = emr + sh2 * st * st;
            part += q.w[i] * std::pow(std::sin(t), d_ - 2) *
                    std::pow(base, -0.5 * (d_ - 1));
        }
        total += part * half;
    }
    return pre * total;
}

double QdEvaluator::q_hyp(double r) const {
    if (!(r >= 0.0)) throw std::invalid_argument("q_hyp: r < 0");
    if (r == 0.0) return 1.0;
    int ord = std::max(8, order_ / 16);
    double prev = q_hyp_order(r, ord);
    while (ord < 1024) {
        ord *= 2;
        const double cur = q_hyp_order(r, ord);
        if (std::fabs(cur - prev) <= 1e-10 * std::fabs(cur)) return cur;
        prev = cur;
    }
    return prev;
}

std::complex<double> QdEvaluator::q_ball_order(double rho, double s,
                                               int order) const {
    const double r = 2.0 * std::atanh(rho);
    const double pre = sphere_surface(d_ - 1) / sphere_surface(d_);
    const double emr = std::exp(-r), sh2 = 2.0 * std::sinh(r);
    const std::vector<double> cuts = theta_panels(r);
    const GaussLegendre &q = gl_rule(order);
    std::complex<double> total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); p++) {
        const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
        const double half = 0.5 * (cuts[p + 1] - cuts[p]);
        std::complex<double> part = 0.0;
        for (int i = 0; i < order; i++) {
            const double t = mid + half * q.x[i];
            const double st = std::sin(0.5 * t);
            const double lbase = std::log(emr + sh2 * st * st);
            // base^{-(d-1)/2 + i s}: modulus base^{-(d-1)/2}, phase s log base
            const std::complex<double> f =
                std::exp(std::complex<double>(-0.5 * (d_ - 1) * lbase, s * lbase));
            part += q.w[i] * std::pow(std::sin(t), d_ - 2) * f;
        }
        total += part * half;
    }
    return pre * total;
}

std::complex<double> QdEvaluator::q_ball(double rho, double s) const {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("q_ball: rho outside [0,1)");
    if (rho == 0.0) return 1.0;
    int ord = std::max(8, order_ / 16);
    std::complex<double> prev = q_ball_order(rho, s, ord);
    while (ord < 1024) {
        ord *= 2;
        const std::complex<double> cur = q_ball_order(rho, s, ord);
        if (std::abs(cur - prev) <= 1e-10 * std::abs(cur)) return cur;
        prev = cur;
    }
    return prev;
}

std::vector<double> transform_matrix(const AdjacencyModel &m,
                                     const QdEvaluator &qd, double rel_tol) {
    m.validate();
    if (qd.dim() != m.d)
        throw std::invalid_argument("transform_matrix: dimension mismatch");
    const std::size_t n = m.marks.size();
    const double surf = sphere_surface(m.d);
    std::vector<double> T(n * n, 0.0);
    const std::function<double(double)> w = [&](double r) { return qd.q_hyp(r); };
    for (std::size_t i = 0; i < n; i++)
        for (std::size_t j = i; j < n; j++) {
            double v;
            // Q_d soaks up e^{-(d-1)r/2} (1 v r): integrability needs the
            // adjacency tail to beat e^{(d-1)r/2} with a linear factor.
            if (radial_integral_diverges(m, i, j, 0.5 * (m.d - 1)))
                v = kInf;
            else
                v = surf * radial_integral(m, i, j, 0.0, kInf, &w, rel_tol);
            T[i * n + j] = T[j * n + i] = v;
        }
    return T;
}

PowerIterationResult op_norm_2to2(const std::vector<double> &matrix,
                                  const MarkSpace &marks, double rel_residual,
                                  int max_iterations) {
    const std::size_t n = marks.size();
    if (matrix.size() != n * n)
        throw std::invalid_argument("op_norm_2to2: size mismatch");
    PowerIterationResult out;
    for (double v : matrix)
        if (!std::isfinite(v)) { out.value = kInf; return out; }
    // Conjugate by sqrt(weights): S(i,j) = sqrt(w_i) M(i,j) sqrt(w_j) is
    // symmetric with the same spectrum as the L^2(E) operator.
    std::vector<double> S(n * n), sw(n);
    for (std::size_t i = 0; i < n; i++) sw[i] = std::sqrt(marks.weights[i]);
    for (std::size_t i = 0; i < n; i++)
        for (std::size_t j = 0; j < n; j++)
            S[i * n + j] = sw[i] * matrix[i * n + j] * sw[j];
    // Deterministic pseudo-random start: an all-ones start can sit exactly
    // in the orthogonal complement of the top eigenvector.
    std::vector<double> v(n), Av(n);
    RandomStream seed_stream = RandomStream::from_seed(0x9e3779b9u);
    double vnorm = 0.0;
    for (std::size_t i = 0; i < n; i++) {
        v[i] = 0.5 + seed_stream.next_double();
        if (i & 1) v[i] = -v[i];
        vnorm += v[i] * v[i];
    }
    vnorm = std::sqrt(vnorm);
    for (double &x : v) x /= vnorm;
    double lam_prev = 0.0;
    for (int it = 1; it <= max_iterations; it++) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; i++) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; j++) s += S[i * n + j] * v[j];
            Av[i] = s;
            nrm += s * s;
        }
        nrm = std::sqrt(nrm);
        out.iterations = it;
        if (nrm == 0.0) { out.value = 0.0; out.converged = true; return out; }
        double lam = 0.0;  // Rayleigh quotient with the normalized iterate
        for (std::size_t i = 0; i < n; i++) {
            v[i] = Av[i] / nrm;
            lam += v[i] * Av[i];
        }
        lam = nrm;  // |S v| with |v| = 1: converges to the spectral norm
        out.residual = std::fabs(lam - lam_prev) / std::max(lam, 1e-300);
        out.value = lam;
        if (it > 1 && out.residual <= rel_residual) {
            out.converged = true;
            return out;
        }
        lam_prev = lam;
    }
    return out;  // residual reported, value still usable
}

double op_norm_1to1(const DegreeMatrix &D) {
    double best = 0.0;
    for (std::size_t b = 0; b < D.n; b++) {
        double col = 0.0;
        for (std::size_t a = 0; a < D.n; a++) {
            if (!std::isfinite(D.at(a, b))) return kInf;
            col += D.weights[a] * D.at(a, b);
        }
        best = std::max(best, col);
    }
    return best;
}

double op_norm_hs(const std::vector<double> &matrix, const MarkSpace &marks) {
    const std::size_t n = marks.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; i++)
        for (std::size_t j = 0; j < n; j++) {
            const double v = matrix[i * n + j];
            if (!std::isfinite(v)) return kInf;
            s += marks.weights[i] * marks.weights[j] * v * v;
        }
    return std::sqrt(s);
}

SpectralReport spectral_report(const AdjacencyModel &m, const QdEvaluator &qd) {
    SpectralReport rep;
    rep.n = m.marks.size();
    rep.transform = transform_matrix(m, qd);
    for (double v : rep.transform)
        if (!std::isfinite(v)) rep.diverged = true;
    const PowerIterationResult p = op_norm_2to2(rep.transform, m.marks);
    rep.norm_2to2 = p.value;
    rep.iterations = p.iterations;
    rep.residual = p.residual;
    rep.norm_hs = op_norm_hs(rep.transform, m.marks);
    rep.norm_1to1 = op_norm_1to1(degree_matrix(m));
    return rep;
}

std::vector<NormRatioRow> norm_ratio_series(const AdjacencyModel &m,
                                            const std::vector<double> &Ls) {
    std::vector<NormRatioRow> rows;
    const QdEvaluator qd(Dimension(m.d));
    for (double L : Ls) {
        const AdjacencyModel mm = m.with_L(L);
        NormRatioRow row;
        row.L = L;
        const std::vector<double> T = transform_matrix(mm, qd);
        row.phi_norm = op_norm_2to2(T, mm.marks).value;
        const DegreeMatrix D = degree_matrix(mm);
        row.degree_norm = op_norm_2to2(D.values, mm.marks).value;
        row.diverged = !std::isfinite(row.phi_norm) || !std::isfinite(row.degree_norm);
        row.ratio = row.phi_norm / row.degree_norm;
        row.phi_norm_over_L = row.phi_norm / L;
        rows.push_back(row);
    }
    return rows;
}

double green_norm_bound(double phi_norm, double lambda) {
    if (!(phi_norm >= 0.0) || !(lambda >= 0.0))
        throw std::invalid_argument("green_norm_bound: negative input");
    if (!std::isfinite(phi_norm) || lambda * phi_norm >= 1.0) return kInf;
    return phi_norm / (1.0 - lambda * phi_norm);
}

} // namespace hrcm
