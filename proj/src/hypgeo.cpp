#include "hrcm/hypgeo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hrcm/quadrature.hpp"

namespace hrcm {

Dimension::Dimension(int d_) : d(d_) {
    if (d < 2 || d > 8)
        throw std::invalid_argument("Dimension: d must be in [2, 8]");
}

double BallPoint::euclid_norm() const {
    double s = 0.0;
    for (double c : coords) s += c * c;
    return std::sqrt(s);
}

Frustum::Frustum(std::vector<double> axis_, double half_angle_,
                 double inner_radius_)
    : axis(std::move(axis_)), half_angle(half_angle_),
      inner_radius(inner_radius_) {
    double n = 0.0;
    for (double c : axis) n += c * c;
    if (std::fabs(std::sqrt(n) - 1.0) > 1e-12)
        throw std::invalid_argument("Frustum: axis must be a unit vector");
    if (!(half_angle > 0.0 && half_angle < M_PI))
        throw std::invalid_argument("Frustum: half_angle outside (0, pi)");
    if (!(inner_radius >= 0.0))
        throw std::invalid_argument("Frustum: inner_radius < 0");
}

double sphere_surface(int d) {
    if (d < 1) throw std::invalid_argument("sphere_surface: d < 1");
    // S_{d-1} = 2 pi^{d/2} / Gamma(d/2); tgamma is exact enough for d <= 8.
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

double hyp_dist(const BallPoint &x, const BallPoint &y) {
    if (x.coords.size() != y.coords.size())
        throw std::invalid_argument("hyp_dist: dimension mismatch");
    double diff2 = 0.0, nx2 = 0.0, ny2 = 0.0;
    for (std::size_t i = 0; i < x.coords.size(); i++) {
        const double dcoord = x.coords[i] - y.coords[i];
        diff2 += dcoord * dcoord;
        nx2 += x.coords[i] * x.coords[i];
        ny2 += y.coords[i] * y.coords[i];
    }
    if (nx2 >= 1.0 || ny2 >= 1.0)
        throw std::invalid_argument("hyp_dist: point outside the open ball");
    const double u = diff2 / ((1.0 - nx2) * (1.0 - ny2));
    // arcosh(1 + 2u); for tiny u the direct form cancels catastrophically,
    // so use arcosh(1 + w) = sqrt(2w) (1 - w/12 + ...) with w = 2u.
    if (u < 1e-12) {
        const double w = 2.0 * u;
        return std::sqrt(2.0 * w) * (1.0 - w / 12.0);
    }
    return std::acosh(1.0 + 2.0 * u);
}

namespace {

/** Antiderivative recurrence for I_n(r) = integral_0^r sinh^n t dt:
 * I_n = sinh^{n-1}(r) cosh(r)/n - (n-1)/n I_{n-2}.  Stable for r >= 1;
 * small r suffers cancellation and is handled by quadrature instead. */
double sinh_power_integral(int n, double r) {
    if (n == 0) return r;
    if (n == 1) return std::cosh(r) - 1.0;
    const double sh = std::sinh(r), ch = std::cosh(r);
    return (std::pow(sh, n - 1) * ch - (n - 1) * sinh_power_integral(n - 2, r)) / n;
}

void check_radius(int d, double r) {
    // (d-1) r beyond ~700 overflows exp inside sinh^{d-1}.
    if ((d - 1) * r > 700.0)
        throw std::overflow_error("volume_fn: (d-1) r exceeds double range");
}

} // namespace

double volume_fn(Dimension dim, double r) {
    const int d = dim.d;
    if (!(r >= 0.0)) throw std::invalid_argument("volume_fn: r < 0");
    check_radius(d, r);
    if (d == 2) {
        // cosh r - 1; use expm1-based form to keep small-r precision
        return 2.0 * std::pow(std::sinh(0.5 * r), 2);
    }
    if (d == 3) return (std::sinh(r) * std::cosh(r) - r) / 2.0;
    if (r < 1.0) {
        // smooth integrand, fixed-order rule is exact to machine precision
        return gl_integrate(
            [d](double t) { return std::pow(std::sinh(t), d - 1); }, 0.0, r, 64);
    }
    return sinh_power_integral(d - 1, r);
}

double volume_fn_inv(Dimension dim, double v) {
    const int d = dim.d;
    if (!(v >= 0.0)) throw std::invalid_argument("volume_fn_inv: v < 0");
    if (v == 0.0) return 0.0;
    // Initial guess from the asymptote V_d(r) ~ e^{(d-1)r} / ((d-1) 2^{d-1})
    double r = std::log(v * (d - 1) * std::pow(2.0, d - 1)) / (d - 1);
    if (!(r > 0.0) || !std::isfinite(r)) r = 1.0;
    check_radius(d, r + 2.0);
    double lo = 0.0, hi = r;
    while (volume_fn(dim, hi) < v) { lo = hi; hi *= 2.0; check_radius(d, hi); }
    // Safeguarded Newton with bisection fallback
    r = 0.5 * (lo + hi);
    for (int it = 0; it < 100; it++) {
        const double f = volume_fn(dim, r) - v;
        if (f > 0.0) hi = r; else lo = r;
        const double deriv = std::pow(std::sinh(r), d - 1);
        double step = deriv > 0.0 ? r - f / deriv : 0.5 * (lo + hi);
        if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
        if (std::fabs(step - r) <= 1e-15 * (1.0 + r)) return step;
        r = step;
    }
    return r;
}

double separation_length(double theta) {
    if (!(theta > 0.0 && theta < M_PI))
        throw std::domain_error("separation_length: theta outside (0, pi)");
    const double num = 1.0 - std::cos(theta) * std::cos(0.5 * theta);
    const double den = std::sin(theta) * std::sin(0.5 * theta);
    const double arg = num / den;
    // The argument is >= 5/4 on (0, pi) analytically; guard roundoff anyway.
    return std::acosh(std::max(arg, 1.0));
}

bool frustum_contains(const Frustum &f, const BallPoint &x) {
    if (f.axis.size() != x.coords.size())
        throw std::invalid_argument("frustum_contains: dimension mismatch");
    const double nrm = x.euclid_norm();
    if (nrm == 0.0) return false;  // origin: distance 0, never inside
    const double dist = 2.0 * std::atanh(nrm);
    if (!(dist > f.inner_radius)) return false;
    double dot = 0.0;
    for (std::size_t i = 0; i < x.coords.size(); i++)
        dot += f.axis[i] * x.coords[i];
    const double cosang = std::clamp(dot / nrm, -1.0, 1.0);
    const double ang = std::acos(cosang);
    return ang < f.half_angle;  // strict: boundary excluded
}

double cap_volume(Dimension dim, double eps) {
    const int d = dim.d;
    if (!(eps > 0.0 && eps <= M_PI))
        throw std::domain_error("cap_volume: eps outside (0, pi]");
    if (d == 2) return 2.0 * eps;  // two arcs of total angle 2 eps
    return sphere_surface(d - 1) *
           gl_integrate([d](double t) { return std::pow(std::sin(t), d - 2); },
                        0.0, eps, 96);
}

RadialSampler::RadialSampler(Dimension dim, double R) : d_(dim.d), R_(R) {
    if (!(R > 0.0)) throw std::invalid_argument("RadialSampler: R <= 0");
    if (R > kMaxRadius)
        throw std::overflow_error("RadialSampler: R exceeds the radius cap");
    const int n = 2048;
    grid_r_.resize(n + 1);
    grid_v_.resize(n + 1);
    for (int i = 0; i <= n; i++) {
        grid_r_[i] = R * i / n;
        grid_v_[i] = volume_fn(dim, grid_r_[i]);
    }
    total_ = grid_v_.back();
}

double RadialSampler::invert(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    const double target = u * total_;
    // Locate the bracketing table cell, interpolate, then refine by Newton
    auto it = std::lower_bound(grid_v_.begin(), grid_v_.end(), target);
    std::size_t hi = std::min<std::size_t>(it - grid_v_.begin(), grid_v_.size() - 1);
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    const double span = grid_v_[hi] - grid_v_[lo];
    double r = span > 0.0
                   ? grid_r_[lo] + (grid_r_[hi] - grid_r_[lo]) * (target - grid_v_[lo]) / span
                   : grid_r_[lo];
    for (int k = 0; k < 2; k++) {
        const double deriv = std::pow(std::sinh(r), d_ - 1);
        if (deriv <= 0.0) break;
        r -= (volume_fn(Dimension(d_), r) - target) / deriv;
        r = std::clamp(r, grid_r_[lo], grid_r_[hi]);
    }
    return r;
}

std::vector<double> sample_direction(int d, RandomStream &rng) {
    std::vector<double> v(d);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (int i = 0; i < d; i++) { v[i] = rng.next_normal(); n2 += v[i] * v[i]; }
    } while (n2 == 0.0);
    const double inv = 1.0 / std::sqrt(n2);
    for (double &c : v) c *= inv;
    return v;
}

std::vector<BallPoint> sample_ball(Dimension dim, double R, double n_expected,
                                   RandomStream &rng, std::uint64_t point_cap) {
    if (!(n_expected > 0.0))
        throw std::invalid_argument("sample_ball: n_expected <= 0");
    const std::uint64_t n = rng.poisson(n_expected);
    if (n > point_cap)
        throw std::runtime_error("sample_ball: point cap exceeded");
    const RadialSampler radial(dim, R);
    std::vector<BallPoint> pts;
    pts.reserve(n);
    for (std::uint64_t i = 0; i < n; i++) {
        const double r = radial.invert(rng.next_double());
        std::vector<double> dir = sample_direction(dim.d, rng);
        const double rho = std::tanh(0.5 * r);
        for (double &c : dir) c *= rho;
        pts.push_back(BallPoint{std::move(dir)});
    }
    return pts;
}

} // namespace hrcm
