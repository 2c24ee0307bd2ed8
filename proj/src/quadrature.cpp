#include "hrcm/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hrcm {

/** Computes the quadrature points and weights by Newton iteration on the
 * roots of the Legendre polynomial, exploiting root symmetry about 0. */
GaussLegendre::GaussLegendre(int n) : x(n), w(n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: order < 1");
    const double fac = M_PI / (0.5 + n);
    const int m = (n + 1) >> 1;
    for (int i = 0; i < m; i++) {
        // Chebyshev-like initial guess for the i-th root
        double z = std::cos((i + 0.75) * fac), dz, tmp, pp;
        do {
            // Legendre recurrence to get P_n(z) and its derivative
            double p2 = 0.0, p1 = 1.0, p3;
            for (int j = 1; j <= n; j++) {
                p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / static_cast<double>(j);
            }
            tmp = n * (z * p1 - p2);
            pp = tmp / (z * z - 1.0);
            dz = -p1 / pp;
            z += dz;
        } while (std::fabs(dz) >= std::numeric_limits<double>::epsilon());
        x[i] = -z;
        x[n - 1 - i] = z;
        w[n - 1 - i] = w[i] = 2.0 / (-tmp * pp);
    }
}

const GaussLegendre &gl_rule(int n) {
    static std::mutex mtx;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
    return it->second;
}

double gl_integrate(const std::function<double(double)> &f, double a, double b,
                    int order) {
    const GaussLegendre &q = gl_rule(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; i++) s += q.w[i] * f(mid + half * q.x[i]);
    return s * half;
}

namespace {

double adapt_rec(const std::function<double(double)> &f, double a, double b,
                 double whole, double tol, double abs_floor, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gl_integrate(f, a, mid, 15);
    const double right = gl_integrate(f, mid, b, 15);
    const double err = std::fabs(left + right - whole);
    if (err <= tol * std::fabs(left + right) + abs_floor || depth <= 0)
        return left + right;
    return adapt_rec(f, a, mid, left, tol, 0.5 * abs_floor, depth - 1) +
           adapt_rec(f, mid, b, right, tol, 0.5 * abs_floor, depth - 1);
}

} // namespace

double adaptive_integrate(const std::function<double(double)> &f, double a,
                          double b, double rel_tol, double abs_floor,
                          int max_depth) {
    if (!(b > a)) return 0.0;
    // An absolute floor tied to a coarse first pass keeps recursion from
    // chasing roundoff on near-zero subintervals.
    const double coarse = gl_integrate(f, a, b, 15);
    double floor_eff = abs_floor;
    if (floor_eff == 0.0) floor_eff = 1e-3 * rel_tol * std::fabs(coarse);
    return adapt_rec(f, a, b, coarse, rel_tol, floor_eff, max_depth);
}

} // namespace hrcm
