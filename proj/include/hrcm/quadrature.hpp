#ifndef HRCM_QUADRATURE_HPP
#define HRCM_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace hrcm {

/** Gauss-Legendre rule on [-1,1]: nodes and weights for a given order.
 * Results are cached per order (thread-safe after first use of an order). */
struct GaussLegendre {
    std::vector<double> x, w;
    explicit GaussLegendre(int n);
};

/** Returns a shared, immutable rule of the given order. */
const GaussLegendre &gl_rule(int n);

/** Fixed-order Gauss-Legendre integral of f over [a,b]. */
double gl_integrate(const std::function<double(double)> &f, double a, double b,
                    int order = 64);

/** Adaptive Gauss-Legendre: recursively bisects until the GL-15 halves agree
 * with the GL-15 whole to the requested tolerance (mixed abs/rel against the
 * running total).  Suitable for piecewise-smooth integrands. */
double adaptive_integrate(const std::function<double(double)> &f, double a,
                          double b, double rel_tol = 1e-10,
                          double abs_floor = 0.0, int max_depth = 48);

} // namespace hrcm

#endif
