#ifndef HRCM_HYPGEO_HPP
#define HRCM_HYPGEO_HPP

#include <cstdint>
#include <vector>

#include "hrcm/rng.hpp"

namespace hrcm {

/** Hard cap on hyperbolic radii: beyond this, sinh^{d-1} terms overflow
 * double precision in intermediate quantities; every operation that would
 * exceed it throws instead of silently saturating. */
constexpr double kMaxRadius = 40.0;

/** Ambient dimension of the hyperbolic space H^d, d in [2, 8]. */
struct Dimension {
    int d;
    explicit Dimension(int d_);
};

/** A point of H^d in the Poincare ball model: Euclidean coordinates with
 * |coords| < 1.  The hyperbolic distance to the origin is 2 artanh|coords|. */
struct BallPoint {
    std::vector<double> coords;
    double euclid_norm() const;
};

/** Cone-minus-tip region: points at angle < half_angle from the axis (seen
 * from the origin) and hyperbolic distance > inner_radius. */
struct Frustum {
    std::vector<double> axis;       // unit vector, |axis| = 1 within 1e-12
    double half_angle;              // radians in (0, pi)
    double inner_radius;            // hyperbolic length >= 0
    Frustum(std::vector<double> axis_, double half_angle_, double inner_radius_);
};

/** Surface measure of the unit (d-1)-sphere, 2 pi^{d/2} / Gamma(d/2).
 * By convention the 0-sphere has measure 2. */
double sphere_surface(int d);

/** Hyperbolic distance between two ball points via the Mobius-invariant form
 * arcosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2))), with a series expansion for
 * nearly coincident points to avoid cancellation. */
double hyp_dist(const BallPoint &x, const BallPoint &y);

/** Volume function V_d(r) = integral_0^r sinh^{d-1} t dt.  Closed form for
 * d = 2, 3, a stable antiderivative recurrence / quadrature otherwise.
 * Throws on overflow ((d-1) r beyond double exponent range). */
double volume_fn(Dimension d, double r);

/** Inverse of V_d, by a log-asymptotic initial guess plus safeguarded
 * Newton; volume_fn(d, volume_fn_inv(d, v)) = v to relative 1e-9. */
double volume_fn_inv(Dimension d, double v);

/** Separation length L*(theta) = arcosh((1 - cos t cos(t/2)) /
 * (sin t sin(t/2))): the radial clearance that keeps the binary tree of
 * cone translations from self-intersecting.  Domain (0, pi). */
double separation_length(double theta);

/** Strict containment test: angle at the origin < half_angle AND hyperbolic
 * distance from the origin > inner_radius (boundary excluded). */
bool frustum_contains(const Frustum &f, const BallPoint &x);

/** Spherical-cap volume c_d(eps): (d-2)-sphere surface times
 * integral_0^eps sin^{d-2} t dt for d >= 3; 2 eps for d = 2. */
double cap_volume(Dimension d, double eps);

/** Poisson sample of a hyperbolic ball of radius R: point count is
 * Poisson(n_expected), directions uniform on the sphere, radii by numeric
 * inversion of the CDF V_d(r)/V_d(R) (2048-node monotone table plus two
 * Newton refinements per draw).  Throws if the draw exceeds point_cap. */
std::vector<BallPoint> sample_ball(Dimension d, double R, double n_expected,
                                   RandomStream &rng,
                                   std::uint64_t point_cap = 10000000);

/** Radial CDF inverter used by sample_ball, exposed for reuse: maps
 * u in [0,1] to the radius r with V_d(r)/V_d(R) = u. */
class RadialSampler {
  public:
    RadialSampler(Dimension d, double R);
    double invert(double u) const;
    double radius() const { return R_; }

  private:
    int d_;
    double R_, total_;
    std::vector<double> grid_r_, grid_v_;  // monotone table of V_d
};

/** Uniform direction on the (d-1)-sphere via normalized Gaussians. */
std::vector<double> sample_direction(int d, RandomStream &rng);

} // namespace hrcm

#endif
