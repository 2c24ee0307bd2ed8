#ifndef HRCM_SPECTRAL_HPP
#define HRCM_SPECTRAL_HPP

#include <complex>
#include <vector>

#include "hrcm/models.hpp"

namespace hrcm {

/** Evaluator for the spherical kernel Q^B_d(rho; s) and its hyperbolic-
 * coordinate form Q_d(r).  The theta-integral is done by composite
 * Gauss-Legendre on geometrically graded panels toward theta = 0, where the
 * integrand peaks sharply as rho -> 1; the panel order doubles adaptively
 * until two successive orders agree to 1e-10 (relative). */
class QdEvaluator {
  public:
    explicit QdEvaluator(Dimension d, int base_order = 128);

    /** Q^B_d(rho; s): complex in general, real at s = 0. */
    std::complex<double> q_ball(double rho, double s) const;
    /** Q_d(r) = Q^B_d(tanh(r/2); 0), computed in a cancellation-free
     * hyperbolic form. */
    double q_hyp(double r) const;

    int dim() const { return d_; }
    int order() const { return order_; }

  private:
    double q_hyp_order(double r, int order) const;
    std::complex<double> q_ball_order(double rho, double s, int order) const;

    int d_;
    int order_;
};

/** Transform matrix and operator norms for a scaled adjacency model. */
struct SpectralReport {
    std::size_t n = 0;
    std::vector<double> transform;  // phi-tilde(0; a, b), row-major
    double norm_2to2 = 0.0;         // may be +inf
    double norm_1to1 = 0.0;         // may be +inf
    double norm_hs = 0.0;           // may be +inf
    int iterations = 0;
    double residual = 0.0;
    bool diverged = false;          // any transform entry failed integrability
};

/** phi-tilde_L(0; a, b) = S_{d-1} integral phi_L(r;a,b) Q_d(r) sinh^{d-1} r
 * dr, per mark pair; entries failing the integrability test are +inf. */
std::vector<double> transform_matrix(const AdjacencyModel &m,
                                     const QdEvaluator &qd,
                                     double rel_tol = 1e-8);

/** L^2(E) operator norm of a symmetric mark-pair kernel matrix via power
 * iteration on the sqrt-weight-symmetrized matrix. */
struct PowerIterationResult {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

PowerIterationResult op_norm_2to2(const std::vector<double> &matrix,
                                  const MarkSpace &marks,
                                  double rel_residual = 1e-9,
                                  int max_iterations = 100000);

/** Max weighted row sum of a degree matrix; +inf when any entry is. */
double op_norm_1to1(const DegreeMatrix &D);

/** Weighted Frobenius (Hilbert-Schmidt) norm of a mark-pair matrix. */
double op_norm_hs(const std::vector<double> &matrix, const MarkSpace &marks);

/** Full spectral report: transform, 2->2 / 1->1 / HS norms. */
SpectralReport spectral_report(const AdjacencyModel &m, const QdEvaluator &qd);

/** Per-L ratio diagnostics of the transform norm against the degree norm. */
struct NormRatioRow {
    double L = 0.0;
    double phi_norm = 0.0;      // ||Phi_L||_{2->2}
    double degree_norm = 0.0;   // ||D_L||_{2->2}
    double ratio = 0.0;         // phi_norm / degree_norm
    double phi_norm_over_L = 0.0;
    bool diverged = false;
};

std::vector<NormRatioRow> norm_ratio_series(const AdjacencyModel &m,
                                            const std::vector<double> &Ls);

/** Geometric-series bound on the two-point operator norm:
 * phi_norm / (1 - lambda phi_norm) when lambda phi_norm < 1, else +inf. */
double green_norm_bound(double phi_norm, double lambda);

} // namespace hrcm

#endif
