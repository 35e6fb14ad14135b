#ifndef ANISORES_QUADRATURE_HPP
#define ANISORES_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "anisores/common.hpp"

namespace anisores {

struct QuadResult {
  cplx value{0.0, 0.0};
  double error = 0.0;   // accumulated error estimate
  int panels = 0;       // panels used by the adaptive driver
};

// Adaptive Gauss-Kronrod (G7,K15) on [a,b], absolute tolerance.
QuadResult integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol, int max_panels = 200000);

// Fixed-order Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Nodes/weights for \int_0^inf x^a e^{-x} f(x) dx (generalized Gauss-Laguerre),
// computed by Golub-Welsch on the Jacobi recurrence.
void gauss_laguerre(int n, double a, std::vector<double>& nodes, std::vector<double>& weights);

// Composite Gauss-Legendre over [a,b] split at the sorted interior breakpoints,
// n points per smooth piece. Used where the integrand is piecewise smooth with
// known breaks (e.g. roof crossings in suspension time integrals).
cplx integrate_piecewise_gl(const std::function<cplx(double)>& f, double a, double b,
                            const std::vector<double>& breaks, int n_per_piece = 24);

}  // namespace anisores

#endif
