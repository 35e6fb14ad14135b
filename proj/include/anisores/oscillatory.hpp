#ifndef ANISORES_OSCILLATORY_HPP
#define ANISORES_OSCILLATORY_HPP

#include <functional>
#include <vector>

#include "anisores/common.hpp"

namespace anisores {

// Phase/amplitude pair on a uniform 1-d grid over [a, b]: amplitude compactly
// supported in the interior, phase smooth with nonvanishing derivative on the
// support. Derivatives are spectral on the periodic embedding (padding 2x).
struct PhasePair {
  double a = -1.0, b = 1.0;
  int n = 0;  // grid points (excluding the right endpoint)
  std::vector<double> phase;      // G at nodes
  std::vector<double> dphase;     // G' at nodes
  std::vector<cplx> amplitude;    // f at nodes
  double holder_delta = 1.0;      // Hoelder exponent for the regularized mode

  double dx() const { return (b - a) / n; }
  double node(int i) const { return a + (b - a) * i / n; }
};

PhasePair make_phase_pair(double a, double b, int n, const std::function<double(double)>& G,
                          const std::function<double(double)>& dG,
                          const std::function<cplx(double)>& f, double holder_delta = 1.0);

// trapezoid on the grid (spectrally accurate for smooth compactly supported data)
cplx osc_integral(const PhasePair& p);
cplx osc_integral_with(const PhasePair& p, const std::vector<cplx>& amplitude);

// spectral derivative of compactly supported grid data (periodic embedding, 2x padding)
std::vector<cplx> spectral_derivative(const std::vector<cplx>& f, double length);

struct IbpResult {
  std::vector<cplx> amplitude;  // V_1 = (G' f / |G'|^2)'
  cplx integral_before;
  cplx integral_after;          // i * int e^{iG} V_1
  double identity_residual;
};
IbpResult ibp_transform(const PhasePair& p);

struct IbpIterateResult {
  std::vector<cplx> v_k;
  std::vector<cplx> f_k;        // V_k = |G'|^{-k} f_k
  double f_k_sup = 0.0;
  double envelope_bound = 0.0;  // lemma-style bound from gradient data
  cplx integral_direct;
  cplx integral_transformed;    // i^k int e^{iG} V_k
  double identity_residual = 0.0;
};
IbpIterateResult ibp_iterate(const PhasePair& p, int k);

struct RegularizedIbpResult {
  cplx direct;        // int e^{iLG} f
  cplx term_smooth;   // (i/L) int e^{iLG} div h_eps
  cplx term_rough;    // int e^{iLG} G'.(h - h_eps)
  double identity_residual = 0.0;
  double grad_heps_sup = 0.0;  // ||grad h_eps||_inf
  double diff_sup = 0.0;       // ||h - h_eps||_inf
  double mollifier_mass_defect = 0.0;
};
RegularizedIbpResult regularized_ibp(const PhasePair& p, double L, double eps);

// sweep eps over a dyadic range and fit the two mollifier-bound exponents
struct MollifierSweep {
  std::vector<double> eps;
  std::vector<double> diff_sup;       // ~ eps^delta
  std::vector<double> grad_sup;       // ~ eps^{delta-1}
  double fitted_delta = 0.0;
  double fitted_delta_minus_one = 0.0;
};
MollifierSweep mollifier_exponent_sweep(const PhasePair& p, double L,
                                        const std::vector<double>& eps_list);

}  // namespace anisores

#endif
