#ifndef ANISORES_HOROCYCLE_HPP
#define ANISORES_HOROCYCLE_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "anisores/models.hpp"
#include "anisores/quadrature.hpp"
#include "anisores/transfer.hpp"

namespace anisores {

struct RenormResult {
  double rho = 0.0;
  double alpha = 0.0;
  double value = 0.0;     // tau(rho, alpha, x)
  double residual = -1.0; // |h_tau(g_alpha x) - g_alpha h_rho x|; -1 when not evaluated
  double drho_tau = 0.0;  // d_rho tau(rho, alpha, x)
};

// ---- map-backend horocycle engine (unit-speed flow along stable leaves) ------

class MapHorocycle {
 public:
  explicit MapHorocycle(std::shared_ptr<const TorusMap> map, double rk_step = 2e-3);

  const TorusMap& map() const { return *map_; }
  bool is_linear() const { return map_->is_linear(); }

  Vec2 stable_field(const Vec2& x) const;  // oriented unit stable field
  Vec2 flow(const Vec2& x, double rho) const;
  Vec2 flow_lift(const Vec2& x_lift, double rho) const;  // cover march

  // d_rho tau(0, alpha, x) = |DT^alpha(x) e_s(x)| (unit-speed stable Jacobian)
  double drho_tau0(long alpha, const Vec2& x) const;

  // cover-tracked leaf solve; throws SolverError past the march horizon
  RenormResult renorm_time(double rho, long alpha, const Vec2& x,
                           bool with_residual = true, double horizon = 200.0) const;
  // quadrature route tau = int_0^rho d_rho tau(0,alpha,h_sigma x) d sigma;
  // cheap at any stretch, used for growth fits and weight transport
  double tau_quad(double rho, long alpha, const Vec2& x, double abs_tol = 1e-11) const;

  double rk_step() const { return h_; }

 private:
  std::shared_ptr<const TorusMap> map_;
  double h_;
  Vec2 march(const Vec2& start_lift, double rho) const;
};

// ---- suspension horocycle engine ---------------------------------------------

class SuspHorocycle {
 public:
  explicit SuspHorocycle(std::shared_ptr<const SuspensionFlow> flow, double rk_step = 1e-2);

  const SuspensionFlow& susp() const { return *flow_; }
  void require_mixing() const;  // constant roof is barred from orbit use

  Vec3 stable_field(const SuspPoint& p) const;
  SuspPoint flow(const SuspPoint& p, double rho) const;
  // also accumulates the base-cover leaf parameter (in units of v_s at level 0)
  SuspPoint flow_tracked(const SuspPoint& p, double rho, double* rho_tilde) const;

  double drho_tau0(double alpha, const SuspPoint& p) const;
  RenormResult renorm_time(double rho, double alpha, const SuspPoint& p,
                           bool with_residual = true) const;
  double tau_quad(double rho, double alpha, const SuspPoint& p, double abs_tol = 1e-11) const;

 private:
  std::shared_ptr<const SuspensionFlow> flow_;
  double h_;
  // leaf-parameter integral of the in-chart speed at flow level alpha
  double tau_from_parameter(const SuspPoint& p, double alpha, double rho_tilde) const;
};

// ---- horocycle integrals -------------------------------------------------------

using MapObservable = std::function<cplx(const Vec2&)>;
using SuspObservable = std::function<cplx(const SuspPoint&)>;

cplx horocycle_integral(const MapHorocycle& eng, const MapObservable& phi, const Vec2& x,
                        double T, double abs_tol = -1.0);
cplx horocycle_integral(const SuspHorocycle& eng, const SuspObservable& phi, const SuspPoint& p,
                        double T, double abs_tol = -1.0);

// weighted integral gamma_{w,x}(phi), w supported in [lo, hi]
struct WeightFn {
  std::function<double(double)> w;
  double lo = 0.0, hi = 0.0;
};
cplx weighted_integral(const MapHorocycle& eng, const WeightFn& w, const Vec2& x,
                       const MapObservable& phi, double abs_tol = 1e-10);

struct DualBoundReport {
  double implied_C = 0.0;       // sup |gamma_{w,x}(phi)| / (|supp w| ||w||_{C^{-s}} ||phi||)
  double supp_len = 0.0;
  double holder_norm = 0.0;
};
DualBoundReport dual_bound_probe(const MapHorocycle& eng, const WeightFn& w, const Vec2& x,
                                 const DyadicPartition& part, const ConeEnsemble& ens,
                                 const AnisotropicIndex& index, int K, int n_samples,
                                 uint64_t seed);

// |gamma_{w,x}(phi) - gamma_{w o tau(.,-alpha,g_alpha x), g_alpha x}(L_alpha phi)|
double renorm_identity_residual(const MapHorocycle& eng, const WeightFn& w, const Vec2& x,
                                const MapObservable& phi, long alpha, double abs_tol = 1e-9);

// ---- tau identity suite ---------------------------------------------------------

struct TauSuiteReport {
  std::map<std::string, double> residuals;  // keys i..viii, xi, xii
  double growth_exponent = 0.0;             // (ix): fit of log|tau(rho,-alpha,x)| vs alpha
  double growth_ratio_lo = 0.0, growth_ratio_hi = 0.0;  // |tau|/(|rho| e^{h_top a}) window
  double decay_theta = 0.0;                 // (x): fitted theta of sup_rho d_rho tau(.,alpha,x)
  double drho_min = 1e300, drho_max = 0.0;  // (vii) observed range
};

TauSuiteReport tau_identity_suite(const MapHorocycle& eng, int n_samples, uint64_t seed);
TauSuiteReport tau_identity_suite(const SuspHorocycle& eng, int n_samples, uint64_t seed);

// ---- cutoff family and decomposition --------------------------------------------

struct CutoffFamily {
  double T = 0.0, eps = 0.25;
  Vec2 x{};                        // base point
  int N = 0;                       // depth
  std::vector<long> beta_plus;     // integer renormalization times (map backends)
  std::vector<long> beta_minus;
  double beta0_exact = 0.0;        // real solution of tau(T, beta, x) = 1/eps
  double c1_reported = 0.0;        // achieved constant in the e^{h_top d beta} ~ eps window
  // w_k and transported weights, k = 0..N (w_k = w_k^+ + w_k^-)
  std::function<double(double, int)> wk;        // wk(rho, k)
  std::function<double(double)> w_total;        // sum_{k<=N} w_k
  // transported weights and their supports
  std::function<double(double, int)> wk_plus_tilde;
  std::function<double(double, int)> wk_minus_tilde;
  std::function<double(double)> w0_tilde;
  double supp_tilde_hi = 0.0;      // common support bound of the transported weights
};

CutoffFamily cutoff_family(const MapHorocycle& eng, double T, const Vec2& x, double eps);

// residual of the telescoped decomposition of gamma_{w,x}(phi)
double local_decomposition_residual(const MapHorocycle& eng, const CutoffFamily& fam,
                                    const MapObservable& phi, double abs_tol = 1e-9);

// ---- expansion fit ----------------------------------------------------------------

// observable given by its Fourier modes (exact pairings) plus the induced callable
struct TrigObservable {
  std::vector<std::pair<std::array<int, 2>, cplx>> modes;
  cplx eval(const Vec2& x) const;
  VecC coefficients(int K) const;  // on the |k|_inf <= K box
};

struct ExpansionTermFit {
  cplx lambda;
  int i = 1, j = 1;
  cplx o_of_phi;                 // O_{(lambda,i,j)}(phi)
  std::vector<cplx> c_values;    // c_{(lambda,i,j)}(T, x) per grid T
};

struct ExpansionFitResult {
  std::vector<double> T;
  std::vector<cplx> gamma;
  std::vector<cplx> reconstruction;
  std::vector<double> abs_residual;
  std::vector<ExpansionTermFit> terms;
  double mu_of_phi_re = 0.0, mu_of_phi_im = 0.0;
  double sup_c = 0.0;
  double residual_exponent = 0.0;  // slope of log envelope |E| vs log T
  double cor58_stat = 0.0;         // sup_T T^{eps'} |gamma/T - mu(phi)| at eps' = 0.5
};

// records: resonance data (leading first). The leading record is used as
// D_{(h_top,1,1)} and its left functional (normalized by mu(1) = 1) as mu.
ExpansionFitResult expansion_fit(const MapHorocycle& eng, const TrigObservable& phi,
                                 const Vec2& x, const std::vector<ResonanceRecord>& records,
                                 const std::vector<double>& t_grid, double eps,
                                 double gamma_tol = 1e-8);

}  // namespace anisores

#endif
