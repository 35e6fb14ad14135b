#ifndef ANISORES_TRANSFER_HPP
#define ANISORES_TRANSFER_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "anisores/blocks.hpp"
#include "anisores/weights.hpp"

namespace anisores {

using SpMatC = Eigen::SparseMatrix<cplx>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

// Fourier-Galerkin truncation of L_{alpha,phi_alpha} on the mode box |k|_inf <= K.
struct TransferMatrix {
  int K = 0;
  long alpha = 1;
  int grid = 0;
  double prune_threshold = 1e-14;
  SpMatC M;

  int side() const { return 2 * K + 1; }
  int dim() const { return side() * side(); }
  int idx(int k1, int k2) const { return (k1 + K) * side() + (k2 + K); }
  std::pair<int, int> mode_of(int i) const { return {i / side() - K, i % side() - K}; }
};

// Column k: Fourier coefficients of phi_alpha * (e_k o g_{-alpha}) by FFT on an
// anti-aliased grid (grid >= 4K per axis, power of two).
TransferMatrix assemble_transfer(const TorusMap& map, const WeightSpec& weight, long alpha,
                                 int K, int grid);

// ---- eigen machinery ---------------------------------------------------------

struct EigenPairs {
  std::vector<cplx> values;           // sorted by |mu| descending
  std::vector<VecC> vectors;
  std::vector<double> residuals;      // ||M v - mu v|| / |mu|
};

// Restarted Arnoldi for the largest-|mu| eigenpairs; dense fallback for small dims.
EigenPairs top_eigenpairs(const SpMatC& M, int nev, int krylov_dim = 96, int max_restarts = 8,
                          double tol = 1e-10, uint64_t seed = 12345);

struct ResonanceRecord {
  cplx lambda;                // generator-plane value log(mu)/alpha, |Im| <= pi/alpha
  cplx mu;                    // time-alpha eigenvalue
  int n_lambda = 1;           // geometric multiplicity
  std::vector<int> m_i{1};    // algebraic multiplicities per geometric block
  VecC D;                     // right vector (coefficients on the K-box)
  VecC O;                     // left functional: O(phi) = O.dot(phi), O(D) = 1
  double stability = 0.0;     // |mu(K) - mu(K+8)| under minimal-distance matching
  bool stable_flag = true;
  int K = 0;
  long alpha = 1;
};

struct ResonanceOptions {
  int how_many = 5;
  double re_lambda_min = -1e9;   // search region Re lambda > this
  double stability_tol = 1e-3;
  int stability_step = 8;        // compare K against K + step
  bool with_stability = true;
  bool with_jordan = false;      // rank tests, dense path only
  double jordan_tol = 1e-7;
  uint64_t seed = 12345;
};

std::vector<ResonanceRecord> resonances(const TorusMap& map, const WeightSpec& weight,
                                        long alpha, int K, int grid,
                                        const ResonanceOptions& opt);

// Jordan structure of the eigenvalue mu of a dense matrix by SVD rank tests of
// (M - mu)^j: returns geometric multiplicity and block sizes.
struct JordanInfo {
  int n_geometric = 1;
  std::vector<int> block_sizes;
};
JordanInfo jordan_structure(const MatC& M, cplx mu, double tol = 1e-7);

// Rank-m spectral projector Pi = sum_j D_j (x) O_j with O_i(D_j) = delta_ij.
class SpectralProjector {
 public:
  SpectralProjector(std::vector<VecC> right, std::vector<VecC> left);
  static SpectralProjector from_record(const ResonanceRecord& rec);

  VecC apply(const VecC& v) const;
  int rank() const { return static_cast<int>(right_.size()); }
  double idempotency_defect() const;  // ||Pi^2 - Pi|| on a probe basis
  const std::vector<VecC>& right() const { return right_; }
  const std::vector<VecC>& left() const { return left_; }

 private:
  std::vector<VecC> right_, left_;
};

// ---- resolvent surrogate for map backends ------------------------------------
//
// Maps have no continuous-time semigroup, so the resolvent surrogate acts as
//   R_z = sum_i Pi_i / (z - lambda_i)              on the resonance subspace,
//   R_z = sum_{m>=1} e^{-z m} M^m (I - Pi_lead)    on the complement
// (the discrete Laplace transform of the available times; the sum is truncated
// once the terms fall below tail_tol, which for the cat-type matrices happens
// after the modes escape the truncation box).
class MapResolvent {
 public:
  MapResolvent(TransferMatrix tm, std::vector<ResonanceRecord> leading,
               double tail_tol = 1e-14, int max_terms = 400);

  VecC apply(cplx z, const VecC& phi, int n = 1) const;
  double growth_bound() const { return a0_; }
  const TransferMatrix& matrix() const { return tm_; }
  const std::vector<ResonanceRecord>& leading() const { return leading_; }

 private:
  TransferMatrix tm_;
  std::vector<ResonanceRecord> leading_;
  double tail_tol_;
  int max_terms_;
  double a0_ = 0.0;  // measured growth bound of the complement part
};

// ---- probes -------------------------------------------------------------------

struct LYProbeReport {
  double z_gap = 0.0;              // Re z - h_top used
  double bound_inv = 0.0;          // (Re z - lambda_min_est)^{-1}
  double complement_asymptote = 0.0;  // max over zero-mean samples of ||R^n phi||^{1/n}, n = n_max
  double eigen_rate = 0.0;         // measured ||R^n D||^{1/n} on the leading eigenvector
  double eigen_expected = 0.0;     // (Re z - h_top)^{-1}
  double best_C = 0.0;             // smallest C for the two-term inequality across samples
  std::vector<double> per_n_roots; // complement worst n-th roots per n
};

// Index exponents: strong (s,t,q), weak (s',t',q') with s'<s<0<q<=t, q-1<=q'<q, t'<t.
LYProbeReport lasota_yorke_probe(const MapResolvent& res, const DyadicPartition& part,
                                 const ConeEnsemble& ens, const AnisotropicIndex& strong,
                                 const AnisotropicIndex& weak, cplx z, int n_max,
                                 double lambda_min_est, int n_samples, uint64_t seed);

struct GrowthProbeReport {
  double rate_fit = 0.0;           // fitted growth rate of sup ||L_alpha phi|| / ||phi||
  double c_spectralbound = 0.0;    // max_alpha ratio / e^{h_top alpha} (horocycle weight)
  std::vector<double> alphas;
  std::vector<double> log_sup_ratio;
  std::vector<double> envelope_ratio;  // measured / (alpha+1) e^{lambda_min alpha}
};

GrowthProbeReport transfer_growth_probe(const TorusMap& map, const WeightSpec& weight,
                                        const DyadicPartition& part, const ConeEnsemble& ens,
                                        const AnisotropicIndex& index, int K, int grid,
                                        const std::vector<long>& alphas, int n_samples,
                                        double lambda_min_est, uint64_t seed);

struct DolgopyatSample {
  double im_z = 0.0;
  int n_tilde = 1;
  double norm_rn = 0.0;   // ||R^{n~}_{z+lambda_max}|| on the mode-0 complement
  double c_iterated = 0.0;  // C with C^{n~} normalization (footnote form)
  double c_flat = 0.0;      // C with flat normalization
};

struct DolgopyatReport {
  std::vector<DolgopyatSample> samples;
  double uniform_c_iterated = 0.0;
  bool uniform_c_exists = false;
};

DolgopyatReport dolgopyat_probe(const MapResolvent& res, double delta, double a, double b,
                                double gamma, double im_max, int n_im_samples,
                                double lambda_max);

// ---- suspension resolvent (pointwise quadrature) ------------------------------

class SuspensionResolvent {
 public:
  SuspensionResolvent(const SuspensionFlow& flow, const WeightSpec& weight, double growth_bound);

  // (R_z^n phi)(p) = int_0^inf a^{n-1} e^{-z a} / (n-1)! * phi_a(p) phi(g_{-a} p) da,
  // crossing-split composite quadrature with horizon e^{(A0 - Re z) h} <= tail_tol.
  cplx apply_at(cplx z, const std::function<cplx(const SuspPoint&)>& phi, const SuspPoint& p,
                int n = 1, double tail_tol = 1e-12) const;

  double growth_bound() const { return a0_; }

 private:
  const SuspensionFlow& flow_;
  WeightSpec weight_;
  double a0_;
};

}  // namespace anisores

#endif
