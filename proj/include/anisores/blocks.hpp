#ifndef ANISORES_BLOCKS_HPP
#define ANISORES_BLOCKS_HPP

#include <map>
#include <string>
#include <vector>

#include "anisores/cones.hpp"
#include "anisores/fft.hpp"
#include "anisores/partition.hpp"

namespace anisores {

// Regularity exponents of the anisotropic norm: c(-) = s, c(+) = t, c(0) = q,
// with outer Lebesgue exponent p.
struct AnisotropicIndex {
  double s = -0.5;
  double t = 0.5;
  double q = 0.5;
  double p = 2.0;

  double c(int sigma) const { return sigma < 0 ? s : (sigma > 0 ? t : q); }
  bool lasota_yorke_mode() const { return s < 0.0 && 0.0 < q && q <= t; }
  void validate_ly() const {
    if (!lasota_yorke_mode())
      throw InvalidParameter("index exponents must satisfy s < 0 < q <= t");
  }
};

// Fourier coefficients of an observable organized into (sigma, n) cone-dyadic
// blocks on an N x N torus grid. Block (sigma,n) carries the coefficients
// Psi_{sigma,n}(k) * phihat(k).
class BlockField {
 public:
  BlockField(int grid, int max_level);

  int grid() const { return grid_; }
  int max_level() const { return max_level_; }

  // storage: blocks_[level][sigma_idx] with sigma order {-,+,0}
  std::vector<cplx>& block(int sigma, int n);
  const std::vector<cplx>& block(int sigma, int n) const;
  static int sigma_index(int sigma) { return sigma < 0 ? 0 : (sigma > 0 ? 1 : 2); }
  static int sigma_of_index(int i) { return i == 0 ? -1 : (i == 1 ? +1 : 0); }

  // sum of all block coefficient arrays (truncated Fourier reconstruction)
  std::vector<cplx> reconstruct_coeffs() const;

  void save(const std::string& path, const AnisotropicIndex& index) const;
  static BlockField load(const std::string& path, AnisotropicIndex* index_out = nullptr);

 private:
  int grid_, max_level_;
  std::vector<std::vector<cplx>> blocks_;  // [(n * 3) + sigma_idx]
};

// Psi^Op_{sigma,n} phi for all blocks: forward FFT, multiply by Psi_{sigma,n}(k),
// one block per (sigma, n). Coefficients are kept in frequency space; spatial
// samples of a block come from TorusFFT2::inverse.
BlockField block_apply(const DyadicPartition& partition, const ConeEnsemble& ensemble,
                       const std::vector<cplx>& samples, int grid);

// L_p norm over the grid of the pointwise l2^c norm across (sigma, n).
double local_norm(const BlockField& field, const AnisotropicIndex& index);

// Parseval shortcut for p = 2: weighted l2 norm of the coefficient vector with
// weight sum_{sigma,n} 4^{c(sigma) n} Psi_{sigma,n}(k)^2. Used by the matrix
// probes; agrees with local_norm at p = 2.
std::vector<double> norm_weights_p2(const DyadicPartition& partition,
                                    const ConeEnsemble& ensemble,
                                    const AnisotropicIndex& index, int K);

// ---- arrow relation (Baladi-Tsujii style) ----

// Norm data of a diffeomorphism on a region, from differential samples:
//   opnorm_src[tau]: sup_{x in I, eta in supp tPsi°_tau \cap B} |DF(x)^tr eta|
//   opnorm_dst[sigma]: sup_{x in F(I), xi in supp Psi_sigma \cap B} |DF^{-1}(x)^tr xi|
struct ArrowNorms {
  std::array<double, 3> src{};  // indexed by sigma_index
  std::array<double, 3> dst{};
};

ArrowNorms arrow_norms(const std::vector<Mat2>& dF_on_I, const std::vector<Mat2>& dFinv_on_FI,
                       const ConeEnsemble& theta_src, const ConeEnsemble& theta_dst);

struct ArrowPair {
  int tau, ell, sigma, n;
};

struct ArrowReport {
  std::vector<ArrowPair> admissible;           // all (tau,l) -> (sigma,n) arrows
  std::map<std::pair<int, int>, double> bound; // C * ||F||_{sigma,tau,I} per (sigma,tau)
};

// Admissible-pair set of Definition-3.5 type:
//   (tau,l) -> (sigma,n)  iff  c(sigma) <= c'(tau) and
//   ||F||_{sigma,I}^{-1} 2^{-4} <= 2^{n-l} <= 2^4 ||F||_{tau,I,o},
// plus the geometric-sum bound constant per (sigma,tau).
ArrowReport arrow_partition(const ArrowNorms& norms, const AnisotropicIndex& c,
                            const AnisotropicIndex& c_prime, int max_level);

}  // namespace anisores

#endif
