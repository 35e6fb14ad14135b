#ifndef ANISORES_PARTITION_HPP
#define ANISORES_PARTITION_HPP

#include <vector>

#include "anisores/common.hpp"

namespace anisores {

// Smooth decreasing profile chi on (0,inf): chi = 1 on (0,1], chi = 0 on [2,inf),
// realized as a C^order polynomial smoothstep on [1,2]. chi(1) = 1 and chi(2) = 0
// hold exactly.
class ChiProfile {
 public:
  explicit ChiProfile(int order);
  double operator()(double u) const;
  double derivative(double u) const;
  int order() const { return order_; }

 private:
  int order_;
  std::vector<double> coeff_;  // smoothstep polynomial coefficients in t = u - 1
};

enum class SmoothNorm { Euclidean };

// Dyadic partition of frequency space:
//   Psi_0(xi) = chi(|xi|),  Psi_n(xi) = chi(|2^-n xi|) - chi(|2^{1-n} xi|), n >= 1.
class DyadicPartition {
 public:
  DyadicPartition(int chi_order, SmoothNorm norm_choice, int max_level);

  double psi(int n, double r) const;         // radial profile Psi_n at |xi| = r
  double psi(int n, const Vec2& xi) const { return psi(n, norm(xi)); }
  double psi(int n, const Vec3& xi) const { return psi(n, norm(xi)); }
  // tilde version: == 1 on supp Psi_n, support in the slightly larger annulus
  // [2^{n-2}, 2^{n+2}] (n >= 1), built from the same profile family.
  double psi_tilde(int n, double r) const;

  double chi(double u) const { return chi_(u); }
  int max_level() const { return max_level_; }
  int chi_order() const { return chi_.order(); }

 private:
  ChiProfile chi_;
  int max_level_;
};

DyadicPartition build_partition(int chi_order, SmoothNorm norm_choice, int max_level);

}  // namespace anisores

#endif
