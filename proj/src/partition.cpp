#include "anisores/partition.hpp"

#include <cmath>

namespace anisores {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

ChiProfile::ChiProfile(int order) : order_(order) {
  if (order < 2) throw InvalidParameter("chi_order must be >= 2");
  // S_m(t) = t^{m+1} sum_{k=0}^m binom(m+k,k) binom(2m+1,m-k) (-t)^k is the
  // C^m smoothstep with S_m(0)=0, S_m(1)=1; chi(1+t) = 1 - S_m(t).
  coeff_.assign(order + 1, 0.0);
  for (int k = 0; k <= order_; ++k)
    coeff_[k] = binom(order_ + k, k) * binom(2 * order_ + 1, order_ - k) * ((k % 2) ? -1.0 : 1.0);
}

double ChiProfile::operator()(double u) const {
  if (u <= 1.0) return 1.0;
  if (u >= 2.0) return 0.0;
  const double t = u - 1.0;
  double s = 0.0;
  for (int k = order_; k >= 0; --k) s = s * t + coeff_[k];
  // s is now sum coeff_k t^k; multiply by t^{m+1}
  return 1.0 - s * std::pow(t, order_ + 1);
}

double ChiProfile::derivative(double u) const {
  if (u <= 1.0 || u >= 2.0) return 0.0;
  const double t = u - 1.0;
  double s = 0.0, ds = 0.0;
  for (int k = order_; k >= 0; --k) {
    ds = ds * t + s;
    s = s * t + coeff_[k];
  }
  return -(ds * std::pow(t, order_ + 1) + s * (order_ + 1) * std::pow(t, order_));
}

DyadicPartition::DyadicPartition(int chi_order, SmoothNorm, int max_level)
    : chi_(chi_order), max_level_(max_level) {
  if (max_level < 1) throw InvalidParameter("max_level must be >= 1");
}

double DyadicPartition::psi(int n, double r) const {
  if (r <= 0.0) return n == 0 ? 1.0 : 0.0;
  if (n == 0) return chi_(r);
  const double sc = std::ldexp(1.0, -n);  // 2^-n
  return chi_(sc * r) - chi_(2.0 * sc * r);
}

double DyadicPartition::psi_tilde(int n, double r) const {
  if (r <= 0.0) return n == 0 ? 1.0 : 0.0;
  // plateau over the support annulus [2^{n-1}, 2^{n+1}] of Psi_n
  if (n == 0) return chi_(0.5 * r);
  const double u = std::ldexp(1.0, -n) * r;  // supp Psi_n in scaled variable: [1/2, 2]
  if (u >= 0.5 && u <= 2.0) return 1.0;
  if (u < 0.5) return 1.0 - chi_(4.0 * u);  // rises 0 -> 1 on [1/4, 1/2]
  return chi_(0.5 * u);                     // falls 1 -> 0 on [2, 4]
}

DyadicPartition build_partition(int chi_order, SmoothNorm norm_choice, int max_level) {
  return DyadicPartition(chi_order, norm_choice, max_level);
}

}  // namespace anisores
