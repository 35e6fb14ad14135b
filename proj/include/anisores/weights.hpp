#ifndef ANISORES_WEIGHTS_HPP
#define ANISORES_WEIGHTS_HPP

#include <functional>
#include <string>

#include "anisores/models.hpp"

namespace anisores {

// Weight cocycle phi_alpha of the transfer operator L_{alpha,phi_alpha}.
// Kinds:
//   constant c:   phi_alpha = e^{c alpha}
//   potential V:  phi_alpha(x) = exp(int_0^alpha V(g_{-a'} x) da')   (flows)
//                 phi_n(x) = exp(sum_{k=0}^{n-1} V(T^{-k} x))        (maps)
//   horocycle:    phi_alpha = d_rho tau(0,-alpha,.) = |Dg_{-alpha} e_s| (unit speed)
class WeightSpec {
 public:
  static WeightSpec constant(double c);
  static WeightSpec potential(std::function<double(const Vec2&)> v);
  static WeightSpec horocycle();

  bool is_constant() const { return kind_ == Kind::Constant; }
  bool is_horocycle() const { return kind_ == Kind::Horocycle; }
  double constant_value() const { return c_; }
  std::string name() const;

  // evaluation on map backends, integer time
  double eval_map(const TorusMap& map, const Vec2& x, long alpha) const;
  // evaluation on the suspension, real time
  double eval_susp(const SuspensionFlow& flow, const SuspPoint& p, double alpha) const;

  // V = d_alpha phi_alpha |_{alpha=0+}: for maps log phi_1, for flows the
  // potential itself (finite difference for the horocycle kind)
  double generator_potential_map(const TorusMap& map, const Vec2& x) const;

 private:
  enum class Kind { Constant, Potential, Horocycle };
  Kind kind_ = Kind::Constant;
  double c_ = 0.0;
  std::function<double(const Vec2&)> v_;
  double quad_step_ = 1e-3;  // time-quadrature step for potential weights on flows
};

}  // namespace anisores

#endif
