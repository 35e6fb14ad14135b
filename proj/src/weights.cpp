#include "anisores/weights.hpp"

#include <cmath>

namespace anisores {

WeightSpec WeightSpec::constant(double c) {
  WeightSpec w;
  w.kind_ = Kind::Constant;
  w.c_ = c;
  return w;
}

WeightSpec WeightSpec::potential(std::function<double(const Vec2&)> v) {
  WeightSpec w;
  w.kind_ = Kind::Potential;
  w.v_ = std::move(v);
  return w;
}

WeightSpec WeightSpec::horocycle() {
  WeightSpec w;
  w.kind_ = Kind::Horocycle;
  return w;
}

std::string WeightSpec::name() const {
  switch (kind_) {
    case Kind::Constant: return "constant";
    case Kind::Potential: return "potential";
    case Kind::Horocycle: return "horocycle";
  }
  return "?";
}

double WeightSpec::eval_map(const TorusMap& map, const Vec2& x, long alpha) const {
  switch (kind_) {
    case Kind::Constant:
      return std::exp(c_ * static_cast<double>(alpha));
    case Kind::Potential: {
      // phi_n = exp(sum_{k=0}^{n-1} V(T^{-k}x)); negative time via the cocycle
      // inverse phi_{-n}(x) = 1 / phi_n(g_n x)
      double s = 0.0;
      if (alpha >= 0) {
        Vec2 y = x;
        for (long k = 0; k < alpha; ++k) {
          const double v = v_(y);
          if (!std::isfinite(v)) throw InvalidParameter("weight potential is non-finite");
          s += v;
          y = map.apply_inverse(y);
        }
        return std::exp(s);
      }
      Vec2 y = x;
      for (long k = 0; k < -alpha; ++k) {
        y = map.apply_map(y);
        s += v_(y);
      }
      return std::exp(-s);
    }
    case Kind::Horocycle:
      return map.stable_stretch(x, -alpha);
  }
  return 1.0;
}

double WeightSpec::eval_susp(const SuspensionFlow& flow, const SuspPoint& p, double alpha) const {
  switch (kind_) {
    case Kind::Constant:
      return std::exp(c_ * alpha);
    case Kind::Potential: {
      // composite midpoint quadrature of int_0^alpha V(g_{-a'} p) da' at step <= quad_step_
      const double len = std::abs(alpha);
      const int n = std::max(1, static_cast<int>(std::ceil(len / quad_step_)));
      const double h = alpha / n;
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const SuspPoint q = flow.flow(p, -(i + 0.5) * h);
        s += v_(q.x) * h;
      }
      return std::exp(s);
    }
    case Kind::Horocycle:
      return flow.stable_stretch(p, -alpha);
  }
  return 1.0;
}

double WeightSpec::generator_potential_map(const TorusMap& map, const Vec2& x) const {
  return std::log(eval_map(map, x, 1));
}

}  // namespace anisores
