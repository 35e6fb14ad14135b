#ifndef ANISORES_MODELS_HPP
#define ANISORES_MODELS_HPP

#include <memory>
#include <string>
#include <vector>

#include "anisores/common.hpp"

namespace anisores {

// ---- d = 2 torus maps -------------------------------------------------------

struct DirectionCache;  // gridded direction fields with orbit refinement

// Hyperbolic torus map with integer time. flow/differential take integer steps;
// stable/unstable direction fields come from iterated differentials.
class TorusMap {
 public:
  TorusMap();
  virtual ~TorusMap();

  virtual Vec2 apply_map(const Vec2& x) const = 0;      // T x (mod 1)
  virtual Vec2 apply_inverse(const Vec2& x) const = 0;  // T^{-1} x (mod 1)
  virtual Mat2 jacobian(const Vec2& x) const = 0;       // DT at x
  virtual bool is_linear() const { return false; }
  virtual std::string name() const = 0;

  // lifted map on R^2 (perturbation is Z^2-periodic, so the lift is canonical)
  virtual Vec2 apply_lift(const Vec2& x) const = 0;
  virtual Vec2 apply_inverse_lift(const Vec2& x) const = 0;

  Vec2 flow(const Vec2& x, long alpha) const;           // T^alpha x
  Vec2 flow_lift(const Vec2& x, long alpha) const;
  Mat2 differential(const Vec2& x, long alpha) const;   // D(T^alpha) at x

  // unit stable/unstable directions by iterated differentials; residual is the
  // angle change in the last iteration
  Vec2 stable_direction(const Vec2& x, int iterations, double* residual = nullptr) const;
  Vec2 unstable_direction(const Vec2& x, int iterations, double* residual = nullptr) const;

  // unit covectors spanning E^*_- (orthogonal to E_+) and E^*_+ (orthogonal to E_-)
  Vec2 dual_stable(const Vec2& x, int iterations = 40) const;
  Vec2 dual_unstable(const Vec2& x, int iterations = 40) const;

  // |DT^alpha(x) e_s(x)| by stepwise normalized products (cancellation-free on
  // the contracting direction)
  double stable_stretch(const Vec2& x, long alpha) const;

  // cached direction fields: bilinear seed on a grid, sharpened by a few
  // invariance iterations along the orbit; agrees with stable_direction to
  // ~1e-11 and is an order of magnitude cheaper in hot loops
  Vec2 stable_dir_fast(const Vec2& x) const;
  Vec2 unstable_dir_fast(const Vec2& x) const;

 private:
  mutable std::unique_ptr<DirectionCache> dir_cache_;
  const DirectionCache& cache() const;
};

class LinearCatMap final : public TorusMap {
 public:
  LinearCatMap();
  Vec2 apply_map(const Vec2& x) const override;
  Vec2 apply_inverse(const Vec2& x) const override;
  Mat2 jacobian(const Vec2&) const override { return a_; }
  bool is_linear() const override { return true; }
  std::string name() const override { return "linear_cat"; }
  Vec2 apply_lift(const Vec2& x) const override;
  Vec2 apply_inverse_lift(const Vec2& x) const override;

  const Mat2& matrix() const { return a_; }
  const Vec2& stable_eigvec() const { return vs_; }    // unit, eigenvalue lambda_s
  const Vec2& unstable_eigvec() const { return vu_; }  // unit, eigenvalue lambda_u

 private:
  Mat2 a_, ainv_;
  Vec2 vs_, vu_;
};

class PerturbedCatMap final : public TorusMap {
 public:
  explicit PerturbedCatMap(double eps);
  Vec2 apply_map(const Vec2& x) const override;
  Vec2 apply_inverse(const Vec2& x) const override;
  Mat2 jacobian(const Vec2& x) const override;
  std::string name() const override { return "perturbed_cat"; }
  Vec2 apply_lift(const Vec2& x) const override;
  Vec2 apply_inverse_lift(const Vec2& x) const override;
  double eps() const { return eps_; }

 private:
  double eps_;
  Mat2 a_;
};

// ---- d = 3 suspension flow --------------------------------------------------

struct SuspPoint {
  Vec2 x;    // base point on T^2
  double u;  // height, 0 <= u < roof(x)
};

// Suspension of the linear cat map under roof r(x) = 1 + eps2 cos(2 pi x1),
// coordinates (x, u) with (x, r(x)) ~ (Tx, 0). Time-alpha map by exact
// piecewise advance. The chart metric is the product metric on the fundamental
// domain.
class SuspensionFlow {
 public:
  explicit SuspensionFlow(double eps2);

  double roof(const Vec2& x) const;
  Vec2 roof_grad(const Vec2& x) const;
  const LinearCatMap& base() const { return base_; }
  double eps2() const { return eps2_; }
  bool constant_roof() const { return eps2_ == 0.0; }

  SuspPoint flow(const SuspPoint& p, double alpha) const;
  // differential of the time-alpha map in (x1, x2, u) chart coordinates
  Mat3 differential(const SuspPoint& p, double alpha) const;
  // number of signed roof crossings over time alpha
  long crossings(const SuspPoint& p, double alpha) const;

  // leaf slope: the strong-stable direction at (x, u) is (v_s, delta(x)) / |.|
  double stable_slope(const Vec2& x) const;
  // backward-asymptotic analogue for the unstable direction
  double unstable_slope(const Vec2& x) const;
  Vec3 stable_direction(const SuspPoint& p) const;
  Vec3 unstable_direction(const SuspPoint& p) const;
  Vec3 flow_direction() const { return {0.0, 0.0, 1.0}; }

  // unit covectors of the dual splitting (orthogonal complements)
  Vec3 dual_stable(const SuspPoint& p) const;
  Vec3 dual_unstable(const SuspPoint& p) const;

  // |Dg_alpha(p) e_s(p)| by stepwise normalized products
  double stable_stretch(const SuspPoint& p, double alpha) const;

 private:
  LinearCatMap base_;
  double eps2_;
};

// ---- spec-level backend wrapper --------------------------------------------

enum class BackendKind { LinearCat, PerturbedCat, Suspension };

struct ModelBackend {
  BackendKind kind;
  double eps = 0.0;    // perturbed_cat amplitude
  double eps2 = 0.0;   // suspension roof amplitude
  std::shared_ptr<const TorusMap> map;          // set for map kinds
  std::shared_ptr<const SuspensionFlow> susp;   // set for suspension

  bool is_map() const { return kind != BackendKind::Suspension; }
  bool mixing_eligible() const {
    return is_map() || (susp && !susp->constant_roof());
  }
  std::string name() const;
};

ModelBackend make_backend(BackendKind kind, double eps = 0.0, double eps2 = 0.0);
ModelBackend make_backend(const std::string& kind_name, double eps = 0.0, double eps2 = 0.0);

// ---- expansion constants and entropy ----------------------------------------

// lambda^{(t,s,alpha)}(x): max of the powered restricted transposed-differential
// norms on the dual stable/unstable lines.
double expansion_constant(const ModelBackend& b, const Vec2& x, long alpha, double s, double t);
double expansion_constant_susp(const SuspensionFlow& f, const SuspPoint& p, double alpha,
                               double s, double t);

struct LambdaMinFit {
  double lambda_min = 0.0;      // fitted slope of log sup_x (...) vs alpha
  double r_squared = 1.0;
  std::vector<double> alphas;
  std::vector<double> log_sup;  // per-alpha log sup values
  bool has_det_formula = false; // d = 3 volume-preserving path (t~ = min{t,-s})
  double lambda_min_det = 0.0;
};

// weight_kind: "horocycle" or "unit" (constant 1). The sup runs over a sample
// grid; the d=3 det-formula path is filled for the suspension backend.
LambdaMinFit lambda_min_estimate(const ModelBackend& b, const std::string& weight_kind,
                                 double s, double t, double p,
                                 const std::vector<double>& alpha_range, int grid = 24);

double topological_entropy(const ModelBackend& b);

}  // namespace anisores

#endif
