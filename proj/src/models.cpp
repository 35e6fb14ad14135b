#include "anisores/models.hpp"

#include <cmath>

namespace anisores {

// ---- direction cache ----------------------------------------------------------

struct DirectionCache {
  int n = 256;
  std::vector<Vec2> stable, unstable;  // oriented unit fields at (i+.5)/n cells

  Vec2 lookup(const std::vector<Vec2>& f, const Vec2& x) const {
    // bilinear on cell centers with periodic wrap
    const double gx = x[0] * n - 0.5, gy = x[1] * n - 0.5;
    const int i0 = static_cast<int>(std::floor(gx)), j0 = static_cast<int>(std::floor(gy));
    const double fx = gx - i0, fy = gy - j0;
    auto at = [&](int i, int j) -> const Vec2& {
      return f[static_cast<size_t>((i % n + n) % n) * n + ((j % n + n) % n)];
    };
    const Vec2& a = at(i0, j0);
    const Vec2& b = at(i0 + 1, j0);
    const Vec2& c = at(i0, j0 + 1);
    const Vec2& d = at(i0 + 1, j0 + 1);
    Vec2 v{(1 - fx) * ((1 - fy) * a[0] + fy * c[0]) + fx * ((1 - fy) * b[0] + fy * d[0]),
           (1 - fx) * ((1 - fy) * a[1] + fy * c[1]) + fx * ((1 - fy) * b[1] + fy * d[1])};
    const double nv = norm(v);
    return {v[0] / nv, v[1] / nv};
  }
};

const DirectionCache& TorusMap::cache() const {
  if (!dir_cache_) {
    auto c = std::make_unique<DirectionCache>();
    const int n = c->n;
    c->stable.resize(static_cast<size_t>(n) * n);
    c->unstable.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 x{(i + 0.5) / n, (j + 0.5) / n};
        c->stable[static_cast<size_t>(i) * n + j] = stable_direction(x, 18);
        c->unstable[static_cast<size_t>(i) * n + j] = unstable_direction(x, 18);
      }
    }
    dir_cache_ = std::move(c);
  }
  return *dir_cache_;
}

Vec2 TorusMap::stable_dir_fast(const Vec2& x) const {
  if (is_linear()) return static_cast<const LinearCatMap*>(this)->stable_eigvec();
  const DirectionCache& c = cache();
  // sharpen by pulling the interpolated seed back along the forward orbit:
  // e_s(x) ~ inv(J(x)) ... inv(J(T^{k-1}x)) e~(T^k x), error contracts by
  // (lambda_s/lambda_u)^k
  constexpr int k = 6;
  Vec2 orbit[k];
  Vec2 y = x;
  for (int j = 0; j < k; ++j) {
    orbit[j] = y;
    y = apply_map(y);
  }
  Vec2 v = c.lookup(c.stable, y);
  for (int j = k - 1; j >= 0; --j) {
    v = matvec(inverse(jacobian(orbit[j])), v);
    const double nv = norm(v);
    v = (1.0 / nv) * v;
  }
  const Vec2 ref{0.52573111211913360602566908484788, -0.85065080835203993218154049706301};
  if (dot(v, ref) < 0.0) v = -1.0 * v;
  return v;
}

Vec2 TorusMap::unstable_dir_fast(const Vec2& x) const {
  if (is_linear()) return static_cast<const LinearCatMap*>(this)->unstable_eigvec();
  const DirectionCache& c = cache();
  constexpr int k = 6;
  Vec2 orbit[k];
  Vec2 y = x;
  for (int j = 0; j < k; ++j) {
    y = apply_inverse(y);
    orbit[j] = y;
  }
  Vec2 v = c.lookup(c.unstable, y);
  for (int j = k - 1; j >= 0; --j) {
    v = matvec(jacobian(orbit[j]), v);
    const double nv = norm(v);
    v = (1.0 / nv) * v;
  }
  const Vec2 ref{0.85065080835203993218154049706301, 0.52573111211913360602566908484788};
  if (dot(v, ref) < 0.0) v = -1.0 * v;
  return v;
}

// ---- TorusMap ---------------------------------------------------------------

TorusMap::TorusMap() = default;
TorusMap::~TorusMap() = default;

Vec2 TorusMap::flow(const Vec2& x, long alpha) const {
  Vec2 y = x;
  if (alpha >= 0)
    for (long i = 0; i < alpha; ++i) y = apply_map(y);
  else
    for (long i = 0; i < -alpha; ++i) y = apply_inverse(y);
  return y;
}

Vec2 TorusMap::flow_lift(const Vec2& x, long alpha) const {
  Vec2 y = x;
  if (alpha >= 0)
    for (long i = 0; i < alpha; ++i) y = apply_lift(y);
  else
    for (long i = 0; i < -alpha; ++i) y = apply_inverse_lift(y);
  return y;
}

Mat2 TorusMap::differential(const Vec2& x, long alpha) const {
  Mat2 m{{{1.0, 0.0}, {0.0, 1.0}}};
  if (alpha >= 0) {
    Vec2 y = x;
    for (long i = 0; i < alpha; ++i) {
      m = matmul(jacobian(y), m);
      y = apply_map(y);
    }
  } else {
    Vec2 y = x;
    for (long i = 0; i < -alpha; ++i) {
      y = apply_inverse(y);
      m = matmul(inverse(jacobian(y)), m);
    }
  }
  return m;
}

Vec2 TorusMap::stable_direction(const Vec2& x, int iterations, double* residual) const {
  if (iterations < 1) throw InvalidParameter("stable_direction: iterations must be >= 1");
  // backward push of a generic vector by the inverse differentials along the
  // forward orbit: image direction converges to E_-(x)
  std::vector<Vec2> orbit(static_cast<size_t>(iterations) + 1);
  orbit[0] = x;
  for (int i = 0; i < iterations; ++i) orbit[i + 1] = apply_map(orbit[i]);
  auto pull = [&](int n) {
    Vec2 v{0.3183098861837907, 0.9479357889858157};  // fixed generic direction
    for (int j = n - 1; j >= 0; --j) {
      v = matvec(inverse(jacobian(orbit[j])), v);
      const double nv = norm(v);
      v = (1.0 / nv) * v;
    }
    return v;
  };
  Vec2 v = pull(iterations);
  Vec2 v_prev = pull(iterations - 1);
  double res = std::abs(v[0] * v_prev[1] - v[1] * v_prev[0]);  // sin of angle change
  if (residual) *residual = res;
  if (res > 1e-9 && iterations >= 8)
    throw ConvergenceError("stable_direction: residual " + std::to_string(res));
  // orient along the linear model's stable eigenvector
  const Vec2 ref{0.52573111211913360602566908484788, -0.85065080835203993218154049706301};
  if (dot(v, ref) < 0.0) v = -1.0 * v;
  return v;
}

Vec2 TorusMap::unstable_direction(const Vec2& x, int iterations, double* residual) const {
  if (iterations < 1) throw InvalidParameter("unstable_direction: iterations must be >= 1");
  std::vector<Vec2> orbit(static_cast<size_t>(iterations) + 1);
  orbit[0] = x;
  for (int i = 0; i < iterations; ++i) orbit[i + 1] = apply_inverse(orbit[i]);
  auto push = [&](int n) {
    Vec2 v{0.3183098861837907, 0.9479357889858157};
    for (int j = n; j >= 1; --j) {
      v = matvec(jacobian(orbit[j]), v);
      const double nv = norm(v);
      v = (1.0 / nv) * v;
    }
    return v;
  };
  Vec2 v = push(iterations);
  Vec2 v_prev = push(iterations - 1);
  double res = std::abs(v[0] * v_prev[1] - v[1] * v_prev[0]);
  if (residual) *residual = res;
  if (res > 1e-9 && iterations >= 8)
    throw ConvergenceError("unstable_direction: residual " + std::to_string(res));
  const Vec2 ref{0.85065080835203993218154049706301, 0.52573111211913360602566908484788};
  if (dot(v, ref) < 0.0) v = -1.0 * v;
  return v;
}

Vec2 TorusMap::dual_stable(const Vec2& x, int iterations) const {
  const Vec2 eu = unstable_direction(x, iterations);
  Vec2 w{-eu[1], eu[0]};  // unit, orthogonal to E_+
  const Vec2 es = stable_direction(x, iterations);
  if (dot(w, es) < 0.0) w = -1.0 * w;  // normalize pairing sign
  return w;
}

Vec2 TorusMap::dual_unstable(const Vec2& x, int iterations) const {
  const Vec2 es = stable_direction(x, iterations);
  Vec2 w{-es[1], es[0]};
  const Vec2 eu = unstable_direction(x, iterations);
  if (dot(w, eu) < 0.0) w = -1.0 * w;
  return w;
}

double TorusMap::stable_stretch(const Vec2& x, long alpha) const {
  if (is_linear()) return std::pow(kLambdaS, static_cast<double>(alpha));
  Vec2 v = stable_dir_fast(x);
  Vec2 y = x;
  double acc = 0.0;
  if (alpha >= 0) {
    for (long j = 0; j < alpha; ++j) {
      const Vec2 w = matvec(jacobian(y), v);
      const double nw = norm(w);
      acc += std::log(nw);
      v = (1.0 / nw) * w;
      y = apply_map(y);
    }
  } else {
    for (long j = 0; j < -alpha; ++j) {
      y = apply_inverse(y);
      const Vec2 w = matvec(inverse(jacobian(y)), v);
      const double nw = norm(w);
      acc += std::log(nw);
      v = (1.0 / nw) * w;
    }
  }
  return std::exp(acc);
}

// ---- LinearCatMap -----------------------------------------------------------

LinearCatMap::LinearCatMap() {
  a_ = {{{2.0, 1.0}, {1.0, 1.0}}};
  ainv_ = {{{1.0, -1.0}, {-1.0, 2.0}}};
  // A is symmetric: unit eigenvectors for lambda_s, lambda_u
  const double g = (1.0 + kSqrt5) / 2.0;
  const double ns = std::sqrt(1.0 + g * g);
  vs_ = {1.0 / ns, -g / ns};
  const double h = (kSqrt5 - 1.0) / 2.0;
  const double nu = std::sqrt(1.0 + h * h);
  vu_ = {1.0 / nu, h / nu};
}

Vec2 LinearCatMap::apply_map(const Vec2& x) const { return mod1(matvec(a_, x)); }
Vec2 LinearCatMap::apply_inverse(const Vec2& x) const { return mod1(matvec(ainv_, x)); }
Vec2 LinearCatMap::apply_lift(const Vec2& x) const { return matvec(a_, x); }
Vec2 LinearCatMap::apply_inverse_lift(const Vec2& x) const { return matvec(ainv_, x); }

// ---- PerturbedCatMap --------------------------------------------------------

PerturbedCatMap::PerturbedCatMap(double eps) : eps_(eps) {
  a_ = {{{2.0, 1.0}, {1.0, 1.0}}};
  if (std::abs(eps) > 0.05)
    throw InvalidParameter("perturbed_cat: |eps| > 0.05 leaves the verified Anosov range");
}

Vec2 PerturbedCatMap::apply_lift(const Vec2& x) const {
  return {2.0 * x[0] + x[1] + eps_ * std::sin(kTwoPi * x[1]),
          x[0] + x[1] + eps_ * std::sin(kTwoPi * x[0])};
}

Vec2 PerturbedCatMap::apply_map(const Vec2& x) const { return mod1(apply_lift(x)); }

Vec2 PerturbedCatMap::apply_inverse_lift(const Vec2& y) const {
  // Newton on F(x) = A x + eps P(x) - y
  const Mat2 ainv{{{1.0, -1.0}, {-1.0, 2.0}}};
  Vec2 x = matvec(ainv, y);
  for (int it = 0; it < 30; ++it) {
    const Vec2 f{2.0 * x[0] + x[1] + eps_ * std::sin(kTwoPi * x[1]) - y[0],
                 x[0] + x[1] + eps_ * std::sin(kTwoPi * x[0]) - y[1]};
    const Vec2 dx = matvec(inverse(jacobian(x)), f);
    x = Vec2{x[0] - dx[0], x[1] - dx[1]};
    if (std::abs(dx[0]) + std::abs(dx[1]) < 1e-15) break;
  }
  return x;
}

Vec2 PerturbedCatMap::apply_inverse(const Vec2& y) const { return mod1(apply_inverse_lift(y)); }

Mat2 PerturbedCatMap::jacobian(const Vec2& x) const {
  const double c1 = kTwoPi * eps_ * std::cos(kTwoPi * x[0]);
  const double c2 = kTwoPi * eps_ * std::cos(kTwoPi * x[1]);
  return {{{2.0, 1.0 + c2}, {1.0 + c1, 1.0}}};
}

// ---- SuspensionFlow ---------------------------------------------------------

SuspensionFlow::SuspensionFlow(double eps2) : eps2_(eps2) {
  if (eps2 < 0.0 || eps2 >= 1.0) throw InvalidParameter("suspension: need 0 <= eps2 < 1 for roof > 0");
}

double SuspensionFlow::roof(const Vec2& x) const { return 1.0 + eps2_ * std::cos(kTwoPi * x[0]); }
Vec2 SuspensionFlow::roof_grad(const Vec2& x) const {
  return {-kTwoPi * eps2_ * std::sin(kTwoPi * x[0]), 0.0};
}

SuspPoint SuspensionFlow::flow(const SuspPoint& p, double alpha) const {
  Vec2 x = p.x;
  double w = p.u + alpha;
  while (w >= roof(x)) {
    w -= roof(x);
    x = base_.apply_map(x);
  }
  while (w < 0.0) {
    x = base_.apply_inverse(x);
    w += roof(x);
  }
  return {x, w};
}

long SuspensionFlow::crossings(const SuspPoint& p, double alpha) const {
  Vec2 x = p.x;
  double w = p.u + alpha;
  long n = 0;
  while (w >= roof(x)) {
    w -= roof(x);
    x = base_.apply_map(x);
    ++n;
  }
  while (w < 0.0) {
    x = base_.apply_inverse(x);
    w += roof(x);
    --n;
  }
  return n;
}

Mat3 SuspensionFlow::differential(const SuspPoint& p, double alpha) const {
  // identity between crossings; at an up-crossing the chart changes by
  // G(x,u) = (Tx, u - r(x)) with DG = [[A, 0], [-grad r, 1]]
  Mat3 m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  Vec2 x = p.x;
  double w = p.u + alpha;
  const Mat2& a = base_.matrix();
  while (w >= roof(x)) {
    const Vec2 gr = roof_grad(x);
    Mat3 g{{{a[0][0], a[0][1], 0.0}, {a[1][0], a[1][1], 0.0}, {-gr[0], -gr[1], 1.0}}};
    m = matmul(g, m);
    w -= roof(x);
    x = base_.apply_map(x);
  }
  const Mat2 ainv = inverse(base_.matrix());
  while (w < 0.0) {
    x = base_.apply_inverse(x);
    const Vec2 gr = roof_grad(x);
    // inverse gluing: (y, v) -> (T^{-1} y, v + r(T^{-1} y))
    Mat3 g{{{ainv[0][0], ainv[0][1], 0.0},
            {ainv[1][0], ainv[1][1], 0.0},
            {gr[0] * ainv[0][0] + gr[1] * ainv[1][0], gr[0] * ainv[0][1] + gr[1] * ainv[1][1], 1.0}}};
    m = matmul(g, m);
    w += roof(x);
  }
  return m;
}

double SuspensionFlow::stable_slope(const Vec2& x) const {
  if (eps2_ == 0.0) return 0.0;
  const Vec2& vs = base_.stable_eigvec();
  double slope = 0.0, pw = 1.0;
  Vec2 y = x;
  for (int j = 0; j < 80; ++j) {
    slope += pw * dot(roof_grad(y), vs);
    pw *= kLambdaS;
    if (pw < 1e-18) break;
    y = base_.apply_map(y);
  }
  return slope;
}

double SuspensionFlow::unstable_slope(const Vec2& x) const {
  if (eps2_ == 0.0) return 0.0;
  const Vec2& vu = base_.unstable_eigvec();
  double slope = 0.0, pw = 1.0 / kLambdaU;
  Vec2 y = x;
  for (int j = 1; j < 80; ++j) {
    y = base_.apply_inverse(y);
    slope -= pw * dot(roof_grad(y), vu);
    pw /= kLambdaU;
    if (pw < 1e-18) break;
  }
  return slope;
}

Vec3 SuspensionFlow::stable_direction(const SuspPoint& p) const {
  const Vec2& vs = base_.stable_eigvec();
  const double d = stable_slope(p.x);
  const double n = std::sqrt(1.0 + d * d);
  return {vs[0] / n, vs[1] / n, d / n};
}

Vec3 SuspensionFlow::unstable_direction(const SuspPoint& p) const {
  const Vec2& vu = base_.unstable_eigvec();
  const double d = unstable_slope(p.x);
  const double n = std::sqrt(1.0 + d * d);
  return {vu[0] / n, vu[1] / n, d / n};
}

namespace {
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
}  // namespace

Vec3 SuspensionFlow::dual_stable(const SuspPoint& p) const {
  // orthogonal to E_+ and E_0
  Vec3 w = cross(unstable_direction(p), flow_direction());
  const double n = norm(w);
  w = (1.0 / n) * w;
  if (dot(w, stable_direction(p)) < 0.0) w = -1.0 * w;
  return w;
}

Vec3 SuspensionFlow::dual_unstable(const SuspPoint& p) const {
  Vec3 w = cross(stable_direction(p), flow_direction());
  const double n = norm(w);
  w = (1.0 / n) * w;
  if (dot(w, unstable_direction(p)) < 0.0) w = -1.0 * w;
  return w;
}

// ---- ModelBackend -----------------------------------------------------------

std::string ModelBackend::name() const {
  switch (kind) {
    case BackendKind::LinearCat: return "linear_cat";
    case BackendKind::PerturbedCat: return "perturbed_cat";
    case BackendKind::Suspension: return "suspension";
  }
  return "?";
}

ModelBackend make_backend(BackendKind kind, double eps, double eps2) {
  ModelBackend b;
  b.kind = kind;
  b.eps = eps;
  b.eps2 = eps2;
  switch (kind) {
    case BackendKind::LinearCat:
      b.map = std::make_shared<LinearCatMap>();
      break;
    case BackendKind::PerturbedCat:
      b.map = std::make_shared<PerturbedCatMap>(eps);
      break;
    case BackendKind::Suspension:
      b.susp = std::make_shared<SuspensionFlow>(eps2);
      break;
  }
  return b;
}

ModelBackend make_backend(const std::string& kind_name, double eps, double eps2) {
  if (kind_name == "linear_cat") return make_backend(BackendKind::LinearCat, eps, eps2);
  if (kind_name == "perturbed_cat") return make_backend(BackendKind::PerturbedCat, eps, eps2);
  if (kind_name == "suspension") return make_backend(BackendKind::Suspension, eps, eps2);
  throw InvalidParameter("unknown backend kind: " + kind_name);
}

// ---- expansion constants ----------------------------------------------------

namespace {

// stepwise normalized covector stretches (the restricted transposed norms of
// the expansion constant); full matrix products cancel catastrophically on the
// contracting codirections for large alpha
double dual_stretch_map(const TorusMap& map, const Vec2& x, long alpha, bool plus_cone) {
  // plus_cone: || (D_{g_alpha x} g_{-alpha})^tr e*_+(x) ||, stepping forward;
  // else:      || (D_{g_{-alpha} x} g_alpha)^tr e*_-(x) ||, stepping backward
  Vec2 w = plus_cone ? map.dual_unstable(x) : map.dual_stable(x);
  double acc = 0.0;
  Vec2 y = x;
  for (long j = 1; j <= alpha; ++j) {
    const Vec2 yn = plus_cone ? map.apply_map(y) : map.apply_inverse(y);
    // single-step differential with the transpose mapping T*_y -> T*_{yn}
    const Mat2 m =
        plus_cone ? map.differential(yn, -1) /* T_{yn} -> T_y */
                  : map.differential(yn, +1) /* T_{yn} -> T_y */;
    const Vec2 wn = matvec(transpose(m), w);
    const double nw = norm(wn);
    acc += std::log(nw);
    w = (1.0 / nw) * wn;
    y = yn;
  }
  return std::exp(acc);
}

double dual_stretch_susp(const SuspensionFlow& f, const SuspPoint& p, double alpha,
                         bool plus_cone) {
  Vec3 w = plus_cone ? f.dual_unstable(p) : f.dual_stable(p);
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(alpha))));
  const double dt = alpha / steps;
  double acc = 0.0;
  SuspPoint q = p;
  for (int j = 1; j <= steps; ++j) {
    const SuspPoint qn = f.flow(q, plus_cone ? dt : -dt);
    const Mat3 m = plus_cone ? f.differential(qn, -dt) : f.differential(qn, +dt);
    const Vec3 wn = matvec(transpose(m), w);
    const double nw = norm(wn);
    acc += std::log(nw);
    w = (1.0 / nw) * wn;
    q = qn;
  }
  return std::exp(acc);
}

}  // namespace

double expansion_constant(const ModelBackend& b, const Vec2& x, long alpha, double s, double t) {
  if (!b.is_map()) throw InvalidParameter("expansion_constant: use the suspension overload");
  if (alpha == 0) return 1.0;
  const double term1 = dual_stretch_map(*b.map, x, alpha, true);
  const double term2 = dual_stretch_map(*b.map, x, alpha, false);
  return std::max(std::pow(term1, t), std::pow(term2, -s));
}

double expansion_constant_susp(const SuspensionFlow& f, const SuspPoint& p, double alpha,
                               double s, double t) {
  if (alpha == 0.0) return 1.0;
  const double term1 = dual_stretch_susp(f, p, alpha, true);
  const double term2 = dual_stretch_susp(f, p, alpha, false);
  return std::max(std::pow(term1, t), std::pow(term2, -s));
}

double SuspensionFlow::stable_stretch(const SuspPoint& p, double alpha) const {
  Vec3 v = stable_direction(p);
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(alpha))));
  const double dt = alpha / steps;
  double acc = 0.0;
  SuspPoint q = p;
  for (int j = 0; j < steps; ++j) {
    const Vec3 w = matvec(differential(q, dt), v);
    const double nw = norm(w);
    acc += std::log(nw);
    v = (1.0 / nw) * w;
    q = flow(q, dt);
  }
  return std::exp(acc);
}

double topological_entropy(const ModelBackend&) {
  // maps: log lambda_u of the linear part (structural stability for small eps);
  // suspension: h(base) / mean roof under the base's measure of maximal entropy
  // (Lebesgue for the linear base; the cosine roof has Lebesgue mean 1).
  return std::log(kLambdaU);
}

// ---- lambda_min -------------------------------------------------------------

namespace {

double horocycle_weight_map(const TorusMap& map, const Vec2& x, long alpha) {
  // phi_alpha = || DT^{-alpha}(x) e_s(x) || (unit-speed stable Jacobian at -alpha)
  return map.stable_stretch(x, -alpha);
}

double horocycle_weight_susp(const SuspensionFlow& f, const SuspPoint& p, double alpha) {
  return f.stable_stretch(p, -alpha);
}

}  // namespace

LambdaMinFit lambda_min_estimate(const ModelBackend& b, const std::string& weight_kind,
                                 double s, double t, double p,
                                 const std::vector<double>& alpha_range, int grid) {
  if (!(s < 0.0 && 0.0 < t)) throw InvalidParameter("lambda_min_estimate: need s < 0 < t");
  LambdaMinFit fit;
  fit.alphas = alpha_range;
  const bool unit_weight = (weight_kind == "unit");
  if (!unit_weight && weight_kind != "horocycle")
    throw InvalidParameter("lambda_min_estimate: weight_kind must be 'horocycle' or 'unit'");
  const double ttilde = std::min(t, -s);

  for (double alpha : alpha_range) {
    double sup_log = -1e300;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const Vec2 x{(i + 0.37) / grid, (j + 0.61) / grid};
        if (b.is_map()) {
          const long n = std::lround(alpha);
          const double w = unit_weight ? 1.0 : horocycle_weight_map(*b.map, x, n);
          const double dd = std::abs(det(b.map->differential(x, -n)));
          const double lam = expansion_constant(b, x, n, s, t);
          sup_log = std::max(sup_log, std::log(w) - std::log(dd) / p + std::log(lam));
        } else {
          const SuspPoint pt{x, 0.31 * b.susp->roof(x)};
          const double w = unit_weight ? 1.0 : horocycle_weight_susp(*b.susp, pt, alpha);
          const double dd = std::abs(det(b.susp->differential(pt, -alpha)));
          const double lam = expansion_constant_susp(*b.susp, pt, alpha, s, t);
          sup_log = std::max(sup_log, std::log(w) - std::log(dd) / p + std::log(lam));
        }
      }
    }
    fit.log_sup.push_back(sup_log);
  }

  // least-squares slope of log_sup vs alpha
  auto slope_fit = [](const std::vector<double>& xs, const std::vector<double>& ys, double* r2) {
    const size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
      syy += ys[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    if (r2) {
      const double num = (n * sxy - sx * sy);
      const double den = std::sqrt(denom * (n * syy - sy * sy));
      *r2 = den > 0 ? (num / den) * (num / den) : 1.0;
    }
    return slope;
  };
  fit.lambda_min = slope_fit(fit.alphas, fit.log_sup, &fit.r_squared);

  if (!b.is_map()) {
    // redo the det-formula sweep to collect its own series
    std::vector<double> det_series;
    for (double alpha : alpha_range) {
      double sup_log_det = -1e300;
      for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
          const Vec2 x{(i + 0.37) / grid, (j + 0.61) / grid};
          const SuspPoint pt{x, 0.31 * b.susp->roof(x)};
          const double w =
              unit_weight ? 1.0 : horocycle_weight_susp(*b.susp, pt, alpha);
          const double detm = dual_stretch_susp(*b.susp, pt, alpha, false);
          sup_log_det = std::max(sup_log_det, std::log(w) + ttilde * std::log(detm));
        }
      }
      det_series.push_back(sup_log_det);
    }
    fit.lambda_min_det = slope_fit(fit.alphas, det_series, nullptr);
    fit.has_det_formula = true;
  }
  return fit;
}

}  // namespace anisores
