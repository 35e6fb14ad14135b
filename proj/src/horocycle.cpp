#include "anisores/horocycle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace anisores {

// ==== MapHorocycle ============================================================

MapHorocycle::MapHorocycle(std::shared_ptr<const TorusMap> map, double rk_step)
    : map_(std::move(map)), h_(rk_step) {}

Vec2 MapHorocycle::stable_field(const Vec2& x) const {
  return map_->stable_dir_fast(mod1(x));
}

Vec2 MapHorocycle::march(const Vec2& start_lift, double rho) const {
  if (map_->is_linear()) {
    const Vec2 vs = static_cast<const LinearCatMap*>(map_.get())->stable_eigvec();
    return start_lift + rho * vs;
  }
  const double sgn = rho >= 0.0 ? 1.0 : -1.0;
  double remaining = std::abs(rho);
  Vec2 y = start_lift;
  auto f = [&](const Vec2& p) { return sgn * stable_field(p); };
  while (remaining > 0.0) {
    const double h = std::min(h_, remaining);
    const Vec2 k1 = f(y);
    const Vec2 k2 = f(y + (0.5 * h) * k1);
    const Vec2 k3 = f(y + (0.5 * h) * k2);
    const Vec2 k4 = f(y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    remaining -= h;
  }
  return y;
}

Vec2 MapHorocycle::flow(const Vec2& x, double rho) const { return mod1(march(x, rho)); }
Vec2 MapHorocycle::flow_lift(const Vec2& x_lift, double rho) const { return march(x_lift, rho); }

double MapHorocycle::drho_tau0(long alpha, const Vec2& x) const {
  return map_->stable_stretch(mod1(x), alpha);
}

RenormResult MapHorocycle::renorm_time(double rho, long alpha, const Vec2& x,
                                       bool with_residual, double horizon) const {
  RenormResult out;
  out.rho = rho;
  out.alpha = static_cast<double>(alpha);
  if (map_->is_linear()) {
    const double sc = std::pow(kLambdaS, static_cast<double>(alpha));
    out.value = rho * sc;
    out.drho_tau = sc;
    out.residual = 0.0;
    return out;
  }
  out.drho_tau = drho_tau0(alpha, flow(x, rho));
  if (rho == 0.0) {
    out.value = 0.0;
    out.residual = 0.0;
    return out;
  }
  const Vec2 yhat = flow_lift(x, rho);
  const Vec2 zhat = map_->flow_lift(x, alpha);
  const Vec2 zphat = map_->flow_lift(yhat, alpha);
  const Vec2 d0 = zphat - zhat;
  if (norm(d0) < 1e-14) {
    out.value = 0.0;
    out.residual = norm(d0);
    return out;
  }
  const double sgn = dot(d0, stable_field(zhat)) >= 0.0 ? 1.0 : -1.0;
  // march until the projection on the local tangent passes the target
  double s = 0.0;
  Vec2 y = zhat;
  while (s < horizon) {
    const Vec2 e = stable_field(y);
    const double ahead = dot(zphat - y, e) * sgn;
    if (ahead <= h_) break;
    const double step = std::min(std::max(0.5 * ahead, h_), 1.0);
    y = march(y, sgn * step);
    s += step;
  }
  if (s >= horizon)
    throw SolverError("renorm_time: leaf-search horizon exceeded (horizon=" +
                      std::to_string(horizon) + ")");
  for (int it = 0; it < 6; ++it) {  // Newton polish along the leaf
    const Vec2 e = stable_field(y);
    const double corr = dot(zphat - y, e) * sgn;
    if (std::abs(corr) < 1e-15) break;
    y = march(y, sgn * corr);
    s += corr;
  }
  out.value = sgn * s;
  out.residual = with_residual ? norm(y - zphat) : -1.0;
  return out;
}

double MapHorocycle::tau_quad(double rho, long alpha, const Vec2& x, double abs_tol) const {
  if (map_->is_linear()) return rho * std::pow(kLambdaS, static_cast<double>(alpha));
  if (rho == 0.0) return 0.0;
  // checkpointed orbit for arbitrary-sigma evaluation
  const double sgn = rho >= 0.0 ? 1.0 : -1.0;
  const double len = std::abs(rho);
  const double dchk = 0.0625;
  std::vector<Vec2> chk;
  chk.push_back(x);
  for (double s = dchk; s < len + dchk; s += dchk) chk.push_back(march(chk.back(), sgn * dchk));
  auto point_at = [&](double sig) {
    const double a = std::abs(sig);
    size_t i = std::min(chk.size() - 1, static_cast<size_t>(a / dchk));
    return march(chk[i], sgn * (a - i * dchk));
  };
  auto f = [&](double sig) -> cplx {
    return cplx{drho_tau0(alpha, mod1(point_at(sig))), 0.0};
  };
  const double scale = std::max(1.0, drho_tau0(alpha, mod1(x)));
  const QuadResult q = integrate_gk(f, 0.0, rho, abs_tol * scale * std::max(1.0, len));
  return q.value.real();
}

// ==== SuspHorocycle ===========================================================

SuspHorocycle::SuspHorocycle(std::shared_ptr<const SuspensionFlow> flow, double rk_step)
    : flow_(std::move(flow)), h_(rk_step) {}

void SuspHorocycle::require_mixing() const {
  if (flow_->constant_roof())
    throw InvalidParameter(
        "constant-roof suspension is not topologically mixing; horocycle orbits need a "
        "variable roof or a map backend");
}

Vec3 SuspHorocycle::stable_field(const SuspPoint& p) const { return flow_->stable_direction(p); }

SuspPoint SuspHorocycle::flow(const SuspPoint& p, double rho) const {
  return flow_tracked(p, rho, nullptr);
}

SuspPoint SuspHorocycle::flow_tracked(const SuspPoint& p, double rho, double* rho_tilde) const {
  // march along the leaf: base runs on the straight v_s line, height follows
  // dw = delta(y) d(base); unit in-chart speed; gluing at the roof
  const SuspensionFlow& f = *flow_;
  const Vec2 vs = f.base().stable_eigvec();
  const double sgn = rho >= 0.0 ? 1.0 : -1.0;
  double remaining = std::abs(rho);
  Vec2 y = p.x;
  double w = p.u;
  long ncum = 0;
  double rt = 0.0;
  while (remaining > 0.0) {
    double h = std::min(h_, remaining);
    // RK4 on (a, w) with y(a) = y + a vs; da/ds = sgn/sqrt(1+delta^2)
    auto slope = [&](double a) { return f.stable_slope(mod1(y + a * vs)); };
    auto step = [&](double hh, double* a_out, double* w_out) {
      const double d1 = slope(0.0);
      const double q1 = 1.0 / std::sqrt(1.0 + d1 * d1);
      const double a2 = 0.5 * hh * sgn * q1;
      const double d2 = slope(a2);
      const double q2 = 1.0 / std::sqrt(1.0 + d2 * d2);
      const double a3 = 0.5 * hh * sgn * q2;
      const double d3 = slope(a3);
      const double q3 = 1.0 / std::sqrt(1.0 + d3 * d3);
      const double a4 = hh * sgn * q3;
      const double d4 = slope(a4);
      const double q4 = 1.0 / std::sqrt(1.0 + d4 * d4);
      *a_out = (hh * sgn / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
      *w_out = (hh * sgn / 6.0) * (d1 * q1 + 2.0 * d2 * q2 + 2.0 * d3 * q3 + d4 * q4);
    };
    double da = 0.0, dw = 0.0;
    step(h, &da, &dw);
    double wn = w + dw;
    const Vec2 yn = mod1(y + da * vs);
    const double roof_n = f.roof(yn);
    if (wn >= roof_n || wn < 0.0) {
      // bisect the step to the gluing boundary
      double lo = 0.0, hi = h;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        step(mid, &da, &dw);
        const Vec2 ym = mod1(y + da * vs);
        const double wm = w + dw;
        if (wm >= f.roof(ym) || wm < 0.0)
          hi = mid;
        else
          lo = mid;
      }
      step(hi, &da, &dw);
      Vec2 yb = mod1(y + da * vs);
      double wb = w + dw;
      rt += std::pow(kLambdaS, static_cast<double>(-ncum)) * da;
      remaining -= hi;
      if (wb >= f.roof(yb) - 1e-12 && dw * sgn >= 0.0) {
        y = f.base().apply_map(yb);
        w = 0.0;
        ++ncum;
      } else {
        y = f.base().apply_inverse(yb);
        w = f.roof(y) - 1e-15;
        --ncum;
      }
      continue;
    }
    rt += std::pow(kLambdaS, static_cast<double>(-ncum)) * da;
    y = yn;
    w = wn;
    remaining -= h;
  }
  if (rho_tilde) *rho_tilde = rt;
  return SuspPoint{y, w};
}

double SuspHorocycle::drho_tau0(double alpha, const SuspPoint& p) const {
  return flow_->stable_stretch(p, alpha);
}

double SuspHorocycle::tau_from_parameter(const SuspPoint& p, double alpha,
                                         double rho_tilde) const {
  if (rho_tilde == 0.0) return 0.0;
  const SuspensionFlow& f = *flow_;
  const Vec2 vs = f.base().stable_eigvec();
  const double sgn = rho_tilde >= 0.0 ? 1.0 : -1.0;
  const double R = std::abs(rho_tilde);

  // crossing index n(s) of height u + alpha + Delta(s) over the roof sums at
  // the base ray point xi(s) = p.x + s vs (s signed by sgn)
  auto base_at = [&](double s) { return mod1(p.x + (sgn * s) * vs); };
  auto roof_sum_bounds = [&](const Vec2& xi, double wz, long* n_out, double* lo, double* hi) {
    long n = 0;
    double slo = 0.0, shi = f.roof(xi);
    Vec2 y = xi;
    while (wz >= shi) {
      slo = shi;
      y = f.base().apply_map(y);
      shi += f.roof(y);
      ++n;
    }
    y = xi;
    while (wz < slo) {
      y = f.base().apply_inverse(y);
      shi = slo;
      slo -= f.roof(y);
      --n;
    }
    *n_out = n;
    *lo = slo;
    *hi = shi;
  };
  auto chart_point = [&](double s, long n) {
    Vec2 y = base_at(s);
    if (n >= 0)
      for (long j = 0; j < n; ++j) y = f.base().apply_map(y);
    else
      for (long j = 0; j < -n; ++j) y = f.base().apply_inverse(y);
    return y;
  };

  static thread_local std::vector<double> gl_x, gl_w;
  if (gl_x.empty()) gauss_legendre(12, gl_x, gl_w);

  double tau = 0.0, delta_acc = 0.0;
  double s = 0.0;
  long n = 0;
  {
    double lo, hi;
    roof_sum_bounds(base_at(0.0), p.u + alpha, &n, &lo, &hi);
  }
  const double panel0 = 0.05;
  while (s < R) {
    double ds = std::min(panel0, R - s);
    // tentative end-of-panel height; bisect to the crossing if n changes
    auto panel_delta = [&](double len) {
      double acc = 0.0;
      for (size_t i = 0; i < gl_x.size(); ++i) {
        const double si = s + 0.5 * len * (gl_x[i] + 1.0);
        acc += 0.5 * len * gl_w[i] * f.stable_slope(base_at(si)) * sgn;
      }
      return acc;
    };
    auto n_at_end = [&](double len, double dacc) {
      long nn;
      double lo, hi;
      roof_sum_bounds(base_at(s + len), p.u + alpha + delta_acc + dacc, &nn, &lo, &hi);
      return nn;
    };
    double dacc = panel_delta(ds);
    long n_end = n_at_end(ds, dacc);
    if (n_end != n) {
      double lo = 0.0, hi = ds;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double dm = panel_delta(mid);
        if (n_at_end(mid, dm) != n)
          hi = mid;
        else
          lo = mid;
      }
      ds = std::max(hi, 1e-12);
      dacc = panel_delta(ds);
    }
    // accumulate tau over [s, s+ds] at fixed n
    const double lam_n = std::pow(kLambdaS, static_cast<double>(n));
    double t_acc = 0.0;
    for (size_t i = 0; i < gl_x.size(); ++i) {
      const double si = s + 0.5 * ds * (gl_x[i] + 1.0);
      const Vec2 yn = chart_point(si, n);
      const double d = f.stable_slope(yn);
      t_acc += 0.5 * ds * gl_w[i] * std::sqrt(1.0 + d * d);
    }
    tau += lam_n * t_acc;  // in-chart speed carries lambda_s^n per unit cover parameter
    delta_acc += dacc;
    s += ds;
    {
      double lo, hi;
      roof_sum_bounds(base_at(s), p.u + alpha + delta_acc, &n, &lo, &hi);
    }
  }
  return sgn * tau;
}

RenormResult SuspHorocycle::renorm_time(double rho, double alpha, const SuspPoint& p,
                                        bool with_residual) const {
  RenormResult out;
  out.rho = rho;
  out.alpha = alpha;
  double rt = 0.0;
  const SuspPoint q = flow_tracked(p, rho, &rt);
  out.value = tau_from_parameter(p, alpha, rt);
  out.drho_tau = drho_tau0(alpha, q);
  if (with_residual && std::abs(out.value) <= 60.0) {
    const SuspPoint z = flow_->flow(p, alpha);
    const SuspPoint zp = flow_->flow(q, alpha);
    const SuspPoint arrive = flow(z, out.value);
    out.residual = torus_dist(arrive.x, zp.x) + std::abs(arrive.u - zp.u);
  }
  return out;
}

double SuspHorocycle::tau_quad(double rho, double alpha, const SuspPoint& p,
                               double abs_tol) const {
  if (rho == 0.0) return 0.0;
  const double sgn = rho >= 0.0 ? 1.0 : -1.0;
  const double len = std::abs(rho);
  const double dchk = 0.0625;
  std::vector<SuspPoint> chk;
  chk.push_back(p);
  for (double s = dchk; s < len + dchk; s += dchk)
    chk.push_back(flow_tracked(chk.back(), sgn * dchk, nullptr));
  auto f = [&](double sig) -> cplx {
    const double a = std::abs(sig);
    size_t i = std::min(chk.size() - 1, static_cast<size_t>(a / dchk));
    const SuspPoint q = flow_tracked(chk[i], sgn * (a - i * dchk), nullptr);
    return cplx{drho_tau0(alpha, q), 0.0};
  };
  const double scale = std::max(1.0, drho_tau0(alpha, p));
  return integrate_gk(f, 0.0, rho, abs_tol * scale * std::max(1.0, len)).value.real();
}

// ==== integrals ===============================================================

cplx horocycle_integral(const MapHorocycle& eng, const MapObservable& phi, const Vec2& x,
                        double T, double abs_tol) {
  if (T < 0.0) throw InvalidParameter("horocycle_integral: T must be >= 0");
  if (abs_tol <= 0.0) abs_tol = 1e-8 * std::max(1.0, T);
  if (eng.is_linear()) {
    const Vec2 vs = static_cast<const LinearCatMap&>(eng.map()).stable_eigvec();
    auto f = [&](double r) { return phi(mod1(x + r * vs)); };
    return integrate_gk(f, 0.0, T, abs_tol, 400000).value;
  }
  // checkpoint the orbit, then adaptive quadrature with local re-marching
  const double dchk = 0.0625;
  std::vector<Vec2> chk;
  chk.push_back(x);
  for (double s = dchk; s < T + dchk; s += dchk)
    chk.push_back(eng.flow_lift(chk.back(), dchk));
  auto f = [&](double r) {
    size_t i = std::min(chk.size() - 1, static_cast<size_t>(r / dchk));
    return phi(mod1(eng.flow_lift(chk[i], r - i * dchk)));
  };
  return integrate_gk(f, 0.0, T, abs_tol, 400000).value;
}

cplx horocycle_integral(const SuspHorocycle& eng, const SuspObservable& phi, const SuspPoint& p,
                        double T, double abs_tol) {
  eng.require_mixing();
  if (abs_tol <= 0.0) abs_tol = 1e-8 * std::max(1.0, T);
  const double dchk = 0.0625;
  std::vector<SuspPoint> chk;
  chk.push_back(p);
  for (double s = dchk; s < T + dchk; s += dchk)
    chk.push_back(eng.flow(chk.back(), dchk));
  auto f = [&](double r) {
    size_t i = std::min(chk.size() - 1, static_cast<size_t>(r / dchk));
    return phi(eng.flow(chk[i], r - i * dchk));
  };
  return integrate_gk(f, 0.0, T, abs_tol, 400000).value;
}

cplx weighted_integral(const MapHorocycle& eng, const WeightFn& w, const Vec2& x,
                       const MapObservable& phi, double abs_tol) {
  if (!(w.hi > w.lo)) throw InvalidParameter("weighted_integral: empty or unbounded support");
  if (eng.is_linear()) {
    const Vec2 vs = static_cast<const LinearCatMap&>(eng.map()).stable_eigvec();
    auto f = [&](double r) { return w.w(r) * phi(mod1(x + r * vs)); };
    return integrate_gk(f, w.lo, w.hi, abs_tol, 200000).value;
  }
  const double dchk = 0.0625;
  // checkpoints in both directions from 0
  std::vector<Vec2> fwd{x}, bwd{x};
  for (double s = dchk; s < std::max(0.0, w.hi) + dchk; s += dchk)
    fwd.push_back(eng.flow_lift(fwd.back(), dchk));
  for (double s = dchk; s < std::max(0.0, -w.lo) + dchk; s += dchk)
    bwd.push_back(eng.flow_lift(bwd.back(), -dchk));
  auto point_at = [&](double r) {
    if (r >= 0.0) {
      size_t i = std::min(fwd.size() - 1, static_cast<size_t>(r / dchk));
      return eng.flow_lift(fwd[i], r - i * dchk);
    }
    const double a = -r;
    size_t i = std::min(bwd.size() - 1, static_cast<size_t>(a / dchk));
    return eng.flow_lift(bwd[i], -(a - i * dchk));
  };
  auto f = [&](double r) { return w.w(r) * phi(mod1(point_at(r))); };
  return integrate_gk(f, w.lo, w.hi, abs_tol, 200000).value;
}

DualBoundReport dual_bound_probe(const MapHorocycle& eng, const WeightFn& w, const Vec2& x,
                                 const DyadicPartition& part, const ConeEnsemble& ens,
                                 const AnisotropicIndex& index, int K, int n_samples,
                                 uint64_t seed) {
  DualBoundReport rep;
  rep.supp_len = w.hi - w.lo;
  // C^{-s} Hoelder norm of w on a grid
  const int ng = 2048;
  const double expo = -index.s;
  double sup = 0.0, hold = 0.0;
  std::vector<double> vals(ng + 1);
  for (int i = 0; i <= ng; ++i) {
    vals[i] = w.w(w.lo + rep.supp_len * i / ng);
    sup = std::max(sup, std::abs(vals[i]));
  }
  for (int gap = 1; gap <= 64; gap *= 2) {
    const double dr = rep.supp_len * gap / ng;
    for (int i = 0; i + gap <= ng; i += gap)
      hold = std::max(hold, std::abs(vals[i + gap] - vals[i]) / std::pow(dr, expo));
  }
  rep.holder_norm = sup + hold;

  const auto wts = norm_weights_p2(part, ens, index, K);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> kpick(-8, 8);
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    // random trig polynomial on a few modes, normalized in the truncated norm
    std::vector<std::pair<std::array<int, 2>, cplx>> modes;
    VecC coef = VecC::Zero((2 * K + 1) * (2 * K + 1));
    for (int m = 0; m < 6; ++m) {
      const int k1 = kpick(rng), k2 = kpick(rng);
      const cplx c{gauss(rng), gauss(rng)};
      modes.push_back({{k1, k2}, c});
      coef((k1 + K) * (2 * K + 1) + (k2 + K)) += c;
    }
    double nn = 0.0;
    for (int i = 0; i < coef.size(); ++i) nn += wts[static_cast<size_t>(i)] * std::norm(coef(i));
    nn = std::sqrt(nn);
    if (nn < 1e-14) continue;
    auto phi = [&](const Vec2& y) {
      cplx acc{0.0, 0.0};
      for (const auto& mk : modes)
        acc += mk.second * std::polar(1.0, kTwoPi * (mk.first[0] * y[0] + mk.first[1] * y[1]));
      return acc / nn;
    };
    const cplx g = weighted_integral(eng, w, x, phi);
    worst = std::max(worst, std::abs(g));
  }
  rep.implied_C = worst / std::max(1e-300, rep.supp_len * rep.holder_norm);
  return rep;
}

// ---- cached renormalization time along a leaf --------------------------------

namespace {

// cumulative tau(rho, alpha, y0) over a rho-bracket, cubic-Hermite interpolated
// with exact derivatives d_rho tau = drho_tau0(alpha, h_rho(y0))
class CachedTau {
 public:
  CachedTau(const MapHorocycle& eng, long alpha, const Vec2& y0, double r_lo, double r_hi,
            double dr = 0.02)
      : eng_(eng), alpha_(alpha), linear_(eng.is_linear()) {
    if (linear_) {
      scale_ = std::pow(kLambdaS, static_cast<double>(alpha));
      return;
    }
    n_ = std::max(8, static_cast<int>(std::ceil((r_hi - r_lo) / dr)));
    r_lo_ = r_lo;
    r_hi_ = r_hi;
    h_ = (r_hi - r_lo) / n_;
    pts_.resize(n_ + 1);
    der_.resize(n_ + 1);
    val_.resize(n_ + 1);
    // march to r_lo, then node by node
    Vec2 cur = eng.flow_lift(y0, r_lo);
    static thread_local std::vector<double> gx, gw;
    if (gx.empty()) gauss_legendre(8, gx, gw);
    pts_[0] = cur;
    der_[0] = eng.drho_tau0(alpha, mod1(cur));
    for (int i = 1; i <= n_; ++i) {
      pts_[i] = eng.flow_lift(pts_[i - 1], h_);
      der_[i] = eng.drho_tau0(alpha, mod1(pts_[i]));
    }
    // cumulative integral with per-interval Gauss-Legendre
    val_[0] = 0.0;
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (size_t g = 0; g < gx.size(); ++g) {
        const double dsig = 0.5 * h_ * (gx[g] + 1.0);
        const Vec2 q = eng.flow_lift(pts_[i], dsig);
        acc += 0.5 * h_ * gw[g] * eng.drho_tau0(alpha, mod1(q));
      }
      val_[i + 1] = val_[i] + acc;
    }
    // anchor so that value(0) = 0 (0 must lie in the bracket or at an end)
    anchor_ = eval_raw(std::min(std::max(0.0, r_lo_), r_hi_));
  }

  double operator()(double r) const {
    if (linear_) return r * scale_;
    return eval_raw(r) - anchor_;
  }

  double derivative(double r) const {
    if (linear_) return scale_;
    const double tpos = std::min(std::max(r, r_lo_), r_hi_);
    const int i = std::min(n_ - 1, static_cast<int>((tpos - r_lo_) / h_));
    const double t = (tpos - r_lo_ - i * h_) / h_;
    return der_[i] * (1.0 - t) + der_[i + 1] * t;
  }

  // solve tau(r) = target by monotone bisection (d_rho tau > 0)
  double invert(double target) const {
    if (linear_) return target / scale_;
    double lo = r_lo_, hi = r_hi_;
    double flo = (*this)(lo) - target, fhi = (*this)(hi) - target;
    if (flo * fhi > 0.0) throw SolverError("CachedTau::invert: bracket failure");
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = (*this)(mid) - target;
      if (fm == 0.0) return mid;
      if (flo * fm <= 0.0) {
        hi = mid;
        fhi = fm;
      } else {
        lo = mid;
        flo = fm;
      }
      if (hi - lo < 1e-14 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
  }

 private:
  double eval_raw(double r) const {
    const double rc = std::min(std::max(r, r_lo_), r_hi_);
    const int i = std::min(n_ - 1, static_cast<int>((rc - r_lo_) / h_));
    const double t = (rc - r_lo_ - i * h_) / h_;
    const double y0 = val_[i], y1 = val_[i + 1];
    const double d0 = der_[i] * h_, d1 = der_[i + 1] * h_;
    const double t2 = t * t, t3 = t2 * t;
    double v = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
    // clamp-extrapolate linearly outside the bracket
    if (r < r_lo_) v += (r - r_lo_) * der_.front();
    if (r > r_hi_) v += (r - r_hi_) * der_.back();
    return v;
  }

  const MapHorocycle& eng_;
  long alpha_;
  bool linear_;
  double scale_ = 1.0;
  int n_ = 0;
  double r_lo_ = 0.0, r_hi_ = 0.0, h_ = 0.0, anchor_ = 0.0;
  std::vector<Vec2> pts_;
  std::vector<double> der_, val_;
};

}  // namespace

double renorm_identity_residual(const MapHorocycle& eng, const WeightFn& w, const Vec2& x,
                                const MapObservable& phi, long alpha, double abs_tol) {
  const cplx lhs = weighted_integral(eng, w, x, phi, abs_tol);
  if (alpha == 0) {
    const cplx rhs0 = weighted_integral(eng, w, x, phi, abs_tol);
    return std::abs(lhs - rhs0);
  }
  const Vec2 y = eng.map().flow(x, alpha);
  // transported support: tau(., -alpha, y) is increasing; invert at the ends
  const double stretch = std::pow(kLambdaU, static_cast<double>(alpha));
  const double pad = 1.2;
  CachedTau tau(eng, -alpha, y, std::min(w.lo, 0.0) / stretch * pad - 0.01,
                std::max(w.hi, 0.0) / stretch * pad + 0.01);
  const double rlo = tau.invert(w.lo);
  const double rhi = tau.invert(w.hi);
  WeightFn wt;
  wt.lo = rlo;
  wt.hi = rhi;
  wt.w = [&](double r) { return w.w(tau(r)); };
  auto lphi = [&](const Vec2& q) {
    return eng.drho_tau0(-alpha, q) * phi(eng.map().flow(q, -alpha));
  };
  const cplx rhs = weighted_integral(eng, wt, y, lphi, abs_tol);
  return std::abs(lhs - rhs);
}

// ==== tau identity suite =======================================================

namespace {

template <typename Engine, typename Point, typename Time>
struct SuiteOps {
  const Engine& eng;
  std::function<Point(uint64_t)> random_point;
  std::function<Point(const Point&, Time)> g;       // Anosov flow/map
  std::function<Point(const Point&, double)> h;     // horocycle flow
  std::function<double(double, Time, const Point&)> tau;       // renorm_time value
  std::function<double(double, Time, const Point&)> tau_big;   // quadrature route
  std::function<double(Time, const Point&)> dtau0;  // d_rho tau(0, alpha, x)
};

template <typename Engine, typename Point, typename Time>
TauSuiteReport run_suite(const SuiteOps<Engine, Point, Time>& ops, int n_samples, uint64_t seed,
                         bool integer_time) {
  TauSuiteReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto pick_time = [&](double lo, double hi) -> Time {
    const double a = lo + (hi - lo) * uni(rng);
    if constexpr (std::is_same_v<Time, long>)
      return static_cast<long>(std::lround(a));
    else
      return a;
  };
  auto& res = rep.residuals;
  auto upd = [&](const std::string& key, double r) {
    auto it = res.find(key);
    if (it == res.end() || it->second < r) res[key] = r;
  };

  for (int s = 0; s < n_samples; ++s) {
    const Point x = ops.random_point(rng());
    const double rho = 0.08 + 0.5 * uni(rng);
    const Time a1 = pick_time(integer_time ? 1.0 : 0.4, integer_time ? 2.49 : 2.0);
    const Time a2 = pick_time(integer_time ? 1.0 : 0.4, integer_time ? 2.49 : 2.0);

    // (i), (ii)
    upd("i", std::abs(ops.tau(0.0, a1, x)));
    upd("ii", std::abs(ops.tau(rho, Time{0}, x) - rho));
    // (iii) tau(rho, a1+a2, x) = tau(tau(rho,a2,x), a1, g_{a2} x)
    {
      const double t2 = ops.tau(rho, a2, x);
      const double lhs = ops.tau(rho, a1 + a2, x);
      const double rhs = ops.tau(t2, a1, ops.g(x, a2));
      upd("iii", std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    // (iv) additivity in rho
    {
      const double r2 = 0.05 + 0.4 * uni(rng);
      const double lhs = ops.tau(rho + r2, a1, x);
      const double rhs = ops.tau(rho, a1, ops.h(x, r2)) + ops.tau(r2, a1, x);
      upd("iv", std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    // (v) d_rho tau(rho, a, x) = d_rho tau(0, a, h_rho x): finite difference
    {
      const double fd = (ops.tau(rho + 5e-6, a1, x) - ops.tau(rho - 5e-6, a1, x)) / 1e-5;
      const double cf = ops.dtau0(a1, ops.h(x, rho));
      upd("v", std::abs(fd - cf) / std::max(1.0, std::abs(cf)));
    }
    // (vi) cocycle of the derivative
    {
      const double lhs = ops.dtau0(a1, ops.g(x, a2)) * ops.dtau0(a2, x);
      const double rhs = ops.dtau0(a1 + a2, x);
      upd("vi", std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    // (vii) positivity range
    {
      const double d = ops.dtau0(a1, x);
      rep.drho_min = std::min(rep.drho_min, d);
      rep.drho_max = std::max(rep.drho_max, d);
      upd("vii", (d > 0.0 && std::isfinite(d)) ? 0.0 : 1.0);
    }
    // (viii) round trip rho = tau(tau(rho,a,x), -a, g_a x)
    {
      const double c = ops.tau(rho, a1, x);
      const double back = ops.tau(c, -a1, ops.g(x, a1));
      upd("viii", std::abs(back - rho) / std::max(1.0, std::abs(rho)));
    }
    // (xi) solver vs quadrature route
    {
      const double lhs = ops.tau(rho, a1, x);
      const double rhs = ops.tau_big(rho, a1, x);
      upd("xi", std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    // (xii) d_rho tau(0,a,x) vs finite difference of the solver at rho = 0
    {
      const double fd = (ops.tau(5e-6, a1, x) - ops.tau(-5e-6, a1, x)) / 1e-5;
      upd("xii", std::abs(fd - ops.dtau0(a1, x)) / std::max(1.0, std::abs(fd)));
    }
  }

  // (ix) growth fit over alpha in [5,15], |rho| = 1
  {
    std::vector<double> xs, ys;
    double lo = 1e300, hi = 0.0;
    const Point x = ops.random_point(777);
    for (int k = 0; k <= 10; ++k) {
      const double af = 5.0 + k;
      const Time a = integer_time ? Time(std::lround(af)) : Time(af + 0.3);
      const double t = ops.tau_big(1.0, -a, x);
      xs.push_back(static_cast<double>(a));
      ys.push_back(std::log(std::abs(t)));
      const double ratio = std::abs(t) / std::exp(std::log(kLambdaU) * static_cast<double>(a));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const size_t n = xs.size();
    for (size_t i = 0; i < n; ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    rep.growth_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.growth_ratio_lo = lo;
    rep.growth_ratio_hi = hi;
  }
  // (x) decay of sup_rho d_rho tau(., alpha, x)
  {
    std::vector<double> xs, ys;
    const Point x = ops.random_point(778);
    for (int k = 2; k <= 12; k += 2) {
      const Time a = integer_time ? Time(k) : Time(k + 0.3);
      double sup = 0.0;
      for (int i = 0; i <= 24; ++i)
        sup = std::max(sup, ops.dtau0(a, ops.h(x, i / 24.0)));
      xs.push_back(static_cast<double>(a));
      ys.push_back(std::log(sup));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const size_t n = xs.size();
    for (size_t i = 0; i < n; ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    rep.decay_theta = std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
  }
  return rep;
}

}  // namespace

TauSuiteReport tau_identity_suite(const MapHorocycle& eng, int n_samples, uint64_t seed) {
  SuiteOps<MapHorocycle, Vec2, long> ops{
      eng,
      [](uint64_t sd) {
        std::mt19937_64 r(sd);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return Vec2{u(r), u(r)};
      },
      [&](const Vec2& x, long a) { return eng.map().flow(x, a); },
      [&](const Vec2& x, double r) { return eng.flow(x, r); },
      [&](double r, long a, const Vec2& x) { return eng.renorm_time(r, a, x, false).value; },
      [&](double r, long a, const Vec2& x) { return eng.tau_quad(r, a, x); },
      [&](long a, const Vec2& x) { return eng.drho_tau0(a, x); }};
  return run_suite(ops, n_samples, seed, true);
}

TauSuiteReport tau_identity_suite(const SuspHorocycle& eng, int n_samples, uint64_t seed) {
  eng.require_mixing();
  SuiteOps<SuspHorocycle, SuspPoint, double> ops{
      eng,
      [&](uint64_t sd) {
        std::mt19937_64 r(sd);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const Vec2 b{u(r), u(r)};
        return SuspPoint{b, 0.8 * u(r) * eng.susp().roof(b)};
      },
      [&](const SuspPoint& p, double a) { return eng.susp().flow(p, a); },
      [&](const SuspPoint& p, double r) { return eng.flow(p, r); },
      [&](double r, double a, const SuspPoint& p) { return eng.renorm_time(r, a, p, false).value; },
      [&](double r, double a, const SuspPoint& p) { return eng.tau_quad(r, a, p); },
      [&](double a, const SuspPoint& p) { return eng.drho_tau0(a, p); }};
  return run_suite(ops, n_samples, seed, false);
}

// ==== cutoff family =============================================================

namespace {

double quintic_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace

CutoffFamily cutoff_family(const MapHorocycle& eng, double T, const Vec2& x, double eps) {
  if (!(T > 0.0)) throw InvalidParameter("cutoff_family: T must be positive");
  if (!(eps > 0.0 && eps <= 0.25)) throw InvalidParameter("cutoff_family: need 0 < eps <= 1/4");
  const double htop = std::log(kLambdaU);

  CutoffFamily fam;
  fam.T = T;
  fam.eps = eps;
  fam.x = x;
  fam.beta0_exact = std::log(T * eps) / htop;  // real solution of tau(T, b, x) = 1/eps

  const long beta0 = std::lround(fam.beta0_exact);
  const long dbeta = std::max<long>(1, std::lround(std::log(1.0 / eps) / htop));
  fam.c1_reported = std::exp(std::abs(htop * dbeta + std::log(eps)));

  std::vector<long> betas;
  if (T == 1.0) {
    betas.push_back(0);
  } else {
    long b = beta0;
    while (b >= 0) {
      betas.push_back(b);
      b -= dbeta;
    }
  }
  if (betas.empty()) {
    fam.N = -1;
    fam.wk = [](double, int) { return 0.0; };
    fam.w_total = [](double) { return 0.0; };
    return fam;
  }
  fam.beta_plus = betas;
  fam.beta_minus = betas;  // integer plateaus coincide on both ends
  fam.N = static_cast<int>(betas.size()) - 1;

  const double plat_lo = 1.0 / (4.0 * eps), plat_hi = 1.0 / (2.0 * eps);
  auto wplus = [plat_lo, plat_hi](double s) {
    return quintic_step((s - plat_lo) / (plat_hi - plat_lo));
  };

  // tau caches along the leaves of x and h_T(x) for every beta_k
  const Vec2 xT = eng.flow(x, T);
  auto caches_p = std::make_shared<std::vector<CachedTau>>();
  auto caches_m = std::make_shared<std::vector<CachedTau>>();
  for (long b : betas) {
    const double reach = (plat_hi + 1.0) * std::pow(kLambdaU, static_cast<double>(b)) * 1.25;
    caches_p->emplace_back(eng, b, x, -1.0, std::min(reach, T * 1.3) + 1.0,
                           std::max(0.02, reach / 4096.0));
    caches_m->emplace_back(eng, b, xT, -std::min(reach, T * 1.3) - 1.0, 1.0,
                           std::max(0.02, reach / 4096.0));
  }

  auto wk_plus = [caches_p, wplus](double rho, int k) {
    const double cur = wplus((*caches_p)[k](rho));
    if (k == 0) return cur;
    return cur - wplus((*caches_p)[k - 1](rho));
  };
  auto wk_minus = [caches_m, wplus, T](double rho, int k) {
    // w^-(T + tau(rho - T, beta_k, h_T x)) with w^-(s) = w^+(T - s)
    const double cur = wplus(-(*caches_m)[k](rho - T));
    if (k == 0) return cur;
    return cur - wplus(-(*caches_m)[k - 1](rho - T));
  };
  fam.wk = [wk_plus, wk_minus](double rho, int k) {
    if (k == 0) return wk_plus(rho, 0) * wk_minus(rho, 0);
    return wk_plus(rho, k) + wk_minus(rho, k);
  };
  const int N = fam.N;
  fam.w_total = [wk_plus, wk_minus, N](double rho) {
    double acc = wk_plus(rho, 0) * wk_minus(rho, 0);
    for (int k = 1; k <= N; ++k) acc += wk_plus(rho, k) + wk_minus(rho, k);
    return acc;
  };

  // transported weights (exact closed forms through the composition identities)
  const double inv_eps = 1.0 / eps;
  fam.w0_tilde = [wplus, inv_eps](double rho) { return wplus(rho) * wplus(inv_eps - rho); };
  auto tilde_p = std::make_shared<std::vector<CachedTau>>();
  auto tilde_m = std::make_shared<std::vector<CachedTau>>();
  const double supp_hi = (plat_hi + 1.0) * std::pow(kLambdaU, static_cast<double>(dbeta)) * 1.3;
  for (size_t k = 1; k < betas.size(); ++k) {
    const Vec2 yk = eng.map().flow(x, betas[k]);
    const Vec2 ykm = eng.map().flow(xT, betas[k]);
    tilde_p->emplace_back(eng, dbeta, yk, -0.5, supp_hi);
    tilde_m->emplace_back(eng, dbeta, ykm, -supp_hi, 0.5);
  }
  fam.wk_plus_tilde = [wplus, tilde_p](double rho, int k) {
    return wplus(rho) - wplus((*tilde_p)[k - 1](rho));
  };
  fam.wk_minus_tilde = [wplus, tilde_m](double rho, int k) {
    return wplus(-rho) - wplus(-(*tilde_m)[k - 1](rho));
  };
  fam.supp_tilde_hi = supp_hi;
  return fam;
}

double local_decomposition_residual(const MapHorocycle& eng, const CutoffFamily& fam,
                                    const MapObservable& phi, double abs_tol) {
  if (fam.N < 0) return 0.0;
  // left side: direct quadrature of the full w against phi
  WeightFn w;
  w.lo = 0.0;
  w.hi = fam.T;
  w.w = fam.w_total;
  const cplx lhs = weighted_integral(eng, w, fam.x, phi, abs_tol);

  // right side: transported terms
  auto lphi = [&](long beta) {
    return [&eng, &phi, beta](const Vec2& q) {
      return eng.drho_tau0(-beta, q) * phi(eng.map().flow(q, -beta));
    };
  };
  cplx rhs{0.0, 0.0};
  {
    WeightFn w0;
    w0.lo = 1.0 / (8.0 * fam.eps);
    w0.hi = 1.0 / fam.eps;
    w0.w = fam.w0_tilde;
    const Vec2 base = eng.map().flow(fam.x, fam.beta_plus[0]);
    rhs += weighted_integral(eng, w0, base, lphi(fam.beta_plus[0]), abs_tol);
  }
  const Vec2 xT = eng.flow(fam.x, fam.T);
  for (int k = 1; k <= fam.N; ++k) {
    WeightFn wp;
    wp.lo = 1.0 / (8.0 * fam.eps);
    wp.hi = fam.supp_tilde_hi;
    wp.w = [&fam, k](double r) { return fam.wk_plus_tilde(r, k); };
    const Vec2 bp = eng.map().flow(fam.x, fam.beta_plus[k]);
    rhs += weighted_integral(eng, wp, bp, lphi(fam.beta_plus[k]), abs_tol);

    WeightFn wm;
    wm.lo = -fam.supp_tilde_hi;
    wm.hi = -1.0 / (8.0 * fam.eps);
    wm.w = [&fam, k](double r) { return fam.wk_minus_tilde(r, k); };
    const Vec2 bm = eng.map().flow(xT, fam.beta_minus[k]);
    rhs += weighted_integral(eng, wm, bm, lphi(fam.beta_minus[k]), abs_tol);
  }
  return std::abs(lhs - rhs);
}

// ==== expansion fit ==============================================================

cplx TrigObservable::eval(const Vec2& x) const {
  cplx acc{0.0, 0.0};
  for (const auto& m : modes)
    acc += m.second * std::polar(1.0, kTwoPi * (m.first[0] * x[0] + m.first[1] * x[1]));
  return acc;
}

VecC TrigObservable::coefficients(int K) const {
  const int side = 2 * K + 1;
  VecC c = VecC::Zero(side * side);
  for (const auto& m : modes) {
    if (std::abs(m.first[0]) > K || std::abs(m.first[1]) > K)
      throw InvalidParameter("TrigObservable mode outside the truncation box");
    c((m.first[0] + K) * side + (m.first[1] + K)) += m.second;
  }
  return c;
}

namespace {

// sweep integral gamma_x(phi, T_i) for a sorted grid: one orbit pass, adaptive
// quadrature per grid interval with local re-marching from checkpoints
std::vector<cplx> gamma_sweep(const MapHorocycle& eng, const MapObservable& phi, const Vec2& x,
                              const std::vector<double>& ts, double abs_tol = 1e-8) {
  std::vector<cplx> out;
  out.reserve(ts.size());
  cplx acc{0.0, 0.0};
  double cur = 0.0;
  Vec2 lift = x;
  const bool lin = eng.is_linear();
  const Vec2 vs =
      lin ? static_cast<const LinearCatMap&>(eng.map()).stable_eigvec() : Vec2{0.0, 0.0};
  const double dchk = 0.0625;
  for (double T : ts) {
    if (T > cur) {
      std::vector<Vec2> chk{lift};
      if (!lin)
        for (double s = dchk; s < (T - cur) + dchk; s += dchk)
          chk.push_back(eng.flow_lift(chk.back(), dchk));
      auto f = [&](double r) {
        if (lin) return phi(mod1(lift + r * vs));
        size_t i = std::min(chk.size() - 1, static_cast<size_t>(r / dchk));
        return phi(mod1(eng.flow_lift(chk[i], r - i * dchk)));
      };
      acc += integrate_gk(f, 0.0, T - cur, abs_tol, 400000).value;
      lift = lin ? lift + (T - cur) * vs : eng.flow_lift(chk.back(), (T - cur) - (chk.size() - 1) * dchk);
      cur = T;
    }
    out.push_back(acc);
  }
  return out;
}

// gamma_{w(T),x}(psi) through the telescoped decomposition (short supports only)
cplx gamma_w_by_decomposition(const MapHorocycle& eng, const CutoffFamily& fam,
                              const MapObservable& psi, double abs_tol) {
  if (fam.N < 0) return cplx{0.0, 0.0};
  auto lpsi = [&](long beta) {
    return [&eng, &psi, beta](const Vec2& q) {
      return eng.drho_tau0(-beta, q) * psi(eng.map().flow(q, -beta));
    };
  };
  cplx acc{0.0, 0.0};
  {
    WeightFn w0;
    w0.lo = 1.0 / (8.0 * fam.eps);
    w0.hi = 1.0 / fam.eps;
    w0.w = fam.w0_tilde;
    acc += weighted_integral(eng, w0, eng.map().flow(fam.x, fam.beta_plus[0]),
                             lpsi(fam.beta_plus[0]), abs_tol);
  }
  const Vec2 xT = eng.flow(fam.x, fam.T);
  for (int k = 1; k <= fam.N; ++k) {
    WeightFn wp;
    wp.lo = 1.0 / (8.0 * fam.eps);
    wp.hi = fam.supp_tilde_hi;
    wp.w = [&fam, k](double r) { return fam.wk_plus_tilde(r, k); };
    acc += weighted_integral(eng, wp, eng.map().flow(fam.x, fam.beta_plus[k]),
                             lpsi(fam.beta_plus[k]), abs_tol);
    WeightFn wm;
    wm.lo = -fam.supp_tilde_hi;
    wm.hi = -1.0 / (8.0 * fam.eps);
    wm.w = [&fam, k](double r) { return fam.wk_minus_tilde(r, k); };
    acc += weighted_integral(eng, wm, eng.map().flow(xT, fam.beta_minus[k]),
                             lpsi(fam.beta_minus[k]), abs_tol);
  }
  return acc;
}

MapObservable trig_eval_of_record(const ResonanceRecord& rec, double prune = 1e-12) {
  // pruned trig sum of the record's coefficients
  const int side = 2 * rec.K + 1;
  double top = 0.0;
  for (int i = 0; i < rec.D.size(); ++i) top = std::max(top, std::abs(rec.D(i)));
  auto modes = std::make_shared<std::vector<std::pair<std::array<int, 2>, cplx>>>();
  for (int i = 0; i < rec.D.size(); ++i) {
    if (std::abs(rec.D(i)) <= prune * top) continue;
    modes->push_back({{i / side - rec.K, i % side - rec.K}, rec.D(i)});
  }
  return [modes](const Vec2& x) {
    cplx acc{0.0, 0.0};
    for (const auto& m : *modes)
      acc += m.second * std::polar(1.0, kTwoPi * (m.first[0] * x[0] + m.first[1] * x[1]));
    return acc;
  };
}

}  // namespace

ExpansionFitResult expansion_fit(const MapHorocycle& eng, const TrigObservable& phi,
                                 const Vec2& x, const std::vector<ResonanceRecord>& records,
                                 const std::vector<double>& t_grid, double eps,
                                 double gamma_tol) {
  if (records.empty()) throw InvalidParameter("expansion_fit: resonance records missing");
  const double htop = std::log(kLambdaU);
  ExpansionFitResult out;
  out.T = t_grid;

  const ResonanceRecord& lead = records.front();
  const int K = lead.K;
  const VecC phi_coef = phi.coefficients(K);
  VecC one_coef = VecC::Zero(phi_coef.size());
  one_coef(K * (2 * K + 1) + K) = 1.0;
  // mu = leading left functional normalized by mu(1) = 1
  const cplx mu_one = lead.O.dot(one_coef);
  if (std::abs(mu_one) < 1e-12) throw ConvergenceError("expansion_fit: mu(1) ~ 0");
  const cplx mu_phi = lead.O.dot(phi_coef) / mu_one;
  out.mu_of_phi_re = mu_phi.real();
  out.mu_of_phi_im = mu_phi.imag();

  // D_{(htop,1,1)} normalized by mu(D) = 1
  const cplx mu_d_raw = lead.O.dot(lead.D) / mu_one;
  MapObservable d_lead_raw = trig_eval_of_record(lead);
  auto d_lead = [d_lead_raw, mu_d_raw](const Vec2& y) { return d_lead_raw(y) / mu_d_raw; };

  auto phi_eval = [&phi](const Vec2& y) { return phi.eval(y); };
  out.gamma = gamma_sweep(eng, phi_eval, x, t_grid);
  const std::vector<cplx> gamma_lead = gamma_sweep(eng, d_lead, x, t_grid);

  // sub-leading terms
  std::vector<ExpansionTermFit> terms;
  std::vector<MapObservable> d_evals;
  for (size_t r = 1; r < records.size(); ++r) {
    if (records[r].lambda.real() >= htop - 1e-9) continue;
    ExpansionTermFit t;
    t.lambda = records[r].lambda;
    t.j = 1;
    t.o_of_phi = records[r].O.dot(phi_coef);
    terms.push_back(t);
    d_evals.push_back(trig_eval_of_record(records[r]));
  }

  out.reconstruction.resize(t_grid.size());
  out.abs_residual.resize(t_grid.size());
  for (auto& t : terms) t.c_values.resize(t_grid.size());
  for (size_t i = 0; i < t_grid.size(); ++i) {
    const double T = t_grid[i];
    cplx rec_val = gamma_lead[i] * mu_phi;
    if (!terms.empty()) {
      const CutoffFamily fam = cutoff_family(eng, T, x, eps);
      for (size_t r = 0; r < terms.size(); ++r) {
        const cplx gw = gamma_w_by_decomposition(eng, fam, d_evals[r], gamma_tol);
        const cplx tpow = std::exp(std::log(T) * terms[r].lambda / htop);
        const double logT = std::log(T);
        const double logfac = std::max(1.0, std::pow(std::abs(logT), 1.0 - terms[r].j));
        const cplx c = gw / tpow * logfac;
        terms[r].c_values[i] = c;
        out.sup_c = std::max(out.sup_c, std::abs(c));
        rec_val += tpow * std::pow(logT, terms[r].j - 1) * c * terms[r].o_of_phi / logfac;
      }
    }
    out.reconstruction[i] = rec_val;
    out.abs_residual[i] = std::abs(out.gamma[i] - rec_val);
    out.cor58_stat = std::max(
        out.cor58_stat, std::pow(T, 0.5) * std::abs(out.gamma[i] / T - mu_phi));
  }
  out.terms = std::move(terms);

  // envelope fit of log |E| vs log T
  std::vector<double> xs, ys;
  for (size_t i = 0; i < t_grid.size(); ++i) {
    double env = 0.0;
    for (size_t j = (i >= 2 ? i - 2 : 0); j <= std::min(t_grid.size() - 1, i + 2); ++j)
      env = std::max(env, out.abs_residual[j]);
    if (env <= 0.0) continue;
    xs.push_back(std::log(t_grid[i]));
    ys.push_back(std::log(env));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const size_t n = xs.size();
  if (n >= 2) {
    for (size_t i = 0; i < n; ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    out.residual_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

}  // namespace anisores
