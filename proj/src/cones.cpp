#include "anisores/cones.hpp"

#include <algorithm>
#include <cmath>

namespace anisores {

double line_angle(const Vec2& v) {
  double a = std::atan2(v[1], v[0]);
  while (a < 0.0) a += kPi;
  while (a >= kPi) a -= kPi;
  return a;
}

double line_dist(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  if (d > kPi / 2.0) d = kPi - d;
  return d;
}

bool SectorCone::contains(const Vec2& xi) const { return margin(xi) >= 0.0; }

double SectorCone::margin(const Vec2& xi) const {
  return half_width - line_dist(line_angle(xi), axis);
}

namespace {

// exp(-1/(1-u^2)) bump integrated into a smooth step: 0 for u<=0, 1 for u>=1
double mollifier_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

}  // namespace

ConeEnsemble::ConeEnsemble(SectorCone cone_minus, SectorCone cone_plus, double transition_width)
    : cone_minus_(cone_minus), cone_plus_(cone_plus), width_(transition_width) {
  if (transition_width <= 0.0) throw GeometryError("transition_width must be positive");
  const double sep = line_dist(cone_minus.axis, cone_plus.axis);
  // transversality: the closed cones must not intersect
  if (cone_minus.half_width + cone_plus.half_width >= sep)
    throw GeometryError("cones overlap: transversality C^- \\cap C^+ = {0} violated");
  // smoothed supports (and one extra enlargement layer) must stay disjoint
  if (cone_minus.half_width + cone_plus.half_width + 4.0 * transition_width >= sep)
    throw GeometryError("transition_width too large: smoothed supports reach the opposite cone");
}

double ConeEnsemble::bump_profile(double d, double plateau) const {
  // == 1 for d <= plateau, == 0 for d >= plateau + width_
  return 1.0 - mollifier_step((d - plateau) / width_);
}

double ConeEnsemble::bump_tilde(double d, double plateau) const {
  // == 1 for d <= plateau + width_ (i.e. on supp of the base cutoff)
  return 1.0 - mollifier_step((d - plateau - width_) / width_);
}

double ConeEnsemble::phi_minus(const Vec2& xi) const {
  return bump_profile(line_dist(line_angle(xi), cone_minus_.axis), cone_minus_.half_width);
}

double ConeEnsemble::phi_plus(const Vec2& xi) const {
  return bump_profile(line_dist(line_angle(xi), cone_plus_.axis), cone_plus_.half_width);
}

double ConeEnsemble::phi_zero(const Vec2& xi) const {
  return 1.0 - phi_minus(xi) - phi_plus(xi);
}

double ConeEnsemble::phi(int sigma, const Vec2& xi) const {
  if (sigma < 0) return phi_minus(xi);
  if (sigma > 0) return phi_plus(xi);
  return phi_zero(xi);
}

double ConeEnsemble::phi_tilde(int sigma, const Vec2& xi) const {
  const double a = line_angle(xi);
  if (sigma < 0) return bump_tilde(line_dist(a, cone_minus_.axis), cone_minus_.half_width);
  if (sigma > 0) return bump_tilde(line_dist(a, cone_plus_.axis), cone_plus_.half_width);
  // tilde Phi_0: == 1 on supp Phi_0 = closure{d_- >= w_-, d_+ >= w_+}, supported
  // on the slightly larger wedges {d_sigma >= w_sigma - width}
  const double dm = line_dist(a, cone_minus_.axis);
  const double dp = line_dist(a, cone_plus_.axis);
  return mollifier_step((dm - cone_minus_.half_width + width_) / width_) *
         mollifier_step((dp - cone_plus_.half_width + width_) / width_);
}

SectorCone ConeEnsemble::support(int sigma) const {
  if (sigma < 0) return SectorCone{cone_minus_.axis, cone_minus_.half_width + width_};
  return SectorCone{cone_plus_.axis, cone_plus_.half_width + width_};
}

SectorCone ConeEnsemble::support_tilde(int sigma) const {
  if (sigma < 0) return SectorCone{cone_minus_.axis, cone_minus_.half_width + 2.0 * width_};
  return SectorCone{cone_plus_.axis, cone_plus_.half_width + 2.0 * width_};
}

std::vector<std::pair<double, double>> ConeEnsemble::support_zero_tilde() const {
  // supp tilde Phi_0 = {d_- >= w_- - width} \cap {d_+ >= w_+ - width}: the two
  // closed angular intervals between the (shrunk) plateau sectors, mod pi.
  double am = cone_minus_.axis, ap = cone_plus_.axis;
  double wm = cone_minus_.half_width, wp = cone_plus_.half_width;
  if (am > ap) {
    std::swap(am, ap);
    std::swap(wm, wp);
  }
  std::vector<std::pair<double, double>> gaps;
  gaps.emplace_back(am + wm - width_, ap - wp + width_);        // between the two axes
  gaps.emplace_back(ap + wp - width_, am - wm + kPi + width_);  // wrap-around gap
  return gaps;
}

ConeEnsemble build_cone_ensemble(SectorCone cone_minus, SectorCone cone_plus,
                                 double transition_width) {
  return ConeEnsemble(cone_minus, cone_plus, transition_width);
}

namespace {

// Image of the sector (line cone) under the transpose differential:
// a linear invertible map takes the line cone spanned by the angular interval
// to the line cone spanned by the images of its boundary rays. We also sweep
// interior rays so the result is valid when the image interval straddles pi.
std::vector<double> image_line_angles(const Mat2& m, double axis, double half_width,
                                      int n_rays = 33) {
  std::vector<double> out;
  out.reserve(n_rays);
  for (int i = 0; i < n_rays; ++i) {
    const double a = axis - half_width + (2.0 * half_width) * i / (n_rays - 1);
    const Vec2 ray{std::cos(a), std::sin(a)};
    out.push_back(line_angle(matvec(m, ray)));
  }
  return out;
}

}  // namespace

ConeCheckReport cone_hyperbolicity_check(const std::vector<Mat2>& differentials,
                                         const ConeEnsemble& theta_src,
                                         const ConeEnsemble& theta_dst,
                                         double margin_tol) {
  ConeCheckReport rep;
  rep.worst_margin_minus = 1e300;
  rep.worst_margin_zero = 1e300;
  const SectorCone c_minus{theta_dst.cone_minus().axis, theta_dst.cone_minus().half_width};
  const SectorCone supp_plus_tilde = theta_dst.support_tilde(+1);
  const SectorCone src_minus_tilde = theta_src.support_tilde(-1);
  const auto zero_gaps = theta_src.support_zero_tilde();

  for (const Mat2& dF : differentials) {
    const Mat2 mt = transpose(dF);
    if (std::abs(det(mt)) < 1e-14) throw GeometryError("singular differential sample");
    // (D_z F)^tr supp tilde Phi°_-  strictly inside  C^-
    for (double a : image_line_angles(mt, src_minus_tilde.axis, src_minus_tilde.half_width)) {
      const double m = c_minus.half_width - line_dist(a, c_minus.axis);
      rep.worst_margin_minus = std::min(rep.worst_margin_minus, m);
    }
    // (D_z F)^tr supp tilde Phi°_0  strictly outside  supp tilde Phi_+
    for (const auto& gap : zero_gaps) {
      const double mid = 0.5 * (gap.first + gap.second);
      const double hw = 0.5 * (gap.second - gap.first);
      for (double a : image_line_angles(mt, mid, hw)) {
        const double m = line_dist(a, supp_plus_tilde.axis) - supp_plus_tilde.half_width;
        rep.worst_margin_zero = std::min(rep.worst_margin_zero, m);
      }
    }
  }
  rep.ok = rep.worst_margin_minus >= margin_tol && rep.worst_margin_zero >= margin_tol;
  return rep;
}

}  // namespace anisores
