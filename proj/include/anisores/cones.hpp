#ifndef ANISORES_CONES_HPP
#define ANISORES_CONES_HPP

#include <functional>
#include <optional>
#include <vector>

#include "anisores/common.hpp"

namespace anisores {

// A closed cone in R^2 of the form {xi != 0 : angular distance of xi to the
// line through `axis` <= half_width}. Stored as axis angle in [0,pi) plus
// half-width; symmetric under xi -> -xi, so "angle" always means the direction
// of the line mod pi.
struct SectorCone {
  double axis;        // in [0, pi)
  double half_width;  // in (0, pi/4]

  bool contains(const Vec2& xi) const;
  // signed angular margin: positive if xi strictly inside, negative outside
  double margin(const Vec2& xi) const;
};

double line_angle(const Vec2& v);                    // direction mod pi, in [0,pi)
double line_dist(double a, double b);                // distance of two line angles, in [0,pi/2]

// Cone ensemble (Phi_-, Phi_+, Phi_0): smooth 0-homogeneous partition of unity
// subordinate to two transversal sector cones. Phi_sigma == 1 on the interior
// of C^sigma; supports of Phi_- and Phi_+ stay clear of the opposite cone.
class ConeEnsemble {
 public:
  ConeEnsemble(SectorCone cone_minus, SectorCone cone_plus, double transition_width);

  double phi_minus(const Vec2& xi) const;
  double phi_plus(const Vec2& xi) const;
  double phi_zero(const Vec2& xi) const;
  double phi(int sigma, const Vec2& xi) const;  // sigma: -1, +1, 0

  // Enlarged companions: tilde versions == 1 on supp Phi_sigma.
  double phi_tilde(int sigma, const Vec2& xi) const;

  const SectorCone& cone_minus() const { return cone_minus_; }
  const SectorCone& cone_plus() const { return cone_plus_; }
  double transition_width() const { return width_; }

  // support sector of Phi_sigma / tilde Phi_sigma for sigma = -1, +1
  SectorCone support(int sigma) const;
  SectorCone support_tilde(int sigma) const;
  // supp Phi_0 as the two angular gaps between the +/- supports
  std::vector<std::pair<double, double>> support_zero_tilde() const;

 private:
  SectorCone cone_minus_, cone_plus_;
  double width_;
  double bump_profile(double angular_dist, double plateau) const;
  double bump_tilde(double angular_dist, double plateau) const;
};

ConeEnsemble build_cone_ensemble(SectorCone cone_minus, SectorCone cone_plus,
                                 double transition_width);

struct ConeCheckReport {
  bool ok = false;
  double worst_margin_minus = 0.0;  // min margin of (DF)^tr supp tPhi°_- inside C^-
  double worst_margin_zero = 0.0;   // min angular gap of (DF)^tr supp tPhi°_0 to supp tPhi_+
};

// Definition-2.2 style cone hyperbolicity certificate for a planar map with
// differential samples dF at the sample points: checks
//   (D_z F)^tr supp tPhi°_-  strictly inside  C^-   and
//   (D_z F)^tr supp tPhi°_0  strictly outside supp tPhi_+,
// with margins measured in angle (compact inclusion = margin >= margin_tol).
ConeCheckReport cone_hyperbolicity_check(const std::vector<Mat2>& differentials,
                                         const ConeEnsemble& theta_src,
                                         const ConeEnsemble& theta_dst,
                                         double margin_tol = 1e-6);

}  // namespace anisores

#endif
