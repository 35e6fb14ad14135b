#include <doctest.h>

#include <cmath>
#include <random>

#include "anisores/cones.hpp"
#include "anisores/models.hpp"

using namespace anisores;

namespace {

ConeEnsemble cat_ensemble(double hw_deg = 15.0, double tw_deg = 5.0) {
  const LinearCatMap cat;
  return build_cone_ensemble(SectorCone{line_angle(cat.stable_eigvec()), hw_deg * kPi / 180.0},
                             SectorCone{line_angle(cat.unstable_eigvec()), hw_deg * kPi / 180.0},
                             tw_deg * kPi / 180.0);
}

}  // namespace

TEST_CASE("partition of unity over sampled angles") {
  const ConeEnsemble ens = cat_ensemble();
  for (int i = 0; i < 1000; ++i) {
    const double a = kTwoPi * i / 1000.0;
    const Vec2 xi{std::cos(a), std::sin(a)};
    const double sum = ens.phi_minus(xi) + ens.phi_plus(xi) + ens.phi_zero(xi);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(ens.phi_minus(xi) >= 0.0);
    CHECK(ens.phi_plus(xi) >= 0.0);
    CHECK(ens.phi_zero(xi) >= -1e-15);
  }
}

TEST_CASE("plateau values inside the cones") {
  const ConeEnsemble ens = cat_ensemble();
  const LinearCatMap cat;
  const Vec2 vs = cat.stable_eigvec();
  CHECK(ens.phi_minus(vs) == 1.0);
  CHECK(ens.phi_plus(vs) == 0.0);
  CHECK(ens.phi_zero(vs) == 0.0);
  // 0-homogeneous: scaling does not matter
  CHECK(ens.phi_minus(137.0 * vs) == 1.0);
  // tilde companions dominate the base cutoffs
  for (int i = 0; i < 360; ++i) {
    const double a = kPi * i / 360.0;
    const Vec2 xi{std::cos(a), std::sin(a)};
    if (ens.phi_minus(xi) > 0.0) CHECK(ens.phi_tilde(-1, xi) == 1.0);
    if (ens.phi_plus(xi) > 0.0) CHECK(ens.phi_tilde(+1, xi) == 1.0);
    if (ens.phi_zero(xi) > 1e-15) CHECK(ens.phi_tilde(0, xi) == 1.0);
  }
}

TEST_CASE("overlapping cones are rejected") {
  CHECK_THROWS_AS(build_cone_ensemble(SectorCone{0.3, 0.4}, SectorCone{0.8, 0.4}, 0.05),
                  GeometryError);
  // too-wide transition reaching the opposite cone
  CHECK_THROWS_AS(build_cone_ensemble(SectorCone{0.3, 0.15}, SectorCone{1.3, 0.15}, 0.4),
                  GeometryError);
}

TEST_CASE("cat-map inverse is cone hyperbolic, identity and rotation are not") {
  const ConeEnsemble ens = cat_ensemble();
  const LinearCatMap cat;
  const Mat2 ainv = inverse(cat.matrix());
  const ConeCheckReport ok = cone_hyperbolicity_check({ainv}, ens, ens);
  CHECK(ok.ok);
  CHECK(ok.worst_margin_minus > 0.0);
  CHECK(ok.worst_margin_zero > 0.0);

  const Mat2 id{{{1.0, 0.0}, {0.0, 1.0}}};
  CHECK_FALSE(cone_hyperbolicity_check({id}, ens, ens).ok);

  const Mat2 rot{{{0.0, -1.0}, {1.0, 0.0}}};  // 90 degrees: swaps the cones
  CHECK_FALSE(cone_hyperbolicity_check({rot}, ens, ens).ok);
}

TEST_CASE("exact linear pushforward margins (cone inclusion, lemma-style)") {
  // (Dg_{-alpha})^tr C^-_gamma(x) strictly into C^-_{gamma'}(g_alpha x) on the
  // linear model: gamma = 0.5, gamma' = 0.3, alpha = 1, theta = lambda_s, C = 1
  const LinearCatMap cat;
  const double gamma = 0.5, gamma_p = 0.3;
  CHECK(1.0 * kLambdaS * gamma < gamma_p);  // precondition C^2 theta^alpha gamma < gamma'
  const Vec2 es = cat.stable_eigvec();   // A symmetric: dual lines = eigenlines
  const Vec2 eu = cat.unstable_eigvec();
  const Mat2 mt = transpose(inverse(cat.matrix()));  // (Dg_{-1})^tr
  double worst = 1e300;
  for (int k = -8; k <= 8; ++k) {
    const double c = gamma * k / 8.0;
    const Vec2 v{es[0] + c * eu[0], es[1] + c * eu[1]};
    const Vec2 w = matvec(mt, v);
    const double ratio = std::abs(dot(w, eu)) / std::abs(dot(w, es));
    worst = std::min(worst, gamma_p - ratio);
  }
  CHECK(worst > 0.0);

  // expansion bound of the same pushforward: ratio >= C (1+gamma')/(1+gamma) theta^{-alpha}
  double min_ratio = 1e300;
  for (int k = -8; k <= 8; ++k) {
    const double c = gamma * k / 8.0;
    const Vec2 v{es[0] + c * eu[0], es[1] + c * eu[1]};
    min_ratio = std::min(min_ratio, norm(matvec(mt, v)) / norm(v));
  }
  const double bound = (1.0 + gamma_p) / (1.0 + gamma) * (1.0 / kLambdaS);
  CHECK(min_ratio >= bound);
  // pure stable codirection expands exactly by lambda_u^n
  const Vec2 w1 = matvec(mt, es);
  CHECK(norm(w1) == doctest::Approx(kLambdaU).epsilon(1e-12));
}

TEST_CASE("gamma' = gamma at alpha = 0 gives no strict inclusion") {
  // identity pushforward cannot strictly contract the cone
  const ConeEnsemble ens = cat_ensemble();
  const Mat2 id{{{1.0, 0.0}, {0.0, 1.0}}};
  const ConeCheckReport rep = cone_hyperbolicity_check({id}, ens, ens);
  CHECK(rep.worst_margin_minus <= 0.0 + 1e-12);
}

TEST_CASE("perturbed cat keeps positive cone margins (construction postcondition)") {
  const PerturbedCatMap pert(0.01);
  const ConeEnsemble ens = cat_ensemble();
  std::vector<Mat2> diffs;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const Vec2 x{(i + 0.5) / 12.0, (j + 0.5) / 12.0};
      diffs.push_back(inverse(pert.jacobian(pert.apply_inverse(x))));
    }
  const ConeCheckReport rep = cone_hyperbolicity_check(diffs, ens, ens);
  CHECK(rep.ok);
}
