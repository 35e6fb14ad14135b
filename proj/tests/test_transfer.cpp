#include <doctest.h>

#include <cmath>
#include <random>

#include "anisores/transfer.hpp"

using namespace anisores;

namespace {

ConeEnsemble cat_ensemble() {
  const LinearCatMap cat;
  return build_cone_ensemble(SectorCone{line_angle(cat.stable_eigvec()), 15.0 * kPi / 180.0},
                             SectorCone{line_angle(cat.unstable_eigvec()), 15.0 * kPi / 180.0},
                             5.0 * kPi / 180.0);
}

}  // namespace

TEST_CASE("linear cat transfer matrix is a scaled lattice permutation") {
  const LinearCatMap cat;
  const TransferMatrix tm = assemble_transfer(cat, WeightSpec::horocycle(), 1, 8, 64);
  // column k has a single entry lambda_u at row m = A^{-1} k (A symmetric)
  const Mat2 ainv = inverse(cat.matrix());
  for (int k1 = -8; k1 <= 8; ++k1) {
    for (int k2 = -8; k2 <= 8; ++k2) {
      const Vec2 img = matvec(ainv, Vec2{static_cast<double>(k1), static_cast<double>(k2)});
      const int m1 = static_cast<int>(std::lround(img[0]));
      const int m2 = static_cast<int>(std::lround(img[1]));
      const bool in_box = std::abs(m1) <= 8 && std::abs(m2) <= 8;
      int nnz = 0;
      for (SpMatC::InnerIterator it(tm.M, tm.idx(k1, k2)); it; ++it) {
        ++nnz;
        CHECK(it.row() == tm.idx(m1, m2));
        CHECK(std::abs(it.value() - cplx{kLambdaU, 0.0}) < 1e-12);
      }
      CHECK(nnz == (in_box ? 1 : 0));
    }
  }
}

TEST_CASE("weight one at alpha zero gives the identity matrix") {
  const LinearCatMap cat;
  const TransferMatrix tm = assemble_transfer(cat, WeightSpec::constant(0.0), 0, 6, 32);
  for (int c = 0; c < tm.dim(); ++c) {
    int nnz = 0;
    for (SpMatC::InnerIterator it(tm.M, c); it; ++it) {
      ++nnz;
      CHECK(it.row() == c);
      CHECK(std::abs(it.value() - cplx{1.0, 0.0}) < 1e-12);
    }
    CHECK(nnz == 1);
  }
}

TEST_CASE("assembly preconditions") {
  const LinearCatMap cat;
  CHECK_THROWS_AS(assemble_transfer(cat, WeightSpec::constant(0.0), 1, 3, 64), InvalidParameter);
  CHECK_THROWS_AS(assemble_transfer(cat, WeightSpec::constant(0.0), 1, 8, 16), ResolutionError);
  CHECK_THROWS_AS(assemble_transfer(cat, WeightSpec::constant(0.0), 1, 8, 100), ResolutionError);
}

TEST_CASE("leading resonance of the linear model with horocycle weight") {
  const LinearCatMap cat;
  ResonanceOptions opt;
  opt.how_many = 1;
  opt.with_stability = true;
  const auto recs = resonances(cat, WeightSpec::horocycle(), 1, 8, 64, opt);
  REQUIRE(recs.size() >= 1);
  const auto& lead = recs.front();
  CHECK(std::abs(lead.lambda - cplx{std::log(kLambdaU), 0.0}) < 1e-10);
  CHECK(lead.stable_flag);
  // eigenvector is the constant mode
  const int i0 = 8 * 17 + 8;
  CHECK(std::abs(std::abs(lead.D(i0)) - 1.0) < 1e-10);
  // left functional is Lebesgue (mode-0 row), biorthogonality defect tiny
  CHECK(std::abs(lead.O.dot(lead.D) - cplx{1.0, 0.0}) < 1e-12);
  double off = 0.0;
  for (int i = 0; i < lead.O.size(); ++i)
    if (i != i0) off = std::max(off, std::abs(lead.O(i)));
  CHECK(off < 1e-10);
}

TEST_CASE("weight one leading eigenvalue is 1 (Lebesgue invariance)") {
  const LinearCatMap cat;
  ResonanceOptions opt;
  opt.how_many = 1;
  opt.with_stability = false;
  const auto recs = resonances(cat, WeightSpec::constant(0.0), 1, 8, 64, opt);
  REQUIRE(recs.size() >= 1);
  CHECK(std::abs(recs.front().mu - cplx{1.0, 0.0}) < 1e-11);
}

TEST_CASE("perturbed cat leading eigenvalue stable across truncations") {
  const PerturbedCatMap pert(0.01);
  ResonanceOptions opt;
  opt.how_many = 1;
  opt.with_stability = false;
  const auto r16 = resonances(pert, WeightSpec::horocycle(), 1, 12, 64, opt);
  const auto r24 = resonances(pert, WeightSpec::horocycle(), 1, 20, 128, opt);
  REQUIRE(r16.size() >= 1);
  REQUIRE(r24.size() >= 1);
  CHECK(std::abs(r16.front().mu - r24.front().mu) <= 1e-6);
  CHECK(std::abs(r16.front().lambda.real() - std::log(kLambdaU)) < 1e-3);
}

TEST_CASE("semigroup property of the truncated family") {
  // || L_1 L_1 phi - L_2 phi || small on band-limited observables
  const PerturbedCatMap pert(0.02);
  const TransferMatrix m1 = assemble_transfer(pert, WeightSpec::horocycle(), 1, 12, 64);
  const TransferMatrix m2 = assemble_transfer(pert, WeightSpec::horocycle(), 2, 12, 64);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecC phi = VecC::Zero(m1.dim());
  // low modes only, so the alpha = 1 image stays inside the box
  for (int k1 = -2; k1 <= 2; ++k1)
    for (int k2 = -2; k2 <= 2; ++k2) phi(m1.idx(k1, k2)) = cplx{gauss(rng), gauss(rng)};
  const VecC two_steps = m1.M * (m1.M * phi).eval();
  const VecC direct = m2.M * phi;
  CHECK((two_steps - direct).norm() <= 1e-8 * direct.norm());
}

TEST_CASE("adjoint-measure relation for the horocycle weight") {
  // <Leb, L_alpha phi> = e^{h_top alpha} <Leb, phi> row-exactly on the linear model
  const LinearCatMap cat;
  const TransferMatrix tm = assemble_transfer(cat, WeightSpec::horocycle(), 1, 8, 64);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecC phi(tm.dim());
  for (int i = 0; i < phi.size(); ++i) phi(i) = cplx{gauss(rng), gauss(rng)};
  const VecC img = tm.M * phi;
  const cplx leb_img = img(tm.idx(0, 0));
  const cplx leb_phi = phi(tm.idx(0, 0));
  CHECK(std::abs(leb_img - kLambdaU * leb_phi) <= 1e-6 * phi.norm());
}

TEST_CASE("spectral projector algebra") {
  const LinearCatMap cat;
  ResonanceOptions opt;
  opt.how_many = 1;
  opt.with_stability = false;
  const auto recs = resonances(cat, WeightSpec::horocycle(), 1, 6, 32, opt);
  REQUIRE(!recs.empty());
  const SpectralProjector pi = SpectralProjector::from_record(recs.front());
  CHECK(pi.idempotency_defect() < 1e-12);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecC v(recs.front().D.size());
  for (int i = 0; i < v.size(); ++i) v(i) = cplx{gauss(rng), gauss(rng)};
  const VecC once = pi.apply(v);
  CHECK((pi.apply(once) - once).norm() < 1e-10 * (1.0 + once.norm()));
}

TEST_CASE("distinct projectors annihilate each other") {
  // synthetic 4x4 with two known, well-separated eigenvalues
  MatC D = MatC::Zero(4, 4);
  D(0, 0) = 2.0;
  D(1, 1) = 0.5;
  D(2, 2) = 0.1;
  D(3, 3) = 0.05;
  MatC S = MatC::Random(4, 4) + 4.0 * MatC::Identity(4, 4);
  const MatC A = S * D * S.inverse();
  Eigen::ComplexEigenSolver<MatC> es(A);
  std::vector<std::pair<cplx, int>> order;
  for (int i = 0; i < 4; ++i) order.push_back({es.eigenvalues()(i), i});
  std::sort(order.begin(), order.end(),
            [](auto a, auto b) { return std::abs(a.first) > std::abs(b.first); });
  Eigen::ComplexEigenSolver<MatC> esl(A.adjoint());
  auto make_proj = [&](int which) {
    const VecC d = es.eigenvectors().col(order[which].second);
    int jl = 0;
    double best = 1e300;
    for (int j = 0; j < 4; ++j) {
      const double dd = std::abs(esl.eigenvalues()(j) - std::conj(order[which].first));
      if (dd < best) {
        best = dd;
        jl = j;
      }
    }
    VecC o = esl.eigenvectors().col(jl);
    o /= std::conj(o.dot(d));
    return SpectralProjector({d}, {o});
  };
  const SpectralProjector p1 = make_proj(0), p2 = make_proj(1);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecC v(4);
  for (int i = 0; i < 4; ++i) v(i) = cplx{gauss(rng), gauss(rng)};
  CHECK(p1.apply(p2.apply(v)).norm() <= 1e-8 * v.norm());
}

TEST_CASE("synthetic Jordan block is recovered by the rank tests") {
  const cplx mu{0.7, 0.2};
  MatC J = MatC::Zero(3, 3);
  J(0, 0) = mu;
  J(0, 1) = 1.0;
  J(1, 1) = mu;
  J(2, 2) = cplx{2.0, 0.0};
  MatC S = MatC::Random(3, 3) + 3.0 * MatC::Identity(3, 3);
  const MatC A = S * J * S.inverse();
  const JordanInfo info = jordan_structure(A, mu, 1e-7);
  CHECK(info.n_geometric == 1);
  REQUIRE(info.block_sizes.size() == 1);
  CHECK(info.block_sizes[0] == 2);
  // the nilpotent part annihilates at order two on the generalized eigenspace
  const MatC B = A - mu * MatC::Identity(3, 3);
  CHECK((B * B * S.col(0)).norm() < 1e-9 * S.col(0).norm());
}

TEST_CASE("growth probe sees h_top for the horocycle weight") {
  const LinearCatMap cat;
  const DyadicPartition part = build_partition(3, SmoothNorm::Euclidean, 5);
  const ConeEnsemble ens = cat_ensemble();
  const AnisotropicIndex idx{-0.9, 0.9, 0.5, 2.0};
  const double htop = std::log(kLambdaU);
  const double lam_min = (1.0 - 0.9) * htop;
  const auto rep = transfer_growth_probe(cat, WeightSpec::horocycle(), part, ens, idx, 8, 64,
                                         {1, 2, 3, 4, 5, 6}, 4, lam_min, 99);
  CHECK(std::abs(rep.rate_fit - htop) <= 0.02 * htop);
  CHECK(rep.c_spectralbound <= 3.0);
  CHECK(rep.c_spectralbound > 0.1);
}

TEST_CASE("dolgopyat probe reports finite constants on the mode-0 complement") {
  const LinearCatMap cat;
  TransferMatrix tm = assemble_transfer(cat, WeightSpec::horocycle(), 1, 8, 64);
  ResonanceOptions opt;
  opt.how_many = 1;
  opt.with_stability = false;
  auto recs = resonances(cat, WeightSpec::horocycle(), 1, 8, 64, opt);
  MapResolvent res(std::move(tm), recs);
  const double htop = std::log(kLambdaU);
  const auto rep = dolgopyat_probe(res, htop - 0.5, 1.0, 2.0, 0.5, 1000.0, 7, htop);
  CHECK(rep.uniform_c_exists);
  for (const auto& s : rep.samples) {
    CHECK(std::isfinite(s.c_iterated));
    CHECK(s.n_tilde >= 1);
  }
  // gamma = 0 degenerates to a single resolvent application
  const auto rep0 = dolgopyat_probe(res, htop - 0.5, 1.0, 2.0, 0.0, 1000.0, 3, htop);
  for (const auto& s : rep0.samples) CHECK(s.n_tilde == 1);
}
