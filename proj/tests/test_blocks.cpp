#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "anisores/blocks.hpp"
#include "anisores/models.hpp"

using namespace anisores;

namespace {

ConeEnsemble cat_ensemble() {
  const LinearCatMap cat;
  return build_cone_ensemble(SectorCone{line_angle(cat.stable_eigvec()), 15.0 * kPi / 180.0},
                             SectorCone{line_angle(cat.unstable_eigvec()), 15.0 * kPi / 180.0},
                             5.0 * kPi / 180.0);
}

// axis-aligned ensemble: C^- around the xi_2 axis, C^+ around the xi_1 axis;
// lattice points (0, 2^n) then sit at exact dyadic levels inside int C^-
ConeEnsemble axis_ensemble() {
  return build_cone_ensemble(SectorCone{kPi / 2.0, 18.0 * kPi / 180.0},
                             SectorCone{0.0, 18.0 * kPi / 180.0}, 5.0 * kPi / 180.0);
}

std::vector<cplx> sample_mode(int grid, int k1, int k2, cplx amp = {1.0, 0.0}) {
  std::vector<cplx> s(static_cast<size_t>(grid) * grid);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      s[static_cast<size_t>(i) * grid + j] =
          amp * std::polar(1.0, kTwoPi * (k1 * static_cast<double>(i) / grid +
                                          k2 * static_cast<double>(j) / grid));
  return s;
}

}  // namespace

TEST_CASE("constant observable sits at level zero and reconstructs") {
  const DyadicPartition part = build_partition(3, SmoothNorm::Euclidean, 5);
  const ConeEnsemble ens = cat_ensemble();
  const int grid = 64;
  std::vector<cplx> ones(static_cast<size_t>(grid) * grid, cplx{1.0, 0.0});
  const BlockField f = block_apply(part, ens, ones, grid);
  auto rec = f.reconstruct_coeffs();
  CHECK(std::abs(rec[0] - cplx{1.0, 0.0}) < 1e-13);
  for (int n = 1; n <= 5; ++n)
    for (int si : {-1, 0, 1})
      for (const auto& c : f.block(si, n)) CHECK(std::abs(c) < 1e-13);
}

TEST_CASE("single stable-cone mode at an exact dyadic level fills one block") {
  const DyadicPartition part = build_partition(3, SmoothNorm::Euclidean, 6);
  const ConeEnsemble ens = axis_ensemble();
  const int grid = 128;
  const int n = 4;
  const std::array<int, 2> k{0, 16};  // |k| = 2^4 exactly, inside int C^-
  REQUIRE(part.psi(n, 16.0) == 1.0);
  REQUIRE(ens.phi_minus(Vec2{0.0, 16.0}) == 1.0);
  const BlockField f = block_apply(part, ens, sample_mode(grid, k[0], k[1]), grid);
  double mass_in = 0.0, mass_out = 0.0;
  for (int level = 0; level <= 6; ++level)
    for (int si : {-1, 0, 1}) {
      double m = 0.0;
      for (const auto& c : f.block(si, level)) m += std::norm(c);
      if (level == n && si == -1)
        mass_in = m;
      else
        mass_out += m;
    }
  CHECK(mass_in == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mass_out < 1e-24);
}

TEST_CASE("random trigonometric polynomial reconstructs to 1e-10") {
  const DyadicPartition part = build_partition(3, SmoothNorm::Euclidean, 7);
  const ConeEnsemble ens = cat_ensemble();
  const int grid = 256;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> kd(-50, 50);
  std::vector<cplx> s(static_cast<size_t>(grid) * grid, cplx{0.0, 0.0});
  std::vector<std::pair<std::array<int, 2>, cplx>> modes;
  for (int m = 0; m < 12; ++m) {
    const int k1 = kd(rng), k2 = kd(rng);
    if (std::hypot(k1, k2) > 60.0) continue;
    modes.push_back({{k1, k2}, cplx{gauss(rng), gauss(rng)}});
  }
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      cplx acc{0.0, 0.0};
      for (const auto& mk : modes)
        acc += mk.second * std::polar(1.0, kTwoPi * (mk.first[0] * static_cast<double>(i) / grid +
                                                     mk.first[1] * static_cast<double>(j) / grid));
      s[static_cast<size_t>(i) * grid + j] = acc;
    }
  const BlockField f = block_apply(part, ens, s, grid);
  const auto rec = f.reconstruct_coeffs();
  TorusFFT2 fft(grid);
  std::vector<cplx> spatial;
  fft.inverse(rec, spatial);
  double worst = 0.0;
  for (size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(spatial[i] - s[i]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("local norm: single block, zero field, two-block Parseval") {
  const DyadicPartition part = build_partition(3, SmoothNorm::Euclidean, 6);
  const ConeEnsemble ens = axis_ensemble();
  const int grid = 128;
  AnisotropicIndex idx{-0.7, 0.9, 0.4, 2.0};
  const int n = 4, l = 3;
  const BlockField f1 = block_apply(part, ens, sample_mode(grid, 0, 16), grid);
  CHECK(local_norm(f1, idx) == doctest::Approx(std::pow(2.0, idx.s * n)).epsilon(1e-10));

  std::vector<cplx> zero(static_cast<size_t>(grid) * grid, cplx{0.0, 0.0});
  CHECK(local_norm(block_apply(part, ens, zero, grid), idx) == 0.0);

  // stable mode at level 4 plus unstable mode (8, 0) at level 3
  auto s = sample_mode(grid, 0, 16);
  const auto s2 = sample_mode(grid, 8, 0);
  for (size_t i = 0; i < s.size(); ++i) s[i] += s2[i];
  REQUIRE(part.psi(l, 8.0) == 1.0);
  REQUIRE(ens.phi_plus(Vec2{8.0, 0.0}) == 1.0);
  const double nrm2 = local_norm(block_apply(part, ens, s, grid), idx);
  const double expect = std::sqrt(std::pow(4.0, idx.s * n) + std::pow(4.0, idx.t * l));
  CHECK(nrm2 == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("norm monotone in each exponent") {
  const DyadicPartition part = build_partition(3, SmoothNorm::Euclidean, 6);
  const ConeEnsemble ens = cat_ensemble();
  const int grid = 128;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> s(static_cast<size_t>(grid) * grid);
  for (auto& v : s) v = cplx{gauss(rng), gauss(rng)};
  const BlockField f = block_apply(part, ens, s, grid);
  const AnisotropicIndex base{-0.7, 0.9, 0.4, 2.0};
  const double n0 = local_norm(f, base);
  for (int comp = 0; comp < 3; ++comp) {
    AnisotropicIndex up = base;
    if (comp == 0) up.s += 0.2;
    if (comp == 1) up.t += 0.2;
    if (comp == 2) up.q += 0.2;
    CHECK(local_norm(f, up) >= n0 - 1e-12);
  }
}

TEST_CASE("Young contract: block operator norms bounded by kernel L1 norms") {
  const DyadicPartition part = build_partition(3, SmoothNorm::Euclidean, 7);
  const ConeEnsemble ens = cat_ensemble();
  const int grid = 256;
  TorusFFT2 fft(grid);
  auto kernel_l1 = [&](int n) {
    std::vector<cplx> coeffs(static_cast<size_t>(grid) * grid, cplx{0.0, 0.0}), spatial;
    for (int i1 = 0; i1 < grid; ++i1)
      for (int i2 = 0; i2 < grid; ++i2) {
        const Vec2 xi{static_cast<double>(fft.freq_of_index(i1)),
                      static_cast<double>(fft.freq_of_index(i2))};
        if (xi[0] == 0 && xi[1] == 0) continue;
        coeffs[static_cast<size_t>(i1) * grid + i2] = part.psi(n, norm(xi)) * ens.phi_minus(xi);
      }
    fft.inverse(coeffs, spatial);
    double acc = 0.0;
    for (const auto& v : spatial) acc += std::abs(v);
    return acc / (static_cast<double>(grid) * grid);
  };
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> kd(-20, 20);
  std::vector<cplx> s(static_cast<size_t>(grid) * grid, cplx{0.0, 0.0});
  for (int m = 0; m < 10; ++m) {
    const auto mode = sample_mode(grid, kd(rng), kd(rng), cplx{gauss(rng), gauss(rng)});
    for (size_t i = 0; i < s.size(); ++i) s[i] += mode[i];
  }
  double linf_phi = 0.0;
  for (const auto& v : s) linf_phi = std::max(linf_phi, std::abs(v));
  const BlockField f = block_apply(part, ens, s, grid);
  std::vector<cplx> spatial;
  for (int n = 2; n <= 5; ++n) {
    fft.inverse(f.block(-1, n), spatial);
    double linf_block = 0.0;
    for (const auto& v : spatial) linf_block = std::max(linf_block, std::abs(v));
    CHECK(linf_block <= kernel_l1(n) * linf_phi * (1.0 + 1e-9));
  }
  // level independence of the kernel L1 norms holds once the annulus is
  // lattice-resolved; at this grid that is levels >= 5 (within 1%)
  const double l5 = kernel_l1(5), l6 = kernel_l1(6);
  CHECK(std::abs(l6 / l5 - 1.0) <= 0.01);
}

TEST_CASE("block field round-trips through the columnar binary layout") {
  const DyadicPartition part = build_partition(3, SmoothNorm::Euclidean, 4);
  const ConeEnsemble ens = cat_ensemble();
  const int grid = 32;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> s(static_cast<size_t>(grid) * grid);
  for (auto& v : s) v = cplx{gauss(rng), gauss(rng)};
  const BlockField f = block_apply(part, ens, s, grid);
  const AnisotropicIndex idx{-0.5, 0.5, 0.3, 2.0};
  const std::string path = "/tmp/anisores_blockfield_test.bin";
  f.save(path, idx);
  AnisotropicIndex idx2;
  const BlockField g = BlockField::load(path, &idx2);
  CHECK(idx2.s == idx.s);
  CHECK(g.grid() == f.grid());
  double worst = 0.0;
  for (int n = 0; n <= 4; ++n)
    for (int si : {-1, 0, 1})
      for (size_t i = 0; i < f.block(si, n).size(); ++i)
        worst = std::max(worst, std::abs(f.block(si, n)[i] - g.block(si, n)[i]));
  CHECK(worst == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("arrow relation: identity map gives the |n-l| <= 4 band") {
  const ConeEnsemble ens = cat_ensemble();
  const Mat2 id{{{1.0, 0.0}, {0.0, 1.0}}};
  const ArrowNorms norms = arrow_norms({id}, {id}, ens, ens);
  for (int si = 0; si < 3; ++si) {
    CHECK(norms.src[si] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norms.dst[si] == doctest::Approx(1.0).epsilon(1e-12));
  }
  AnisotropicIndex c{-0.5, 0.5, 0.3, 2.0};
  const ArrowReport rep = arrow_partition(norms, c, c, 8);
  for (const auto& p : rep.admissible)
    if (p.tau == p.sigma) CHECK(std::abs(p.n - p.ell) <= 4);
  int count_band = 0;
  for (const auto& p : rep.admissible)
    if (p.tau == -1 && p.sigma == -1) ++count_band;
  int expect = 0;
  for (int l = 0; l <= 8; ++l)
    for (int n = 0; n <= 8; ++n)
      if (std::abs(n - l) <= 4) ++expect;
  CHECK(count_band == expect);
}

TEST_CASE("arrow norms of the inverse cat map hit the eigenvalue") {
  // for F = T^{-1} the unstable codirection of F lies along the stable
  // eigenline of A; the transposed differential expands it by lambda_u exactly
  const LinearCatMap cat;
  const ConeEnsemble ens_inv =
      build_cone_ensemble(SectorCone{line_angle(cat.unstable_eigvec()), 15.0 * kPi / 180.0},
                          SectorCone{line_angle(cat.stable_eigvec()), 15.0 * kPi / 180.0},
                          5.0 * kPi / 180.0);
  const Mat2 dF = inverse(cat.matrix());
  const Mat2 dFinv = cat.matrix();
  const ArrowNorms norms = arrow_norms({dF}, {dFinv}, ens_inv, ens_inv);
  CHECK(norms.src[1] == doctest::Approx(kLambdaU).epsilon(1e-10));
  AnisotropicIndex c{-0.5, 0.5, 0.3, 2.0};
  const ArrowReport rep = arrow_partition(norms, c, c, 6);
  for (const auto& p : rep.admissible) CHECK(c.c(p.sigma) <= c.c(p.tau));
}

TEST_CASE("singular differential raises") {
  const ConeEnsemble ens = cat_ensemble();
  const Mat2 sing{{{1.0, 0.0}, {0.0, 0.0}}};
  CHECK_THROWS_AS(arrow_norms({sing}, {sing}, ens, ens), GeometryError);
}
