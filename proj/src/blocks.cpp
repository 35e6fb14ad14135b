#include "anisores/blocks.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace anisores {

BlockField::BlockField(int grid, int max_level) : grid_(grid), max_level_(max_level) {
  blocks_.assign(static_cast<size_t>(max_level + 1) * 3,
                 std::vector<cplx>(static_cast<size_t>(grid) * grid, cplx{0.0, 0.0}));
}

std::vector<cplx>& BlockField::block(int sigma, int n) {
  return blocks_[static_cast<size_t>(n) * 3 + sigma_index(sigma)];
}
const std::vector<cplx>& BlockField::block(int sigma, int n) const {
  return blocks_[static_cast<size_t>(n) * 3 + sigma_index(sigma)];
}

std::vector<cplx> BlockField::reconstruct_coeffs() const {
  std::vector<cplx> out(static_cast<size_t>(grid_) * grid_, cplx{0.0, 0.0});
  for (const auto& b : blocks_)
    for (size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

BlockField block_apply(const DyadicPartition& partition, const ConeEnsemble& ensemble,
                       const std::vector<cplx>& samples, int grid) {
  if (!is_power_of_two(grid)) throw ResolutionError("block_apply: grid must be a power of two");
  TorusFFT2 fft(grid);
  std::vector<cplx> coeffs;
  fft.forward(samples, coeffs);

  const int cap = partition.max_level();
  BlockField field(grid, cap);
  for (int i1 = 0; i1 < grid; ++i1) {
    const int k1 = fft.freq_of_index(i1);
    for (int i2 = 0; i2 < grid; ++i2) {
      const int k2 = fft.freq_of_index(i2);
      const size_t idx = static_cast<size_t>(i1) * grid + i2;
      const cplx c = coeffs[idx];
      if (c == cplx{0.0, 0.0}) continue;
      const Vec2 xi{static_cast<double>(k1), static_cast<double>(k2)};
      const double r = norm(xi);
      if (k1 == 0 && k2 == 0) {
        // zero frequency: Psi_0 = 1 and the angular cutoffs are 0-homogeneous
        // with no preferred direction; the whole weight sits in the (0,0) cell.
        // Convention: assign it to the three sigma-blocks with the angular
        // average, preserving sum-to-one. We put it in sigma = 0's share plus
        // the others so the reconstruction is exact: simplest exact choice is
        // thirds.
        field.block(-1, 0)[idx] += c / 3.0;
        field.block(+1, 0)[idx] += c / 3.0;
        field.block(0, 0)[idx] += c / 3.0;
        continue;
      }
      for (int n = 0; n <= cap; ++n) {
        const double pn = partition.psi(n, r);
        if (pn == 0.0) continue;
        const double pm = ensemble.phi_minus(xi);
        const double pp = ensemble.phi_plus(xi);
        const double p0 = 1.0 - pm - pp;
        if (pm != 0.0) field.block(-1, n)[idx] += pn * pm * c;
        if (pp != 0.0) field.block(+1, n)[idx] += pn * pp * c;
        if (p0 != 0.0) field.block(0, n)[idx] += pn * p0 * c;
      }
    }
  }
  return field;
}

double local_norm(const BlockField& field, const AnisotropicIndex& index) {
  const int grid = field.grid();
  const int cap = field.max_level();
  const size_t sz = static_cast<size_t>(grid) * grid;
  TorusFFT2 fft(grid);

  // pointwise l2^c accumulation across blocks
  std::vector<double> acc(sz, 0.0);
  std::vector<cplx> spatial;
  for (int n = 0; n <= cap; ++n) {
    for (int si = 0; si < 3; ++si) {
      const int sigma = BlockField::sigma_of_index(si);
      const auto& b = field.block(sigma, n);
      bool nonzero = false;
      for (const auto& v : b)
        if (v != cplx{0.0, 0.0}) {
          nonzero = true;
          break;
        }
      if (!nonzero) continue;
      fft.inverse(b, spatial);
      const double w = std::pow(4.0, index.c(sigma) * n);
      for (size_t i = 0; i < sz; ++i) acc[i] += w * std::norm(spatial[i]);
    }
  }
  // L_p over the normalized torus (mean quadrature)
  if (std::isinf(index.p)) {
    double m = 0.0;
    for (double a : acc) m = std::max(m, a);
    return std::sqrt(m);
  }
  double sum = 0.0;
  const double halfp = index.p / 2.0;
  for (double a : acc) sum += std::pow(a, halfp);
  return std::pow(sum / static_cast<double>(sz), 1.0 / index.p);
}

std::vector<double> norm_weights_p2(const DyadicPartition& partition,
                                    const ConeEnsemble& ensemble,
                                    const AnisotropicIndex& index, int K) {
  const int side = 2 * K + 1;
  std::vector<double> w(static_cast<size_t>(side) * side, 0.0);
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const size_t idx = static_cast<size_t>(k1 + K) * side + (k2 + K);
      if (k1 == 0 && k2 == 0) {
        w[idx] = 1.0 / 3.0;  // thirds convention of block_apply: 3 * (1/3)^2 * 4^0
        continue;
      }
      const Vec2 xi{static_cast<double>(k1), static_cast<double>(k2)};
      const double r = norm(xi);
      const double pm = ensemble.phi_minus(xi);
      const double pp = ensemble.phi_plus(xi);
      const double p0 = 1.0 - pm - pp;
      double total = 0.0;
      for (int n = 0; n <= partition.max_level(); ++n) {
        const double pn = partition.psi(n, r);
        if (pn == 0.0) continue;
        total += std::pow(4.0, index.s * n) * pn * pn * pm * pm;
        total += std::pow(4.0, index.t * n) * pn * pn * pp * pp;
        total += std::pow(4.0, index.q * n) * pn * pn * p0 * p0;
      }
      w[idx] = total;
    }
  }
  return w;
}

void BlockField::save(const std::string& path, const AnisotropicIndex& index) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SolverError("cannot open " + path + " for writing");
  const char magic[8] = {'A', 'N', 'I', 'B', 'L', 'K', '0', '1'};
  f.write(magic, 8);
  auto w32 = [&](int32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  auto w64 = [&](double v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  w32(2);  // torus dimension
  w32(grid_);
  w32(max_level_);
  w64(index.s);
  w64(index.t);
  w64(index.q);
  w64(index.p);
  for (const auto& b : blocks_)
    f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(cplx)));
}

BlockField BlockField::load(const std::string& path, AnisotropicIndex* index_out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SolverError("cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (std::memcmp(magic, "ANIBLK01", 8) != 0) throw SolverError("bad block file magic");
  auto r32 = [&]() {
    int32_t v;
    f.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto r64 = [&]() {
    double v;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  const int dim = r32();
  if (dim != 2) throw SolverError("unsupported torus dimension in block file");
  const int grid = r32();
  const int cap = r32();
  AnisotropicIndex idx;
  idx.s = r64();
  idx.t = r64();
  idx.q = r64();
  idx.p = r64();
  if (index_out) *index_out = idx;
  BlockField field(grid, cap);
  for (auto& b : field.blocks_)
    f.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(cplx)));
  if (!f) throw SolverError("truncated block file");
  return field;
}

namespace {

double sup_over_sector(const Mat2& m, const SectorCone& cone, int n_rays = 65) {
  double best = 0.0;
  for (int i = 0; i < n_rays; ++i) {
    const double a = cone.axis - cone.half_width + (2.0 * cone.half_width) * i / (n_rays - 1);
    const Vec2 ray{std::cos(a), std::sin(a)};
    best = std::max(best, norm(matvec(m, ray)));
  }
  // a linear map attains its sup over a closed line-cone either on the boundary
  // or at the top singular direction when that lies inside
  Mat2 mtm = matmul(transpose(m), m);
  const double tr = mtm[0][0] + mtm[1][1];
  const double dd = det(mtm);
  const double s1sq = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * dd)));
  // top right-singular direction of m
  Vec2 v{mtm[0][1], s1sq - mtm[0][0]};
  if (norm(v) < 1e-12) v = Vec2{s1sq - mtm[1][1], mtm[1][0]};
  if (norm(v) > 1e-12 && cone.contains(v)) best = std::max(best, std::sqrt(s1sq));
  return best;
}

}  // namespace

ArrowNorms arrow_norms(const std::vector<Mat2>& dF_on_I, const std::vector<Mat2>& dFinv_on_FI,
                       const ConeEnsemble& theta_src, const ConeEnsemble& theta_dst) {
  ArrowNorms out;
  for (int si = 0; si < 3; ++si) {
    const int sigma = BlockField::sigma_of_index(si);
    double sup_src = 0.0, sup_dst = 0.0;
    for (const auto& m : dF_on_I) {
      if (std::abs(det(m)) < 1e-14) throw GeometryError("singular differential on region");
      const Mat2 mt = transpose(m);
      if (sigma == 0) {
        for (const auto& gap : theta_src.support_zero_tilde()) {
          const SectorCone c{0.5 * (gap.first + gap.second), 0.5 * (gap.second - gap.first)};
          sup_src = std::max(sup_src, sup_over_sector(mt, c));
        }
      } else {
        sup_src = std::max(sup_src, sup_over_sector(mt, theta_src.support_tilde(sigma)));
      }
    }
    for (const auto& m : dFinv_on_FI) {
      const Mat2 mt = transpose(m);
      if (sigma == 0) {
        for (const auto& gap : theta_dst.support_zero_tilde()) {
          const SectorCone c{0.5 * (gap.first + gap.second), 0.5 * (gap.second - gap.first)};
          sup_dst = std::max(sup_dst, sup_over_sector(mt, c));
        }
      } else {
        sup_dst = std::max(sup_dst, sup_over_sector(mt, theta_dst.support(sigma)));
      }
    }
    out.src[si] = sup_src;
    out.dst[si] = sup_dst;
  }
  return out;
}

ArrowReport arrow_partition(const ArrowNorms& norms, const AnisotropicIndex& c,
                            const AnisotropicIndex& c_prime, int max_level) {
  ArrowReport rep;
  for (int ti = 0; ti < 3; ++ti) {
    const int tau = BlockField::sigma_of_index(ti);
    for (int si = 0; si < 3; ++si) {
      const int sigma = BlockField::sigma_of_index(si);
      if (c.c(sigma) > c_prime.c(tau)) continue;  // Def 3.5 filter
      const double up = 16.0 * norms.src[ti];      // 2^4 ||F||_{tau,I,o}
      const double lo = 1.0 / (16.0 * norms.dst[si]);
      for (int ell = 0; ell <= max_level; ++ell) {
        for (int n = 0; n <= max_level; ++n) {
          const double ratio = std::ldexp(1.0, n - ell);
          if (ratio >= lo && ratio <= up) rep.admissible.push_back({tau, ell, sigma, n});
        }
      }
      const double ct = c_prime.c(tau);
      const double bound =
          ct > 0.0 ? std::pow(norms.src[ti], ct) : std::pow(norms.dst[si], -ct);
      rep.bound[{sigma, tau}] = bound;
    }
  }
  return rep;
}

}  // namespace anisores
