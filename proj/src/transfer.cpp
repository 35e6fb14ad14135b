#include "anisores/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "anisores/fft.hpp"
#include "anisores/quadrature.hpp"

namespace anisores {

// ---- assembly -----------------------------------------------------------------

TransferMatrix assemble_transfer(const TorusMap& map, const WeightSpec& weight, long alpha,
                                 int K, int grid) {
  if (K < 4) throw InvalidParameter("assemble_transfer: K must be >= 4");
  if (grid < 4 * K) throw ResolutionError("assemble_transfer: anti-aliasing needs grid >= 4K");
  if (!is_power_of_two(grid)) throw ResolutionError("assemble_transfer: grid must be a power of two");

  TransferMatrix tm;
  tm.K = K;
  tm.alpha = alpha;
  tm.grid = grid;

  const size_t sz = static_cast<size_t>(grid) * grid;
  // backward orbit y = g_{-alpha} x and weight phi_alpha on the grid
  std::vector<Vec2> y(sz);
  std::vector<double> w(sz);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const Vec2 x{static_cast<double>(i) / grid, static_cast<double>(j) / grid};
      const size_t id = static_cast<size_t>(i) * grid + j;
      y[id] = map.flow(x, -alpha);
      w[id] = weight.eval_map(map, x, alpha);
    }
  }

  std::vector<cplx> u(sz), v(sz);
  for (size_t id = 0; id < sz; ++id) {
    u[id] = std::polar(1.0, kTwoPi * y[id][0]);
    v[id] = std::polar(1.0, kTwoPi * y[id][1]);
  }

  TorusFFT2 fft(grid);
  std::vector<Eigen::Triplet<cplx>> trips;
  std::vector<cplx> p1(sz), cur(sz), samples(sz), coeffs;

  // p1 = u^{-K}
  for (size_t id = 0; id < sz; ++id) p1[id] = cplx{1.0, 0.0};
  for (int r = 0; r < K; ++r)
    for (size_t id = 0; id < sz; ++id) p1[id] *= std::conj(u[id]);

  const int side = tm.side();
  for (int k1 = -K; k1 <= K; ++k1) {
    // cur = u^{k1} v^{-K}
    for (size_t id = 0; id < sz; ++id) cur[id] = p1[id];
    for (int r = 0; r < K; ++r)
      for (size_t id = 0; id < sz; ++id) cur[id] *= std::conj(v[id]);
    for (int k2 = -K; k2 <= K; ++k2) {
      for (size_t id = 0; id < sz; ++id) samples[id] = w[id] * cur[id];
      fft.forward(samples, coeffs);
      const int col = (k1 + K) * side + (k2 + K);
      for (int m1 = -K; m1 <= K; ++m1) {
        for (int m2 = -K; m2 <= K; ++m2) {
          const cplx c = coeffs[static_cast<size_t>(fft.index_of_freq(m1)) * grid +
                                fft.index_of_freq(m2)];
          if (std::abs(c) > tm.prune_threshold)
            trips.emplace_back((m1 + K) * side + (m2 + K), col, c);
        }
      }
      if (k2 < K)
        for (size_t id = 0; id < sz; ++id) cur[id] *= v[id];
    }
    if (k1 < K)
      for (size_t id = 0; id < sz; ++id) p1[id] *= u[id];
  }

  tm.M.resize(tm.dim(), tm.dim());
  tm.M.setFromTriplets(trips.begin(), trips.end());
  tm.M.makeCompressed();
  return tm;
}

// ---- eigen machinery ------------------------------------------------------------

namespace {

void sort_pairs(EigenPairs& p) {
  std::vector<size_t> order(p.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const double ma = std::abs(p.values[a]), mb = std::abs(p.values[b]);
    if (ma != mb) return ma > mb;
    if (p.values[a].real() != p.values[b].real()) return p.values[a].real() > p.values[b].real();
    return p.values[a].imag() > p.values[b].imag();
  });
  EigenPairs q;
  for (size_t i : order) {
    q.values.push_back(p.values[i]);
    if (!p.vectors.empty()) q.vectors.push_back(p.vectors[i]);
    if (!p.residuals.empty()) q.residuals.push_back(p.residuals[i]);
  }
  p = std::move(q);
}

}  // namespace

EigenPairs top_eigenpairs(const SpMatC& M, int nev, int krylov_dim, int max_restarts,
                          double tol, uint64_t seed) {
  const int n = static_cast<int>(M.rows());
  EigenPairs out;
  if (n <= 700 || krylov_dim >= n) {
    MatC dense = MatC(M);
    Eigen::ComplexEigenSolver<MatC> es(dense);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
    for (int i = 0; i < n; ++i) {
      out.values.push_back(es.eigenvalues()(i));
      out.vectors.push_back(es.eigenvectors().col(i));
      out.residuals.push_back(0.0);
    }
    sort_pairs(out);
    out.values.resize(std::min<size_t>(nev, out.values.size()));
    out.vectors.resize(out.values.size());
    out.residuals.resize(out.values.size());
    return out;
  }

  const int m = std::min(krylov_dim, n - 1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecC v0(n);
  for (int i = 0; i < n; ++i) v0(i) = cplx{gauss(rng), gauss(rng)};
  v0.normalize();

  MatC V(n, m + 1);
  MatC H = MatC::Zero(m + 1, m);
  for (int restart = 0; restart <= max_restarts; ++restart) {
    V.col(0) = v0;
    H.setZero();
    int built = m;
    for (int j = 0; j < m; ++j) {
      VecC wv = M * V.col(j);
      for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt, one re-pass
        const cplx h = V.col(i).dot(wv);
        H(i, j) += h;
        wv -= h * V.col(i);
      }
      for (int i = 0; i <= j; ++i) {
        const cplx h = V.col(i).dot(wv);
        H(i, j) += h;
        wv -= h * V.col(i);
      }
      const double nw = wv.norm();
      H(j + 1, j) = nw;
      if (nw < 1e-13) {
        built = j + 1;
        break;
      }
      V.col(j + 1) = wv / nw;
    }
    Eigen::ComplexEigenSolver<MatC> es(H.topLeftCorner(built, built));
    if (es.info() != Eigen::Success) throw ConvergenceError("Arnoldi Ritz solve failed");
    std::vector<int> order(built);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
    });
    const int want = std::min(nev, built);
    const double hlast = (built == m) ? std::abs(H(m, m - 1)) : 0.0;
    bool converged = true;
    for (int i = 0; i < want; ++i) {
      const auto& y = es.eigenvectors().col(order[i]);
      const double res = hlast * std::abs(y(built - 1));
      if (res > tol * std::max(1.0, std::abs(es.eigenvalues()(order[i])))) converged = false;
    }
    if (converged || restart == max_restarts || built < m) {
      out.values.clear();
      out.vectors.clear();
      out.residuals.clear();
      for (int i = 0; i < want; ++i) {
        const cplx mu = es.eigenvalues()(order[i]);
        VecC vec = V.leftCols(built) * es.eigenvectors().col(order[i]);
        vec.normalize();
        out.values.push_back(mu);
        out.vectors.push_back(vec);
        out.residuals.push_back((M * vec - mu * vec).norm());
      }
      return out;
    }
    // explicit restart with the wanted Ritz directions
    VecC acc = VecC::Zero(n);
    for (int i = 0; i < want; ++i) acc += V.leftCols(built) * es.eigenvectors().col(order[i]);
    const double na = acc.norm();
    if (na > 1e-14) v0 = acc / na;
  }
  throw ConvergenceError("Arnoldi failed to converge");
}

JordanInfo jordan_structure(const MatC& M, cplx mu, double tol) {
  const int n = static_cast<int>(M.rows());
  MatC B = M - mu * MatC::Identity(n, n);
  JordanInfo info;
  std::vector<int> nullity;
  MatC P = MatC::Identity(n, n);
  const int jmax = std::min(n, 8);
  for (int j = 1; j <= jmax; ++j) {
    P = P * B;
    Eigen::BDCSVD<MatC> svd(P);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > tol * std::max(smax, 1.0)) ++rank;
    nullity.push_back(n - rank);
    if (j > 1 && nullity[j - 1] == nullity[j - 2]) break;
  }
  info.n_geometric = nullity.empty() ? 0 : nullity[0];
  // increments: delta_j = #blocks of size >= j
  std::vector<int> delta;
  for (size_t j = 0; j < nullity.size(); ++j)
    delta.push_back(j == 0 ? nullity[0] : nullity[j] - nullity[j - 1]);
  info.block_sizes.clear();
  for (int b = 0; b < info.n_geometric; ++b) {
    int size = 0;
    for (size_t j = 0; j < delta.size(); ++j)
      if (delta[j] > b) size = static_cast<int>(j) + 1;
    info.block_sizes.push_back(size);
  }
  std::sort(info.block_sizes.rbegin(), info.block_sizes.rend());
  return info;
}

std::vector<ResonanceRecord> resonances(const TorusMap& map, const WeightSpec& weight,
                                        long alpha, int K, int grid,
                                        const ResonanceOptions& opt) {
  TransferMatrix tm = assemble_transfer(map, weight, alpha, K, grid);
  const int nev = opt.how_many + 3;
  EigenPairs right = top_eigenpairs(tm.M, nev, 96, 8, 1e-10, opt.seed);
  EigenPairs left = top_eigenpairs(SpMatC(tm.M.adjoint()), nev, 96, 8, 1e-10, opt.seed + 1);

  // stability: re-extract at K + step and match by minimal distance
  std::vector<double> displacement(right.values.size(), 0.0);
  if (opt.with_stability) {
    const int K2 = K + opt.stability_step;
    int grid2 = grid;
    while (grid2 < 4 * K2) grid2 *= 2;
    TransferMatrix tm2 = assemble_transfer(map, weight, alpha, K2, grid2);
    EigenPairs right2 = top_eigenpairs(tm2.M, nev, 96, 8, 1e-10, opt.seed + 2);
    for (size_t i = 0; i < right.values.size(); ++i) {
      double best = 1e300;
      for (const auto& mu2 : right2.values) best = std::min(best, std::abs(right.values[i] - mu2));
      displacement[i] = best;
    }
  }

  std::vector<ResonanceRecord> out;
  const double mu_region = std::exp(opt.re_lambda_min * static_cast<double>(alpha));
  for (size_t i = 0; i < right.values.size() && out.size() < static_cast<size_t>(opt.how_many); ++i) {
    const cplx mu = right.values[i];
    if (std::abs(mu) < 1e-12 || std::abs(mu) <= mu_region) continue;
    ResonanceRecord rec;
    rec.mu = mu;
    rec.lambda = std::log(mu) / static_cast<double>(alpha);
    rec.K = K;
    rec.alpha = alpha;
    rec.D = right.vectors[i];
    // matching left vector: eigenvalue of M^H is conj(mu)
    double best = 1e300;
    size_t jbest = 0;
    for (size_t j = 0; j < left.values.size(); ++j) {
      const double d = std::abs(left.values[j] - std::conj(mu));
      if (d < best) {
        best = d;
        jbest = j;
      }
    }
    rec.O = left.vectors[jbest];
    const cplx pairing = rec.O.dot(rec.D);
    if (std::abs(pairing) < 1e-12)
      throw ConvergenceError("biorthogonalization ill-conditioned: |O(D)| < 1e-12");
    rec.O /= std::conj(pairing);  // so that O.dot(D) = 1
    rec.stability = displacement[i];
    rec.stable_flag = !opt.with_stability || displacement[i] <= opt.stability_tol;
    if (opt.with_jordan && tm.dim() <= 700) {
      const JordanInfo ji = jordan_structure(MatC(tm.M), mu, opt.jordan_tol);
      rec.n_lambda = std::max(1, ji.n_geometric);
      rec.m_i = ji.block_sizes.empty() ? std::vector<int>{1} : ji.block_sizes;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

// ---- spectral projector ----------------------------------------------------------

SpectralProjector::SpectralProjector(std::vector<VecC> right, std::vector<VecC> left)
    : right_(std::move(right)), left_(std::move(left)) {
  if (right_.size() != left_.size())
    throw InvalidParameter("projector needs matching right/left families");
}

SpectralProjector SpectralProjector::from_record(const ResonanceRecord& rec) {
  return SpectralProjector({rec.D}, {rec.O});
}

VecC SpectralProjector::apply(const VecC& v) const {
  VecC out = VecC::Zero(v.size());
  for (size_t j = 0; j < right_.size(); ++j) out += left_[j].dot(v) * right_[j];
  return out;
}

double SpectralProjector::idempotency_defect() const {
  double worst = 0.0;
  for (const auto& d : right_) {
    const VecC once = apply(d);
    const VecC twice = apply(once);
    worst = std::max(worst, (twice - once).norm() / std::max(1e-300, d.norm()));
  }
  return worst;
}

// ---- map resolvent ----------------------------------------------------------------

MapResolvent::MapResolvent(TransferMatrix tm, std::vector<ResonanceRecord> leading,
                           double tail_tol, int max_terms)
    : tm_(std::move(tm)), leading_(std::move(leading)), tail_tol_(tail_tol),
      max_terms_(max_terms) {
  // growth bound of the full truncated operator, with 10% headroom
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecC v(tm_.dim());
  for (int i = 0; i < v.size(); ++i) v(i) = cplx{gauss(rng), gauss(rng)};
  v.normalize();
  double nm = 1.0;
  for (int it = 0; it < 20; ++it) {
    VecC w = tm_.M * v;
    nm = w.norm();
    if (nm < 1e-300) break;
    v = w / nm;
  }
  a0_ = 1.1 * std::log(std::max(nm, 1e-12)) / static_cast<double>(tm_.alpha);
}

VecC MapResolvent::apply(cplx z, const VecC& phi, int n) const {
  if (z.real() <= a0_)
    throw InvalidParameter("resolvent: Re z must exceed the measured growth bound");
  VecC u = phi;
  for (int rep = 0; rep < n; ++rep) {
    VecC lead = VecC::Zero(u.size());
    VecC w = u;
    for (const auto& rec : leading_) {
      const cplx c = rec.O.dot(u);
      lead += c / (z - rec.lambda) * rec.D;
      w -= c * rec.D;
    }
    // discrete Laplace sum on the complement
    VecC acc = VecC::Zero(u.size());
    VecC cur = w;
    const double ez = std::exp(-z.real() * static_cast<double>(tm_.alpha));
    double scale = 1.0;
    for (int m = 1; m <= max_terms_; ++m) {
      cur = tm_.M * cur;
      scale *= ez;
      const cplx phase = std::exp(-z * static_cast<double>(m * tm_.alpha));
      acc += phase * cur;
      if (scale * cur.norm() < tail_tol_ * std::max(1.0, acc.norm())) break;
    }
    u = lead + static_cast<double>(tm_.alpha) * acc;
  }
  return u;
}

// ---- probes -----------------------------------------------------------------------

namespace {

double weighted_norm(const VecC& v, const std::vector<double>& w) {
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += w[static_cast<size_t>(i)] * std::norm(v(i));
  return std::sqrt(s);
}

}  // namespace

LYProbeReport lasota_yorke_probe(const MapResolvent& res, const DyadicPartition& part,
                                 const ConeEnsemble& ens, const AnisotropicIndex& strong,
                                 const AnisotropicIndex& weak, cplx z, int n_max,
                                 double lambda_min_est, int n_samples, uint64_t seed) {
  if (!(weak.s < strong.s && strong.s < 0.0 && 0.0 < strong.q && strong.q <= strong.t &&
        weak.q < strong.q && strong.q - 1.0 <= weak.q && weak.t < strong.t))
    throw InvalidParameter("lasota_yorke_probe: exponent chain s'<s<0<q<=t, q-1<=q'<q, t'<t violated");

  const int K = res.matrix().K;
  const auto w_strong = norm_weights_p2(part, ens, strong, K);
  const auto w_weak = norm_weights_p2(part, ens, weak, K);

  LYProbeReport rep;
  rep.bound_inv = 1.0 / (z.real() - lambda_min_est);
  const double a0 = res.growth_bound();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = res.matrix().dim();
  const int zero_idx = res.matrix().idx(0, 0);

  rep.per_n_roots.assign(n_max, 0.0);
  double best_c = 0.0;
  for (int sample = 0; sample < n_samples; ++sample) {
    VecC phi(dim);
    for (int i = 0; i < dim; ++i) phi(i) = cplx{gauss(rng), gauss(rng)};
    phi(zero_idx) = 0.0;  // complement samples: essential-part behaviour
    const double ns = weighted_norm(phi, w_strong);
    phi /= ns;
    const double nw = weighted_norm(phi, w_weak);
    VecC u = phi;
    for (int n = 1; n <= n_max; ++n) {
      u = res.apply(z, u, 1);
      const double nn = weighted_norm(u, w_strong);
      rep.per_n_roots[n - 1] =
          std::max(rep.per_n_roots[n - 1], std::pow(std::max(nn, 1e-300), 1.0 / n));
      // smallest C for the displayed two-term bound at this n (n+1 resolvents)
      const double t1 = (std::abs(z) + 1.0 + (z.real() - a0)) / std::pow(z.real() - a0, n) * nw;
      const double t2 = ((n - 1) / (z.real() - lambda_min_est) + 1.0) /
                        ((z.real() - a0) * std::pow(z.real() - lambda_min_est, n - 1));
      best_c = std::max(best_c, nn / (t1 + t2));
    }
  }
  rep.complement_asymptote = rep.per_n_roots[n_max - 1];
  rep.best_C = best_c;

  if (!res.leading().empty()) {
    const auto& rec = res.leading().front();
    VecC d = rec.D / weighted_norm(rec.D, w_strong);
    VecC u = res.apply(z, d, n_max);
    rep.eigen_rate = std::pow(weighted_norm(u, w_strong), 1.0 / n_max);
    rep.eigen_expected = 1.0 / std::abs(z - rec.lambda);
    rep.z_gap = z.real() - rec.lambda.real();
  }
  return rep;
}

GrowthProbeReport transfer_growth_probe(const TorusMap& map, const WeightSpec& weight,
                                        const DyadicPartition& part, const ConeEnsemble& ens,
                                        const AnisotropicIndex& index, int K, int grid,
                                        const std::vector<long>& alphas, int n_samples,
                                        double lambda_min_est, uint64_t seed) {
  TransferMatrix tm = assemble_transfer(map, weight, 1, K, grid);
  const auto w_norm = norm_weights_p2(part, ens, index, K);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = tm.dim();

  std::vector<VecC> samples;
  for (int s = 0; s < n_samples; ++s) {
    VecC phi(dim);
    for (int i = 0; i < dim; ++i) phi(i) = cplx{gauss(rng), gauss(rng)};
    phi /= weighted_norm(phi, w_norm);
    samples.push_back(std::move(phi));
  }
  // include the constant mode as a sample (leading direction)
  VecC e0 = VecC::Zero(dim);
  e0(tm.idx(0, 0)) = 1.0;
  e0 /= weighted_norm(e0, w_norm);
  samples.push_back(std::move(e0));

  GrowthProbeReport rep;
  const double htop = std::log(kLambdaU);
  const long amax = *std::max_element(alphas.begin(), alphas.end());
  std::vector<VecC> cur = samples;
  long step = 0;
  for (long a = 1; a <= amax; ++a) {
    for (auto& v : cur) v = tm.M * v;
    ++step;
    if (std::find(alphas.begin(), alphas.end(), a) == alphas.end()) continue;
    double sup = 0.0;
    for (const auto& v : cur) sup = std::max(sup, weighted_norm(v, w_norm));
    rep.alphas.push_back(static_cast<double>(a));
    rep.log_sup_ratio.push_back(std::log(std::max(sup, 1e-300)));
    rep.c_spectralbound = std::max(rep.c_spectralbound, sup / std::exp(htop * a));
    rep.envelope_ratio.push_back(sup / ((a + 1.0) * std::exp(lambda_min_est * a)));
  }
  // least-squares slope
  const size_t n = rep.alphas.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += rep.alphas[i];
    sy += rep.log_sup_ratio[i];
    sxx += rep.alphas[i] * rep.alphas[i];
    sxy += rep.alphas[i] * rep.log_sup_ratio[i];
  }
  rep.rate_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

DolgopyatReport dolgopyat_probe(const MapResolvent& res, double delta, double a, double b,
                                double gamma, double im_max, int n_im_samples,
                                double lambda_max) {
  DolgopyatReport rep;
  const int dim = res.matrix().dim();
  const int zero_idx = res.matrix().idx(0, 0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int s = 0; s < n_im_samples; ++s) {
    const double im = b * std::pow(im_max / b, static_cast<double>(s) / (n_im_samples - 1));
    const int ntilde = std::max(1, static_cast<int>(std::ceil(gamma * std::log(im))));
    const cplx z{a + lambda_max, im};
    // norm estimate of R^{n~} on the mode-0 complement by random probing
    double nrm = 0.0;
    for (int probe = 0; probe < 12; ++probe) {
      VecC v(dim);
      for (int i = 0; i < dim; ++i) v(i) = cplx{gauss(rng), gauss(rng)};
      v(zero_idx) = 0.0;
      v.normalize();
      const VecC u = res.apply(z, v, ntilde);
      nrm = std::max(nrm, u.norm());
    }
    DolgopyatSample smp;
    smp.im_z = im;
    smp.n_tilde = ntilde;
    smp.norm_rn = nrm;
    const double denom = std::abs(a + (lambda_max - delta));
    smp.c_iterated = std::pow(nrm * std::pow(denom, ntilde), 1.0 / ntilde);
    smp.c_flat = nrm * std::pow(denom, ntilde);
    rep.samples.push_back(smp);
    rep.uniform_c_iterated = std::max(rep.uniform_c_iterated, smp.c_iterated);
  }
  rep.uniform_c_exists = std::isfinite(rep.uniform_c_iterated);
  return rep;
}

// ---- suspension resolvent -----------------------------------------------------------

SuspensionResolvent::SuspensionResolvent(const SuspensionFlow& flow, const WeightSpec& weight,
                                         double growth_bound)
    : flow_(flow), weight_(weight), a0_(growth_bound) {}

cplx SuspensionResolvent::apply_at(cplx z, const std::function<cplx(const SuspPoint&)>& phi,
                                   const SuspPoint& p, int n, double tail_tol) const {
  if (z.real() <= a0_) throw InvalidParameter("suspension resolvent: Re z <= growth bound A0");
  // horizon: (A0 - Re z) h + (n-1) log h - lgamma(n) <= log tail_tol
  const double decay = z.real() - a0_;
  double horizon = 10.0 / decay;
  for (int it = 0; it < 60; ++it) {
    const double lhs = -decay * horizon + (n - 1) * std::log(std::max(horizon, 1.0)) -
                       std::lgamma(static_cast<double>(n));
    if (lhs <= std::log(tail_tol)) break;
    horizon *= 1.5;
  }
  // crossing times of the backward orbit from p
  std::vector<double> breaks;
  {
    double t = p.u;
    Vec2 x = p.x;
    while (t < horizon) {
      breaks.push_back(t);
      x = flow_.base().apply_inverse(x);
      t += flow_.roof(x);
    }
  }
  const double lgn = std::lgamma(static_cast<double>(n));
  auto integrand = [&](double a) -> cplx {
    const double wgt = weight_.eval_susp(flow_, p, a);
    const SuspPoint q = flow_.flow(p, -a);
    const cplx kernel =
        std::exp(-z * a + (n - 1) * std::log(std::max(a, 1e-300)) - lgn);
    return kernel * wgt * phi(q);
  };
  return integrate_piecewise_gl(integrand, 0.0, horizon, breaks, 24);
}

}  // namespace anisores
