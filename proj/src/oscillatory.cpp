#include "anisores/oscillatory.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>

namespace anisores {

PhasePair make_phase_pair(double a, double b, int n, const std::function<double(double)>& G,
                          const std::function<double(double)>& dG,
                          const std::function<cplx(double)>& f, double holder_delta) {
  PhasePair p;
  p.a = a;
  p.b = b;
  p.n = n;
  p.holder_delta = holder_delta;
  p.phase.resize(n);
  p.dphase.resize(n);
  p.amplitude.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = p.node(i);
    p.phase[i] = G(x);
    p.dphase[i] = dG(x);
    p.amplitude[i] = f(x);
  }
  return p;
}

cplx osc_integral_with(const PhasePair& p, const std::vector<cplx>& amplitude) {
  cplx acc{0.0, 0.0};
  for (int i = 0; i < p.n; ++i)
    acc += std::polar(1.0, p.phase[i]) * amplitude[static_cast<size_t>(i)];
  return acc * p.dx();
}

cplx osc_integral(const PhasePair& p) { return osc_integral_with(p, p.amplitude); }

std::vector<cplx> spectral_derivative(const std::vector<cplx>& f, double length) {
  const int n = static_cast<int>(f.size());
  const int np = 2 * n;  // padded periodic embedding
  std::vector<cplx> buf(np, cplx{0.0, 0.0});
  for (int i = 0; i < n; ++i) buf[static_cast<size_t>(i)] = f[static_cast<size_t>(i)];
  auto* in = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan fw = fftw_plan_dft_1d(np, in, in, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(fw);
  fftw_destroy_plan(fw);
  const double plen = 2.0 * length;
  for (int k = 0; k < np; ++k) {
    const int kk = k < np / 2 ? k : k - np;
    const cplx ik{0.0, kTwoPi * kk / plen};
    buf[static_cast<size_t>(k)] *= ik / static_cast<double>(np);
  }
  // Nyquist mode has no odd-derivative counterpart
  buf[static_cast<size_t>(np / 2)] = cplx{0.0, 0.0};
  fftw_plan bw = fftw_plan_dft_1d(np, in, in, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(bw);
  fftw_destroy_plan(bw);
  return std::vector<cplx>(buf.begin(), buf.begin() + n);
}

namespace {

void check_gradient(const PhasePair& p) {
  for (int i = 0; i < p.n; ++i)
    if (std::abs(p.amplitude[static_cast<size_t>(i)]) > 1e-14 &&
        std::abs(p.dphase[static_cast<size_t>(i)]) < 1e-10)
      throw InvalidParameter("oscillatory: phase gradient vanishes on the amplitude support");
}

}  // namespace

IbpResult ibp_transform(const PhasePair& p) {
  check_gradient(p);
  std::vector<cplx> h(p.amplitude.size());
  for (size_t i = 0; i < h.size(); ++i) {
    const double g = p.dphase[i];
    h[i] = std::abs(p.amplitude[i]) < 1e-300 ? cplx{0.0, 0.0} : p.amplitude[i] / g;
  }
  IbpResult out;
  out.amplitude = spectral_derivative(h, p.b - p.a);
  out.integral_before = osc_integral(p);
  out.integral_after = cplx{0.0, 1.0} * osc_integral_with(p, out.amplitude);
  out.identity_residual = std::abs(out.integral_before - out.integral_after);
  return out;
}

IbpIterateResult ibp_iterate(const PhasePair& p, int k) {
  check_gradient(p);
  if (k < 0) throw InvalidParameter("ibp_iterate: k must be >= 0");
  IbpIterateResult out;
  std::vector<cplx> v = p.amplitude;
  for (int iter = 0; iter < k; ++iter) {
    std::vector<cplx> h(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
      const double g = p.dphase[i];
      h[i] = std::abs(v[i]) < 1e-300 ? cplx{0.0, 0.0} : v[i] / g;
    }
    v = spectral_derivative(h, p.b - p.a);
  }
  out.v_k = v;
  out.f_k.resize(v.size());
  out.f_k_sup = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    out.f_k[i] = v[i] * std::pow(std::abs(p.dphase[i]), static_cast<double>(k));
    if (std::abs(p.amplitude[i]) > 1e-13)  // sup over the original support
      out.f_k_sup = std::max(out.f_k_sup, std::abs(out.f_k[i]));
  }
  // lemma-style envelope: C sup max_{|g|<=k} || |G'| d^g (G'/|G'|^2) ||^k ||f||_{C^k}
  {
    std::vector<cplx> w(p.dphase.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / p.dphase[i];
    double wmax = 0.0;
    std::vector<cplx> dcur = w;
    for (int g = 0; g <= k; ++g) {
      for (size_t i = 0; i < w.size(); ++i)
        if (std::abs(p.amplitude[i]) > 1e-13)
          wmax = std::max(wmax, std::abs(p.dphase[i] * dcur[i]));
      if (g < k) dcur = spectral_derivative(dcur, p.b - p.a);
    }
    std::vector<cplx> f = p.amplitude;
    double fck = 0.0;
    for (int g = 0; g <= k; ++g) {
      for (const auto& c : f) fck = std::max(fck, std::abs(c));
      if (g < k) f = spectral_derivative(f, p.b - p.a);
    }
    out.envelope_bound = std::pow(wmax, static_cast<double>(k)) * fck;
  }
  out.integral_direct = osc_integral(p);
  cplx ik{1.0, 0.0};
  for (int i = 0; i < k; ++i) ik *= cplx{0.0, 1.0};
  out.integral_transformed = ik * osc_integral_with(p, out.v_k);
  out.identity_residual = std::abs(out.integral_direct - out.integral_transformed);
  return out;
}

namespace {

// normalized mollifier exp(-1/(1-u^2)) scaled to [-eps, eps], discrete unit mass
std::vector<double> mollifier(double eps, double dx, int* radius_out) {
  const int r = static_cast<int>(std::floor(eps / dx));
  if (r < 2) throw ResolutionError("mollifier radius below grid resolution");
  std::vector<double> nu(2 * r + 1, 0.0);
  double mass = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double u = static_cast<double>(i) * dx / eps;
    if (std::abs(u) < 1.0) nu[static_cast<size_t>(i + r)] = std::exp(-1.0 / (1.0 - u * u));
    mass += nu[static_cast<size_t>(i + r)] * dx;
  }
  for (auto& v : nu) v /= mass;
  *radius_out = r;
  return nu;
}

std::vector<cplx> convolve(const std::vector<cplx>& f, const std::vector<double>& nu, int r,
                           double dx) {
  const int n = static_cast<int>(f.size());
  std::vector<cplx> out(f.size(), cplx{0.0, 0.0});
  for (int i = 0; i < n; ++i) {
    cplx acc{0.0, 0.0};
    for (int j = -r; j <= r; ++j) {
      const int idx = i - j;
      if (idx < 0 || idx >= n) continue;
      acc += nu[static_cast<size_t>(j + r)] * f[static_cast<size_t>(idx)];
    }
    out[static_cast<size_t>(i)] = acc * dx;
  }
  return out;
}

}  // namespace

RegularizedIbpResult regularized_ibp(const PhasePair& p, double L, double eps) {
  check_gradient(p);
  if (L < 1.0) throw InvalidParameter("regularized_ibp: L must be >= 1");
  const double dx = p.dx();
  int r = 0;
  const std::vector<double> nu = mollifier(eps, dx, &r);

  std::vector<cplx> h(p.amplitude.size());
  for (size_t i = 0; i < h.size(); ++i) {
    const double g = p.dphase[i];
    h[i] = std::abs(p.amplitude[i]) < 1e-300 ? cplx{0.0, 0.0} : p.amplitude[i] / g;
  }
  const std::vector<cplx> heps = convolve(h, nu, r, dx);
  const std::vector<cplx> dheps = spectral_derivative(heps, p.b - p.a);

  RegularizedIbpResult out;
  double mass = 0.0;
  for (double v : nu) mass += v * dx;
  out.mollifier_mass_defect = std::abs(mass - 1.0);

  // phase L*G
  auto osc_with_scaled_phase = [&](const std::vector<cplx>& amp) {
    cplx acc{0.0, 0.0};
    for (int i = 0; i < p.n; ++i)
      acc += std::polar(1.0, L * p.phase[static_cast<size_t>(i)]) * amp[static_cast<size_t>(i)];
    return acc * dx;
  };
  out.direct = osc_with_scaled_phase(p.amplitude);
  out.term_smooth = cplx{0.0, 1.0} / L * osc_with_scaled_phase(dheps);
  std::vector<cplx> rough(h.size());
  for (size_t i = 0; i < h.size(); ++i) rough[i] = p.dphase[i] * (h[i] - heps[i]);
  out.term_rough = osc_with_scaled_phase(rough);
  out.identity_residual = std::abs(out.direct - (out.term_smooth + out.term_rough));

  for (size_t i = 0; i < h.size(); ++i) {
    out.diff_sup = std::max(out.diff_sup, std::abs(h[i] - heps[i]));
    out.grad_heps_sup = std::max(out.grad_heps_sup, std::abs(dheps[i]));
  }
  return out;
}

MollifierSweep mollifier_exponent_sweep(const PhasePair& p, double L,
                                        const std::vector<double>& eps_list) {
  MollifierSweep sweep;
  for (double e : eps_list) {
    const RegularizedIbpResult r = regularized_ibp(p, L, e);
    sweep.eps.push_back(e);
    sweep.diff_sup.push_back(r.diff_sup);
    sweep.grad_sup.push_back(r.grad_heps_sup);
  }
  auto slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const size_t n = xs.size();
    for (size_t i = 0; i < n; ++i) {
      const double lx = std::log(xs[i]), ly = std::log(std::max(ys[i], 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  sweep.fitted_delta = slope(sweep.eps, sweep.diff_sup);
  sweep.fitted_delta_minus_one = slope(sweep.eps, sweep.grad_sup);
  return sweep;
}

}  // namespace anisores
