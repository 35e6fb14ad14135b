#include "anisores/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <Eigen/Dense>

namespace anisores {

namespace {

// K15 nodes on [-1,1]; the odd-indexed entries are the embedded G7 nodes.
const double kXgk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
const double kWk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double kWg[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469, 0.381830050505119, 0.279705391489277,
                       0.129484966168870};

struct Panel {
  double a, b;
  cplx value;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel eval_panel(const std::function<cplx(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx k{0.0, 0.0}, g{0.0, 0.0};
  for (int i = 0; i < 15; ++i) {
    const cplx fv = f(c + h * kXgk[i]);
    k += kWk[i] * fv;
    if (i % 2 == 1) g += kWg[i / 2] * fv;
  }
  k *= h;
  g *= h;
  return Panel{a, b, k, std::abs(k - g)};
}

}  // namespace

QuadResult integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol, int max_panels) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<Panel> heap;
  heap.push(eval_panel(f, a, b));
  cplx total = heap.top().value;
  double err = heap.top().err;
  int n = 1;
  while (err > abs_tol && n < max_panels) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel l = eval_panel(f, worst.a, mid);
    Panel r = eval_panel(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.err + r.err - worst.err;
    heap.push(l);
    heap.push(r);
    ++n;
  }
  out.value = total;
  out.error = err;
  out.panels = n;
  return out;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

void gauss_laguerre(int n, double a, std::vector<double>& nodes, std::vector<double>& weights) {
  // Golub-Welsch: symmetric tridiagonal Jacobi matrix of L_n^{(a)}.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = 2.0 * i + a + 1.0;
    if (i + 1 < n) {
      const double off = std::sqrt((i + 1.0) * (i + 1.0 + a));
      J(i, i + 1) = off;
      J(i + 1, i) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::tgamma(a + 1.0);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

cplx integrate_piecewise_gl(const std::function<cplx(double)>& f, double a, double b,
                            const std::vector<double>& breaks, int n_per_piece) {
  static thread_local std::vector<double> xs, ws;
  static thread_local int cached_n = 0;
  if (cached_n != n_per_piece) {
    gauss_legendre(n_per_piece, xs, ws);
    cached_n = n_per_piece;
  }
  std::vector<double> pts;
  pts.push_back(a);
  for (double t : breaks)
    if (t > a && t < b) pts.push_back(t);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  cplx total{0.0, 0.0};
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i], hi = pts[i + 1];
    if (hi - lo < 1e-300) continue;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (int j = 0; j < n_per_piece; ++j) total += h * ws[j] * f(c + h * xs[j]);
  }
  return total;
}

}  // namespace anisores
