#pragma once

// Globally adaptive Gauss-Kronrod (7/15) with breakpoints, adaptive Simpson,
// and fixed composite Gauss-Legendre rules. Integrands may return double or
// std::complex<double>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gsdd/errors.hpp"

namespace gsdd {

template <class R>
struct QuadResult {
  R value{};
  double abs_error = 0.0;
  int evaluations = 0;
  int intervals = 0;
  bool converged = false;
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_intervals = 2000;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

struct KronrodRule {
  std::vector<double> x, wk, wg;  // full symmetric rule on [-1, 1]
};

inline const KronrodRule& kronrod15() {
  static const KronrodRule rule = [] {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& a = GK::abscissa();
    const auto& w = GK::weights();
    const auto& g = G::weights();
    KronrodRule r;
    // abscissa()[0] = 0 is a Gauss node for the odd 7-point rule; Gauss
    // nodes then sit at even indices
    for (size_t i = 0; i < a.size(); ++i) {
      double wg = (i % 2 == 0) ? g[i / 2] : 0.0;
      r.x.push_back(a[i]);
      r.wk.push_back(w[i]);
      r.wg.push_back(wg);
      if (i > 0) {
        r.x.push_back(-a[i]);
        r.wk.push_back(w[i]);
        r.wg.push_back(wg);
      }
    }
    return r;
  }();
  return rule;
}

template <class R>
struct Segment {
  double a, b;
  R value;
  double err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

template <class R, class F>
Segment<R> gk15(F& f, double a, double b) {
  const auto& r = kronrod15();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  R k{}, g{};
  for (size_t i = 0; i < r.x.size(); ++i) {
    R v = f(c + h * r.x[i]);
    k += r.wk[i] * v;
    g += r.wg[i] * v;
  }
  k *= h;
  g *= h;
  double err = magnitude(k - g);
  // guard against lucky agreement of the two rules
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * magnitude(k));
  return {a, b, k, err};
}

}  // namespace detail

// Integrate f over [pts.front(), pts.back()] with the given breakpoints.
template <class F>
auto integrate(F&& f, const std::vector<double>& pts, const QuadOptions& opt = {})
    -> QuadResult<std::decay_t<decltype(f(0.0))>> {
  using R = std::decay_t<decltype(f(0.0))>;
  QuadResult<R> res;
  if (pts.size() < 2) return res;
  std::priority_queue<detail::Segment<R>> heap;
  R total{};
  double err = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    auto s = detail::gk15<R>(f, pts[i], pts[i + 1]);
    res.evaluations += 15;
    total += s.value;
    err += s.err;
    heap.push(s);
  }
  auto done = [&] {
    return err <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total));
  };
  while (!heap.empty() && !done() && static_cast<int>(heap.size()) < opt.max_intervals) {
    auto s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) {
      heap.push(s);
      break;
    }
    auto l = detail::gk15<R>(f, s.a, m), r = detail::gk15<R>(f, m, s.b);
    res.evaluations += 30;
    total += l.value + r.value - s.value;
    err += l.err + r.err - s.err;
    heap.push(l);
    heap.push(r);
  }
  // re-sum to shed accumulated rounding from the running updates
  total = R{};
  err = 0.0;
  res.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  res.value = total;
  res.abs_error = err;
  res.converged = err <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)) * 1.000001;
  return res;
}

template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

// Same as integrate() but throws NumericalError on non-convergence.
template <class F>
auto integrate_or_throw(F&& f, const std::vector<double>& pts, const QuadOptions& opt,
                        const char* what) {
  auto r = integrate(std::forward<F>(f), pts, opt);
  if (!r.converged)
    throw NumericalError(std::string(what) + ": quadrature did not converge",
                         detail::magnitude(r.value), r.abs_error);
  return r.value;
}

namespace detail {
template <class R, class F>
R simpson_rec(F& f, double a, double b, R fa, R fm, R fb, R whole, double tol, int depth,
              int& evals) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  R flm = f(lm), frm = f(rm);
  evals += 2;
  R left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  R right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  R delta = left + right - whole;
  if (depth <= 0 || magnitude(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec<R>(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals) +
         simpson_rec<R>(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals);
}
}  // namespace detail

// Adaptive Simpson with an absolute tolerance floor derived from rel_tol and a
// coarse first estimate.
template <class F>
auto adaptive_simpson(F&& f, double a, double b, double rel_tol, int max_depth = 40) {
  using R = std::decay_t<decltype(f(0.0))>;
  if (!(b > a)) return R{};
  const double m = 0.5 * (a + b);
  R fa = f(a), fm = f(m), fb = f(b);
  R whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  int evals = 3;
  double scale = std::max(detail::magnitude(whole), 1e-300);
  return detail::simpson_rec<R>(f, a, b, fa, fm, fb, whole, rel_tol * scale, max_depth, evals);
}

// Composite Gauss-Legendre nodes and weights over consecutive panels.
struct FixedRule {
  std::vector<double> x, w;
};

inline FixedRule gauss_legendre_panels(const std::vector<double>& edges) {
  using G = boost::math::quadrature::gauss<double, 8>;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  FixedRule r;
  for (size_t p = 0; p + 1 < edges.size(); ++p) {
    const double c = 0.5 * (edges[p] + edges[p + 1]), h = 0.5 * (edges[p + 1] - edges[p]);
    if (!(h > 0)) continue;
    for (size_t i = 0; i < a.size(); ++i) {
      r.x.push_back(c - h * a[i]);
      r.w.push_back(h * wt[i]);
      r.x.push_back(c + h * a[i]);
      r.w.push_back(h * wt[i]);
    }
  }
  return r;
}

}  // namespace gsdd
