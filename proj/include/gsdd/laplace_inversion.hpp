#pragma once

// Numerical Laplace inversion by the Fourier-series (Bromwich trapezoid)
// method with Euler summation, plus the iterated two-dimensional version and
// the joint density of (tau, ell) for a drawdown model.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "gsdd/errors.hpp"
#include "gsdd/gerber_shiu.hpp"
#include "gsdd/parallel.hpp"
#include "gsdd/quadrature.hpp"

namespace gsdd {

struct InversionConfig {
  double abscissa_shift = 18.4;  // discretization error is about e^{-A}
  int n_terms = 40;              // terms summed before Euler averaging
  int euler_terms = 24;          // binomial averaging depth

  void validate() const {
    detail::require(abscissa_shift > 0.0 && std::isfinite(abscissa_shift),
                    "inversion: abscissa_shift must be > 0");
    detail::require(euler_terms >= 1, "inversion: euler_terms must be >= 1");
    detail::require(n_terms >= euler_terms, "inversion: n_terms must be >= euler_terms");
  }
};

// f(t) ~ sum_k weights[k] * Re F(nodes[k]); alt_weights use one Euler term
// less and give a cheap noise estimate.
struct InversionRule {
  std::vector<cplx> nodes;
  std::vector<double> weights, alt_weights;
};

inline InversionRule inversion_rule(double t, const InversionConfig& cfg) {
  cfg.validate();
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("inversion: t must be > 0");
  const int n = cfg.n_terms, m = cfg.euler_terms;
  const double a = cfg.abscissa_shift, pre = std::exp(0.5 * a) / t;
  // tail weights: share of the binomial average that still includes term n + i
  auto tail = [](int depth) {
    std::vector<double> binom(depth + 1);
    double c = std::pow(0.5, depth);
    for (int j = 0; j <= depth; ++j) {
      binom[j] = c;
      c *= double(depth - j) / double(j + 1);
    }
    std::vector<double> w(depth + 1, 0.0);
    double acc = 0.0;
    for (int j = depth; j >= 0; --j) {
      acc += binom[j];
      w[j] = acc;
    }
    return w;
  };
  auto tw = tail(m), ta = tail(m - 1);
  InversionRule r;
  for (int k = 0; k <= n + m; ++k) {
    r.nodes.emplace_back(a / (2.0 * t), k * std::numbers::pi / t);
    double base = (k == 0 ? 0.5 : 1.0) * ((k % 2) ? -1.0 : 1.0) * pre;
    double wk = k <= n ? 1.0 : tw[k - n];
    double wa = k <= n ? 1.0 : (k - n <= m - 1 ? ta[k - n] : 0.0);
    r.weights.push_back(base * wk);
    r.alt_weights.push_back(base * wa);
  }
  return r;
}

struct InversionResult {
  double value;
  double noise;
};

namespace detail {
inline void check_finite(const cplx& v, const cplx& p) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream os;
    os << "inversion: non-finite transform value at p = " << p;
    throw NumericalError(os.str());
  }
}
}  // namespace detail

template <class F>
InversionResult invert_1d_detailed(F&& fn, double t, const InversionConfig& cfg = {}) {
  auto r = inversion_rule(t, cfg);
  double v = 0.0, va = 0.0, mag = 0.0;
  for (size_t k = 0; k < r.nodes.size(); ++k) {
    cplx f = fn(r.nodes[k]);
    detail::check_finite(f, r.nodes[k]);
    v += r.weights[k] * f.real();
    va += r.alt_weights[k] * f.real();
    mag += std::abs(r.weights[k] * f.real());
  }
  return {v, std::abs(v - va) + 1e-15 * mag};
}

template <class F>
double invert_1d(F&& fn, double t, const InversionConfig& cfg = {}) {
  return invert_1d_detailed(std::forward<F>(fn), t, cfg).value;
}

// Iterated inversion of F(q, lambda) = int int e^{-q t2 - lambda u} h(t2, u),
// returned in the coordinates t1 = t2 + u: f(t1, t2) = h(t2, t1 - t2).
template <class F2>
InversionResult invert_2d_detailed(F2&& fn, double t1, double t2, const InversionConfig& cfg = {}) {
  if (!(t1 > t2)) return {0.0, 0.0};
  const double u = t1 - t2;
  auto rq = inversion_rule(t2, cfg), rl = inversion_rule(u, cfg);
  // F(q, conj l) is needed as well: the inner transform is not conjugate
  // symmetric in lambda alone once q is complex
  double v = 0.0, va = 0.0, mag = 0.0;
  for (size_t j = 0; j < rq.nodes.size(); ++j) {
    for (size_t k = 0; k < rl.nodes.size(); ++k) {
      cplx a = fn(rq.nodes[j], rl.nodes[k]), b = fn(rq.nodes[j], std::conj(rl.nodes[k]));
      detail::check_finite(a, rl.nodes[k]);
      detail::check_finite(b, rl.nodes[k]);
      double re = 0.5 * (a + b).real();
      v += rq.weights[j] * rl.weights[k] * re;
      va += rq.alt_weights[j] * rl.alt_weights[k] * re;
      mag += std::abs(rq.weights[j] * rl.weights[k] * re);
    }
  }
  return {v, std::abs(v - va) + 1e-15 * mag};
}

template <class F2>
double invert_2d(F2&& fn, double t1, double t2, const InversionConfig& cfg = {}) {
  return invert_2d_detailed(std::forward<F2>(fn), t1, t2, cfg).value;
}

// ---------------------------------------------------------------------------
// Joint density of (tau, ell). The transform factorises over the running
// maximum s: F(q, lambda) = int A_q(s) B_lambda(s) ds, with A the exit factor
// (rate q) and B the jump / creeping kernel (rate lambda). Each factor is
// inverted separately on a fixed Gauss-Legendre s-rule.

struct JointDensityPoint {
  double t1, t2, value, noise;
  bool negative;  // value below -10 x noise
};

class JointDensity {
 public:
  JointDensity(const LevyModel& model, DrawdownSpec spec, double x, InversionConfig inv = {},
               QuadratureConfig quad = {}, double panel_width = 0.5, unsigned threads = 1)
      : model_(model), spec_(std::move(spec)), x_(x), inv_(inv), quad_(quad), threads_(threads) {
    inv_.validate();
    detail::require(panel_width > 0.0, "joint density: panel_width must be > 0");
    DrawdownEngine<double> eng(model_, spec_, 0.0, 0.0, x_, quad_);
    const double smax = eng.truncation_point();
    auto coarse = eng.s_breakpoints(smax);
    std::vector<double> edges = {coarse.front()};
    for (size_t i = 0; i + 1 < coarse.size(); ++i) {
      int n = std::max(1, int(std::ceil((coarse[i + 1] - coarse[i]) / panel_width)));
      for (int k = 1; k <= n; ++k) edges.push_back(coarse[i] + (coarse[i + 1] - coarse[i]) * k / n);
    }
    rule_ = gauss_legendre_panels(edges);
    split_ = model_.has_jumps() && model_.has_gaussian() && spec_.constrained();
    pointwise_ = !model_.has_gaussian();
  }

  size_t s_nodes() const { return rule_.x.size(); }
  // Without a Gaussian part the exit factor oscillates in s at the rate
  // Im(q)/c and fixed s-panels cannot follow it; each point is then inverted
  // from the adaptively integrated transform (correct but much slower).
  bool pointwise() const { return pointwise_; }

  // f(t1, t2) at one point.
  JointDensityPoint operator()(double t1, double t2) const {
    auto g = grid({t1}, {t2});
    return g.front();
  }

  // Row-major over t2 then t1: result[i * t1s.size() + j] is f(t1s[j], t2s[i]).
  std::vector<JointDensityPoint> grid(const std::vector<double>& t1s,
                                      const std::vector<double>& t2s) const {
    // t1 - t2 values that differ only by rounding share one kernel factor
    std::vector<double> us;
    for (double t2 : t2s)
      for (double t1 : t1s)
        if (t1 > t2) us.push_back(t1 - t2);
    std::sort(us.begin(), us.end());
    std::vector<double> uniq;
    for (double u : us)
      if (uniq.empty() || u - uniq.back() > 1e-10 * u) uniq.push_back(u);
    us = std::move(uniq);
    auto uidx = [&](double u) {
      auto it = std::lower_bound(us.begin(), us.end(), u * (1.0 - 1e-10));
      return size_t(it - us.begin());
    };
    if (pointwise_) {
      std::vector<std::pair<double, double>> pts;
      for (double t2 : t2s)
        for (double t1 : t1s) pts.push_back({t1, t2});
      return direct(pts);
    }
    const auto& rule = rule_;
    auto [a, b] = factors(rule, t2s, us);
    std::vector<JointDensityPoint> out;
    out.reserve(t1s.size() * t2s.size());
    for (size_t i = 0; i < t2s.size(); ++i)
      for (double t1 : t1s) {
        JointDensityPoint p{t1, t2s[i], 0.0, 0.0, false};
        if (t1 > t2s[i] && t2s[i] > 0.0) combine(rule, a[i], b[uidx(t1 - t2s[i])], p);
        out.push_back(p);
      }
    return out;
  }

  // Tensor grid in (t2, u = t1 - t2): result[i * us.size() + j] is
  // f(t2s[i] + us[j], t2s[i]).
  std::vector<JointDensityPoint> grid_tu(const std::vector<double>& t2s,
                                         const std::vector<double>& us) const {
    for (double v : t2s) detail::require(v > 0.0, "joint density: t2 must be > 0");
    for (double v : us) detail::require(v > 0.0, "joint density: u must be > 0");
    if (pointwise_) {
      std::vector<std::pair<double, double>> pts;
      for (double t2 : t2s)
        for (double u : us) pts.push_back({t2 + u, t2});
      return direct(pts);
    }
    const auto& rule = rule_;
    auto [a, b] = factors(rule, t2s, us);
    std::vector<JointDensityPoint> out;
    out.reserve(t2s.size() * us.size());
    for (size_t i = 0; i < t2s.size(); ++i)
      for (size_t j = 0; j < us.size(); ++j) {
        JointDensityPoint p{t2s[i] + us[j], t2s[i], 0.0, 0.0, false};
        combine(rule, a[i], b[j], p);
        out.push_back(p);
      }
    return out;
  }

 private:
  // Values on the s-rule. With separate constrained and unconstrained
  // survival factors the creeping part goes in `second`.
  struct Factor {
    std::vector<double> main, alt, second, second_alt;
  };

  std::vector<JointDensityPoint> direct(const std::vector<std::pair<double, double>>& pts) const {
    std::vector<JointDensityPoint> out(pts.size());
    auto F = [&](cplx q, cplx l) { return joint_laplace(model_, spec_, q, l, x_, quad_); };
    parallel_for(pts.size(), threads_, [&](size_t k) {
      auto [t1, t2] = pts[k];
      JointDensityPoint p{t1, t2, 0.0, 0.0, false};
      if (t1 > t2 && t2 > 0.0) {
        auto r = invert_2d_detailed(F, t1, t2, inv_);
        p.value = r.value;
        p.noise = r.noise;
        p.negative = r.value < -10.0 * r.noise;
      }
      out[k] = p;
    });
    return out;
  }

  std::pair<std::vector<Factor>, std::vector<Factor>> factors(const FixedRule& rule, const std::vector<double>& t2s,
                                                              const std::vector<double>& us) const {
    std::vector<Factor> a(t2s.size()), b(us.size());
    parallel_for(t2s.size(), threads_, [&](size_t i) {
      if (t2s[i] > 0.0) a[i] = exit_factor(rule, t2s[i]);
    });
    parallel_for(us.size(), threads_, [&](size_t i) { b[i] = kernel_factor(rule, us[i]); });
    return {std::move(a), std::move(b)};
  }

  void combine(const FixedRule& rule, const Factor& fa, const Factor& fb, JointDensityPoint& p) const {
    double v = 0.0, va = 0.0;
    for (size_t k = 0; k < rule.x.size(); ++k) {
      const double w = rule.w[k];
      v += w * (fa.main[k] * fb.main[k] + fa.second[k] * fb.second[k]);
      va += w * (fa.alt[k] * fb.alt[k] + fa.second_alt[k] * fb.second_alt[k]);
    }
    p.value = v;
    p.noise = std::abs(v - va);
    p.negative = v < -10.0 * p.noise;
  }

  Factor exit_factor(const FixedRule& rule, double t2) const {
    auto r = inversion_rule(t2, inv_);
    const size_t n = rule.x.size();
    Factor f{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
             std::vector<double>(n)};
    for (size_t k = 0; k < r.nodes.size(); ++k) {
      DrawdownEngine<cplx> e(model_, spec_, r.nodes[k], cplx(1.0), x_, quad_);
      for (size_t i = 0; i < n; ++i) {
        const double s = rule.x[i];
        cplx ec = e.exit_constrained(s);
        cplx eu = split_ ? e.exit(s) : cplx(0.0);
        f.main[i] += r.weights[k] * ec.real();
        f.alt[i] += r.alt_weights[k] * ec.real();
        f.second[i] += r.weights[k] * eu.real();
        f.second_alt[i] += r.alt_weights[k] * eu.real();
      }
    }
    return f;
  }

  Factor kernel_factor(const FixedRule& rule, double u) const {
    auto r = inversion_rule(u, inv_);
    const size_t n = rule.x.size();
    Factor f{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
             std::vector<double>(n)};
    for (size_t k = 0; k < r.nodes.size(); ++k) {
      DrawdownEngine<cplx> e(model_, spec_, cplx(1.0), r.nodes[k], x_, quad_);
      for (size_t i = 0; i < n; ++i) {
        const double s = rule.x[i];
        cplx jk = e.jump_kernel(s), ck = e.creep_kernel(s);
        cplx m = split_ ? jk : jk + ck;
        f.main[i] += r.weights[k] * m.real();
        f.alt[i] += r.alt_weights[k] * m.real();
        if (split_) {
          f.second[i] += r.weights[k] * ck.real();
          f.second_alt[i] += r.alt_weights[k] * ck.real();
        }
      }
    }
    return f;
  }

  LevyModel model_;
  DrawdownSpec spec_;
  double x_;
  InversionConfig inv_;
  QuadratureConfig quad_;
  unsigned threads_;
  FixedRule rule_;
  bool split_ = false;
  bool pointwise_ = false;
};

inline double invert_2d_joint_density(const LevyModel& model, const DrawdownSpec& spec, double x,
                                      double t1, double t2, const InversionConfig& cfg = {}) {
  if (t1 < t2) return 0.0;
  auto p = JointDensity(model, spec, x, cfg)(t1, t2);
  if (p.negative) throw NumericalError("joint density: negative beyond the noise floor", p.value, p.noise);
  return p.value;
}

}  // namespace gsdd
