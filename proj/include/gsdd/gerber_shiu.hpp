#pragma once

// Expected discounted penalties at a general drawdown time: exit factors,
// drawdown densities (jump atom, jump continuous part, creeping), the
// s-integrated penalty, and the tax / dividend transforms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gsdd/drawdown.hpp"
#include "gsdd/errors.hpp"
#include "gsdd/levy_models.hpp"
#include "gsdd/quadrature.hpp"
#include "gsdd/scale_functions.hpp"

namespace gsdd {

struct QuadratureConfig {
  double rel_tol = 1e-7;
  double s_max_prob = 1e-10;  // relative survival cutoff for the s-integral
  double z_max_tail = 1e-12;  // Levy tail cutoff for jump-size integrals
  int max_subdivisions = 2000;

  void validate() const {
    auto in01 = [](double v) { return v > 0.0 && v < 1.0; };
    detail::require(in01(rel_tol), "quadrature: rel_tol must lie in (0, 1)");
    detail::require(in01(s_max_prob), "quadrature: s_max_prob must lie in (0, 1)");
    detail::require(in01(z_max_tail), "quadrature: z_max_tail must lie in (0, 1)");
    detail::require(max_subdivisions >= 1, "quadrature: max_subdivisions must be >= 1");
  }
  QuadOptions outer() const { return {rel_tol, 0.0, std::max(max_subdivisions, 16)}; }
  QuadOptions inner() const { return {rel_tol * 0.1, 0.0, std::max(max_subdivisions, 16)}; }
};

// omega(y, w): y = X(tau-), w = X(tau). An empty omega means omega == 1.
struct PenaltySpec {
  std::function<double(double, double)> omega;
  double q = 0.0;
  double lambda = 0.0;
  double bound = 1.0;  // sup |omega|

  static PenaltySpec indicator(double q = 0.0, double lambda = 0.0) { return {{}, q, lambda, 1.0}; }
  // Perpetual American put on the asset e^{a + X}, exercised at drawdown.
  static PenaltySpec american_put(double strike, double a, double q) {
    return {[strike, a](double, double w) { return std::max(strike - std::exp(a + w), 0.0); }, q, q,
            strike};
  }
  void validate() const {
    detail::require(q >= 0.0 && std::isfinite(q), "penalty: q must be >= 0");
    detail::require(lambda >= 0.0 && std::isfinite(lambda), "penalty: lambda must be >= 0");
    detail::require(bound > 0.0 && std::isfinite(bound), "penalty: bound must be > 0");
  }
};

struct DensityPoint {
  double s, y, z, value;
};

namespace detail {
inline double re(double v) { return v; }
inline double re(const cplx& v) { return v.real(); }
}  // namespace detail

template <class T = double>
class DrawdownEngine {
 public:
  DrawdownEngine(const LevyModel& model, DrawdownSpec spec, T q, T lambda, double x,
                 QuadratureConfig cfg = {})
      : model_(model), spec_(std::move(spec)), x_(x), cfg_(cfg), wq_(model, q), wl_(model, lambda) {
    cfg_.validate();
    detail::require(std::isfinite(x) && x > 0.0, "initial surplus x must be > 0");
    spec_.check_start(x);
    const double inf = std::numeric_limits<double>::infinity();
    xi_pieces_ = spec_.xi_bar_pieces(x, inf);
    xi_cum_ = cumulate(xi_pieces_);
    if (spec_.min_capital().is_zero()) {
      vs_pieces_ = xi_pieces_;
      vs_cum_ = xi_cum_;
    } else if (spec_.min_capital().is_constant()) {
      vs_pieces_ = spec_.varsigma_bar_pieces(x, inf);
      for (auto& p : vs_pieces_)
        if (!(p.v_lo > 0.0)) throw DomainError("minimum capital exceeds the drawdown distance");
      vs_cum_ = cumulate(vs_pieces_);
    }
  }

  const LevyModel& model() const { return model_; }
  const DrawdownSpec& spec() const { return spec_; }
  double x() const { return x_; }
  const ScaleSet<T>& scale_q() const { return wq_; }
  const ScaleSet<T>& scale_lambda() const { return wl_; }
  const QuadratureConfig& config() const { return cfg_; }

  // E_x(e^{-q tau_s^+}; tau_s^+ < tau) with drawdown distance xi_bar.
  T exit(double s) const { return std::exp(log_exit(s)); }
  T log_exit(double s) const {
    check_s(s);
    return log_from_pieces(xi_pieces_, xi_cum_, s);
  }

  // Same with the constraint distance varsigma_bar.
  T exit_constrained(double s) const { return std::exp(log_exit_constrained(s)); }
  T log_exit_constrained(double s) const {
    check_s(s);
    if (!vs_pieces_.empty()) return log_from_pieces(vs_pieces_, vs_cum_, s);
    // non-affine varsigma_bar: integrate the log-derivative numerically
    std::vector<double> pts = {x_};
    for (double k : spec_.kinks(x_, s)) pts.push_back(k);
    pts.push_back(s);
    T acc{};
    for (size_t i = 0; i + 1 < pts.size(); ++i)
      acc += adaptive_simpson([&](double w) { return wq_.hazard(spec_.varsigma_bar(w)); }, pts[i],
                              pts[i + 1], cfg_.rel_tol * 0.1);
    return -acc;
  }

  // Creeping density in s; creeping is excluded whenever a minimum capital is imposed.
  T creeping(double s) const {
    if (!model_.has_gaussian() || !spec_.min_capital().is_zero()) return T(0);
    const double sg = model_.sigma();
    return 0.5 * sg * sg * exit(s) * wl_.creep_kernel(spec_.xi_bar(s));
  }

  // Continuous part of the jump density in (s, y, z), z = -X(tau).
  T jump_continuous(double s, double y, double z) const {
    check_s(s);
    if (!model_.has_jumps()) return T(0);
    if (!(y < s) || !(z > -spec_.xi(s)) || y < spec_.varsigma(s)) return T(0);
    const double u = spec_.varsigma_bar(s);
    return exit_constrained(s) * wl_.excursion_kernel(s - y, u) * model_.levy_density(y + z);
  }

  // Atom at y = s (jump straight from the running maximum), density in (s, z).
  T jump_atom(double s, double z) const {
    check_s(s);
    if (!model_.has_jumps() || model_.has_gaussian()) return T(0);
    if (!(z > -spec_.xi(s))) return T(0);
    return exit_constrained(s) * wl_.w0_plus() * model_.levy_density(s + z);
  }

  // y,z-integrated jump contribution at level s, without the survival factor.
  T jump_kernel(double s, const PenaltySpec* pen = nullptr) const {
    if (!model_.has_jumps()) return T(0);
    const double xb = spec_.xi_bar(s), u = spec_.varsigma_bar(s);
    if (!pen || !pen->omega) {
      T atom = wl_.w0_plus() * model_.levy_tail(xb);
      auto f = [&](double h) { return wl_.excursion_kernel(h, u) * model_.levy_tail(xb - h); };
      return atom + integrate_or_throw(f, {0.0, u}, cfg_.inner(), "jump kernel");
    }
    const double xis = s - xb;
    const double jcut = model_.jump_cutoff(cfg_.z_max_tail);
    auto over_jumps = [&](double yv) {
      double lo = yv - xis, hi = std::max(jcut, lo);
      if (!(hi > lo)) return 0.0;
      auto g = [&](double j) { return pen->omega(yv, yv - j) * model_.levy_density(j); };
      return integrate_or_throw(g, {lo, hi}, cfg_.inner(), "jump size integral");
    };
    T atom = wl_.w0_plus() * over_jumps(s);
    auto f = [&](double h) { return wl_.excursion_kernel(h, u) * over_jumps(s - h); };
    return atom + integrate_or_throw(f, {0.0, u}, cfg_.inner(), "jump kernel");
  }

  // Creeping contribution at level s, without the survival factor.
  T creep_kernel(double s) const {
    if (!model_.has_gaussian() || !spec_.min_capital().is_zero()) return T(0);
    const double sg = model_.sigma();
    return 0.5 * sg * sg * wl_.creep_kernel(spec_.xi_bar(s));
  }

  T s_integrand(double s, const PenaltySpec* pen = nullptr) const {
    T v{};
    if (model_.has_jumps()) v += exit_constrained(s) * jump_kernel(s, pen);
    if (model_.has_gaussian() && spec_.min_capital().is_zero()) {
      T c = exit(s) * creep_kernel(s);
      if (pen && pen->omega) {
        double xis = spec_.xi(s);
        c *= pen->omega(xis, xis);
      }
      v += c;
    }
    return v;
  }

  // Upper s-limit: the mass beyond it is bounded by sup|omega| times
  // exit_{Re q}(x, S) (1 - exit_0(S, inf)), a fraction s_max_prob of the same
  // bound at S = x.
  double truncation_point() const {
    double q_re = detail::re(wq_.q());
    ScaleSet<double> wr(model_, std::max(q_re, 0.0)), w0(model_, 0.0);
    auto lexit = [&](const ScaleSet<double>& w, double s) {
      double acc = 0.0;
      for (auto& p : xi_pieces_) {
        if (p.lo >= s) break;
        double b = std::min(p.hi, s);
        if (p.slope == 0.0) acc -= (b - p.lo) * w.hazard(p.v_lo);
        else acc -= w.log_w_increment(p.at(p.lo), p.at(b)) / p.slope;
      }
      return acc;
    };
    // log exit_0(S, inf)
    auto ltail = [&](double s) {
      const auto& last = xi_pieces_.back();
      if (last.slope == 0.0) return -std::numeric_limits<double>::infinity();
      double l_inf = w0.log_w_to_infinity(last.at(std::max(s, last.lo)));
      if (!std::isfinite(l_inf)) return -std::numeric_limits<double>::infinity();
      return lexit(w0, std::max(s, last.lo)) - lexit(w0, s) - l_inf / last.slope;
    };
    auto bound = [&](double s) { return std::exp(lexit(wr, s)) * -std::expm1(ltail(s)); };
    const double ref = std::max(bound(x_), 1e-300);
    const double target = cfg_.s_max_prob * ref;
    double lo = x_, step = std::max(0.5, 0.5 * spec_.xi_bar(x_));
    double hi = x_ + step;
    while (bound(hi) > target) {
      lo = hi;
      step *= 2.0;
      hi = x_ + step;
      if (step > 1e6) throw NumericalError("s-truncation point not found", hi);
    }
    for (int i = 0; i < 40 && hi - lo > 1e-3 * (hi - x_); ++i) {
      double m = 0.5 * (lo + hi);
      (bound(m) > target ? lo : hi) = m;
    }
    return hi;
  }

  // Breakpoints for the outer integral: kinks of xi_bar and a geometric
  // refinement near x where survival factors change fastest.
  std::vector<double> s_breakpoints(double smax) const {
    std::vector<double> pts = {x_};
    for (double k : spec_.kinks(x_, smax)) pts.push_back(k);
    const double h0 = 0.02 * std::min(1.0, spec_.xi_bar(x_));
    for (double g = h0; x_ + g < smax; g = 2.0 * g + h0) pts.push_back(x_ + g);
    pts.push_back(smax);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

  QuadResult<T> integrate_penalty(const PenaltySpec* pen = nullptr) const {
    const double smax = truncation_point();
    auto opt = cfg_.outer();
    auto r = integrate([&](double s) { return s_integrand(s, pen); }, s_breakpoints(smax), opt);
    if (!r.converged)
      throw NumericalError("penalty integral did not converge", detail::magnitude(r.value),
                           r.abs_error);
    return r;
  }

  T total(const PenaltySpec* pen = nullptr) const { return integrate_penalty(pen).value; }

 private:
  void check_s(double s) const {
    if (!(s >= x_)) throw DomainError("running maximum s must be >= x");
  }

  std::vector<T> cumulate(const std::vector<AffinePiece>& p) const {
    std::vector<T> c(p.size());
    T acc{};
    for (size_t i = 0; i < p.size(); ++i) {
      c[i] = acc;
      if (std::isfinite(p[i].hi)) acc += piece_log(p[i], p[i].hi);
    }
    return c;
  }

  // -int_{p.lo}^{b} W'(v(w))/W(v(w)) dw on an affine piece v.
  T piece_log(const AffinePiece& p, double b) const {
    if (!(b > p.lo)) return T(0);
    if (p.slope == 0.0) return -(b - p.lo) * wq_.hazard(p.v_lo);
    return -wq_.log_w_increment(p.v_lo, p.at(b)) / p.slope;
  }

  T log_from_pieces(const std::vector<AffinePiece>& p, const std::vector<T>& cum, double s) const {
    size_t i = 0;
    while (i + 1 < p.size() && p[i + 1].lo <= s) ++i;
    return cum[i] + piece_log(p[i], s);
  }

  LevyModel model_;
  DrawdownSpec spec_;
  double x_;
  QuadratureConfig cfg_;
  ScaleSet<T> wq_, wl_;
  std::vector<AffinePiece> xi_pieces_, vs_pieces_;
  std::vector<T> xi_cum_, vs_cum_;
};

// ---------------------------------------------------------------------------
// Free-function entry points.

inline double exit_prob_drawdown(const LevyModel& m, const DrawdownSpec& spec, double q, double x,
                                 double s) {
  if (!(s > x)) throw DomainError("exit_prob_drawdown: s must be > x");
  return DrawdownEngine<double>(m, spec, q, q, x).exit(s);
}

inline double creeping_density(const LevyModel& m, const DrawdownSpec& spec, double q,
                               double lambda, double x, double s) {
  if (!(s > x)) throw DomainError("creeping_density: s must be > x");
  return DrawdownEngine<double>(m, spec, q, lambda, x).creeping(s);
}

inline double jump_density_continuous(const LevyModel& m, const DrawdownSpec& spec, double q,
                                      double lambda, double x, double s, double y, double z) {
  if (!(s > x)) throw DomainError("jump_density_continuous: s must be > x");
  return DrawdownEngine<double>(m, spec, q, lambda, x).jump_continuous(s, y, z);
}

inline double jump_density_atom(const LevyModel& m, const DrawdownSpec& spec, double q,
                                double lambda, double x, double s, double z) {
  if (!(s > x)) throw DomainError("jump_density_atom: s must be > x");
  return DrawdownEngine<double>(m, spec, q, lambda, x).jump_atom(s, z);
}

inline double penalty_at_drawdown(const LevyModel& m, const DrawdownSpec& spec,
                                  const PenaltySpec& pen, double x, const QuadratureConfig& cfg = {}) {
  pen.validate();
  return DrawdownEngine<double>(m, spec, pen.q, pen.lambda, x, cfg).total(&pen);
}

struct ProbabilityResult {
  double value;      // clamped to [0, 1]
  double raw;        // unclamped quadrature value
  double abs_error;  // quadrature error estimate
  bool out_of_range; // raw fell outside [0, 1 + rel_tol]
};

inline ProbabilityResult drawdown_probability_detailed(const LevyModel& m, const DrawdownSpec& spec,
                                                       double x, const QuadratureConfig& cfg = {}) {
  auto r = DrawdownEngine<double>(m, spec, 0.0, 0.0, x, cfg).integrate_penalty();
  ProbabilityResult p{std::clamp(r.value, 0.0, 1.0), r.value, r.abs_error, false};
  p.out_of_range = r.value < -r.abs_error || r.value > 1.0 + cfg.rel_tol;
  return p;
}

inline double drawdown_probability(const LevyModel& m, const DrawdownSpec& spec, double x,
                                   const QuadratureConfig& cfg = {}) {
  return drawdown_probability_detailed(m, spec, x, cfg).value;
}

// E_x(e^{-q ell - lambda (tau - ell)}; tau < inf).
inline double joint_laplace(const LevyModel& m, const DrawdownSpec& spec, double q, double lambda,
                            double x, const QuadratureConfig& cfg = {}) {
  detail::require(q >= 0.0 && lambda >= 0.0, "joint_laplace: q, lambda must be >= 0");
  return DrawdownEngine<double>(m, spec, q, lambda, x, cfg).total();
}

inline cplx joint_laplace(const LevyModel& m, const DrawdownSpec& spec, cplx q, cplx lambda,
                          double x, const QuadratureConfig& cfg = {}) {
  return DrawdownEngine<cplx>(m, spec, q, lambda, x, cfg).total();
}

// ---------------------------------------------------------------------------
// Loss-carry-forward tax: ruin of U = X - int gamma(Xbar) dXbar read off the
// xi_gamma-drawdown of X. Coordinates are those of U: s = max of U, y = U(tau-),
// z = -U(tau).

template <class T = double>
class TaxTransform {
 public:
  TaxTransform(const LevyModel& m, PiecewiseConstant gamma, T q, T lambda, double x,
               QuadratureConfig cfg = {})
      : eng_(m, DrawdownSpec::tax(std::move(gamma), x), q, lambda, x, cfg) {}

  const DrawdownEngine<T>& engine() const { return eng_; }

  // (s in U coordinates) -> running maximum of X.
  double x_level(double s) const { return eng_.spec().xi_bar_inverse(s); }

  double jacobian(double s) const {
    double g = eng_.spec().tax_rate(x_level(s));
    if (1.0 - g < 1e-12) throw DomainError("tax transform: singular Jacobian");
    return 1.0 / (1.0 - g);
  }

  T density(double s, double y, double z) const {
    const double sb = x_level(s), shift = eng_.spec().xi(sb);
    return jacobian(s) * eng_.jump_continuous(sb, y + shift, z - shift);
  }
  T atom(double s, double z) const {
    const double sb = x_level(s), shift = eng_.spec().xi(sb);
    return jacobian(s) * eng_.jump_atom(sb, z - shift);
  }
  T creeping(double s) const { return jacobian(s) * eng_.creeping(x_level(s)); }

  // Total ruin transform, integrating the densities above over all coordinates.
  T total() const {
    const auto& cfg = eng_.config();
    const auto& m = eng_.model();
    const double x = eng_.x();
    const double smax = eng_.spec().xi_bar(eng_.truncation_point());
    const double jcut = m.jump_cutoff(cfg.z_max_tail);
    auto over_z = [&](auto&& dens, double zmax) {
      if (!(zmax > 0.0)) return T(0);
      return integrate_or_throw(dens, {0.0, zmax}, cfg.inner(), "tax z-integral");
    };
    auto in_s = [&](double s) {
      T v{};
      if (m.has_jumps()) {
        v += over_z([&](double z) { return atom(s, z); }, jcut - s);
        auto fy = [&](double y) {
          return over_z([&](double z) { return density(s, y, z); }, jcut - y);
        };
        v += integrate_or_throw(fy, {0.0, s}, cfg.inner(), "tax y-integral");
      }
      if (m.has_gaussian()) v += creeping(s);
      return v;
    };
    std::vector<double> pts = {x};
    for (double k : eng_.spec().kinks(x, eng_.truncation_point())) pts.push_back(eng_.spec().xi_bar(k));
    for (double g = 0.02; x + g < smax; g = 2.0 * g + 0.02) pts.push_back(x + g);
    pts.push_back(smax);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return integrate_or_throw(in_s, pts, cfg.outer(), "tax s-integral");
  }

 private:
  DrawdownEngine<T> eng_;
};

inline double gs_tax_density(const LevyModel& m, const PiecewiseConstant& gamma, double q,
                             double lambda, double x, double s, double y, double z) {
  return TaxTransform<double>(m, gamma, q, lambda, x).density(s, y, z);
}
inline double gs_tax_atom(const LevyModel& m, const PiecewiseConstant& gamma, double q,
                          double lambda, double x, double s, double z) {
  return TaxTransform<double>(m, gamma, q, lambda, x).atom(s, z);
}
inline double gs_tax_creeping(const LevyModel& m, const PiecewiseConstant& gamma, double q,
                              double lambda, double x, double s) {
  return TaxTransform<double>(m, gamma, q, lambda, x).creeping(s);
}

// ---------------------------------------------------------------------------
// De Finetti barrier: ruin of R_b = X - (Xbar - b)^+ through the xi_b-drawdown.
// For s < b the densities are those of ruin killed at the exit factor; the
// running maximum of R has an atom at b carrying int_b^inf exit(x, s) ds.

template <class T = double>
class DividendTransform {
 public:
  DividendTransform(const LevyModel& m, double b, T q, T lambda, double x, QuadratureConfig cfg = {})
      : eng_(m, DrawdownSpec::barrier(b), q, lambda, x, cfg), b_(b) {
    if (!(x < b)) throw DomainError("dividend barrier: x must be < b");
    barrier_mass_ = compute_barrier_mass();
  }

  const DrawdownEngine<T>& engine() const { return eng_; }
  double barrier() const { return b_; }
  // int_b^inf exit(x, s) ds, evaluated by truncated quadrature.
  T barrier_mass() const { return barrier_mass_; }

  T density_below(double s, double y, double z) const {
    if (!(s < b_)) throw DomainError("dividend density_below: s must be < b");
    return eng_.jump_continuous(s, y, z);
  }
  T atom_below(double s, double z) const {
    if (!(s < b_)) throw DomainError("dividend atom_below: s must be < b");
    return eng_.jump_atom(s, z);
  }
  T creeping_below(double s) const {
    if (!(s < b_)) throw DomainError("dividend creeping_below: s must be < b");
    return eng_.creeping(s);
  }
  // Coefficients of delta_b(ds).
  T density_at_barrier(double y, double z) const {
    const auto& m = eng_.model();
    if (!m.has_jumps() || !(y >= 0.0 && y < b_) || !(z > 0.0)) return T(0);
    return barrier_mass_ * eng_.scale_lambda().excursion_kernel(b_ - y, b_) * m.levy_density(y + z);
  }
  T atom_at_barrier(double z) const {
    const auto& m = eng_.model();
    if (!m.has_jumps() || m.has_gaussian() || !(z > 0.0)) return T(0);
    return barrier_mass_ * eng_.scale_lambda().w0_plus() * m.levy_density(b_ + z);
  }
  T creeping_at_barrier() const {
    const auto& m = eng_.model();
    if (!m.has_gaussian()) return T(0);
    const double sg = m.sigma();
    return barrier_mass_ * 0.5 * sg * sg * eng_.scale_lambda().creep_kernel(b_);
  }

  // Total ruin transform from the four pieces and the two atoms.
  T total() const {
    const auto& cfg = eng_.config();
    const auto& m = eng_.model();
    const double x = eng_.x();
    const double jcut = m.jump_cutoff(cfg.z_max_tail);
    auto over_z = [&](auto&& dens, double zmax) {
      if (!(zmax > 0.0)) return T(0);
      return integrate_or_throw(dens, {0.0, zmax}, cfg.inner(), "dividend z-integral");
    };
    auto jumps = [&](auto&& cont, auto&& atom, double s) {
      T v = over_z(atom, jcut - s);
      auto fy = [&](double y) { return over_z([&](double z) { return cont(y, z); }, jcut - y); };
      return v + integrate_or_throw(fy, {0.0, s}, cfg.inner(), "dividend y-integral");
    };
    auto below = [&](double s) {
      T v{};
      if (m.has_jumps())
        v += jumps([&](double y, double z) { return density_below(s, y, z); },
                   [&](double z) { return atom_below(s, z); }, s);
      if (m.has_gaussian()) v += creeping_below(s);
      return v;
    };
    std::vector<double> pts = {x};
    for (double g = 0.02; x + g < b_; g = 2.0 * g + 0.02) pts.push_back(x + g);
    pts.push_back(b_);
    T v = integrate_or_throw(below, pts, cfg.outer(), "dividend s-integral");
    if (m.has_jumps())
      v += jumps([&](double y, double z) { return density_at_barrier(y, z); },
                 [&](double z) { return atom_at_barrier(z); }, b_);
    if (m.has_gaussian()) v += creeping_at_barrier();
    return v;
  }

 private:
  T compute_barrier_mass() const {
    // exit(x, s) decays geometrically in s beyond b; truncate at the
    // relative survival cutoff
    const auto& cfg = eng_.config();
    const double rate = detail::re(eng_.scale_q().hazard(b_));
    if (!(rate > 0.0)) throw NumericalError("dividend barrier: nonpositive decay rate");
    const double smax = b_ + std::log(1.0 / cfg.s_max_prob) / rate;
    std::vector<double> pts = {b_};
    for (double g = 0.5 / rate; b_ + g < smax; g *= 2.0) pts.push_back(b_ + g);
    pts.push_back(smax);
    return integrate_or_throw([&](double s) { return eng_.exit(s); }, pts, cfg.outer(),
                              "dividend barrier mass");
  }

  DrawdownEngine<T> eng_;
  double b_;
  T barrier_mass_{};
};

// W_q(x) nu(y+z) (W_q(b-y)/W_q(b) - W_q(x-y)/W_q(x)): ruin density before
// reaching b, no Gaussian part.
inline double finite_barrier_reduction(const LevyModel& m, double q, double x, double b, double y,
                                       double z) {
  if (m.has_gaussian()) throw InvalidArgument("finite_barrier_reduction: requires sigma = 0");
  if (!(x > 0.0 && x < b)) throw DomainError("finite_barrier_reduction: need 0 < x < b");
  ScaleSet<double> w(m, q);
  return w.w(x) * m.levy_density(y + z) * (w.w(b - y) / w.w(b) - w.w(x - y) / w.w(x));
}

}  // namespace gsdd
