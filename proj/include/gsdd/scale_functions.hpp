#pragma once

// q-scale functions as finite exponential sums W_q(x) = sum_j c_j exp(theta_j x).
// T = double for real q, std::complex<double> for the Laplace inversion.

#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "gsdd/errors.hpp"
#include "gsdd/levy_models.hpp"

namespace gsdd {

using cplx = std::complex<double>;

namespace detail {

template <class T>
inline T from_complex(const cplx& z) {
  if constexpr (std::is_same_v<T, double>) return z.real();
  else return z;
}

template <class T>
inline cplx to_complex(const T& v) { return cplx(v); }

// Roots of a polynomial with complex coefficients (highest degree first)
// from companion-matrix eigenvalues plus one Newton polish.
inline std::vector<cplx> poly_roots(const std::vector<cplx>& coef) {
  const int n = static_cast<int>(coef.size()) - 1;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) comp(0, j) = -coef[j + 1] / coef[0];
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw NumericalError("polynomial root solve failed");
  std::vector<cplx> r(n);
  for (int i = 0; i < n; ++i) {
    cplx z = es.eigenvalues()[i];
    cplx p = coef[0], dp = 0.0;
    for (int k = 1; k <= n; ++k) {
      dp = dp * z + p;
      p = p * z + coef[k];
    }
    if (std::abs(dp) > 0.0) z -= p / dp;
    r[i] = z;
  }
  return r;
}

}  // namespace detail

template <class T = double>
class ScaleSet {
 public:
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, cplx>);

  ScaleSet() = default;

  ScaleSet(const LevyModel& model, T q) : q_(q) {
    if constexpr (std::is_same_v<T, double>) {
      if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("scale function: q must be >= 0");
    } else {
      if (!(q.real() >= 0.0) || !std::isfinite(q.real()) || !std::isfinite(q.imag()))
        throw InvalidArgument("scale function: Re q must be >= 0");
    }
    const cplx qc = detail::to_complex(q);
    switch (model.family()) {
      case Family::CramerLundberg: build_cl(model.as<CramerLundberg>(), qc); break;
      case Family::Brownian: build_bm(model.as<BrownianDrift>(), qc); break;
      case Family::JumpDiffusion: build_jd(model.as<JumpDiffusion>(), qc); break;
    }
    order();
    for (size_t i = 0; i < th_.size(); ++i)
      for (size_t j = i + 1; j < th_.size(); ++j)
        if (std::abs(th_[i] - th_[j]) < 1e-9) throw NumericalError("non-distinct quartic roots");
    w0_ = model.has_gaussian() ? 0.0 : 1.0 / model.drift();
  }

  T q() const { return q_; }
  const std::vector<cplx>& exponents() const { return th_; }
  const std::vector<cplx>& coefficients() const { return c_; }
  size_t size() const { return th_.size(); }

  T w0_plus() const { return T(w0_); }

  T w(double x) const {
    if (x < 0.0) return T(0);
    if (x == 0.0) return T(w0_);
    return eval(x, 0);
  }
  T w1(double x) const { return x < 0.0 ? T(0) : eval(x, 1); }
  T w2(double x) const { return x < 0.0 ? T(0) : eval(x, 2); }

  // S(u) = W(u) / (c_1 e^{theta_1 u}), the bounded part of W.
  cplx scaled(double u) const {
    cplx s = 1.0;
    for (size_t j = 1; j < th_.size(); ++j) s += c_[j] / c_[0] * std::exp((th_[j] - th_[0]) * u);
    return s;
  }

  // W'(u)/W(u), u > 0.
  T hazard(double u) const {
    cplx num = 0.0, den = 0.0;
    for (size_t j = 0; j < th_.size(); ++j) {
      cplx e = c_[j] * std::exp((th_[j] - th_[0]) * u);
      num += th_[j] * e;
      den += e;
    }
    return detail::from_complex<T>(num / den);
  }

  // W'(u)^2/W(u) - W''(u), written without cancellation.
  T creep_kernel(double u) const {
    cplx num = 0.0, den = 0.0;
    const size_t n = th_.size();
    for (size_t j = 0; j < n; ++j) den += c_[j] * std::exp((th_[j] - th_[0]) * u);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        cplx d = th_[i] - th_[j];
        num -= c_[i] * c_[j] * d * d * std::exp((th_[i] + th_[j] - th_[0]) * u);
      }
    return detail::from_complex<T>(num / den);
  }

  // W'(h) - W(h) W'(u)/W(u) for 0 < h <= u, written without cancellation.
  T excursion_kernel(double h, double u) const {
    const size_t n = th_.size();
    cplx den = 0.0;
    for (size_t j = 0; j < n; ++j) den += c_[j] * std::exp((th_[j] - th_[0]) * u);
    // exponents combined before exp so that large h does not overflow
    cplx num = 0.0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (i != j) num += c_[i] * c_[j] * (th_[i] - th_[j]) * std::exp(th_[i] * h + (th_[j] - th_[0]) * u);
    return detail::from_complex<T>(num / den);
  }

  // log W(ub) - log W(ua), 0 < ua <= ub, continuous along [ua, ub].
  T log_w_increment(double ua, double ub) const {
    if constexpr (std::is_same_v<T, double>) {
      return th_[0].real() * (ub - ua) + std::log(scaled(ub).real() / scaled(ua).real());
    } else {
      return th_[0] * (ub - ua) + log_scaled_increment(ua, ub);
    }
  }

  // log W(u) on the real branch (T = double only).
  double log_w(double u) const {
    return std::log(c_[0].real()) + th_[0].real() * u + std::log(scaled(u).real());
  }

  // log W(inf) - log W(u); +inf when W grows without bound.
  double log_w_to_infinity(double u) const {
    if (std::abs(th_[0]) > 1e-13) return std::numeric_limits<double>::infinity();
    return -std::log(scaled(u).real());
  }

 private:
  void build_cl(const CramerLundberg& p, cplx q) {
    const double c = p.c, l = p.lambda0, m = p.mu;
    cplx disc = std::sqrt((c * m - l - q) * (c * m - l - q) + 4.0 * c * q * m);
    cplx t1 = (l + q - c * m + disc) / (2.0 * c);
    cplx t2 = (l + q - c * m - disc) / (2.0 * c);
    th_ = {t1, t2};
    c_ = {(m + t1) / ((t1 - t2) * c), -(m + t2) / ((t1 - t2) * c)};
  }

  void build_bm(const BrownianDrift& p, cplx q) {
    const double s2 = p.sigma * p.sigma;
    cplx r = std::sqrt(2.0 * q * s2 + p.mu * p.mu);
    th_ = {(r - p.mu) / s2, (-r - p.mu) / s2};
    c_ = {1.0 / r, -1.0 / r};
  }

  void build_jd(const JumpDiffusion& p, cplx q) {
    const double s2 = p.sigma * p.sigma, a = p.alpha, c = p.c, l = p.lambda0;
    std::vector<cplx> poly = {0.5 * s2, a * s2 + c, 0.5 * s2 * a * a - l - q + 2.0 * c * a,
                              c * a * a - 2.0 * (l + q) * a, -q * a * a};
    if (q == cplx(0.0)) {
      poly.pop_back();
      th_ = detail::poly_roots(poly);
      th_.push_back(0.0);
    } else {
      th_ = detail::poly_roots(poly);
    }
    c_.resize(th_.size());
    for (size_t j = 0; j < th_.size(); ++j) {
      cplx d = 0.5 * s2;
      for (size_t i = 0; i < th_.size(); ++i)
        if (i != j) d *= th_[j] - th_[i];
      c_[j] = (a + th_[j]) * (a + th_[j]) / d;
    }
  }

  void order() {
    std::vector<size_t> idx(th_.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      if (th_[a].real() != th_[b].real()) return th_[a].real() > th_[b].real();
      return th_[a].imag() > th_[b].imag();
    });
    std::vector<cplx> t, c;
    for (size_t i : idx) {
      t.push_back(th_[i]);
      c.push_back(c_[i]);
    }
    th_ = std::move(t);
    c_ = std::move(c);
    if constexpr (std::is_same_v<T, double>) {
      // real q: the dominant exponent is Phi(q) and is real
      th_[0] = th_[0].real();
      c_[0] = c_[0].real();
    }
  }

  T eval(double x, int deriv) const {
    cplx s = 0.0;
    for (size_t j = 0; j < th_.size(); ++j) {
      cplx t = deriv == 0 ? cplx(1.0) : (deriv == 1 ? th_[j] : th_[j] * th_[j]);
      s += c_[j] * t * std::exp(th_[j] * x);
    }
    return detail::from_complex<T>(s);
  }

  // sum_j |c_j/c_1| e^{Re(theta_j - theta_1) u} over j > 1, a bound on |S(u) - 1|.
  double tail_bound(double u) const {
    double b = 0.0;
    for (size_t j = 1; j < th_.size(); ++j)
      b += std::abs(c_[j] / c_[0]) * std::exp((th_[j] - th_[0]).real() * u);
    return b;
  }

  cplx log_scaled_increment(double ua, double ub) const {
    if (tail_bound(ua) < 0.9) return std::log(scaled(ub)) - std::log(scaled(ua));
    // walk until the principal branch is safe, keeping each step's phase small
    cplx acc = 0.0;
    double u = ua, h = std::max((ub - ua) / 16.0, 1e-12);
    cplx su = scaled(u);
    while (u < ub) {
      if (tail_bound(u) < 0.9) return acc + std::log(scaled(ub)) - std::log(su);
      double un = std::min(u + h, ub);
      cplx sn = scaled(un);
      cplx d = std::log(sn / su);
      if (std::abs(d.imag()) > 0.5 && h > 1e-12) {
        h *= 0.5;
        continue;
      }
      acc += d;
      u = un;
      su = sn;
      h *= 1.5;
    }
    return acc;
  }

  T q_{};
  std::vector<cplx> th_, c_;
  double w0_ = 0.0;
};

// Relative residual of the defining transform identity at theta > Phi(q).
inline double verify_laplace_identity(const LevyModel& model, const ScaleSet<double>& w,
                                      double theta) {
  if (!(theta > model.phi(w.q()))) throw InvalidArgument("verify_laplace_identity: theta <= Phi(q)");
  cplx lhs = 0.0;
  for (size_t j = 0; j < w.size(); ++j) lhs += w.coefficients()[j] / (theta - w.exponents()[j]);
  double rhs = 1.0 / (model.laplace_exponent(theta) - w.q());
  return std::abs(lhs - rhs) / std::abs(rhs);
}

}  // namespace gsdd
