#pragma once

// Spectrally negative Levy models: compound Poisson with exponential claims,
// Brownian motion with drift, and Brownian motion plus Erlang(2) claims.

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <variant>

#include "gsdd/errors.hpp"

namespace gsdd {

struct CramerLundberg {
  double c;        // premium rate
  double lambda0;  // claim arrival rate
  double mu;       // exponential claim rate, mean claim 1/mu
};

struct BrownianDrift {
  double mu;
  double sigma;
};

struct JumpDiffusion {
  double c;
  double sigma;
  double lambda0;
  double alpha;  // Erlang(2, alpha) claims
};

enum class Family { CramerLundberg, Brownian, JumpDiffusion };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::CramerLundberg: return "cramer_lundberg";
    case Family::Brownian: return "brownian";
    case Family::JumpDiffusion: return "jump_diffusion";
  }
  return "unknown";
}

class LevyModel {
 public:
  using Params = std::variant<CramerLundberg, BrownianDrift, JumpDiffusion>;

  explicit LevyModel(Params p) : p_(p) { validate(); }
  LevyModel(CramerLundberg p) : LevyModel(Params(p)) {}
  LevyModel(BrownianDrift p) : LevyModel(Params(p)) {}
  LevyModel(JumpDiffusion p) : LevyModel(Params(p)) {}

  const Params& params() const { return p_; }
  Family family() const { return static_cast<Family>(p_.index()); }
  template <class P>
  const P& as() const { return std::get<P>(p_); }

  double sigma() const {
    if (auto* b = std::get_if<BrownianDrift>(&p_)) return b->sigma;
    if (auto* j = std::get_if<JumpDiffusion>(&p_)) return j->sigma;
    return 0.0;
  }
  // Linear coefficient of psi (premium rate or Brownian drift).
  double drift() const {
    if (auto* a = std::get_if<CramerLundberg>(&p_)) return a->c;
    if (auto* b = std::get_if<BrownianDrift>(&p_)) return b->mu;
    return std::get<JumpDiffusion>(p_).c;
  }
  double jump_rate() const {
    if (auto* a = std::get_if<CramerLundberg>(&p_)) return a->lambda0;
    if (auto* j = std::get_if<JumpDiffusion>(&p_)) return j->lambda0;
    return 0.0;
  }
  bool has_jumps() const { return jump_rate() > 0.0; }
  bool has_gaussian() const { return sigma() > 0.0; }

  // psi(theta) = log E exp(theta X_1); valid for complex theta right of the
  // pole of the jump transform.
  template <class T>
  T laplace_exponent(T theta) const {
    if (auto* a = std::get_if<CramerLundberg>(&p_))
      return a->c * theta - a->lambda0 + a->lambda0 * a->mu / (a->mu + theta);
    if (auto* b = std::get_if<BrownianDrift>(&p_))
      return b->mu * theta + 0.5 * b->sigma * b->sigma * theta * theta;
    const auto& j = std::get<JumpDiffusion>(p_);
    T r = j.alpha / (j.alpha + theta);
    return j.c * theta + 0.5 * j.sigma * j.sigma * theta * theta - j.lambda0 +
           j.lambda0 * r * r;
  }

  double laplace_exponent_derivative(double theta) const {
    if (auto* a = std::get_if<CramerLundberg>(&p_)) {
      double d = a->mu + theta;
      return a->c - a->lambda0 * a->mu / (d * d);
    }
    if (auto* b = std::get_if<BrownianDrift>(&p_)) return b->mu + b->sigma * b->sigma * theta;
    const auto& j = std::get<JumpDiffusion>(p_);
    double d = j.alpha + theta;
    return j.c + j.sigma * j.sigma * theta - 2.0 * j.lambda0 * j.alpha * j.alpha / (d * d * d);
  }

  // Left end of the domain of psi (pole of the claim transform).
  double theta_lower() const {
    if (auto* a = std::get_if<CramerLundberg>(&p_)) return -a->mu;
    if (auto* j = std::get_if<JumpDiffusion>(&p_)) return -j->alpha;
    return -std::numeric_limits<double>::infinity();
  }

  // psi'(0+), the mean drift of X.
  double net_drift() const { return laplace_exponent_derivative(0.0); }
  bool net_profit() const { return net_drift() > 0.0; }

  double levy_density(double z) const {
    if (z <= 0.0) return 0.0;
    if (auto* a = std::get_if<CramerLundberg>(&p_))
      return a->lambda0 * a->mu * std::exp(-a->mu * z);
    if (auto* j = std::get_if<JumpDiffusion>(&p_))
      return j->lambda0 * j->alpha * j->alpha * z * std::exp(-j->alpha * z);
    return 0.0;
  }

  // nu((z, inf)); for z <= 0 the total jump rate.
  double levy_tail(double z) const {
    z = std::max(z, 0.0);
    if (auto* a = std::get_if<CramerLundberg>(&p_)) return a->lambda0 * std::exp(-a->mu * z);
    if (auto* j = std::get_if<JumpDiffusion>(&p_))
      return j->lambda0 * (1.0 + j->alpha * z) * std::exp(-j->alpha * z);
    return 0.0;
  }

  // Smallest z with levy_tail(z) <= eps (0 when the tail is already small).
  double jump_cutoff(double eps) const {
    if (!has_jumps() || levy_tail(0.0) <= eps) return 0.0;
    if (auto* a = std::get_if<CramerLundberg>(&p_)) return std::log(a->lambda0 / eps) / a->mu;
    double lo = 0.0, hi = 1.0;
    while (levy_tail(hi) > eps) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
      double mid = 0.5 * (lo + hi);
      (levy_tail(mid) > eps ? lo : hi) = mid;
    }
    return hi;
  }

  // Positive root R of psi(-R) = 0 (adjustment coefficient); requires net profit.
  double adjustment_coefficient() const {
    if (!net_profit()) throw DomainError("adjustment coefficient requires positive drift");
    if (auto* b = std::get_if<BrownianDrift>(&p_)) return 2.0 * b->mu / (b->sigma * b->sigma);
    if (auto* a = std::get_if<CramerLundberg>(&p_)) return a->mu - a->lambda0 / a->c;
    double lo = 1e-12, hi = -theta_lower();
    // psi(-theta) < 0 just right of 0 and blows up at the pole
    for (int i = 0; i < 300 && hi - lo > 1e-14 * hi; ++i) {
      double mid = 0.5 * (lo + hi);
      (laplace_exponent(-mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Right inverse Phi(q) = sup{theta >= 0 : psi(theta) = q}.
  double phi(double q) const {
    if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("phi: q must be finite and >= 0");
    if (auto* b = std::get_if<BrownianDrift>(&p_)) {
      double s2 = b->sigma * b->sigma;
      return (std::sqrt(b->mu * b->mu + 2.0 * q * s2) - b->mu) / s2;
    }
    double lo = 0.0;
    if (q == 0.0) {
      if (net_drift() >= 0.0) return 0.0;
      // psi dips below zero; start the bracket at its minimiser
      double a = 0.0, b = 1.0;
      while (laplace_exponent_derivative(b) < 0.0) b *= 2.0;
      for (int i = 0; i < 200 && b - a > 1e-15 * b; ++i) {
        double m = 0.5 * (a + b);
        (laplace_exponent_derivative(m) < 0.0 ? a : b) = m;
      }
      lo = b;
    }
    double hi = std::max(1.0, 2.0 * lo);
    int guard = 0;
    while (laplace_exponent(hi) - q <= 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 200) throw NumericalError("phi: bracket search failed", hi);
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      double f = laplace_exponent(x) - q;
      if (f > 0.0) hi = x; else lo = x;
      double df = laplace_exponent_derivative(x);
      double step = f / df;
      double xn = x - step;
      if (!(xn > lo && xn < hi) || df <= 0.0) {
        xn = 0.5 * (lo + hi);
        step = x - xn;
      }
      if (std::abs(step) <= 1e-12 * std::max(1.0, std::abs(xn)) || hi - lo <= 1e-15 * hi) return xn;
      x = xn;
    }
    throw NumericalError("phi: no convergence", x, hi - lo);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    if (auto* a = std::get_if<CramerLundberg>(&p_))
      os << "cramer_lundberg(c=" << a->c << ", lambda0=" << a->lambda0 << ", mu=" << a->mu << ")";
    else if (auto* b = std::get_if<BrownianDrift>(&p_))
      os << "brownian(mu=" << b->mu << ", sigma=" << b->sigma << ")";
    else {
      const auto& j = std::get<JumpDiffusion>(p_);
      os << "jump_diffusion(c=" << j.c << ", sigma=" << j.sigma << ", lambda0=" << j.lambda0
         << ", alpha=" << j.alpha << ")";
    }
    return os.str();
  }

 private:
  void validate() const {
    auto fin = [](double v) { return std::isfinite(v); };
    if (auto* a = std::get_if<CramerLundberg>(&p_)) {
      detail::require(fin(a->c) && a->c > 0, "cramer_lundberg: c must be > 0");
      detail::require(fin(a->lambda0) && a->lambda0 > 0, "cramer_lundberg: lambda0 must be > 0");
      detail::require(fin(a->mu) && a->mu > 0, "cramer_lundberg: mu must be > 0");
    } else if (auto* b = std::get_if<BrownianDrift>(&p_)) {
      detail::require(fin(b->mu), "brownian: mu must be finite");
      detail::require(fin(b->sigma) && b->sigma > 0, "brownian: sigma must be > 0");
    } else {
      const auto& j = std::get<JumpDiffusion>(p_);
      detail::require(fin(j.c), "jump_diffusion: c must be finite");
      detail::require(fin(j.sigma) && j.sigma > 0, "jump_diffusion: sigma must be > 0");
      detail::require(fin(j.lambda0) && j.lambda0 > 0, "jump_diffusion: lambda0 must be > 0");
      detail::require(fin(j.alpha) && j.alpha > 0, "jump_diffusion: alpha must be > 0");
    }
  }

  Params p_;
};

inline double laplace_exponent(const LevyModel& m, double theta) {
  if (!(theta >= 0.0)) throw InvalidArgument("laplace_exponent: theta must be >= 0");
  return m.laplace_exponent(theta);
}
inline double phi_q(const LevyModel& m, double q) { return m.phi(q); }
inline double levy_density(const LevyModel& m, double z) {
  if (!(z > 0.0)) throw InvalidArgument("levy_density: z must be > 0");
  return m.levy_density(z);
}
inline double levy_tail(const LevyModel& m, double z) {
  if (!(z >= 0.0)) throw InvalidArgument("levy_tail: z must be >= 0");
  return m.levy_tail(z);
}

}  // namespace gsdd
