#pragma once

// Drawdown functions xi, their complements xi_bar(z) = z - xi(z), and the
// minimum-capital requirement varsigma = xi + theta.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gsdd/errors.hpp"

namespace gsdd {

// Right-continuous step function: values[i] on [breaks[i-1], breaks[i]).
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values;

  static PiecewiseConstant constant(double v) { return {{}, {v}}; }

  double operator()(double z) const {
    size_t i = std::upper_bound(breaks.begin(), breaks.end(), z) - breaks.begin();
    return values[i];
  }
  bool is_constant() const { return breaks.empty(); }
  void validate() const {
    detail::require(values.size() == breaks.size() + 1,
                    "piecewise constant: need one more value than breakpoints");
    for (size_t i = 1; i < breaks.size(); ++i)
      detail::require(breaks[i] > breaks[i - 1], "piecewise constant: breakpoints must increase");
  }
};

struct ZeroDrawdown {};
struct LinearDrawdown {
  double a;
  double b;
};
// xi(z) = int_{x0}^z gamma(w) dw, the loss-carry-forward tax drawdown.
struct TaxDrawdown {
  PiecewiseConstant gamma;
  double x0;
};
// xi(z) = (z - b)^+, the dividend barrier drawdown.
struct BarrierDrawdown {
  double b;
};

class MinCapital {
 public:
  MinCapital() = default;
  static MinCapital constant(double v) {
    detail::require(std::isfinite(v) && v >= 0.0, "min capital: v must be >= 0");
    MinCapital m;
    m.v_ = v;
    return m;
  }
  static MinCapital function(std::function<double(double)> f) {
    detail::require(static_cast<bool>(f), "min capital: empty function");
    MinCapital m;
    m.f_ = std::move(f);
    return m;
  }
  double operator()(double z) const {
    if (f_) {
      double v = f_(z);
      if (!(v >= 0.0)) throw DomainError("min capital: theta(z) must be >= 0");
      return v;
    }
    return v_;
  }
  bool is_zero() const { return !f_ && v_ == 0.0; }
  bool is_constant() const { return !f_; }
  double constant_value() const { return v_; }

 private:
  double v_ = 0.0;
  std::function<double(double)> f_;
};

// value(z) = v_lo + slope (z - lo) on [lo, hi].
struct AffinePiece {
  double lo, hi, v_lo, slope;
  double at(double z) const { return v_lo + slope * (z - lo); }
};

class DrawdownSpec {
 public:
  using Kind = std::variant<ZeroDrawdown, LinearDrawdown, TaxDrawdown, BarrierDrawdown>;

  DrawdownSpec() : DrawdownSpec(ZeroDrawdown{}) {}
  DrawdownSpec(Kind k, MinCapital theta = {}) : k_(std::move(k)), theta_(std::move(theta)) {
    validate();
  }

  static DrawdownSpec zero() { return DrawdownSpec(ZeroDrawdown{}); }
  static DrawdownSpec linear(double a, double b) { return DrawdownSpec(LinearDrawdown{a, b}); }
  static DrawdownSpec tax(PiecewiseConstant g, double x0) {
    return DrawdownSpec(TaxDrawdown{std::move(g), x0});
  }
  static DrawdownSpec tax(double g, double x0) { return tax(PiecewiseConstant::constant(g), x0); }
  static DrawdownSpec barrier(double b) { return DrawdownSpec(BarrierDrawdown{b}); }

  DrawdownSpec with_min_capital(MinCapital theta) const { return DrawdownSpec(k_, std::move(theta)); }

  const Kind& kind() const { return k_; }
  const MinCapital& min_capital() const { return theta_; }
  bool constrained() const { return !theta_.is_zero(); }

  // Smallest admissible running maximum.
  double domain_start() const {
    if (auto* t = std::get_if<TaxDrawdown>(&k_)) return t->x0;
    return -std::numeric_limits<double>::infinity();
  }

  double xi(double z) const { return z - xi_bar(z); }

  double xi_bar(double z) const {
    if (std::holds_alternative<ZeroDrawdown>(k_)) return z;
    if (auto* l = std::get_if<LinearDrawdown>(&k_)) return (1.0 - l->a) * z + l->b;
    if (auto* b = std::get_if<BarrierDrawdown>(&k_)) return std::min(z, b->b);
    const auto& t = std::get<TaxDrawdown>(k_);
    if (z < t.x0) throw DomainError("tax drawdown: z below x0");
    return pieces_tax(t, t.x0, z).back().at(z);
  }

  double varsigma(double z) const { return xi(z) + theta_(z); }

  double varsigma_bar(double z) const {
    double v = xi_bar(z) - theta_(z);
    if (!(v > 0.0)) throw DomainError("minimum capital exceeds the drawdown distance");
    return v;
  }

  // xi_bar as affine pieces over [lo, hi]; hi may be +inf.
  std::vector<AffinePiece> xi_bar_pieces(double lo, double hi) const {
    if (std::holds_alternative<ZeroDrawdown>(k_)) return {{lo, hi, lo, 1.0}};
    if (auto* l = std::get_if<LinearDrawdown>(&k_)) return {{lo, hi, xi_bar(lo), 1.0 - l->a}};
    if (auto* b = std::get_if<BarrierDrawdown>(&k_)) {
      if (hi <= b->b) return {{lo, hi, lo, 1.0}};
      if (lo >= b->b) return {{lo, hi, b->b, 0.0}};
      return {{lo, b->b, lo, 1.0}, {b->b, hi, b->b, 0.0}};
    }
    const auto& t = std::get<TaxDrawdown>(k_);
    if (lo < t.x0) throw DomainError("tax drawdown: z below x0");
    return pieces_tax(t, lo, hi);
  }

  // Same for varsigma_bar; empty when theta is a general function.
  std::vector<AffinePiece> varsigma_bar_pieces(double lo, double hi) const {
    if (!theta_.is_constant()) return {};
    auto p = xi_bar_pieces(lo, hi);
    for (auto& a : p) a.v_lo -= theta_.constant_value();
    return p;
  }

  std::vector<double> kinks(double lo, double hi) const {
    std::vector<double> k;
    for (auto& p : xi_bar_pieces(lo, hi))
      if (p.lo > lo) k.push_back(p.lo);
    return k;
  }

  // Slope of xi_bar beyond every breakpoint.
  double asymptotic_slope() const {
    auto p = xi_bar_pieces(std::max(domain_start(), 0.0), std::numeric_limits<double>::infinity());
    return p.back().slope;
  }

  // Inverse of the (strictly increasing) tax complement xi_bar.
  double xi_bar_inverse(double s) const {
    const auto* t = std::get_if<TaxDrawdown>(&k_);
    if (!t) throw InvalidArgument("xi_bar_inverse is defined for the tax drawdown only");
    if (s < t->x0) throw DomainError("xi_bar_inverse: s below x0");
    if (t->gamma.is_constant()) return t->x0 + (s - t->x0) / (1.0 - t->gamma.values[0]);
    for (auto& p : pieces_tax(*t, t->x0, std::numeric_limits<double>::infinity())) {
      double end = std::isfinite(p.hi) ? p.at(p.hi) : std::numeric_limits<double>::infinity();
      if (s <= end) return p.lo + (s - p.v_lo) / p.slope;
    }
    throw NumericalError("xi_bar_inverse failed");
  }

  double tax_rate(double z) const {
    const auto* t = std::get_if<TaxDrawdown>(&k_);
    if (!t) throw InvalidArgument("tax_rate is defined for the tax drawdown only");
    return t->gamma(z);
  }

  // Throws if x is not an admissible starting point.
  void check_start(double x) const {
    if (x < domain_start()) throw DomainError("initial surplus must equal the tax reference x0");
    if (!(xi_bar(x) > 0.0)) throw DomainError("drawdown distance at the start must be positive");
    varsigma_bar(x);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(12);
    if (std::holds_alternative<ZeroDrawdown>(k_)) os << "zero";
    else if (auto* l = std::get_if<LinearDrawdown>(&k_)) os << "linear(a=" << l->a << ", b=" << l->b << ")";
    else if (auto* b = std::get_if<BarrierDrawdown>(&k_)) os << "barrier(b=" << b->b << ")";
    else {
      const auto& t = std::get<TaxDrawdown>(k_);
      os << "tax(x0=" << t.x0 << ", gamma=";
      for (size_t i = 0; i < t.gamma.values.size(); ++i) {
        if (i) os << "|" << t.gamma.breaks[i - 1] << "|";
        os << t.gamma.values[i];
      }
      os << ")";
    }
    if (!theta_.is_zero()) {
      if (theta_.is_constant()) os << " min_capital=" << theta_.constant_value();
      else os << " min_capital=function";
    }
    return os.str();
  }

 private:
  static std::vector<AffinePiece> pieces_tax(const TaxDrawdown& t, double lo, double hi) {
    // walk from x0 so v_lo stays exact at each breakpoint
    std::vector<AffinePiece> out;
    double z = t.x0, v = t.x0;
    size_t i = std::upper_bound(t.gamma.breaks.begin(), t.gamma.breaks.end(), z) -
               t.gamma.breaks.begin();
    while (true) {
      double end = i < t.gamma.breaks.size() ? t.gamma.breaks[i] : std::numeric_limits<double>::infinity();
      double slope = 1.0 - t.gamma.values[i];
      double a = std::max(z, lo), b = std::min(end, hi);
      if (b > a || (a == b && out.empty() && a == hi))
        out.push_back({a, b, v + slope * (a - z), slope});
      if (end >= hi) break;
      v += slope * (end - z);
      z = end;
      ++i;
    }
    return out;
  }

  void validate() const {
    if (auto* l = std::get_if<LinearDrawdown>(&k_)) {
      detail::require(std::isfinite(l->a) && l->a < 1.0, "linear drawdown: a must be < 1");
      detail::require(std::isfinite(l->b) && l->b >= 0.0, "linear drawdown: b must be >= 0");
      detail::require(l->b > 0.0 || l->a <= 0.0, "linear drawdown: b = 0 requires a <= 0");
    } else if (auto* b = std::get_if<BarrierDrawdown>(&k_)) {
      detail::require(std::isfinite(b->b) && b->b > 0.0, "barrier drawdown: b must be > 0");
    } else if (auto* t = std::get_if<TaxDrawdown>(&k_)) {
      t->gamma.validate();
      detail::require(std::isfinite(t->x0) && t->x0 > 0.0, "tax drawdown: x0 must be > 0");
      for (double g : t->gamma.values)
        detail::require(g >= 0.0 && g < 1.0, "tax drawdown: rates must lie in [0, 1)");
    }
  }

  Kind k_;
  MinCapital theta_;
};

}  // namespace gsdd
