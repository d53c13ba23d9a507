#pragma once

// Monte Carlo oracle for drawdown, tax and dividend problems.
//
// Compound Poisson paths are simulated exactly, claim to claim. Paths with a
// Gaussian part advance by exact Gaussian increments, with a step that grows
// with the distance to the nearest boundary; inside each step the bridge
// maximum is sampled and crossings between grid points are caught with the
// Brownian-bridge crossing probability. Several boundaries can be tracked on
// one path, which gives common random numbers across drawdown specs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <vector>

#include "gsdd/drawdown.hpp"
#include "gsdd/errors.hpp"
#include "gsdd/levy_models.hpp"
#include "gsdd/parallel.hpp"

namespace gsdd {

struct SimConfig {
  std::uint64_t n_paths = 100000;
  double horizon = 20000.0;
  double dt = 1e-3;  // smallest step for the Gaussian part
  std::uint64_t seed = 20240611;
  bool bridge_correction = true;
  bool adaptive_steps = true;
  double step_safety = 8.0;  // step <= (distance / (safety * sigma))^2
  double max_step = 1.0;
  double stop_eps = 1e-9;  // stop once any later drawdown has probability below this
  unsigned threads = 1;
  std::uint64_t chunk = 1024;  // paths per random substream

  void validate() const {
    detail::require(n_paths >= 1, "sim: n_paths must be >= 1");
    detail::require(horizon > 0.0 && std::isfinite(horizon), "sim: horizon must be > 0");
    detail::require(dt > 0.0 && std::isfinite(dt), "sim: dt must be > 0");
    detail::require(step_safety > 0.0, "sim: step_safety must be > 0");
    detail::require(max_step >= dt, "sim: max_step must be >= dt");
    detail::require(stop_eps >= 0.0 && stop_eps < 1.0, "sim: stop_eps must lie in [0, 1)");
    detail::require(chunk >= 1, "sim: chunk must be >= 1");
  }
};

struct SimRecord {
  bool hit = false;
  double tau = std::numeric_limits<double>::infinity();
  double ell = 0.0;
  double y_before = 0.0;
  double w_at = 0.0;
  double s_max = 0.0;
  bool constraint_ok = true;
  bool creeping = false;
};

// A tax or dividend path: ruin of the transformed process (in its own
// coordinates), the equivalent drawdown of X on the same path, and the largest
// pathwise gap in the identities linking the two.
struct TransformedRecord {
  SimRecord process;
  SimRecord drawdown;
  double max_gap = 0.0;
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;
};

namespace detail {

enum class TrackKind { Drawdown, Tax, Dividend };

struct TrackSpec {
  TrackKind kind;
  DrawdownSpec spec;  // boundary; xi_gamma or xi_b for the transformed kinds
  double barrier = 0.0;
};

class PathSimulator {
 public:
  PathSimulator(const LevyModel& m, double x, const SimConfig& cfg, std::vector<TrackSpec> tracks)
      : m_(m), x_(x), cfg_(cfg), specs_(std::move(tracks)) {
    cfg_.validate();
    detail::require(x > 0.0 && std::isfinite(x), "sim: x must be > 0");
    for (auto& t : specs_) t.spec.check_start(x);
    const double inf = std::numeric_limits<double>::infinity();
    dstop_.assign(specs_.size(), inf);
    if (m_.net_profit() && cfg_.stop_eps > 0.0) {
      // P(later drawdown) <= e^{-R d} (1 + 1/k) for distance d and boundary slope k
      const double r = m_.adjustment_coefficient();
      for (size_t i = 0; i < specs_.size(); ++i) {
        double k = specs_[i].kind == TrackKind::Dividend ? 0.0 : specs_[i].spec.asymptotic_slope();
        if (k > 0.0) dstop_[i] = (std::log(1.0 / cfg_.stop_eps) + std::log1p(1.0 / k)) / r;
      }
    }
    sigma_ = m_.sigma();
  }

  // records[path][track]
  std::vector<std::vector<TransformedRecord>> run() const {
    const std::uint64_t n = cfg_.n_paths;
    const std::uint64_t nchunks = (n + cfg_.chunk - 1) / cfg_.chunk;
    std::vector<std::vector<TransformedRecord>> out(n);
    parallel_for(nchunks, cfg_.threads, [&](std::size_t c) {
      std::seed_seq seq{std::uint32_t(cfg_.seed), std::uint32_t(cfg_.seed >> 32), std::uint32_t(c),
                        std::uint32_t(std::uint64_t(c) >> 32)};
      std::mt19937_64 rng(seq);
      const std::uint64_t lo = c * cfg_.chunk, hi = std::min(n, lo + cfg_.chunk);
      for (std::uint64_t p = lo; p < hi; ++p) out[p] = path(rng);
    });
    return out;
  }

 private:
  struct Track {
    const TrackSpec* ts;
    double d_stop;
    bool done = false;
    double u = 0.0, ubar = 0.0, uell = 0.0, gap = 0.0;  // transformed process
    SimRecord rec;
  };

  struct State {
    double t, x, m, ell;
  };

  double distance(const Track& k, double xv, double mv) const {
    if (k.ts->kind == TrackKind::Drawdown) return xv - k.ts->spec.xi(mv);
    return k.u;
  }

  // X moves from x0 to x1 while its maximum rises from m0 to m1, the new
  // maximum being reached at time tm. Updates the transformed process
  // directly from the increments.
  void move(Track& k, double x0, double x1, double m0, double m1, double tm) const {
    if (k.ts->kind == TrackKind::Drawdown) return;
    double deduct = 0.0;
    if (m1 > m0) {
      if (k.ts->kind == TrackKind::Tax) {
        deduct = k.ts->spec.xi(m1) - k.ts->spec.xi(m0);
      } else {
        const double b = k.ts->barrier;
        deduct = std::max(m1 - b, 0.0) - std::max(m0 - b, 0.0);
      }
      const double at_max = k.u + (m1 - x0) - deduct;
      if (at_max > k.ubar) {
        k.ubar = at_max;
        k.uell = tm;
      }
    }
    k.u += (x1 - x0) - deduct;
    const auto& sp = k.ts->spec;
    k.gap = std::max({k.gap, std::abs(k.ubar - sp.xi_bar(m1)), std::abs(k.u - (x1 - sp.xi(m1)))});
  }

  void record(Track& k, size_t& alive, const State& st, double tau, double yb, double wa,
              double smax, bool creep) const {
    k.done = true;
    --alive;
    k.rec.hit = true;
    k.rec.tau = tau;
    k.rec.ell = k.ts->kind == TrackKind::Drawdown ? st.ell : k.uell;
    k.rec.y_before = yb;
    k.rec.w_at = wa;
    k.rec.s_max = smax;
    k.rec.creeping = creep;
  }

  void claim(std::mt19937_64& rng, std::vector<Track>& tr, State& st, size_t& alive) const {
    std::exponential_distribution<double> expo(1.0);
    double size;
    if (m_.family() == Family::CramerLundberg) {
      size = expo(rng) / m_.as<CramerLundberg>().mu;
    } else {
      double e1 = expo(rng), e2 = expo(rng);
      size = (e1 + e2) / m_.as<JumpDiffusion>().alpha;
    }
    const double xpre = st.x, xpost = st.x - size;
    for (auto& k : tr) {
      if (k.done) continue;
      const double upre = k.u;
      move(k, xpre, xpost, st.m, st.m, st.t);
      if (k.ts->kind == TrackKind::Drawdown) {
        const auto& sp = k.ts->spec;
        if (xpost < sp.xi(st.m)) record(k, alive, st, st.t, xpre, xpost, st.m, false);
        else if (sp.constrained() && xpost < sp.varsigma(st.m)) k.rec.constraint_ok = false;
      } else if (k.u < 0.0) {
        record(k, alive, st, st.t, upre, k.u, k.ubar, false);
      }
    }
    st.x = xpost;
  }

  std::vector<TransformedRecord> path(std::mt19937_64& rng) const {
    std::vector<Track> tr;
    for (size_t i = 0; i < specs_.size(); ++i) {
      Track k{&specs_[i], dstop_[i]};
      k.u = k.ubar = x_;
      tr.push_back(k);
    }
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double lam = m_.jump_rate(), drift = m_.drift(), s2 = sigma_ * sigma_;
    const double inf = std::numeric_limits<double>::infinity();
    State st{0.0, x_, x_, 0.0};
    double next_claim = lam > 0.0 ? expo(rng) / lam : inf;
    size_t alive = tr.size();

    while (alive > 0 && st.t < cfg_.horizon) {
      if (sigma_ == 0.0) {
        if (next_claim > cfg_.horizon) break;
        const double xpre = st.x + drift * (next_claim - st.t);
        const double mnew = std::max(st.m, xpre);
        for (auto& k : tr)
          if (!k.done) move(k, st.x, xpre, st.m, mnew, next_claim);
        if (xpre > st.m) st.ell = next_claim;
        st.x = xpre;
        st.m = mnew;
        st.t = next_claim;
        claim(rng, tr, st, alive);
        next_claim = st.t + expo(rng) / lam;
      } else {
        double dmin = inf;
        for (auto& k : tr)
          if (!k.done) dmin = std::min(dmin, std::max(distance(k, st.x, st.m), 0.0));
        double h = cfg_.dt;
        if (cfg_.adaptive_steps) {
          const double r = dmin / (cfg_.step_safety * sigma_);
          h = std::clamp(r * r, cfg_.dt, cfg_.max_step);
        }
        bool at_claim = false;
        if (st.t + h >= next_claim) {
          h = next_claim - st.t;
          at_claim = true;
        }
        if (st.t + h > cfg_.horizon) {
          h = cfg_.horizon - st.t;
          at_claim = false;
        }
        const double x1 = st.x + drift * h + sigma_ * std::sqrt(h) * gauss(rng);
        const double e = -std::log1p(-unif(rng));
        const double bmax =
            0.5 * (st.x + x1 + std::sqrt((x1 - st.x) * (x1 - st.x) + 2.0 * s2 * h * e));
        const double ucross = unif(rng);
        double mnew = st.m, tmax = st.t;
        if (bmax > st.m) {
          mnew = bmax;
          const double up = bmax - st.x, down = bmax - x1;
          tmax = st.t + h * (up + down > 0.0 ? up / (up + down) : 0.5);
          st.ell = tmax;
        }
        for (auto& k : tr) {
          if (k.done) continue;
          const double d0 = distance(k, st.x, st.m);
          move(k, st.x, x1, st.m, mnew, tmax);
          const double d1 = distance(k, x1, mnew);
          const auto& sp = k.ts->spec;
          if (k.ts->kind == TrackKind::Drawdown && sp.constrained() && k.rec.constraint_ok) {
            const double e0 = st.x - sp.varsigma(st.m), e1 = x1 - sp.varsigma(mnew);
            bool fail = e1 < 0.0;
            if (!fail && cfg_.bridge_correction && e0 > 0.0)
              fail = ucross < std::exp(-2.0 * e0 * e1 / (s2 * h));
            if (fail) k.rec.constraint_ok = false;
          }
          bool hit = d1 < 0.0;
          double frac = 1.0;
          if (hit) {
            frac = d0 > 0.0 ? d0 / (d0 - d1) : 0.0;
          } else if (cfg_.bridge_correction && d0 > 0.0) {
            hit = ucross < std::exp(-2.0 * d0 * d1 / (s2 * h));
            frac = 0.5;
          }
          if (!hit) continue;
          const State at{st.t + frac * h, x1, mnew, st.ell};
          if (k.ts->kind == TrackKind::Drawdown) {
            const double bnd = sp.xi(mnew);
            record(k, alive, at, at.t, bnd, bnd, mnew, true);
          } else {
            record(k, alive, at, at.t, 0.0, 0.0, k.ubar, true);
          }
        }
        st.x = x1;
        st.m = mnew;
        st.t += h;
        if (at_claim && alive > 0) {
          claim(rng, tr, st, alive);
          next_claim = st.t + expo(rng) / lam;
        }
      }
      bool all_safe = true;
      for (auto& k : tr)
        if (!k.done && !(distance(k, st.x, st.m) >= k.d_stop)) all_safe = false;
      if (all_safe) break;
    }

    std::vector<TransformedRecord> res;
    for (auto& k : tr) {
      TransformedRecord r;
      r.process = k.rec;
      if (!k.rec.hit) r.process.s_max = k.ts->kind == TrackKind::Drawdown ? st.m : k.ubar;
      r.max_gap = k.gap;
      res.push_back(r);
    }
    return res;
  }

  LevyModel m_;
  double x_;
  SimConfig cfg_;
  std::vector<TrackSpec> specs_;
  std::vector<double> dstop_;
  double sigma_ = 0.0;
};

}  // namespace detail

// Records for several drawdown specs on common paths: result[path][spec].
inline std::vector<std::vector<SimRecord>> simulate_drawdown_crn(const LevyModel& m,
                                                                 const std::vector<DrawdownSpec>& specs,
                                                                 double x, const SimConfig& cfg) {
  std::vector<detail::TrackSpec> ts;
  for (auto& s : specs) ts.push_back({detail::TrackKind::Drawdown, s});
  auto raw = detail::PathSimulator(m, x, cfg, ts).run();
  std::vector<std::vector<SimRecord>> out(raw.size());
  for (size_t p = 0; p < raw.size(); ++p)
    for (auto& r : raw[p]) out[p].push_back(r.process);
  return out;
}

inline std::vector<SimRecord> simulate_drawdown(const LevyModel& m, const DrawdownSpec& spec,
                                                double x, const SimConfig& cfg = {}) {
  auto crn = simulate_drawdown_crn(m, {spec}, x, cfg);
  std::vector<SimRecord> out;
  out.reserve(crn.size());
  for (auto& r : crn) out.push_back(r.front());
  return out;
}

namespace detail {
inline std::vector<TransformedRecord> simulate_transformed(const LevyModel& m, TrackKind kind,
                                                           const DrawdownSpec& boundary,
                                                           double barrier, double x,
                                                           const SimConfig& cfg) {
  std::vector<TrackSpec> ts = {{kind, boundary, barrier}, {TrackKind::Drawdown, boundary}};
  auto raw = PathSimulator(m, x, cfg, ts).run();
  std::vector<TransformedRecord> out(raw.size());
  for (size_t p = 0; p < raw.size(); ++p) {
    out[p] = raw[p][0];
    out[p].drawdown = raw[p][1].process;
  }
  return out;
}
}  // namespace detail

// Ruin of U = X - int gamma(Xbar) dXbar, simulated from its increments.
inline std::vector<TransformedRecord> simulate_tax(const LevyModel& m, const PiecewiseConstant& gamma,
                                                   double x, const SimConfig& cfg = {}) {
  return detail::simulate_transformed(m, detail::TrackKind::Tax, DrawdownSpec::tax(gamma, x), 0.0,
                                      x, cfg);
}

// Ruin of R = X - (Xbar - b)^+, simulated from its increments.
inline std::vector<TransformedRecord> simulate_dividend(const LevyModel& m, double b, double x,
                                                        const SimConfig& cfg = {}) {
  if (!(x < b)) throw DomainError("simulate_dividend: x must be < b");
  return detail::simulate_transformed(m, detail::TrackKind::Dividend, DrawdownSpec::barrier(b), b,
                                      x, cfg);
}

template <class Rec, class F>
Estimate estimate(const std::vector<Rec>& recs, F&& functional) {
  // Welford accumulation in record order
  Estimate e;
  double mean = 0.0, m2 = 0.0;
  for (const auto& r : recs) {
    const double v = functional(r);
    ++e.n;
    const double d = v - mean;
    mean += d / double(e.n);
    m2 += d * (v - mean);
  }
  e.mean = mean;
  e.stderr_ = e.n > 1 ? std::sqrt(m2 / double(e.n - 1) / double(e.n)) : 0.0;
  return e;
}

template <class F>
Estimate estimate(const LevyModel& m, const DrawdownSpec& spec, double x, const SimConfig& cfg,
                  F&& functional) {
  return estimate(simulate_drawdown(m, spec, x, cfg), std::forward<F>(functional));
}

// Functional for E(e^{-q ell - lambda (tau - ell)}; tau < T).
inline auto discounted(double q, double lambda) {
  return [q, lambda](const SimRecord& r) {
    return r.hit ? std::exp(-q * r.ell - lambda * (r.tau - r.ell)) : 0.0;
  };
}

inline void write_records_csv(std::ostream& os, const std::vector<SimRecord>& recs) {
  os << "hit,tau,ell,y_before,w_at,s_max,constraint_ok,creeping\n";
  os << std::setprecision(17);
  for (const auto& r : recs) {
    os << int(r.hit) << ',';
    if (r.hit) os << r.tau;
    else os << "inf";
    os << ',' << r.ell << ',' << r.y_before << ',' << r.w_at << ',' << r.s_max << ','
       << int(r.constraint_ok) << ',' << int(r.creeping) << '\n';
  }
}

}  // namespace gsdd
