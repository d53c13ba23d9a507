#pragma once

// Run configuration for the command-line front end: strict JSON parsing with
// defaults, and the table-producing commands.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsdd/gerber_shiu.hpp"
#include "gsdd/laplace_inversion.hpp"
#include "gsdd/mc_oracle.hpp"
#include "gsdd/parallel.hpp"

namespace gsdd::cli {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads keys from one JSON object, fills defaults, records what was used and
// rejects anything left over.
class Reader {
 public:
  Reader(const json& j, std::string path, json& eff) : j_(j), path_(std::move(path)), eff_(eff) {
    if (!j_.is_object()) throw ConfigError(where("") + "expected an object");
    eff_ = json::object();
  }

  bool has(const std::string& k) const { return j_.contains(k); }

  double num(const std::string& k, std::optional<double> def = {}) {
    seen_.insert(k);
    if (!j_.contains(k)) {
      if (!def) throw ConfigError(where(k) + "missing required number");
      eff_[k] = *def;
      return *def;
    }
    const auto& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(where(k) + "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where(k) + "must be finite");
    eff_[k] = d;
    return d;
  }

  std::uint64_t count(const std::string& k, std::uint64_t def) {
    seen_.insert(k);
    if (!j_.contains(k)) {
      eff_[k] = def;
      return def;
    }
    const auto& v = j_.at(k);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw ConfigError(where(k) + "expected a nonnegative integer");
    eff_[k] = v.get<std::uint64_t>();
    return v.get<std::uint64_t>();
  }

  bool flag(const std::string& k, bool def) {
    seen_.insert(k);
    if (!j_.contains(k)) {
      eff_[k] = def;
      return def;
    }
    if (!j_.at(k).is_boolean()) throw ConfigError(where(k) + "expected true or false");
    eff_[k] = j_.at(k).get<bool>();
    return eff_[k].get<bool>();
  }

  std::string str(const std::string& k, std::optional<std::string> def,
                  const std::vector<std::string>& allowed = {}) {
    seen_.insert(k);
    std::string s;
    if (!j_.contains(k)) {
      if (!def) throw ConfigError(where(k) + "missing required string");
      s = *def;
    } else {
      if (!j_.at(k).is_string()) throw ConfigError(where(k) + "expected a string");
      s = j_.at(k).get<std::string>();
    }
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(where(k) + "'" + s + "' is not one of " + list);
    }
    eff_[k] = s;
    return s;
  }

  // Raw access for structured values; the caller records the effective form.
  const json* raw(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k) ? &j_.at(k) : nullptr;
  }
  json& eff(const std::string& k) { return eff_[k]; }
  std::string child(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("config: unknown key '" + child(it.key()) + "'");
  }

  std::string where(const std::string& k) const {
    return "config: " + (k.empty() ? (path_.empty() ? std::string("<root>") : path_) : child(k)) + ": ";
  }

 private:
  const json& j_;
  std::string path_;
  json& eff_;
  std::set<std::string> seen_;
};

struct Grid {
  std::vector<double> values;
};

// Either "values": [...] or "from", "to", "step".
inline Grid grid_from(Reader& g) {
  Grid out;
  if (g.has("values")) {
    const json* v = g.raw("values");
    if (!v->is_array() || v->empty()) throw ConfigError(g.where("values") + "expected a nonempty array");
    for (auto& x : *v) {
      if (!x.is_number()) throw ConfigError(g.where("values") + "expected numbers");
      out.values.push_back(x.get<double>());
    }
    g.eff("values") = out.values;
    return out;
  }
  double from = g.num("from"), to = g.num("to"), step = g.num("step");
  if (!(step > 0.0)) throw ConfigError(g.where("step") + "must be > 0");
  if (!(to >= from)) throw ConfigError(g.where("to") + "must be >= from");
  long n = std::lround(std::floor((to - from) / step + 1e-9));
  if (n > 100000) throw ConfigError(g.where("step") + "grid too large");
  for (long k = 0; k <= n; ++k) out.values.push_back(from + double(k) * step);
  return out;
}

inline Grid read_grid(Reader& r, const std::string& key, std::optional<Grid> def = {}) {
  const json* j = r.raw(key);
  if (!j) {
    if (!def) throw ConfigError(r.where(key) + "missing required grid");
    r.eff(key) = {{"values", def->values}};
    return *def;
  }
  Reader g(*j, r.child(key), r.eff(key));
  auto out = grid_from(g);
  g.finish();
  return out;
}

struct ModelConfig {
  std::string family;
  std::map<std::string, double> p;

  LevyModel build(const std::string& override_key = "", double override_value = 0.0) const {
    auto q = p;
    if (!override_key.empty()) {
      if (!q.count(override_key))
        throw ConfigError("config: sweep parameter '" + override_key + "' is not a " + family +
                          " parameter");
      q[override_key] = override_value;
    }
    if (family == "cramer_lundberg") return LevyModel(CramerLundberg{q["c"], q["lambda0"], q["mu"]});
    if (family == "brownian") return LevyModel(BrownianDrift{q["mu"], q["sigma"]});
    return LevyModel(JumpDiffusion{q["c"], q["sigma"], q["lambda0"], q["alpha"]});
  }
};

inline ModelConfig read_model(Reader& parent) {
  const json* j = parent.raw("model");
  if (!j) throw ConfigError(parent.where("model") + "missing model block");
  Reader r(*j, parent.child("model"), parent.eff("model"));
  ModelConfig m;
  m.family = r.str("family", std::nullopt, {"cramer_lundberg", "brownian", "jump_diffusion"});
  std::vector<std::string> keys;
  if (m.family == "cramer_lundberg") keys = {"c", "lambda0", "mu"};
  else if (m.family == "brownian") keys = {"mu", "sigma"};
  else keys = {"c", "sigma", "lambda0", "alpha"};
  for (auto& k : keys) m.p[k] = r.num(k);
  r.finish();
  m.build();
  return m;
}

inline PiecewiseConstant read_gamma(const json& j, const std::string& path, json& eff) {
  if (j.is_number()) {
    eff = j;
    return PiecewiseConstant::constant(j.get<double>());
  }
  Reader r(j, path, eff);
  PiecewiseConstant g;
  for (const char* k : {"breaks", "values"}) {
    const json* a = r.raw(k);
    if (!a || !a->is_array()) throw ConfigError(r.where(k) + "expected an array");
    auto& dst = std::string(k) == "breaks" ? g.breaks : g.values;
    for (auto& v : *a) {
      if (!v.is_number()) throw ConfigError(r.where(k) + "expected numbers");
      dst.push_back(v.get<double>());
    }
    r.eff(k) = dst;
  }
  r.finish();
  g.validate();
  return g;
}

struct NamedSpec {
  std::string name;
  DrawdownSpec spec;
};

inline NamedSpec read_drawdown_object(const json& j, const std::string& path, json& eff) {
  Reader r(j, path, eff);
  NamedSpec out;
  if (r.has("name")) out.name = r.str("name", "");
  auto kind = r.str("kind", "zero", {"zero", "linear", "tax", "barrier"});
  if (kind == "zero") out.spec = DrawdownSpec::zero();
  else if (kind == "linear") out.spec = DrawdownSpec::linear(r.num("a"), r.num("b"));
  else if (kind == "barrier") out.spec = DrawdownSpec::barrier(r.num("b"));
  else {
    const json* g = r.raw("gamma");
    if (!g) throw ConfigError(r.where("gamma") + "missing tax rate");
    auto gamma = read_gamma(*g, r.child("gamma"), r.eff("gamma"));
    out.spec = DrawdownSpec::tax(gamma, r.num("x0"));
  }
  double v = r.num("min_capital", 0.0);
  if (v != 0.0) out.spec = out.spec.with_min_capital(MinCapital::constant(v));
  r.finish();
  return out;
}

inline NamedSpec read_drawdown(Reader& parent) {
  const json* j = parent.raw("drawdown");
  if (!j) {
    parent.eff("drawdown") = {{"kind", "zero"}, {"min_capital", 0.0}};
    return {"", DrawdownSpec::zero()};
  }
  return read_drawdown_object(*j, parent.child("drawdown"), parent.eff("drawdown"));
}

inline std::vector<NamedSpec> table1_cases() {
  return {{"I", DrawdownSpec::linear(0.0, 0.0)},
          {"II", DrawdownSpec::linear(0.3, 0.5)},
          {"III", DrawdownSpec::linear(0.5, 0.5)},
          {"IV", DrawdownSpec::linear(0.6, 0.5)}};
}

inline std::vector<NamedSpec> read_cases(Reader& parent) {
  const json* j = parent.raw("cases");
  json& eff = parent.eff("cases");
  if (!j) {
    eff = "table1";
    return table1_cases();
  }
  if (j->is_string()) {
    if (j->get<std::string>() != "table1") throw ConfigError(parent.where("cases") + "unknown case set");
    eff = "table1";
    return table1_cases();
  }
  if (!j->is_array() || j->empty()) throw ConfigError(parent.where("cases") + "expected a nonempty array");
  std::vector<NamedSpec> out;
  eff = json::array();
  for (size_t i = 0; i < j->size(); ++i) {
    json e;
    auto c = read_drawdown_object((*j)[i], parent.child("cases") + "[" + std::to_string(i) + "]", e);
    if (c.name.empty()) c.name = std::to_string(i + 1);
    eff.push_back(e);
    out.push_back(c);
  }
  return out;
}

inline QuadratureConfig read_quadrature(Reader& parent) {
  QuadratureConfig q;
  const json empty = json::object();
  const json* j = parent.raw("quadrature");
  Reader r(j ? *j : empty, parent.child("quadrature"), parent.eff("quadrature"));
  q.rel_tol = r.num("rel_tol", q.rel_tol);
  q.s_max_prob = r.num("s_max_prob", q.s_max_prob);
  q.z_max_tail = r.num("z_max_tail", q.z_max_tail);
  q.max_subdivisions = int(r.count("max_subdivisions", q.max_subdivisions));
  r.finish();
  q.validate();
  return q;
}

struct InversionBlock {
  InversionConfig cfg;
  double panel_width = 0.5;
};

inline InversionBlock read_inversion(Reader& parent) {
  InversionBlock b;
  const json empty = json::object();
  const json* j = parent.raw("inversion");
  Reader r(j ? *j : empty, parent.child("inversion"), parent.eff("inversion"));
  b.cfg.abscissa_shift = r.num("abscissa_shift", b.cfg.abscissa_shift);
  b.cfg.n_terms = int(r.count("n_terms", b.cfg.n_terms));
  b.cfg.euler_terms = int(r.count("euler_terms", b.cfg.euler_terms));
  b.panel_width = r.num("panel_width", b.panel_width);
  r.finish();
  b.cfg.validate();
  if (!(b.panel_width > 0.0)) throw ConfigError(r.where("panel_width") + "must be > 0");
  return b;
}

inline SimConfig read_sim(Reader& parent) {
  SimConfig s;
  const json empty = json::object();
  const json* j = parent.raw("sim");
  Reader r(j ? *j : empty, parent.child("sim"), parent.eff("sim"));
  s.n_paths = r.count("n_paths", s.n_paths);
  s.horizon = r.num("horizon", s.horizon);
  s.dt = r.num("dt", s.dt);
  s.seed = r.count("seed", s.seed);
  s.bridge_correction = r.flag("bridge_correction", s.bridge_correction);
  s.adaptive_steps = r.flag("adaptive_steps", s.adaptive_steps);
  s.step_safety = r.num("step_safety", s.step_safety);
  s.max_step = r.num("max_step", s.max_step);
  s.stop_eps = r.num("stop_eps", s.stop_eps);
  s.chunk = r.count("chunk", s.chunk);
  r.finish();
  s.validate();
  return s;
}

struct OutputBlock {
  std::string path;
  std::string format = "csv";
};

// Command-independent part of the run configuration.
struct RunConfig {
  std::string command;
  ModelConfig model;
  NamedSpec drawdown;
  std::vector<NamedSpec> cases;
  json experiment = json::object();
  QuadratureConfig quadrature;
  InversionBlock inversion;
  SimConfig sim;
  OutputBlock output;
  json effective;  // defaults filled in; hashed for the output header
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> c = {"prob", "joint-density", "exit", "tax", "dividend", "simulate"};
  return c;
}

// Line and column of a byte offset, for parse diagnostics.
inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": JSON syntax error at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0));
  }
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

inline RunConfig parse_run_config(const json& j, const std::string& command) {
  RunConfig rc;
  Reader r(j, "", rc.effective);
  std::string cmd = r.has("command") ? r.str("command", command, command_names()) : command;
  if (!command.empty() && cmd != command)
    throw ConfigError("config: command is '" + cmd + "' but '" + command + "' was requested");
  rc.command = cmd;
  rc.effective["command"] = cmd;
  rc.model = read_model(r);
  rc.drawdown = read_drawdown(r);
  if (cmd == "prob") rc.cases = read_cases(r);
  else if (r.has("cases")) throw ConfigError("config: 'cases' is only used by prob");
  if (const json* e = r.raw("experiment")) {
    if (!e->is_object()) throw ConfigError("config: experiment: expected an object");
    rc.experiment = *e;
  }
  rc.quadrature = read_quadrature(r);
  rc.inversion = read_inversion(r);
  rc.sim = read_sim(r);
  {
    const json empty = json::object();
    const json* o = r.raw("output");
    Reader ro(o ? *o : empty, "output", r.eff("output"));
    rc.output.path = ro.str("path", "");
    rc.output.format = ro.str("format", "csv", {"csv", "json"});
    ro.finish();
  }
  r.finish();
  return rc;
}

// ---------------------------------------------------------------------------
// Tables

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> meta;
};

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string config_hash(const RunConfig& rc) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", (unsigned long long)fnv1a64(rc.effective.dump()));
  return buf;
}

inline std::string version() {
#ifdef GSDD_VERSION
  return GSDD_VERSION;
#else
  return "unknown";
#endif
}

inline void write_csv(std::ostream& os, const Table& t, const RunConfig& rc) {
  os << "# gsdd " << version() << "\n";
  os << "# command=" << rc.command << "\n";
  os << "# config_hash=" << config_hash(rc) << "\n";
  os << "# seed=" << rc.sim.seed << "\n";
  for (auto& [k, v] : t.meta) os << "# " << k << "=" << v << "\n";
  for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt_num(row[i]);
    os << "\n";
  }
}

inline void write_json(std::ostream& os, const Table& t, const RunConfig& rc) {
  json j;
  j["format"] = "gsdd-table";
  j["version"] = version();
  j["command"] = rc.command;
  j["config_hash"] = config_hash(rc);
  j["seed"] = rc.sim.seed;
  j["columns"] = t.columns;
  j["rows"] = json::array();
  for (auto& row : t.rows) {
    json r = json::array();
    for (double v : row) {
      if (std::isfinite(v)) r.push_back(std::stod(fmt_num(v)));
      else r.push_back(nullptr);
    }
    j["rows"].push_back(r);
  }
  j["meta"] = json::object();
  for (auto& [k, v] : t.meta) j["meta"][k] = v;
  j["config"] = rc.effective;
  os << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Commands

struct RunOptions {
  bool with_mc = false;
  unsigned threads = 1;
  std::string records_path;
};

namespace detail {

struct Experiment {
  Reader r;
  Experiment(RunConfig& rc) : r(rc.experiment, "experiment", rc.effective["experiment"]) {}
};

inline Estimate hit_estimate(const std::vector<SimRecord>& recs) {
  return estimate(recs, [](const SimRecord& s) { return s.hit ? 1.0 : 0.0; });
}

}  // namespace detail

inline Table cmd_prob(RunConfig& rc, const RunOptions& opt) {
  detail::Experiment ex(rc);
  auto& r = ex.r;
  const double x0 = r.num("x", 1.0);
  std::string param = "x";
  Grid grid{{x0}};
  if (r.has("sweep")) {
    Reader sr(*r.raw("sweep"), "experiment.sweep", r.eff("sweep"));
    param = sr.str("param", "x", {"x", "c", "mu", "sigma", "lambda0", "alpha"});
    grid = grid_from(sr);
    sr.finish();
  }
  r.finish();
  Table t;
  t.columns.push_back(param);
  for (auto& c : rc.cases) t.columns.push_back("case_" + c.name);
  if (opt.with_mc)
    for (auto& c : rc.cases) {
      t.columns.push_back("mc_" + c.name);
      t.columns.push_back("mc_" + c.name + "_stderr");
    }
  const size_t nc = rc.cases.size(), ng = grid.values.size();
  std::vector<ProbabilityResult> res(ng * nc);
  auto model_at = [&](double v) { return param == "x" ? rc.model.build() : rc.model.build(param, v); };
  parallel_for(ng * nc, opt.threads, [&](size_t k) {
    const double v = grid.values[k / nc];
    res[k] = drawdown_probability_detailed(model_at(v), rc.cases[k % nc].spec, param == "x" ? v : x0,
                                           rc.quadrature);
  });
  int bad = 0;
  for (size_t i = 0; i < ng; ++i) {
    std::vector<double> row = {grid.values[i]};
    for (size_t c = 0; c < nc; ++c) {
      row.push_back(res[i * nc + c].value);
      bad += res[i * nc + c].out_of_range;
    }
    if (opt.with_mc) {
      const double v = grid.values[i];
      std::vector<DrawdownSpec> specs;
      for (auto& c : rc.cases) specs.push_back(c.spec);
      SimConfig sc = rc.sim;
      sc.threads = opt.threads;
      auto recs = simulate_drawdown_crn(model_at(v), specs, param == "x" ? v : x0, sc);
      for (size_t c = 0; c < nc; ++c) {
        auto e = estimate(recs, [c](const std::vector<SimRecord>& p) { return p[c].hit ? 1.0 : 0.0; });
        row.push_back(e.mean);
        row.push_back(e.stderr_);
      }
    }
    t.rows.push_back(row);
  }
  if (param != "x") t.meta.push_back({"x", fmt_num(x0)});
  for (auto& c : rc.cases) t.meta.push_back({"case_" + c.name, c.spec.describe()});
  if (bad) t.meta.push_back({"out_of_range", std::to_string(bad)});
  return t;
}

inline Table cmd_joint_density(RunConfig& rc, const RunOptions& opt) {
  detail::Experiment ex(rc);
  auto& r = ex.r;
  const double x = r.num("x", 1.0);
  Grid def;
  for (int k = 1; k <= 40; ++k) def.values.push_back(0.2 * k);
  auto t1 = read_grid(r, "t1", def), t2 = read_grid(r, "t2", def);
  r.finish();
  auto model = rc.model.build();
  JointDensity jd(model, rc.drawdown.spec, x, rc.inversion.cfg, rc.quadrature, rc.inversion.panel_width,
                  opt.threads);
  auto g = jd.grid(t1.values, t2.values);
  Table t;
  t.columns = {"t1", "t2", "density", "noise", "negative"};
  std::vector<double> mc;
  if (opt.with_mc) {
    // histogram density on cells centred at the grid points
    auto edges = [](const std::vector<double>& v) {
      std::vector<double> e(v.size() + 1);
      for (size_t i = 0; i < v.size(); ++i) {
        double lo = i ? 0.5 * (v[i - 1] + v[i]) : v[i] - 0.5 * (v.size() > 1 ? v[1] - v[0] : 1.0);
        e[i] = lo;
      }
      e.back() = v.back() + 0.5 * (v.size() > 1 ? v.back() - v[v.size() - 2] : 1.0);
      return e;
    };
    auto e1 = edges(t1.values), e2 = edges(t2.values);
    SimConfig sc = rc.sim;
    sc.threads = opt.threads;
    auto recs = simulate_drawdown(model, rc.drawdown.spec, x, sc);
    mc.assign(t1.values.size() * t2.values.size(), 0.0);
    for (auto& rec : recs) {
      if (!rec.hit) continue;
      auto i = std::upper_bound(e2.begin(), e2.end(), rec.ell) - e2.begin() - 1;
      auto j = std::upper_bound(e1.begin(), e1.end(), rec.tau) - e1.begin() - 1;
      if (i < 0 || j < 0 || i >= long(t2.values.size()) || j >= long(t1.values.size())) continue;
      mc[i * t1.values.size() + j] += 1.0 / ((e2[i + 1] - e2[i]) * (e1[j + 1] - e1[j]) * recs.size());
    }
    t.columns.push_back("mc_density");
  }
  int neg = 0;
  for (size_t k = 0; k < g.size(); ++k) {
    auto& p = g[k];
    std::vector<double> row = {p.t1, p.t2, p.value, p.noise, p.negative ? 1.0 : 0.0};
    neg += p.negative;
    if (opt.with_mc) row.push_back(mc[k]);
    t.rows.push_back(row);
  }
  t.meta.push_back({"drawdown", rc.drawdown.spec.describe()});
  t.meta.push_back({"inversion", jd.pointwise() ? "pointwise" : "factorised"});
  if (!jd.pointwise()) t.meta.push_back({"s_nodes", std::to_string(jd.s_nodes())});
  if (neg) t.meta.push_back({"negative_cells", std::to_string(neg)});
  return t;
}

inline Table cmd_exit(RunConfig& rc, const RunOptions& opt) {
  detail::Experiment ex(rc);
  auto& r = ex.r;
  const double x = r.num("x", 1.0), q = r.num("q", 0.0), lam = r.num("lambda", q);
  auto s = read_grid(r, "s");
  r.finish();
  auto model = rc.model.build();
  for (double v : s.values)
    if (!(v > x)) throw ConfigError("config: experiment.s: grid values must exceed x");
  DrawdownEngine<double> eng(model, rc.drawdown.spec, q, lam, x, rc.quadrature);
  Table t;
  t.columns = {"s", "exit_prob", "exit_prob_constrained", "creeping_density"};
  std::vector<std::vector<double>> rows(s.values.size());
  parallel_for(s.values.size(), opt.threads, [&](size_t i) {
    double v = s.values[i];
    rows[i] = {v, eng.exit(v), eng.exit_constrained(v), eng.creeping(v)};
  });
  t.rows = rows;
  t.meta.push_back({"drawdown", rc.drawdown.spec.describe()});
  return t;
}

inline PiecewiseConstant read_experiment_gamma(Reader& r) {
  const json* g = r.raw("gamma");
  if (!g) throw ConfigError(r.where("gamma") + "missing tax rate");
  return read_gamma(*g, r.child("gamma"), r.eff("gamma"));
}

inline Estimate transformed_estimate(const std::vector<TransformedRecord>& recs, double q, double lam) {
  auto f = discounted(q, lam);
  return estimate(recs, [&](const TransformedRecord& r) { return f(r.process); });
}

inline Table cmd_tax(RunConfig& rc, const RunOptions& opt) {
  detail::Experiment ex(rc);
  auto& r = ex.r;
  const double x = r.num("x", 1.0), q = r.num("q", 0.0), lam = r.num("lambda", q);
  auto gamma = read_experiment_gamma(r);
  auto s = read_grid(r, "s");
  const double y = r.num("y", 0.5 * x), z = r.num("z", 0.5);
  const bool total = r.flag("total", true);
  r.finish();
  auto model = rc.model.build();
  for (double v : s.values)
    if (!(v > x)) throw ConfigError("config: experiment.s: grid values must exceed x");
  TaxTransform<double> tx(model, gamma, q, lam, x, rc.quadrature);
  Table t;
  t.columns = {"s", "density", "atom", "creeping"};
  for (double v : s.values) t.rows.push_back({v, tx.density(v, y, z), tx.atom(v, z), tx.creeping(v)});
  t.meta.push_back({"y", fmt_num(y)});
  t.meta.push_back({"z", fmt_num(z)});
  if (total) t.meta.push_back({"ruin_transform", fmt_num(tx.total())});
  if (opt.with_mc) {
    SimConfig sc = rc.sim;
    sc.threads = opt.threads;
    auto e = transformed_estimate(simulate_tax(model, gamma, x, sc), q, lam);
    t.meta.push_back({"mc_ruin_transform", fmt_num(e.mean)});
    t.meta.push_back({"mc_ruin_transform_stderr", fmt_num(e.stderr_)});
  }
  return t;
}

inline Table cmd_dividend(RunConfig& rc, const RunOptions& opt) {
  detail::Experiment ex(rc);
  auto& r = ex.r;
  const double x = r.num("x", 1.0), q = r.num("q", 0.0), lam = r.num("lambda", q);
  const double b = r.num("barrier");
  auto s = read_grid(r, "s");
  const double y = r.num("y", 0.5 * x), z = r.num("z", 0.5);
  const bool total = r.flag("total", true);
  r.finish();
  auto model = rc.model.build();
  for (double v : s.values)
    if (!(v > x && v < b)) throw ConfigError("config: experiment.s: grid values must lie in (x, barrier)");
  DividendTransform<double> dv(model, b, q, lam, x, rc.quadrature);
  Table t;
  t.columns = {"s", "density", "atom", "creeping"};
  for (double v : s.values)
    t.rows.push_back({v, dv.density_below(v, y, z), dv.atom_below(v, z), dv.creeping_below(v)});
  // the last row carries the coefficients of the point mass at s = b
  t.rows.push_back({b, dv.density_at_barrier(y, z), dv.atom_at_barrier(z), dv.creeping_at_barrier()});
  t.meta.push_back({"y", fmt_num(y)});
  t.meta.push_back({"z", fmt_num(z)});
  t.meta.push_back({"barrier_mass", fmt_num(dv.barrier_mass())});
  if (total) t.meta.push_back({"ruin_transform", fmt_num(dv.total())});
  if (opt.with_mc) {
    SimConfig sc = rc.sim;
    sc.threads = opt.threads;
    auto e = transformed_estimate(simulate_dividend(model, b, x, sc), q, lam);
    t.meta.push_back({"mc_ruin_transform", fmt_num(e.mean)});
    t.meta.push_back({"mc_ruin_transform_stderr", fmt_num(e.stderr_)});
  }
  return t;
}

inline Table cmd_simulate(RunConfig& rc, const RunOptions& opt) {
  detail::Experiment ex(rc);
  auto& r = ex.r;
  const double x = r.num("x", 1.0), q = r.num("q", 0.0), lam = r.num("lambda", q);
  r.finish();
  auto model = rc.model.build();
  SimConfig sc = rc.sim;
  sc.threads = opt.threads;
  auto recs = simulate_drawdown(model, rc.drawdown.spec, x, sc);
  if (!opt.records_path.empty()) {
    std::ofstream out(opt.records_path);
    if (!out) throw ConfigError("cannot write records file '" + opt.records_path + "'");
    write_records_csv(out, recs);
  }
  auto hit = detail::hit_estimate(recs);
  auto disc = estimate(recs, discounted(q, lam));
  auto creep = estimate(recs, [](const SimRecord& s) { return s.hit && s.creeping ? 1.0 : 0.0; });
  auto cons = estimate(recs, [](const SimRecord& s) { return s.hit && s.constraint_ok ? 1.0 : 0.0; });
  Table t;
  t.columns = {"n_paths", "hit", "hit_stderr", "discounted", "discounted_stderr", "creeping",
               "hit_constraint_ok"};
  t.rows.push_back({double(recs.size()), hit.mean, hit.stderr_, disc.mean, disc.stderr_, creep.mean,
                    cons.mean});
  t.meta.push_back({"drawdown", rc.drawdown.spec.describe()});
  t.meta.push_back({"analytic_discounted", fmt_num(joint_laplace(model, rc.drawdown.spec, q, lam, x,
                                                                 rc.quadrature))});
  return t;
}

inline Table run_command(RunConfig& rc, const RunOptions& opt) {
  if (rc.command == "prob") return cmd_prob(rc, opt);
  if (rc.command == "joint-density") return cmd_joint_density(rc, opt);
  if (rc.command == "exit") return cmd_exit(rc, opt);
  if (rc.command == "tax") return cmd_tax(rc, opt);
  if (rc.command == "dividend") return cmd_dividend(rc, opt);
  return cmd_simulate(rc, opt);
}

}  // namespace gsdd::cli
