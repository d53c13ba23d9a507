// Drawdown probabilities for the four linear drawdown cases under the
// compound Poisson model, checked against a short simulation.

#include <cstdio>

#include "gsdd/gerber_shiu.hpp"
#include "gsdd/mc_oracle.hpp"

int main() {
  using namespace gsdd;
  LevyModel model(CramerLundberg{1.1, 2.0, 2.0});
  const double x = 1.0;
  struct Case {
    const char* name;
    DrawdownSpec spec;
  } cases[] = {{"I", DrawdownSpec::zero()},
               {"II", DrawdownSpec::linear(0.3, 0.5)},
               {"III", DrawdownSpec::linear(0.5, 0.5)},
               {"IV", DrawdownSpec::linear(0.6, 0.5)}};

  SimConfig sim;
  sim.n_paths = 20000;
  std::printf("%-4s %-28s %10s %10s %8s\n", "case", "drawdown", "analytic", "mc", "stderr");
  for (auto& c : cases) {
    double p = drawdown_probability(model, c.spec, x);
    auto e = estimate(simulate_drawdown(model, c.spec, x, sim),
                      [](const SimRecord& r) { return r.hit ? 1.0 : 0.0; });
    std::printf("%-4s %-28s %10.6f %10.6f %8.5f\n", c.name, c.spec.describe().c_str(), p, e.mean,
                e.stderr_);
  }

  // discounting before and after the last maximum
  auto spec = DrawdownSpec::linear(0.6, 0.5);
  for (double q : {0.0, 0.1, 0.5})
    std::printf("E[exp(-%.1f ell - 0.2 (tau - ell))] = %.6f\n", q, joint_laplace(model, spec, q, 0.2, x));
}
