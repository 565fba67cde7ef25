#pragma once

// Self-check suite behind `adiabatic_probe validate`.  Each check exercises
// one cross-route agreement (closed form vs integrator, analytic criteria vs
// finite differences, serialization round-trip, ...) and reports pass/fail
// with a measured number, so a regression names the route that moved.

#include <adiabatic/conditions.hpp>
#include <adiabatic/propagate.hpp>
#include <adiabatic/serialize.hpp>
#include <adiabatic/spin.hpp>
#include <adiabatic/sweep.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace adiabatic {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

class CheckRunner {
 public:
  template <class Fn>
  void run(const std::string& name, Fn&& fn) {
    CheckResult res;
    res.name = name;
    try {
      fn(res);
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    results_.push_back(std::move(res));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::vector<CheckResult> results_;
};

template <class S>
void expect_below(CheckResult& res, S measured, S bound, const std::string& label) {
  res.pass = measured < bound;
  res.detail = label + " = " + format_number(measured) + " (bound " + format_number(bound) + ")";
}

}  // namespace detail

inline std::vector<CheckResult> run_validation(bool quick = false) {
  using P = FieldParams<double>;
  detail::CheckRunner runner;

  const std::vector<P> core_params = {
      {1700.0, 102.0, 1700.0}, {500.0, 100.0, 400.0}, {1700.0, 102.0, 17000.0}};

  runner.run("closed-state-unitarity", [&](CheckResult& res) {
    double worst = 0.0;
    for (const auto& p : core_params)
      for (int i = 0; i <= 300; ++i) {
        const double t = 3e-3 * i / 300.0;
        worst = std::max(worst, std::abs(exact_state(t, p).norm() - 1.0));
      }
    detail::expect_below(res, worst, 1e-12, "max | ||psi|| - 1 |");
  });

  runner.run("eigensystem-residual", [&](CheckResult& res) {
    double worst = 0.0;
    for (const auto& p : core_params)
      for (int i = 0; i <= 40; ++i) {
        const double t = 1.3e-3 * i / 40.0;
        const auto h = hamiltonian_matrix(t, p);
        const auto es = eigensystem(t, p);
        const double scale = h.norm();
        worst = std::max(worst, (h * es.v_plus - es.e_plus * es.v_plus).norm() / scale);
        worst = std::max(worst, (h * es.v_minus - es.e_minus * es.v_minus).norm() / scale);
      }
    detail::expect_below(res, worst, 1e-8, "max residual / ||H||");
  });

  runner.run("trace-vs-state-overlap", [&](CheckResult& res) {
    double worst = 0.0;
    for (const auto& p : core_params) {
      const auto times = linspace(0.0, 3e-3, 501);
      const auto trace = fidelity_trace_closed(p, times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double f = fidelity(eigensystem(times[i], p).v_plus, exact_state(times[i], p));
        worst = std::max(worst, std::abs(trace.values[i] - f));
      }
    }
    detail::expect_below(res, worst, 1e-10, "max |closed - overlap|");
  });

  runner.run("integrator-vs-closed", [&](CheckResult& res) {
    // Run well below the default step: this checks that the integrator
    // route converges onto the closed form, not what the default step
    // resolves (the dense-trace checks cover that at their own bound).
    const P p{1700.0, 102.0, 1700.0};
    const auto times = linspace(0.0, 5e-3, 101);
    const auto prop =
        evolve(p, 5e-3, default_dt(p, times[1] - times[0]) / 8.0, times);
    const auto closed = fidelity_trace_closed(p, times);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
      worst = std::max(worst, std::abs(prop.trace.values[i] - closed.values[i]));
    detail::expect_below(res, worst, 1e-5, "max |integrator - closed|");
  });

  runner.run("pulse-strobo-vs-closed", [&](CheckResult& res) {
    double worst = 0.0;
    for (double k : {1.0, 10.0}) {
      const auto p = params_from_omega0(k, 0.06, 1700.0);
      const auto prop = pulse_sequence_evolve(p, make_schedule(p, 15));
      const auto closed = fidelity_trace_closed(p, prop.trace.times);
      for (std::size_t i = 0; i < closed.values.size(); ++i)
        worst = std::max(worst, std::abs(prop.trace.values[i] - closed.values[i]));
    }
    detail::expect_below(res, worst, 2e-3, "max strobo deviation");
  });

  runner.run("fmin-vs-dense-closed", [&](CheckResult& res) {
    double worst = 0.0;
    for (double k : {0.75, 1.0, 10.0}) {
      const auto p = params_from_omega0(k, 0.06, 1700.0);
      const auto times = linspace(0.0, 1.0 / effective_frequency(p), 10001);
      double lo = 2.0;
      for (double t : times) lo = std::min(lo, fidelity_closed(t, p));
      worst = std::max(worst, std::abs(lo - f_min_closed(p)));
    }
    detail::expect_below(res, worst, 1e-6, "max |dense min - f_min|");
  });

  runner.run("schedule-constants", [&](CheckResult& res) {
    double worst = 0.0;
    for (double w : {1700.0, 850.0, 17000.0}) {
      const P p{w, 0.06 * w, w};
      const auto s = make_schedule(p, 15);
      worst = std::max(worst, std::abs(s.delta_t * 72.0 * p.omega_prime - 1.0));
      worst = std::max(worst, std::abs(s.phase_step * 72.0 - two_pi<double>));
      worst = std::max(worst, std::abs(s.tau - 72.0 * s.delta_t));
    }
    detail::expect_below(res, worst, 1e-12, "max schedule identity error");
  });

  runner.run("criteria-numeric-vs-closed", [&](CheckResult& res) {
    std::vector<std::pair<double, double>> points = {{1.0, 0.06}};
    if (!quick) {
      points.emplace_back(10.0, 0.06);
      points.emplace_back(0.7, 0.3);
      points.emplace_back(2.5, 0.15);
    }
    double worst = 0.0;
    for (auto [k, r] : points) {
      const auto p = params_from_ratios(k, r);
      const auto closed = full_report(p);
      const auto numeric = numeric_report(p);
      const auto rel = [](double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
      };
      worst = std::max({worst, rel(closed.c1, numeric.c1), rel(closed.tong_b, numeric.tong_b),
                        rel(closed.tong_c, numeric.tong_c), rel(closed.wu_c3, numeric.wu_c3)});
    }
    detail::expect_below(res, worst, 1e-6, "max rel diff across criteria");
  });

  runner.run("sweep-determinism", [&](CheckResult& res) {
    GridSpec<double> g;
    g.k_values = logspace(0.3, 3.0, quick ? 5 : 8);
    g.r_values = linspace(0.05, 0.3, quick ? 5 : 8);
    const std::string a = to_csv(surface_sweep(g, 1));
    const std::string b = to_csv(surface_sweep(g, 4));
    res.pass = a == b;
    res.detail = res.pass ? "jobs=1 and jobs=4 outputs byte-identical"
                          : "outputs differ between jobs=1 and jobs=4";
  });

  runner.run("serialization-roundtrip", [&](CheckResult& res) {
    GridSpec<double> g;
    g.k_values = {0.5, 1.0036, 2.0};
    g.r_values = {0.06, 0.2};
    const auto table = surface_sweep(g, 1);
    const auto back = sweep_from_json<double>(to_json(table));
    bool ok = back.rows.size() == table.rows.size();
    for (std::size_t i = 0; ok && i < table.rows.size(); ++i) {
      const auto& x = table.rows[i];
      const auto& y = back.rows[i];
      ok = x.k == y.k && x.r == y.r && x.quantity == y.quantity && x.resonant == y.resonant &&
           (x.value == y.value || (std::isinf(x.value) && std::isinf(y.value)));
    }
    res.pass = ok;
    res.detail = ok ? "JSON round-trip exact on " + std::to_string(table.rows.size()) + " rows"
                    : "JSON round-trip mismatch";
  });

  if (!quick) {
    runner.run("tmin-argmin", [&](CheckResult& res) {
      const auto p = params_from_ratios(0.75, 0.05);
      const double period = 1.0 / effective_frequency(p);
      const auto times = linspace(0.0, period, 20001);
      std::size_t arg = 0;
      double lo = 2.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double f = fidelity_closed(times[i], p);
        if (f < lo) {
          lo = f;
          arg = i;
        }
      }
      detail::expect_below(res, std::abs(times[arg] - t_min(p)), 2.0 * (times[1] - times[0]),
                           "|argmin - t_min|");
    });

    runner.run("fmin-vs-integrator", [&](CheckResult& res) {
      const auto p = params_from_omega0(10.0, 0.06, 1700.0);
      const auto times = linspace(0.0, 1.0 / effective_frequency(p), 2001);
      const auto prop = evolve(p, times.back(), default_dt(p, times[1] - times[0]), times);
      const double lo = *std::min_element(prop.trace.values.begin(), prop.trace.values.end());
      detail::expect_below(res, std::abs(lo - f_min_closed(p)), 1e-4, "|integrator min - f_min|");
    });
  }

  return runner.take();
}

inline bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& c) { return c.pass; });
}

}  // namespace adiabatic
