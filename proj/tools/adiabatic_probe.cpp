// Command-line front end: fidelity traces, (K, R) sweeps, adiabaticity
// condition reports and the self-check suite.  Exit codes: 0 success,
// 1 numeric failure, 2 usage error.

#include <adiabatic/conditions.hpp>
#include <adiabatic/propagate.hpp>
#include <adiabatic/serialize.hpp>
#include <adiabatic/spin.hpp>
#include <adiabatic/sweep.hpp>
#include <adiabatic/validate.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using adiabatic::FieldParams;

struct ParamFlags {
  double k = 0, r = 0, omega0 = 0, omega1 = 0, omega_prime = 0;
  CLI::Option *ok = nullptr, *orr = nullptr, *o0 = nullptr, *o1 = nullptr, *op = nullptr;

  void attach(CLI::App* cmd) {
    ok = cmd->add_option("--k", k, "Drive ratio K = omega'/omega0");
    orr = cmd->add_option("--r", r, "Field ratio R = omega1/omega0");
    o0 = cmd->add_option("--omega0", omega0, "Static field frequency, Hz");
    o1 = cmd->add_option("--omega1", omega1, "Rotating field frequency, Hz");
    op = cmd->add_option("--omega-prime", omega_prime, "Drive frequency, Hz");
  }

  // Explicit frequencies win over ratios; ratios fill whatever is missing,
  // with omega1 = 100 Hz as the scale of last resort.  Over-specified but
  // inconsistent combinations are usage errors.
  FieldParams<double> resolve() const {
    const bool hk = ok->count() > 0, hr = orr->count() > 0;
    const bool h0 = o0->count() > 0, h1 = o1->count() > 0, hp = op->count() > 0;
    if (h0 && h1 && hp) {
      FieldParams<double> p{omega0, omega1, omega_prime};
      adiabatic::require_valid(p);
      return p;
    }
    double w0 = 0;
    if (h0) {
      w0 = omega0;
    } else if (hk && hp) {
      if (!(k > 0)) throw std::invalid_argument("need --k > 0 to derive omega0 from omega-prime");
      w0 = omega_prime / k;
    } else if (hr && h1) {
      if (!(r > 0)) throw std::invalid_argument("with --r 0, pass --omega0 explicitly");
      w0 = omega1 / r;
    } else if (hr) {
      if (!(r > 0)) throw std::invalid_argument("with --r 0, pass --omega0 explicitly");
      w0 = 100.0 / r;  // default omega1 = 100 Hz sets the scale
    } else {
      throw std::invalid_argument(
          "underdetermined parameters: give --omega0, or --k with --omega-prime, or --r");
    }
    double w1;
    if (h1)
      w1 = omega1;
    else if (hr)
      w1 = r * w0;
    else
      throw std::invalid_argument("underdetermined parameters: give --r or --omega1");
    double wp;
    if (hp)
      wp = omega_prime;
    else if (hk)
      wp = k * w0;
    else
      throw std::invalid_argument("underdetermined parameters: give --k or --omega-prime");

    const auto inconsistent = [](double given, double derived) {
      const double scale = std::max(std::abs(given), std::abs(derived));
      return std::abs(given - derived) > 1e-9 * std::max(scale, 1.0);
    };
    if (hr && h1 && inconsistent(omega1, r * w0))
      throw std::invalid_argument("inconsistent parameters: omega1 != r * omega0");
    if (hk && hp && inconsistent(omega_prime, k * w0))
      throw std::invalid_argument("inconsistent parameters: omega-prime != k * omega0");

    FieldParams<double> p{w0, w1, wp};
    adiabatic::require_valid(p);
    return p;
  }
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
  if (!out.flush()) throw std::runtime_error("failed writing output file: " + path);
}

// "a:b:n" -> n values from a to b, geometric or linear.
std::vector<double> parse_range(const std::string& text, bool log_spaced) {
  const auto first = text.find(':');
  const auto second = text.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos ||
      text.find(':', second + 1) != std::string::npos)
    throw std::invalid_argument("malformed range '" + text + "', expected a:b:n");
  const auto number = [&](std::size_t lo, std::size_t hi) {
    double v = 0;
    const char* b = text.data() + lo;
    const char* e = text.data() + hi;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
      throw std::invalid_argument("malformed range '" + text + "', expected a:b:n");
    return v;
  };
  const double a = number(0, first);
  const double b = number(first + 1, second);
  int n = 0;
  {
    const char* s = text.data() + second + 1;
    const char* e = text.data() + text.size();
    const auto res = std::from_chars(s, e, n);
    if (res.ec != std::errc() || res.ptr != e || n < 1)
      throw std::invalid_argument("malformed range '" + text + "', expected a:b:n with n >= 1");
  }
  return log_spaced ? adiabatic::logspace(a, b, n) : adiabatic::linspace(a, b, n);
}

int cmd_trace(const ParamFlags& flags, int cycles, bool has_cycles, double t_end, bool has_t_end,
              const std::string& method, const std::string& out, const std::string& format) {
  const auto p = flags.resolve();
  if (has_cycles == has_t_end)
    throw std::invalid_argument("pass exactly one of --cycles and --t-end");
  if (method == "pulse" && !has_cycles)
    throw std::invalid_argument("--method pulse is stroboscopic: pass --cycles");

  std::vector<double> times;
  if (has_cycles) {
    if (cycles < 0) throw std::invalid_argument("--cycles must be >= 0");
    const auto sched = adiabatic::make_schedule(p, cycles);
    times.resize(static_cast<std::size_t>(cycles) + 1);
    for (int n = 0; n <= cycles; ++n) times[static_cast<std::size_t>(n)] = sched.tau * n;
  } else {
    if (!(t_end > 0)) throw std::invalid_argument("--t-end must be > 0");
    times = adiabatic::linspace(0.0, t_end, 2001);
  }

  adiabatic::FidelityTrace<double> trace;
  if (method == "closed") {
    trace = adiabatic::fidelity_trace_closed(p, times);
  } else if (method == "integrator") {
    const double spacing = times.size() > 1 ? times[1] - times[0] : times.back();
    const auto prop =
        adiabatic::evolve(p, times.back(), adiabatic::default_dt(p, spacing), times);
    if (prop.dt_warning)
      std::cerr << "warning: integrator step exceeds a tenth of the shortest period\n";
    trace = prop.trace;
  } else {
    trace = adiabatic::pulse_sequence_evolve(p, adiabatic::make_schedule(p, cycles)).trace;
  }

  write_output(out, format == "json" ? adiabatic::to_json(trace) : adiabatic::to_csv(trace));
  return 0;
}

int cmd_sweep(const std::string& k_range, const std::string& r_range, double omega1,
              const std::vector<std::string>& quantities, int jobs, const std::string& out,
              const std::string& format) {
  adiabatic::GridSpec<double> grid;
  grid.k_values = parse_range(k_range, true);
  grid.r_values = parse_range(r_range, false);
  grid.omega1 = omega1;
  if (!quantities.empty()) grid.quantities = quantities;
  const auto table = adiabatic::surface_sweep(grid, jobs);
  write_output(out, format == "json" ? adiabatic::to_json(table) : adiabatic::to_csv(table));
  return 0;
}

int cmd_conditions(const ParamFlags& flags, double horizon, bool has_horizon,
                   const std::string& out, const std::string& format) {
  const auto p = flags.resolve();
  if (has_horizon && !(horizon > 0)) throw std::invalid_argument("--horizon must be > 0");
  const auto rep = has_horizon ? adiabatic::full_report(p, horizon) : adiabatic::full_report(p);
  write_output(out, format == "csv" ? adiabatic::to_csv(rep, p) : adiabatic::to_json(rep, p));
  return 0;
}

int cmd_validate(bool quick) {
  const auto results = adiabatic::run_validation(quick);
  for (const auto& res : results)
    std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << res.name << " — " << res.detail << "\n";
  const bool ok = adiabatic::all_passed(results);
  std::cout << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level adiabatic dynamics probe"};
  app.require_subcommand(1);
  std::function<int()> action;

  auto* trace = app.add_subcommand("trace", "Fidelity-vs-time trace by one of three methods");
  ParamFlags trace_params;
  trace_params.attach(trace);
  int cycles = 0;
  double t_end = 0;
  std::string method = "closed", trace_out = "-", trace_format = "csv";
  auto* cycles_opt = trace->add_option("--cycles", cycles, "Sample stroboscopically at t = n tau");
  auto* t_end_opt = trace->add_option("--t-end", t_end, "Sample densely on [0, t-end] seconds");
  trace->add_option("--method", method, "closed | integrator | pulse")
      ->check(CLI::IsMember({"closed", "integrator", "pulse"}));
  trace->add_option("--out", trace_out, "Output path, - for stdout");
  trace->add_option("--format", trace_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  trace->callback([&]() {
    action = [&, cycles_opt, t_end_opt]() {
      return cmd_trace(trace_params, cycles, cycles_opt->count() > 0, t_end,
                       t_end_opt->count() > 0, method, trace_out, trace_format);
    };
  });

  auto* sweep = app.add_subcommand("sweep", "Evaluate surface quantities on a (K, R) grid");
  std::string k_range, r_range, sweep_out = "-", sweep_format = "csv";
  double sweep_omega1 = 100.0;
  std::vector<std::string> quantities;
  int jobs = adiabatic::detail::jobs_from_env();
  sweep->add_option("--k-range", k_range, "K grid as a:b:n, log-spaced")->required();
  sweep->add_option("--r-range", r_range, "R grid as a:b:n, linear")->required();
  sweep->add_option("--omega1", sweep_omega1, "Rotating field frequency, Hz");
  sweep->add_option("--quantities", quantities,
                    "Subset of c1,f_min,t_min,tong_b,wu_c3 (default: all)")
      ->delimiter(',');
  sweep->add_option("--jobs", jobs, "Worker threads; 0 = hardware concurrency")
      ->check(CLI::Range(0, 4096));
  sweep->add_option("--out", sweep_out, "Output path, - for stdout");
  sweep->add_option("--format", sweep_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->callback([&]() {
    action = [&]() {
      return cmd_sweep(k_range, r_range, sweep_omega1, quantities, jobs, sweep_out, sweep_format);
    };
  });

  auto* conditions =
      app.add_subcommand("conditions", "Adiabaticity condition report at one parameter point");
  ParamFlags cond_params;
  cond_params.attach(conditions);
  double horizon = 0;
  std::string cond_out = "-", cond_format = "json";
  auto* horizon_opt =
      conditions->add_option("--horizon", horizon, "Integration horizon T, seconds");
  conditions->add_option("--out", cond_out, "Output path, - for stdout");
  conditions->add_option("--format", cond_format, "json | csv")
      ->check(CLI::IsMember({"csv", "json"}));
  conditions->callback([&]() {
    action = [&, horizon_opt]() {
      return cmd_conditions(cond_params, horizon, horizon_opt->count() > 0, cond_out, cond_format);
    };
  });

  auto* validate = app.add_subcommand("validate", "Run the cross-route self-check suite");
  bool quick = false;
  validate->add_flag("--quick", quick, "Fast subset of the checks");
  validate->callback([&]() {
    action = [&]() { return cmd_validate(quick); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return action();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
