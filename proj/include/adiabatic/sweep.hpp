#pragma once

// Parameter-plane sweeps over (K, R) and the stroboscopic demonstration
// traces.  Every surface quantity has a closed form, so a sweep is pure
// arithmetic per grid point; rows land in preallocated slots in a fixed
// order (K-major, then R, then quantity name) regardless of thread count.

#include <adiabatic/conditions.hpp>
#include <adiabatic/propagate.hpp>
#include <adiabatic/spin.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace adiabatic {

template <class S = double>
std::vector<S> linspace(S a, S b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: need at least one point");
  std::vector<S> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<S>(i) / static_cast<S>(n - 1);
  v.back() = b;
  return v;
}

// Geometric spacing from a to b; both endpoints must be positive.
template <class S = double>
std::vector<S> logspace(S a, S b, int n) {
  if (!(a > S(0)) || !(b > S(0)))
    throw std::invalid_argument("logspace: endpoints must be positive");
  if (n < 1) throw std::invalid_argument("logspace: need at least one point");
  std::vector<S> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = a;
    return v;
  }
  const S la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        std::exp(la + (lb - la) * static_cast<S>(i) / static_cast<S>(n - 1));
  v.front() = a;
  v.back() = b;
  return v;
}

inline const std::vector<std::string>& known_quantities() {
  static const std::vector<std::string> q = {"c1", "f_min", "t_min", "tong_b", "wu_c3"};
  return q;
}

template <class S = double>
struct GridSpec {
  std::vector<S> k_values;
  std::vector<S> r_values;
  S omega1 = S(100);
  std::vector<std::string> quantities = known_quantities();
};

template <class S = double>
struct SweepRow {
  S k = S(0);
  S r = S(0);
  std::string quantity;
  S value = S(0);
  bool resonant = false;
};

template <class S = double>
struct SweepTable {
  GridSpec<S> grid;
  std::vector<SweepRow<S>> rows;
};

namespace detail {

template <class S>
void validate_grid(const GridSpec<S>& g) {
  if (g.k_values.empty() || g.r_values.empty())
    throw std::invalid_argument("sweep grid: k and r lists must be non-empty");
  for (S k : g.k_values)
    if (!(k >= S(0)) || !std::isfinite(k))
      throw std::invalid_argument("sweep grid: k values must be finite and >= 0");
  for (S r : g.r_values)
    if (!(r > S(0)) || !std::isfinite(r))
      throw std::invalid_argument("sweep grid: r values must be finite and > 0");
  if (!std::is_sorted(g.k_values.begin(), g.k_values.end()) ||
      !std::is_sorted(g.r_values.begin(), g.r_values.end()))
    throw std::invalid_argument("sweep grid: k and r lists must be sorted ascending");
  if (!(g.omega1 > S(0)) || !std::isfinite(g.omega1))
    throw std::invalid_argument("sweep grid: omega1 must be finite and > 0");
  if (g.quantities.empty())
    throw std::invalid_argument("sweep grid: quantity list must be non-empty");
  const auto& known = known_quantities();
  for (const auto& q : g.quantities)
    if (std::find(known.begin(), known.end(), q) == known.end())
      throw std::invalid_argument("sweep grid: unknown quantity '" + q + "'");
}

// Canonical per-point quantity order is lexicographic.
inline std::vector<std::string> canonical_quantities(std::vector<std::string> q) {
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  return q;
}

template <class S>
SweepRow<S> evaluate_cell(S k, S r, const std::string& quantity, S omega1) {
  const auto p = params_from_ratios(k, r, omega1);
  SweepRow<S> row;
  row.k = k;
  row.r = r;
  row.quantity = quantity;
  const WuResult<S> wu = wu_condition(p);
  row.resonant = wu.resonant;
  if (quantity == "c1")
    row.value = c1_traditional(p);
  else if (quantity == "f_min")
    row.value = f_min_closed(p);
  else if (quantity == "t_min")
    row.value = t_min(p);
  else if (quantity == "tong_b")
    row.value = tong_b_closed(p);
  else if (quantity == "wu_c3")
    row.value = wu.wu_c3;
  else
    throw std::invalid_argument("sweep: unknown quantity '" + quantity + "'");
  return row;
}

inline int jobs_from_env() {
  const char* s = std::getenv("ADIABATIC_PROBE_JOBS");
  if (s == nullptr || *s == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == nullptr || *end != '\0' || v < 0 || v > 4096) return 1;
  return static_cast<int>(v);
}

inline unsigned resolve_jobs(int jobs) {
  if (jobs < 0) throw std::invalid_argument("jobs must be >= 0");
  if (jobs == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
  }
  return static_cast<unsigned>(jobs);
}

}  // namespace detail

// Evaluates every requested quantity at every (K, R) grid point.  `jobs`
// selects the worker count (0 = hardware concurrency); the row order and
// every byte of the result are identical for any value.  Grid points are
// handed out through an atomic cursor and each row is written into its
// precomputed slot, so no ordering depends on scheduling.
template <class S = double>
SweepTable<S> surface_sweep(const GridSpec<S>& grid, int jobs = detail::jobs_from_env()) {
  detail::validate_grid(grid);
  const unsigned workers = detail::resolve_jobs(jobs);

  SweepTable<S> table;
  table.grid = grid;
  table.grid.quantities = detail::canonical_quantities(grid.quantities);

  const std::size_t nk = table.grid.k_values.size();
  const std::size_t nr = table.grid.r_values.size();
  const std::size_t nq = table.grid.quantities.size();
  const std::size_t n_points = nk * nr;
  table.rows.resize(n_points * nq);

  std::atomic<std::size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&]() {
    for (;;) {
      const std::size_t point = cursor.fetch_add(1, std::memory_order_relaxed);
      if (point >= n_points) return;
      const std::size_t ik = point / nr;
      const std::size_t ir = point % nr;
      try {
        for (std::size_t iq = 0; iq < nq; ++iq)
          table.rows[point * nq + iq] =
              detail::evaluate_cell(table.grid.k_values[ik], table.grid.r_values[ir],
                                    table.grid.quantities[iq], table.grid.omega1);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        cursor.store(n_points, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (workers <= 1 || n_points <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return table;
}

// Minimum fidelity and its time along a line of constant R.
template <class S = double>
SweepTable<S> slice_vs_k(S r, const std::vector<S>& k_values, S omega1 = S(100)) {
  GridSpec<S> g;
  g.k_values = k_values;
  g.r_values = {r};
  g.omega1 = omega1;
  g.quantities = {"f_min", "t_min"};
  return surface_sweep(g, 1);
}

// Same pair along a line of constant K.
template <class S = double>
SweepTable<S> slice_vs_r(S k, const std::vector<S>& r_values, S omega1 = S(100)) {
  GridSpec<S> g;
  g.k_values = {k};
  g.r_values = r_values;
  g.omega1 = omega1;
  g.quantities = {"f_min", "t_min"};
  return surface_sweep(g, 1);
}

template <class S = double>
struct DemoTrace {
  S k = S(0);
  FidelityTrace<S> strobo;  // pulse-sequence samples at t = n*tau
  FidelityTrace<S> dense;   // closed-form overlay on a fine time grid
};

// Stroboscopic pulse-sequence traces with a dense closed-form overlay,
// one entry per requested K at fixed R and omega0.
template <class S = double>
std::vector<DemoTrace<S>> demo_traces(S r, S omega0, const std::vector<S>& k_values,
                                      int n_cycles = 15, int dense_samples = 2001) {
  if (dense_samples < 2) throw std::invalid_argument("demo_traces: need >= 2 dense samples");
  std::vector<DemoTrace<S>> out;
  out.reserve(k_values.size());
  for (S k : k_values) {
    const auto p = params_from_omega0(k, r, omega0);
    const auto sched = make_schedule(p, n_cycles);
    DemoTrace<S> d;
    d.k = k;
    d.strobo = pulse_sequence_evolve(p, sched).trace;
    const S t_end = sched.tau * static_cast<S>(n_cycles);
    d.dense = fidelity_trace_closed(p, linspace(S(0), t_end, dense_samples));
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace adiabatic
