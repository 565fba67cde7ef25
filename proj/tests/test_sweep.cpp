#include <doctest.h>

#include <adiabatic/conditions.hpp>
#include <adiabatic/serialize.hpp>
#include <adiabatic/spin.hpp>
#include <adiabatic/sweep.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

using namespace adiabatic;

namespace {

const SweepRow<double>& find_row(const SweepTable<double>& t, double k, double r,
                                 const std::string& q) {
  for (const auto& row : t.rows)
    if (row.k == k && row.r == r && row.quantity == q) return row;
  FAIL("row not found: k=" << k << " r=" << r << " q=" << q);
  return t.rows.front();
}

}  // namespace

TEST_CASE("linspace endpoints, spacing, and argument checking") {
  const auto v = linspace(0.0, 1.0, 5);
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 1.0);
  CHECK(v[2] == doctest::Approx(0.5).epsilon(1e-15));

  const auto single = linspace(3.5, 9.0, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 3.5);

  CHECK_THROWS_AS(linspace(0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(linspace(0.0, 1.0, -3), std::invalid_argument);
}

TEST_CASE("logspace endpoints, geometric spacing, and argument checking") {
  const auto v = logspace(0.1, 10.0, 3);
  REQUIRE(v.size() == 3);
  CHECK(v.front() == 0.1);
  CHECK(v.back() == 10.0);
  CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-14));

  // Consecutive ratios are equal.
  const auto w = logspace(0.2, 5.0, 7);
  for (std::size_t i = 2; i < w.size(); ++i)
    CHECK(w[i] / w[i - 1] == doctest::Approx(w[1] / w[0]).epsilon(1e-12));

  CHECK_THROWS_AS(logspace(0.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(logspace(-1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(logspace(0.1, 1.0, 0), std::invalid_argument);
}

TEST_CASE("single-point sweep matches direct closed-form evaluation") {
  GridSpec<double> g;
  g.k_values = {1.0};
  g.r_values = {0.06};
  const auto table = surface_sweep(g, 1);

  REQUIRE(table.rows.size() == 5);
  // Canonical quantity order is lexicographic.
  CHECK(table.rows[0].quantity == "c1");
  CHECK(table.rows[1].quantity == "f_min");
  CHECK(table.rows[2].quantity == "t_min");
  CHECK(table.rows[3].quantity == "tong_b");
  CHECK(table.rows[4].quantity == "wu_c3");

  const auto p = params_from_ratios(1.0, 0.06, 100.0);
  CHECK(table.rows[0].value == c1_traditional(p));
  CHECK(table.rows[1].value == f_min_closed(p));
  CHECK(table.rows[2].value == t_min(p));
  CHECK(table.rows[3].value == tong_b_closed(p));
  CHECK(table.rows[4].value == wu_condition(p).wu_c3);

  CHECK(table.rows[0].value == doctest::Approx(0.02989238740534077).epsilon(1e-14));
  CHECK(table.rows[1].value == doctest::Approx(0.05989229072794672).epsilon(1e-14));
  CHECK(table.rows[2].value == 0.005);  // 1 / (2 * omega1) at K = 1
  CHECK(table.rows[3].value == doctest::Approx(0.18748224447746265).epsilon(1e-14));
  CHECK(table.rows[4].value == doctest::Approx(8.333333333333222).epsilon(1e-13));

  for (const auto& row : table.rows) {
    CHECK(row.k == 1.0);
    CHECK(row.r == 0.06);
    CHECK_FALSE(row.resonant);
  }
}

TEST_CASE("row order is K-major, then R, then quantity") {
  GridSpec<double> g;
  g.k_values = {0.5, 2.0};
  g.r_values = {0.06, 0.2};
  g.quantities = {"f_min", "c1"};  // deliberately out of order
  const auto table = surface_sweep(g, 1);

  REQUIRE((table.grid.quantities == std::vector<std::string>{"c1", "f_min"}));
  REQUIRE(table.rows.size() == 8);

  const std::vector<std::tuple<double, double, std::string>> expect = {
      {0.5, 0.06, "c1"}, {0.5, 0.06, "f_min"}, {0.5, 0.2, "c1"}, {0.5, 0.2, "f_min"},
      {2.0, 0.06, "c1"}, {2.0, 0.06, "f_min"}, {2.0, 0.2, "c1"}, {2.0, 0.2, "f_min"},
  };
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(table.rows[i].k == std::get<0>(expect[i]));
    CHECK(table.rows[i].r == std::get<1>(expect[i]));
    CHECK(table.rows[i].quantity == std::get<2>(expect[i]));
  }
}

TEST_CASE("duplicate quantities collapse to one row each") {
  GridSpec<double> g;
  g.k_values = {0.8};
  g.r_values = {0.1};
  g.quantities = {"f_min", "f_min", "c1", "c1"};
  const auto table = surface_sweep(g, 1);
  REQUIRE((table.grid.quantities == std::vector<std::string>{"c1", "f_min"}));
  CHECK(table.rows.size() == 2);
}

TEST_CASE("sweep flags the resonance locus and reports an infinite ratio there") {
  // 256/1024 = 0.25 and 1088/1024 = 1.0625 are exact in binary, so the
  // resonance denominator cancels to zero identically.
  GridSpec<double> g;
  g.k_values = {1.0625};
  g.r_values = {0.25};
  g.omega1 = 256.0;
  const auto table = surface_sweep(g, 1);

  REQUIRE(table.rows.size() == 5);
  for (const auto& row : table.rows) CHECK(row.resonant);

  const auto& wu = find_row(table, 1.0625, 0.25, "wu_c3");
  CHECK(std::isinf(wu.value));
  CHECK(wu.value > 0.0);

  // The fidelity floor collapses on the same locus.
  const auto& fm = find_row(table, 1.0625, 0.25, "f_min");
  CHECK(fm.value < 1e-15);
}

TEST_CASE("slice along K at fixed R dips at K = 1 + R^2") {
  auto ks = linspace(0.9, 1.1, 21);
  ks.push_back(1.0025);  // = 1 + 0.05^2
  std::sort(ks.begin(), ks.end());

  const auto table = slice_vs_k(0.05, ks);
  REQUIRE((table.grid.quantities == std::vector<std::string>{"f_min", "t_min"}));
  REQUIRE(table.rows.size() == 2 * ks.size());

  double best = 2.0, best_k = -1.0;
  for (const auto& row : table.rows) {
    if (row.quantity != "f_min") continue;
    if (row.value < best) {
      best = row.value;
      best_k = row.k;
    }
  }
  CHECK(best_k == 1.0025);
  CHECK(best < 1e-12);

  CHECK(find_row(table, 1.0025, 0.05, "f_min").resonant);
  CHECK_FALSE(find_row(table, 1.0, 0.05, "f_min").resonant);
  CHECK(find_row(table, 1.0, 0.05, "f_min").value ==
        doctest::Approx(0.04993761694389224).epsilon(1e-13));
  // Immediate neighbours of the dip are already well off the floor.
  CHECK(find_row(table, 1.01, 0.05, "f_min").value > 0.1);
}

TEST_CASE("slice along R at K = 1 follows sin(arctan R)") {
  const auto rs = linspace(0.05, 0.3, 6);
  const auto table = slice_vs_r(1.0, rs);

  std::vector<double> fmin;
  for (const auto& row : table.rows)
    if (row.quantity == "f_min") fmin.push_back(row.value);
  REQUIRE(fmin.size() == rs.size());

  for (std::size_t i = 0; i < rs.size(); ++i)
    CHECK(fmin[i] == doctest::Approx(std::sin(std::atan(rs[i]))).epsilon(1e-12));
  CHECK(std::is_sorted(fmin.begin(), fmin.end()));
  CHECK(fmin.front() == doctest::Approx(0.04993761694389224).epsilon(1e-13));
  CHECK(fmin.back() == doctest::Approx(0.28734788556634544).epsilon(1e-13));
}

TEST_CASE("sweep output is identical for any worker count") {
  GridSpec<double> g;
  g.k_values = logspace(0.2, 5.0, 12);
  g.r_values = linspace(0.05, 0.3, 9);
  const std::string serial = to_csv(surface_sweep(g, 1));
  CHECK(to_csv(surface_sweep(g, 4)) == serial);
  CHECK(to_csv(surface_sweep(g, 0)) == serial);  // hardware concurrency
  CHECK(to_json(surface_sweep(g, 3)) == to_json(surface_sweep(g, 1)));
}

TEST_CASE("worker count can come from the environment") {
  GridSpec<double> g;
  g.k_values = {0.5, 1.5};
  g.r_values = {0.1, 0.2};

  setenv("ADIABATIC_PROBE_JOBS", "3", 1);
  CHECK(detail::jobs_from_env() == 3);
  CHECK(to_csv(surface_sweep(g)) == to_csv(surface_sweep(g, 1)));

  setenv("ADIABATIC_PROBE_JOBS", "not-a-number", 1);
  CHECK(detail::jobs_from_env() == 1);
  setenv("ADIABATIC_PROBE_JOBS", "-2", 1);
  CHECK(detail::jobs_from_env() == 1);
  setenv("ADIABATIC_PROBE_JOBS", "99999", 1);
  CHECK(detail::jobs_from_env() == 1);
  unsetenv("ADIABATIC_PROBE_JOBS");
  CHECK(detail::jobs_from_env() == 1);
}

TEST_CASE("grid validation rejects malformed requests") {
  GridSpec<double> ok;
  ok.k_values = {1.0};
  ok.r_values = {0.1};

  auto bad = ok;
  bad.k_values.clear();
  CHECK_THROWS_AS(surface_sweep(bad, 1), std::invalid_argument);

  bad = ok;
  bad.r_values.clear();
  CHECK_THROWS_AS(surface_sweep(bad, 1), std::invalid_argument);

  bad = ok;
  bad.k_values = {2.0, 1.0};
  CHECK_THROWS_AS(surface_sweep(bad, 1), std::invalid_argument);

  bad = ok;
  bad.k_values = {-0.5};
  CHECK_THROWS_AS(surface_sweep(bad, 1), std::invalid_argument);

  bad = ok;
  bad.r_values = {0.0};
  CHECK_THROWS_AS(surface_sweep(bad, 1), std::invalid_argument);

  bad = ok;
  bad.omega1 = 0.0;
  CHECK_THROWS_AS(surface_sweep(bad, 1), std::invalid_argument);

  bad = ok;
  bad.quantities = {"banana"};
  CHECK_THROWS_AS(surface_sweep(bad, 1), std::invalid_argument);

  bad = ok;
  bad.quantities.clear();
  CHECK_THROWS_AS(surface_sweep(bad, 1), std::invalid_argument);

  CHECK_THROWS_AS(surface_sweep(ok, -1), std::invalid_argument);
}

TEST_CASE("swept fidelity floor agrees with a dense integrator minimum") {
  const std::vector<std::pair<double, double>> points = {
      {0.75, 0.05}, {1.0, 0.1}, {1.3, 0.2}};
  for (const auto& [k, r] : points) {
    const auto p = params_from_ratios(k, r, 100.0);
    const auto times = linspace(0.0, 1.0 / effective_frequency(p), 4001);
    const auto prop = evolve(p, times.back(), default_dt(p, times[1] - times[0]), times);
    const double lo = *std::min_element(prop.trace.values.begin(), prop.trace.values.end());

    GridSpec<double> g;
    g.k_values = {k};
    g.r_values = {r};
    g.quantities = {"f_min"};
    const auto table = surface_sweep(g, 1);
    CHECK(std::abs(table.rows[0].value - lo) < 1e-4);
  }
}

TEST_CASE("demonstration traces pair stroboscopic pulses with a dense overlay") {
  const auto traces = demo_traces(0.06, 1700.0, {1.0, 10.0});
  REQUIRE(traces.size() == 2);

  const auto& slow = traces[0];
  CHECK(slow.k == 1.0);
  REQUIRE(slow.strobo.times.size() == 16);
  CHECK(slow.strobo.values[0] == 1.0);
  const double slow_min =
      *std::min_element(slow.strobo.values.begin(), slow.strobo.values.end());
  CHECK(slow_min == doctest::Approx(0.08702472908537408).epsilon(1e-9));
  CHECK(slow_min < 0.1);

  REQUIRE(slow.dense.times.size() == 2001);
  CHECK(slow.dense.times.front() == 0.0);
  CHECK(slow.dense.times.back() ==
        doctest::Approx(15.0 / 1700.0).epsilon(1e-14));
  const double dense_min =
      *std::min_element(slow.dense.values.begin(), slow.dense.values.end());
  CHECK(dense_min == doctest::Approx(0.05989229072794672).epsilon(1e-4));

  const auto& fast = traces[1];
  CHECK(fast.k == 10.0);
  REQUIRE(fast.strobo.times.size() == 16);
  const double fast_min =
      *std::min_element(fast.strobo.values.begin(), fast.strobo.values.end());
  CHECK(fast_min == doctest::Approx(0.99778365850031503).epsilon(1e-9));
  for (double f : fast.strobo.values) CHECK(f > 0.99);

  CHECK_THROWS_AS(demo_traces(0.06, 1700.0, {1.0}, 15, 1), std::invalid_argument);
}
