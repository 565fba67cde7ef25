#pragma once

// Adiabaticity criteria for the rotating-field problem, each available two
// ways: closed forms derived from the analytic eigensystem, and an
// independent numerical pipeline built only from finite differences of
// eigensystem() plus adaptive quadrature.  With theta = arctan R:
//
//   C1      = |<E+|dE->/dt| / gap            = K R / (2 (1+R^2))
//   Tong B  = int_0^T |d/dt(<E+|dE->/gap)|   = pi K sin(theta) cos^2(theta)
//   Tong C  = int_0^T |<E+|dE-><E-|dE+>|/gap = (pi/2) K sin^2(theta) cos(theta)
//   Wu den  = gap + i<E-|dE-> - i<E+|dE+>    = 2pi (w0 (1+R^2) - w') / sqrt(1+R^2)
//   Wu C3   = |<E+|dE->| / |Wu den|          = K R / (2 |1+R^2 - K|)
//
// The Tong integrands live in the parallel-transport gauge <m|dm> = 0; the
// Wu denominator also carries d/dt arg<E+|dE->, which is identically zero
// here because that argument is constant in the fixed gauge (asserted
// numerically, not assumed).  The denominator vanishes on the resonance
// locus K = 1 + R^2, where C3 is reported as +infinity with a flag rather
// than as an error.  The horizon is T = 1/w' (one rf revolution).

#include <adiabatic/spin.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <tuple>

namespace adiabatic {

namespace detail {

/// Recursive adaptive Simpson with absolute-scale tolerance.
template <class S, class F>
S simpson_segment(const F& f, S a, S b, S fa, S fm, S fb, S whole, S tol,
                  int depth) {
  const S m = S(0.5) * (a + b);
  const S lm = S(0.5) * (a + m), rm = S(0.5) * (m + b);
  const S flm = f(lm), frm = f(rm);
  const S left = (m - a) / S(6) * (fa + S(4) * flm + fm);
  const S right = (b - m) / S(6) * (fm + S(4) * frm + fb);
  const S delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= S(15) * tol)
    return left + right + delta / S(15);
  return simpson_segment(f, a, m, fa, flm, fm, left, S(0.5) * tol,
                         depth - 1) +
         simpson_segment(f, m, b, fm, frm, fb, right, S(0.5) * tol,
                         depth - 1);
}

/// Adaptive Simpson of f over [a, b], relative tolerance rel (floored by a
/// tiny absolute term so integrals of zero terminate).
template <class S, class F>
S integrate_adaptive(const F& f, S a, S b, S rel) {
  if (a == b) return S(0);
  const S fa = f(a), fm = f(S(0.5) * (a + b)), fb = f(b);
  const S whole = (b - a) / S(6) * (fa + S(4) * fm + fb);
  const S scale = std::max({std::abs(whole), (b - a) * std::abs(fm),
                            std::numeric_limits<S>::min()});
  return simpson_segment(f, a, b, fa, fm, fb, whole,
                         std::max(rel * scale, S(1e-300)), 48);
}

/// Multiply u by the unit phase making <ref|u> real positive.
template <class S>
Spinor<S> phase_align(const Spinor<S>& ref, const Spinor<S>& u) {
  const std::complex<S> ov = ref.dot(u);
  const S mag = std::abs(ov);
  if (mag == S(0)) return u;
  return u * (std::conj(ov) / mag);
}

/// Finite-difference stencil width for eigenvector derivatives.
template <class S>
S fd_step(const FieldParams<S>& p) {
  return S(1e-6) / std::max(p.omega0, p.omega_prime);
}

template <class S>
auto eigen_source(const FieldParams<S>& p) {
  return [p](S t) { return eigensystem(t, p); };
}

}  // namespace detail

/// Eigenstate branch selector.
enum class Branch { plus, minus };

/// <E_+(t)|dE_-(t)/dt> by phase-aligned central differences on an
/// eigensystem source; units 1/s.  The alignment removes the gauge freedom
/// of the differenced branch without touching the cross term, so any smooth
/// re-phasing of either branch changes the result only through the bra's
/// overall phase — |value| is gauge invariant.
template <class S, class Src>
std::complex<S> coupling_term_fd(S t, const FieldParams<S>& p, const Src& src) {
  const S h = detail::fd_step(p);
  const auto es = src(t);
  const auto ef = src(t + h);
  const auto eb = src(t - h);
  const Spinor<S> dvm = (detail::phase_align(es.v_minus, ef.v_minus) -
                         detail::phase_align(es.v_minus, eb.v_minus)) /
                        (S(2) * h);
  return es.v_plus.dot(dvm);
}

template <class S>
std::complex<S> coupling_term_fd(S t, const FieldParams<S>& p) {
  return coupling_term_fd(t, p, detail::eigen_source(p));
}

/// <E_+(t)|dE_-(t)/dt> from the analytic eigenstates: -i 2pi w' sin(theta)/2
/// in the fixed gauge, constant in t.  Every call cross-checks the value
/// against the finite-difference route to 1e-8 relative and throws on
/// disagreement.
template <class S>
std::complex<S> coupling_term(S t, const FieldParams<S>& p) {
  require_valid(p);
  const std::complex<S> analytic(
      S(0), -two_pi<S> * p.omega_prime * std::sin(p.theta()) * S(0.5));
  const std::complex<S> fd = coupling_term_fd(t, p);
  const S scale = std::abs(analytic);
  const S err = std::abs(analytic - fd);
  if (scale > S(0) ? err > S(1e-8) * scale : err > S(1e-8))
    throw std::runtime_error(
        "coupling_term: analytic and finite-difference routes disagree");
  return analytic;
}

/// Traditional condition C1 = |<E+|dE->|/gap = K R / (2 (1+R^2)),
/// t-independent.
template <class S>
S c1_traditional(const FieldParams<S>& p) {
  require_valid(p);
  const S r = p.r();
  return p.k() * r / (S(2) * (S(1) + r * r));
}

/// Berry connection Im<v_n|dv_n/dt> by central differences of overlap
/// arguments; rad/s.  gamma_n(t) = -int_0^t of this is the
/// parallel-transport phase.
template <class S, class Src>
S connection_fd(S t, const FieldParams<S>& p, Branch n, const Src& src) {
  const S h = detail::fd_step(p);
  const auto pick = [n](const EigenSystem<S>& e) -> const Spinor<S>& {
    return n == Branch::plus ? e.v_plus : e.v_minus;
  };
  const auto es = src(t);
  const auto ef = src(t + h);
  const auto eb = src(t - h);
  return (std::arg(pick(es).dot(pick(ef))) -
          std::arg(pick(es).dot(pick(eb)))) /
         (S(2) * h);
}

template <class S>
S connection_fd(S t, const FieldParams<S>& p, Branch n) {
  return connection_fd(t, p, n, detail::eigen_source(p));
}

/// Eigenstate trajectory re-phased into the parallel-transport gauge.
template <class S = double>
struct GaugedTrajectory {
  std::vector<S> times;
  std::vector<Spinor<S>> v_plus;   ///< after re-phasing, <v|dv> ~ 0
  std::vector<Spinor<S>> v_minus;
  std::vector<S> gamma_plus;       ///< re-phasing angles, radians
  std::vector<S> gamma_minus;
};

/// Re-phase both eigenstate branches by gamma_n(t) = int_0^t i<E_n|dE_n>dt'
/// (trapezoidal accumulation of the finite-difference connection).  The
/// grid must be fine enough that successive same-branch overlaps stay
/// above 0.999.
template <class S>
GaugedTrajectory<S> parallel_transport(const std::vector<S>& times,
                                       const FieldParams<S>& p) {
  require_valid(p);
  GaugedTrajectory<S> tr;
  tr.times = times;
  tr.v_plus.reserve(times.size());
  tr.v_minus.reserve(times.size());
  std::vector<S> beta_p, beta_m;
  beta_p.reserve(times.size());
  beta_m.reserve(times.size());
  for (S t : times) {
    const auto es = eigensystem(t, p);
    if (!tr.v_plus.empty()) {
      if (std::abs(tr.v_plus.back().dot(es.v_plus)) < S(0.999) ||
          std::abs(tr.v_minus.back().dot(es.v_minus)) < S(0.999))
        throw std::invalid_argument(
            "parallel_transport: grid too coarse for continuous gauge "
            "tracking; refine the time grid");
    }
    tr.v_plus.push_back(es.v_plus);
    tr.v_minus.push_back(es.v_minus);
    beta_p.push_back(connection_fd(t, p, Branch::plus));
    beta_m.push_back(connection_fd(t, p, Branch::minus));
  }
  tr.gamma_plus.assign(times.size(), S(0));
  tr.gamma_minus.assign(times.size(), S(0));
  for (size_t i = 1; i < times.size(); ++i) {
    const S w = S(0.5) * (times[i] - times[i - 1]);
    tr.gamma_plus[i] =
        tr.gamma_plus[i - 1] - w * (beta_p[i - 1] + beta_p[i]);
    tr.gamma_minus[i] =
        tr.gamma_minus[i - 1] - w * (beta_m[i - 1] + beta_m[i]);
  }
  for (size_t i = 0; i < times.size(); ++i) {
    tr.v_plus[i] *= std::exp(std::complex<S>(0, tr.gamma_plus[i]));
    tr.v_minus[i] *= std::exp(std::complex<S>(0, tr.gamma_minus[i]));
  }
  return tr;
}

namespace detail {

/// int_{t0}^{t1} (beta_+ - beta_-) ds by adaptive quadrature over the
/// finite-difference connections.  exp(i * this) is the relative phase the
/// parallel-transport gauge accumulates between the two branches.
template <class S>
S gauge_phase_delta(S t0, S t1, const FieldParams<S>& p) {
  if (t0 == t1) return S(0);
  return integrate_adaptive(
      [&p](S s) {
        return connection_fd(s, p, Branch::plus) -
               connection_fd(s, p, Branch::minus);
      },
      t0, t1, S(1e-10));
}

}  // namespace detail

/// Closed-form Tong integrals (see header comment).
template <class S>
S tong_b_closed(const FieldParams<S>& p) {
  const S th = p.theta(), c = std::cos(th);
  return std::numbers::pi_v<S> * p.k() * std::sin(th) * c * c;
}

template <class S>
S tong_c_closed(const FieldParams<S>& p) {
  const S th = p.theta(), s = std::sin(th);
  return S(0.5) * std::numbers::pi_v<S> * p.k() * s * s * std::cos(th);
}

/// Numerical Tong-B: int_0^T |dq/dt| dt with q the parallel-transport
/// normalized coupling, the derivative by central differences.  The gauge
/// phase shared by both stencil points drops out of the modulus, so the
/// stencil needs only the phase increment across its own width; differencing
/// two whole-range phase integrals instead would bury the O(eps) signal
/// under their independent rounding noise and stall the outer quadrature.
template <class S>
S tong_b_numeric(const FieldParams<S>& p, S horizon) {
  require_valid(p);
  const S gap = eigensystem(S(0), p).gap;
  const S eps = S(2e-5) / std::max(p.omega0, p.omega_prime);
  const auto qprime_mag = [&](S t) {
    const std::complex<S> cf = coupling_term_fd(t + eps, p);
    const std::complex<S> cb = coupling_term_fd(t - eps, p);
    const S dphase = detail::gauge_phase_delta(t - eps, t + eps, p);
    return std::abs(cf * std::exp(std::complex<S>(0, dphase)) - cb) /
           (gap * S(2) * eps);
  };
  return detail::integrate_adaptive(qprime_mag, S(0), horizon, S(1e-8));
}

/// Numerical Tong-C: int_0^T |<E+|dE-><E-|dE+>|/gap dt.
template <class S>
S tong_c_numeric(const FieldParams<S>& p, S horizon) {
  require_valid(p);
  const S h = detail::fd_step(p);
  const auto integrand = [&](S t) {
    const auto es = eigensystem(t, p);
    const auto ef = eigensystem(t + h, p);
    const auto eb = eigensystem(t - h, p);
    const Spinor<S> dvm = (detail::phase_align(es.v_minus, ef.v_minus) -
                           detail::phase_align(es.v_minus, eb.v_minus)) /
                          (S(2) * h);
    const Spinor<S> dvp = (detail::phase_align(es.v_plus, ef.v_plus) -
                           detail::phase_align(es.v_plus, eb.v_plus)) /
                          (S(2) * h);
    return std::abs(es.v_plus.dot(dvm) * es.v_minus.dot(dvp)) / es.gap;
  };
  return detail::integrate_adaptive(integrand, S(0), horizon, S(1e-8));
}

/// Default horizon: one rf revolution, T = 1/w' (w' in Hz).
template <class S>
S default_horizon(const FieldParams<S>& p) {
  if (!(p.omega_prime > S(0)))
    throw std::invalid_argument("default_horizon: omega_prime must be > 0");
  return S(1) / p.omega_prime;
}

/// Tong conditions over [0, T].  tong_a is the supremum of the traditional
/// expression, which is the same t-independent quantity as c1; tong_b and
/// tong_c are evaluated by the numerical pipeline and cross-checked against
/// their closed forms to 1e-6 relative (throws on disagreement — that would
/// mean the quadrature or the eigensystem is broken).
template <class S>
std::tuple<S, S, S> tong_conditions(const FieldParams<S>& p, S horizon) {
  require_valid(p);
  if (!(horizon > S(0)))
    throw std::invalid_argument("tong_conditions: horizon must be > 0");
  const S a = c1_traditional(p);
  const S b = tong_b_numeric(p, horizon);
  const S c = tong_c_numeric(p, horizon);
  const S scale_b = std::abs(tong_b_closed(p));
  const S scale_c = std::abs(tong_c_closed(p));
  const bool default_t =
      p.omega_prime > S(0) && horizon == default_horizon(p);
  if (default_t) {
    if (scale_b > S(0) ? std::abs(b - tong_b_closed(p)) > S(1e-6) * scale_b
                       : std::abs(b) > S(1e-9))
      throw std::runtime_error("tong_conditions: numeric B diverged from "
                               "closed form");
    if (scale_c > S(0) ? std::abs(c - tong_c_closed(p)) > S(1e-6) * scale_c
                       : std::abs(c) > S(1e-9))
      throw std::runtime_error("tong_conditions: numeric C diverged from "
                               "closed form");
  }
  return {a, b, c};
}

/// Result of the modified (resonance-aware) condition.
template <class S = double>
struct WuResult {
  S wu_c3{};          ///< +infinity exactly on the locus K = 1+R^2
  S denominator{};    ///< rad/s, signed
  bool resonant = false;
};

/// Closed-form Wu condition.  The denominator is computed in the
/// cancellation-free form 2pi (w0 (1+R^2) - w') / sqrt(1+R^2) so that
/// parameter sets constructed exactly on the locus give exactly zero.  The
/// generally-implemented d/dt arg<E+|dE-> contribution is evaluated
/// numerically and asserted negligible (it vanishes identically here).
template <class S>
WuResult<S> wu_condition(const FieldParams<S>& p) {
  require_valid(p);
  const S r2 = p.r() * p.r();
  const S den =
      two_pi<S> * (p.omega0 * (S(1) + r2) - p.omega_prime) /
      std::sqrt(S(1) + r2);
  const S gap = two_pi<S> * std::hypot(p.omega0, p.omega1);

  if (p.omega_prime > S(0)) {
    const S eps = S(1e-2) / std::max(p.omega0, p.omega_prime);
    const S t0 = S(0.23) / std::max(p.omega0, p.omega_prime);
    const std::complex<S> cf = coupling_term_fd(t0 + eps, p);
    const std::complex<S> cb = coupling_term_fd(t0 - eps, p);
    if (std::abs(cf) > S(0) && std::abs(cb) > S(0)) {
      const S darg = std::arg(cf / cb) / (S(2) * eps);
      if (std::abs(darg) > S(1e-6) * gap)
        throw std::runtime_error(
            "wu_condition: coupling argument drift is not negligible");
    }
  }

  WuResult<S> w;
  w.denominator = den;
  w.resonant = std::abs(den) < S(1e-9) * gap;
  const S coupling_mag =
      two_pi<S> * p.omega_prime * std::sin(p.theta()) * S(0.5);
  if (coupling_mag == S(0))
    w.wu_c3 = S(0);  // no transition channel, however small the denominator
  else
    w.wu_c3 = den == S(0) ? std::numeric_limits<S>::infinity()
                          : coupling_mag / std::abs(den);
  return w;
}

/// Wu condition from the numerical pipeline alone: finite-difference
/// connections and coupling, numeric argument derivative.  The gauge terms
/// i<E_n|dE_n> and d/dt arg<E+|dE-> conspire so the result is invariant
/// under smooth re-phasing of either branch of the source.
template <class S, class Src>
WuResult<S> wu_condition_numeric(const FieldParams<S>& p, const Src& src) {
  require_valid(p);
  const S t0 = S(0.23) / std::max(p.omega0, p.omega_prime);
  const auto es = src(t0);
  const S beta_p = connection_fd(t0, p, Branch::plus, src);
  const S beta_m = connection_fd(t0, p, Branch::minus, src);
  const S eps = S(1e-2) / std::max(p.omega0, p.omega_prime);
  const std::complex<S> c0 = coupling_term_fd(t0, p, src);
  const std::complex<S> cf = coupling_term_fd(t0 + eps, p, src);
  const std::complex<S> cb = coupling_term_fd(t0 - eps, p, src);
  const S darg = (std::abs(cf) > S(0) && std::abs(cb) > S(0))
                     ? std::arg(cf / cb) / (S(2) * eps)
                     : S(0);
  WuResult<S> w;
  w.denominator = es.gap + beta_p - beta_m + darg;
  w.resonant = std::abs(w.denominator) < S(1e-9) * es.gap;
  w.wu_c3 = w.denominator == S(0) ? std::numeric_limits<S>::infinity()
                                  : std::abs(c0) / std::abs(w.denominator);
  return w;
}

template <class S>
WuResult<S> wu_condition_numeric(const FieldParams<S>& p) {
  return wu_condition_numeric(p, detail::eigen_source(p));
}

/// Traditional condition from the numerical pipeline: sup over [0, T] of
/// |coupling|/gap on a coarse sample (the quantity is t-independent).
template <class S>
S c1_numeric(const FieldParams<S>& p, S horizon) {
  require_valid(p);
  const S gap = eigensystem(S(0), p).gap;
  S sup = S(0);
  for (int j = 0; j < 7; ++j) {
    const S t = horizon * (S(0.05) + S(0.15) * S(j));
    sup = std::max(sup, std::abs(coupling_term_fd(t, p)) / gap);
  }
  return sup;
}

/// Everything the sweep and the CLI report for one parameter point.
template <class S = double>
struct ConditionReport {
  S c1{};
  S tong_a{};
  S tong_b{};
  S tong_c{};
  S wu_c3{};
  S wu_denominator{};
  bool resonant = false;
  S horizon{};
};

/// All condition values at p over [0, T].  Closed forms for the pointwise
/// quantities, self-checking numeric quadrature for the Tong integrals.
template <class S>
ConditionReport<S> full_report(const FieldParams<S>& p, S horizon) {
  require_valid(p);
  ConditionReport<S> rep;
  rep.horizon = horizon;
  rep.c1 = c1_traditional(p);
  if (p.omega_prime > S(0)) {
    auto [a, b, c] = tong_conditions(p, horizon);
    rep.tong_a = a;
    rep.tong_b = b;
    rep.tong_c = c;
  }
  const auto wu = wu_condition(p);
  rep.wu_c3 = wu.wu_c3;
  rep.wu_denominator = wu.denominator;
  rep.resonant = wu.resonant;
  return rep;
}

/// Horizon used when the caller does not pick one: a drive period, or a
/// Larmor period when the drive is static.
template <class S>
S report_horizon(const FieldParams<S>& p) {
  return p.omega_prime > S(0) ? default_horizon(p) : S(1) / p.omega0;
}

template <class S>
ConditionReport<S> full_report(const FieldParams<S>& p) {
  return full_report(p, report_horizon(p));
}

/// Same report with every value produced by the finite-difference +
/// quadrature pipeline (no closed forms); the independent route used by
/// validation.
template <class S>
ConditionReport<S> numeric_report(const FieldParams<S>& p, S horizon) {
  require_valid(p);
  ConditionReport<S> rep;
  rep.horizon = horizon;
  rep.c1 = c1_numeric(p, horizon);
  rep.tong_a = rep.c1;
  rep.tong_b = tong_b_numeric(p, horizon);
  rep.tong_c = tong_c_numeric(p, horizon);
  const auto wu = wu_condition_numeric(p);
  rep.wu_c3 = wu.wu_c3;
  rep.wu_denominator = wu.denominator;
  rep.resonant = wu.resonant;
  return rep;
}

template <class S>
ConditionReport<S> numeric_report(const FieldParams<S>& p) {
  return numeric_report(p, report_horizon(p));
}

}  // namespace adiabatic
