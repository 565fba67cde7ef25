#pragma once

// Numerical propagation: midpoint piecewise-constant stepping (each step an
// exact 2x2 unitary, so the norm is preserved to rounding regardless of
// step size) and the discrete pulse-sequence protocol that implements the
// rotating rf field as 72 fixed-phase pulses per cycle, phase advancing by
// pi/36 per pulse, sampled stroboscopically at cycle boundaries t = n tau.

#include <adiabatic/spin.hpp>

#include <algorithm>
#include <cmath>

namespace adiabatic {

namespace detail {

/// exp(-i M dt) for Hermitian M = a0 I + a.sigma (rad/s):
/// e^{-i a0 dt} [cos(|a| dt) I - i sin(|a| dt) (a.sigma)/|a|].
template <class S>
Matrix2H<S> exp_minus_i_h_dt(const Matrix2H<S>& m, S dt) {
  const S a0 = S(0.5) * (m(0, 0).real() + m(1, 1).real());
  const S ax = m(0, 1).real();
  const S ay = -m(0, 1).imag();
  const S az = S(0.5) * (m(0, 0).real() - m(1, 1).real());
  const S am = std::sqrt(ax * ax + ay * ay + az * az);

  const S c = std::cos(am * dt);
  const S s = am > S(0) ? std::sin(am * dt) / am : S(0);
  Matrix2H<S> u;
  u << std::complex<S>(c, -s * az), std::complex<S>(-s * ay, -s * ax),
      std::complex<S>(s * ay, -s * ax), std::complex<S>(c, s * az);
  if (a0 != S(0)) u *= std::exp(std::complex<S>(0, -a0 * dt));
  return u;
}

}  // namespace detail

/// One midpoint step: exp(-i H(t + dt/2) dt) s.
template <class S>
Spinor<S> step_exact(const Spinor<S>& s, S t, S dt, const FieldParams<S>& p) {
  if (!(dt > S(0))) throw std::invalid_argument("step_exact: dt must be > 0");
  return detail::exp_minus_i_h_dt(hamiltonian_matrix(t + S(0.5) * dt, p), dt) *
         s;
}

template <class S = double>
struct PropagationResult {
  FidelityTrace<S> trace;
  Spinor<S> final_state;
  long step_count = 0;
  Method method = Method::integrator;
  bool dt_warning = false;  ///< set when dt >= characteristic period / 10
};

/// Fastest timescale of the problem, 1/max(w0, w', f_eff) seconds.
template <class S>
S characteristic_period(const FieldParams<S>& p) {
  return S(1) /
         std::max({p.omega0, p.omega_prime, effective_frequency(p)});
}

/// Default integrator step: at least 200 steps per fastest oscillation,
/// and never coarser than the requested sample spacing.
template <class S>
S default_dt(const FieldParams<S>& p, S sample_spacing) {
  const S by_freq = characteristic_period(p) / S(200);
  return sample_spacing > S(0) ? std::min(by_freq, sample_spacing) : by_freq;
}

/// Midpoint propagation from initial_state(p), fidelity sampled against the
/// instantaneous upper eigenstate at each requested time.  dt is subdivided
/// per segment so that steps land exactly on sample points.
template <class S>
PropagationResult<S> evolve(const FieldParams<S>& p, S t_end, S dt,
                            const std::vector<S>& sample_times) {
  require_valid(p);
  if (!(dt > S(0))) throw std::invalid_argument("evolve: dt must be > 0");
  if (t_end < S(0)) throw std::invalid_argument("evolve: t_end must be >= 0");

  PropagationResult<S> res;
  res.method = Method::integrator;
  res.dt_warning = dt >= characteristic_period(p) / S(10);
  res.trace.method = Method::integrator;
  res.trace.params = p;

  Spinor<S> psi = initial_state(p);
  S t = S(0);
  auto sample = [&](S ts) {
    res.trace.times.push_back(ts);
    res.trace.values.push_back(fidelity(eigensystem(ts, p).v_plus, psi));
  };
  auto advance_to = [&](S target) {
    if (target <= t) return;
    const long n = std::max(1L, (long)std::ceil((target - t) / dt - S(1e-9)));
    const S h = (target - t) / S(n);
    for (long i = 0; i < n; ++i) {
      psi = step_exact(psi, t + S(i) * h, h, p);
      ++res.step_count;
    }
    t = target;
  };

  for (S ts : sample_times) {
    advance_to(ts);
    sample(ts);
  }
  advance_to(t_end);
  if (res.trace.times.empty()) sample(t);
  res.final_state = psi;
  return res;
}

/// The discrete rf protocol: phase step pi/36, 72 pulses per cycle, pulse
/// width chosen so one cycle is one full rf revolution.
template <class S = double>
struct PulseSchedule {
  S delta_t{};               ///< seconds per pulse, (pi/36)/(2 pi w')
  S phase_step{};            ///< radians, pi/36
  int pulses_per_cycle = 72; ///< phase_step * 72 = 2 pi
  S tau{};                   ///< seconds per cycle, 72 delta_t = 1/w'
  int n_cycles = 0;
};

template <class S>
PulseSchedule<S> make_schedule(const FieldParams<S>& p, int n_cycles) {
  require_valid(p);
  if (!(p.omega_prime > S(0)))
    throw std::invalid_argument("make_schedule: omega_prime must be > 0");
  if (n_cycles < 0)
    throw std::invalid_argument("make_schedule: n_cycles must be >= 0");
  PulseSchedule<S> s;
  s.phase_step = std::numbers::pi_v<S> / S(36);
  s.delta_t = s.phase_step / (two_pi<S> * p.omega_prime);
  s.pulses_per_cycle = 72;
  s.tau = S(72) * s.delta_t;
  s.n_cycles = n_cycles;
  return s;
}

/// Propagate through the pulse train: pulse k applies the constant
/// Hamiltonian 2pi[w0 sz/2 + w1 (sx cos(phi_k) + sy sin(phi_k))/2] for
/// delta_t with phi_k = k pi/36 held at its left-endpoint value, matching
/// the experimental stepper.  The trace is stroboscopic: t = n tau,
/// n = 0..n_cycles, where the instantaneous eigenbasis coincides with its
/// t = 0 orientation.
template <class S>
PropagationResult<S> pulse_sequence_evolve(const FieldParams<S>& p,
                                           const PulseSchedule<S>& sched) {
  require_valid(p);
  PropagationResult<S> res;
  res.method = Method::pulse_sequence;
  res.trace.method = Method::pulse_sequence;
  res.trace.params = p;
  res.dt_warning = false;

  Spinor<S> psi = initial_state(p);
  const Spinor<S> v_plus0 = eigensystem(S(0), p).v_plus;
  res.trace.times.push_back(S(0));
  res.trace.values.push_back(fidelity(v_plus0, psi));

  long k = 0;
  for (int n = 1; n <= sched.n_cycles; ++n) {
    for (int j = 0; j < sched.pulses_per_cycle; ++j, ++k) {
      const S phi = S(k) * sched.phase_step;
      const std::complex<S> off =
          S(0.5) * p.omega1 * std::exp(std::complex<S>(0, -phi));
      Matrix2H<S> h;
      h << std::complex<S>(S(0.5) * p.omega0), off, std::conj(off),
          std::complex<S>(S(-0.5) * p.omega0);
      h *= two_pi<S>;
      psi = detail::exp_minus_i_h_dt(h, sched.delta_t) * psi;
      ++res.step_count;
    }
    res.trace.times.push_back(S(n) * sched.tau);
    res.trace.values.push_back(fidelity(v_plus0, psi));
  }
  res.final_state = psi;
  return res;
}

}  // namespace adiabatic
