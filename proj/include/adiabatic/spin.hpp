#pragma once

// Core types and closed-form quantities of the rotating-field two-level
// problem
//
//   H(t) = 2pi [ w0 sz/2 + w1 ( sx/2 cos(2pi w' t) + sy/2 sin(2pi w' t) ) ]
//
// with all user-facing frequencies (w0, w1, w') in Hz.  The single Hz ->
// rad/s conversion happens where a matrix or an energy is produced; times
// are seconds throughout.  Dimensionless ratios R = w1/w0, K = w'/w0 and
// the mixing angle theta = arctan R parameterize everything physical.
//
// The instantaneous eigensystem, the exact rotating-frame propagation, the
// fidelity F(t) = |<v+(t)|psi(t)>| and its closed-form envelope
//
//   F(t)  = sqrt(1 - sin^2(theta_eff - theta) sin^2(pi f_eff t)),
//   F_min = |(1-K) cos(theta) + R sin(theta)| / sqrt((1-K)^2 + R^2),
//   t_min = 1 / (2 f_eff),            f_eff = sqrt((1-K)^2 w0^2 + w1^2)
//
// are all exact; no numerics beyond scalar sqrt/trig happen in this header.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace adiabatic {

template <class S = double>
using Spinor = Eigen::Vector2<std::complex<S>>;

template <class S = double>
using Matrix2H = Eigen::Matrix2<std::complex<S>>;

template <class S>
constexpr S two_pi = S(2) * std::numbers::pi_v<S>;

/// Physical field parameters, frequencies in Hz.
template <class S = double>
struct FieldParams {
  S omega0{};       ///< Larmor frequency (level splitting), > 0
  S omega1{};       ///< rf coupling strength, >= 0
  S omega_prime{};  ///< rf rotation frequency, >= 0

  constexpr S r() const { return omega1 / omega0; }
  constexpr S k() const { return omega_prime / omega0; }
  S theta() const { return std::atan(r()); }

  constexpr bool valid() const {
    return omega0 > S(0) && omega1 >= S(0) && omega_prime >= S(0);
  }
};

/// Throws std::invalid_argument unless p.valid().
template <class S>
void require_valid(const FieldParams<S>& p) {
  if (!p.valid())
    throw std::invalid_argument(
        "FieldParams: need omega0 > 0, omega1 >= 0, omega_prime >= 0 (got " +
        std::to_string(p.omega0) + ", " + std::to_string(p.omega1) + ", " +
        std::to_string(p.omega_prime) + ")");
}

/// Build params from (K, R) with the rf strength held fixed: w0 = w1/R,
/// w' = K w0.  This mirrors the sweep convention of varying the offset.
template <class S>
FieldParams<S> params_from_ratios(S k, S r, S omega1 = S(100)) {
  if (!(r > S(0)))
    throw std::invalid_argument("params_from_ratios: r must be > 0");
  const S omega0 = omega1 / r;
  FieldParams<S> p{omega0, omega1, k * omega0};
  require_valid(p);
  return p;
}

/// Build params from (K, R) at a pinned Larmor frequency: w1 = R w0.
template <class S>
FieldParams<S> params_from_omega0(S k, S r, S omega0) {
  FieldParams<S> p{omega0, r * omega0, k * omega0};
  require_valid(p);
  return p;
}

template <class S = double>
Matrix2H<S> pauli_x() {
  Matrix2H<S> m;
  m << std::complex<S>(0), std::complex<S>(1), std::complex<S>(1),
      std::complex<S>(0);
  return m;
}

template <class S = double>
Matrix2H<S> pauli_y() {
  Matrix2H<S> m;
  m << std::complex<S>(0), std::complex<S>(0, -1), std::complex<S>(0, 1),
      std::complex<S>(0);
  return m;
}

template <class S = double>
Matrix2H<S> pauli_z() {
  Matrix2H<S> m;
  m << std::complex<S>(1), std::complex<S>(0), std::complex<S>(0),
      std::complex<S>(-1);
  return m;
}

/// H(t) in rad/s.  Off-diagonal: (w1/2) e^{-i phi} with phi = 2 pi w' t, so
/// the rf field points along x at t = 0 and along y a quarter period later.
template <class S>
Matrix2H<S> hamiltonian_matrix(S t, const FieldParams<S>& p) {
  const S phi = two_pi<S> * p.omega_prime * t;
  const std::complex<S> off =
      S(0.5) * p.omega1 * std::exp(std::complex<S>(0, -phi));
  Matrix2H<S> h;
  h << std::complex<S>(S(0.5) * p.omega0), off, std::conj(off),
      std::complex<S>(S(-0.5) * p.omega0);
  return two_pi<S> * h;
}

/// Instantaneous eigensystem in a fixed gauge: each eigenvector's first
/// nonzero component (in basis order) is real and positive, which keeps
/// finite differences of eigenvectors well defined.
template <class S = double>
struct EigenSystem {
  S e_plus{};   ///< +pi sqrt(w0^2+w1^2) * 2pi-consistent, rad/s
  S e_minus{};  ///< -e_plus
  S gap{};      ///< e_plus - e_minus, rad/s
  Spinor<S> v_plus;
  Spinor<S> v_minus;
  S t{};  ///< seconds
};

namespace detail {

/// Rephase so the first component with magnitude above tol is real >= 0.
template <class S>
Spinor<S> fix_gauge(const Spinor<S>& v, S tol = S(1e-13)) {
  const std::complex<S> lead = std::abs(v[0]) > tol ? v[0] : v[1];
  const S mag = std::abs(lead);
  if (mag == S(0)) return v;
  return v * (std::conj(lead) / mag);
}

}  // namespace detail

/// Closed-form instantaneous eigensystem of hamiltonian_matrix(t, p):
///   v+(t) = (cos(theta/2), e^{i phi} sin(theta/2))
///   v-(t) = (sin(theta/2), -e^{i phi} cos(theta/2)),  phi = 2 pi w' t,
/// then gauge-fixed.  Energies are time independent; the gap never closes
/// while w0 > 0.
template <class S>
EigenSystem<S> eigensystem(S t, const FieldParams<S>& p) {
  require_valid(p);
  const S half_theta = S(0.5) * p.theta();
  const S c = std::cos(half_theta), s = std::sin(half_theta);
  const std::complex<S> ph =
      std::exp(std::complex<S>(0, two_pi<S> * p.omega_prime * t));
  EigenSystem<S> es;
  es.e_plus = std::numbers::pi_v<S> * std::hypot(p.omega0, p.omega1);
  es.e_minus = -es.e_plus;
  es.gap = es.e_plus - es.e_minus;
  es.v_plus << std::complex<S>(c), ph * s;
  es.v_minus << std::complex<S>(s), -ph * c;
  es.v_plus = detail::fix_gauge(es.v_plus);
  es.v_minus = detail::fix_gauge(es.v_minus);
  es.t = t;
  return es;
}

/// The t=0 ground-preparation eigenstate (cos(theta/2), sin(theta/2)).
template <class S>
Spinor<S> initial_state(const FieldParams<S>& p) {
  require_valid(p);
  const S half_theta = S(0.5) * p.theta();
  Spinor<S> s;
  s << std::complex<S>(std::cos(half_theta)),
      std::complex<S>(std::sin(half_theta));
  return s;
}

/// |<x|y>|, the absolute overlap of two normalized states.
template <class S>
S fidelity(const Spinor<S>& x, const Spinor<S>& y) {
  return std::abs(x.dot(y));
}

/// Exact solution of i d|psi>/dt = H(t)|psi> from initial_state(p):
/// transform to the frame rotating at w', evolve under the constant
/// effective Hamiltonian 2pi[(w0-w') sz/2 + w1 sx/2] via the closed 2x2
/// exponential, transform back.
template <class S>
Spinor<S> exact_state(S t, const FieldParams<S>& p) {
  require_valid(p);
  // Effective field a.sigma with a = pi (w1, 0, w0 - w') rad/s.
  const S ax = std::numbers::pi_v<S> * p.omega1;
  const S az = std::numbers::pi_v<S> * (p.omega0 - p.omega_prime);
  const S am = std::hypot(ax, az);
  const S ct = std::cos(am * t);
  const S st = am > S(0) ? std::sin(am * t) : S(0);
  const S nx = am > S(0) ? ax / am : S(0);
  const S nz = am > S(0) ? az / am : S(1);

  Matrix2H<S> u;  // exp(-i a.sigma t) = cos I - i sin (n.sigma)
  u << std::complex<S>(ct, -st * nz), std::complex<S>(0, -st * nx),
      std::complex<S>(0, -st * nx), std::complex<S>(ct, st * nz);

  const std::complex<S> back =
      std::exp(std::complex<S>(0, -std::numbers::pi_v<S> * p.omega_prime * t));
  Spinor<S> psi = u * initial_state(p);
  psi[0] *= back;
  psi[1] *= std::conj(back);
  return psi;
}

/// Which propagation produced a trace.
enum class Method { closed_form, integrator, pulse_sequence };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::integrator: return "integrator";
    case Method::pulse_sequence: return "pulse-sequence";
  }
  return "unknown";
}

template <class S = double>
struct FidelityTrace {
  std::vector<S> times;   ///< seconds, strictly increasing
  std::vector<S> values;  ///< F(t) in [0, 1]
  Method method = Method::closed_form;
  FieldParams<S> params;
};

/// Effective Rabi frequency sqrt((1-K)^2 w0^2 + w1^2) in Hz.
template <class S>
S effective_frequency(const FieldParams<S>& p) {
  return std::hypot(p.omega0 - p.omega_prime, p.omega1);
}

/// Tilt of the rotating-frame field, atan2(R, 1-K) in [0, pi]; continuous
/// through K = 1.
template <class S>
S theta_eff(const FieldParams<S>& p) {
  return std::atan2(p.r(), S(1) - p.k());
}

/// Closed-form fidelity at time t (seconds).
template <class S>
S fidelity_closed(S t, const FieldParams<S>& p) {
  const S sd = std::sin(theta_eff(p) - p.theta());
  const S so = std::sin(std::numbers::pi_v<S> * effective_frequency(p) * t);
  const S x = sd * sd * so * so;
  return std::sqrt(std::max(S(0), S(1) - x));
}

/// Closed-form F(t) sampled on the given (strictly increasing) time grid.
template <class S>
FidelityTrace<S> fidelity_trace_closed(const FieldParams<S>& p,
                                       const std::vector<S>& times) {
  require_valid(p);
  FidelityTrace<S> tr;
  tr.times = times;
  tr.values.reserve(times.size());
  for (S t : times) tr.values.push_back(fidelity_closed(t, p));
  tr.method = Method::closed_form;
  tr.params = p;
  return tr;
}

/// Minimum of F(t) over the evolution, |(1-K)cos(theta) + R sin(theta)| /
/// sqrt((1-K)^2 + R^2).  The degenerate point K=1, R=0 (0/0) is an error.
template <class S>
S f_min_closed(const FieldParams<S>& p) {
  require_valid(p);
  const S k = p.k(), r = p.r();
  const S denom = std::hypot(S(1) - k, r);
  if (denom == S(0))
    throw std::domain_error("f_min_closed: undefined at K=1, R=0");
  const S th = p.theta();
  return std::abs((S(1) - k) * std::cos(th) + r * std::sin(th)) / denom;
}

/// Time of the first fidelity minimum, 1/(2 f_eff) seconds.  Same
/// degenerate point as f_min_closed.
template <class S>
S t_min(const FieldParams<S>& p) {
  require_valid(p);
  const S fe = effective_frequency(p);
  if (fe == S(0)) throw std::domain_error("t_min: undefined at K=1, R=0");
  return S(1) / (S(2) * fe);
}

}  // namespace adiabatic
