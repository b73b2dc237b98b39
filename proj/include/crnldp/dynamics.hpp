#pragma once

// Mass-action ODEs, volume-scaled jump processes (Gillespie direct method),
// ensemble statistics and Poincare sections.

#include "crnldp/errors.hpp"
#include "crnldp/model.hpp"
#include "crnldp/parallel.hpp"
#include "crnldp/random.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace crnldp {

using State = std::vector<double>;
using VectorField = std::function<void(const State&, State&)>;

// ---------------------------------------------------------------------------
// Deterministic model

/// lambda_r(x) = k_r prod_i x_i^{c_in_i}, with 0^0 = 1. Negative entries are read as 0.
inline double mass_action_rate(const Reaction& r, const State& x) {
  double rate = r.rate_constant;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int c = r.input[i];
    if (c == 0) continue;
    const double xi = std::max(x[i], 0.0);
    rate *= c == 1 ? xi : std::pow(xi, c);
  }
  return rate;
}

inline std::vector<double> mass_action_rates(const Network& net, const State& x) {
  std::vector<double> rates(net.size());
  for (std::size_t r = 0; r < net.size(); ++r) rates[r] = mass_action_rate(net.reaction(r), x);
  return rates;
}

namespace detail {
inline void field_unchecked(const Network& net, const State& x, State& dx) {
  dx.assign(x.size(), 0.0);
  for (const auto& r : net.reactions()) {
    const double rate = mass_action_rate(r, x);
    if (rate == 0) continue;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int c = r.output[i] - r.input[i];
      if (c != 0) dx[i] += rate * c;
    }
  }
}
}  // namespace detail

/// sum_r lambda_r(x) c^r.
inline State mass_action_field(const Network& net, const State& x) {
  if (x.size() != net.dimension()) throw Error("state has wrong dimension");
  for (double xi : x)
    if (xi < 0) throw NegativeConcentration("negative concentration");
  State dx;
  detail::field_unchecked(net, x, dx);
  return dx;
}

inline VectorField mass_action_vector_field(const Network& net) {
  return [net](const State& x, State& dx) { detail::field_unchecked(net, x, dx); };
}

/// Mass-action field with species `frozen` held at `value`; the state omits that coordinate.
inline VectorField frozen_species_field(const Network& net, std::size_t frozen, double value) {
  return [net, frozen, value](const State& y, State& dy) {
    State x(y.size() + 1), dx;
    for (std::size_t i = 0, k = 0; i < x.size(); ++i) x[i] = i == frozen ? value : y[k++];
    detail::field_unchecked(net, x, dx);
    dy.resize(y.size());
    for (std::size_t i = 0, k = 0; i < x.size(); ++i)
      if (i != frozen) dy[k++] = dx[i];
  };
}

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;

  std::size_t size() const { return times.size(); }

  /// Linear interpolation; clamps outside [t_0, t_end].
  State at(double t) const {
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times.begin());
    const double a = (t - times[k - 1]) / (times[k] - times[k - 1]);
    State x(states[k].size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1 - a) * states[k - 1][i] + a * states[k][i];
    return x;
  }
};

struct OdeOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double blowup_cap = 1e12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 1e-3;
  double min_step = 1e-13;  // relative to max(1, |t|)
  std::size_t max_steps = 50'000'000;
};

struct OdeSolution {
  Trajectory trajectory;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  bool stiffness_warning = false;
};

/// Adaptive Dormand-Prince 5(4) with nonnegativity projection.
inline OdeSolution integrate_field(const VectorField& f, State x0, double T, const OdeOptions& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  if (!(T > 0)) throw Error("integration time must be positive");
  for (double xi : x0)
    if (xi < 0) throw NegativeConcentration("negative initial concentration");
  auto system = [&f](const State& x, State& dx, double) { f(x, dx); };
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(opt.abs_tol, opt.rel_tol);

  OdeSolution sol;
  sol.trajectory.times.push_back(0.0);
  sol.trajectory.states.push_back(x0);
  State x = std::move(x0);
  double t = 0;
  double dt = std::min({opt.initial_step, opt.max_step, T});
  while (t < T) {
    if (sol.accepted + sol.rejected >= opt.max_steps) throw NumericalError("ODE step budget exhausted");
    dt = std::min({dt, opt.max_step, T - t});
    const double floor = opt.min_step * std::max(1.0, std::abs(t));
    const State x_old = x;
    const double t_old = t;
    bool forced = false;
    if (dt < floor) {
      // Below the step-size floor: take one uncontrolled step at the floor and flag it.
      dt = std::min(floor, T - t);
      sol.stiffness_warning = true;
      forced = true;
    }
    odeint::controlled_step_result res = odeint::success;
    if (forced) {
      odeint::runge_kutta_dopri5<State> plain;
      plain.do_step(system, x, t, dt);
      t += dt;
    } else {
      res = stepper.try_step(system, x, t, dt);
    }
    if (res != odeint::success) {
      ++sol.rejected;
      continue;
    }
    double most_negative = 0;
    for (double xi : x) most_negative = std::min(most_negative, xi);
    if (most_negative < -opt.abs_tol && !forced) {
      x = x_old;
      const double taken = t - t_old;
      t = t_old;
      dt = taken / 2;
      ++sol.rejected;
      continue;
    }
    double norm = 0;
    for (auto& xi : x) {
      if (xi < 0) xi = 0;
      norm += xi;
    }
    if (!std::isfinite(norm) || norm > opt.blowup_cap) throw BlowUp(t, norm);
    ++sol.accepted;
    sol.trajectory.times.push_back(t);
    sol.trajectory.states.push_back(x);
  }
  return sol;
}

inline OdeSolution integrate_ode(const Network& net, const State& x0, double T, const OdeOptions& opt = {}) {
  if (x0.size() != net.dimension()) throw Error("initial state has wrong dimension");
  return integrate_field(mass_action_vector_field(net), x0, T, opt);
}

// ---------------------------------------------------------------------------
// Stochastic model

using Counts = std::vector<long long>;

/// Total jump intensity v * Lambda_{r,v}(n / v) = k_r v^{1 - |c_in|} prod_i n_i (n_i - 1) ... (n_i - c_i + 1).
inline double propensity(const Reaction& r, double v, const Counts& n) {
  double value = r.rate_constant * v;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const int c = r.input[i];
    for (int j = 0; j < c; ++j) {
      const double factor = static_cast<double>(n[i] - j);
      if (factor <= 0) return 0.0;
      value *= factor / v;
    }
  }
  return value;
}

inline double propensity(const Network& net, double v, const Counts& n, std::size_t r) {
  return propensity(net.reaction(r), v, n);
}

struct JumpPath {
  double volume = 1;
  std::vector<double> times;          // times[0] = 0, then one entry per jump
  std::vector<Counts> counts;         // counts[k] holds on [times[k], times[k+1])
  std::vector<std::size_t> reaction_ids;  // reaction fired at times[k + 1]
  double t_end = 0;
  bool absorbed = false;  // total intensity vanished before t_end

  State concentration(std::size_t k) const {
    State x(counts[k].size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(counts[k][i]) / volume;
    return x;
  }
};

struct SsaOptions {
  std::size_t max_jumps = 200'000'000;
  bool record = true;
};

enum class SsaStop { Horizon, Absorbed, Observer };

/// Gillespie direct method. observer(t, counts, reaction) is called after every jump;
/// returning false stops the run.
template <typename Observer>
SsaStop ssa_run(const Network& net, double v, Counts n, double T, Rng& rng, Observer&& observer,
                const SsaOptions& opt = {}) {
  const std::size_t m = net.size();
  std::vector<std::vector<int>> delta(m);
  for (std::size_t r = 0; r < m; ++r) delta[r] = reaction_vector(net.reaction(r));
  std::vector<double> a(m);
  double t = 0;
  std::size_t jumps = 0;
  for (;;) {
    double total = 0;
    for (std::size_t r = 0; r < m; ++r) total += a[r] = propensity(net.reaction(r), v, n);
    if (total <= 0) return SsaStop::Absorbed;
    t += rng.exponential(total);
    if (t > T) return SsaStop::Horizon;
    double u = rng.uniform() * total;
    std::size_t r = 0;
    while (r + 1 < m && (u >= a[r] || a[r] == 0)) {
      u -= a[r];
      ++r;
    }
    while (a[r] == 0) --r;  // guards round-off at the end of the scan
    for (std::size_t i = 0; i < n.size(); ++i) n[i] += delta[r][i];
    if (++jumps > opt.max_jumps) throw NumericalError("SSA jump budget exhausted");
    if (!observer(t, static_cast<const Counts&>(n), r)) return SsaStop::Observer;
  }
}

inline Counts counts_from_concentration(const State& x0, double v) {
  Counts n(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (x0[i] < 0) throw NegativeConcentration("negative initial concentration");
    n[i] = std::llround(v * x0[i]);
  }
  return n;
}

inline JumpPath ssa_simulate(const Network& net, double v, const State& x0, double T, std::uint64_t seed,
                             std::uint64_t trial = 0, const SsaOptions& opt = {}) {
  if (!(v >= 1)) throw Error("volume must be at least 1");
  JumpPath path;
  path.volume = v;
  path.t_end = T;
  Counts n0 = counts_from_concentration(x0, v);
  path.times.push_back(0);
  path.counts.push_back(n0);
  Rng rng(seed, trial);
  const auto stop = ssa_run(
      net, v, n0, T, rng,
      [&](double t, const Counts& n, std::size_t r) {
        if (opt.record) {
          path.times.push_back(t);
          path.counts.push_back(n);
          path.reaction_ids.push_back(r);
        }
        return true;
      },
      opt);
  path.absorbed = stop == SsaStop::Absorbed;
  return path;
}

// ---------------------------------------------------------------------------
// Ensembles

struct LlnRow {
  double volume = 0;
  double median = 0;
  double p95 = 0;
  std::vector<double> deviations;
};

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace detail {
inline double l1_distance(const State& a, const State& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}
}  // namespace detail

/// sup_{t <= T} |X^v_t - x(t)|_1 for independent SSA paths against the ODE solution.
inline std::vector<LlnRow> ensemble_lln(const Network& net, const std::vector<double>& volumes, const State& x0,
                                        double T, std::size_t trials, std::uint64_t seed, unsigned threads = 0,
                                        OdeOptions ode = {}) {
  ode.max_step = std::min(ode.max_step, T / 2000);
  const auto reference = integrate_ode(net, x0, T, ode).trajectory;
  std::vector<LlnRow> rows;
  for (std::size_t vi = 0; vi < volumes.size(); ++vi) {
    const double v = volumes[vi];
    LlnRow row;
    row.volume = v;
    row.deviations.assign(trials, 0.0);
    parallel_for(trials, threads, [&](std::size_t trial) {
      Counts n0 = counts_from_concentration(x0, v);
      State x(n0.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(n0[i]) / v;
      double sup = detail::l1_distance(x, reference.at(0));
      Rng rng(seed, (static_cast<std::uint64_t>(vi) << 32) | trial);
      ssa_run(net, v, n0, T, rng, [&](double t, const Counts& n, std::size_t) {
        const State ref = reference.at(t);
        sup = std::max(sup, detail::l1_distance(x, ref));  // state just before the jump
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(n[i]) / v;
        sup = std::max(sup, detail::l1_distance(x, ref));
        return true;
      });
      sup = std::max(sup, detail::l1_distance(x, reference.at(T)));
      row.deviations[trial] = sup;
    });
    row.median = quantile(row.deviations, 0.5);
    row.p95 = quantile(row.deviations, 0.95);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct ContainmentRow {
  double volume = 0;
  std::size_t exceedances = 0;
  std::size_t trials = 0;
  double log_rate = 0;       // (1/v) log(frequency)
  bool upper_bound = false;  // no exceedance observed: log_rate is log(1/trials)/v
};

/// Monte Carlo estimate of (1/v) log P[sup_{t <= T} |X^v_t|_1 > rho].
inline std::vector<ContainmentRow> estimate_containment(const Network& net, const std::vector<double>& volumes,
                                                        const State& x0, double rho, double gamma, double T,
                                                        std::size_t trials, std::uint64_t seed,
                                                        unsigned threads = 0) {
  double norm0 = 0;
  for (double xi : x0) norm0 += xi;
  if (norm0 > gamma) throw Error("initial condition outside the gamma ball");
  std::vector<ContainmentRow> rows;
  for (std::size_t vi = 0; vi < volumes.size(); ++vi) {
    const double v = volumes[vi];
    std::vector<char> exceeded(trials, 0);
    parallel_for(trials, threads, [&](std::size_t trial) {
      Counts n0 = counts_from_concentration(x0, v);
      const double limit = rho * v;
      Rng rng(seed, (static_cast<std::uint64_t>(vi) << 32) | trial);
      ssa_run(net, v, n0, T, rng, [&](double, const Counts& n, std::size_t) {
        double total = 0;
        for (auto c : n) total += static_cast<double>(c);
        if (total > limit) {
          exceeded[trial] = 1;
          return false;
        }
        return true;
      });
    });
    ContainmentRow row;
    row.volume = v;
    row.trials = trials;
    for (char e : exceeded) row.exceedances += static_cast<std::size_t>(e);
    if (row.exceedances == 0) {
      row.upper_bound = true;
      row.log_rate = std::log(1.0 / static_cast<double>(trials)) / v;
    } else {
      row.log_rate = std::log(static_cast<double>(row.exceedances) / static_cast<double>(trials)) / v;
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Poincare sections

struct Hyperplane {
  std::vector<double> normal;
  double offset = 0;  // <normal, x> = offset
};

/// The x_i = x_j plane, crossed upward when x_i - x_j increases.
inline Hyperplane diagonal_plane(std::size_t dim, std::size_t i, std::size_t j) {
  Hyperplane h;
  h.normal.assign(dim, 0.0);
  h.normal[i] = 1;
  h.normal[j] = -1;
  return h;
}

/// Crossings of the hyperplane in the direction of increasing <normal, x>, linearly
/// interpolated and projected onto coordinates (p, q).
inline std::vector<std::array<double, 2>> poincare_section(const Trajectory& traj, const Hyperplane& plane,
                                                           std::array<std::size_t, 2> projection,
                                                           double t_min = 0) {
  std::vector<std::array<double, 2>> out;
  auto side = [&](const State& x) {
    double s = -plane.offset;
    for (std::size_t i = 0; i < x.size(); ++i) s += plane.normal[i] * x[i];
    return s;
  };
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    if (traj.times[k] < t_min) continue;
    const double s0 = side(traj.states[k]);
    const double s1 = side(traj.states[k + 1]);
    if (!(s0 < 0 && s1 >= 0)) continue;
    const double a = s0 / (s0 - s1);
    std::array<double, 2> p{};
    for (std::size_t c = 0; c < 2; ++c) {
      const auto i = projection[c];
      p[c] = (1 - a) * traj.states[k][i] + a * traj.states[k + 1][i];
    }
    out.push_back(p);
  }
  return out;
}

/// Smallest p <= max_period such that every crossing repeats after p steps within tol; 0 if none.
inline std::size_t detect_period(const std::vector<std::array<double, 2>>& crossings, std::size_t max_period = 8,
                                 double tol = 1e-3) {
  for (std::size_t p = 1; p <= max_period; ++p) {
    if (crossings.size() < 2 * p + 1) return 0;
    bool periodic = true;
    for (std::size_t k = 0; k + p < crossings.size() && periodic; ++k)
      for (std::size_t c = 0; c < 2; ++c)
        if (std::abs(crossings[k + p][c] - crossings[k][c]) > tol) periodic = false;
    if (periodic) return p;
  }
  return 0;
}

}  // namespace crnldp
