#pragma once

// Quasipotential estimates: discretized-action minimization over paths, the
// one-dimensional birth-death oracle, and SSA transition-time statistics.

#include "crnldp/dynamics.hpp"
#include "crnldp/errors.hpp"
#include "crnldp/ldp.hpp"
#include "crnldp/model.hpp"
#include "crnldp/parallel.hpp"
#include "crnldp/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

namespace crnldp {

// ---------------------------------------------------------------------------
// Limited-memory BFGS with box clamping

struct LbfgsOptions {
  int max_iter = 500;
  int memory = 8;
  double grad_tol = 1e-7;
  double rel_tol = 1e-11;  // stop when the relative decrease over an iteration falls below this
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

/// f(x, grad) returns the objective and fills grad; +infinity marks infeasible points.
inline LbfgsResult lbfgs_minimize(const std::function<double(const std::vector<double>&, std::vector<double>&)>& f,
                                  std::vector<double> x, const std::vector<double>& lo,
                                  const std::vector<double>& hi, const LbfgsOptions& opt = {}) {
  const std::size_t n = x.size();
  auto clamp = [&](std::vector<double>& y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(y[i], lo[i], hi[i]);
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  };
  clamp(x);
  std::vector<double> g(n);
  double fx = f(x, g);
  LbfgsResult res;
  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;
  for (int it = 0; it < opt.max_iter && std::isfinite(fx); ++it) {
    res.iterations = it + 1;
    // projected gradient: components pushing into an active bound do not count
    double pg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool pinned = (x[i] <= lo[i] && g[i] > 0) || (x[i] >= hi[i] && g[i] < 0);
      if (!pinned) pg = std::max(pg, std::abs(g[i]));
    }
    if (pg <= opt.grad_tol) {
      res.converged = true;
      break;
    }
    // two-loop recursion
    std::vector<double> q = g;
    std::vector<double> alpha(S.size());
    for (std::size_t k = S.size(); k-- > 0;) {
      alpha[k] = rho[k] * dot(S[k], q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * Y[k][i];
    }
    const double gamma = S.empty() ? 1.0 / std::max(1.0, std::sqrt(dot(g, g))) : dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
    for (auto& qi : q) qi *= gamma;
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = rho[k] * dot(Y[k], q);
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * S[k][i];
    }
    std::vector<double> dir(n);
    for (std::size_t i = 0; i < n; ++i) dir[i] = -q[i];
    if (dot(dir, g) >= 0) {
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i] * gamma;
      S.clear();
      Y.clear();
      rho.clear();
    }
    double step = 1;
    std::vector<double> xn(n), gn(n);
    double fn = fx;
    bool accepted = false;
    for (int bt = 0; bt < 50; ++bt) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * dir[i];
      clamp(xn);
      double decrease = 0;
      for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (xn[i] - x[i]);
      fn = f(xn, gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      step /= 2;
    }
    if (!accepted) break;
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = xn[i] - x[i], y[i] = gn[i] - g[i];
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1 / sy);
      if (static_cast<int>(S.size()) > opt.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    const double rel = (fx - fn) / std::max(1e-300, std::max(std::abs(fx), std::abs(fn)));
    x = std::move(xn);
    g = std::move(gn);
    fx = fn;
    if (rel < opt.rel_tol && it > 5) {
      res.converged = true;
      break;
    }
  }
  res.x = std::move(x);
  res.value = fx;
  return res;
}

// ---------------------------------------------------------------------------
// Discretized action with its gradient

/// One segment: dt L(lambda((a + b) / 2), (b - a) / dt) and its partial derivatives.
struct SegmentCost {
  double value = 0;
  std::vector<double> d_from, d_to;
  double d_dt = 0;
};

inline SegmentCost segment_cost(const Network& net, const std::vector<std::vector<double>>& vecs, const State& a,
                                const State& b, double dt, const LagrangianOptions& lopt = {}) {
  const std::size_t d = a.size();
  State mid(d);
  std::vector<double> xi(d);
  for (std::size_t i = 0; i < d; ++i) mid[i] = (a[i] + b[i]) / 2, xi[i] = (b[i] - a[i]) / dt;
  const auto lam = mass_action_rates(net, mid);
  const auto L = lagrangian(lam, vecs, xi, lopt);
  SegmentCost out;
  out.value = L.value * dt;
  out.d_from.assign(d, 0);
  out.d_to.assign(d, 0);
  if (!std::isfinite(out.value) || !L.argmax_theta) return out;
  const auto& th = *L.argmax_theta;
  std::vector<double> common(d, 0);
  for (std::size_t r = 0; r < net.size(); ++r) {
    if (lam[r] == 0) continue;
    double tc = 0;
    for (std::size_t i = 0; i < d; ++i) tc += th[i] * vecs[r][i];
    const double dL_dlam = -std::expm1(tc);
    const auto& in = net.reaction(r).input;
    for (std::size_t i = 0; i < d; ++i)
      if (in[i] > 0) common[i] += dL_dlam * in[i] * lam[r] / mid[i];
  }
  double th_xi = 0;
  for (std::size_t i = 0; i < d; ++i) {
    out.d_to[i] = th[i] + dt / 2 * common[i];
    out.d_from[i] = -th[i] + dt / 2 * common[i];
    th_xi += th[i] * xi[i];
  }
  out.d_dt = L.value - th_xi;
  return out;
}

// ---------------------------------------------------------------------------
// Path optimization

struct PathOptimizationProblem {
  State from, to;             // centers of A and B
  double set_radius = 1e-3;   // A and B are L-infinity balls; their centers stand in for them
  State domain_lo, domain_hi; // box D; empty means (0, 10 max(|from|, |to|)]
  std::size_t n_points = 32;  // nodes including both endpoints
  std::vector<double> T_grid; // empty means 8 geometric values over [T_flow / 4, 16 T_flow]
  std::size_t restarts = 2;   // perturbed starts per duration, on top of the straight line
  double max_segment_factor = 4;  // segments longer than this multiple of the straight-line spacing are rejected
  std::uint64_t seed = 1;
  LbfgsOptions lbfgs;
  unsigned threads = 0;
};

struct QuasipotentialRun {
  double T_start = 0;
  std::size_t restart = 0;
  double initial_value = 0;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

struct QuasipotentialEstimate {
  double value = 0;
  Trajectory path;
  double T_star = 0;
  double initial_value = 0;  // straight-line action at the best starting duration
  bool no_descent = false;   // no run improved on its starting path
  bool boundary_grazing = false;
  std::vector<QuasipotentialRun> runs;
};

namespace detail {

inline double path_length(const State& a, const State& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (b[i] - a[i]) * (b[i] - a[i]);
  return std::sqrt(s);
}

/// Time scale of the flow along the straight segment from a to b.
inline double flow_time(const Network& net, const State& a, const State& b) {
  const double len = path_length(a, b);
  double speed = 0;
  const int n = 32;
  for (int k = 0; k <= n; ++k) {
    State z(a.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = a[i] + (b[i] - a[i]) * k / n;
    const auto f = mass_action_field(net, z);
    double s = 0;
    for (double fi : f) s += fi * fi;
    speed += std::sqrt(s) / (n + 1);
  }
  return std::max(len / std::max(speed, 1e-12), 1e-6);
}

}  // namespace detail

inline std::vector<double> default_T_grid(const Network& net, const State& from, const State& to) {
  const double tf = detail::flow_time(net, from, to);
  std::vector<double> grid;
  for (int k = 0; k < 8; ++k) grid.push_back(tf / 4 * std::pow(64.0, k / 7.0));
  return grid;
}

inline QuasipotentialEstimate minimize_action(const Network& net, const PathOptimizationProblem& prob) {
  const std::size_t d = net.dimension();
  if (prob.from.size() != d || prob.to.size() != d) throw Error("endpoint dimension mismatch");
  if (prob.n_points < 8) throw Error("paths need at least 8 nodes");
  for (std::size_t i = 0; i < d; ++i)
    if (!(prob.from[i] > 0) || !(prob.to[i] > 0)) throw Error("endpoints must lie in the open orthant");
  QuasipotentialEstimate est;
  if (detail::path_length(prob.from, prob.to) == 0) {
    est.path.times = {0, 1};
    est.path.states = {prob.from, prob.to};
    est.T_star = 0;
    return est;
  }
  State lo = prob.domain_lo, hi = prob.domain_hi;
  if (lo.empty()) lo.assign(d, 1e-8);
  if (hi.empty()) {
    double m = 0;
    for (std::size_t i = 0; i < d; ++i) m = std::max({m, prob.from[i], prob.to[i]});
    hi.assign(d, 10 * m);
  }
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = std::max(lo[i], 1e-12);
    if (prob.from[i] < lo[i] || prob.from[i] > hi[i] || prob.to[i] < lo[i] || prob.to[i] > hi[i])
      throw Error("endpoints must lie inside the domain");
  }
  const auto T_grid = prob.T_grid.empty() ? default_T_grid(net, prob.from, prob.to) : prob.T_grid;
  const std::size_t n = prob.n_points, interior = n - 2, segs = n - 1;
  const std::size_t nvar = interior * d + segs;
  const auto vecs = reaction_vectors(net);
  // long segments let the midpoint rule step over barriers
  const double max_segment =
      prob.max_segment_factor * detail::path_length(prob.from, prob.to) / static_cast<double>(segs);

  // variables: log z for interior nodes, then log dt per segment
  auto unpack = [&](const std::vector<double>& u, std::vector<State>& z, std::vector<double>& dt) {
    z.assign(n, State(d));
    z.front() = prob.from;
    z.back() = prob.to;
    for (std::size_t k = 0; k < interior; ++k)
      for (std::size_t i = 0; i < d; ++i) z[k + 1][i] = std::exp(u[k * d + i]);
    dt.resize(segs);
    for (std::size_t k = 0; k < segs; ++k) dt[k] = std::exp(u[interior * d + k]);
  };
  auto objective = [&](const std::vector<double>& u, std::vector<double>& grad) {
    std::vector<State> z;
    std::vector<double> dt;
    unpack(u, z, dt);
    grad.assign(nvar, 0);
    double total = 0;
    for (std::size_t k = 0; k < segs; ++k)
      if (detail::path_length(z[k], z[k + 1]) > max_segment) return kInf;
    for (std::size_t k = 0; k < segs; ++k) {
      const auto sc = segment_cost(net, vecs, z[k], z[k + 1], dt[k]);
      if (!std::isfinite(sc.value)) return kInf;
      total += sc.value;
      for (std::size_t i = 0; i < d; ++i) {
        if (k >= 1) grad[(k - 1) * d + i] += sc.d_from[i] * z[k][i];
        if (k + 1 <= interior) grad[k * d + i] += sc.d_to[i] * z[k + 1][i];
      }
      grad[interior * d + k] = sc.d_dt * dt[k];
    }
    return total;
  };
  std::vector<double> blo(nvar), bhi(nvar);
  for (std::size_t k = 0; k < interior; ++k)
    for (std::size_t i = 0; i < d; ++i) blo[k * d + i] = std::log(lo[i]), bhi[k * d + i] = std::log(hi[i]);
  for (std::size_t k = 0; k < segs; ++k) {
    blo[interior * d + k] = std::log(T_grid.front() / segs) - 30;
    bhi[interior * d + k] = std::log(T_grid.back() * 16);
  }

  struct Outcome {
    QuasipotentialRun run;
    std::vector<double> u;
  };
  const std::size_t per_T = 1 + prob.restarts;
  std::vector<Outcome> outcomes(T_grid.size() * per_T);
  parallel_for(outcomes.size(), prob.threads, [&](std::size_t job) {
    const std::size_t ti = job / per_T, rs = job % per_T;
    const double T = T_grid[ti];
    Rng rng(prob.seed, job);
    std::vector<double> u(nvar);
    // restarts bend the straight line by a few smooth sine modes
    std::vector<double> modes(3 * d, 0.0);
    if (rs > 0)
      for (auto& m : modes) m = 0.1 * detail::path_length(prob.from, prob.to) * rng.normal();
    for (std::size_t k = 0; k < interior; ++k) {
      const double s = static_cast<double>(k + 1) / static_cast<double>(segs);
      for (std::size_t i = 0; i < d; ++i) {
        double zi = prob.from[i] + s * (prob.to[i] - prob.from[i]);
        for (int m = 1; m <= 3; ++m) zi += modes[(m - 1) * d + i] * std::sin(m * M_PI * s) / m;
        u[k * d + i] = std::clamp(std::log(std::max(zi, lo[i])), blo[k * d + i], bhi[k * d + i]);
      }
    }
    for (std::size_t k = 0; k < segs; ++k) u[interior * d + k] = std::log(T / static_cast<double>(segs));
    std::vector<double> g;
    Outcome out;
    out.run.T_start = T;
    out.run.restart = rs;
    out.run.initial_value = objective(u, g);
    const auto r = lbfgs_minimize(objective, u, blo, bhi, prob.lbfgs);
    out.run.value = r.value;
    out.run.iterations = r.iterations;
    out.run.converged = r.converged;
    out.u = r.x;
    outcomes[job] = std::move(out);
  });

  std::size_t best = 0;
  bool improved = false;
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    const auto& o = outcomes[j].run;
    if (o.value < o.initial_value) improved = true;
    if (o.value < outcomes[best].run.value) best = j;  // ties keep the smaller T and the earlier restart
    est.runs.push_back(o);
  }
  est.initial_value = kInf;
  for (std::size_t j = 0; j < outcomes.size(); j += per_T)
    est.initial_value = std::min(est.initial_value, outcomes[j].run.initial_value);
  est.no_descent = !improved;
  const auto& bu = outcomes[best].u;
  est.value = std::max(0.0, outcomes[best].run.value);
  std::vector<State> z;
  std::vector<double> dt;
  unpack(bu, z, dt);
  est.path.states = z;
  est.path.times.assign(1, 0.0);
  for (double h : dt) est.path.times.push_back(est.path.times.back() + h);
  est.T_star = est.path.times.back();
  for (std::size_t k = 0; k < interior * d; ++k) {
    const double tol = 1e-6;
    if (bu[k] <= blo[k] + tol || bu[k] >= bhi[k] - tol) est.boundary_grazing = true;
  }
  return est;
}

// ---------------------------------------------------------------------------
// One-dimensional birth-death oracle

namespace detail {

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Integral of log(lambda_minus / lambda_plus) from x_from to x_to, clamped at 0.
inline double birth_death_quasipotential(const std::function<double(double)>& birth,
                                         const std::function<double(double)>& death, double x_from, double x_to,
                                         double tol = 1e-12) {
  if (x_from == x_to) return 0;
  auto f = [&](double u) {
    const double bp = birth(u), dm = death(u);
    if (!(bp > 0) || !(dm > 0)) throw RateVanishes("birth or death rate vanishes on the interval");
    return std::log(dm / bp);
  };
  const double a = std::min(x_from, x_to), b = std::max(x_from, x_to);
  const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  double v = detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 50);
  if (x_to < x_from) v = -v;
  return std::max(0.0, v);
}

struct BirthDeathRates {
  std::function<double(double)> birth, death;
};

/// Splits a one-species network with jumps of size one into total birth and death rates.
inline BirthDeathRates birth_death_rates(const Network& net) {
  if (net.dimension() != 1) throw Error("birth-death rates need a one-species network");
  for (const auto& r : net.reactions()) {
    const int c = r.output[0] - r.input[0];
    if (c != 1 && c != -1) throw Error("birth-death rates need jumps of size one");
  }
  auto sum = [net](int sign) {
    return [net, sign](double x) {
      double s = 0;
      for (const auto& r : net.reactions())
        if (r.output[0] - r.input[0] == sign) s += mass_action_rate(r, State{x});
      return s;
    };
  };
  return {sum(1), sum(-1)};
}

// ---------------------------------------------------------------------------
// Transition statistics

struct Box {
  State lo, hi;
  bool contains(const State& x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
  State center() const {
    State c(lo.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (lo[i] + hi[i]) / 2;
    return c;
  }
};

struct TransitionRow {
  double volume = 0;
  std::size_t from = 0, to = 0;  // box indices
  std::size_t trials = 0, transitioned = 0;
  double median = 0;               // median first-entrance time; a lower bound when censored
  bool censored = false;           // fewer than half the trials arrived before T_max
  double scaled_log_median = 0;    // (1/v) log median
  std::vector<double> times;       // first-entrance times, T_max for censored trials
};

/// First-entrance times from the center of one box into the other, in both directions.
inline std::vector<TransitionRow> transition_statistics(const Network& net, const std::vector<double>& volumes,
                                                        const std::vector<Box>& boxes, double T_max,
                                                        std::size_t trials, std::uint64_t seed,
                                                        unsigned threads = 0) {
  if (boxes.size() != 2) throw Error("transition statistics need exactly two boxes");
  std::vector<TransitionRow> rows;
  for (std::size_t vi = 0; vi < volumes.size(); ++vi) {
    for (std::size_t dir = 0; dir < 2; ++dir) {
      const double v = volumes[vi];
      const Box& start = boxes[dir];
      const Box& target = boxes[1 - dir];
      TransitionRow row;
      row.volume = v;
      row.from = dir;
      row.to = 1 - dir;
      row.trials = trials;
      row.times.assign(trials, T_max);
      std::vector<char> hit(trials, 0);
      parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(seed, (vi << 40) | (dir << 32) | t);
        State x(net.dimension());
        ssa_run(net, v, counts_from_concentration(start.center(), v), T_max, rng,
                [&](double time, const Counts& n, std::size_t) {
                  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(n[i]) / v;
                  if (target.contains(x)) {
                    row.times[t] = time;
                    hit[t] = 1;
                    return false;
                  }
                  return true;
                });
      });
      row.transitioned = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
      row.median = quantile(row.times, 0.5);
      row.censored = 2 * row.transitioned < trials;
      row.scaled_log_median = std::log(row.median) / v;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace crnldp
