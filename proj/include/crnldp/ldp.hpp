#pragma once

// Large-deviations machinery: toric coordinates, the Lyapunov function U_a and
// its drifts, the Lagrangian (Legendre transform), the path action, the
// constructive constants of the stability proof, and the covering cells.

#include "crnldp/dynamics.hpp"
#include "crnldp/errors.hpp"
#include "crnldp/geometry.hpp"
#include "crnldp/logspace.hpp"
#include "crnldp/model.hpp"
#include "crnldp/random.hpp"
#include "crnldp/topology.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace crnldp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Toric coordinates z = theta^w

struct ToricPoint {
  double log_theta = 0;   // log theta > 0; theta itself overflows for the radii of interest
  std::vector<double> w;  // unit vector

  double theta() const { return std::exp(log_theta); }
};

inline ToricPoint toric_decompose(const std::vector<double>& z) {
  ToricPoint tp;
  tp.w.resize(z.size());
  double norm2 = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] > 0)) throw Error("toric coordinates need a strictly positive point");
    tp.w[i] = std::log(z[i]);
    norm2 += tp.w[i] * tp.w[i];
  }
  if (norm2 == 0) throw UnitPoint("z = (1,...,1) has no toric direction");
  tp.log_theta = std::sqrt(norm2);
  for (auto& wi : tp.w) wi /= tp.log_theta;
  return tp;
}

inline ToricPoint toric_point(std::vector<double> w, double log_theta) {
  double norm = 0;
  for (double x : w) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0) throw Error("toric direction must be nonzero");
  for (auto& x : w) x /= norm;
  return {log_theta, std::move(w)};
}

inline std::vector<double> toric_compose(const ToricPoint& tp) {
  std::vector<double> z(tp.w.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::exp(tp.log_theta * tp.w[i]);
  return z;
}

// ---------------------------------------------------------------------------
// Lyapunov function U_a(x) = d + 1 + sum_i a_i x_i (log x_i - 1)

namespace detail {
inline double xlogx_minus_x(double x) { return x > 0 ? x * (std::log(x) - 1) : 0.0; }

// g(x + h) - g(x) for g(x) = x (log x - 1), without cancellation.
inline double xlogx_increment(double x, double h) {
  if (h == 0) return 0;
  if (x <= 0) return h > 0 ? h * (std::log(h) - 1) : 0.0;
  const double t = h / x;
  // (x + h) log1p(t) - h = x [(1 + t) log1p(t) - t]
  double tail;
  if (std::abs(t) < 1e-4) tail = x * t * t * (0.5 - t / 6 + t * t / 12);
  else tail = (x + h) * std::log1p(t) - h;
  return h * std::log(x) + tail;
}
}  // namespace detail

inline double lyapunov_value(const std::vector<double>& a, const State& x) {
  double u = static_cast<double>(x.size()) + 1;
  for (std::size_t i = 0; i < x.size(); ++i) u += a[i] * detail::xlogx_minus_x(x[i]);
  return u;
}

inline double lyapunov_value(const WeightVector& a, const State& x) { return lyapunov_value(a.as_double(), x); }

/// a_i log x_i; -infinity where x_i = 0.
inline std::vector<double> lyapunov_gradient(const std::vector<double>& a, const State& x) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] > 0 ? a[i] * std::log(x[i]) : -kInf;
  return g;
}

inline std::vector<double> lyapunov_gradient(const WeightVector& a, const State& x) {
  return lyapunov_gradient(a.as_double(), x);
}

/// dU_a/dt along the mass-action flow at x = theta^w:
/// (log theta) sum_r k_r <w, c^{r,a}> theta^{<w, c_in^r>}, accumulated in signed log space.
inline SignedLog ode_drift_of_U(const Network& net, const std::vector<double>& a, const ToricPoint& tp) {
  SignedLogSum sum;
  const double log_log_theta = std::log(tp.log_theta);
  for (const auto& r : net.reactions()) {
    double s = 0, e = 0;
    for (std::size_t i = 0; i < tp.w.size(); ++i) {
      s += tp.w[i] * (r.output[i] - r.input[i]) * a[i];
      e += tp.w[i] * r.input[i];
    }
    if (s == 0) continue;
    sum.add(s > 0 ? 1 : -1, log_log_theta + std::log(r.rate_constant) + std::log(std::abs(s)) + tp.log_theta * e);
  }
  return sum.result();
}

inline SignedLog ode_drift_of_U(const Network& net, const WeightVector& a, const ToricPoint& tp) {
  return ode_drift_of_U(net, a.as_double(), tp);
}

/// log of the total jump intensity v Lambda_{r,v}(x) at real "counts" n = v x.
inline double log_propensity(const Reaction& r, double log_v, const std::vector<double>& x) {
  const double v = std::exp(log_v);
  double value = std::log(r.rate_constant) + log_v;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int j = 0; j < r.input[i]; ++j) {
      const double factor = x[i] - j / v;  // (n_i - j) / v
      if (factor <= 0) return -kInf;
      value += std::log(factor);
    }
  }
  return value;
}

/// log U_a(x + c/v) - log U_a(x), accurate for tiny jumps.
inline double log_lyapunov_increment(const std::vector<double>& a, const State& x, const std::vector<int>& c,
                                     double v) {
  const double u = lyapunov_value(a, x);
  double du = 0, scale = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (c[i] == 0) continue;
    const double t = a[i] * detail::xlogx_increment(x[i], c[i] / v);
    du += t;
    scale += std::abs(t);
  }
  if (std::abs(du) <= 1e-14 * scale) return 0.0;
  return std::log1p(du / u);
}

/// Sign and log-magnitude of L_v U_a^v(x) / U_a(x)^v = sum_r vLambda_{r,v}(x) expm1(v Delta_r).
/// The positive factor U_a(x)^v is dropped.
inline SignedLog generator_drift_sign(const Network& net, const std::vector<double>& a, double log_v, const State& x) {
  const double v = std::exp(log_v);
  SignedLogSum sum;
  for (const auto& r : net.reactions()) {
    const double lp = log_propensity(r, log_v, x);
    if (lp == -kInf) continue;
    const auto c = reaction_vector(r);
    bool leaves = false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] + c[i] / v < -1e-12 * std::max(1.0, std::abs(x[i]))) leaves = true;
    if (leaves) continue;  // propensity guards make this unreachable on lattice points
    const double delta = log_lyapunov_increment(a, x, c, v);
    const double y = v * delta;
    if (y == 0) continue;
    // log |expm1(y)|
    const double log_mag = y > 0 ? y + std::log(-std::expm1(-y)) : std::log(-std::expm1(y));
    sum.add(y > 0 ? 1 : -1, lp + log_mag);
  }
  return sum.result();
}

inline SignedLog generator_drift_sign(const Network& net, const WeightVector& a, double log_v, const State& x) {
  return generator_drift_sign(net, a.as_double(), log_v, x);
}

// ---------------------------------------------------------------------------
// Nonnegative least squares (Lawson-Hanson)

struct NnlsResult {
  Eigen::VectorXd coefficients;
  double residual = 0;  // ||A mu - b||_2
};

inline NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter = 0) {
  const Eigen::Index n = A.cols();
  if (max_iter <= 0) max_iter = 3 * static_cast<int>(n) + 30;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.norm());
  for (int outer = 0; outer < max_iter; ++outer) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < max_iter; ++inner) {
      std::vector<Eigen::Index> P;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)]) P.push_back(j);
      Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(P.size()));
      for (std::size_t k = 0; k < P.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(P[k]);
      Eigen::VectorXd z = Ap.completeOrthogonalDecomposition().solve(b);
      if (z.minCoeff() > 0) {
        x.setZero();
        for (std::size_t k = 0; k < P.size(); ++k) x[P[k]] = z[static_cast<Eigen::Index>(k)];
        break;
      }
      double alpha = 1;
      for (std::size_t k = 0; k < P.size(); ++k) {
        const double zk = z[static_cast<Eigen::Index>(k)];
        if (zk <= 0) alpha = std::min(alpha, x[P[k]] / (x[P[k]] - zk));
      }
      for (std::size_t k = 0; k < P.size(); ++k) {
        const double zk = z[static_cast<Eigen::Index>(k)];
        x[P[k]] += alpha * (zk - x[P[k]]);
        if (x[P[k]] <= 1e-15) {
          x[P[k]] = 0;
          passive[static_cast<std::size_t>(P[k])] = false;
        }
      }
    }
  }
  return {x, (A * x - b).norm()};
}

/// Euclidean projection of b onto the closed cone generated by the columns of A.
inline Eigen::VectorXd cone_projection(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.cols() == 0) return Eigen::VectorXd::Zero(b.size());
  return A * nnls(A, b).coefficients;
}

// ---------------------------------------------------------------------------
// Lagrangian L(lambda, xi) = sup_theta <theta, xi> - sum_r lambda_r (e^{<theta, c^r>} - 1)

enum class LagrangianStatus {
  Finite,        // maximizer found
  NotAttained,   // xi on the boundary of the cone: supremum finite but approached at infinity
  OffSpan,       // xi has a component outside span{c^r : lambda_r > 0}: +infinity
  OutsideCone,   // xi outside the cone of {c^r : lambda_r > 0}: +infinity
  NotConverged,  // iteration cap: reported as +infinity
};

inline const char* to_string(LagrangianStatus s) {
  switch (s) {
    case LagrangianStatus::Finite: return "finite";
    case LagrangianStatus::NotAttained: return "not-attained";
    case LagrangianStatus::OffSpan: return "off-span";
    case LagrangianStatus::OutsideCone: return "outside-cone";
    case LagrangianStatus::NotConverged: return "not-converged";
  }
  return "?";
}

struct LagrangianResult {
  double value = 0;
  std::optional<std::vector<double>> argmax_theta;
  bool feasible = true;
  LagrangianStatus status = LagrangianStatus::Finite;
  int iterations = 0;
  bool degenerate_span = false;
};

struct LagrangianOptions {
  int max_iter = 200;
  double grad_tol = 1e-13;  // relative
  double span_tol = 1e-10;
  double cone_tol = 1e-9;
};

inline LagrangianResult lagrangian(const std::vector<double>& rates, const std::vector<std::vector<double>>& vectors,
                                   const std::vector<double>& xi, const LagrangianOptions& opt = {}) {
  const auto d = static_cast<Eigen::Index>(xi.size());
  Eigen::VectorXd x(d);
  for (Eigen::Index i = 0; i < d; ++i) x[i] = xi[static_cast<std::size_t>(i)];
  std::vector<double> lam;
  std::vector<Eigen::VectorXd> cs;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    if (rates[r] < 0) throw Error("negative rate in Lagrangian");
    if (rates[r] == 0) continue;
    Eigen::VectorXd c(d);
    for (Eigen::Index i = 0; i < d; ++i) c[i] = vectors[r][static_cast<std::size_t>(i)];
    if (c.norm() == 0) continue;
    lam.push_back(rates[r]);
    cs.push_back(std::move(c));
  }
  LagrangianResult res;
  const double scale = 1 + x.norm();
  if (lam.empty()) {
    if (x.norm() == 0) {
      res.argmax_theta = std::vector<double>(xi.size(), 0.0);
      return res;
    }
    res.value = kInf;
    res.feasible = false;
    res.status = LagrangianStatus::OffSpan;
    res.degenerate_span = true;
    return res;
  }
  const auto m = static_cast<Eigen::Index>(cs.size());
  Eigen::MatrixXd C(d, m);
  for (Eigen::Index r = 0; r < m; ++r) C.col(r) = cs[static_cast<std::size_t>(r)];

  // Restrict to span{c^r}.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Eigen::Index k = 0;
  while (k < sv.size() && sv[k] > opt.span_tol * sv[0]) ++k;
  const Eigen::MatrixXd B = svd.matrixU().leftCols(k);
  res.degenerate_span = k < d;
  if ((x - B * (B.transpose() * x)).norm() > opt.span_tol * scale) {
    res.value = kInf;
    res.feasible = false;
    res.status = LagrangianStatus::OffSpan;
    return res;
  }
  const Eigen::MatrixXd D = B.transpose() * C;  // reduced reaction vectors, k x m
  const Eigen::VectorXd y = B.transpose() * x;

  auto G = [&](const Eigen::VectorXd& phi) {
    double g = phi.dot(y);
    for (Eigen::Index r = 0; r < m; ++r) g -= lam[static_cast<std::size_t>(r)] * std::expm1(phi.dot(D.col(r)));
    return g;
  };
  double rate_scale = 0;
  for (Eigen::Index r = 0; r < m; ++r) rate_scale += lam[static_cast<std::size_t>(r)] * D.col(r).norm();
  const double gtol = opt.grad_tol * (y.norm() + rate_scale + 1);

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(k);
  double g_val = 0;
  int rejected_newton = 0;
  bool converged = false;
  bool stalled = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it + 1;
    Eigen::VectorXd grad = y;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index r = 0; r < m; ++r) {
      const double e = lam[static_cast<std::size_t>(r)] * std::exp(phi.dot(D.col(r)));
      grad -= e * D.col(r);
      H.noalias() += e * D.col(r) * D.col(r).transpose();
    }
    if (!grad.allFinite() || !H.allFinite()) break;
    const bool curved = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .minCoeff() >= 1e-10 * rate_scale;
    if (curved && (grad.norm() <= gtol || (stalled && grad.norm() <= 1e-6 * (y.norm() + rate_scale + 1)))) {
      converged = true;
      break;
    }
    if (stalled) break;
    Eigen::VectorXd dir;
    bool newton = rejected_newton < 3;
    if (newton) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) dir = ldlt.solve(grad);
      if (dir.size() == 0 || !dir.allFinite() || dir.dot(grad) <= 0) newton = false;
    }
    if (!newton) dir = grad / std::max(1.0, H.norm());
    double step = 1;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Eigen::VectorXd trial = phi + step * dir;
      const double g_trial = G(trial);
      if (std::isfinite(g_trial) && g_trial >= g_val + 1e-4 * step * dir.dot(grad)) {
        stalled = g_trial - g_val <= 1e-16 * std::max(1.0, std::abs(g_val));
        phi = trial;
        g_val = g_trial;
        accepted = true;
        break;
      }
      step /= 2;
    }
    if (newton && step < 1) ++rejected_newton;
    if (!accepted) stalled = true;
  }
  auto theta_full = [&]() {
    const Eigen::VectorXd th = B * phi;
    return std::vector<double>(th.data(), th.data() + th.size());
  };
  res.value = std::max(0.0, g_val);
  if (converged) {
    res.argmax_theta = theta_full();
    return res;
  }
  // No interior maximizer: decide whether xi lies in the closed cone of the reaction vectors.
  const Eigen::VectorXd proj = cone_projection(C, x);
  if ((proj - x).norm() > opt.cone_tol * scale) {
    res.value = kInf;
    res.feasible = false;
    res.status = LagrangianStatus::OutsideCone;
    return res;
  }
  if (stalled || std::isfinite(g_val)) {
    res.status = LagrangianStatus::NotAttained;
    res.argmax_theta = theta_full();
    return res;
  }
  res.value = kInf;
  res.feasible = false;
  res.status = LagrangianStatus::NotConverged;
  return res;
}

inline std::vector<std::vector<double>> reaction_vectors(const Network& net) {
  std::vector<std::vector<double>> out;
  for (const auto& r : net.reactions()) {
    const auto c = reaction_vector(r);
    out.emplace_back(c.begin(), c.end());
  }
  return out;
}

inline LagrangianResult lagrangian(const Network& net, const State& x, const std::vector<double>& xi,
                                   const LagrangianOptions& opt = {}) {
  return lagrangian(mass_action_rates(net, x), reaction_vectors(net), xi, opt);
}

// ---------------------------------------------------------------------------
// Action I = sum_k L(lambda(z_{k+1/2}), (z_{k+1} - z_k) / dt_k) dt_k

struct ActionOptions {
  double jump_bound = 1.0;  // |z_{k+1} - z_k|_1 above this flags the path as not absolutely continuous
  LagrangianOptions lagrangian;
};

struct ActionResult {
  double value = 0;
  std::vector<double> segment_values;
  bool finite = true;
  bool not_absolutely_continuous = false;
};

inline ActionResult action(const Network& net, const Trajectory& path, const ActionOptions& opt = {}) {
  if (path.size() < 2) throw Error("a path needs at least two nodes");
  ActionResult res;
  const auto vecs = reaction_vectors(net);
  const std::size_t d = net.dimension();
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    if (!(dt > 0)) throw Error("path times must increase");
    State mid(d);
    std::vector<double> xi(d);
    double jump = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const double a = path.states[k][i], b = path.states[k + 1][i];
      if (a < 0 || b < 0) throw NegativeConcentration("path leaves the nonnegative orthant");
      mid[i] = (a + b) / 2;
      xi[i] = (b - a) / dt;
      jump += std::abs(b - a);
    }
    if (jump > opt.jump_bound) res.not_absolutely_continuous = true;
    const auto L = lagrangian(mass_action_rates(net, mid), vecs, xi, opt.lagrangian);
    res.segment_values.push_back(L.value * dt);
    res.value += L.value * dt;
  }
  res.finite = std::isfinite(res.value);
  return res;
}

inline ActionResult action(const Network& net, const Trajectory& path, const State& x0,
                           const ActionOptions& opt = {}) {
  for (std::size_t i = 0; i < x0.size(); ++i)
    if (std::abs(path.states.front()[i] - x0[i]) > 1e-12 * std::max(1.0, std::abs(x0[i])))
      throw Error("path does not start at x0");
  return action(net, path, opt);
}

// ---------------------------------------------------------------------------
// Proof constants

struct ConstantOverrides {
  std::optional<double> K2, K3, zeta_star, c_star, K0;
};

struct ConstantLedger {
  std::size_t d = 0, m = 0;
  double c_star = 0;
  std::vector<double> kappa;
  double K1 = 0;
  double K2 = 0.25, K3 = 1, zeta_star = 1;
  double K5 = 0, K0 = 0;
  std::vector<double> log_C;  // log C_0 .. log C_{2d}; +inf once the chain overflows
  std::optional<double> rho0; // empirical stability radius, when measured
  std::optional<double> zeta_empirical;
  std::vector<std::string> configured;  // names of entries taken from configuration rather than computed

  double C(std::size_t j) const { return std::exp(log_C[j]); }
  bool is_configured(const std::string& name) const {
    return std::find(configured.begin(), configured.end(), name) != configured.end();
  }
  /// delta_j = C_{2j} / log theta and epsilon_j = C_{2j+1} / log theta.
  double delta(std::size_t j, double log_theta) const { return std::exp(log_C[2 * j] - std::log(log_theta)); }
  double epsilon(std::size_t j, double log_theta) const {
    return std::exp(log_C[2 * j + 1] - std::log(log_theta));
  }
};

/// xi(k) = k! k^{-k}, with xi(0) = 1.
inline double stirling_ratio(int k) {
  if (k <= 1) return 1.0;
  return std::exp(std::lgamma(k + 1.0) - k * std::log(static_cast<double>(k)));
}

inline ConstantLedger proof_constants(const Network& net, const WeightVector& a, const ConstantOverrides& ov = {}) {
  ConstantLedger L;
  L.d = net.dimension();
  L.m = net.size();
  const auto ad = a.as_double();
  double cs = 0;
  for (const auto& r : net.reactions()) {
    for (const auto& q : net.reactions()) {
      double s = 0;
      for (std::size_t i = 0; i < L.d; ++i) s += std::pow(r.input[i] - q.input[i], 2);
      cs = std::max(cs, std::sqrt(s));
    }
    double s = 0;
    for (std::size_t i = 0; i < L.d; ++i) s += std::pow((r.output[i] - r.input[i]) * ad[i], 2);
    cs = std::max(cs, std::sqrt(s));
  }
  L.c_star = cs;
  if (ov.c_star) {
    L.c_star = *ov.c_star;
    L.configured.push_back("c_star");
  }
  double kmax = 0, kmin = kInf;
  for (const auto& r : net.reactions()) {
    double kappa = 1;
    for (std::size_t i = 0; i < L.d; ++i) kappa *= stirling_ratio(r.input[i]);
    L.kappa.push_back(kappa);
    kmax = std::max(kmax, r.rate_constant);
    kmin = std::min(kmin, kappa * r.rate_constant);
  }
  L.K1 = kmax / kmin;
  L.configured.push_back("K2");
  L.configured.push_back("K3");
  L.configured.push_back("zeta_star");
  if (ov.K2) L.K2 = *ov.K2;
  if (ov.K3) L.K3 = *ov.K3;
  if (ov.zeta_star) L.zeta_star = *ov.zeta_star;
  L.K5 = 4 * L.K1 * L.K3 * std::exp(L.zeta_star);
  L.K0 = 4 * static_cast<double>(L.m) * L.K5 / L.K2;
  if (ov.K0) {
    L.K0 = *ov.K0;
    L.configured.push_back("K0");
  }
  L.log_C.resize(2 * L.d + 1);
  L.log_C[0] = std::log(2 * L.zeta_star / L.c_star);
  for (std::size_t j = 0; 2 * j + 1 <= 2 * L.d; ++j) {
    const double c2j = std::exp(L.log_C[2 * j]);
    L.log_C[2 * j + 1] = std::log(L.K0) + 2 * L.c_star * c2j;
    if (2 * j + 2 <= 2 * L.d) {
      const double lc = L.log_C[2 * j + 1];
      // log(C + 1e-3) = log C + log1p(1e-3 / C)
      L.log_C[2 * j + 2] = std::isfinite(lc) ? lc + std::log1p(1e-3 * std::exp(-lc)) : lc;
    }
  }
  return L;
}

// ---------------------------------------------------------------------------
// Covering cells (W*_{j,iota})^{eps_j, delta_j}

namespace detail {

inline Eigen::MatrixXd generator_matrix(const FaceLattice& lat, std::size_t f) {
  const auto& gens = lat.faces[f].normal_generators;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(lat.polytope.ambient_dim), static_cast<Eigen::Index>(gens.size()));
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (std::size_t i = 0; i < lat.polytope.ambient_dim; ++i)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(gens[j][i]);
  return A;
}

// Chordal distance from a unit vector u to the spherical cell Co(N(F)) cap S.
inline double sphere_distance_to_cell(const Eigen::MatrixXd& A, const Eigen::VectorXd& u) {
  const Eigen::VectorXd p = cone_projection(A, u);
  const double n = p.norm();
  if (n < 1e-14) return std::sqrt(2.0);  // the cone lies in the opposite half space
  return (u - p / n).norm();
}

}  // namespace detail

struct CoveringCell {
  std::size_t j = 0;     // face dimension
  std::size_t face = 0;  // index into the lattice
  friend bool operator==(const CoveringCell&, const CoveringCell&) = default;
};

/// All cells (W*_{j,iota})^{eps_j, delta_j} containing the unit direction w (in P coordinates).
/// Membership in the eroded-then-inflated set is decided by testing the nearest point of the
/// cell and points on the geodesic from it toward the cell's center.
inline std::vector<CoveringCell> covering_cells(const FaceLattice& lat, const ConstantLedger& ledger,
                                                const std::vector<double>& w_in, double log_theta,
                                                int geodesic_samples = 64) {
  if (!(log_theta > 0)) throw Error("theta must exceed 1");
  const auto dim = static_cast<Eigen::Index>(lat.polytope.ambient_dim);
  Eigen::VectorXd w(dim);
  for (Eigen::Index i = 0; i < dim; ++i) w[i] = w_in[static_cast<std::size_t>(i)];
  w.normalize();
  const std::size_t top = lat.polytope.ambient_dim - 1;
  std::vector<Eigen::MatrixXd> gens;
  for (std::size_t f = 0; f < lat.faces.size(); ++f) gens.push_back(detail::generator_matrix(lat, f));

  std::vector<CoveringCell> out;
  for (std::size_t f = 0; f < lat.faces.size(); ++f) {
    const auto& face = lat.faces[f];
    const std::size_t j = std::min(face.dim, ledger.log_C.size() / 2 - 1);
    const double delta = ledger.delta(j, log_theta);
    const double eps = ledger.epsilon(j, log_theta);
    const Eigen::VectorXd p = cone_projection(gens[f], w);
    if (p.norm() < 1e-14) continue;
    const Eigen::VectorXd u0 = p.normalized();
    if ((u0 - w).norm() >= delta) continue;
    if (face.dim == top) {
      out.push_back({face.dim, f});
      continue;
    }
    std::vector<std::size_t> boundary;
    for (std::size_t g = 0; g < lat.faces.size(); ++g) {
      const auto& G = lat.faces[g];
      if (g == f || G.point_indices.size() <= face.point_indices.size()) continue;
      if (std::includes(G.point_indices.begin(), G.point_indices.end(), face.point_indices.begin(),
                        face.point_indices.end()))
        boundary.push_back(g);
    }
    auto far_from_boundary = [&](const Eigen::VectorXd& u) {
      for (auto g : boundary)
        if (detail::sphere_distance_to_cell(gens[g], u) < eps) return false;
      return true;
    };
    Eigen::VectorXd center = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index c = 0; c < gens[f].cols(); ++c)
      if (c < static_cast<Eigen::Index>(face.facets.size())) center += gens[f].col(c).normalized();
    bool inside = far_from_boundary(u0);
    if (!inside && center.norm() > 1e-14) {
      center.normalize();
      for (int s = 1; s <= geodesic_samples && !inside; ++s) {
        const double t = static_cast<double>(s) / geodesic_samples;
        const Eigen::VectorXd u = ((1 - t) * u0 + t * center).normalized();
        if ((u - w).norm() >= delta) break;
        inside = far_from_boundary(u);
      }
    }
    if (inside) out.push_back({face.dim, f});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Empirical constants: zeta_* and rho_0

namespace detail {
// Uniform point on the probability simplex.
inline std::vector<double> simplex_point(Rng& rng, std::size_t d) {
  std::vector<double> e(d);
  double s = 0;
  for (auto& x : e) s += x = -std::log(rng.uniform_open());
  for (auto& x : e) x /= s;
  return e;
}
}  // namespace detail

/// zeta_r(v, x) = v U(x) log(U(x + c/v) / U(x)) - <grad_{r,v} U, c^{r,a}> for supp x = P.
inline double zeta_r(const Network& net, const std::vector<double>& a, std::size_t r, double v, const State& x) {
  const auto& rx = net.reaction(r);
  const auto c = reaction_vector(rx);
  double h = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cra = c[i] * a[i];
    if (cra == 0) continue;
    if (x[i] > 0) h += std::log(x[i]) * cra;
    else if (rx.output[i] > 0) h += std::log(c[i] / v) * cra;
  }
  return v * lyapunov_value(a, x) * log_lyapunov_increment(a, x, c, v) - h;
}

/// Largest |zeta_r| over random supports P, reactions r in R(P), volumes and lattice points.
inline double empirical_zeta_star(const Network& net, const std::vector<double>& a, std::size_t samples,
                                  std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t d = net.dimension();
  double best = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::uint64_t mask = 1 + rng.next() % ((std::uint64_t{1} << d) - 1);
    SupportSet P(mask, d);
    const auto RP = restricted_reactions(net, P);
    if (RP.empty()) continue;
    const std::size_t r = RP[rng.next() % RP.size()];
    const double v = std::exp(1 + 9 * rng.uniform());
    const double radius = std::exp(6 * rng.uniform());
    const auto e = detail::simplex_point(rng, P.size());
    State x(d, 0.0);
    std::size_t k = 0;
    bool ok = true;
    for (auto i : P.indices()) {
      const double n = std::max(1.0, std::round(v * radius * e[k++]));
      x[i] = n / v;
      if (n + reaction_vector(net.reaction(r))[i] < 0) ok = false;
    }
    if (!ok) continue;
    best = std::max(best, std::abs(zeta_r(net, a, r, v, x)));
  }
  return best;
}

/// A lattice point x = theta^w with |x|_1 = radius for a direction w drawn uniformly on the sphere.
inline std::optional<State> sample_standard_point(const Network& net, double radius, Rng& rng) {
  const std::size_t d = net.dimension();
  std::vector<double> w(d);
  double norm = 0;
  for (auto& x : w) norm += (x = rng.normal()) * x;
  norm = std::sqrt(norm);
  for (auto& x : w) x /= norm;
  if (std::all_of(w.begin(), w.end(), [](double x) { return x <= 0; })) return std::nullopt;
  auto l1 = [&](double lt) {
    double s = 0;
    for (double wi : w) s += std::exp(lt * wi);
    return s;
  };
  if (l1(0) >= radius) return std::nullopt;
  double lo = 0, hi = 1;
  while (l1(hi) < radius) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (l1(mid) < radius ? lo : hi) = mid;
  }
  State x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = std::exp(lo * w[i]);
  // snap to the lattice v^{-1} N when v = e^{radius} is small enough to matter
  const double v = std::exp(radius);
  if (v < 1e15)
    for (auto& xi : x) xi = std::max(1.0, std::round(v * xi)) / v;
  return x;
}

struct DriftScan {
  double rho0 = 0;
  std::size_t samples = 0;
  std::size_t positive = 0;
  bool verified = false;
};

/// Checks the generator drift sign at `samples` standard points with |x|_1 in [rho0, 10 rho0], v = e^{|x|_1}.
inline DriftScan scan_generator_drift(const Network& net, const std::vector<double>& a, double rho0,
                                      std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  DriftScan scan;
  scan.rho0 = rho0;
  while (scan.samples < samples) {
    const double radius = rho0 * (1 + 9 * rng.uniform());
    auto x = sample_standard_point(net, radius, rng);
    if (!x) continue;
    double l1 = 0;
    for (double xi : *x) l1 += xi;
    const auto s = generator_drift_sign(net, a, l1, *x);
    ++scan.samples;
    if (s.sign >= 0) ++scan.positive;
  }
  scan.verified = scan.positive == 0;
  return scan;
}

/// Smallest radius on the ladder 3d * 1.25^k (k < max_steps) at which every sampled point has negative drift.
inline std::optional<DriftScan> empirical_rho0(const Network& net, const std::vector<double>& a,
                                               std::size_t samples, std::uint64_t seed, int max_steps = 40) {
  double rho = 3.0 * static_cast<double>(net.dimension());
  for (int k = 0; k < max_steps; ++k, rho *= 1.25) {
    auto scan = scan_generator_drift(net, a, rho, samples, seed);
    if (scan.verified) return scan;
  }
  return std::nullopt;
}

}  // namespace crnldp
