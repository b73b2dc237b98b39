#pragma once

// Signed log-space accumulation: sums of terms s_k * exp(l_k) without overflow.

#include <cmath>
#include <limits>

namespace crnldp {

/// sign * exp(log_magnitude); sign 0 means the value is exactly zero (or cancelled).
struct SignedLog {
  int sign = 0;
  double log_magnitude = -std::numeric_limits<double>::infinity();
  bool cancelled = false;  // positive and negative parts agreed to within the cancellation tolerance

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
};

/// Streaming log-sum-exp, one accumulator per sign.
class SignedLogSum {
 public:
  explicit SignedLogSum(double cancel_tol = 1e-12) : cancel_tol_(cancel_tol) {}

  void add(int sign, double log_magnitude) {
    if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) return;
    (sign > 0 ? pos_ : neg_).add(log_magnitude);
  }
  void add(double value) {
    if (value != 0) add(value > 0 ? 1 : -1, std::log(std::abs(value)));
  }

  SignedLog result() const {
    const double lp = pos_.log_sum();
    const double ln = neg_.log_sum();
    const double ninf = -std::numeric_limits<double>::infinity();
    if (lp == ninf && ln == ninf) return {};
    if (ln == ninf) return {1, lp};
    if (lp == ninf) return {-1, ln};
    const double hi = std::max(lp, ln);
    const double gap = std::abs(lp - ln);
    if (gap <= cancel_tol_ * std::max(1.0, std::abs(hi))) return {0, ninf, true};
    // log(e^hi - e^lo) = hi + log(-expm1(lo - hi))
    return {lp > ln ? 1 : -1, hi + std::log(-std::expm1(-gap))};
  }

 private:
  struct Acc {
    double max = -std::numeric_limits<double>::infinity();
    double scaled = 0;  // sum of exp(l - max)
    void add(double l) {
      if (l <= max) {
        scaled += std::exp(l - max);
      } else {
        scaled = scaled * std::exp(max - l) + 1.0;
        max = l;
      }
    }
    double log_sum() const { return scaled == 0 ? -std::numeric_limits<double>::infinity() : max + std::log(scaled); }
  };
  Acc pos_, neg_;
  double cancel_tol_;
};

}  // namespace crnldp
