#pragma once

// Core data model: complexes, reactions, networks, weight vectors and support sets.
// Everything here is exact (integers and rationals); rate constants are the only reals.

#include "crnldp/errors.hpp"
#include "crnldp/rational.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace crnldp {

/// Subset of species indices, stored as a bitmask (d <= 64).
class SupportSet {
 public:
  SupportSet() = default;
  SupportSet(std::uint64_t mask, std::size_t dimension) : mask_(mask), dimension_(dimension) {}

  static SupportSet full(std::size_t d) {
    return {d >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1, d};
  }
  static SupportSet of(std::initializer_list<std::size_t> indices, std::size_t d) {
    std::uint64_t m = 0;
    for (auto i : indices) m |= std::uint64_t{1} << i;
    return {m, d};
  }

  bool contains(std::size_t i) const { return (mask_ >> i) & 1U; }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
  bool empty() const { return mask_ == 0; }
  std::uint64_t mask() const { return mask_; }
  std::size_t dimension() const { return dimension_; }
  bool is_full() const { return *this == full(dimension_); }

  bool subset_of(const SupportSet& other) const { return (mask_ & ~other.mask_) == 0; }
  bool intersects(const SupportSet& other) const { return (mask_ & other.mask_) != 0; }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dimension_; ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }

  /// pi_P: keeps the coordinates in P, in increasing index order.
  template <typename T>
  std::vector<T> project(const std::vector<T>& v) const {
    std::vector<T> out;
    out.reserve(size());
    for (std::size_t i = 0; i < dimension_; ++i)
      if (contains(i)) out.push_back(v[i]);
    return out;
  }

  /// Inverse of project: zero outside P.
  template <typename T>
  std::vector<T> embed(const std::vector<T>& v) const {
    std::vector<T> out(dimension_, T(0));
    std::size_t k = 0;
    for (std::size_t i = 0; i < dimension_; ++i)
      if (contains(i)) out[i] = v[k++];
    return out;
  }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::uint64_t mask_ = 0;
  std::size_t dimension_ = 0;
};

/// Species multiplicities; the zero vector is the empty complex.
struct Complex {
  std::vector<int> coefficients;

  Complex() = default;
  explicit Complex(std::vector<int> c) : coefficients(std::move(c)) {}

  std::size_t size() const { return coefficients.size(); }
  int operator[](std::size_t i) const { return coefficients[i]; }
  bool is_empty() const {
    return std::all_of(coefficients.begin(), coefficients.end(), [](int c) { return c == 0; });
  }
  int l1_norm() const { return std::accumulate(coefficients.begin(), coefficients.end(), 0); }

  SupportSet support() const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < coefficients.size(); ++i)
      if (coefficients[i] != 0) m |= std::uint64_t{1} << i;
    return {m, coefficients.size()};
  }

  RationalVector as_rational() const {
    RationalVector v;
    v.reserve(size());
    for (int c : coefficients) v.emplace_back(c);
    return v;
  }

  friend bool operator==(const Complex&, const Complex&) = default;
  friend auto operator<=>(const Complex&, const Complex&) = default;
};

struct Reaction {
  Complex input;
  Complex output;
  double rate_constant = 1.0;

  Reaction reversed(double k) const { return {output, input, k}; }

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

/// c^r = c_out - c_in.
inline std::vector<int> reaction_vector(const Reaction& r) {
  std::vector<int> c(r.input.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = r.output[i] - r.input[i];
  return c;
}

/// Immutable species/reaction container. Construction does not check invariants
/// (so that validate() can describe a malformed network); use Network::checked.
class Network {
 public:
  Network() = default;
  Network(std::vector<std::string> species, std::vector<Reaction> reactions)
      : species_(std::move(species)), reactions_(std::move(reactions)) {}

  /// Builds and validates; throws ValidationError listing every violation.
  static Network checked(std::vector<std::string> species, std::vector<Reaction> reactions);

  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(std::size_t r) const { return reactions_[r]; }
  std::size_t dimension() const { return species_.size(); }
  std::size_t size() const { return reactions_.size(); }

  std::size_t species_index(const std::string& name) const {
    auto it = std::find(species_.begin(), species_.end(), name);
    if (it == species_.end()) throw Error("unknown species '" + name + "'");
    return static_cast<std::size_t>(it - species_.begin());
  }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
};

struct ValidationIssue {
  std::string location;  // "species", "reaction 3", ...
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }

  std::string describe() const {
    std::ostringstream os;
    for (const auto& i : issues) os << i.location << ": " << i.message << '\n';
    return os.str();
  }
};

inline ValidationReport validate(const Network& net) {
  ValidationReport report;
  const auto d = net.dimension();
  if (d == 0) report.issues.push_back({"species", "network has no species"});
  if (d > 64) report.issues.push_back({"species", "more than 64 species are not supported"});
  if (net.size() == 0) report.issues.push_back({"reactions", "network has no reactions"});
  std::set<std::string> seen;
  for (const auto& s : net.species()) {
    if (s.empty()) report.issues.push_back({"species", "empty species name"});
    if (!seen.insert(s).second) report.issues.push_back({"species", "duplicate species '" + s + "'"});
  }
  for (std::size_t r = 0; r < net.size(); ++r) {
    const auto& rx = net.reaction(r);
    const std::string where = "reaction " + std::to_string(r);
    if (!(rx.rate_constant > 0)) report.issues.push_back({where, "nonpositive rate constant"});
    bool dims_ok = true;
    for (const auto* c : {&rx.input, &rx.output}) {
      if (c->size() != d) {
        report.issues.push_back({where, "dimension mismatch: complex has " + std::to_string(c->size()) +
                                            " entries, network has " + std::to_string(d) + " species"});
        dims_ok = false;
        continue;
      }
      for (std::size_t i = 0; i < d; ++i)
        if ((*c)[i] < 0)
          report.issues.push_back({where, "negative multiplicity for species '" + net.species()[i] + "'"});
    }
    if (dims_ok && rx.input == rx.output) report.issues.push_back({where, "no-op reaction (input equals output)"});
  }
  return report;
}

inline Network Network::checked(std::vector<std::string> species, std::vector<Reaction> reactions) {
  Network net(std::move(species), std::move(reactions));
  if (auto report = validate(net); !report.ok()) throw ValidationError(report.describe());
  return net;
}

/// R(P): reactions whose input support lies in P. Returned as reaction indices.
inline std::vector<std::size_t> restricted_reactions(const Network& net, const SupportSet& P) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < net.size(); ++r)
    if (net.reaction(r).input.support().subset_of(P)) out.push_back(r);
  return out;
}

/// Positive weights normalized to sum d. Normalization makes positive rescalings identical.
class WeightVector {
 public:
  explicit WeightVector(RationalVector a) : a_(std::move(a)) {
    if (a_.empty()) throw Error("weight vector must be nonempty");
    Rational total = 0;
    for (const auto& x : a_) {
      if (x <= 0) throw Error("weight vector entries must be positive");
      total += x;
    }
    const Rational scale = Rational(static_cast<long long>(a_.size())) / total;
    for (auto& x : a_) x *= scale;
  }

  static WeightVector ones(std::size_t d) { return WeightVector(RationalVector(d, Rational(1))); }

  std::size_t size() const { return a_.size(); }
  const Rational& operator[](std::size_t i) const { return a_[i]; }
  const RationalVector& values() const { return a_; }
  std::vector<double> as_double() const { return to_double(a_); }
  bool is_ones() const {
    return std::all_of(a_.begin(), a_.end(), [](const Rational& x) { return x == 1; });
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  RationalVector a_;
};

/// c^{r,a}_i = c^r_i a_i.
inline RationalVector weighted_reaction_vector(const Reaction& r, const WeightVector& a) {
  const auto c = reaction_vector(r);
  RationalVector out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = Rational(c[i]) * a[i];
  return out;
}

inline std::vector<double> weighted_reaction_vector_double(const Reaction& r, const std::vector<double>& a) {
  const auto c = reaction_vector(r);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] * a[i];
  return out;
}

}  // namespace crnldp
