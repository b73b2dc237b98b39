#pragma once

// Topological conditions: reaction classification, siphons, strong
// (P,a)-endotacticity, weight-vector search and the combined ASE report.

#include "crnldp/geometry.hpp"
#include "crnldp/lp.hpp"
#include "crnldp/model.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace crnldp {

enum class ReactionClass { Dissipative, Null, Explosive, NotInRP };

inline const char* to_string(ReactionClass c) {
  switch (c) {
    case ReactionClass::Dissipative: return "dissipative";
    case ReactionClass::Null: return "null";
    case ReactionClass::Explosive: return "explosive";
    case ReactionClass::NotInRP: return "not-in-R(P)";
  }
  return "?";
}

namespace detail {
inline bool output_leaves(const Reaction& r, const SupportSet& P) { return !r.output.support().subset_of(P); }

inline void check_in_RP(const Network& net, const SupportSet& P, std::size_t r) {
  if (!net.reaction(r).input.support().subset_of(P))
    throw NotInRP("reaction " + std::to_string(r) + " is not in R(P)");
}
}  // namespace detail

/// Def. of (w,a)-dissipative / null / explosive. w is a full d-vector.
inline ReactionClass classify_reaction(const Network& net, const SupportSet& P, const WeightVector& a,
                                       const RationalVector& w, std::size_t r) {
  detail::check_in_RP(net, P, r);
  const auto wp = P.project(w);
  if (std::all_of(wp.begin(), wp.end(), [](const Rational& x) { return x == 0; }))
    throw ZeroProjection("direction has zero projection onto P");
  if (detail::output_leaves(net.reaction(r), P)) return ReactionClass::Dissipative;
  const Rational s = dot(wp, P.project(weighted_reaction_vector(net.reaction(r), a)));
  if (s < 0) return ReactionClass::Dissipative;
  if (s == 0) return ReactionClass::Null;
  return ReactionClass::Explosive;
}

/// Floating-point direction; the product is compared against zero with an absolute tolerance.
inline ReactionClass classify_reaction(const Network& net, const SupportSet& P, const WeightVector& a,
                                       const std::vector<double>& w, std::size_t r, double tol = 1e-12) {
  detail::check_in_RP(net, P, r);
  const auto wp = P.project(w);
  if (std::all_of(wp.begin(), wp.end(), [](double x) { return x == 0; }))
    throw ZeroProjection("direction has zero projection onto P");
  if (detail::output_leaves(net.reaction(r), P)) return ReactionClass::Dissipative;
  const auto c = P.project(weighted_reaction_vector_double(net.reaction(r), a.as_double()));
  double s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) s += wp[i] * c[i];
  if (s < -tol) return ReactionClass::Dissipative;
  if (s <= tol) return ReactionClass::Null;
  return ReactionClass::Explosive;
}

// ---------------------------------------------------------------------------
// Siphons

struct SiphonReport {
  std::vector<SupportSet> minimal_siphons;
  bool asiphonic = true;
};

/// Every reaction with an output species in P also has an input species in P.
inline bool is_siphon(const Network& net, const SupportSet& P) {
  if (P.empty()) return false;
  for (const auto& r : net.reactions())
    if (r.output.support().intersects(P) && !r.input.support().intersects(P)) return false;
  return true;
}

inline SiphonReport find_siphons(const Network& net) {
  const std::size_t d = net.dimension();
  if (d > 24) throw Error("siphon enumeration limited to 24 species");
  std::vector<SupportSet> all;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << d); ++m) {
    SupportSet P(m, d);
    if (is_siphon(net, P)) all.push_back(P);
  }
  SiphonReport rep;
  for (const auto& P : all) {
    bool minimal = std::none_of(all.begin(), all.end(),
                                [&](const SupportSet& Q) { return Q != P && Q.subset_of(P); });
    if (minimal) rep.minimal_siphons.push_back(P);
  }
  std::sort(rep.minimal_siphons.begin(), rep.minimal_siphons.end(), [](const SupportSet& x, const SupportSet& y) {
    return std::pair(x.size(), x.mask()) < std::pair(y.size(), y.mask());
  });
  rep.asiphonic = rep.minimal_siphons.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Strong (P,a)-endotacticity

struct Violation {
  enum class Kind { Explosive, NoDissipative };
  Kind kind = Kind::Explosive;
  std::size_t face = 0;
  RationalVector direction;           // in P coordinates
  std::optional<std::size_t> reaction;  // absent for the all-null case
  ReactionClass cls = ReactionClass::Explosive;
};

struct EndotacticVerdict {
  bool holds = false;
  std::optional<WeightVector> witness_a;
  std::vector<Violation> violations;
  SupportSet support;
  bool degenerate_hull = false;
};

inline EndotacticVerdict is_strongly_endotactic(const FaceLattice& lat, const Network& net, const WeightVector& a) {
  const auto& poly = lat.polytope;
  const SupportSet& P = poly.support;
  EndotacticVerdict verdict;
  verdict.support = P;
  verdict.degenerate_hull = poly.degenerate();
  const std::size_t nl = poly.lineality.size();

  for (std::size_t fi = 0; fi < lat.faces.size(); ++fi) {
    const auto& face = lat.faces[fi];
    const auto RF = reactions_on_face(lat, fi);
    bool leaving = false;
    std::vector<RationalVector> inside;  // pi_P c^{r,a} for r with outputs in P
    std::vector<std::size_t> inside_ids;
    for (auto r : RF) {
      if (detail::output_leaves(net.reaction(r), P)) {
        leaving = true;
        continue;
      }
      inside.push_back(P.project(weighted_reaction_vector(net.reaction(r), a)));
      inside_ids.push_back(r);
    }
    // (i) no explosive reaction on the closed dual cone
    for (std::size_t k = 0; k < inside.size(); ++k) {
      for (const auto& n : face.normal_generators) {
        if (dot(n, inside[k]) > 0)
          verdict.violations.push_back({Violation::Kind::Explosive, fi, n, inside_ids[k], ReactionClass::Explosive});
      }
    }
    if (leaving) continue;
    // (ii) the all-null directions must miss the relative interior of the dual cone
    const std::size_t nf = face.facets.size();
    if (nf == 0) {
      std::vector<RationalVector> rows;
      for (const auto& c : inside) {
        RationalVector row(nl);
        for (std::size_t j = 0; j < nl; ++j) row[j] = dot(poly.lineality[j], c);
        rows.push_back(std::move(row));
      }
      auto kernel = null_space(std::move(rows), nl);
      if (!kernel.empty()) {
        RationalVector w(poly.ambient_dim);
        for (std::size_t j = 0; j < nl; ++j)
          for (std::size_t i = 0; i < w.size(); ++i) w[i] += kernel[0][j] * poly.lineality[j][i];
        verdict.violations.push_back(
            {Violation::Kind::NoDissipative, fi, primitive(w), std::nullopt, ReactionClass::Null});
      }
      continue;
    }
    // variables: lambda (nf, >= 0), mu (nl, free), t (free)
    const std::size_t nv = nf + nl + 1;
    LinearProgram lp(nv);
    for (std::size_t j = nf; j < nv; ++j) lp.free_var[j] = true;
    {
      RationalVector row(nv);
      for (std::size_t j = 0; j < nf; ++j) row[j] = 1;
      lp.add(std::move(row), Sense::Equal, 1);
    }
    for (std::size_t j = 0; j < nf; ++j) {
      RationalVector row(nv);
      row[j] = 1;
      row[nv - 1] = -1;
      lp.add(std::move(row), Sense::GreaterEqual, 0);
    }
    for (const auto& c : inside) {
      RationalVector row(nv);
      for (std::size_t j = 0; j < nf; ++j) row[j] = dot(lat.facet_normals[face.facets[j]], c);
      for (std::size_t j = 0; j < nl; ++j) row[nf + j] = dot(poly.lineality[j], c);
      lp.add(std::move(row), Sense::Equal, 0);
    }
    lp.objective[nv - 1] = 1;
    const auto sol = maximize(lp);
    if (sol.status == LpStatus::Optimal && sol.value > 0) {
      RationalVector w(poly.ambient_dim);
      for (std::size_t j = 0; j < nf; ++j)
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += sol.x[j] * lat.facet_normals[face.facets[j]][i];
      for (std::size_t j = 0; j < nl; ++j)
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += sol.x[nf + j] * poly.lineality[j][i];
      verdict.violations.push_back(
          {Violation::Kind::NoDissipative, fi, primitive(w), std::nullopt, ReactionClass::Null});
    }
  }
  verdict.holds = verdict.violations.empty();
  if (verdict.holds) verdict.witness_a = a;
  return verdict;
}

inline EndotacticVerdict is_strongly_endotactic(const Network& net, const SupportSet& P, const WeightVector& a) {
  return is_strongly_endotactic(face_lattice(net, P), net, a);
}

inline EndotacticVerdict is_strongly_endotactic(const Network& net, const WeightVector& a) {
  return is_strongly_endotactic(net, SupportSet::full(net.dimension()), a);
}

/// Sufficient condition: every facet normal n strictly decreases every reaction exposed by n.
inline bool satisfies_facet_cone_condition(const FaceLattice& lat, const Network& net, const WeightVector& a) {
  const auto& P = lat.polytope.support;
  if (lat.polytope.degenerate()) return false;
  for (const auto& face : lat.faces) {
    if (face.facets.size() != 1) continue;
    const auto& n = lat.facet_normals[face.facets[0]];
    for (auto r : detail::reactions_at(lat.polytope, face.point_indices)) {
      if (detail::output_leaves(net.reaction(r), P)) continue;
      if (dot(n, P.project(weighted_reaction_vector(net.reaction(r), a))) >= 0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Weight-vector search

struct SearchOptions {
  std::size_t lp_budget = 20000;
};

namespace detail {

// Row of <n, c^{r,a}> as a linear form in (a_1..a_d, s).
inline RationalVector weighted_row(const RationalVector& n_full, const std::vector<int>& c) {
  RationalVector row(c.size() + 1);
  for (std::size_t i = 0; i < c.size(); ++i) row[i] = n_full[i] * c[i];
  return row;
}

class WeightSearch {
 public:
  WeightSearch(const Network& net, const FaceLattice& lat, SearchOptions opt)
      : net_(net), lat_(lat), opt_(opt), d_(net.dimension()) {
    std::set<RationalVector> seen;
    for (std::size_t fi = 0; fi < lat.faces.size(); ++fi) {
      const auto& face = lat.faces[fi];
      for (auto r : reactions_on_face(lat, fi)) {
        const auto c = reaction_vector(net.reaction(r));
        for (const auto& n : face.normal_generators) {
          auto row = weighted_row(n, c);
          if (std::all_of(row.begin(), row.end(), [](const Rational& x) { return x == 0; })) continue;
          if (seen.insert(row).second) base_.push_back(std::move(row));
        }
      }
    }
  }

  std::optional<WeightVector> run(const Rational& eps) {
    eps_ = eps;
    // Witness candidates per face, pruned individually.
    candidates_.assign(lat_.faces.size(), {});
    for (std::size_t fi = 0; fi < lat_.faces.size(); ++fi) {
      const auto bar = dual_barycenter(lat_, fi);
      if (std::all_of(bar.begin(), bar.end(), [](const Rational& x) { return x == 0; })) return std::nullopt;
      for (auto r : reactions_on_face(lat_, fi)) {
        auto row = weighted_row(bar, reaction_vector(net_.reaction(r)));
        if (solve({row})) candidates_[fi].push_back(std::move(row));
        if (exhausted()) return std::nullopt;
      }
      if (candidates_[fi].empty()) return std::nullopt;
    }
    order_.resize(lat_.faces.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t x, std::size_t y) { return candidates_[x].size() < candidates_[y].size(); });
    std::vector<RationalVector> chosen;
    return dfs(0, chosen);
  }

  bool exhausted() const { return solves_ >= opt_.lp_budget; }

 private:
  std::optional<WeightVector> dfs(std::size_t depth, std::vector<RationalVector>& chosen) {
    if (depth == order_.size()) {
      auto a = solve(chosen);
      if (!a) return std::nullopt;
      WeightVector wv(*a);
      if (is_strongly_endotactic(lat_, net_, wv).holds) return wv;
      return std::nullopt;
    }
    const auto fi = order_[depth];
    for (const auto& row : candidates_[fi]) {
      // A witness already implied by the chosen ones needs no new branch.
      bool duplicate = std::find(chosen.begin(), chosen.end(), row) != chosen.end();
      if (!duplicate) chosen.push_back(row);
      if (duplicate || solve(chosen)) {
        if (auto found = dfs(depth + 1, chosen)) return found;
      }
      if (!duplicate) chosen.pop_back();
      if (exhausted()) return std::nullopt;
    }
    return std::nullopt;
  }

  // Maximizes s subject to base + witness rows; returns a when s > 0.
  std::optional<RationalVector> solve(const std::vector<RationalVector>& witnesses) {
    ++solves_;
    LinearProgram lp(d_ + 1);
    lp.free_var[d_] = true;
    {
      RationalVector row(d_ + 1);
      for (std::size_t i = 0; i < d_; ++i) row[i] = 1;
      lp.add(std::move(row), Sense::Equal, Rational(static_cast<long long>(d_)));
    }
    for (std::size_t i = 0; i < d_; ++i) {
      RationalVector row(d_ + 1);
      row[i] = 1;
      row[d_] = -1;
      lp.add(std::move(row), Sense::GreaterEqual, 0);
    }
    {
      RationalVector row(d_ + 1);
      row[d_] = 1;
      lp.add(std::move(row), Sense::LessEqual, 1);
    }
    for (const auto& row : base_) lp.add(row, Sense::LessEqual, 0);
    for (const auto& row : witnesses) lp.add(row, Sense::LessEqual, -eps_);
    lp.objective[d_] = 1;
    const auto sol = maximize(lp);
    if (sol.status != LpStatus::Optimal || sol.value <= 0) return std::nullopt;
    return RationalVector(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(d_));
  }

  const Network& net_;
  const FaceLattice& lat_;
  SearchOptions opt_;
  std::size_t d_;
  Rational eps_ = 1;
  std::vector<RationalVector> base_;
  std::vector<std::vector<RationalVector>> candidates_;
  std::vector<std::size_t> order_;
  std::size_t solves_ = 0;
};

}  // namespace detail

/// Finds a with the network strongly (S,a)-endotactic. nullopt means "not found".
inline std::optional<WeightVector> search_weight_vector(const Network& net, const SearchOptions& opt = {}) {
  const auto lat = face_lattice(net, SupportSet::full(net.dimension()));
  const auto ones = WeightVector::ones(net.dimension());
  if (is_strongly_endotactic(lat, net, ones).holds) return ones;
  if (lat.polytope.degenerate()) return std::nullopt;
  for (const Rational eps : {Rational(1), Rational(1, 1000)}) {
    detail::WeightSearch search(net, lat, opt);
    if (auto a = search.run(eps)) return a;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Positive span and the combined report

/// True iff the reaction vectors positively span R^d.
inline bool positive_span_check(const Network& net) {
  const std::size_t d = net.dimension();
  const std::size_t m = net.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (int sgn : {1, -1}) {
      LinearProgram lp(m);
      for (std::size_t row = 0; row < d; ++row) {
        RationalVector coeffs(m);
        for (std::size_t r = 0; r < m; ++r) coeffs[r] = reaction_vector(net.reaction(r))[row];
        lp.add(std::move(coeffs), Sense::Equal, row == i ? Rational(sgn) : Rational(0));
      }
      if (!feasible(lp)) return false;
    }
  }
  return true;
}

struct AseReport {
  SiphonReport siphons;
  std::optional<WeightVector> a;  // verified weight vector, if found (or the user-supplied one when it holds)
  EndotacticVerdict verdict;      // at a, or at the user-supplied / unit vector when no a was found
  bool ase = false;
  bool restriction_consistent = true;
  std::vector<SupportSet> restriction_failures;
  bool positive_span = false;
};

inline AseReport ase_report(const Network& net, const std::optional<WeightVector>& user_a = std::nullopt,
                            const SearchOptions& opt = {}) {
  AseReport rep;
  rep.siphons = find_siphons(net);
  const auto S = SupportSet::full(net.dimension());
  const auto lat = face_lattice(net, S);
  if (user_a) {
    rep.verdict = is_strongly_endotactic(lat, net, *user_a);
    if (rep.verdict.holds) rep.a = *user_a;
  } else {
    rep.a = search_weight_vector(net, opt);
    rep.verdict = is_strongly_endotactic(lat, net, rep.a ? *rep.a : WeightVector::ones(net.dimension()));
  }
  rep.ase = rep.siphons.asiphonic && rep.a.has_value();
  if (rep.a) {
    const std::size_t d = net.dimension();
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << d); ++m) {
      SupportSet P(m, d);
      if (restricted_reactions(net, P).empty()) continue;
      if (!is_strongly_endotactic(net, P, *rep.a).holds) rep.restriction_failures.push_back(P);
    }
    rep.restriction_consistent = rep.restriction_failures.empty();
  }
  rep.positive_span = positive_span_check(net);
  return rep;
}

}  // namespace crnldp
