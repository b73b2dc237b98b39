#pragma once

// Exact complex-polytope geometry: W(P), its face lattice with facet normals,
// and the normal-fan queries (exposed reactions, dual-cone membership).
//
// Facets are found by brute force over affinely independent point subsets; at
// desk scale (d_P <= ~10, <= ~20 distinct complexes) this is cheap and exact.
// Lower-dimensional hulls are handled inside their affine hull: every N(F) gets
// both signs of each lineality direction appended, and the whole polytope is
// kept as an extra (improper) face whose dual is the lineality subspace, so the
// duals still cover every direction.

#include "crnldp/lp.hpp"
#include "crnldp/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace crnldp {

struct Polytope {
  SupportSet support;
  std::size_t ambient_dim = 0;  // d_P
  std::size_t affine_dim = 0;
  std::vector<RationalVector> points;      // distinct pi_P c_in, first-appearance order
  std::vector<std::size_t> reactions;      // R(P)
  std::vector<std::size_t> reaction_point; // parallel to reactions: index into points
  std::vector<RationalVector> lineality;   // basis of the orthogonal complement of the affine hull

  bool degenerate() const { return affine_dim < ambient_dim; }
};

struct Face {
  std::size_t dim = 0;
  std::vector<std::size_t> point_indices;  // every point of W(P) lying on the face
  std::vector<std::size_t> facets;         // indices into FaceLattice::facet_normals
  std::vector<RationalVector> normal_generators;
  bool improper = false;  // the whole (lower-dimensional) polytope
  std::vector<std::size_t> parents;
  std::vector<std::size_t> children;

  std::size_t lineality_generators() const { return normal_generators.size() - facets.size(); }
};

struct FaceLattice {
  Polytope polytope;
  std::vector<RationalVector> facet_normals;  // primitive integer, outward
  std::vector<Face> faces;                    // sorted by (dim, point_indices)

  std::vector<std::size_t> faces_of_dimension(std::size_t j) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (faces[f].dim == j) out.push_back(f);
    return out;
  }
};

namespace detail {

inline std::size_t affine_rank(const std::vector<RationalVector>& pts, const std::vector<std::size_t>& idx,
                               std::size_t dim) {
  if (idx.size() <= 1) return 0;
  std::vector<RationalVector> rows;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    RationalVector row(dim);
    for (std::size_t i = 0; i < dim; ++i) row[i] = pts[idx[k]][i] - pts[idx[0]][i];
    rows.push_back(std::move(row));
  }
  return rank(std::move(rows), dim);
}

template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& fn) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// W(P): convex hull of the projected input complexes of R(P).
inline Polytope build_polytope(const Network& net, const SupportSet& P) {
  Polytope poly;
  poly.support = P;
  poly.ambient_dim = P.size();
  poly.reactions = restricted_reactions(net, P);
  if (poly.reactions.empty()) throw EmptyReactionSet("R(P) is empty");
  for (auto r : poly.reactions) {
    auto q = P.project(net.reaction(r).input.as_rational());
    auto it = std::find(poly.points.begin(), poly.points.end(), q);
    if (it == poly.points.end()) {
      poly.reaction_point.push_back(poly.points.size());
      poly.points.push_back(std::move(q));
    } else {
      poly.reaction_point.push_back(static_cast<std::size_t>(it - poly.points.begin()));
    }
  }
  const std::size_t dim = poly.ambient_dim;
  std::vector<RationalVector> diffs;
  for (std::size_t k = 1; k < poly.points.size(); ++k) {
    RationalVector row(dim);
    for (std::size_t i = 0; i < dim; ++i) row[i] = poly.points[k][i] - poly.points[0][i];
    diffs.push_back(std::move(row));
  }
  poly.affine_dim = rank(diffs, dim);
  poly.lineality = null_space(std::move(diffs), dim);
  return poly;
}

inline FaceLattice face_lattice(const Polytope& poly) {
  FaceLattice lat;
  lat.polytope = poly;
  const std::size_t dim = poly.ambient_dim;
  const std::size_t k = poly.affine_dim;
  const auto& pts = poly.points;
  const std::size_t n = pts.size();

  auto lineality_pairs = [&]() {
    std::vector<RationalVector> gens;
    for (const auto& l : poly.lineality) {
      gens.push_back(l);
      RationalVector neg(l.size());
      for (std::size_t i = 0; i < l.size(); ++i) neg[i] = -l[i];
      gens.push_back(std::move(neg));
    }
    return gens;
  };

  if (k == 0) {
    Face f;
    f.dim = 0;
    f.point_indices = {0};
    f.normal_generators = lineality_pairs();
    lat.faces.push_back(std::move(f));
    return lat;
  }

  // Facets: hyperplanes (inside the affine hull) through k affinely independent points
  // with every point on one side.
  std::vector<std::vector<std::size_t>> facet_points;
  detail::for_each_subset(n, k, [&](const std::vector<std::size_t>& subset) {
    std::vector<RationalVector> rows = poly.lineality;
    for (std::size_t s = 1; s < subset.size(); ++s) {
      RationalVector row(dim);
      for (std::size_t i = 0; i < dim; ++i) row[i] = pts[subset[s]][i] - pts[subset[0]][i];
      rows.push_back(std::move(row));
    }
    auto ns = null_space(std::move(rows), dim);
    if (ns.size() != 1) return;
    auto normal = std::move(ns[0]);
    const Rational b = dot(normal, pts[subset[0]]);
    bool above = false, below = false;
    std::vector<std::size_t> on;
    for (std::size_t p = 0; p < n; ++p) {
      const Rational v = dot(normal, pts[p]);
      if (v > b) above = true;
      else if (v < b) below = true;
      else on.push_back(p);
    }
    if (above && below) return;
    if (above)
      for (auto& x : normal) x = -x;
    if (std::find(lat.facet_normals.begin(), lat.facet_normals.end(), normal) != lat.facet_normals.end()) return;
    lat.facet_normals.push_back(std::move(normal));
    facet_points.push_back(std::move(on));
  });

  // Proper faces are exactly the nonempty intersections of facets.
  std::set<std::vector<std::size_t>> face_sets(facet_points.begin(), facet_points.end());
  std::vector<std::vector<std::size_t>> frontier(facet_points.begin(), facet_points.end());
  while (!frontier.empty()) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& a : frontier) {
      for (const auto& b : facet_points) {
        std::vector<std::size_t> c;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c));
        if (!c.empty() && face_sets.insert(c).second) next.push_back(std::move(c));
      }
    }
    frontier = std::move(next);
  }

  const auto lin = lineality_pairs();
  for (const auto& s : face_sets) {
    Face f;
    f.point_indices = s;
    f.dim = detail::affine_rank(pts, s, dim);
    for (std::size_t fi = 0; fi < facet_points.size(); ++fi) {
      if (std::includes(facet_points[fi].begin(), facet_points[fi].end(), s.begin(), s.end())) {
        f.facets.push_back(fi);
        f.normal_generators.push_back(lat.facet_normals[fi]);
      }
    }
    f.normal_generators.insert(f.normal_generators.end(), lin.begin(), lin.end());
    lat.faces.push_back(std::move(f));
  }
  if (poly.degenerate()) {
    Face whole;
    whole.dim = k;
    whole.improper = true;
    for (std::size_t p = 0; p < n; ++p) whole.point_indices.push_back(p);
    whole.normal_generators = lin;
    lat.faces.push_back(std::move(whole));
  }
  std::stable_sort(lat.faces.begin(), lat.faces.end(), [](const Face& a, const Face& b) {
    return std::tie(a.dim, a.point_indices) < std::tie(b.dim, b.point_indices);
  });
  for (std::size_t a = 0; a < lat.faces.size(); ++a) {
    for (std::size_t b = 0; b < lat.faces.size(); ++b) {
      const auto& fa = lat.faces[a];
      const auto& fb = lat.faces[b];
      if (fb.dim != fa.dim + 1) continue;
      if (std::includes(fb.point_indices.begin(), fb.point_indices.end(), fa.point_indices.begin(),
                        fa.point_indices.end())) {
        lat.faces[a].parents.push_back(b);
        lat.faces[b].children.push_back(a);
      }
    }
  }
  return lat;
}

inline FaceLattice face_lattice(const Network& net, const SupportSet& P) {
  return face_lattice(build_polytope(net, P));
}

/// Indices (into poly.points) maximizing <w_P, q>; exact.
inline std::vector<std::size_t> exposed_points(const Polytope& poly, const RationalVector& w_full) {
  const auto w = poly.support.project(w_full);
  if (std::all_of(w.begin(), w.end(), [](const Rational& x) { return x == 0; }))
    throw ZeroProjection("direction has zero projection onto P");
  std::vector<std::size_t> best;
  Rational best_value;
  for (std::size_t p = 0; p < poly.points.size(); ++p) {
    Rational v = dot(w, poly.points[p]);
    if (best.empty() || v > best_value) {
      best = {p};
      best_value = std::move(v);
    } else if (v == best_value) {
      best.push_back(p);
    }
  }
  return best;
}

/// Floating-point variant; ties are decided with a relative tolerance.
inline std::vector<std::size_t> exposed_points(const Polytope& poly, const std::vector<double>& w_full,
                                               double rel_tol = 1e-12) {
  const auto w = poly.support.project(w_full);
  double scale = 0;
  for (double x : w) scale = std::max(scale, std::abs(x));
  if (scale == 0) throw ZeroProjection("direction has zero projection onto P");
  std::vector<double> values(poly.points.size());
  double best = -INFINITY;
  double magnitude = 0;
  for (std::size_t p = 0; p < poly.points.size(); ++p) {
    double v = 0;
    double m = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double q = to_double(poly.points[p][i]);
      v += w[i] * q;
      m += std::abs(w[i] * q);
    }
    values[p] = v;
    best = std::max(best, v);
    magnitude = std::max(magnitude, m);
  }
  std::vector<std::size_t> out;
  const double tol = rel_tol * std::max(1.0, magnitude);
  for (std::size_t p = 0; p < values.size(); ++p)
    if (values[p] >= best - tol) out.push_back(p);
  return out;
}

namespace detail {
inline std::vector<std::size_t> reactions_at(const Polytope& poly, const std::vector<std::size_t>& point_set) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < poly.reactions.size(); ++k)
    if (std::binary_search(point_set.begin(), point_set.end(), poly.reaction_point[k]))
      out.push_back(poly.reactions[k]);
  return out;
}
}  // namespace detail

/// R(P)_w: reactions in R(P) whose input complex is exposed by w (all maximizers).
template <typename Vec>
std::vector<std::size_t> exposed_reactions(const Polytope& poly, const Vec& w) {
  auto pts = exposed_points(poly, w);
  std::sort(pts.begin(), pts.end());
  return detail::reactions_at(poly, pts);
}

template <typename Vec>
std::vector<std::size_t> exposed_reactions(const Network& net, const SupportSet& P, const Vec& w) {
  return exposed_reactions(build_polytope(net, P), w);
}

/// R_F: reactions in R(P) whose projected input lies on F.
inline std::vector<std::size_t> reactions_on_face(const FaceLattice& lat, std::size_t face) {
  return detail::reactions_at(lat.polytope, lat.faces[face].point_indices);
}

/// The face whose dual contains w in its relative interior (the face exposed by w).
template <typename Vec>
std::optional<std::size_t> face_exposed_by(const FaceLattice& lat, const Vec& w) {
  auto pts = exposed_points(lat.polytope, w);
  std::sort(pts.begin(), pts.end());
  for (std::size_t f = 0; f < lat.faces.size(); ++f)
    if (lat.faces[f].point_indices == pts) return f;
  return std::nullopt;
}

/// Sum of the facet normals of F (lineality pairs cancel).
inline RationalVector dual_barycenter(const FaceLattice& lat, std::size_t face) {
  RationalVector c(lat.polytope.ambient_dim);
  for (auto fi : lat.faces[face].facets)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += lat.facet_normals[fi][i];
  return c;
}

/// Exact test: w_P lies in the relative interior of Co(N(F)), i.e.
/// w_P = sum lambda_n n + (lineality part) with every facet lambda_n > 0.
inline bool in_dual_relative_interior(const FaceLattice& lat, std::size_t face, const RationalVector& w_P) {
  const auto& f = lat.faces[face];
  const std::size_t dim = lat.polytope.ambient_dim;
  const std::size_t nf = f.facets.size();
  const std::size_t nl = lat.polytope.lineality.size();
  if (std::all_of(w_P.begin(), w_P.end(), [](const Rational& x) { return x == 0; })) return false;
  // variables: lambda (nf, >= 0), mu (nl, free), t (free)
  LinearProgram lp(nf + nl + 1);
  for (std::size_t j = nf; j < nf + nl + 1; ++j) lp.free_var[j] = true;
  for (std::size_t i = 0; i < dim; ++i) {
    RationalVector row(nf + nl + 1);
    for (std::size_t j = 0; j < nf; ++j) row[j] = lat.facet_normals[f.facets[j]][i];
    for (std::size_t j = 0; j < nl; ++j) row[nf + j] = lat.polytope.lineality[j][i];
    lp.add(std::move(row), Sense::Equal, w_P[i]);
  }
  if (nf == 0) return feasible(lp);
  for (std::size_t j = 0; j < nf; ++j) {
    RationalVector row(nf + nl + 1);
    row[j] = 1;
    row[nf + nl] = -1;
    lp.add(std::move(row), Sense::GreaterEqual, 0);
  }
  lp.objective[nf + nl] = 1;
  const auto sol = maximize(lp);
  return sol.status == LpStatus::Unbounded || (sol.status == LpStatus::Optimal && sol.value > 0);
}

}  // namespace crnldp
