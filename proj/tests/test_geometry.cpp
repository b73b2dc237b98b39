#include "crnldp/geometry.hpp"
#include "crnldp/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace crnldp;

namespace {

RationalVector ints(std::initializer_list<int> v) {
  RationalVector out;
  for (int x : v) out.emplace_back(x);
  return out;
}

std::set<RationalVector> point_set(const Polytope& poly, const std::vector<std::size_t>& idx) {
  std::set<RationalVector> s;
  for (auto i : idx) s.insert(poly.points[i]);
  return s;
}

std::optional<std::size_t> face_with(const FaceLattice& lat, std::set<RationalVector> pts) {
  for (std::size_t f = 0; f < lat.faces.size(); ++f)
    if (point_set(lat.polytope, lat.faces[f].point_indices) == pts) return f;
  return std::nullopt;
}

// Dyadic rational approximation, so exact routines stay cheap.
RationalVector dyadic(const std::vector<double>& w) {
  RationalVector out;
  for (double x : w) out.emplace_back(Rational(static_cast<long long>(std::llround(x * 1048576.0)), 1048576));
  return out;
}

// Random point in the relative interior of Co(N(F)).
RationalVector interior_direction(const FaceLattice& lat, std::size_t f, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pos(1, 50), any(-50, 50);
  RationalVector w(lat.polytope.ambient_dim);
  const auto& face = lat.faces[f];
  for (auto fi : face.facets) {
    const Rational lam(pos(rng));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += lam * lat.facet_normals[fi][i];
  }
  for (const auto& l : lat.polytope.lineality) {
    const Rational mu(any(rng));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += mu * l[i];
  }
  if (std::all_of(w.begin(), w.end(), [](const Rational& x) { return x == 0; }))
    return interior_direction(lat, f, rng);
  return w;
}

void check_lattice_invariants(const FaceLattice& lat) {
  const auto& poly = lat.polytope;
  std::set<std::vector<std::size_t>> sets;
  for (const auto& f : lat.faces) sets.insert(f.point_indices);
  for (const auto& f : lat.faces) {
    // support duality: every generator's maximizers contain the face
    for (const auto& n : f.normal_generators) {
      auto max = exposed_points(poly, poly.support.embed(n));
      std::sort(max.begin(), max.end());
      EXPECT_TRUE(std::includes(max.begin(), max.end(), f.point_indices.begin(), f.point_indices.end()));
    }
    // the face is exactly the common maximizer set of its facet normals
    if (!f.facets.empty()) {
      RationalVector bar = dual_barycenter(lat, static_cast<std::size_t>(&f - lat.faces.data()));
      auto max = exposed_points(poly, poly.support.embed(bar));
      std::sort(max.begin(), max.end());
      EXPECT_EQ(max, f.point_indices);
    }
    EXPECT_LT(f.dim, poly.ambient_dim);
  }
  // intersection closure
  for (const auto& a : lat.faces) {
    for (const auto& b : lat.faces) {
      std::vector<std::size_t> c;
      std::set_intersection(a.point_indices.begin(), a.point_indices.end(), b.point_indices.begin(),
                            b.point_indices.end(), std::back_inserter(c));
      if (!c.empty()) EXPECT_TRUE(sets.count(c));
    }
  }
}

}  // namespace

TEST(BuildPolytope, Ex2Triangle) {
  const auto net = builtin_network("ex2");
  const auto poly = build_polytope(net, SupportSet::full(2));
  EXPECT_EQ(poly.affine_dim, 2u);
  EXPECT_EQ(poly.points.size(), 3u);
  EXPECT_EQ(point_set(poly, {0, 1, 2}), (std::set<RationalVector>{ints({0, 0}), ints({1, 2}), ints({0, 3})}));
  EXPECT_FALSE(poly.degenerate());
}

TEST(BuildPolytope, SinglePoint) {
  const auto net = parse_network("A -> B");
  const auto poly = build_polytope(net, SupportSet::full(2));
  EXPECT_EQ(poly.affine_dim, 0u);
  EXPECT_EQ(poly.lineality.size(), 2u);
  const auto lat = face_lattice(poly);
  ASSERT_EQ(lat.faces.size(), 1u);
  EXPECT_EQ(lat.faces[0].dim, 0u);
  EXPECT_EQ(lat.faces[0].normal_generators.size(), 4u);
  // the single vertex is exposed by every direction
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int k = 0; k < 50; ++k) EXPECT_EQ(face_exposed_by(lat, dyadic({g(rng), g(rng)})), std::optional<std::size_t>(0));
}

TEST(BuildPolytope, Ex31Hull) {
  const auto net = builtin_network("ex31");
  const auto poly = build_polytope(net, SupportSet::full(2));
  EXPECT_EQ(point_set(poly, {0, 1, 2, 3, 4}),
            (std::set<RationalVector>{ints({0, 0}), ints({1, 2}), ints({0, 3}), ints({2, 0}), ints({1, 3})}));
  const auto lat = face_lattice(poly);
  // (1,2) lies strictly inside the quadrilateral (0,0),(2,0),(1,3),(0,3)
  EXPECT_EQ(lat.faces_of_dimension(0).size(), 4u);
  EXPECT_EQ(lat.faces_of_dimension(1).size(), 4u);
  EXPECT_FALSE(face_with(lat, {ints({1, 2})}).has_value());
  EXPECT_TRUE(face_with(lat, {ints({2, 0}), ints({1, 3})}).has_value());
  check_lattice_invariants(lat);
}

TEST(BuildPolytope, EmptyReactionSetThrows) {
  const auto net = builtin_network("ex32");
  EXPECT_THROW(build_polytope(net, SupportSet::of({1}, 2)), EmptyReactionSet);
}

TEST(FaceLattice, Ex2ThreeVerticesThreeEdges) {
  const auto lat = face_lattice(builtin_network("ex2"), SupportSet::full(2));
  EXPECT_EQ(lat.faces_of_dimension(0).size(), 3u);
  EXPECT_EQ(lat.faces_of_dimension(1).size(), 3u);
  EXPECT_EQ(lat.facet_normals.size(), 3u);
  std::set<RationalVector> normals(lat.facet_normals.begin(), lat.facet_normals.end());
  EXPECT_EQ(normals, (std::set<RationalVector>{ints({2, -1}), ints({1, 1}), ints({-1, 0})}));
  for (auto v : lat.faces_of_dimension(0)) EXPECT_EQ(lat.faces[v].parents.size(), 2u);
  check_lattice_invariants(lat);
}

TEST(FaceLattice, TetraMatchesBruteForceExposedSets) {
  const auto lat = face_lattice(builtin_network("tetra"), SupportSet::full(3));
  EXPECT_EQ(lat.faces_of_dimension(0).size(), 4u);
  EXPECT_EQ(lat.faces_of_dimension(1).size(), 6u);
  EXPECT_EQ(lat.faces_of_dimension(2).size(), 4u);
  std::set<std::vector<std::size_t>> brute;
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y)
      for (int z = -3; z <= 3; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        auto pts = exposed_points(lat.polytope, ints({x, y, z}));
        std::sort(pts.begin(), pts.end());
        brute.insert(pts);
      }
  std::set<std::vector<std::size_t>> faces;
  for (const auto& f : lat.faces) faces.insert(f.point_indices);
  EXPECT_EQ(brute, faces);
  check_lattice_invariants(lat);
}

TEST(FaceLattice, DegenerateHullKeepsCovering) {
  // inputs 0, A+B, 2A+2B are collinear in the plane
  const auto net = parse_network("0 -> A\nA + B -> B\n2A + 2B -> A");
  const auto lat = face_lattice(net, SupportSet::full(2));
  EXPECT_EQ(lat.polytope.affine_dim, 1u);
  EXPECT_TRUE(lat.polytope.degenerate());
  EXPECT_EQ(lat.faces_of_dimension(0).size(), 2u);
  ASSERT_EQ(lat.faces.back().dim, 1u);
  EXPECT_TRUE(lat.faces.back().improper);
  for (const auto& f : lat.faces) EXPECT_GE(f.lineality_generators(), 2u);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 500; ++k) {
    auto w = dyadic({g(rng), g(rng)});
    int hits = 0;
    for (std::size_t f = 0; f < lat.faces.size(); ++f) hits += in_dual_relative_interior(lat, f, w);
    EXPECT_EQ(hits, 1);
  }
  check_lattice_invariants(lat);
}

TEST(ExposedReactions, Ex2Examples) {
  const auto net = builtin_network("ex2");
  const auto S = SupportSet::full(2);
  EXPECT_EQ(exposed_reactions(net, S, ints({1, 0})), (std::vector<std::size_t>{1}));
  EXPECT_EQ(exposed_reactions(net, S, ints({2, 0})), (std::vector<std::size_t>{1}));
  for (double phi = 0.8; phi < 3.1; phi += 0.1) {
    std::vector<double> w{std::cos(phi), std::sin(phi)};
    EXPECT_EQ(exposed_reactions(net, S, w), (std::vector<std::size_t>{2})) << phi;
  }
  // tie along the edge normal (1,1)
  EXPECT_EQ(exposed_reactions(net, S, ints({1, 1})), (std::vector<std::size_t>{1, 2}));
  EXPECT_THROW(exposed_reactions(net, S, ints({0, 0})), ZeroProjection);
  EXPECT_THROW(exposed_reactions(net, SupportSet::of({0}, 2), ints({0, 1})), ZeroProjection);
}

TEST(ReactionsOnFace, Ex2Faces) {
  const auto net = builtin_network("ex2");
  const auto lat = face_lattice(net, SupportSet::full(2));
  auto f13 = face_with(lat, {ints({0, 3}), ints({1, 2})});
  ASSERT_TRUE(f13);
  EXPECT_EQ(reactions_on_face(lat, *f13), (std::vector<std::size_t>{1, 2}));
  auto origin = face_with(lat, {ints({0, 0})});
  ASSERT_TRUE(origin);
  EXPECT_EQ(reactions_on_face(lat, *origin), (std::vector<std::size_t>{0}));
}

TEST(ReactionsOnFace, MatchesExposedForInteriorDirections) {
  std::mt19937_64 rng(11);
  for (const char* name : {"ex2", "ex31", "tetra", "bistable"}) {
    const auto net = builtin_network(name);
    const auto lat = face_lattice(net, SupportSet::full(net.dimension()));
    for (std::size_t f = 0; f < lat.faces.size(); ++f) {
      const auto on_face = reactions_on_face(lat, f);
      const int samples = std::string(name) == "bistable" ? 50 : 1000;
      for (int k = 0; k < samples; ++k) {
        auto w = interior_direction(lat, f, rng);
        ASSERT_EQ(exposed_reactions(lat.polytope, w), on_face) << name << " face " << f;
      }
    }
  }
}

TEST(NormalFan, PartitionBySampling) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (const char* name : {"ex2", "ex31", "tetra"}) {
    const auto net = builtin_network(name);
    const auto lat = face_lattice(net, SupportSet::full(net.dimension()));
    for (int k = 0; k < 2000; ++k) {
      std::vector<double> wd(net.dimension());
      for (auto& x : wd) x = g(rng);
      const auto w = dyadic(wd);
      std::vector<std::size_t> hits;
      for (std::size_t f = 0; f < lat.faces.size(); ++f)
        if (in_dual_relative_interior(lat, f, w)) hits.push_back(f);
      ASSERT_EQ(hits.size(), 1u) << name;
      EXPECT_EQ(face_exposed_by(lat, w), std::optional<std::size_t>(hits[0]));
      EXPECT_EQ(exposed_reactions(lat.polytope, w), reactions_on_face(lat, hits[0]));
    }
  }
}

TEST(NormalFan, BistableInvariants) {
  const auto net = builtin_network("bistable");
  const auto lat = face_lattice(net, SupportSet::full(4));
  check_lattice_invariants(lat);
  for (std::size_t f = 0; f < lat.faces.size(); ++f) {
    const auto bar = dual_barycenter(lat, f);
    EXPECT_TRUE(in_dual_relative_interior(lat, f, bar));
  }
}
