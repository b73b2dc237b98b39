#include "crnldp/io.hpp"
#include "crnldp/topology.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace crnldp;

namespace {

RationalVector ints(std::initializer_list<int> v) {
  RationalVector out;
  for (int x : v) out.emplace_back(x);
  return out;
}

WeightVector weights(std::initializer_list<Rational> v) { return WeightVector(RationalVector(v)); }

// Reorders a direction given in (Y, X, Z, W) coordinates into (X, Y, Z, W).
RationalVector from_yxzw(std::initializer_list<int> v) {
  auto w = ints(v);
  std::swap(w[0], w[1]);
  return w;
}

Network random_network(std::mt19937_64& rng, std::size_t d, std::size_t m) {
  std::vector<std::string> species;
  for (std::size_t i = 0; i < d; ++i) species.push_back("S" + std::to_string(i));
  std::uniform_int_distribution<int> coef(0, 2), pick(0, 2);
  std::vector<Reaction> rs;
  while (rs.size() < m) {
    std::vector<int> in(d), out(d);
    for (std::size_t i = 0; i < d; ++i) {
      in[i] = pick(rng) == 0 ? coef(rng) : 0;
      out[i] = pick(rng) == 0 ? coef(rng) : 0;
    }
    if (in == out) continue;
    rs.push_back({Complex(in), Complex(out), 1.0});
  }
  return Network::checked(species, rs);
}

}  // namespace

TEST(Classify, Ex32OnA) {
  const auto net = builtin_network("ex32");
  const auto P = SupportSet::of({0}, 2);
  const auto one = WeightVector::ones(2);
  EXPECT_EQ(classify_reaction(net, P, one, ints({1, 0}), 1), ReactionClass::Dissipative);
  EXPECT_EQ(classify_reaction(net, P, one, ints({-1, 0}), 0), ReactionClass::Dissipative);
  EXPECT_EQ(classify_reaction(net, P, one, ints({1, 0}), 0), ReactionClass::Explosive);
  EXPECT_THROW(classify_reaction(net, P, one, ints({1, 0}), 2), NotInRP);
  EXPECT_THROW(classify_reaction(net, P, one, ints({0, 1}), 0), ZeroProjection);
}

TEST(Classify, NullAndScaleInvariance) {
  const auto net = builtin_network("ex2");
  const auto S = SupportSet::full(2);
  const auto one = WeightVector::ones(2);
  // A + 2B -> 3B has c = (-1, 1); w = (1, 1) gives 0
  EXPECT_EQ(classify_reaction(net, S, one, ints({1, 1}), 1), ReactionClass::Null);
  EXPECT_EQ(classify_reaction(net, S, one, std::vector<double>{1.0, 1.0}, 1), ReactionClass::Null);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> u(-9, 9), lam(1, 20);
  for (int k = 0; k < 200; ++k) {
    auto w = ints({u(rng), u(rng)});
    if (w[0] == 0 && w[1] == 0) continue;
    auto w2 = w;
    const Rational l(lam(rng));
    for (auto& x : w2) x *= l;
    for (std::size_t r = 0; r < net.size(); ++r)
      EXPECT_EQ(classify_reaction(net, S, one, w, r), classify_reaction(net, S, one, w2, r));
  }
}

TEST(Siphons, BuiltinExamples) {
  auto ex32 = find_siphons(builtin_network("ex32"));
  ASSERT_EQ(ex32.minimal_siphons.size(), 1u);
  EXPECT_EQ(ex32.minimal_siphons[0], SupportSet::of({0}, 2));
  EXPECT_FALSE(ex32.asiphonic);
  EXPECT_TRUE(find_siphons(builtin_network("ex31")).asiphonic);
  auto ex410 = find_siphons(builtin_network("ex410"));
  ASSERT_EQ(ex410.minimal_siphons.size(), 1u);
  EXPECT_EQ(ex410.minimal_siphons[0], SupportSet::of({0}, 1));
  EXPECT_TRUE(find_siphons(builtin_network("bistable")).asiphonic);
  EXPECT_TRUE(find_siphons(builtin_network("bistable0")).asiphonic);
}

TEST(Siphons, MatchBruteForceOnRandomNetworks) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + trial % 6;
    const auto net = random_network(rng, d, 3 + trial % 8);
    const auto rep = find_siphons(net);
    std::vector<std::uint64_t> all;
    for (std::uint64_t m = 1; m < (1u << d); ++m) {
      bool ok = true;
      for (const auto& r : net.reactions()) {
        bool produces = false, consumes = false;
        for (std::size_t i = 0; i < d; ++i) {
          if ((m >> i) & 1) {
            produces |= r.output[i] > 0;
            consumes |= r.input[i] > 0;
          }
        }
        if (produces && !consumes) ok = false;
      }
      if (ok) all.push_back(m);
    }
    std::vector<std::uint64_t> minimal;
    for (auto m : all)
      if (std::none_of(all.begin(), all.end(), [&](std::uint64_t q) { return q != m && (q & ~m) == 0; }))
        minimal.push_back(m);
    std::vector<std::uint64_t> got;
    for (const auto& P : rep.minimal_siphons) got.push_back(P.mask());
    std::sort(got.begin(), got.end());
    std::sort(minimal.begin(), minimal.end());
    EXPECT_EQ(got, minimal);
    EXPECT_EQ(rep.asiphonic, all.empty());
  }
}

TEST(Endotactic, Ex2HoldsWithUnitWeights) {
  const auto v = is_strongly_endotactic(builtin_network("ex2"), WeightVector::ones(2));
  EXPECT_TRUE(v.holds);
  EXPECT_TRUE(v.violations.empty());
  ASSERT_TRUE(v.witness_a);
}

TEST(Endotactic, Ex13NeedsWeights) {
  const auto net = builtin_network("ex13");
  EXPECT_FALSE(is_strongly_endotactic(net, WeightVector::ones(2)).holds);
  EXPECT_TRUE(is_strongly_endotactic(net, weights({make_rational(1, 2), 1})).holds);
}

TEST(Endotactic, Ex31FailsAtTheSlantedEdge) {
  const auto net = builtin_network("ex31");
  const auto lat = face_lattice(net, SupportSet::full(2));
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> u(1, 30);
  for (int k = 0; k < 30; ++k) {
    WeightVector a = k == 0 ? WeightVector::ones(2) : weights({Rational(u(rng)), Rational(u(rng))});
    const auto v = is_strongly_endotactic(lat, net, a);
    EXPECT_FALSE(v.holds);
    bool at_edge = false;
    for (const auto& viol : v.violations) {
      const auto& pts = lat.faces[viol.face].point_indices;
      std::set<RationalVector> s;
      for (auto p : pts) s.insert(lat.polytope.points[p]);
      if (s == std::set<RationalVector>{ints({2, 0}), ints({1, 3})}) at_edge = true;
    }
    EXPECT_TRUE(at_edge);
  }
  // the edge normal is n* = (1, 1/3) up to scale
  auto edge = face_exposed_by(lat, ints({3, 1}));
  ASSERT_TRUE(edge);
  EXPECT_EQ(lat.faces[*edge].dim, 1u);
}

TEST(Endotactic, Ex32OnSupportA) {
  const auto net = builtin_network("ex32");
  EXPECT_TRUE(is_strongly_endotactic(net, WeightVector::ones(2)).holds);
  EXPECT_TRUE(is_strongly_endotactic(net, SupportSet::of({0}, 2), WeightVector::ones(2)).holds);
  EXPECT_THROW(is_strongly_endotactic(net, SupportSet::of({1}, 2), WeightVector::ones(2)), EmptyReactionSet);
}

TEST(Endotactic, BistableDirections) {
  const auto n0 = from_yxzw({-3, 3, 3, 1});
  const auto n1 = from_yxzw({3, 0, 3, 1});
  const auto S = SupportSet::full(4);
  const auto one = WeightVector::ones(4);
  const auto bare = builtin_network("bistable0");
  for (const auto& n : {n0, n1}) {
    bool explosive = false;
    for (auto r : exposed_reactions(bare, S, n))
      explosive |= classify_reaction(bare, S, one, n, r) == ReactionClass::Explosive;
    EXPECT_TRUE(explosive);
  }
  EXPECT_FALSE(is_strongly_endotactic(bare, one).holds);
  EXPECT_FALSE(search_weight_vector(bare).has_value());

  const auto full = builtin_network("bistable");
  for (const auto& n : {n0, n1}) {
    bool dissipative = false;
    for (auto r : exposed_reactions(full, S, n)) {
      const auto c = classify_reaction(full, S, one, n, r);
      EXPECT_NE(c, ReactionClass::Explosive);
      dissipative |= c == ReactionClass::Dissipative;
    }
    EXPECT_TRUE(dissipative);
  }
}

TEST(Search, BuiltinExamples) {
  auto ex2 = search_weight_vector(builtin_network("ex2"));
  ASSERT_TRUE(ex2);
  EXPECT_TRUE(ex2->is_ones());
  const auto ex13 = builtin_network("ex13");
  auto a13 = search_weight_vector(ex13);
  ASSERT_TRUE(a13);
  EXPECT_TRUE(is_strongly_endotactic(ex13, *a13).holds);
  EXPECT_FALSE(search_weight_vector(builtin_network("ex31")).has_value());
}

TEST(Search, ReturnsOnlyVerifiedWeights) {
  std::mt19937_64 rng(23);
  int found = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto net = random_network(rng, 2 + trial % 2, 4 + trial % 4);
    if (auto a = search_weight_vector(net)) {
      ++found;
      EXPECT_TRUE(is_strongly_endotactic(net, *a).holds);
    }
  }
  SUCCEED() << found << " random networks admitted a weight vector";
}

TEST(Ase, BuiltinExamples) {
  auto tetra = ase_report(builtin_network("tetra"));
  EXPECT_TRUE(tetra.ase);
  EXPECT_TRUE(tetra.restriction_consistent);
  auto ex32 = ase_report(builtin_network("ex32"));
  EXPECT_FALSE(ex32.ase);
  EXPECT_TRUE(ex32.a.has_value());
  auto ex2 = ase_report(builtin_network("ex2"));
  EXPECT_TRUE(ex2.ase);
  EXPECT_TRUE(ex2.restriction_consistent);
  auto bistable = ase_report(builtin_network("bistable"));
  EXPECT_TRUE(bistable.siphons.asiphonic);
  EXPECT_TRUE(bistable.positive_span);
  EXPECT_FALSE(ase_report(builtin_network("bistable0")).ase);
}

TEST(Ase, BistableStillExplodesAlongXPlusZMinusW) {
  // w = (1,0,1,-1) exposes {X, Z, X+2Y, X+Z+W}; Z -> X + Z has <w, c^a> = a_X > 0 for every a.
  const auto net = builtin_network("bistable");
  const auto S = SupportSet::full(4);
  const auto w = ints({1, 0, 1, -1});
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> u(1, 50);
  for (int k = 0; k < 20; ++k) {
    const auto a = weights({Rational(u(rng)), Rational(u(rng)), Rational(u(rng)), Rational(u(rng))});
    bool explosive = false;
    for (auto r : exposed_reactions(net, S, w))
      explosive |= classify_reaction(net, S, a, w, r) == ReactionClass::Explosive;
    EXPECT_TRUE(explosive);
    EXPECT_FALSE(is_strongly_endotactic(net, a).holds);
  }
  auto rep = ase_report(net);
  EXPECT_FALSE(rep.ase);
}

TEST(Ase, UserSuppliedWeights) {
  const auto net = builtin_network("ex13");
  auto bad = ase_report(net, WeightVector::ones(2));
  EXPECT_FALSE(bad.a.has_value());
  EXPECT_FALSE(bad.verdict.holds);
  auto good = ase_report(net, weights({make_rational(1, 2), 1}));
  EXPECT_TRUE(good.verdict.holds);
  EXPECT_TRUE(good.restriction_consistent);
}

TEST(PositiveSpan, Examples) {
  EXPECT_TRUE(positive_span_check(builtin_network("bistable")));
  EXPECT_FALSE(positive_span_check(parse_network("A -> B")));
  EXPECT_TRUE(positive_span_check(parse_network("0 <-> A ; kf = 1, kr = 1\n0 <-> B ; kf = 1, kr = 1")));
}

TEST(DualCones, SignsConstantOnDualInteriors) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> pos(1, 40);
  for (const char* name : {"ex2", "tetra", "ex13"}) {
    const auto net = builtin_network(name);
    const auto a = *search_weight_vector(net);
    const auto lat = face_lattice(net, SupportSet::full(net.dimension()));
    for (std::size_t f = 0; f < lat.faces.size(); ++f) {
      const auto RF = reactions_on_face(lat, f);
      const auto bar = dual_barycenter(lat, f);
      for (int k = 0; k < 1000; ++k) {
        RationalVector w(net.dimension());
        for (auto fi : lat.faces[f].facets) {
          const Rational l(pos(rng));
          for (std::size_t i = 0; i < w.size(); ++i) w[i] += l * lat.facet_normals[fi][i];
        }
        for (auto r : RF) {
          const auto c = weighted_reaction_vector(net.reaction(r), a);
          ASSERT_EQ(sign(dot(w, c)), sign(dot(bar, c))) << name;
        }
      }
    }
  }
}

TEST(Restrictions, RestrictionsInheritTheProperty) {
  for (const char* name : {"ex2", "ex13", "tetra", "ex32"}) {
    const auto net = builtin_network(name);
    const auto a = search_weight_vector(net);
    ASSERT_TRUE(a) << name;
    const std::size_t d = net.dimension();
    for (std::uint64_t m = 1; m < (1u << d); ++m) {
      SupportSet P(m, d);
      if (restricted_reactions(net, P).empty()) continue;
      EXPECT_TRUE(is_strongly_endotactic(net, P, *a).holds) << name << " P=" << m;
    }
  }
}
