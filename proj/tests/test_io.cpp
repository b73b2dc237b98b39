#include "crnldp/io.hpp"

#include <gtest/gtest.h>

using namespace crnldp;

TEST(Parse, ForwardReaction) {
  auto net = parse_network("A + 2B -> 3B ; k = 1");
  ASSERT_EQ(net.dimension(), 2u);
  EXPECT_EQ(net.species(), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(net.reaction(0).input.coefficients, (std::vector<int>{1, 2}));
  EXPECT_EQ(net.reaction(0).output.coefficients, (std::vector<int>{0, 3}));
  EXPECT_EQ(net.reaction(0).rate_constant, 1.0);
}

TEST(Parse, EmptyComplex) {
  auto net = parse_network("0 -> A + 2B ; k = 1");
  EXPECT_TRUE(net.reaction(0).input.is_empty());
  EXPECT_EQ(net.reaction(0).output.coefficients, (std::vector<int>{1, 2}));
}

TEST(Parse, ReversibleExpandsForwardThenReverse) {
  auto net = parse_network("2A <-> 0 ; kf = 1, kr = 3");
  ASSERT_EQ(net.size(), 2u);
  EXPECT_EQ(net.reaction(0).input.coefficients, (std::vector<int>{2}));
  EXPECT_TRUE(net.reaction(1).input.is_empty());
  EXPECT_EQ(net.reaction(1).rate_constant, 3.0);
}

TEST(Parse, HeaderFixesOrderAndComments) {
  auto net = parse_network("# comment\nspecies: B, A\n\nA -> B ; k = 2.5e-1  # trailing\n");
  EXPECT_EQ(net.species(), (std::vector<std::string>{"B", "A"}));
  EXPECT_EQ(net.reaction(0).input.coefficients, (std::vector<int>{0, 1}));
  EXPECT_EQ(net.reaction(0).rate_constant, 0.25);
}

TEST(Parse, SpacedCoefficientAndRepeatedSpecies) {
  auto net = parse_network("2 X1 + X1 -> X2");
  EXPECT_EQ(net.reaction(0).input.coefficients, (std::vector<int>{3, 0}));
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse_network("A -> B ; k = 1\nA => B ; k = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
  EXPECT_THROW(parse_network("A -> B ; k = 1 extra"), ParseError);
  EXPECT_THROW(parse_network("species: A\nA -> C"), ParseError);
  EXPECT_THROW(parse_network("A -> B ; q = 1"), ParseError);
  EXPECT_THROW(parse_network("A \xe2\x87\x8c B"), ParseError);
  EXPECT_THROW(parse_network("A <-> B ; kf = 1"), ParseError);
  EXPECT_THROW(parse_network("0A -> B"), ParseError);
}

TEST(Parse, SemanticErrorsGoThroughValidation) {
  EXPECT_THROW(parse_network("A -> B ; k = 0"), ValidationError);
  EXPECT_THROW(parse_network("A -> A ; k = 1"), ValidationError);
  EXPECT_NO_THROW(parse_network_unchecked("A -> B ; k = 0"));
}

TEST(Serialize, RoundTripOnEveryBuiltin) {
  for (const auto& b : builtin_networks()) {
    const auto net = parse_network(b.text);
    const auto text = serialize(net);
    const auto again = parse_network(text);
    EXPECT_EQ(net, again) << b.name;
    EXPECT_EQ(serialize(again), text) << b.name;
    EXPECT_EQ(network_hash(net), network_hash(again));
  }
}

TEST(Builtins, ShipsNamedNetworks) {
  for (const char* name : {"ex1", "ex2", "ex13", "ex31", "ex32", "tetra", "schlogl", "bz", "bistable"})
    EXPECT_NO_THROW(builtin_network(name)) << name;
  EXPECT_EQ(builtin_network("bistable").size(), 14u);
  EXPECT_THROW(builtin("nope"), Error);
  EXPECT_EQ(load_network("builtin:ex2"), builtin_network("ex2"));
}

TEST(Lists, ParseNumbersAndRationals) {
  EXPECT_EQ(parse_double_list("1, 2.5,3e-1"), (std::vector<double>{1, 2.5, 0.3}));
  auto q = parse_rational_list("1/2,1");
  EXPECT_EQ(q[0], make_rational(1, 2));
  EXPECT_EQ(q[1], make_rational(1));
  EXPECT_THROW(parse_double_list("1,,2"), Error);
}
