#include <gtest/gtest.h>

#include "dac/events.hpp"

using namespace dac;

TEST(EventSpec, Monotonicity) {
  EXPECT_EQ(vertex_black({0, 0}).monotonicity(), Monotonicity::Increasing);
  const EventSpec w = crossing(rect_nm(2, 2), Direction::Horizontal, Colour::White, Adjacency::Star);
  EXPECT_EQ(w.monotonicity(), Monotonicity::Decreasing);
  EXPECT_EQ(w.colour_swapped().monotonicity(), Monotonicity::Increasing);
  EXPECT_EQ(w.colour_swapped().colour_swapped(), w);
  const EventSpec c = CircuitSpec{{{0, 0}, 1}, Colour::White, Adjacency::Ordinary};
  EXPECT_EQ(c.monotonicity(), Monotonicity::Decreasing);
}

TEST(EventSpec, Support) {
  const EventSpec v = vertex_black({2, -1});
  EXPECT_EQ(v.support(), (std::vector<Vertex>{{2, -1}}));
  const EventSpec x = crossing(rect_nm(1, 2), Direction::Vertical);
  EXPECT_EQ(x.support().size(), 6u);
  const EventSpec c = CircuitSpec{{{0, 0}, 1}, Colour::Black, Adjacency::Ordinary};
  EXPECT_EQ(c.support().size(), 12u);
  EXPECT_FALSE(c.in_support({1, 1}));
  EXPECT_EQ(c.support_rect(), rect_nm(3, 3));
}

TEST(EventSpec, HoldsAndDescribe) {
  const Grid g(Topology::Square, rect_nm(3, 3));
  ColourField f(g, Colour::Black);
  EXPECT_TRUE(holds(vertex_black({1, 1}), f));
  EXPECT_TRUE(holds(CircuitSpec{{{0, 0}, 1}, Colour::Black, Adjacency::Ordinary}, f));
  f.set({1, 1}, Colour::White);
  EXPECT_FALSE(holds(vertex_black({1, 1}), f));
  EXPECT_TRUE(holds(crossing(rect_nm(3, 3), Direction::Vertical), f));
  EXPECT_EQ(crossing(rect_nm(3, 3), Direction::Vertical).describe(), "vertical_black_ordinary");
  EXPECT_EQ(EventSpec(CircuitSpec{{{0, 0}, 1}, Colour::White, Adjacency::Star}).describe(), "circuit_white_star");
}
