#include <gtest/gtest.h>

#include "dac/oracle.hpp"

using namespace dac;

namespace {

const Window kUnitSquare = make_window(rect_nm(1, 1), 0);

EventSpec vb(const RectRegion& r) { return crossing(r, Direction::Vertical, Colour::Black, Adjacency::Ordinary); }
EventSpec hw_star(const RectRegion& r) { return crossing(r, Direction::Horizontal, Colour::White, Adjacency::Star); }

}  // namespace

TEST(ExactPoly, Algebra) {
  const ExactPoly<Rational> a({Rational(1), Rational(-2), Rational(1)});  // (1-r)^2
  const ExactPoly<Rational> b({Rational(1), Rational(-1)});
  EXPECT_EQ((b * b - a).is_zero(), true);
  EXPECT_EQ(a.degree(), 2);
  EXPECT_EQ(a.derivative()(Rational(1, 2)), Rational(-1));
  EXPECT_EQ((-a)(Rational(0)), Rational(-1));
  EXPECT_TRUE(ExactPoly<Rational>({Rational(0), Rational(0)}).is_zero());
}

TEST(EnumerateExact, UnitSquareValues) {
  const Rational half(1, 2);
  EXPECT_EQ(enumerate_exact(Topology::Square, kUnitSquare, Rational(0), half, vb(rect_nm(1, 1))), Rational(7, 16));
  EXPECT_EQ(enumerate_exact(Topology::Square, kUnitSquare, Rational(0), half, hw_star(rect_nm(1, 1))), Rational(9, 16));
}

TEST(EnumerateExact, PolynomialAtZeroBondDensity) {
  const auto poly = exact_polynomial_in_r(Topology::Square, kUnitSquare, Rational(0), vb(rect_nm(1, 1)));
  EXPECT_TRUE((poly - ExactPoly<Rational>({Rational(0), Rational(0), Rational(2), Rational(0), Rational(-1)})).is_zero());
  for (const Rational& r : {Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)})
    EXPECT_EQ(poly(r), enumerate_exact(Topology::Square, kUnitSquare, Rational(0), r, vb(rect_nm(1, 1))));
}

TEST(EnumerateExact, FullBondDensityVertexBlackIsR) {
  const auto poly = exact_polynomial_in_r(Topology::Square, kUnitSquare, Rational(1), vertex_black({0, 0}));
  EXPECT_TRUE((poly - ExactPoly<Rational>({Rational(0), Rational(1)})).is_zero());
}

TEST(EnumerateExact, VertexMarginalIsR) {
  for (const Topology t : {Topology::Square, Topology::Triangular})
    for (const Rational& p : {Rational(0), Rational(3, 10), Rational(1, 2), Rational(1)}) {
      const Window w = make_window(rect_nm(2, 1), 0);
      const auto poly = exact_polynomial_in_r(t, w, p, vertex_black({1, 1}));
      EXPECT_TRUE((poly - ExactPoly<Rational>({Rational(0), Rational(1)})).is_zero());
    }
}

TEST(EnumerateExact, ComplementIdentity) {
  for (const RectRegion r : {rect_nm(1, 1), rect_nm(2, 1), rect_nm(1, 2), rect_nm(2, 2)})
    for (const Rational& p : {Rational(0), Rational(3, 10), Rational(1, 2)}) {
      const Window w = make_window(r, 0);
      const auto a = exact_polynomial_in_r(Topology::Square, w, p, vb(r));
      const auto b = exact_polynomial_in_r(Topology::Square, w, p, hw_star(r));
      EXPECT_TRUE((a + b - ExactPoly<Rational>({Rational(1)})).is_zero());
    }
}

TEST(EnumerateExact, ColourSwapSymmetry) {
  const Window w = make_window(rect_nm(2, 1), 0);
  const EventSpec a = vb(rect_nm(2, 1));
  const Rational p(3, 10);
  const auto black = exact_polynomial_in_r(Topology::Square, w, p, a);
  const auto white = exact_polynomial_in_r(Topology::Square, w, p, a.colour_swapped());
  for (const Rational& r : {Rational(1, 5), Rational(1, 2), Rational(2, 3)}) EXPECT_EQ(white(r), black(Rational(1) - r));
}

TEST(EnumerateExact, DoublePathAgreesWithRational) {
  const Window w = make_window(rect_nm(2, 1), 0);
  const EventSpec a = vb(rect_nm(2, 1));
  const double d = enumerate_exact(Topology::Triangular, w, 0.3, 0.45, a);
  const Rational q = enumerate_exact(Topology::Triangular, w, Rational(3, 10), Rational(9, 20), a);
  EXPECT_NEAR(d, static_cast<double>(q), 1e-12);
}

TEST(EnumerateExact, SizeLimit) {
  const Window big = make_window(rect_nm(4, 4), 0);  // 40 edges
  EXPECT_THROW(enumerate_exact(Topology::Square, big, Rational(1, 2), Rational(1, 2), vb(rect_nm(4, 4))), OracleSizeError);
  try {
    exact_polynomial_in_r(Topology::Square, big, 0.5, vb(rect_nm(4, 4)));
  } catch (const OracleSizeError& e) {
    EXPECT_NE(std::string(e.what()).find("Monte Carlo"), std::string::npos);
  }
  EXPECT_THROW(enumerate_exact(Topology::Square, kUnitSquare, 0.5, 0.5, vb(rect_nm(2, 2))), std::out_of_range);
}

TEST(SelfDual, ExhaustiveSmallRectangles) {
  for (int w = 1; w <= 4; ++w)
    for (int h = 1; h <= 4; ++h) {
      if (w * h > 12) continue;
      const auto res = exhaustive_selfdual_check({0, w - 1, 0, h - 1});
      EXPECT_TRUE(res.holds) << w << "x" << h;
      EXPECT_EQ(res.colourings, std::uint64_t{1} << (w * h));
    }
}

TEST(SelfDual, OrdinaryWhiteFails) {
  const auto res = exhaustive_selfdual_check(rect_nm(1, 1), Topology::Square, Adjacency::Ordinary);
  EXPECT_FALSE(res.holds);
  ASSERT_TRUE(res.counterexample.has_value());
  const ColourField& f = *res.counterexample;
  const RectRegion r = rect_nm(1, 1);
  EXPECT_FALSE(has_crossing(f, {r, Direction::Vertical, Colour::Black, Adjacency::Ordinary}));
  EXPECT_FALSE(has_crossing(f, {r, Direction::Horizontal, Colour::White, Adjacency::Ordinary}));
  EXPECT_THROW(exhaustive_selfdual_check(rect_nm(5, 5)), OracleSizeError);
}

TEST(BruteForceCircuit, Examples) {
  const AnnulusRegion a{{0, 0}, 2};
  const Grid g(Topology::Square, a.outer());
  const ColourField black(g, Colour::Black);
  EXPECT_TRUE(brute_force_circuit(a, black, Colour::Black, Adjacency::Ordinary));
  EXPECT_TRUE(brute_force_circuit(a, black, Colour::Black, Adjacency::Star));
  const AnnulusRegion a1{{0, 0}, 1};
  ColourField cut(Grid(Topology::Square, a1.outer()), Colour::Black);
  cut.set({0, 1}, Colour::White);  // the column below the hole
  cut.set({0, 0}, Colour::White);
  EXPECT_FALSE(brute_force_circuit(a1, cut, Colour::Black, Adjacency::Ordinary));
  EXPECT_FALSE(brute_force_circuit(a1, cut, Colour::Black, Adjacency::Star));
  EXPECT_THROW(brute_force_circuit(AnnulusRegion{{0, 0}, 4}, ColourField(Grid(Topology::Square, rect_nm(12, 12)), Colour::Black),
                                   Colour::Black, Adjacency::Ordinary),
               OracleSizeError);
}

TEST(BruteForceCircuit, WindingNumber) {
  const std::vector<Vertex> ring{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_EQ(detail::winding_number(ring, {1, 1}), 1);
  const std::vector<Vertex> rev{{0, 1}, {1, 1}, {1, 0}, {0, 0}};
  EXPECT_EQ(detail::winding_number(rev, {1, 1}), -1);
  EXPECT_EQ(detail::winding_number(ring, {5, 1}), 0);
}

TEST(BruteForceCircuit, DualRuleAgreesOnA1) {
  const AnnulusRegion a{{0, 0}, 1};
  for (const Topology t : {Topology::Square, Topology::Triangular}) {
    const Grid g(t, a.outer());
    std::vector<Vertex> ring;
    for (const Vertex v : rect_vertices(a.outer()))
      if (a.contains(v)) ring.push_back(v);
    ASSERT_EQ(ring.size(), 12u);
    for (std::uint32_t bits = 0; bits < (1u << 12); ++bits) {
      ColourField f(g, Colour::White);
      for (std::size_t j = 0; j < ring.size(); ++j)
        if ((bits >> j) & 1u) f.set(ring[j], Colour::Black);
      for (const Colour c : {Colour::Black, Colour::White})
        for (const Adjacency m : {Adjacency::Ordinary, Adjacency::Star})
          ASSERT_EQ(has_circuit_in_annulus(f, a, c, m), brute_force_circuit(a, f, c, m))
              << to_string(t) << " bits " << bits << " " << to_string(c) << " " << to_string(m);
    }
  }
}

TEST(BruteForceCircuit, DualRuleAgreesOnRandomA2) {
  const AnnulusRegion a{{-1, 2}, 2};
  for (const Topology t : {Topology::Square, Topology::Triangular}) {
    const Grid g(t, a.outer().expanded(1));
    for (std::uint64_t s = 0; s < 300; ++s) {
      ColourField f(g, Colour::White);
      for (std::int64_t i = 0; i < g.size(); ++i)
        if (draw_unit(s, Stream::Bootstrap, static_cast<std::uint64_t>(i)) < 0.6) f.set_at(i, Colour::Black);
      for (const Colour c : {Colour::Black, Colour::White})
        for (const Adjacency m : {Adjacency::Ordinary, Adjacency::Star})
          ASSERT_EQ(has_circuit_in_annulus(f, a, c, m), brute_force_circuit(a, f, c, m)) << s;
    }
  }
}

TEST(Tabulate, JointAndPivotal) {
  const Window w = make_window(rect_nm(1, 1), 0);
  const Rational p(0), r(1, 2);
  const auto joint = exact_joint_polynomial(Topology::Square, w, p, vertex_black({0, 0}), vertex_black({1, 1}));
  EXPECT_EQ(joint(r), Rational(1, 4));
  // At p = 0 a vertex event has exactly one pivotal cluster in every colouring.
  const auto piv = exact_pivotal_polynomial(Topology::Square, w, p, vertex_black({0, 0}));
  EXPECT_EQ(piv(Rational(1, 3)), Rational(1));
}
