#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "dac/connectivity.hpp"

using namespace dac;

namespace {

ColourField field_from_bits(const RectRegion& rect, std::uint32_t bits, Topology t = Topology::Square) {
  const Grid g(t, rect);
  ColourField f(g, Colour::White);
  for (std::int64_t i = 0; i < g.size(); ++i)
    if ((bits >> i) & 1u) f.set_at(i, Colour::Black);
  return f;
}

using Mask = std::uint32_t;

struct Path {
  std::vector<Vertex> vs;
  Mask mask = 0;
};

template <class Start, class End, class In>
std::vector<Path> minimal_paths(const ColourField& f, const RectRegion& rect, Colour c, Adjacency mode, Start start,
                                End end, In in) {
  const Grid g(Topology::Square, rect);
  std::vector<Path> out;
  Path cur;
  auto dfs = [&](auto&& self, Vertex v) -> void {
    cur.vs.push_back(v);
    cur.mask |= Mask{1} << g.index(v);
    if (end(v)) {
      out.push_back(cur);
    } else {
      for (const Vertex u : neighbors(Topology::Square, mode, v)) {
        if (!rect.contains(u) || !in(u) || start(u) || f.colour(u) != c || ((cur.mask >> g.index(u)) & 1u)) continue;
        self(self, u);
      }
    }
    cur.vs.pop_back();
    cur.mask &= ~(Mask{1} << g.index(v));
  };
  for (const Vertex v : rect_vertices(rect))
    if (in(v) && start(v) && f.colour(v) == c) dfs(dfs, v);
  return out;
}

// Vertices reachable from `seeds` in `mode` within rect avoiding the path.
template <class Seed, class In>
Mask side_region(const RectRegion& rect, Mask path, Adjacency mode, Seed seed, In in) {
  const Grid g(Topology::Square, rect);
  Mask reached = 0;
  std::vector<Vertex> stack;
  for (const Vertex v : rect_vertices(rect)) {
    const Mask b = Mask{1} << g.index(v);
    if (in(v) && seed(v) && !(path & b)) {
      reached |= b;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (const Vertex u : neighbors(Topology::Square, mode, v)) {
      if (!rect.contains(u) || !in(u)) continue;
      const Mask b = Mask{1} << g.index(u);
      if ((path & b) || (reached & b)) continue;
      reached |= b;
      stack.push_back(u);
    }
  }
  return reached;
}

struct Extremal {
  std::optional<std::vector<Vertex>> best;
  Mask side = 0;
  bool any = false;
  bool unique_least = true;
};

// Order crossings by their closed side region D = path + side(path). The
// extremal crossing has the inclusion-least D; ties go to the lex-least
// vertex sequence.
template <class Seed, class In>
Extremal brute_extremal(const std::vector<Path>& paths, const RectRegion& rect, Adjacency flood, Seed seed, In in) {
  Extremal out;
  out.any = !paths.empty();
  if (paths.empty()) return out;
  std::vector<Mask> side, closed;
  for (const Path& p : paths) {
    side.push_back(side_region(rect, p.mask, flood, seed, in));
    closed.push_back(side.back() | p.mask);
  }
  std::optional<Mask> least;
  for (const Mask d : closed)
    if (std::all_of(closed.begin(), closed.end(), [&](Mask e) { return (d & ~e) == 0; })) least = d;
  if (!least) {
    out.unique_least = false;
    return out;
  }
  for (std::size_t i = 0; i < paths.size(); ++i)
    if (closed[i] == *least && (!out.best || paths[i].vs < *out.best)) {
      out.best = paths[i].vs;
      out.side = side[i];
    }
  return out;
}

inline bool everywhere(Vertex) { return true; }

Mask mask_of(const Grid& g, std::span<const Vertex> vs) {
  Mask m = 0;
  for (const Vertex v : vs) m |= Mask{1} << g.index(v);
  return m;
}

}  // namespace

TEST(HasCrossing, Trivial) {
  const RectRegion r = rect_nm(3, 3);
  const ColourField black(Grid(Topology::Square, r), Colour::Black);
  EXPECT_TRUE(has_crossing(black, {r, Direction::Vertical, Colour::Black, Adjacency::Ordinary}));
  EXPECT_FALSE(has_crossing(black, {r, Direction::Horizontal, Colour::White, Adjacency::Ordinary}));
  EXPECT_THROW(has_crossing(black, {rect_nm(4, 3), Direction::Vertical, Colour::Black, Adjacency::Ordinary}),
               std::out_of_range);
}

TEST(HasCrossing, UnitSquareEnumeration) {
  const RectRegion r = rect_nm(1, 1);
  for (std::uint32_t bits = 0; bits < 16; ++bits) {
    const ColourField f = field_from_bits(r, bits);
    auto b = [&](int x, int y) { return f.colour({x, y}) == Colour::Black; };
    const bool expected = (b(0, 0) && b(0, 1)) || (b(1, 0) && b(1, 1));
    EXPECT_EQ(has_crossing(f, {r, Direction::Vertical, Colour::Black, Adjacency::Ordinary}), expected) << bits;
  }
}

TEST(HasCrossing, StarUsesDiagonals) {
  const RectRegion r = rect_nm(1, 1);
  ColourField f(Grid(Topology::Square, r), Colour::Black);
  f.set({0, 0}, Colour::White);
  f.set({1, 1}, Colour::White);
  EXPECT_TRUE(has_crossing(f, {r, Direction::Horizontal, Colour::White, Adjacency::Star}));
  EXPECT_FALSE(has_crossing(f, {r, Direction::Horizontal, Colour::White, Adjacency::Ordinary}));
}

TEST(SelfDuality, ComplementaryOnRandomRectangles) {
  for (std::uint32_t seed = 0; seed < 200; ++seed) {
    const RectRegion r{0, 2 + static_cast<int>(seed % 5), 0, 1 + static_cast<int>(seed % 7)};
    const Grid g(Topology::Square, r);
    ColourField f(g, Colour::White);
    for (std::int64_t i = 0; i < g.size(); ++i)
      if (draw_u64(seed, Stream::Bootstrap, static_cast<std::uint64_t>(i)) & 1u) f.set_at(i, Colour::Black);
    const bool vb = has_crossing(f, {r, Direction::Vertical, Colour::Black, Adjacency::Ordinary});
    const bool hw = has_crossing(f, {r, Direction::Horizontal, Colour::White, Adjacency::Star});
    EXPECT_NE(vb, hw);
  }
}

TEST(CrossingThreshold, MatchesRecolouring) {
  for (const Topology t : {Topology::Square, Topology::Triangular})
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const RectRegion core = rect_nm(6, 9);
      auto c = std::make_shared<const ClusterLabeling>(label_clusters(sample_bonds(t, make_window(core, 3), 0.3, seed)));
      const auto x = assign_colours(c, 0.5, seed);
      for (const Adjacency m : {Adjacency::Ordinary, Adjacency::Star}) {
        const CrossingSpec s{core, Direction::Vertical, Colour::Black, m};
        const double rs = crossing_threshold(x, s);
        EXPECT_FALSE(has_crossing(recolour_at(x, rs), s));
        EXPECT_TRUE(has_crossing(recolour_at(x, std::nextafter(rs, 2.0)), s));
        for (double r = 0.0; r <= 1.0; r += 0.0625) EXPECT_EQ(has_crossing(recolour_at(x, r), s), r > rs);
      }
    }
}

TEST(CrossingThreshold, SingleColumnIsColumnMax) {
  const RectRegion col{0, 0, 0, 5};
  auto c = std::make_shared<const ClusterLabeling>(
      label_clusters(sample_bonds(Topology::Square, make_window(col, 1), 0.0, 1)));
  const auto x = assign_colours(c, 0.5, 17);
  double mx = 0;
  for (int y = 0; y <= 5; ++y) mx = std::max(mx, x.mark(c->cluster_of({0, y})));
  EXPECT_EQ(crossing_threshold(x, {col, Direction::Vertical, Colour::Black, Adjacency::Ordinary}), mx);
  const CrossingSpec white{col, Direction::Vertical, Colour::White, Adjacency::Ordinary};
  EXPECT_THROW(crossing_threshold(x, white), std::invalid_argument);
}

TEST(CrossingThreshold, EqualMarks) {
  const double u = 0.37;
  const double t = minimax_crossing(Topology::Square, {rect_nm(4, 4), Direction::Horizontal, Colour::Black, Adjacency::Ordinary},
                                    [&](Vertex) { return u; });
  EXPECT_EQ(t, u);
}

TEST(LowestStarCrossing, Trivial) {
  const RectRegion r = rect_nm(3, 3);
  const auto white = lowest_horizontal_star_crossing(ColourField(Grid(Topology::Square, r), Colour::White), r);
  ASSERT_TRUE(white.has_value());
  EXPECT_EQ(white->vertices, (std::vector<Vertex>{{0, 0}, {1, 0}, {2, 0}, {3, 0}}));
  EXPECT_EQ(white->mode, Adjacency::Star);
  EXPECT_FALSE(lowest_horizontal_star_crossing(ColourField(Grid(Topology::Square, r), Colour::Black), r));
}

TEST(LowestStarCrossing, ExhaustiveAgainstBruteForce) {
  const RectRegion r = rect_nm(3, 3);
  const Grid g(Topology::Square, r);
  auto left = [&](Vertex v) { return v.x == r.x0; };
  auto right = [&](Vertex v) { return v.x == r.x1; };
  auto bottom = [&](Vertex v) { return v.y == r.y0; };
  for (std::uint32_t bits = 0; bits < (1u << 16); ++bits) {
    const ColourField f = field_from_bits(r, bits);
    const auto paths = minimal_paths(f, r, Colour::White, Adjacency::Star, left, right, everywhere);
    const auto ref = brute_extremal(paths, r, Adjacency::Ordinary, bottom, everywhere);
    AccessLog log;
    const auto got = lowest_horizontal_star_crossing(f, r, &log);
    ASSERT_EQ(got.has_value(), ref.any) << bits;
    if (!got) continue;
    ASSERT_TRUE(ref.unique_least) << "no least side region, colouring " << bits;
    ASSERT_EQ(got->vertices, *ref.best) << bits;
    const Mask allowed = ref.side | mask_of(g, got->vertices);
    for (const Vertex v : log.reads()) ASSERT_TRUE((allowed >> g.index(v)) & 1u) << bits << " read " << to_string(v);
  }
}

TEST(LeftmostCrossing, Trivial) {
  const RectRegion r = rect_nm(3, 3);
  const auto black = leftmost_vertical_crossing(ColourField(Grid(Topology::Square, r), Colour::Black), r);
  ASSERT_TRUE(black.has_value());
  EXPECT_EQ(black->vertices, (std::vector<Vertex>{{0, 3}, {0, 2}, {0, 1}, {0, 0}}));
  EXPECT_FALSE(leftmost_vertical_crossing(ColourField(Grid(Topology::Square, r), Colour::White), r));
}

TEST(LeftmostCrossing, ExhaustiveAgainstBruteForce) {
  const RectRegion r = rect_nm(3, 3);
  const Grid g(Topology::Square, r);
  auto top = [&](Vertex v) { return v.y == r.y1; };
  auto bot = [&](Vertex v) { return v.y == r.y0; };
  auto left = [&](Vertex v) { return v.x == r.x0; };
  for (std::uint32_t bits = 0; bits < (1u << 16); ++bits) {
    const ColourField f = field_from_bits(r, bits);
    const auto paths = minimal_paths(f, r, Colour::Black, Adjacency::Ordinary, top, bot, everywhere);
    const auto ref = brute_extremal(paths, r, Adjacency::Star, left, everywhere);
    AccessLog log;
    const auto got = leftmost_vertical_crossing(f, r, &log);
    ASSERT_EQ(got.has_value(), ref.any) << bits;
    if (!got) continue;
    ASSERT_TRUE(ref.unique_least) << "no least side region, colouring " << bits;
    ASSERT_EQ(got->vertices, *ref.best) << bits;
    const Mask allowed = ref.side | mask_of(g, got->vertices);
    for (const Vertex v : log.reads()) ASSERT_TRUE((allowed >> g.index(v)) & 1u) << bits << " read " << to_string(v);
  }
}

TEST(LeftmostCrossing, GeneralRegion) {
  // L-shaped region: columns x >= 2, plus the two bottom rows.
  const RectRegion box = rect_nm(4, 4);
  ColourField f(Grid(Topology::Square, box), Colour::Black);
  std::vector<Vertex> region, top, bottom;
  for (const Vertex v : rect_vertices(box))
    if (v.x >= 2 || v.y <= 1) region.push_back(v);
  for (int x = 2; x <= 4; ++x) top.push_back({x, 4});
  for (int x = 0; x <= 4; ++x) bottom.push_back({x, 0});
  EXPECT_EQ(left_anchors(region), (std::vector<Vertex>{{0, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 2}, {2, 3}, {2, 4}}));
  const auto p = leftmost_vertical_crossing(f, region, top, bottom);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->vertices, (std::vector<Vertex>{{2, 4}, {2, 3}, {2, 2}, {2, 1}, {1, 1}, {0, 1}, {0, 0}}));
}

TEST(LeftmostCrossing, ExhaustiveOnLShapedRegion) {
  const RectRegion box = rect_nm(3, 3);
  const Grid g(Topology::Square, box);
  auto in = [](Vertex v) { return v.x >= 2 || v.y <= 1; };
  std::vector<Vertex> region, top, bottom;
  for (const Vertex v : rect_vertices(box))
    if (in(v)) region.push_back(v);
  for (const Vertex v : region) {
    if (v.y == 3) top.push_back(v);
    if (v.y == 0) bottom.push_back(v);
  }
  const auto anchors = left_anchors(region);
  auto is_top = [](Vertex v) { return v.y == 3; };
  auto is_bot = [](Vertex v) { return v.y == 0; };
  auto is_anchor = [&](Vertex v) { return std::find(anchors.begin(), anchors.end(), v) != anchors.end(); };
  for (std::uint32_t bits = 0; bits < (1u << 16); ++bits) {
    if (bits & mask_of(g, std::vector<Vertex>{{0, 2}, {0, 3}, {1, 2}, {1, 3}})) continue;  // outside the region
    const ColourField f = field_from_bits(box, bits);
    const auto paths = minimal_paths(f, box, Colour::Black, Adjacency::Ordinary, is_top, is_bot, in);
    const auto ref = brute_extremal(paths, box, Adjacency::Star, is_anchor, in);
    AccessLog log;
    const auto got = leftmost_vertical_crossing(f, region, top, bottom, &log);
    ASSERT_EQ(got.has_value(), ref.any) << bits;
    if (!got) continue;
    ASSERT_TRUE(ref.unique_least) << bits;
    ASSERT_EQ(got->vertices, *ref.best) << bits;
    const Mask allowed = ref.side | mask_of(g, got->vertices);
    for (const Vertex v : log.reads()) ASSERT_TRUE((allowed >> g.index(v)) & 1u) << bits << " read " << to_string(v);
  }
}

TEST(AccessLog, WritesLines) {
  AccessLog log;
  log.record({1, 2});
  log.record({-3, 0});
  std::ostringstream os;
  log.write(os);
  EXPECT_EQ(os.str(), "1 2\n-3 0\n");
  log.clear();
  EXPECT_TRUE(log.reads().empty());
}

TEST(Thicken, Examples) {
  const Window w = make_window(rect_nm(4, 4), 1);
  const auto singles = label_clusters(bonds_from_open_edges(Topology::Square, w, {}));
  const std::vector<Vertex> s{{0, 0}, {2, 3}};
  EXPECT_EQ(thicken(s, singles), s);
  const std::vector<Edge> open{Edge::make({0, 0}, {1, 0}), Edge::make({1, 0}, {1, 1})};
  const auto three = label_clusters(bonds_from_open_edges(Topology::Square, w, open));
  const std::vector<Vertex> one{{1, 1}};
  EXPECT_EQ(thicken(one, three), (std::vector<Vertex>{{0, 0}, {1, 0}, {1, 1}}));
}

TEST(Thicken, BoundaryIsClosedBarrier) {
  const Window w = make_window(rect_nm(16, 16), 8);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto b = sample_bonds(Topology::Square, w, 0.3, seed);
    const auto c = label_clusters(b);
    auto x = assign_colours(c, 0.5, seed);
    const auto path = lowest_horizontal_star_crossing(x.field(), w.core);
    if (!path) continue;
    const auto th = thicken(path->vertices, c);
    const bool touches = std::any_of(th.begin(), th.end(), [&](Vertex v) { return c.grid().on_boundary(v); });
    if (!touches) {
      EXPECT_TRUE(is_closed_barrier(edge_boundary(th, Topology::Square, w), b));
    }
  }
}

TEST(Circuit, Trivial) {
  const AnnulusRegion a{{0, 0}, 2};
  for (const Topology t : {Topology::Square, Topology::Triangular})
    for (const Adjacency m : {Adjacency::Ordinary, Adjacency::Star}) {
      const ColourField black(Grid(t, a.outer()), Colour::Black);
      const ColourField white(Grid(t, a.outer()), Colour::White);
      EXPECT_TRUE(has_circuit_in_annulus(black, a, Colour::Black, m));
      EXPECT_FALSE(has_circuit_in_annulus(white, a, Colour::Black, m));
      EXPECT_TRUE(has_circuit_in_annulus(white, a, Colour::White, m));
    }
}

TEST(Circuit, WhiteColumnBlocksBlackCircuit) {
  const AnnulusRegion a{{0, 0}, 2};
  ColourField f(Grid(Topology::Square, a.outer()), Colour::Black);
  for (int y = 0; y <= 1; ++y) f.set({3, y}, Colour::White);
  EXPECT_FALSE(has_circuit_in_annulus(f, a, Colour::Black, Adjacency::Ordinary));
  EXPECT_FALSE(has_circuit_in_annulus(f, a, Colour::Black, Adjacency::Star));
  f.set({3, 1}, Colour::Black);
  f.set({2, 1}, Colour::White);
  // A white diagonal pair cuts ordinary circuits only.
  EXPECT_FALSE(has_circuit_in_annulus(f, a, Colour::Black, Adjacency::Ordinary));
  EXPECT_TRUE(has_circuit_in_annulus(f, a, Colour::Black, Adjacency::Star));
}
