#include <gtest/gtest.h>

#include <cmath>

#include "dac/colouring.hpp"

using namespace dac;

namespace {

std::shared_ptr<const ClusterLabeling> sampled(Topology t, double p, std::uint64_t seed, int side = 12) {
  return std::make_shared<const ClusterLabeling>(label_clusters(sample_bonds(t, make_window(rect_nm(side, side), 2), p, seed)));
}

int black_count(const ColourField& f) {
  int n = 0;
  for (std::int64_t i = 0; i < f.grid().size(); ++i) n += f.colour_at(i) == Colour::Black;
  return n;
}

}  // namespace

TEST(AssignColours, ExtremeDensities) {
  const auto c = sampled(Topology::Square, 0.4, 1);
  EXPECT_EQ(black_count(assign_colours(c, 1.0, 5).field()), c->grid().size());
  EXPECT_EQ(black_count(assign_colours(c, 0.0, 5).field()), 0);
  EXPECT_EQ(colour(assign_colours(c, 1.0, 5), {0, 0}), Colour::Black);
  EXPECT_EQ(colour(assign_colours(c, 0.0, 5), {0, 0}), Colour::White);
  EXPECT_THROW(assign_colours(c, 1.1, 5), std::invalid_argument);
  EXPECT_THROW(assign_colours(c, -0.1, 5), std::invalid_argument);
}

TEST(AssignColours, FairCoinOnSingletons) {
  const auto c = std::make_shared<const ClusterLabeling>(
      label_clusters(sample_bonds(Topology::Square, make_window({0, 299, 0, 299}, 0), 0.0, 3)));
  const int n = black_count(assign_colours(c, 0.5, 11).field());
  const double total = 300.0 * 300.0;
  EXPECT_NEAR(n / total, 0.5, 3 * std::sqrt(0.25 / total));
}

TEST(AssignColours, ConstantOnClusters) {
  for (const Topology t : {Topology::Square, Topology::Triangular}) {
    const auto c = sampled(t, 0.45, 8, 20);
    const auto x = assign_colours(c, 0.5, 8);
    for (const ClusterId id : c->cluster_ids())
      for (const auto i : c->members(id)) EXPECT_EQ(x.colour(c->grid().vertex(i)), x.cluster_colour(id));
  }
}

TEST(AssignColours, MarksStableAcrossWindows) {
  // Same configuration restricted to a region where clusters coincide: an
  // isolated vertex gets the same mark in any window.
  const auto a = std::make_shared<const ClusterLabeling>(
      label_clusters(sample_bonds(Topology::Square, make_window(rect_nm(3, 3), 0), 0.0, 1)));
  const auto b = std::make_shared<const ClusterLabeling>(
      label_clusters(sample_bonds(Topology::Square, make_window(rect_nm(3, 3), 4), 0.0, 1)));
  const auto xa = assign_colours(a, 0.5, 99), xb = assign_colours(b, 0.5, 99);
  for (int x = 0; x <= 3; ++x)
    for (int y = 0; y <= 3; ++y)
      EXPECT_EQ(xa.mark(a->cluster_of({x, y})), xb.mark(b->cluster_of({x, y})));
}

TEST(Recolour, MonotoneInR) {
  const auto c = sampled(Topology::Triangular, 0.3, 4);
  const auto x = assign_colours(c, 0.5, 4);
  EXPECT_EQ(recolour_at(x, 0.5).field(), x.field());
  EXPECT_EQ(black_count(recolour_at(x, 1.0).field()), c->grid().size());
  ColourField prev = recolour_at(x, 0.0).field();
  for (double r = 0.05; r <= 1.0; r += 0.05) {
    const ColourField cur = recolour_at(x, r).field();
    for (std::int64_t i = 0; i < cur.grid().size(); ++i)
      if (prev.colour_at(i) == Colour::Black) {
        EXPECT_EQ(cur.colour_at(i), Colour::Black);
      }
    prev = cur;
  }
  EXPECT_THROW(recolour_at(x, 2.0), std::invalid_argument);
}

TEST(FlipCluster, InvolutionAndSize) {
  const auto c = sampled(Topology::Square, 0.45, 6);
  const auto x = assign_colours(c, 0.5, 6);
  const ColourField base = x.field();
  for (const ClusterId id : c->cluster_ids()) {
    const auto y = flip_cluster(x, id);
    EXPECT_TRUE(y.has_overrides());
    const ColourField f = y.field();
    int diff = 0;
    for (std::int64_t i = 0; i < f.grid().size(); ++i) diff += f.colour_at(i) != base.colour_at(i);
    EXPECT_EQ(diff, c->size(id));
    EXPECT_EQ(flip_cluster(y, id).field(), base);
  }
}

TEST(FlipCluster, WhiteOriginSingletonBecomesBlack) {
  const auto c = sampled(Topology::Square, 0.0, 1);
  const auto x = assign_colours(c, 0.0, 1);
  const auto y = flip_cluster(x, c->cluster_of({0, 0}));
  EXPECT_EQ(y.colour({0, 0}), Colour::Black);
  EXPECT_EQ(y.colour({1, 0}), Colour::White);
}

TEST(FlipCluster, BadReference) {
  const auto c = sampled(Topology::Square, 1.0, 1);
  const auto x = assign_colours(c, 0.5, 1);
  EXPECT_THROW(flip_cluster(x, 1), BadClusterReference);
  EXPECT_THROW(flip_cluster(x, -4), BadClusterReference);
  EXPECT_THROW(x.cluster_colour(1 << 20), BadClusterReference);
}

TEST(ColourSwap, ReflectedMarksSwapColours) {
  const auto c = sampled(Topology::Square, 0.4, 2);
  const auto x = assign_colours(c, 0.3, 2);
  const auto y = reflect_marks(x, 0.7);
  EXPECT_EQ(y.field(), x.field().swapped());
}

TEST(ColourField, SetAndSwap) {
  ColourField f(Grid(Topology::Square, rect_nm(1, 1)), Colour::White);
  f.set({1, 0}, Colour::Black);
  EXPECT_EQ(f.colour({1, 0}), Colour::Black);
  EXPECT_EQ(f.swapped().colour({1, 0}), Colour::White);
  EXPECT_EQ(f.swapped().colour({0, 0}), Colour::Black);
  EXPECT_EQ(f.swapped().swapped(), f);
}
