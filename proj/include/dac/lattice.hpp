#pragma once

// Vertex coordinates, adjacency rules and region predicates for the square
// lattice Z^2 and the triangular lattice T.
//
// T is stored in skew integer coordinates (k,l): vertex (k,l) sits at
// Euclidean position (k - l/2, l*sqrt(3)/2), so its six neighbours are
// (k+-1,l), (k,l+-1), (k+1,l+1) and (k-1,l-1). Only the adjacency rule is
// ever used; no floating point enters connectivity.

#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dac {

enum class Topology : std::uint8_t { Square = 0, Triangular = 1 };
enum class Adjacency : std::uint8_t { Ordinary = 0, Star = 1 };

inline std::string_view to_string(Topology t) {
  return t == Topology::Square ? "square" : "triangular";
}
inline std::string_view to_string(Adjacency a) { return a == Adjacency::Ordinary ? "ordinary" : "star"; }

struct Vertex {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
  friend constexpr Vertex operator+(Vertex a, Vertex b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vertex operator-(Vertex a, Vertex b) { return {a.x - b.x, a.y - b.y}; }
};

inline std::string to_string(Vertex v) {
  return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")";
}

constexpr int l1_distance(Vertex a, Vertex b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

namespace detail {

// Offsets sorted lexicographically by (dx,dy), which makes neighbour lists
// lexicographic for every vertex.
inline constexpr std::array<Vertex, 4> kSquareOrdinary{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
inline constexpr std::array<Vertex, 8> kSquareStar{
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};
inline constexpr std::array<Vertex, 6> kTriangular{{{-1, -1}, {-1, 0}, {0, -1}, {0, 1}, {1, 0}, {1, 1}}};

// One representative per undirected bond; canonical edge order uses these.
inline constexpr std::array<Vertex, 2> kSquareBonds{{{0, 1}, {1, 0}}};
inline constexpr std::array<Vertex, 3> kTriangularBonds{{{0, 1}, {1, 0}, {1, 1}}};

}  // namespace detail

// Neighbour offsets; Triangular ignores the mode (T is its own matching graph).
constexpr std::span<const Vertex> neighbor_offsets(Topology t, Adjacency a) {
  if (t == Topology::Triangular) return detail::kTriangular;
  if (a == Adjacency::Star) return detail::kSquareStar;
  return detail::kSquareOrdinary;
}

// Forward bond directions of the underlying (ordinary) lattice.
constexpr std::span<const Vertex> bond_directions(Topology t) {
  if (t == Topology::Triangular) return detail::kTriangularBonds;
  return detail::kSquareBonds;
}

constexpr int max_bond_directions = 3;

inline std::vector<Vertex> neighbors(Topology t, Adjacency a, Vertex v) {
  std::vector<Vertex> out;
  for (const Vertex d : neighbor_offsets(t, a)) out.push_back(v + d);
  return out;
}

constexpr bool adjacent(Topology t, Adjacency a, Vertex u, Vertex v) {
  const Vertex d = v - u;
  for (const Vertex o : neighbor_offsets(t, a))
    if (o == d) return true;
  return false;
}

// All vertices at L1 distance exactly n from v, in lexicographic order.
inline std::vector<Vertex> l1_ball_boundary(Vertex v, int n) {
  if (n < 0) throw std::invalid_argument("l1_ball_boundary: negative radius");
  std::vector<Vertex> out;
  for (int dx = -n; dx <= n; ++dx) {
    const int rest = n - std::abs(dx);
    out.push_back({v.x + dx, v.y - rest});
    if (rest != 0) out.push_back({v.x + dx, v.y + rest});
  }
  return out;
}

// Closed integer rectangle [x0,x1] x [y0,y1].
struct RectRegion {
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  constexpr int width() const { return x1 - x0 + 1; }
  constexpr int height() const { return y1 - y0 + 1; }
  constexpr std::int64_t vertex_count() const { return std::int64_t{width()} * height(); }
  constexpr bool contains(Vertex v) const { return v.x >= x0 && v.x <= x1 && v.y >= y0 && v.y <= y1; }
  constexpr bool contains(const RectRegion& r) const {
    return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
  }
  constexpr RectRegion expanded(int m) const { return {x0 - m, x1 + m, y0 - m, y1 + m}; }
  constexpr RectRegion shifted(Vertex v) const { return {x0 + v.x, x1 + v.x, y0 + v.y, y1 + v.y}; }
  constexpr bool valid() const { return x0 <= x1 && y0 <= y1; }

  friend constexpr bool operator==(const RectRegion&, const RectRegion&) = default;
};

// S_{n,m} = [0,n] x [0,m].
constexpr RectRegion rect_nm(int n, int m) { return {0, n, 0, m}; }

// A_n = S_{3n,3n} \ (S_{n,n} + (n,n)), translated by `origin`.
struct AnnulusRegion {
  Vertex origin{};
  int n = 1;

  constexpr RectRegion outer() const { return rect_nm(3 * n, 3 * n).shifted(origin); }
  constexpr RectRegion hole() const { return rect_nm(n, n).shifted(origin + Vertex{n, n}); }
  constexpr bool contains(Vertex v) const { return outer().contains(v) && !hole().contains(v); }
  // Twice the midpoint, kept integral.
  constexpr Vertex doubled_midpoint() const { return {2 * origin.x + 3 * n, 2 * origin.y + 3 * n}; }

  friend constexpr bool operator==(const AnnulusRegion&, const AnnulusRegion&) = default;
};

constexpr bool in_region(Vertex v, const RectRegion& r) { return r.contains(v); }
constexpr bool in_region(Vertex v, const AnnulusRegion& a) { return a.contains(v); }

// Dense indexing of a rectangle. Column-major, so the smallest index in any
// vertex set is its lexicographically smallest (x,y) member.
class Grid {
public:
  Grid() = default;
  Grid(Topology t, RectRegion region) : topology_(t), region_(region) {
    if (!region.valid()) throw std::invalid_argument("Grid: empty region");
  }

  Topology topology() const { return topology_; }
  const RectRegion& region() const { return region_; }
  int width() const { return region_.width(); }
  int height() const { return region_.height(); }
  std::int64_t size() const { return region_.vertex_count(); }
  bool contains(Vertex v) const { return region_.contains(v); }

  std::int64_t index(Vertex v) const {
    return std::int64_t{v.x - region_.x0} * height() + (v.y - region_.y0);
  }
  Vertex vertex(std::int64_t i) const {
    const int h = height();
    return {region_.x0 + static_cast<int>(i / h), region_.y0 + static_cast<int>(i % h)};
  }
  bool on_boundary(Vertex v) const {
    return v.x == region_.x0 || v.x == region_.x1 || v.y == region_.y0 || v.y == region_.y1;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  Topology topology_ = Topology::Square;
  RectRegion region_{};
};

}  // namespace dac
