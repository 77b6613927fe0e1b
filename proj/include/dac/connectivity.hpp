#pragma once

// Monochromatic crossings, circuits and extremal crossings.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "dac/bonds.hpp"
#include "dac/colouring.hpp"
#include "dac/lattice.hpp"

namespace dac {

enum class Direction : std::uint8_t { Horizontal = 0, Vertical = 1 };

inline std::string_view to_string(Direction d) { return d == Direction::Horizontal ? "horizontal" : "vertical"; }

constexpr Adjacency dual(Adjacency a) { return a == Adjacency::Ordinary ? Adjacency::Star : Adjacency::Ordinary; }

struct CrossingSpec {
  RectRegion rect{};
  Direction direction = Direction::Vertical;
  Colour colour = Colour::Black;
  Adjacency mode = Adjacency::Ordinary;

  friend bool operator==(const CrossingSpec&, const CrossingSpec&) = default;
};

struct PathResult {
  std::vector<Vertex> vertices;
  Adjacency mode = Adjacency::Ordinary;
  Colour colour = Colour::Black;
};

// Ordered record of every colour read, for locality audits.
class AccessLog {
public:
  void record(Vertex v) { reads_.push_back(v); }
  std::span<const Vertex> reads() const { return reads_; }
  void clear() { reads_.clear(); }

  // One "x y" line per read.
  void write(std::ostream& os) const {
    for (const Vertex v : reads_) os << v.x << ' ' << v.y << '\n';
  }

private:
  std::vector<Vertex> reads_;
};

namespace detail {

class LoggedField {
public:
  LoggedField(const ColourField& f, AccessLog* log) : f_(f), log_(log) {}
  Colour operator()(Vertex v) const {
    if (log_) log_->record(v);
    return f_.colour(v);
  }

private:
  const ColourField& f_;
  AccessLog* log_;
};

inline bool on_start_side(const CrossingSpec& s, Vertex v) {
  return s.direction == Direction::Vertical ? v.y == s.rect.y1 : v.x == s.rect.x0;
}
inline bool on_end_side(const CrossingSpec& s, Vertex v) {
  return s.direction == Direction::Vertical ? v.y == s.rect.y0 : v.x == s.rect.x1;
}

inline void require_inside(const Grid& g, const RectRegion& r, const char* what) {
  if (!r.valid() || !g.region().contains(r)) throw std::out_of_range(std::string(what) + ": region outside window");
}

}  // namespace detail

// Path of the given colour and mode inside spec.rect joining its two
// opposite sides (top to bottom for Vertical, left to right for Horizontal).
inline bool has_crossing(const ColourField& f, const CrossingSpec& s) {
  const Grid& g = f.grid();
  detail::require_inside(g, s.rect, "has_crossing");
  const Grid local(g.topology(), s.rect);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(local.size()), 0);
  std::vector<Vertex> stack;
  for (std::int64_t i = 0; i < local.size(); ++i) {
    const Vertex v = local.vertex(i);
    if (detail::on_start_side(s, v) && f.colour(v) == s.colour) {
      seen[static_cast<std::size_t>(i)] = 1;
      stack.push_back(v);
    }
  }
  const auto offsets = neighbor_offsets(g.topology(), s.mode);
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    if (detail::on_end_side(s, v)) return true;
    for (const Vertex d : offsets) {
      const Vertex u = v + d;
      if (!s.rect.contains(u)) continue;
      auto& mark = seen[static_cast<std::size_t>(local.index(u))];
      if (mark || f.colour(u) != s.colour) continue;
      mark = 1;
      stack.push_back(u);
    }
  }
  return false;
}

inline bool has_crossing(const ColourConfig& x, const CrossingSpec& s) { return has_crossing(x.field(), s); }

// Smallest value t such that the vertices with value <= t contain a crossing
// of s.rect in the given direction and mode (min over paths of the max value).
template <class ValueAt>
double minimax_crossing(Topology t, const CrossingSpec& s, ValueAt&& value_at) {
  const Grid local(t, s.rect);
  const auto n = static_cast<std::size_t>(local.size());
  std::vector<double> value(n);
  for (std::size_t i = 0; i < n; ++i) value[i] = value_at(local.vertex(static_cast<std::int64_t>(i)));
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return value[static_cast<std::size_t>(a)] < value[static_cast<std::size_t>(b)]; });

  // Two virtual nodes for the sides.
  const auto source = static_cast<std::int32_t>(n);
  const auto sink = static_cast<std::int32_t>(n + 1);
  std::vector<std::int32_t> parent(n + 2);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::uint8_t> active(n, 0);
  auto unite = [&](std::int32_t a, std::int32_t b) {
    a = detail::uf_find(parent, a);
    b = detail::uf_find(parent, b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  };
  const auto offsets = neighbor_offsets(t, s.mode);
  for (const auto i : order) {
    const Vertex v = local.vertex(i);
    active[static_cast<std::size_t>(i)] = 1;
    if (detail::on_start_side(s, v)) unite(i, source);
    if (detail::on_end_side(s, v)) unite(i, sink);
    for (const Vertex d : offsets) {
      const Vertex u = v + d;
      if (!s.rect.contains(u)) continue;
      const auto j = static_cast<std::int32_t>(local.index(u));
      if (active[static_cast<std::size_t>(j)]) unite(i, j);
    }
    if (detail::uf_find(parent, source) == detail::uf_find(parent, sink)) return value[static_cast<std::size_t>(i)];
  }
  throw std::logic_error("minimax_crossing: rectangle has no crossing even when fully occupied");
}

// Threshold r* of a black crossing under the monotone coupling: with the
// marks of x, has_crossing(recolour_at(x, r), s) holds iff r > r*.
inline double crossing_threshold(const ColourConfig& x, const CrossingSpec& s) {
  if (s.colour != Colour::Black) throw std::invalid_argument("crossing_threshold: black (increasing) crossings only");
  if (x.has_overrides()) throw std::invalid_argument("crossing_threshold: colour overrides are not supported");
  const ClusterLabeling& c = x.clusters();
  detail::require_inside(c.grid(), s.rect, "crossing_threshold");
  const auto marks = x.marks();
  return minimax_crossing(c.grid().topology(), s,
                          [&](Vertex v) { return marks[c.ordinal(c.cluster_of(v))]; });
}

namespace detail {

// Lexicographically least minimal path inside `allowed`: it meets the start
// set only in its first vertex and the end set only in its last. Greedy: each
// step takes the smallest neighbour from which `end` is still reachable
// avoiding the path so far.
template <class Start, class End>
std::optional<std::vector<Vertex>> lex_least_path(const Grid& g, const std::vector<std::uint8_t>& allowed,
                                                  Adjacency mode, Start&& is_start, End&& is_end) {
  const auto offsets = neighbor_offsets(g.topology(), mode);
  std::vector<std::uint8_t> on_path(allowed.size(), 0);
  std::vector<std::uint8_t> seen(allowed.size(), 0);
  std::vector<Vertex> stack;

  auto can_finish = [&](Vertex from) {
    std::fill(seen.begin(), seen.end(), 0);
    stack.clear();
    stack.push_back(from);
    seen[static_cast<std::size_t>(g.index(from))] = 1;
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      if (is_end(v)) return true;
      for (const Vertex d : offsets) {
        const Vertex u = v + d;
        if (!g.contains(u)) continue;
        const auto iu = static_cast<std::size_t>(g.index(u));
        if (!allowed[iu] || on_path[iu] || seen[iu] || is_start(u)) continue;
        seen[iu] = 1;
        stack.push_back(u);
      }
    }
    return false;
  };

  // Indices are column-major, so ascending index is lexicographic order.
  std::optional<Vertex> first;
  for (std::int64_t i = 0; i < g.size() && !first; ++i) {
    const Vertex v = g.vertex(i);
    if (allowed[static_cast<std::size_t>(i)] && is_start(v) && can_finish(v)) first = v;
  }
  if (!first) return std::nullopt;

  std::vector<Vertex> path{*first};
  on_path[static_cast<std::size_t>(g.index(*first))] = 1;
  while (!is_end(path.back())) {
    const Vertex v = path.back();
    bool stepped = false;
    for (const Vertex d : offsets) {
      const Vertex u = v + d;
      if (!g.contains(u)) continue;
      const auto iu = static_cast<std::size_t>(g.index(u));
      if (!allowed[iu] || on_path[iu] || is_start(u) || !can_finish(u)) continue;
      path.push_back(u);
      on_path[iu] = 1;
      stepped = true;
      break;
    }
    if (!stepped) throw std::logic_error("lex_least_path: lost reachability");
  }
  return path;
}

}  // namespace detail

// Lowest white horizontal *-crossing of rect (square lattice). Colours are
// read only for the bottom row, the black ordinary clusters hanging from it,
// and their white neighbours, all of which lie on or below the result.
inline std::optional<PathResult> lowest_horizontal_star_crossing(const ColourField& f, const RectRegion& rect,
                                                                 AccessLog* log = nullptr) {
  if (f.grid().topology() != Topology::Square)
    throw std::invalid_argument("lowest_horizontal_star_crossing: square lattice only");
  detail::require_inside(f.grid(), rect, "lowest_horizontal_star_crossing");
  const detail::LoggedField read(f, log);
  const Grid local(Topology::Square, rect);
  const auto n = static_cast<std::size_t>(local.size());
  // 0 unread, 1 black reached from the bottom, 2 white frontier, 3 black elsewhere
  std::vector<std::uint8_t> state(n, 0);
  std::vector<Vertex> stack;
  for (int x = rect.x0; x <= rect.x1; ++x) {
    const Vertex v{x, rect.y0};
    const auto i = static_cast<std::size_t>(local.index(v));
    if (read(v) == Colour::Black) {
      state[i] = 1;
      stack.push_back(v);
    } else {
      state[i] = 2;
    }
  }
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (const Vertex d : neighbor_offsets(Topology::Square, Adjacency::Ordinary)) {
      const Vertex u = v + d;
      if (!rect.contains(u)) continue;
      const auto iu = static_cast<std::size_t>(local.index(u));
      if (state[iu] != 0) continue;
      if (read(u) == Colour::Black) {
        state[iu] = 1;
        stack.push_back(u);
      } else {
        state[iu] = 2;
      }
    }
  }
  std::vector<std::uint8_t> allowed(n);
  for (std::size_t i = 0; i < n; ++i) allowed[i] = state[i] == 2;
  auto path = detail::lex_least_path(
      local, allowed, Adjacency::Star, [&](Vertex v) { return v.x == rect.x0; },
      [&](Vertex v) { return v.x == rect.x1; });
  if (!path) return std::nullopt;
  return PathResult{std::move(*path), Adjacency::Star, Colour::White};
}

// Vertices of `region` *-adjacent to its left exterior, the points (x, y)
// with x smaller than every region vertex of row y. For a rectangle this is
// the left column.
inline std::vector<Vertex> left_anchors(std::span<const Vertex> region) {
  std::map<int, int> row_min;
  for (const Vertex v : region) {
    const auto [it, fresh] = row_min.try_emplace(v.y, v.x);
    if (!fresh) it->second = std::min(it->second, v.x);
  }
  auto left_exterior = [&](Vertex w) {
    const auto it = row_min.find(w.y);
    return it != row_min.end() && w.x < it->second;
  };
  std::vector<Vertex> out;
  for (const Vertex v : region)
    for (const Vertex d : neighbor_offsets(Topology::Square, Adjacency::Star))
      if (left_exterior(v + d)) {
        out.push_back(v);
        break;
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Leftmost black ordinary path from `top` to `bottom` inside `region`
// (square lattice). Reads colours only on or left of the result.
inline std::optional<PathResult> leftmost_vertical_crossing(const ColourField& f, std::span<const Vertex> region,
                                                            std::span<const Vertex> top,
                                                            std::span<const Vertex> bottom,
                                                            AccessLog* log = nullptr) {
  const Grid& g = f.grid();
  if (g.topology() != Topology::Square) throw std::invalid_argument("leftmost_vertical_crossing: square lattice only");
  const auto n = static_cast<std::size_t>(g.size());
  std::vector<std::uint8_t> in_region(n, 0), is_top(n, 0), is_bottom(n, 0);
  auto flag = [&](std::span<const Vertex> vs, std::vector<std::uint8_t>& out) {
    for (const Vertex v : vs) {
      if (!g.contains(v)) throw std::out_of_range("leftmost_vertical_crossing: vertex outside window");
      out[static_cast<std::size_t>(g.index(v))] = 1;
    }
  };
  flag(region, in_region);
  flag(top, is_top);
  flag(bottom, is_bottom);

  const detail::LoggedField read(f, log);
  // 0 unread, 1 white reached from the left, 2 black frontier, 3 white elsewhere
  std::vector<std::uint8_t> state(n, 0);
  std::vector<Vertex> stack;
  for (const Vertex v : left_anchors(region)) {
    const auto i = static_cast<std::size_t>(g.index(v));
    if (read(v) == Colour::White) {
      state[i] = 1;
      stack.push_back(v);
    } else {
      state[i] = 2;
    }
  }
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (const Vertex d : neighbor_offsets(Topology::Square, Adjacency::Star)) {
      const Vertex u = v + d;
      if (!g.contains(u)) continue;
      const auto iu = static_cast<std::size_t>(g.index(u));
      if (!in_region[iu] || state[iu] != 0) continue;
      if (read(u) == Colour::White) {
        state[iu] = 1;
        stack.push_back(u);
      } else {
        state[iu] = 2;
      }
    }
  }
  std::vector<std::uint8_t> allowed(n);
  for (std::size_t i = 0; i < n; ++i) allowed[i] = state[i] == 2;
  auto path = detail::lex_least_path(
      g, allowed, Adjacency::Ordinary, [&](Vertex v) { return is_top[static_cast<std::size_t>(g.index(v))] != 0; },
      [&](Vertex v) { return is_bottom[static_cast<std::size_t>(g.index(v))] != 0; });
  if (!path) return std::nullopt;
  return PathResult{std::move(*path), Adjacency::Ordinary, Colour::Black};
}

inline std::vector<Vertex> rect_vertices(const RectRegion& r) {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(r.vertex_count()));
  for (int x = r.x0; x <= r.x1; ++x)
    for (int y = r.y0; y <= r.y1; ++y) out.push_back({x, y});
  return out;
}

// Leftmost black vertical crossing of a rectangle.
inline std::optional<PathResult> leftmost_vertical_crossing(const ColourField& f, const RectRegion& rect,
                                                            AccessLog* log = nullptr) {
  detail::require_inside(f.grid(), rect, "leftmost_vertical_crossing");
  const auto region = rect_vertices(rect);
  std::vector<Vertex> top, bottom;
  for (int x = rect.x0; x <= rect.x1; ++x) {
    top.push_back({x, rect.y1});
    bottom.push_back({x, rect.y0});
  }
  return leftmost_vertical_crossing(f, region, top, bottom, log);
}

// s together with the whole p-cluster of each member; sorted.
inline std::vector<Vertex> thicken(std::span<const Vertex> s, const ClusterLabeling& c) {
  const Grid& g = c.grid();
  std::vector<ClusterId> ids;
  for (const Vertex v : s) {
    if (!g.contains(v)) throw std::out_of_range("thicken: vertex outside window");
    ids.push_back(c.cluster_of(v));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<Vertex> out;
  for (const ClusterId id : ids)
    for (const auto i : c.members(id)) out.push_back(g.vertex(i));
  std::sort(out.begin(), out.end());
  return out;
}

// A circuit of `colour` in mode `mode` surrounding the hole of `a` exists iff
// no path of the other colour in the dual mode joins the hole to the outside
// through the annulus.
inline bool has_circuit_in_annulus(const ColourField& f, const AnnulusRegion& a, Colour colour, Adjacency mode) {
  const Grid& g = f.grid();
  detail::require_inside(g, a.outer(), "has_circuit_in_annulus");
  const Adjacency dm = g.topology() == Topology::Triangular ? Adjacency::Ordinary : dual(mode);
  const auto offsets = neighbor_offsets(g.topology(), dm);
  const Colour other = opposite(colour);
  const RectRegion outer = a.outer();
  const RectRegion hole = a.hole();
  const Grid local(g.topology(), outer);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(local.size()), 0);
  std::vector<Vertex> stack;
  for (std::int64_t i = 0; i < local.size(); ++i) {
    const Vertex v = local.vertex(i);
    if (!a.contains(v) || f.colour(v) != other) continue;
    const bool touches_hole = std::any_of(offsets.begin(), offsets.end(), [&](Vertex d) { return hole.contains(v + d); });
    if (touches_hole) {
      seen[static_cast<std::size_t>(i)] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (const Vertex d : offsets) {
      const Vertex u = v + d;
      if (!outer.contains(u)) return false;
      if (hole.contains(u)) continue;
      auto& s = seen[static_cast<std::size_t>(local.index(u))];
      if (s || f.colour(u) != other) continue;
      s = 1;
      stack.push_back(u);
    }
  }
  return true;
}

}  // namespace dac
