#pragma once

// Exact enumeration over every bond configuration of a tiny window and every
// colouring of its p-clusters. Event probabilities come out as polynomials in
// r; with rational p the arithmetic is exact.

#include <algorithm>
#include <bit>
#include <functional>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dac/bonds.hpp"
#include "dac/colouring.hpp"
#include "dac/connectivity.hpp"
#include "dac/events.hpp"
#include "dac/lattice.hpp"

namespace dac {

using Rational = boost::multiprecision::cpp_rational;

class OracleSizeError : public std::length_error {
public:
  using std::length_error::length_error;
};

struct OracleLimits {
  int max_edges = 20;
  int max_clusters = 22;
};

// Polynomial in r, coefficients lowest degree first.
template <class Scalar>
class ExactPoly {
public:
  ExactPoly() = default;
  explicit ExactPoly(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { trim(); }

  std::span<const Scalar> coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  Scalar operator()(const Scalar& r) const {
    Scalar acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + *it;
    return acc;
  }

  ExactPoly derivative() const {
    std::vector<Scalar> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * Scalar(static_cast<long>(i)));
    return ExactPoly(std::move(d));
  }

  friend ExactPoly operator+(const ExactPoly& a, const ExactPoly& b) {
    std::vector<Scalar> out(std::max(a.c_.size(), b.c_.size()), Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] += b.c_[i];
    return ExactPoly(std::move(out));
  }
  friend ExactPoly operator-(const ExactPoly& a, const ExactPoly& b) {
    std::vector<Scalar> out(std::max(a.c_.size(), b.c_.size()), Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] -= b.c_[i];
    return ExactPoly(std::move(out));
  }
  friend ExactPoly operator*(const ExactPoly& a, const ExactPoly& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<Scalar> out(a.c_.size() + b.c_.size() - 1, Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return ExactPoly(std::move(out));
  }
  friend ExactPoly operator-(const ExactPoly& a) { return ExactPoly() - a; }

  bool is_zero() const { return c_.empty(); }

private:
  void trim() {
    while (!c_.empty() && c_.back() == Scalar(0)) c_.pop_back();
  }
  std::vector<Scalar> c_;
};

// Integer counts indexed by (#open edges, #relevant clusters, #black among them).
class Tally {
public:
  Tally(int edges, int max_clusters)
      : edges_(edges), kdim_(max_clusters + 1),
        counts_(static_cast<std::size_t>((edges + 1) * kdim_ * kdim_), 0) {}

  int edges() const { return edges_; }
  int max_clusters() const { return kdim_ - 1; }
  std::int64_t& at(int open, int k, int b) {
    return counts_[static_cast<std::size_t>((open * kdim_ + k) * kdim_ + b)];
  }
  std::int64_t at(int open, int k, int b) const {
    return counts_[static_cast<std::size_t>((open * kdim_ + k) * kdim_ + b)];
  }

  // sum_{o,k,b} count * p^o (1-p)^(E-o) * r^b (1-r)^(k-b), expanded in r.
  template <class Scalar>
  ExactPoly<Scalar> polynomial(const Scalar& p) const {
    std::vector<Scalar> pw(static_cast<std::size_t>(edges_ + 1));
    for (int o = 0; o <= edges_; ++o) pw[static_cast<std::size_t>(o)] = power(p, o) * power(Scalar(1) - p, edges_ - o);
    const int K = kdim_ - 1;
    std::vector<Scalar> coeff(static_cast<std::size_t>(K + 1), Scalar(0));
    for (int k = 0; k <= K; ++k) {
      for (int b = 0; b <= k; ++b) {
        Scalar w = 0;
        for (int o = 0; o <= edges_; ++o) {
          const auto n = at(o, k, b);
          if (n != 0) w += Scalar(static_cast<long long>(n)) * pw[static_cast<std::size_t>(o)];
        }
        if (w == Scalar(0)) continue;
        // r^b (1-r)^(k-b) = sum_i C(k-b, i) (-1)^i r^(b+i)
        long long binom = 1;
        for (int i = 0; i <= k - b; ++i) {
          const Scalar term = w * Scalar(binom);
          if (i % 2 == 0) coeff[static_cast<std::size_t>(b + i)] += term;
          else coeff[static_cast<std::size_t>(b + i)] -= term;
          binom = binom * (k - b - i) / (i + 1);
        }
      }
    }
    return ExactPoly<Scalar>(std::move(coeff));
  }

private:
  template <class Scalar>
  static Scalar power(const Scalar& x, int e) {
    Scalar out = 1;
    for (int i = 0; i < e; ++i) out *= x;
    return out;
  }

  int edges_;
  int kdim_;
  std::vector<std::int64_t> counts_;
};

namespace detail {

// Calls f(open_count, labelling) for every bond configuration of the window.
template <class F>
void for_each_bond_config(Topology t, const Window& w, const OracleLimits& lim, F&& f) {
  const BondConfig empty(t, w, 0.0, 0);
  std::vector<std::pair<std::int64_t, int>> slots;  // (vertex index, direction)
  const auto dirs = bond_directions(t);
  for (std::int64_t i = 0; i < empty.grid().size(); ++i) {
    const Vertex v = empty.grid().vertex(i);
    for (std::size_t d = 0; d < dirs.size(); ++d)
      if (empty.grid().contains(v + dirs[d])) slots.emplace_back(i, static_cast<int>(d));
  }
  const int edges = static_cast<int>(slots.size());
  if (edges > lim.max_edges)
    throw OracleSizeError("window has " + std::to_string(edges) + " edges; exact enumeration is limited to " +
                          std::to_string(lim.max_edges) + " (use Monte Carlo mode)");
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << edges); ++mask) {
    BondConfig b = empty;
    auto masks = b.mutable_masks();
    for (int e = 0; e < edges; ++e)
      if ((mask >> e) & 1u)
        masks[static_cast<std::size_t>(slots[static_cast<std::size_t>(e)].first)] |=
            static_cast<std::uint8_t>(1u << slots[static_cast<std::size_t>(e)].second);
    f(std::popcount(mask), label_clusters(b));
  }
}

inline int count_edges(Topology t, const Window& w) {
  const Grid g(t, w.full());
  int n = 0;
  for (std::int64_t i = 0; i < g.size(); ++i)
    for (const Vertex d : bond_directions(t))
      if (g.contains(g.vertex(i) + d)) ++n;
  return n;
}

}  // namespace detail

// For every bond configuration and every colouring of the clusters meeting
// the events' supports, adds stat(tables, colouring, k) to the tally, where
// tables[e][colouring] is the indicator of events[e].
template <class Stat>
Tally tabulate(Topology t, const Window& w, std::span<const EventSpec> events, Stat&& stat,
               const OracleLimits& lim = {}) {
  const Grid grid(t, w.full());
  for (const auto& e : events)
    if (!grid.region().contains(e.support_rect())) throw std::out_of_range("oracle: event support outside window");
  const int edges = detail::count_edges(t, w);
  if (edges > lim.max_edges)
    throw OracleSizeError("window has " + std::to_string(edges) + " edges; exact enumeration is limited to " +
                          std::to_string(lim.max_edges) + " (use Monte Carlo mode)");
  const int max_k = static_cast<int>(std::min<std::int64_t>(grid.size(), lim.max_clusters));
  Tally tally(edges, max_k);
  std::vector<std::vector<std::uint8_t>> tables(events.size());
  detail::for_each_bond_config(t, w, lim, [&](int open, const ClusterLabeling& c) {
    std::vector<ClusterId> relevant;
    for (const ClusterId id : c.cluster_ids()) {
      for (const auto i : c.members(id)) {
        const Vertex v = grid.vertex(i);
        if (std::any_of(events.begin(), events.end(), [&](const EventSpec& e) { return e.in_support(v); })) {
          relevant.push_back(id);
          break;
        }
      }
    }
    const int k = static_cast<int>(relevant.size());
    if (k > lim.max_clusters) throw OracleSizeError("too many clusters for exact enumeration");
    const std::uint32_t colourings = 1u << k;
    for (auto& tab : tables) tab.assign(colourings, 0);
    for (std::uint32_t col = 0; col < colourings; ++col) {
      ColourField f(grid, Colour::White);
      for (int j = 0; j < k; ++j)
        if ((col >> j) & 1u)
          for (const auto i : c.members(relevant[static_cast<std::size_t>(j)])) f.set_at(i, Colour::Black);
      for (std::size_t e = 0; e < events.size(); ++e) tables[e][col] = events[e].holds(f) ? 1 : 0;
    }
    for (std::uint32_t col = 0; col < colourings; ++col) {
      const std::int64_t v = stat(std::span<const std::vector<std::uint8_t>>(tables), col, k);
      if (v != 0) tally.at(open, k, std::popcount(col)) += v;
    }
  });
  return tally;
}

template <class Scalar>
ExactPoly<Scalar> exact_polynomial_in_r(Topology t, const Window& w, const Scalar& p, const EventSpec& e,
                                        const OracleLimits& lim = {}) {
  const EventSpec events[] = {e};
  return tabulate(t, w, events, [](auto tables, std::uint32_t col, int) -> std::int64_t { return tables[0][col]; }, lim)
      .polynomial(p);
}

template <class Scalar>
Scalar enumerate_exact(Topology t, const Window& w, const Scalar& p, const Scalar& r, const EventSpec& e,
                       const OracleLimits& lim = {}) {
  return exact_polynomial_in_r(t, w, p, e, lim)(r);
}

// Expected number of pivotal p-clusters for e, as a polynomial in r.
template <class Scalar>
ExactPoly<Scalar> exact_pivotal_polynomial(Topology t, const Window& w, const Scalar& p, const EventSpec& e,
                                           const OracleLimits& lim = {}) {
  const EventSpec events[] = {e};
  auto stat = [](auto tables, std::uint32_t col, int k) -> std::int64_t {
    std::int64_t n = 0;
    for (int j = 0; j < k; ++j) n += tables[0][col] != tables[0][col ^ (1u << j)];
    return n;
  };
  return tabulate(t, w, events, stat, lim).template polynomial<Scalar>(p);
}

// P(A and B) as a polynomial in r.
template <class Scalar>
ExactPoly<Scalar> exact_joint_polynomial(Topology t, const Window& w, const Scalar& p, const EventSpec& a,
                                         const EventSpec& b, const OracleLimits& lim = {}) {
  const EventSpec events[] = {a, b};
  auto stat = [](auto tables, std::uint32_t col, int) -> std::int64_t { return tables[0][col] & tables[1][col]; };
  return tabulate(t, w, events, stat, lim).template polynomial<Scalar>(p);
}

struct SelfDualResult {
  bool holds = true;
  std::uint64_t colourings = 0;
  std::optional<ColourField> counterexample;
};

// Over every colouring of rect: exactly one of {black vertical ordinary
// crossing, white horizontal crossing in `white_mode`}.
inline SelfDualResult exhaustive_selfdual_check(const RectRegion& rect, Topology t = Topology::Square,
                                                Adjacency white_mode = Adjacency::Star, int max_vertices = 24) {
  const Grid g(t, rect);
  const auto n = g.size();
  if (n > max_vertices) throw OracleSizeError("selfdual check limited to " + std::to_string(max_vertices) + " vertices");
  const CrossingSpec black{rect, Direction::Vertical, Colour::Black, Adjacency::Ordinary};
  const CrossingSpec white{rect, Direction::Horizontal, Colour::White, white_mode};
  SelfDualResult out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    ColourField f(g, Colour::White);
    for (std::int64_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) f.set_at(i, Colour::Black);
    ++out.colourings;
    if (has_crossing(f, black) == has_crossing(f, white)) {
      out.holds = false;
      out.counterexample = std::move(f);
      return out;
    }
  }
  return out;
}

namespace detail {

// Winding number of a closed polygon around a point, in doubled coordinates
// so a half-integer centre stays integral. Linear maps keep it nonzero, so
// skew triangular coordinates work as they are.
inline int winding_number(std::span<const Vertex> cycle, Vertex doubled_centre) {
  int wn = 0;
  const std::size_t n = cycle.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex a{2 * cycle[i].x - doubled_centre.x, 2 * cycle[i].y - doubled_centre.y};
    const Vertex b{2 * cycle[(i + 1) % n].x - doubled_centre.x, 2 * cycle[(i + 1) % n].y - doubled_centre.y};
    const long long cross = static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
    if (a.y <= 0) {
      if (b.y > 0 && cross > 0) ++wn;
    } else if (b.y <= 0 && cross < 0) {
      --wn;
    }
  }
  return wn;
}

}  // namespace detail

// Searches explicit simple circuits of `colour` in `mode` inside the annulus
// for one that winds around the midpoint.
inline bool brute_force_circuit(const AnnulusRegion& a, const ColourField& f, Colour colour, Adjacency mode,
                                int max_outer_side = 9) {
  if (3 * a.n > max_outer_side) throw OracleSizeError("brute_force_circuit: annulus too large");
  const Grid& g = f.grid();
  if (!g.region().contains(a.outer())) throw std::out_of_range("brute_force_circuit: annulus outside window");
  const Grid local(g.topology(), a.outer());
  const auto offsets = neighbor_offsets(g.topology(), mode);
  const auto n = static_cast<std::size_t>(local.size());
  std::vector<std::uint8_t> usable(n, 0), on_path(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex v = local.vertex(static_cast<std::int64_t>(i));
    usable[i] = a.contains(v) && f.colour(v) == colour;
  }
  const Vertex centre = a.doubled_midpoint();
  std::vector<Vertex> path;

  // Whether root can still be reached from `from` off the current path.
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::int64_t> stack;
  auto can_close = [&](std::int64_t from, std::int64_t root) {
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, from);
    seen[static_cast<std::size_t>(from)] = 1;
    while (!stack.empty()) {
      const Vertex v = local.vertex(stack.back());
      stack.pop_back();
      for (const Vertex d : offsets) {
        const Vertex u = v + d;
        if (!local.contains(u)) continue;
        const auto iu = local.index(u);
        if (iu == root) return true;
        const auto k = static_cast<std::size_t>(iu);
        if (iu < root || seen[k] || on_path[k] || !usable[k]) continue;
        seen[k] = 1;
        stack.push_back(iu);
      }
    }
    return false;
  };

  // Cycles are rooted at their smallest index to visit each once per direction.
  std::function<bool(std::int64_t)> extend = [&](std::int64_t root) -> bool {
    const Vertex v = path.back();
    for (const Vertex d : offsets) {
      const Vertex u = v + d;
      if (!local.contains(u)) continue;
      const auto iu = local.index(u);
      if (iu == root && path.size() >= 3) {
        if (detail::winding_number(path, centre) != 0) return true;
        continue;
      }
      if (iu <= root || !usable[static_cast<std::size_t>(iu)] || on_path[static_cast<std::size_t>(iu)]) continue;
      if (!can_close(iu, root)) continue;
      on_path[static_cast<std::size_t>(iu)] = 1;
      path.push_back(u);
      if (extend(root)) return true;
      path.pop_back();
      on_path[static_cast<std::size_t>(iu)] = 0;
    }
    return false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (!usable[i]) continue;
    path.assign(1, local.vertex(static_cast<std::int64_t>(i)));
    std::fill(on_path.begin(), on_path.end(), 0);
    on_path[i] = 1;
    if (extend(static_cast<std::int64_t>(i))) return true;
  }
  return false;
}

}  // namespace dac
