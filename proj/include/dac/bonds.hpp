#pragma once

// Bernoulli bond percolation on a padded finite window, p-cluster labelling,
// dependence ranges, edge boundaries and closed-barrier predicates.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "dac/lattice.hpp"
#include "dac/rng.hpp"

namespace dac {

// Region of interest plus a sampling margin. All randomness lives on full().
struct Window {
  RectRegion core{};
  int pad = 0;

  RectRegion full() const { return core.expanded(pad); }

  friend bool operator==(const Window&, const Window&) = default;
};

inline int default_pad(const RectRegion& core) {
  return std::max(16, std::max(core.width(), core.height()) / 4);
}

inline Window make_window(const RectRegion& core) { return {core, default_pad(core)}; }

inline Window make_window(const RectRegion& core, int pad) {
  if (pad < 0) throw std::invalid_argument("Window: negative pad");
  return {core, pad};
}

// Undirected lattice edge with a < b.
struct Edge {
  Vertex a, b;

  static Edge make(Vertex u, Vertex v) { return u < v ? Edge{u, v} : Edge{v, u}; }
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

// Edge states as a pure function of (seed, base vertex, direction); lane d of
// the block drawn at the base vertex decides bond_directions(t)[d].
class BondSampler {
public:
  BondSampler(Topology t, double p, std::uint64_t seed) : topology_(t), p_(p), seed_(seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bond density p must lie in [0,1]");
    threshold_ = p * 0x1.0p32;
  }

  Topology topology() const { return topology_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  // Bit mask over bond_directions(t) for the bonds based at v.
  std::uint8_t open_mask(Vertex v) const {
    const auto block = draw_block_at(seed_, Stream::Bond, v.x, v.y);
    std::uint8_t mask = 0;
    const auto dirs = bond_directions(topology_).size();
    for (std::size_t d = 0; d < dirs; ++d)
      if (static_cast<double>(block[d]) < threshold_) mask |= static_cast<std::uint8_t>(1u << d);
    return mask;
  }

  bool is_open(Vertex u, Vertex v) const {
    const Edge e = Edge::make(u, v);
    const Vertex d = e.b - e.a;
    const auto dirs = bond_directions(topology_);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      if (dirs[k] == d) return (open_mask(e.a) >> k) & 1u;
      if (dirs[k] == Vertex{-d.x, -d.y}) return (open_mask(e.b) >> k) & 1u;
    }
    throw std::invalid_argument("is_open: vertices are not lattice neighbours");
  }

private:
  Topology topology_;
  double p_;
  std::uint64_t seed_;
  double threshold_;
};

class BondConfig {
public:
  BondConfig(Topology t, Window w, double p, std::uint64_t seed)
      : topology_(t), window_(w), p_(p), seed_(seed), grid_(t, w.full()),
        masks_(static_cast<std::size_t>(grid_.size()), 0) {}

  Topology topology() const { return topology_; }
  const Window& window() const { return window_; }
  const Grid& grid() const { return grid_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  // Bond from v in direction bond_directions(t)[dir]; false if it leaves the window.
  bool is_open(Vertex v, int dir) const {
    return grid_.contains(v) && ((masks_[static_cast<std::size_t>(grid_.index(v))] >> dir) & 1u);
  }
  bool is_open(const Edge& e) const {
    const Vertex d = e.b - e.a;
    const auto dirs = bond_directions(topology_);
    for (std::size_t k = 0; k < dirs.size(); ++k)
      if (dirs[k] == d) return grid_.contains(e.b) && is_open(e.a, static_cast<int>(k));
    return false;
  }
  bool contains(const Edge& e) const {
    return grid_.contains(e.a) && grid_.contains(e.b) && adjacent(topology_, Adjacency::Ordinary, e.a, e.b);
  }

  // Canonical edge order: vertices column-major, then bond direction.
  template <class F>
  void for_each_edge(F&& f) const {
    const auto dirs = bond_directions(topology_);
    for (std::int64_t i = 0; i < grid_.size(); ++i) {
      const Vertex v = grid_.vertex(i);
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Vertex w = v + dirs[d];
        if (grid_.contains(w)) f(Edge{v, w}, ((masks_[static_cast<std::size_t>(i)] >> d) & 1u) != 0);
      }
    }
  }

  std::int64_t edge_count() const {
    std::int64_t n = 0;
    for_each_edge([&](const Edge&, bool) { ++n; });
    return n;
  }

  std::span<const std::uint8_t> masks() const { return masks_; }
  std::span<std::uint8_t> mutable_masks() { return masks_; }

private:
  Topology topology_;
  Window window_;
  double p_;
  std::uint64_t seed_;
  Grid grid_;
  std::vector<std::uint8_t> masks_;  // per vertex, bit d = bond in direction d
};

// Each edge of the full window is open independently with probability p.
inline BondConfig sample_bonds(Topology t, const Window& w, double p, std::uint64_t seed) {
  const BondSampler sampler(t, p, seed);
  BondConfig config(t, w, p, seed);
  const Grid& g = config.grid();
  const auto dirs = bond_directions(t);
  auto masks = config.mutable_masks();
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const Vertex v = g.vertex(i);
    std::uint8_t m = sampler.open_mask(v);
    for (std::size_t d = 0; d < dirs.size(); ++d)
      if (!g.contains(v + dirs[d])) m &= static_cast<std::uint8_t>(~(1u << d));
    masks[static_cast<std::size_t>(i)] = m;
  }
  return config;
}

// Bond configuration from an explicit list of open edges (tests, oracles).
inline BondConfig bonds_from_open_edges(Topology t, const Window& w, std::span<const Edge> open) {
  BondConfig config(t, w, 0.0, 0);
  const auto dirs = bond_directions(t);
  auto masks = config.mutable_masks();
  for (const Edge& e : open) {
    if (!config.contains(e)) throw std::invalid_argument("bonds_from_open_edges: edge outside window");
    const Vertex d = e.b - e.a;
    for (std::size_t k = 0; k < dirs.size(); ++k)
      if (dirs[k] == d) masks[static_cast<std::size_t>(config.grid().index(e.a))] |= static_cast<std::uint8_t>(1u << k);
  }
  return config;
}

using ClusterId = std::int64_t;

// p-clusters of a bond configuration. A cluster is identified by the grid
// index of its lexicographically smallest member.
class ClusterLabeling {
public:
  const Grid& grid() const { return grid_; }
  std::int64_t cluster_count() const { return static_cast<std::int64_t>(roots_.size()); }

  ClusterId cluster_of(Vertex v) const { return label_[static_cast<std::size_t>(grid_.index(v))]; }
  ClusterId cluster_of_index(std::int64_t i) const { return label_[static_cast<std::size_t>(i)]; }
  Vertex canonical_vertex(ClusterId id) const { return grid_.vertex(id); }
  bool has_cluster(ClusterId id) const {
    return id >= 0 && id < grid_.size() && label_[static_cast<std::size_t>(id)] == id;
  }

  std::int64_t size(ClusterId id) const { return sizes_[ordinal(id)]; }
  bool touches_boundary(ClusterId id) const { return touches_[ordinal(id)] != 0; }

  // Grid indices of the members, ascending.
  std::span<const std::int32_t> members(ClusterId id) const {
    const auto k = ordinal(id);
    return std::span<const std::int32_t>(members_).subspan(static_cast<std::size_t>(offsets_[k]),
                                                           static_cast<std::size_t>(sizes_[k]));
  }

  // Cluster ids in increasing order.
  std::span<const ClusterId> cluster_ids() const { return roots_; }
  std::span<const ClusterId> labels() const { return label_; }

  // Position of `id` in cluster_ids().
  std::size_t ordinal(ClusterId id) const {
    const auto it = std::lower_bound(roots_.begin(), roots_.end(), id);
    if (it == roots_.end() || *it != id) throw std::out_of_range("unknown cluster id");
    return static_cast<std::size_t>(it - roots_.begin());
  }

private:
  friend ClusterLabeling label_clusters(const BondConfig& b);

  Grid grid_;
  std::vector<ClusterId> label_;
  std::vector<ClusterId> roots_;
  std::vector<std::int64_t> sizes_;
  std::vector<std::uint8_t> touches_;
  std::vector<std::int64_t> offsets_;
  std::vector<std::int32_t> members_;
};

namespace detail {

inline std::int32_t uf_find(std::vector<std::int32_t>& parent, std::int32_t x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    auto& px = parent[static_cast<std::size_t>(x)];
    px = parent[static_cast<std::size_t>(px)];
    x = px;
  }
  return x;
}

}  // namespace detail

// Union-find labelling; the root of each set is kept at its smallest index.
inline ClusterLabeling label_clusters(const BondConfig& b) {
  const Grid& g = b.grid();
  const auto n = static_cast<std::size_t>(g.size());
  std::vector<std::int32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);

  const auto dirs = bond_directions(b.topology());
  const auto masks = b.masks();
  const int h = g.height();
  std::vector<std::int32_t> step(dirs.size());
  for (std::size_t d = 0; d < dirs.size(); ++d) step[d] = dirs[d].x * h + dirs[d].y;

  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t m = masks[i];
    if (m == 0) continue;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      if (!((m >> d) & 1u)) continue;
      auto ri = detail::uf_find(parent, static_cast<std::int32_t>(i));
      auto rj = detail::uf_find(parent, static_cast<std::int32_t>(i) + step[d]);
      if (ri == rj) continue;
      if (ri > rj) std::swap(ri, rj);
      parent[static_cast<std::size_t>(rj)] = ri;
    }
  }

  ClusterLabeling c;
  c.grid_ = g;
  c.label_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Roots precede their members, so one forward pass resolves every label.
    const auto pi = parent[i];
    c.label_[i] = (static_cast<std::size_t>(pi) == i) ? static_cast<ClusterId>(i) : c.label_[static_cast<std::size_t>(pi)];
    parent[i] = static_cast<std::int32_t>(c.label_[i]);
    if (c.label_[i] == static_cast<ClusterId>(i)) c.roots_.push_back(static_cast<ClusterId>(i));
  }

  const std::size_t k = c.roots_.size();
  std::vector<std::int32_t> ord(n, -1);
  for (std::size_t j = 0; j < k; ++j) ord[static_cast<std::size_t>(c.roots_[j])] = static_cast<std::int32_t>(j);
  c.sizes_.assign(k, 0);
  c.touches_.assign(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(ord[static_cast<std::size_t>(c.label_[i])]);
    ++c.sizes_[j];
    if (g.on_boundary(g.vertex(static_cast<std::int64_t>(i)))) c.touches_[j] = 1;
  }
  c.offsets_.assign(k + 1, 0);
  for (std::size_t j = 0; j < k; ++j) c.offsets_[j + 1] = c.offsets_[j] + c.sizes_[j];
  c.members_.resize(n);
  std::vector<std::int64_t> fill(c.offsets_.begin(), c.offsets_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(ord[static_cast<std::size_t>(c.label_[i])]);
    c.members_[static_cast<std::size_t>(fill[j]++)] = static_cast<std::int32_t>(i);
  }
  c.offsets_.pop_back();
  return c;
}

struct DependenceRange {
  int range = 0;
  bool censored = false;  // cluster reaches the window boundary; range is a lower bound
};

// D(v): largest L1 distance from v to a member of its p-cluster.
inline DependenceRange dependence_range(const ClusterLabeling& c, Vertex v) {
  const Grid& g = c.grid();
  if (!g.contains(v)) throw std::out_of_range("dependence_range: vertex outside window");
  const ClusterId id = c.cluster_of(v);
  DependenceRange out;
  for (const auto i : c.members(id)) out.range = std::max(out.range, l1_distance(v, g.vertex(i)));
  out.censored = c.touches_boundary(id);
  return out;
}

// Lattice edges with exactly one endpoint in s, sorted. Edges leaving the
// window are included.
inline std::vector<Edge> edge_boundary(std::span<const Vertex> s, Topology t, const Window& w) {
  const RectRegion full = w.full();
  std::vector<Vertex> sorted(s.begin(), s.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Edge> out;
  for (const Vertex v : sorted) {
    if (!full.contains(v)) throw std::out_of_range("edge_boundary: vertex outside window");
    for (const Vertex d : neighbor_offsets(t, Adjacency::Ordinary)) {
      const Vertex u = v + d;
      if (!std::binary_search(sorted.begin(), sorted.end(), u)) out.push_back(Edge::make(v, u));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// True iff every edge is closed and removing the edges leaves exactly one
// component touching the window boundary plus at least one finite component.
// Edges leaving the window have no state and never certify a barrier.
inline bool is_closed_barrier(std::span<const Edge> edges, const BondConfig& b) {
  if (edges.empty()) throw std::invalid_argument("is_closed_barrier: empty edge set");
  for (const Edge& e : edges)
    if (!b.contains(e) || b.is_open(e)) return false;

  std::vector<Edge> removed(edges.begin(), edges.end());
  std::sort(removed.begin(), removed.end());
  const Grid& g = b.grid();
  const auto n = static_cast<std::size_t>(g.size());
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::int64_t> stack;

  // Flood from one boundary vertex through the full lattice graph minus `edges`.
  const Vertex start{g.region().x0, g.region().y0};
  seen[static_cast<std::size_t>(g.index(start))] = 1;
  stack.push_back(g.index(start));
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex v = g.vertex(stack.back());
    stack.pop_back();
    for (const Vertex d : neighbor_offsets(g.topology(), Adjacency::Ordinary)) {
      const Vertex u = v + d;
      if (!g.contains(u)) continue;
      const auto iu = static_cast<std::size_t>(g.index(u));
      if (seen[iu]) continue;
      if (std::binary_search(removed.begin(), removed.end(), Edge::make(u, v))) continue;
      seen[iu] = 1;
      ++reached;
      stack.push_back(static_cast<std::int64_t>(iu));
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i] && g.on_boundary(g.vertex(static_cast<std::int64_t>(i)))) return false;
  return reached < n;
}

}  // namespace dac
