#pragma once

// Colourings constant on p-clusters. Each cluster carries a uniform mark and
// is black iff mark < r, so one set of marks realises the whole family of
// colourings r in [0,1] monotonically.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dac/bonds.hpp"
#include "dac/lattice.hpp"
#include "dac/rng.hpp"

namespace dac {

enum class Colour : std::uint8_t { White = 0, Black = 1 };

constexpr Colour opposite(Colour c) { return c == Colour::Black ? Colour::White : Colour::Black; }
inline std::string_view to_string(Colour c) { return c == Colour::Black ? "black" : "white"; }

class BadClusterReference : public std::out_of_range {
public:
  explicit BadClusterReference(ClusterId id)
      : std::out_of_range("no p-cluster with id " + std::to_string(id)) {}
};

// Plain per-vertex colours over a grid; what the connectivity queries read.
class ColourField {
public:
  ColourField() = default;
  ColourField(Grid grid, Colour fill)
      : grid_(grid), black_(static_cast<std::size_t>(grid.size()), fill == Colour::Black ? 1 : 0) {}

  const Grid& grid() const { return grid_; }
  Colour colour(Vertex v) const { return colour_at(grid_.index(v)); }
  Colour colour_at(std::int64_t i) const {
    return black_[static_cast<std::size_t>(i)] ? Colour::Black : Colour::White;
  }
  void set(Vertex v, Colour c) { black_[static_cast<std::size_t>(grid_.index(v))] = c == Colour::Black ? 1 : 0; }
  void set_at(std::int64_t i, Colour c) { black_[static_cast<std::size_t>(i)] = c == Colour::Black ? 1 : 0; }

  // Black/white exchanged everywhere.
  ColourField swapped() const {
    ColourField out = *this;
    for (auto& b : out.black_) b ^= 1u;
    return out;
  }

  friend bool operator==(const ColourField&, const ColourField&) = default;

private:
  Grid grid_;
  std::vector<std::uint8_t> black_;  // 1 = black
};

// Mark of the cluster whose lexicographically smallest member is `canonical`.
inline double cluster_mark(std::uint64_t seed, Vertex canonical) {
  const auto b = draw_block_at(seed, Stream::Mark, canonical.x, canonical.y);
  const std::uint64_t bits = (std::uint64_t{b[1]} << 32) | b[0];
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class ColourConfig {
public:
  ColourConfig(std::shared_ptr<const ClusterLabeling> clusters, std::vector<double> marks, double r,
               std::uint64_t seed = 0)
      : clusters_(std::move(clusters)), marks_(std::move(marks)), r_(r), seed_(seed) {
    if (!clusters_) throw std::invalid_argument("ColourConfig: null labelling");
    if (marks_.size() != static_cast<std::size_t>(clusters_->cluster_count()))
      throw std::invalid_argument("ColourConfig: one mark per cluster required");
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("colour density r must lie in [0,1]");
  }

  const ClusterLabeling& clusters() const { return *clusters_; }
  const std::shared_ptr<const ClusterLabeling>& clusters_ptr() const { return clusters_; }
  std::span<const double> marks() const { return marks_; }
  double r() const { return r_; }
  std::uint64_t seed() const { return seed_; }
  bool has_overrides() const { return !overrides_.empty(); }

  double mark(ClusterId id) const { return marks_[clusters_->ordinal(id)]; }

  Colour cluster_colour(ClusterId id) const {
    if (!clusters_->has_cluster(id)) throw BadClusterReference(id);
    return colour_of_ordinal(clusters_->ordinal(id));
  }

  Colour colour(Vertex v) const {
    if (!clusters_->grid().contains(v)) throw std::out_of_range("colour: vertex outside window");
    return colour_of_ordinal(clusters_->ordinal(clusters_->cluster_of(v)));
  }

  ColourField field() const {
    const Grid& g = clusters_->grid();
    ColourField f(g, Colour::White);
    const auto ids = clusters_->cluster_ids();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (colour_of_ordinal(k) != Colour::Black) continue;
      for (const auto i : clusters_->members(ids[k])) f.set_at(i, Colour::Black);
    }
    return f;
  }

private:
  friend ColourConfig recolour_at(const ColourConfig& x, double r);
  friend ColourConfig flip_cluster(const ColourConfig& x, ClusterId id);

  Colour colour_of_ordinal(std::size_t k) const {
    if (!overrides_.empty() && overrides_[k] >= 0) return static_cast<Colour>(overrides_[k]);
    return marks_[k] < r_ ? Colour::Black : Colour::White;
  }

  std::shared_ptr<const ClusterLabeling> clusters_;
  std::vector<double> marks_;  // by cluster ordinal
  double r_;
  std::uint64_t seed_;
  std::vector<std::int8_t> overrides_;  // -1 none, else forced Colour
};

inline std::vector<double> draw_marks(const ClusterLabeling& c, std::uint64_t seed) {
  std::vector<double> marks;
  marks.reserve(static_cast<std::size_t>(c.cluster_count()));
  for (const ClusterId id : c.cluster_ids()) marks.push_back(cluster_mark(seed, c.canonical_vertex(id)));
  return marks;
}

inline ColourConfig assign_colours(std::shared_ptr<const ClusterLabeling> c, double r, std::uint64_t seed) {
  auto marks = draw_marks(*c, seed);
  return ColourConfig(std::move(c), std::move(marks), r, seed);
}

inline ColourConfig assign_colours(ClusterLabeling c, double r, std::uint64_t seed) {
  return assign_colours(std::make_shared<const ClusterLabeling>(std::move(c)), r, seed);
}

// Same marks, new threshold. Overrides are kept.
inline ColourConfig recolour_at(const ColourConfig& x, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("colour density r must lie in [0,1]");
  ColourConfig out = x;
  out.r_ = r;
  return out;
}

inline ColourConfig flip_cluster(const ColourConfig& x, ClusterId id) {
  if (!x.clusters().has_cluster(id)) throw BadClusterReference(id);
  ColourConfig out = x;
  const std::size_t k = x.clusters().ordinal(id);
  if (out.overrides_.empty()) out.overrides_.assign(out.marks_.size(), -1);
  out.overrides_[k] = static_cast<std::int8_t>(opposite(x.colour_of_ordinal(k)));
  return out;
}

inline Colour colour(const ColourConfig& x, Vertex v) { return x.colour(v); }

// Marks u -> 1 - u: black at r under the reflection is white at 1 - r here
// (up to ties u == r, a null event).
inline ColourConfig reflect_marks(const ColourConfig& x, double r) {
  std::vector<double> m(x.marks().begin(), x.marks().end());
  for (auto& u : m) u = 1.0 - u;
  return ColourConfig(x.clusters_ptr(), std::move(m), r, x.seed());
}

}  // namespace dac
