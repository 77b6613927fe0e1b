#pragma once

// Colour events: crossings, annulus circuits and single-vertex colours.

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dac/colouring.hpp"
#include "dac/connectivity.hpp"
#include "dac/lattice.hpp"

namespace dac {

enum class Monotonicity : std::uint8_t { Increasing, Decreasing };

struct CircuitSpec {
  AnnulusRegion annulus{};
  Colour colour = Colour::Black;
  Adjacency mode = Adjacency::Ordinary;

  friend bool operator==(const CircuitSpec&, const CircuitSpec&) = default;
};

struct VertexColourSpec {
  Vertex v{};
  Colour colour = Colour::Black;

  friend bool operator==(const VertexColourSpec&, const VertexColourSpec&) = default;
};

class EventSpec {
public:
  using Kind = std::variant<CrossingSpec, CircuitSpec, VertexColourSpec>;

  EventSpec(CrossingSpec s) : kind_(s) {}  // NOLINT(google-explicit-constructor)
  EventSpec(CircuitSpec s) : kind_(s) {}   // NOLINT(google-explicit-constructor)
  EventSpec(VertexColourSpec s) : kind_(s) {}  // NOLINT(google-explicit-constructor)

  const Kind& kind() const { return kind_; }

  // Black events are increasing, white ones decreasing.
  Monotonicity monotonicity() const {
    return colour() == Colour::Black ? Monotonicity::Increasing : Monotonicity::Decreasing;
  }

  Colour colour() const {
    return std::visit([](const auto& s) { return s.colour; }, kind_);
  }

  // Bounding rectangle of the vertices the event reads.
  RectRegion support_rect() const {
    return std::visit(
        [](const auto& s) -> RectRegion {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CrossingSpec>) return s.rect;
          else if constexpr (std::is_same_v<T, CircuitSpec>) return s.annulus.outer();
          else return RectRegion{s.v.x, s.v.x, s.v.y, s.v.y};
        },
        kind_);
  }

  bool in_support(Vertex v) const {
    return std::visit(
        [&](const auto& s) -> bool {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CrossingSpec>) return s.rect.contains(v);
          else if constexpr (std::is_same_v<T, CircuitSpec>) return s.annulus.contains(v);
          else return s.v == v;
        },
        kind_);
  }

  std::vector<Vertex> support() const {
    std::vector<Vertex> out;
    for (const Vertex v : rect_vertices(support_rect()))
      if (in_support(v)) out.push_back(v);
    return out;
  }

  // Same event with colours exchanged (and hence reversed monotonicity).
  EventSpec colour_swapped() const {
    return std::visit(
        [](auto s) -> EventSpec {
          s.colour = opposite(s.colour);
          return EventSpec(s);
        },
        kind_);
  }

  bool holds(const ColourField& f) const {
    return std::visit(
        [&](const auto& s) -> bool {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CrossingSpec>) return has_crossing(f, s);
          else if constexpr (std::is_same_v<T, CircuitSpec>)
            return has_circuit_in_annulus(f, s.annulus, s.colour, s.mode);
          else return f.colour(s.v) == s.colour;
        },
        kind_);
  }

  std::string describe() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CrossingSpec>) {
            return std::string(to_string(s.direction)) + "_" + std::string(to_string(s.colour)) + "_" +
                   std::string(to_string(s.mode));
          } else if constexpr (std::is_same_v<T, CircuitSpec>) {
            return "circuit_" + std::string(to_string(s.colour)) + "_" + std::string(to_string(s.mode));
          } else {
            return "vertex_" + std::string(to_string(s.colour)) + to_string(s.v);
          }
        },
        kind_);
  }

  friend bool operator==(const EventSpec&, const EventSpec&) = default;

private:
  Kind kind_;
};

inline EventSpec vertex_black(Vertex v) { return VertexColourSpec{v, Colour::Black}; }

inline EventSpec crossing(RectRegion rect, Direction d, Colour c = Colour::Black, Adjacency m = Adjacency::Ordinary) {
  return CrossingSpec{rect, d, c, m};
}

inline bool holds(const EventSpec& e, const ColourField& f) { return e.holds(f); }
inline bool holds(const EventSpec& e, const ColourConfig& x) { return e.holds(x.field()); }

}  // namespace dac
