#pragma once

// Exact property suite over small windows: self-duality, Russo identity, FKG
// gaps and circuit dual-rule agreement. Shared by `dac verify` and the
// acceptance binary.

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dac/oracle.hpp"
#include "dac/pivotal.hpp"

namespace dac {

struct CheckResult {
  std::string name;
  bool pass = true;
  std::int64_t cases = 0;
  std::string detail;
  std::string counterexample;
};

struct SuiteLimits {
  int max_vertices = 12;  // self-duality: every rectangle with at most this many vertices
  int max_edges = 12;     // Russo: every window with at most this many edges
};

// One row per y, top row first; B black, . white, ' ' outside `keep`.
template <class Keep>
std::string render_field(const ColourField& f, Keep&& keep) {
  const RectRegion r = f.grid().region();
  std::ostringstream os;
  for (int y = r.y1; y >= r.y0; --y) {
    for (int x = r.x0; x <= r.x1; ++x) {
      const Vertex v{x, y};
      os << (!keep(v) ? ' ' : f.colour(v) == Colour::Black ? 'B' : '.');
    }
    os << '\n';
  }
  return os.str();
}

inline std::string render_field(const ColourField& f) {
  return render_field(f, [](Vertex) { return true; });
}

inline std::string describe(const CrossingSpec& s) {
  std::ostringstream os;
  os << (s.direction == Direction::Vertical ? 'V' : 'H') << (s.colour == Colour::Black ? 'b' : 'w')
     << (s.mode == Adjacency::Star ? "*" : "") << " [" << s.rect.x0 << ',' << s.rect.x1 << "]x[" << s.rect.y0 << ','
     << s.rect.y1 << ']';
  return os.str();
}

inline std::string describe(const EventSpec& e) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CrossingSpec>) {
          return describe(s);
        } else if constexpr (std::is_same_v<T, CircuitSpec>) {
          return "circuit " + std::string(to_string(s.colour)) + " " + std::string(to_string(s.mode)) + " A_" +
                 std::to_string(s.annulus.n) + " at " + to_string(s.annulus.origin);
        } else {
          return std::string(to_string(s.colour)) + " " + to_string(s.v);
        }
      },
      e.kind());
}

inline std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

inline CheckResult selfdual_suite(const SuiteLimits& lim = {}) {
  CheckResult out;
  out.name = "selfdual";
  int rects = 0;
  for (const Topology t : {Topology::Square, Topology::Triangular}) {
    for (int w = 1; w <= lim.max_vertices; ++w) {
      for (int h = 1; w * h <= lim.max_vertices; ++h) {
        const RectRegion rect{0, w - 1, 0, h - 1};
        const auto res = exhaustive_selfdual_check(rect, t, Adjacency::Star, lim.max_vertices);
        out.cases += static_cast<std::int64_t>(res.colourings);
        ++rects;
        if (!res.holds) {
          out.pass = false;
          out.detail = std::string(to_string(t)) + " " + std::to_string(w) + "x" + std::to_string(h);
          out.counterexample = render_field(*res.counterexample);
          return out;
        }
      }
    }
  }
  out.detail = std::to_string(rects) + " rectangles up to " + std::to_string(lim.max_vertices) + " vertices";
  return out;
}

inline std::vector<std::pair<Topology, Window>> russo_windows(int max_edges) {
  std::vector<std::pair<Topology, Window>> out;
  for (const Topology t : {Topology::Square, Topology::Triangular})
    for (int a = 1; a <= max_edges; ++a)
      for (int b = 1; b <= max_edges; ++b) {
        const Window w = make_window(rect_nm(a, b), 0);
        if (detail::count_edges(t, w) <= max_edges) out.emplace_back(t, w);
      }
  return out;
}

inline CheckResult russo_suite(const SuiteLimits& lim = {}) {
  CheckResult out;
  out.name = "russo";
  const Rational ps[] = {Rational(0), Rational(3, 10), Rational(1, 2)};
  const Rational rs[] = {Rational(1, 4), Rational(1, 2), Rational(3, 4)};
  const auto windows = russo_windows(lim.max_edges);
  for (const auto& [t, w] : windows) {
    const CrossingSpec events[] = {{w.core, Direction::Vertical, Colour::Black, Adjacency::Ordinary},
                                   {w.core, Direction::Horizontal, Colour::Black, Adjacency::Ordinary},
                                   {w.core, Direction::Horizontal, Colour::White, Adjacency::Star},
                                   {w.core, Direction::Vertical, Colour::White, Adjacency::Star}};
    for (const Rational& p : ps) {
      for (const CrossingSpec& s : events) {
        const auto rep = russo_check_exact(t, w, p, s, rs[0]);
        const Rational sign = EventSpec(s).monotonicity() == Monotonicity::Increasing ? 1 : -1;
        for (const Rational& r : rs) {
          ++out.cases;
          const Rational gap = rep.derivative_poly(r) - sign * rep.expectation_poly(r);
          if (gap != 0) {
            out.pass = false;
            out.detail = "gap " + to_string(gap);
            out.counterexample = std::string(to_string(t)) + " window " + describe(s) + " p=" + to_string(p) +
                                 " r=" + to_string(r) + " dP/dr=" + to_string(rep.derivative_poly(r)) +
                                 " E[pivotal]=" + to_string(rep.expectation_poly(r)) + "\n";
            return out;
          }
        }
      }
    }
  }
  out.detail = std::to_string(windows.size()) + " windows, gap exactly 0";
  return out;
}

// Pairs of increasing events on the 3x3 window S_{2,2} (and two decreasing
// pairs, for which the same inequality holds).
inline std::vector<std::pair<EventSpec, EventSpec>> fkg_catalogue() {
  const RectRegion s = rect_nm(2, 2);
  const auto cross = [](RectRegion r, Direction d, Colour c = Colour::Black, Adjacency m = Adjacency::Ordinary) {
    return EventSpec(CrossingSpec{r, d, c, m});
  };
  using D = Direction;
  return {
      {cross(s, D::Vertical), cross(s, D::Horizontal)},
      {cross(s, D::Vertical), vertex_black({1, 1})},
      {cross(s, D::Horizontal), vertex_black({0, 0})},
      {vertex_black({0, 0}), vertex_black({2, 2})},
      {vertex_black({0, 0}), vertex_black({1, 0})},
      {cross(s, D::Vertical), cross(s, D::Vertical, Colour::Black, Adjacency::Star)},
      {cross(s, D::Horizontal, Colour::Black, Adjacency::Star), vertex_black({2, 1})},
      {cross({0, 1, 0, 2}, D::Vertical), cross({1, 2, 0, 2}, D::Vertical)},
      {cross({0, 2, 0, 1}, D::Horizontal), cross({0, 2, 1, 2}, D::Horizontal)},
      {cross(s, D::Vertical), cross(s, D::Horizontal, Colour::Black, Adjacency::Star)},
      {cross({0, 0, 0, 2}, D::Vertical), cross({2, 2, 0, 2}, D::Vertical)},
      {cross(s, D::Vertical, Colour::White, Adjacency::Star), cross(s, D::Horizontal, Colour::White)},
      {EventSpec(VertexColourSpec{{1, 1}, Colour::White}), cross(s, D::Horizontal, Colour::White, Adjacency::Star)},
  };
}

inline CheckResult fkg_suite() {
  CheckResult out;
  out.name = "fkg";
  const Window w = make_window(rect_nm(2, 2), 0);
  const Rational ps[] = {Rational(0), Rational(3, 10)};
  const Rational rs[] = {Rational(3, 10), Rational(1, 2), Rational(7, 10)};
  const auto pairs = fkg_catalogue();
  for (const auto& [a, b] : pairs) {
    for (const Rational& p : ps) {
      const auto pa = exact_polynomial_in_r(Topology::Square, w, p, a);
      const auto pb = exact_polynomial_in_r(Topology::Square, w, p, b);
      const auto gap = exact_joint_polynomial(Topology::Square, w, p, a, b) - pa * pb;
      for (const Rational& r : rs) {
        ++out.cases;
        if (gap(r) < 0) {
          out.pass = false;
          out.detail = "gap " + to_string(gap(r));
          out.counterexample = "A = " + describe(a) + ", B = " + describe(b) + ", p=" + to_string(p) +
                               " r=" + to_string(r) + "\n";
          return out;
        }
      }
    }
  }
  out.detail = std::to_string(pairs.size()) + " pairs on 3x3, all gaps >= 0";
  return out;
}

inline CheckResult circuit_suite(const AnnulusRegion& a = {{0, 0}, 1}) {
  CheckResult out;
  out.name = "circuit";
  std::vector<Vertex> ring;
  for (const Vertex v : rect_vertices(a.outer()))
    if (a.contains(v)) ring.push_back(v);
  if (ring.size() > 20) throw OracleSizeError("circuit_suite: annulus too large");
  for (const Topology t : {Topology::Square, Topology::Triangular}) {
    const Grid g(t, a.outer());
    for (std::uint32_t bits = 0; bits < (1u << ring.size()); ++bits) {
      ColourField f(g, Colour::White);
      for (std::size_t j = 0; j < ring.size(); ++j)
        if ((bits >> j) & 1u) f.set(ring[j], Colour::Black);
      for (const Colour c : {Colour::Black, Colour::White}) {
        for (const Adjacency m : {Adjacency::Ordinary, Adjacency::Star}) {
          ++out.cases;
          const bool rule = has_circuit_in_annulus(f, a, c, m);
          if (rule != brute_force_circuit(a, f, c, m)) {
            out.pass = false;
            out.detail = std::string(to_string(t)) + " " + std::string(to_string(c)) + " " +
                         std::string(to_string(m)) + ": dual rule says " + (rule ? "circuit" : "none");
            out.counterexample = render_field(f, [&](Vertex v) { return a.contains(v); });
            return out;
          }
        }
      }
    }
  }
  out.detail = "A_" + std::to_string(a.n) + ", both topologies, colours and modes";
  return out;
}

inline std::vector<CheckResult> oracle_suite(const SuiteLimits& lim = {}) {
  return {selfdual_suite(lim), russo_suite(lim), fkg_suite(), circuit_suite()};
}

}  // namespace dac
