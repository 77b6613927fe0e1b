#pragma once

// Pivotal p-clusters and the Russo identity dP/dr = +-E[#pivotal clusters].

#include <algorithm>
#include <cmath>
#include <memory>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dac/bonds.hpp"
#include "dac/colouring.hpp"
#include "dac/events.hpp"
#include "dac/oracle.hpp"
#include "dac/parallel.hpp"
#include "dac/rng.hpp"

namespace dac {

// Clusters meeting the support of e, ascending.
inline std::vector<ClusterId> candidate_clusters(const ClusterLabeling& c, const EventSpec& e) {
  std::vector<ClusterId> ids;
  for (const Vertex v : e.support()) {
    if (!c.grid().contains(v)) throw std::out_of_range("event support outside window");
    ids.push_back(c.cluster_of(v));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

namespace detail {

inline void toggle(ColourField& f, const ClusterLabeling& c, ClusterId id) {
  for (const auto i : c.members(id)) f.set_at(i, opposite(f.colour_at(i)));
}

inline std::vector<ClusterId> pivotal_in_field(ColourField f, const ClusterLabeling& c, const EventSpec& e) {
  const bool base = e.holds(f);
  std::vector<ClusterId> out;
  for (const ClusterId id : candidate_clusters(c, e)) {
    toggle(f, c, id);
    if (e.holds(f) != base) out.push_back(id);
    toggle(f, c, id);
  }
  return out;
}

}  // namespace detail

// Clusters whose colour flip changes the indicator of e.
inline std::vector<ClusterId> pivotal_clusters(const ColourConfig& x, const EventSpec& e) {
  return detail::pivotal_in_field(x.field(), x.clusters(), e);
}

enum class RussoMode : std::uint8_t { Oracle, MonteCarlo };

struct RussoReport {
  RussoMode mode = RussoMode::Oracle;
  double derivative = 0;   // dP/dr at r
  double expectation = 0;  // E[#pivotal clusters] at r
  double gap = 0;          // derivative - sign * expectation, sign = +1 increasing, -1 decreasing
  double gap_stderr = 0;
  std::int64_t n_samples = 0;
};

// Exact identity check; gap is exact in rational arithmetic.
struct ExactRusso {
  Rational derivative;
  Rational expectation;
  Rational gap;
  ExactPoly<Rational> derivative_poly;
  ExactPoly<Rational> expectation_poly;
};

inline ExactRusso russo_check_exact(Topology t, const Window& w, const Rational& p, const EventSpec& e,
                                    const Rational& r, const OracleLimits& lim = {}) {
  ExactRusso out;
  out.derivative_poly = exact_polynomial_in_r(t, w, p, e, lim).derivative();
  out.expectation_poly = exact_pivotal_polynomial(t, w, p, e, lim);
  out.derivative = out.derivative_poly(r);
  out.expectation = out.expectation_poly(r);
  const Rational sign = e.monotonicity() == Monotonicity::Increasing ? 1 : -1;
  out.gap = out.derivative - sign * out.expectation;
  return out;
}

struct RussoMcOptions {
  std::int64_t n_samples = 10000;
  std::uint64_t seed = 1;
  double h = 0.01;
  int threads = 0;
};

// Symmetric difference of the event indicator at r +- h on shared marks
// against the mean pivotal count at r.
inline RussoReport russo_check_mc(Topology t, const Window& w, double p, const EventSpec& e, double r,
                                  const RussoMcOptions& opt = {}) {
  const double lo = std::max(0.0, r - opt.h);
  const double hi = std::min(1.0, r + opt.h);
  if (!(hi > lo)) throw std::invalid_argument("russo_check_mc: degenerate difference step");
  const double sign = e.monotonicity() == Monotonicity::Increasing ? 1.0 : -1.0;
  struct Row {
    double diff, piv;
  };
  const auto rows = run_replicas<Row>(opt.n_samples, opt.threads, [&](std::int64_t i) {
    const std::uint64_t s = replica_seed(opt.seed, static_cast<std::uint64_t>(i));
    auto c = std::make_shared<const ClusterLabeling>(label_clusters(sample_bonds(t, w, p, s)));
    const ColourConfig x = assign_colours(c, r, s);
    const double up = e.holds(recolour_at(x, hi).field()) ? 1.0 : 0.0;
    const double down = e.holds(recolour_at(x, lo).field()) ? 1.0 : 0.0;
    return Row{(up - down) / (hi - lo), static_cast<double>(pivotal_clusters(x, e).size())};
  });
  const double n = static_cast<double>(opt.n_samples);
  double sd = 0, sp = 0;
  for (const auto& row : rows) {
    sd += row.diff;
    sp += row.piv;
  }
  RussoReport out;
  out.mode = RussoMode::MonteCarlo;
  out.n_samples = opt.n_samples;
  out.derivative = sd / n;
  out.expectation = sp / n;
  out.gap = out.derivative - sign * out.expectation;
  double var = 0;
  for (const auto& row : rows) {
    const double g = row.diff - sign * row.piv - out.gap;
    var += g * g;
  }
  out.gap_stderr = opt.n_samples > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
  return out;
}

// Oracle mode needs a window within the enumeration limits; otherwise the
// OracleSizeError names Monte Carlo mode as the alternative.
inline RussoReport russo_check(Topology t, const Window& w, double p, const EventSpec& e, double r, RussoMode mode,
                               const RussoMcOptions& opt = {}) {
  if (mode == RussoMode::MonteCarlo) return russo_check_mc(t, w, p, e, r, opt);
  // Binary fractions convert to rationals exactly.
  const ExactRusso ex = russo_check_exact(t, w, Rational(p), e, Rational(r));
  RussoReport out;
  out.mode = RussoMode::Oracle;
  out.derivative = static_cast<double>(ex.derivative);
  out.expectation = static_cast<double>(ex.expectation);
  out.gap = static_cast<double>(ex.gap);
  return out;
}

}  // namespace dac
