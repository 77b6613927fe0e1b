#pragma once

// Monte Carlo estimators over independent replicas of the model.
//
// Replica i of a run with seed s uses replica_seed(s, i) for both its bonds
// and its cluster marks, so every estimator is a deterministic function of
// (parameters, seed) whatever the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dac/bonds.hpp"
#include "dac/colouring.hpp"
#include "dac/connectivity.hpp"
#include "dac/events.hpp"
#include "dac/oracle.hpp"
#include "dac/parallel.hpp"
#include "dac/rng.hpp"

namespace dac {

// Bond percolation thresholds.
inline constexpr double kSquarePc = 0.5;
inline const double kTriangularPc = 2.0 * std::sin(std::numbers::pi / 18.0);

inline double critical_p(Topology t) { return t == Topology::Square ? kSquarePc : kTriangularPc; }
inline bool supercritical(Topology t, double p) { return p >= critical_p(t); }

struct McOptions {
  std::int64_t n_samples = 10000;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct Estimate {
  double value = 0;
  double std_error = 0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  double censored_fraction = 0;
};

namespace detail {

inline Estimate mean_estimate(std::span<const double> xs, std::uint64_t seed) {
  Estimate e;
  e.n_samples = static_cast<std::int64_t>(xs.size());
  e.seed = seed;
  if (xs.empty()) return e;
  const double n = static_cast<double>(xs.size());
  double s = 0;
  for (const double x : xs) s += x;
  e.value = s / n;
  double v = 0;
  for (const double x : xs) v += (x - e.value) * (x - e.value);
  e.std_error = xs.size() > 1 ? std::sqrt(v / (n - 1) / n) : 0.0;
  return e;
}

// Binomial standard error sqrt(v(1-v)/n).
inline Estimate proportion(std::int64_t hits, std::int64_t n, std::uint64_t seed) {
  Estimate e;
  e.n_samples = n;
  e.seed = seed;
  if (n == 0) return e;
  e.value = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
  return e;
}

struct Replica {
  std::shared_ptr<const ClusterLabeling> clusters;
  std::vector<double> marks;
};

inline Replica sample_replica(Topology t, const Window& w, double p, std::uint64_t s) {
  Replica out;
  out.clusters = std::make_shared<const ClusterLabeling>(label_clusters(sample_bonds(t, w, p, s)));
  out.marks = draw_marks(*out.clusters, s);
  return out;
}

inline bool support_censored(const ClusterLabeling& c, const EventSpec& e) {
  const RectRegion r = e.support_rect();
  for (int x = r.x0; x <= r.x1; ++x)
    for (int y = r.y0; y <= r.y1; ++y) {
      const Vertex v{x, y};
      if (e.in_support(v) && c.touches_boundary(c.cluster_of(v))) return true;
    }
  return false;
}

inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const auto n = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil(q * n));
  if (k == 0) k = 1;
  return sorted[std::min(k, sorted.size()) - 1];
}

}  // namespace detail

// Mean of the event indicator over replicas.
inline Estimate estimate_event_prob(Topology t, const Window& w, double p, double r, const EventSpec& e,
                                    const McOptions& opt) {
  if (opt.n_samples < 1) throw std::invalid_argument("estimate_event_prob: n_samples must be >= 1");
  if (!w.full().contains(e.support_rect())) throw std::out_of_range("event support outside window");
  struct Row {
    std::uint8_t hit, censored;
  };
  const auto rows = run_replicas<Row>(opt.n_samples, opt.threads, [&](std::int64_t i) {
    const std::uint64_t s = replica_seed(opt.seed, static_cast<std::uint64_t>(i));
    auto rep = detail::sample_replica(t, w, p, s);
    const ColourConfig x(rep.clusters, std::move(rep.marks), r, s);
    return Row{static_cast<std::uint8_t>(e.holds(x.field())),
               static_cast<std::uint8_t>(detail::support_censored(*rep.clusters, e))};
  });
  std::int64_t hits = 0, censored = 0;
  for (const auto& row : rows) {
    hits += row.hit;
    censored += row.censored;
  }
  Estimate out = detail::proportion(hits, opt.n_samples, opt.seed);
  out.censored_fraction = static_cast<double>(censored) / static_cast<double>(opt.n_samples);
  return out;
}

// Per-replica crossing thresholds r* of a black crossing, in replica order.
struct ThresholdSample {
  std::vector<double> thresholds;
  std::vector<std::uint8_t> censored;
  std::uint64_t seed = 0;
};

inline ThresholdSample sample_thresholds(Topology t, const Window& w, double p, std::span<const CrossingSpec> specs,
                                         const McOptions& opt, std::vector<ThresholdSample>* extra = nullptr) {
  if (specs.empty()) throw std::invalid_argument("sample_thresholds: no crossing spec");
  for (const auto& s : specs) {
    if (s.colour != Colour::Black) throw std::invalid_argument("crossing thresholds need a black (increasing) crossing");
    if (!w.full().contains(s.rect)) throw std::out_of_range("crossing rectangle outside window");
  }
  struct Row {
    std::vector<double> r;
    std::uint8_t censored;
  };
  const auto rows = run_replicas<Row>(opt.n_samples, opt.threads, [&](std::int64_t i) {
    const std::uint64_t s = replica_seed(opt.seed, static_cast<std::uint64_t>(i));
    const auto rep = detail::sample_replica(t, w, p, s);
    const ClusterLabeling& c = *rep.clusters;
    Row row{{}, 0};
    for (const auto& spec : specs) {
      row.r.push_back(minimax_crossing(t, spec, [&](Vertex v) { return rep.marks[c.ordinal(c.cluster_of(v))]; }));
      row.censored |= static_cast<std::uint8_t>(detail::support_censored(c, EventSpec(spec)));
    }
    return row;
  });
  ThresholdSample out;
  out.seed = opt.seed;
  if (extra) extra->assign(specs.size() - 1, ThresholdSample{{}, {}, opt.seed});
  for (const auto& row : rows) {
    out.thresholds.push_back(row.r[0]);
    out.censored.push_back(row.censored);
    for (std::size_t k = 1; k < specs.size() && extra; ++k) {
      (*extra)[k - 1].thresholds.push_back(row.r[k]);
      (*extra)[k - 1].censored.push_back(row.censored);
    }
  }
  return out;
}

// Empirical CDF of the crossing threshold: curve(r) estimates P(crossing at r).
class CrossingCurve {
public:
  explicit CrossingCurve(ThresholdSample sample) : sample_(std::move(sample)), sorted_(sample_.thresholds) {
    std::sort(sorted_.begin(), sorted_.end());
    std::int64_t c = 0;
    for (const auto f : sample_.censored) c += f;
    censored_fraction_ = sorted_.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(sorted_.size());
  }

  std::int64_t n_samples() const { return static_cast<std::int64_t>(sorted_.size()); }
  std::span<const double> sorted_thresholds() const { return sorted_; }
  const ThresholdSample& sample() const { return sample_; }

  // Fraction of replicas with r* < r (crossing present at r).
  Estimate operator()(double r) const {
    const auto hits = std::lower_bound(sorted_.begin(), sorted_.end(), r) - sorted_.begin();
    Estimate e = detail::proportion(hits, n_samples(), sample_.seed);
    e.censored_fraction = censored_fraction_;
    return e;
  }

  // Half-width of the uniform Dvoretzky-Kiefer-Wolfowitz band at level 1 - alpha.
  double dkw_band(double alpha = 0.05) const {
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n_samples())));
  }

  double quantile(double q) const { return detail::quantile_sorted(sorted_, q); }

private:
  ThresholdSample sample_;
  std::vector<double> sorted_;
  double censored_fraction_ = 0;
};

inline CrossingCurve crossing_curve(Topology t, const Window& w, double p, const CrossingSpec& s, const McOptions& opt) {
  const CrossingSpec specs[] = {s};
  return CrossingCurve(sample_thresholds(t, w, p, specs, opt));
}

enum class RcMethod : std::uint8_t { ThresholdQuantile, Bisection };

inline std::string_view to_string(RcMethod m) { return m == RcMethod::ThresholdQuantile ? "threshold_quantile" : "bisection"; }

struct RcOptions {
  McOptions mc{};
  double target = 0.5;
  int aspect = 0;  // rectangle S_{n, aspect*n}; 0 picks 1 (triangular) or 3 (square)
  Adjacency mode = Adjacency::Ordinary;
  RcMethod method = RcMethod::ThresholdQuantile;
  int bootstrap = 199;
  double confidence = 0.95;
  int pad = -1;  // -1: default_pad
  int bisection_steps = 14;
};

struct RcEstimate {
  Topology topology = Topology::Square;
  double p = 0;
  int n = 0;
  int aspect = 1;
  Adjacency mode = Adjacency::Ordinary;
  double r_hat = 0;
  double ci_lo = 0, ci_hi = 0;
  RcMethod method = RcMethod::ThresholdQuantile;
  bool supercritical_warning = false;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  double censored_fraction = 0;
};

inline int default_aspect(Topology t) { return t == Topology::Triangular ? 1 : 3; }

inline CrossingSpec rc_crossing(Topology t, int n, int aspect, Adjacency mode) {
  (void)t;
  return CrossingSpec{rect_nm(n, aspect * n), Direction::Vertical, Colour::Black, mode};
}

namespace detail {

// Percentile bootstrap interval of the q-quantile.
inline std::pair<double, double> bootstrap_quantile_ci(std::span<const double> xs, double q, int resamples,
                                                       double confidence, std::uint64_t seed) {
  CounterStream rng(seed, Stream::Bootstrap);
  std::vector<double> stats, buf(xs.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& v : buf) v = xs[static_cast<std::size_t>(rng.below(xs.size()))];
    std::sort(buf.begin(), buf.end());
    stats.push_back(quantile_sorted(buf, q));
  }
  std::sort(stats.begin(), stats.end());
  const double tail = (1.0 - confidence) / 2.0;
  return {quantile_sorted(stats, tail), quantile_sorted(stats, 1.0 - tail)};
}

inline RcEstimate rc_from_thresholds(Topology t, double p, int n, int aspect, const RcOptions& opt,
                                     const ThresholdSample& sample) {
  RcEstimate out;
  out.topology = t;
  out.p = p;
  out.n = n;
  out.aspect = aspect;
  out.mode = opt.mode;
  out.method = RcMethod::ThresholdQuantile;
  out.supercritical_warning = supercritical(t, p);
  out.n_samples = static_cast<std::int64_t>(sample.thresholds.size());
  out.seed = sample.seed;
  const CrossingCurve curve(sample);
  out.censored_fraction = curve(0.5).censored_fraction;
  out.r_hat = curve.quantile(opt.target);
  auto [lo, hi] = bootstrap_quantile_ci(sample.thresholds, opt.target, opt.bootstrap, opt.confidence, sample.seed);
  out.ci_lo = std::min(lo, out.r_hat);
  out.ci_hi = std::max(hi, out.r_hat);
  return out;
}

}  // namespace detail

// Finite-size critical colouring density: the r at which the black crossing
// probability of S_{n, aspect*n} (vertical) reaches `target`.
inline RcEstimate estimate_rc(Topology t, double p, int n, const RcOptions& opt = {}) {
  if (n < 1) throw std::invalid_argument("estimate_rc: n must be >= 1");
  const int aspect = opt.aspect > 0 ? opt.aspect : default_aspect(t);
  const CrossingSpec spec = rc_crossing(t, n, aspect, opt.mode);
  const Window w = opt.pad >= 0 ? make_window(spec.rect, opt.pad) : make_window(spec.rect);
  if (opt.method == RcMethod::ThresholdQuantile) {
    const CrossingSpec specs[] = {spec};
    return detail::rc_from_thresholds(t, p, n, aspect, opt, sample_thresholds(t, w, p, specs, opt.mc));
  }

  // Bisection on common random numbers: the estimated probability is
  // nondecreasing in r, so the bracket converges to the empirical quantile.
  RcEstimate out;
  out.topology = t;
  out.p = p;
  out.n = n;
  out.aspect = aspect;
  out.mode = opt.mode;
  out.method = RcMethod::Bisection;
  out.supercritical_warning = supercritical(t, p);
  out.n_samples = opt.mc.n_samples;
  out.seed = opt.mc.seed;
  const EventSpec event(spec);
  auto solve = [&](double level) {
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < opt.bisection_steps; ++k) {
      const double mid = 0.5 * (lo + hi);
      const Estimate e = estimate_event_prob(t, w, p, mid, event, opt.mc);
      out.censored_fraction = e.censored_fraction;
      (e.value >= level ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  out.r_hat = solve(opt.target);
  const double z = 1.959963984540054;
  const double se = std::sqrt(opt.target * (1.0 - opt.target) / static_cast<double>(opt.mc.n_samples));
  out.ci_lo = std::min(out.r_hat, solve(std::max(0.0, opt.target - z * se)));
  out.ci_hi = std::max(out.r_hat, solve(std::min(1.0, opt.target + z * se)));
  return out;
}

// r_c(p) + r_c*(p) from one set of replicas: black ordinary and black star
// vertical crossings of the same rectangle.
struct DualityEstimate {
  RcEstimate ordinary;
  RcEstimate star;
  double sum = 0;
  double sum_ci_lo = 0, sum_ci_hi = 0;
};

// Ordinary black vertical and Star black crossings of the same rectangle, on
// shared replicas. By default the Star crossing is horizontal: black Star at
// 1 - r is white Star at r after a colour swap, the dual of the vertical
// Ordinary crossing. Direction::Vertical gives the same-shape surrogate.
inline DualityEstimate estimate_duality(Topology t, double p, int n, const RcOptions& opt = {},
                                        Direction star_direction = Direction::Horizontal) {
  const int aspect = opt.aspect > 0 ? opt.aspect : default_aspect(t);
  CrossingSpec star = rc_crossing(t, n, aspect, Adjacency::Star);
  star.direction = star_direction;
  const CrossingSpec specs[] = {rc_crossing(t, n, aspect, Adjacency::Ordinary), star};
  const Window w = opt.pad >= 0 ? make_window(specs[0].rect, opt.pad) : make_window(specs[0].rect);
  std::vector<ThresholdSample> extra;
  const ThresholdSample ordinary = sample_thresholds(t, w, p, specs, opt.mc, &extra);
  DualityEstimate out;
  RcOptions o = opt;
  o.mode = Adjacency::Ordinary;
  out.ordinary = detail::rc_from_thresholds(t, p, n, aspect, o, ordinary);
  o.mode = Adjacency::Star;
  out.star = detail::rc_from_thresholds(t, p, n, aspect, o, extra.at(0));
  out.sum = out.ordinary.r_hat + out.star.r_hat;

  // Paired bootstrap of the sum.
  CounterStream rng(opt.mc.seed ^ 0x5eedULL, Stream::Bootstrap);
  const auto m = ordinary.thresholds.size();
  std::vector<double> a(m), b(m), sums;
  for (int k = 0; k < opt.bootstrap; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto idx = static_cast<std::size_t>(rng.below(m));
      a[j] = ordinary.thresholds[idx];
      b[j] = extra[0].thresholds[idx];
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    sums.push_back(detail::quantile_sorted(a, opt.target) + detail::quantile_sorted(b, opt.target));
  }
  std::sort(sums.begin(), sums.end());
  const double tail = (1.0 - opt.confidence) / 2.0;
  out.sum_ci_lo = std::min(out.sum, detail::quantile_sorted(sums, tail));
  out.sum_ci_hi = std::max(out.sum, detail::quantile_sorted(sums, 1.0 - tail));
  return out;
}

// Replica-local lazy view of the model: bonds, p-clusters and colours are
// computed on demand from the same counter-based draws as sample_bonds and
// assign_colours, so results agree exactly with full sampling.
class LazyModel {
public:
  LazyModel(Topology t, const Window& w, double p) : topology_(t), grid_(t, w.full()), p_(p) {
    const auto n = static_cast<std::size_t>(grid_.size());
    mask_stamp_.assign(n, 0);
    mask_.assign(n, 0);
    pc_stamp_.assign(n, 0);
    pc_.assign(n, 0);
    touch_.assign(n, 0);
  }

  const Grid& grid() const { return grid_; }

  void reset(std::uint64_t seed) {
    seed_ = seed;
    sampler_.emplace(topology_, p_, seed);
    ++gen_;
  }

  bool open(Vertex u, Vertex v) {
    const Edge e = Edge::make(u, v);
    const Vertex d = e.b - e.a;
    const auto dirs = bond_directions(topology_);
    for (std::size_t k = 0; k < dirs.size(); ++k)
      if (dirs[k] == d) return (mask(e.a) >> k) & 1u;
    return false;
  }

  // p-cluster of v: canonical member index and members (explored once).
  std::int64_t canonical(Vertex v) {
    const auto i = static_cast<std::size_t>(grid_.index(v));
    if (pc_stamp_[i] != gen_) explore(v);
    return pc_[i];
  }
  bool cluster_touches_boundary(Vertex v) {
    canonical(v);
    return touch_[static_cast<std::size_t>(grid_.index(v))] != 0;
  }

  double mark(Vertex v) { return cluster_mark(seed_, grid_.vertex(canonical(v))); }

  const std::vector<Vertex>& last_cluster() const { return members_; }

private:
  std::uint8_t mask(Vertex v) {
    const auto i = static_cast<std::size_t>(grid_.index(v));
    if (mask_stamp_[i] != gen_) {
      std::uint8_t m = sampler_->open_mask(v);
      const auto dirs = bond_directions(topology_);
      for (std::size_t d = 0; d < dirs.size(); ++d)
        if (!grid_.contains(v + dirs[d])) m &= static_cast<std::uint8_t>(~(1u << d));
      mask_[i] = m;
      mask_stamp_[i] = gen_;
    }
    return mask_[i];
  }

  void explore(Vertex v) {
    members_.clear();
    members_.push_back(v);
    pc_stamp_[static_cast<std::size_t>(grid_.index(v))] = gen_;
    std::int64_t best = grid_.index(v);
    bool touches = false;
    for (std::size_t head = 0; head < members_.size(); ++head) {
      const Vertex u = members_[head];
      best = std::min(best, grid_.index(u));
      touches = touches || grid_.on_boundary(u);
      for (const Vertex d : neighbor_offsets(topology_, Adjacency::Ordinary)) {
        const Vertex w = u + d;
        if (!grid_.contains(w)) continue;
        const auto iw = static_cast<std::size_t>(grid_.index(w));
        if (pc_stamp_[iw] == gen_ || !open(u, w)) continue;
        pc_stamp_[iw] = gen_;
        members_.push_back(w);
      }
    }
    for (const Vertex u : members_) {
      const auto iu = static_cast<std::size_t>(grid_.index(u));
      pc_[iu] = best;
      touch_[iu] = touches;
    }
  }

  Topology topology_;
  Grid grid_;
  double p_;
  std::uint64_t seed_ = 0;
  std::optional<BondSampler> sampler_;
  std::uint32_t gen_ = 0;
  std::vector<std::uint32_t> mask_stamp_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint32_t> pc_stamp_;
  std::vector<std::int64_t> pc_;
  std::vector<std::uint8_t> touch_;
  std::vector<Vertex> members_;
};

struct DecayFit {
  std::vector<int> ns;
  std::vector<double> survival;
  std::vector<double> survival_stderr;
  std::vector<std::int64_t> counts;    // replicas with observed value >= n
  std::vector<std::int64_t> censored;  // censored replicas whose lower bound is below n
  double slope = 0, intercept = 0, r2 = 0, slope_stderr = 0;
  int fit_points = 0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::int64_t censored_total = 0;
};

namespace detail {

struct Observation {
  std::int64_t value;
  bool censored;  // value is only a lower bound
};

// Survival table and least-squares fit of log survival against n, using
// points with no censoring ambiguity and at least `min_count` events.
inline DecayFit fit_survival(std::span<const Observation> obs, std::span<const int> ns, std::int64_t min_count,
                             std::uint64_t seed) {
  DecayFit fit;
  fit.n_samples = static_cast<std::int64_t>(obs.size());
  fit.seed = seed;
  for (const auto& o : obs) fit.censored_total += o.censored;
  const double total = static_cast<double>(obs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int m = 0;
  for (const int n : ns) {
    std::int64_t hits = 0, cens = 0;
    for (const auto& o : obs) {
      if (o.value >= n) ++hits;
      else if (o.censored) ++cens;
    }
    const double s = total > 0 ? static_cast<double>(hits) / total : 0.0;
    fit.ns.push_back(n);
    fit.survival.push_back(s);
    fit.survival_stderr.push_back(total > 0 ? std::sqrt(s * (1 - s) / total) : 0.0);
    fit.counts.push_back(hits);
    fit.censored.push_back(cens);
    if (cens == 0 && hits >= std::max<std::int64_t>(min_count, 1)) {
      const double x = n, y = std::log(s);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
      ++m;
    }
  }
  fit.fit_points = m;
  if (m >= 2) {
    const double dm = m;
    const double vxx = sxx - sx * sx / dm;
    const double vxy = sxy - sx * sy / dm;
    const double vyy = syy - sy * sy / dm;
    fit.slope = vxy / vxx;
    fit.intercept = (sy - fit.slope * sx) / dm;
    fit.r2 = vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
    if (m > 2) {
      const double rss = std::max(0.0, vyy - fit.slope * vxy);
      fit.slope_stderr = std::sqrt(rss / (dm - 2) / vxx);
    }
  }
  return fit;
}

}  // namespace detail

struct DecayOptions {
  McOptions mc{};
  int pad = -1;
  std::int64_t min_count = 10;
};

// Survival of the dependence range D(0) for n = 1..n_max, fitted log-linearly.
inline DecayFit fit_dependence_decay(Topology t, double p, int n_max, const DecayOptions& opt = {}) {
  if (n_max < 1) throw std::invalid_argument("fit_dependence_decay: n_max must be >= 1");
  const RectRegion core{-n_max, n_max, -n_max, n_max};
  const Window w = opt.pad >= 0 ? make_window(core, opt.pad) : make_window(core);
  const Vertex origin{0, 0};
  const auto obs = run_replicas_with_state<detail::Observation>(
      opt.mc.n_samples, opt.mc.threads, [&] { return LazyModel(t, w, p); },
      [&](LazyModel& model, std::int64_t i) {
        model.reset(replica_seed(opt.mc.seed, static_cast<std::uint64_t>(i)));
        model.canonical(origin);
        int range = 0;
        for (const Vertex v : model.last_cluster()) range = std::max(range, l1_distance(origin, v));
        return detail::Observation{range, model.cluster_touches_boundary(origin)};
      });
  std::vector<int> ns;
  for (int n = 1; n <= n_max; ++n) ns.push_back(n);
  return detail::fit_survival(obs, ns, opt.min_count, opt.mc.seed);
}

struct ClusterSizeOptions {
  DecayOptions decay{};
  int radius = 64;   // core window [-radius, radius]^2
  int max_size = 200;
};

// Survival of |C_0^r|, the black ordinary r-cluster of the origin (0 when the
// origin is white), for sizes 1..max_size. An r-cluster reaching the window
// boundary is censored.
inline DecayFit fit_cluster_size_decay(Topology t, double p, double r, const ClusterSizeOptions& opt = {}) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("colour density r must lie in [0,1]");
  const RectRegion core{-opt.radius, opt.radius, -opt.radius, opt.radius};
  const Window w = opt.decay.pad >= 0 ? make_window(core, opt.decay.pad) : make_window(core);
  const Vertex origin{0, 0};
  struct State {
    LazyModel model;
    std::vector<std::uint32_t> stamp;
    std::uint32_t gen = 0;
    std::vector<Vertex> queue;
  };
  const auto obs = run_replicas_with_state<detail::Observation>(
      opt.decay.mc.n_samples, opt.decay.mc.threads,
      [&] {
        LazyModel m(t, w, p);
        const auto n = static_cast<std::size_t>(m.grid().size());
        return State{std::move(m), std::vector<std::uint32_t>(n, 0), 0, {}};
      },
      [&](State& st, std::int64_t i) {
        st.model.reset(replica_seed(opt.decay.mc.seed, static_cast<std::uint64_t>(i)));
        ++st.gen;
        const Grid& g = st.model.grid();
        auto black = [&](Vertex v) { return st.model.mark(v) < r; };
        if (!black(origin)) return detail::Observation{0, false};
        st.queue.assign(1, origin);
        st.stamp[static_cast<std::size_t>(g.index(origin))] = st.gen;
        bool censored = false;
        for (std::size_t head = 0; head < st.queue.size(); ++head) {
          const Vertex v = st.queue[head];
          if (g.on_boundary(v)) censored = true;
          for (const Vertex d : neighbor_offsets(t, Adjacency::Ordinary)) {
            const Vertex u = v + d;
            if (!g.contains(u)) continue;
            auto& s = st.stamp[static_cast<std::size_t>(g.index(u))];
            if (s == st.gen || !black(u)) continue;
            s = st.gen;
            st.queue.push_back(u);
          }
        }
        return detail::Observation{static_cast<std::int64_t>(st.queue.size()), censored};
      });
  std::vector<int> ns;
  for (int n = 1; n <= opt.max_size; ++n) ns.push_back(n);
  return detail::fit_survival(obs, ns, opt.decay.min_count, opt.decay.mc.seed);
}

enum class CheckMode : std::uint8_t { Oracle, MonteCarlo };

struct FkgReport {
  CheckMode mode = CheckMode::Oracle;
  double p_a = 0, p_b = 0, p_ab = 0;
  double gap = 0;  // P(A and B) - P(A) P(B)
  double std_error = 0;
  bool violation = false;
  std::optional<Rational> exact_gap;
  std::int64_t n_samples = 0;
};

namespace detail {

inline void require_same_monotonicity(const EventSpec& a, const EventSpec& b) {
  if (a.monotonicity() != b.monotonicity())
    throw std::invalid_argument("fkg_check: events of mixed monotonicity (no inequality asserted)");
}

}  // namespace detail

// Exact FKG gap by enumeration.
inline FkgReport fkg_check_exact(Topology t, const Window& w, const Rational& p, const Rational& r, const EventSpec& a,
                                 const EventSpec& b, const OracleLimits& lim = {}) {
  detail::require_same_monotonicity(a, b);
  const Rational pa = exact_polynomial_in_r(t, w, p, a, lim)(r);
  const Rational pb = exact_polynomial_in_r(t, w, p, b, lim)(r);
  const Rational pab = exact_joint_polynomial(t, w, p, a, b, lim)(r);
  FkgReport out;
  out.mode = CheckMode::Oracle;
  out.p_a = static_cast<double>(pa);
  out.p_b = static_cast<double>(pb);
  out.p_ab = static_cast<double>(pab);
  out.exact_gap = pab - pa * pb;
  out.gap = static_cast<double>(*out.exact_gap);
  out.violation = *out.exact_gap < 0;
  return out;
}

// MC gap with a delta-method standard error; a violation needs the gap below
// -z_tolerance standard errors.
inline FkgReport fkg_check(Topology t, const Window& w, double p, double r, const EventSpec& a, const EventSpec& b,
                           CheckMode mode, const McOptions& opt = {}, double z_tolerance = 4.0) {
  detail::require_same_monotonicity(a, b);
  if (mode == CheckMode::Oracle) return fkg_check_exact(t, w, Rational(p), Rational(r), a, b);
  struct Row {
    std::uint8_t a, b;
  };
  const auto rows = run_replicas<Row>(opt.n_samples, opt.threads, [&](std::int64_t i) {
    const std::uint64_t s = replica_seed(opt.seed, static_cast<std::uint64_t>(i));
    auto rep = detail::sample_replica(t, w, p, s);
    const ColourConfig x(rep.clusters, std::move(rep.marks), r, s);
    const ColourField f = x.field();
    return Row{static_cast<std::uint8_t>(a.holds(f)), static_cast<std::uint8_t>(b.holds(f))};
  });
  const double n = static_cast<double>(opt.n_samples);
  double sa = 0, sb = 0, sab = 0;
  for (const auto& row : rows) {
    sa += row.a;
    sb += row.b;
    sab += row.a * row.b;
  }
  FkgReport out;
  out.mode = CheckMode::MonteCarlo;
  out.n_samples = opt.n_samples;
  out.p_a = sa / n;
  out.p_b = sb / n;
  out.p_ab = sab / n;
  out.gap = out.p_ab - out.p_a * out.p_b;
  double v = 0;
  for (const auto& row : rows) {
    const double psi = (row.a - out.p_a) * (row.b - out.p_b) - out.gap;
    v += psi * psi;
  }
  out.std_error = n > 1 ? std::sqrt(v / (n - 1) / n) : 0.0;
  out.violation = out.gap < -z_tolerance * out.std_error;
  return out;
}

struct MixingRow {
  int scale = 1;
  double gap = 0;  // P(A1 and A2) - P(A1) P(A2)
  double std_error = 0;
  double p1 = 0, p2 = 0;
  double censored_fraction = 0;
};

struct MixingReport {
  std::vector<MixingRow> rows;
  bool nonincreasing = true;  // |gap| nonincreasing in the scale, within CIs
  bool approaches_zero = true;  // last |gap| within 3 standard errors of 0
};

inline CrossingSpec scaled(const CrossingSpec& s, int lambda) {
  CrossingSpec out = s;
  out.rect = {s.rect.x0 * lambda, s.rect.x1 * lambda, s.rect.y0 * lambda, s.rect.y1 * lambda};
  return out;
}

// Covariance of two crossing events in the scaled rectangles lambda*R1 and
// lambda*R2 for each lambda. a1.rect and a2.rect are R1 and R2.
inline MixingReport mixing_check(Topology t, double p, double r, const CrossingSpec& a1, const CrossingSpec& a2,
                                 std::span<const int> scales, const McOptions& opt = {}, int pad = -1) {
  const RectRegion& r1 = a1.rect;
  const RectRegion& r2 = a2.rect;
  const bool disjoint = r1.x1 < r2.x0 || r2.x1 < r1.x0 || r1.y1 < r2.y0 || r2.y1 < r1.y0;
  if (!disjoint) throw std::invalid_argument("mixing_check: regions must be disjoint");
  MixingReport out;
  for (const int lambda : scales) {
    if (lambda < 1) throw std::invalid_argument("mixing_check: scales must be >= 1");
    const CrossingSpec s1 = scaled(a1, lambda), s2 = scaled(a2, lambda);
    const RectRegion box{std::min(s1.rect.x0, s2.rect.x0), std::max(s1.rect.x1, s2.rect.x1),
                         std::min(s1.rect.y0, s2.rect.y0), std::max(s1.rect.y1, s2.rect.y1)};
    const Window w = pad >= 0 ? make_window(box, pad) : make_window(box);
    struct Row {
      std::uint8_t a, b, censored;
    };
    McOptions o = opt;
    o.seed = opt.seed + static_cast<std::uint64_t>(lambda);
    const auto rows = run_replicas<Row>(o.n_samples, o.threads, [&](std::int64_t i) {
      const std::uint64_t s = replica_seed(o.seed, static_cast<std::uint64_t>(i));
      auto rep = detail::sample_replica(t, w, p, s);
      const ColourConfig x(rep.clusters, std::move(rep.marks), r, s);
      const ColourField f = x.field();
      const bool c = detail::support_censored(*rep.clusters, EventSpec(s1)) ||
                     detail::support_censored(*rep.clusters, EventSpec(s2));
      return Row{static_cast<std::uint8_t>(has_crossing(f, s1)), static_cast<std::uint8_t>(has_crossing(f, s2)),
                 static_cast<std::uint8_t>(c)};
    });
    const double n = static_cast<double>(o.n_samples);
    double sa = 0, sb = 0, sab = 0, sc = 0;
    for (const auto& row : rows) {
      sa += row.a;
      sb += row.b;
      sab += row.a * row.b;
      sc += row.censored;
    }
    MixingRow mr;
    mr.scale = lambda;
    mr.p1 = sa / n;
    mr.p2 = sb / n;
    mr.gap = sab / n - mr.p1 * mr.p2;
    double v = 0;
    for (const auto& row : rows) {
      const double psi = (row.a - mr.p1) * (row.b - mr.p2) - mr.gap;
      v += psi * psi;
    }
    mr.std_error = n > 1 ? std::sqrt(v / (n - 1) / n) : 0.0;
    mr.censored_fraction = sc / n;
    out.rows.push_back(mr);
  }
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    const auto& a = out.rows[k - 1];
    const auto& b = out.rows[k];
    const double tol = 2.0 * std::hypot(a.std_error, b.std_error);
    if (std::abs(b.gap) > std::abs(a.gap) + tol) out.nonincreasing = false;
  }
  if (!out.rows.empty()) out.approaches_zero = std::abs(out.rows.back().gap) <= 3.0 * out.rows.back().std_error;
  return out;
}

struct FiniteSizeReport {
  int N = 0;
  double epsilon = 0;
  int radius = 0;                  // ceil(N/3)
  Estimate tail;                   // nu_p(D(0) >= radius)
  double tail_term = 0;            // (N+1)(3N+1) * tail
  double tail_term_upper = 0;      // same with a one-sided 95% upper bound on the tail
  Estimate crossing;               // P(V^b_{N,3N})
  bool tail_condition = false;     // tail_term <= epsilon
  bool crossing_condition = false; // crossing > 1 - epsilon
  bool satisfied = false;
  std::string verdict;
};

// Finite-size criterion for percolation of black ordinary clusters:
// (N+1)(3N+1) nu_p(D(0) >= N/3) <= eps together with P(V^b_{N,3N}) > 1 - eps.
inline FiniteSizeReport finite_size_criterion(Topology t, double p, double r, int N, double epsilon,
                                              const McOptions& tail_opt, const McOptions& crossing_opt) {
  if (N < 1) throw std::invalid_argument("finite_size_criterion: N must be >= 1");
  FiniteSizeReport out;
  out.N = N;
  out.epsilon = epsilon;
  out.radius = (N + 2) / 3;
  DecayOptions d;
  d.mc = tail_opt;
  d.min_count = 1;
  const DecayFit fit = fit_dependence_decay(t, p, out.radius, d);
  const double n = static_cast<double>(fit.n_samples);
  out.tail.n_samples = fit.n_samples;
  out.tail.seed = tail_opt.seed;
  out.tail.value = fit.survival.back();
  out.tail.std_error = fit.survival_stderr.back();
  out.tail.censored_fraction = static_cast<double>(fit.censored.back()) / n;
  const double volume = static_cast<double>(N + 1) * static_cast<double>(3 * N + 1);
  out.tail_term = volume * out.tail.value;
  // Zero events: rule of three; otherwise normal upper bound.
  const double upper = fit.counts.back() == 0 ? 3.0 / n : out.tail.value + 1.645 * out.tail.std_error;
  out.tail_term_upper = volume * upper;

  const CrossingSpec spec{rect_nm(N, 3 * N), Direction::Vertical, Colour::Black, Adjacency::Ordinary};
  out.crossing = estimate_event_prob(t, make_window(spec.rect), p, r, EventSpec(spec), crossing_opt);
  out.tail_condition = out.tail_term <= epsilon;
  out.crossing_condition = out.crossing.value > 1.0 - epsilon;
  out.satisfied = out.tail_condition && out.crossing_condition;
  out.verdict = out.satisfied ? "percolation certified at finite size (up to MC error)"
                              : (out.crossing_condition ? "tail condition fails" : "crossing condition fails");
  return out;
}

}  // namespace dac
