#pragma once

// Batch front-end for the dac tool. Argument handling, configuration and the
// subcommands live here so tests can drive them in-process.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dac/dac.hpp"
#include "dac/suite.hpp"

namespace dac::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kConfigError = 1, kCheckFailure = 2 };

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using RawConfig = std::map<std::string, std::string>;

inline const RawConfig& defaults() {
  static const RawConfig d{
      {"topology", "square"}, {"n", "32"},          {"m", "0"},          {"pad", "-1"},
      {"p", "0.3"},           {"r", "0.5"},         {"event", "Vb"},     {"n_samples", "10000"},
      {"seed", "1"},          {"threads", "0"},     {"out", ""},         {"format", "csv"},
      {"sizes", "16,32,64"},  {"aspect", "0"},      {"method", "quantile"}, {"bootstrap", "199"},
      {"confidence", "0.95"}, {"n_max", "30"},      {"radius", "64"},    {"max_size", "200"},
      {"min_count", "10"},    {"max_vertices", "12"}, {"max_edges", "12"},
  };
  return d;
}

// Keys with no influence on results; kept out of output headers.
inline bool is_runtime_key(const std::string& k) { return k == "threads" || k == "out"; }

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

inline void set_key(RawConfig& c, const std::string& key, const std::string& value) {
  if (!defaults().contains(key)) throw ConfigError("unknown config key '" + key + "'");
  c[key] = value;
}

inline void parse_assignment(RawConfig& c, std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(line) + "'");
  set_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

inline std::string json_scalar(const std::string& key, const json& v) {
  switch (v.type()) {
    case json::value_t::string: return v.get<std::string>();
    case json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return v.dump();
    case json::value_t::number_float: return format_double(v.get<double>());
    case json::value_t::array: {
      std::string out;
      for (const auto& x : v) out += (out.empty() ? "" : ",") + json_scalar(key, x);
      return out;
    }
    default: throw ConfigError("config key '" + key + "': unsupported JSON value");
  }
}

// Accepts key=value lines, a JSON object, or an earlier output file, whose
// header carries the resolved configuration.
inline void merge_config_text(RawConfig& c, const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("config: malformed JSON");
    if (j.contains("version") && j.contains("config")) j = j["config"];
    for (const auto& [k, v] : j.items()) set_key(c, k, json_scalar(k, v));
    return;
  }
  std::istringstream is(text);
  std::string line;
  bool header = false;
  for (int no = 0; std::getline(is, line); ++no) {
    if (no == 0 && line.starts_with("# dac ")) {
      header = true;
      continue;
    }
    if (header) {
      if (!line.starts_with("#")) break;
      const std::string body = trim(std::string_view(line).substr(1));
      if (!body.empty()) parse_assignment(c, body);
      continue;
    }
    const std::string body = trim(std::string_view(line).substr(0, line.find('#')));
    if (!body.empty()) parse_assignment(c, body);
  }
}

template <class T>
T parse_number(const std::string& key, const std::string& s) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("config key '" + key + "': cannot parse '" + s + "'");
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& s) {
  std::vector<T> out;
  for (const auto& item : split(s)) out.push_back(parse_number<T>(key, item));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

struct ExperimentConfig {
  Topology topology = Topology::Square;
  int n = 32, m = 0, pad = -1;
  std::vector<double> p, r;
  std::string event_name;
  Direction direction = Direction::Vertical;
  Colour colour = Colour::Black;
  Adjacency mode = Adjacency::Ordinary;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out, format;
  std::vector<int> sizes;
  int aspect = 0;
  RcMethod method = RcMethod::ThresholdQuantile;
  int bootstrap = 199;
  double confidence = 0.95;
  int n_max = 30, radius = 64, max_size = 200, min_count = 10;
  SuiteLimits limits;
  RawConfig raw;  // resolved, as echoed into output headers

  RectRegion rect() const { return rect_nm(n, m); }
  Window window() const { return pad >= 0 ? make_window(rect(), pad) : make_window(rect()); }
  EventSpec event() const { return CrossingSpec{rect(), direction, colour, mode}; }
  McOptions mc() const { return {n_samples, seed, threads}; }
};

inline ExperimentConfig resolve(const RawConfig& raw) {
  ExperimentConfig c;
  c.raw = raw;
  const auto get = [&](const char* k) { return raw.at(k); };
  const auto integer = [&](const char* k, int lo, int hi) {
    const int v = parse_number<int>(k, get(k));
    if (v < lo || v > hi)
      throw ConfigError("config key '" + std::string(k) + "' out of range [" + std::to_string(lo) + "," +
                        std::to_string(hi) + "]");
    return v;
  };
  const auto unit_list = [&](const char* k) {
    auto v = parse_list<double>(k, get(k));
    for (const double x : v)
      if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("config key '" + std::string(k) + "' must lie in [0,1]");
    return v;
  };

  if (get("topology") == "square") c.topology = Topology::Square;
  else if (get("topology") == "triangular") c.topology = Topology::Triangular;
  else throw ConfigError("topology must be square or triangular");
  c.n = integer("n", 1, 1 << 14);
  c.m = integer("m", 0, 1 << 14);
  if (c.m == 0) c.m = default_aspect(c.topology) * c.n;
  c.raw["m"] = std::to_string(c.m);
  c.pad = integer("pad", -1, 1 << 14);
  c.p = unit_list("p");
  c.r = unit_list("r");

  c.event_name = get("event");
  const std::string& e = c.event_name;
  if (e.size() < 2 || e.size() > 3 || (e[0] != 'V' && e[0] != 'H') || (e[1] != 'b' && e[1] != 'w') ||
      (e.size() == 3 && e[2] != '*'))
    throw ConfigError("event must be one of Vb, Hb, Vw, Hw with optional * (Star mode), got '" + e + "'");
  c.direction = e[0] == 'V' ? Direction::Vertical : Direction::Horizontal;
  c.colour = e[1] == 'b' ? Colour::Black : Colour::White;
  c.mode = e.size() == 3 ? Adjacency::Star : Adjacency::Ordinary;

  c.n_samples = parse_number<std::int64_t>("n_samples", get("n_samples"));
  if (c.n_samples < 1) throw ConfigError("n_samples must be positive");
  c.seed = parse_number<std::uint64_t>("seed", get("seed"));
  c.threads = integer("threads", 0, 4096);
  c.out = get("out");
  c.format = get("format");
  if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");

  c.sizes = parse_list<int>("sizes", get("sizes"));
  for (const int s : c.sizes)
    if (s < 1) throw ConfigError("sizes must be positive");
  c.aspect = integer("aspect", 0, 64);
  if (get("method") == "quantile") c.method = RcMethod::ThresholdQuantile;
  else if (get("method") == "bisection") c.method = RcMethod::Bisection;
  else throw ConfigError("method must be quantile or bisection");
  c.bootstrap = integer("bootstrap", 1, 1 << 20);
  c.confidence = parse_number<double>("confidence", get("confidence"));
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) throw ConfigError("confidence must lie in (0,1)");
  c.n_max = integer("n_max", 1, 1 << 14);
  c.radius = integer("radius", 1, 1 << 14);
  c.max_size = integer("max_size", 1, 1 << 24);
  c.min_count = integer("min_count", 1, 1 << 30);
  c.limits.max_vertices = integer("max_vertices", 1, 24);
  c.limits.max_edges = integer("max_edges", 1, 20);
  return c;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

inline std::string cell_text(const json& v) {
  switch (v.type()) {
    case json::value_t::null: return {};
    case json::value_t::string: {
      const auto& s = v.get_ref<const std::string&>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (const char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    case json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case json::value_t::number_float: return format_double(v.get<double>());
    default: return v.dump();
  }
}

inline std::string render(const std::string& command, const ExperimentConfig& c, const Table& t) {
  if (c.format == "json") {
    json cfg = json::object();
    for (const auto& [k, v] : c.raw)
      if (!is_runtime_key(k)) cfg[k] = v;
    json rows = json::array();
    for (const auto& row : t.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = row[i];
      rows.push_back(std::move(obj));
    }
    json doc{{"version", kVersion}, {"command", command}, {"config", cfg}, {"rows", rows}};
    return doc.dump(2) + "\n";
  }
  std::string s = "# dac " + std::string(kVersion) + " " + command + "\n";
  for (const auto& [k, v] : c.raw)
    if (!is_runtime_key(k)) s += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + cell_text(row[i]);
    s += "\n";
  }
  return s;
}

inline json warn_cell(Topology t, double p) { return supercritical(t, p) ? "supercritical_p" : ""; }

inline Table cmd_estimate(const ExperimentConfig& c) {
  Table t{{"topology", "p", "r", "event", "n", "value", "stderr", "n_samples", "censored_fraction", "seed", "warn"}, {}};
  const EventSpec e = c.event();
  const Window w = c.window();
  for (const double p : c.p) {
    for (const double r : c.r) {
      const Estimate est = estimate_event_prob(c.topology, w, p, r, e, c.mc());
      t.rows.push_back({std::string(to_string(c.topology)), p, r, c.event_name, c.n, est.value, est.std_error,
                        est.n_samples, est.censored_fraction, c.seed, warn_cell(c.topology, p)});
    }
  }
  return t;
}

inline Table cmd_rc(const ExperimentConfig& c) {
  Table t{{"topology", "p", "n", "aspect", "method", "r_hat", "ci_lo", "ci_hi", "r_hat_star", "duality_sum", "sum_ci_lo",
           "sum_ci_hi", "n_samples", "seed", "warn"},
          {}};
  RcOptions o;
  o.mc = c.mc();
  o.aspect = c.aspect;
  o.method = c.method;
  o.bootstrap = c.bootstrap;
  o.confidence = c.confidence;
  o.pad = c.pad;
  for (const double p : c.p) {
    for (const int n : c.sizes) {
      std::vector<json> row;
      if (c.topology == Topology::Square) {
        const DualityEstimate d = estimate_duality(c.topology, p, n, o);
        const RcEstimate est = c.method == RcMethod::ThresholdQuantile ? d.ordinary : estimate_rc(c.topology, p, n, o);
        row = {std::string(to_string(c.topology)), p, n, est.aspect, c.method == RcMethod::Bisection ? "bisection" : "quantile",
               est.r_hat, est.ci_lo, est.ci_hi, d.star.r_hat, d.sum, d.sum_ci_lo, d.sum_ci_hi, est.n_samples, c.seed,
               warn_cell(c.topology, p)};
      } else {
        const RcEstimate est = estimate_rc(c.topology, p, n, o);
        row = {std::string(to_string(c.topology)), p, n, est.aspect, c.method == RcMethod::Bisection ? "bisection" : "quantile",
               est.r_hat, est.ci_lo, est.ci_hi, nullptr, nullptr, nullptr, nullptr, est.n_samples, c.seed,
               warn_cell(c.topology, p)};
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

inline Table cmd_decay(const ExperimentConfig& c) {
  Table t{{"quantity", "p", "r", "n", "survival", "stderr", "censored", "slope", "intercept", "r2", "seed"}, {}};
  const auto emit = [&](const char* quantity, double p, json r, const DecayFit& f) {
    for (std::size_t i = 0; i < f.ns.size(); ++i)
      t.rows.push_back({quantity, p, r, f.ns[i], f.survival[i], f.survival_stderr[i], f.censored[i], f.slope, f.intercept,
                        f.r2, c.seed});
  };
  DecayOptions d;
  d.mc = c.mc();
  d.pad = c.pad;
  d.min_count = c.min_count;
  for (const double p : c.p) {
    emit("D", p, nullptr, fit_dependence_decay(c.topology, p, c.n_max, d));
    for (const double r : c.r) {
      ClusterSizeOptions s;
      s.decay = d;
      s.radius = c.radius;
      s.max_size = c.max_size;
      emit("C", p, r, fit_cluster_size_decay(c.topology, p, r, s));
    }
  }
  return t;
}

inline Table cmd_verify(const ExperimentConfig& c, std::ostream& err, bool& all_pass) {
  Table t{{"check", "status", "cases", "detail"}, {}};
  all_pass = true;
  for (const CheckResult& res : oracle_suite(c.limits)) {
    t.rows.push_back({res.name, res.pass ? "PASS" : "FAIL", res.cases, res.detail});
    if (!res.pass) {
      all_pass = false;
      err << "FAIL " << res.name << ": " << res.detail << "\n" << res.counterexample;
    }
  }
  return t;
}

inline Table cmd_sample(const ExperimentConfig& c) {
  if (c.out.empty()) throw ConfigError("sample needs --out for the binary dump");
  const BondConfig b = sample_bonds(c.topology, c.window(), c.p.front(), c.seed);
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + c.out + "' for writing");
  write_bonds(f, b);
  if (!f) throw ConfigError("write to '" + c.out + "' failed");
  std::int64_t open = 0;
  b.for_each_edge([&](const Edge&, bool o) { open += o; });
  const auto clusters = label_clusters(b).cluster_count();
  return {{"topology", "p", "n", "m", "pad", "seed", "vertices", "edges", "open_edges", "clusters"},
          {{std::string(to_string(c.topology)), c.p.front(), c.n, c.m, b.window().pad, c.seed, b.grid().size(),
            b.edge_count(), open, clusters}}};
}

inline void write_output(const ExperimentConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f || !(f << text)) throw ConfigError("cannot write '" + c.out + "'");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divide-and-colour percolation lab", "dac"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, seed, threads, out_path, format;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "config file: key=value lines, a JSON object, or an earlier output file");
  auto* o_seed = app.add_option("--seed", seed, "master seed");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (0: all available)");
  auto* o_out = app.add_option("--out", out_path, "output path (default stdout)");
  auto* o_format = app.add_option("--format", format, "csv or json");
  app.add_option("--set", sets, "override a config key, key=value");
  const std::pair<const char*, const char*> commands[] = {
      {"estimate", "crossing probability per (p, r)"},
      {"rc", "finite-size critical density per n, with the duality sum on the square lattice"},
      {"decay", "survival tables and fits for D(0) and |C_0|"},
      {"verify", "exact property suite on small windows"},
      {"sample", "dump one bond configuration (binary, to --out)"},
  };
  for (const auto& [name, desc] : commands) app.add_subcommand(name, desc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    RawConfig raw = defaults();
    if (!config_path.empty()) {
      std::ifstream f(config_path, std::ios::binary);
      if (!f) throw ConfigError("cannot read config '" + config_path + "'");
      std::ostringstream text;
      text << f.rdbuf();
      merge_config_text(raw, text.str());
    }
    for (const auto& s : sets) parse_assignment(raw, s);
    if (o_seed->count()) raw["seed"] = seed;
    if (o_threads->count()) raw["threads"] = threads;
    if (o_out->count()) raw["out"] = out_path;
    if (o_format->count()) raw["format"] = format;
    cfg = resolve(raw);
  } catch (const ConfigError& e) {
    err << "dac: config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (command == "verify") {
      bool pass = true;
      const Table t = cmd_verify(cfg, err, pass);
      write_output(cfg, render(command, cfg, t), out);
      return pass ? kOk : kCheckFailure;
    }
    if (command == "sample") {
      out << render(command, cfg, cmd_sample(cfg));
      return kOk;
    }
    const Table t = command == "estimate" ? cmd_estimate(cfg) : command == "rc" ? cmd_rc(cfg) : cmd_decay(cfg);
    write_output(cfg, render(command, cfg, t), out);
    return kOk;
  } catch (const std::exception& e) {
    err << "dac: " << command << ": " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace dac::cli
