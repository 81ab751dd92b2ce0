#include "circsched/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <type_traits>

namespace circsched {

std::vector<std::uint32_t> SweepRange::counts() const {
  std::vector<std::uint32_t> out;
  if (step == 0) return out;
  for (std::uint32_t n = from; n <= to; n += step) out.push_back(n);
  return out;
}

Scenario default_scenario() {
  Scenario s;
  CircuitGroup web;
  web.workload.ctype = CircuitType::Web;
  web.count = 6;
  CircuitGroup streaming;
  streaming.workload.ctype = CircuitType::Streaming;
  streaming.count = 4;
  CircuitGroup bulk;
  bulk.workload.ctype = CircuitType::Bulk;
  bulk.count = 2;
  s.circuits = {web, streaming, bulk};
  return s;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const auto mark = node.Mark();
    std::ostringstream out;
    out << origin_ << ':' << (mark.line + 1) << ':' << (mark.column + 1) << ": " << msg;
    throw ConfigError(out.str());
  }

  using Handler = std::function<void(const YAML::Node&)>;

  /// Dispatches each key of a mapping to its handler; rejects unknown keys.
  void mapping(const YAML::Node& node, const std::string& where,
               const std::map<std::string, Handler>& handlers) const {
    if (!node.IsMap()) fail(node, where + " must be a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      auto it = handlers.find(key);
      if (it == handlers.end()) fail(kv.first, "unknown key '" + key + "' in " + where);
      it->second(kv.second);
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + key + "' has an invalid value '" + node.Scalar() + "'");
    }
  }

  template <typename T>
  T positive(const YAML::Node& node, const std::string& key) const {
    if constexpr (std::is_unsigned_v<T>) reject_sign(node, key);
    const T v = scalar<T>(node, key);
    if (!(v > T{0})) fail(node, "'" + key + "' must be positive");
    return v;
  }

  void reject_sign(const YAML::Node& node, const std::string& key) const {
    const auto text = node.IsScalar() ? node.Scalar() : std::string{};
    if (!text.empty() && text.front() == '-') fail(node, "'" + key + "' must be non-negative");
  }

  std::uint64_t unsigned_int(const YAML::Node& node, const std::string& key) const {
    reject_sign(node, key);
    return scalar<std::uint64_t>(node, key);
  }

  template <typename T>
  Range<T> range(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence() || node.size() != 2) {
      fail(node, "'" + key + "' must be a two-element list [lo, hi]");
    }
    Range<T> r{static_cast<T>(unsigned_int(node[0], key)),
               static_cast<T>(unsigned_int(node[1], key))};
    if (r.lo > r.hi) fail(node, "'" + key + "' has lo > hi");
    return r;
  }

 private:
  std::string origin_;
};

void read_sim(const Reader& rd, const YAML::Node& node, SimConfig& cfg) {
  rd.mapping(node, "sim",
             {
                 {"tick_ms", [&](const YAML::Node& v) { cfg.tick_ms = rd.positive<double>(v, "tick_ms"); }},
                 {"buffer_capacity_cells",
                  [&](const YAML::Node& v) {
                    cfg.buffer_capacity_cells = rd.positive<Cells>(v, "buffer_capacity_cells");
                  }},
                 {"alpha1",
                  [&](const YAML::Node& v) {
                    cfg.alpha1 = rd.scalar<double>(v, "alpha1");
                    if (!(cfg.alpha1 > 0.0 && cfg.alpha1 < 1.0)) rd.fail(v, "'alpha1' must lie in (0,1)");
                  }},
                 {"alpha2",
                  [&](const YAML::Node& v) {
                    cfg.alpha2 = rd.scalar<double>(v, "alpha2");
                    if (!(cfg.alpha2 > 0.0 && cfg.alpha2 < 1.0)) rd.fail(v, "'alpha2' must lie in (0,1)");
                  }},
                 {"type_priority",
                  [&](const YAML::Node& v) {
                    rd.mapping(v, "type_priority",
                               {
                                   {"web", [&](const YAML::Node& x) { cfg.type_priority.web = rd.positive<double>(x, "web"); }},
                                   {"streaming", [&](const YAML::Node& x) { cfg.type_priority.streaming = rd.positive<double>(x, "streaming"); }},
                                   {"bulk", [&](const YAML::Node& x) { cfg.type_priority.bulk = rd.positive<double>(x, "bulk"); }},
                               });
                    const auto& y = cfg.type_priority;
                    if (!(y.web > y.streaming && y.streaming > y.bulk)) {
                      rd.fail(v, "type_priority must order web > streaming > bulk");
                    }
                  }},
                 {"queue_cap_cells",
                  [&](const YAML::Node& v) { cfg.queue_cap_cells = rd.positive<Cells>(v, "queue_cap_cells"); }},
                 {"drain_cells_per_tick",
                  [&](const YAML::Node& v) {
                    cfg.drain_cells_per_tick = rd.positive<Cells>(v, "drain_cells_per_tick");
                  }},
                 {"ewma_half_life_ms",
                  [&](const YAML::Node& v) { cfg.ewma_half_life_ms = rd.positive<double>(v, "ewma_half_life_ms"); }},
                 {"throughput_window_ticks",
                  [&](const YAML::Node& v) {
                    cfg.throughput_window_ticks = rd.positive<Tick>(v, "throughput_window_ticks");
                  }},
                 {"rate_floor", [&](const YAML::Node& v) { cfg.rate_floor = rd.positive<double>(v, "rate_floor"); }},
                 {"seed", [&](const YAML::Node& v) { cfg.seed = rd.unsigned_int(v, "seed"); }},
             });
}

CircuitGroup read_group(const Reader& rd, const YAML::Node& node) {
  CircuitGroup g;
  auto& w = g.workload;
  bool typed = false;
  rd.mapping(node, "circuits entry",
             {
                 {"ctype",
                  [&](const YAML::Node& v) {
                    const auto name = rd.scalar<std::string>(v, "ctype");
                    auto t = parse_circuit_type(name);
                    if (!t) {
                      rd.fail(v, "unknown ctype '" + name + "' (expected web, streaming or bulk)");
                    }
                    w.ctype = *t;
                    typed = true;
                  }},
                 {"count",
                  [&](const YAML::Node& v) {
                    g.count = static_cast<std::uint32_t>(rd.unsigned_int(v, "count"));
                  }},
                 {"web_burst_bytes",
                  [&](const YAML::Node& v) { w.web_burst_bytes = rd.range<std::uint64_t>(v, "web_burst_bytes"); }},
                 {"web_gap_ticks", [&](const YAML::Node& v) { w.web_gap_ticks = rd.range<Tick>(v, "web_gap_ticks"); }},
                 {"web_burst_count",
                  [&](const YAML::Node& v) {
                    w.web_burst_count = static_cast<std::uint32_t>(rd.positive<std::uint64_t>(v, "web_burst_count"));
                  }},
                 {"bulk_total_bytes",
                  [&](const YAML::Node& v) { w.bulk_total_bytes = rd.positive<std::uint64_t>(v, "bulk_total_bytes"); }},
                 {"stream_rate_cells_per_tick",
                  [&](const YAML::Node& v) {
                    w.stream_rate_cells_per_tick = rd.positive<Cells>(v, "stream_rate_cells_per_tick");
                  }},
                 {"stream_total_bytes",
                  [&](const YAML::Node& v) {
                    w.stream_total_bytes = rd.positive<std::uint64_t>(v, "stream_total_bytes");
                  }},
                 {"arrival_rate_cells_per_tick",
                  [&](const YAML::Node& v) {
                    w.arrival_rate_cells_per_tick = rd.positive<Cells>(v, "arrival_rate_cells_per_tick");
                  }},
             });
  if (!typed) rd.fail(node, "circuits entry needs a 'ctype'");
  try {
    validate(w);
  } catch (const std::invalid_argument& e) {
    rd.fail(node, e.what());
  }
  return g;
}

void read_run(const Reader& rd, const YAML::Node& node, RunSettings& run) {
  rd.mapping(node, "run",
             {
                 {"max_ticks", [&](const YAML::Node& v) { run.max_ticks = rd.positive<Tick>(v, "max_ticks"); }},
                 {"schedulers",
                  [&](const YAML::Node& v) {
                    if (!v.IsSequence() || v.size() == 0) rd.fail(v, "'schedulers' must be a non-empty list");
                    run.schedulers.clear();
                    for (const auto& item : v) {
                      const auto name = rd.scalar<std::string>(item, "schedulers");
                      auto kind = parse_scheduler(name);
                      if (!kind) {
                        rd.fail(item, "unknown scheduler '" + name +
                                          "'; valid names: " + scheduler_name_list());
                      }
                      run.schedulers.push_back(*kind);
                    }
                  }},
                 {"seeds",
                  [&](const YAML::Node& v) {
                    if (!v.IsSequence() || v.size() == 0) rd.fail(v, "'seeds' must be a non-empty list");
                    run.seeds.clear();
                    for (const auto& item : v) run.seeds.push_back(rd.unsigned_int(item, "seeds"));
                  }},
                 {"sweep",
                  [&](const YAML::Node& v) {
                    rd.mapping(v, "sweep",
                               {
                                   {"from", [&](const YAML::Node& x) { run.sweep.from = static_cast<std::uint32_t>(rd.unsigned_int(x, "from")); }},
                                   {"to", [&](const YAML::Node& x) { run.sweep.to = static_cast<std::uint32_t>(rd.unsigned_int(x, "to")); }},
                                   {"step", [&](const YAML::Node& x) { run.sweep.step = static_cast<std::uint32_t>(rd.unsigned_int(x, "step")); }},
                               });
                  }},
                 {"fairness_horizon_ticks",
                  [&](const YAML::Node& v) { run.fairness_horizon_ticks = rd.unsigned_int(v, "fairness_horizon_ticks"); }},
             });
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  // Keep reals recognisable as reals when read back.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Reader rd(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream out;
    out << origin << ':' << (e.mark.line + 1) << ':' << (e.mark.column + 1) << ": " << e.msg;
    throw ConfigError(out.str());
  }

  Scenario s = default_scenario();
  if (root.IsNull()) return s;
  rd.mapping(root, "scenario",
             {
                 {"sim", [&](const YAML::Node& v) { read_sim(rd, v, s.sim); }},
                 {"circuits",
                  [&](const YAML::Node& v) {
                    if (!v.IsSequence()) rd.fail(v, "'circuits' must be a list");
                    s.circuits.clear();
                    for (const auto& item : v) s.circuits.push_back(read_group(rd, item));
                  }},
                 {"run", [&](const YAML::Node& v) { read_run(rd, v, s.run); }},
             });
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.string());
}

std::string to_yaml(const Scenario& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  const auto& c = s.sim;
  out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tick_ms" << YAML::Value << format_double(c.tick_ms);
  out << YAML::Key << "buffer_capacity_cells" << YAML::Value << c.buffer_capacity_cells;
  out << YAML::Key << "alpha1" << YAML::Value << format_double(c.alpha1);
  out << YAML::Key << "alpha2" << YAML::Value << format_double(c.alpha2);
  out << YAML::Key << "type_priority" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "web" << YAML::Value << format_double(c.type_priority.web);
  out << YAML::Key << "streaming" << YAML::Value << format_double(c.type_priority.streaming);
  out << YAML::Key << "bulk" << YAML::Value << format_double(c.type_priority.bulk);
  out << YAML::EndMap;
  out << YAML::Key << "queue_cap_cells" << YAML::Value << c.queue_cap_cells;
  out << YAML::Key << "drain_cells_per_tick" << YAML::Value << c.drain_cells_per_tick;
  out << YAML::Key << "ewma_half_life_ms" << YAML::Value << format_double(c.ewma_half_life_ms);
  out << YAML::Key << "throughput_window_ticks" << YAML::Value << c.throughput_window_ticks;
  out << YAML::Key << "rate_floor" << YAML::Value << format_double(c.rate_floor);
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::EndMap;

  out << YAML::Key << "circuits" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : s.circuits) {
    const auto& w = g.workload;
    out << YAML::BeginMap;
    out << YAML::Key << "ctype" << YAML::Value << std::string(to_string(w.ctype));
    out << YAML::Key << "count" << YAML::Value << g.count;
    out << YAML::Key << "web_burst_bytes" << YAML::Value << YAML::Flow << YAML::BeginSeq
        << w.web_burst_bytes.lo << w.web_burst_bytes.hi << YAML::EndSeq;
    out << YAML::Key << "web_gap_ticks" << YAML::Value << YAML::Flow << YAML::BeginSeq
        << w.web_gap_ticks.lo << w.web_gap_ticks.hi << YAML::EndSeq;
    out << YAML::Key << "web_burst_count" << YAML::Value << w.web_burst_count;
    out << YAML::Key << "bulk_total_bytes" << YAML::Value << w.bulk_total_bytes;
    out << YAML::Key << "stream_rate_cells_per_tick" << YAML::Value << w.stream_rate_cells_per_tick;
    out << YAML::Key << "stream_total_bytes" << YAML::Value << w.stream_total_bytes;
    out << YAML::Key << "arrival_rate_cells_per_tick" << YAML::Value << w.arrival_rate_cells_per_tick;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const auto& r = s.run;
  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "max_ticks" << YAML::Value << r.max_ticks;
  out << YAML::Key << "schedulers" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto k : r.schedulers) out << std::string(to_string(k));
  out << YAML::EndSeq;
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto seed : r.seeds) out << seed;
  out << YAML::EndSeq;
  out << YAML::Key << "sweep" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "from" << YAML::Value << r.sweep.from;
  out << YAML::Key << "to" << YAML::Value << r.sweep.to;
  out << YAML::Key << "step" << YAML::Value << r.sweep.step;
  out << YAML::EndMap;
  out << YAML::Key << "fairness_horizon_ticks" << YAML::Value << r.fairness_horizon_ticks;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<WorkloadSpec> expand_circuits(const std::vector<CircuitGroup>& groups) {
  std::vector<WorkloadSpec> out;
  for (const auto& g : groups) {
    for (std::uint32_t i = 0; i < g.count; ++i) out.push_back(g.workload);
  }
  return out;
}

std::vector<WorkloadSpec> replicate_mix(const std::vector<CircuitGroup>& groups,
                                        std::uint32_t total) {
  const std::uint64_t base = std::accumulate(
      groups.begin(), groups.end(), std::uint64_t{0},
      [](std::uint64_t acc, const CircuitGroup& g) { return acc + g.count; });
  if (base == 0) return {};

  std::vector<CircuitGroup> scaled = groups;
  std::vector<std::uint64_t> remainder(groups.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::uint64_t quota = std::uint64_t{total} * groups[i].count;
    scaled[i].count = static_cast<std::uint32_t>(quota / base);
    remainder[i] = quota % base;
    assigned += scaled[i].count;
  }
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++scaled[order[k]].count;
    ++assigned;
  }
  return expand_circuits(scaled);
}

}  // namespace circsched
