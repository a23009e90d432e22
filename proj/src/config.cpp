#include "cnslab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cnslab {

ConfigError::ConfigError(int line_, const std::string& msg, std::string key_)
    : Error(line_ > 0 ? "config line " + std::to_string(line_) + ": " + msg : "config: " + msg),
      line(line_),
      key(std::move(key_)),
      detail(msg) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

double to_double(const std::string& v) {
  const std::string t = trim(v);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  double out = 0;
  const char* b = t.data();
  const char* e = b + t.size();
  if (!t.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || ptr != e || t.empty()) throw Error("expected a number, got '" + t + "'");
  return out;
}

long to_int(const std::string& v) {
  const std::string t = trim(v);
  long out = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw Error("expected an integer, got '" + t + "'");
  return out;
}

bool to_bool(const std::string& v) {
  const std::string t = trim(v);
  if (t == "true") return true;
  if (t == "false") return false;
  throw Error("expected true or false, got '" + t + "'");
}

std::string to_string_value(const std::string& v) {
  const std::string t = trim(v);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
  if (t.find_first_of("\"=[] ") != std::string::npos || t.empty()) throw Error("expected a quoted string, got '" + t + "'");
  return t;
}

std::vector<double> to_list(const std::string& v) {
  const std::string t = trim(v);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw Error("expected a list [a, b, ...], got '" + t + "'");
  std::vector<double> out;
  const std::string body = trim(t.substr(1, t.size() - 2));
  if (body.empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item));
  return out;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string fmt_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
  return s + "]";
}

struct Key {
  std::string section, name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CNS_DOUBLE(sec, key, expr) \
  Key { sec, key, [](RunConfig& c, const std::string& v) { expr = to_double(v); }, [](const RunConfig& c) { return fmt_double(expr); } }
#define CNS_INT(sec, key, expr) \
  Key { sec, key, [](RunConfig& c, const std::string& v) { expr = static_cast<int>(to_int(v)); }, [](const RunConfig& c) { return std::to_string(expr); } }
#define CNS_BOOL(sec, key, expr) \
  Key { sec, key, [](RunConfig& c, const std::string& v) { expr = to_bool(v); }, [](const RunConfig& c) { return std::string(expr ? "true" : "false"); } }
#define CNS_STRING(sec, key, expr) \
  Key { sec, key, [](RunConfig& c, const std::string& v) { expr = to_string_value(v); }, [](const RunConfig& c) { return quote(expr); } }
#define CNS_LIST(sec, key, expr) \
  Key { sec, key, [](RunConfig& c, const std::string& v) { expr = to_list(v); }, [](const RunConfig& c) { return fmt_list(expr); } }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      Key{"", "seed", [](RunConfig& c, const std::string& v) {
            const long s = to_int(v);
            if (s < 0) throw Error("seed must be nonnegative");
            c.seed = static_cast<unsigned>(s);
            c.data.seed = c.seed;
          },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      CNS_INT("grid", "d", c.grid.d),
      CNS_INT("grid", "n", c.grid.n),
      CNS_DOUBLE("grid", "L", c.grid.L),
      CNS_DOUBLE("material", "mu", c.material.mu),
      CNS_DOUBLE("material", "lambda2", c.material.lambda2),
      CNS_DOUBLE("material", "kappa", c.kappa),
      CNS_DOUBLE("material", "gamma", c.material.pressure_slope),
      CNS_DOUBLE("indices", "q", c.pair.q),
      CNS_DOUBLE("indices", "p", c.pair.p),
      Key{"indices", "k0",
          [](RunConfig& c, const std::string& v) {
            if (trim(v) == "\"auto\"" || trim(v) == "auto")
              c.k0.reset();
            else
              c.k0 = static_cast<int>(to_int(v));
          },
          [](const RunConfig& c) { return c.k0 ? std::to_string(*c.k0) : std::string("\"auto\""); }},
      CNS_DOUBLE("stepper", "dt", c.dt),
      CNS_DOUBLE("stepper", "T", c.T),
      CNS_BOOL("stepper", "dealias", c.dealias),
      CNS_STRING("stepper", "formulation", c.formulation),
      CNS_INT("stepper", "sample_stride", c.sample_stride),
      CNS_INT("stepper", "snapshot_stride", c.snapshot_stride),
      CNS_DOUBLE("stepper", "vacuum_guard", c.vacuum_guard),
      CNS_BOOL("stepper", "linear_only", c.linear_only),
      CNS_STRING("data", "kind", c.data.kind),
      CNS_DOUBLE("data", "amplitude", c.data.amplitude),
      CNS_DOUBLE("data", "epsilon", c.data.epsilon),
      CNS_DOUBLE("data", "envelope_M", c.data.envelope_M),
      CNS_INT("data", "J0", c.data.J0),
      CNS_DOUBLE("data", "band_M", c.data.band_M),
      CNS_INT("data", "block", c.data.block),
      CNS_INT("data", "example", c.data.example),
      CNS_DOUBLE("data", "example_N", c.data.example_N),
      CNS_STRING("probe", "name", c.probe.name),
      CNS_INT("probe", "d", c.probe.d),
      CNS_DOUBLE("probe", "p", c.probe.p),
      CNS_LIST("probe", "k_list", c.probe.k_list),
      CNS_LIST("probe", "tau_list", c.probe.tau_list),
      CNS_INT("probe", "decay_n", c.probe.decay_n),
      CNS_DOUBLE("probe", "decay_L", c.probe.decay_L),
      CNS_DOUBLE("probe", "support_radius", c.probe.support_radius),
      CNS_INT("probe", "wave_n", c.probe.wave_n),
      CNS_DOUBLE("probe", "wave_L", c.probe.wave_L),
      CNS_INT("probe", "trials", c.probe.trials),
      CNS_INT("probe", "threads", c.probe.threads),
      CNS_STRING("output", "dir", c.out_dir),
  };
  return keys;
}

#undef CNS_DOUBLE
#undef CNS_INT
#undef CNS_BOOL
#undef CNS_STRING
#undef CNS_LIST

const Key* find_key(const std::string& section, const std::string& name) {
  for (const auto& k : registry())
    if (k.section == section && k.name == name) return &k;
  return nullptr;
}

std::string full_name(const Key& k) { return k.section.empty() ? k.name : k.section + "." + k.name; }

// Strips a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

}  // namespace

void RunConfig::validate() const {
  // Each check names the key it blames so the parser can report its line.
  auto check = [](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(0, e.what(), key);
    }
  };
  auto require = [](bool ok, const char* key, const std::string& msg) {
    if (!ok) throw ConfigError(0, msg, key);
  };
  check("grid.d", [&] { require(grid.d >= 1 && grid.d <= 3, "grid.d", "grid: d must be 1, 2 or 3"); });
  check("grid.n", [&] { grid.validate(); });
  check("material.mu", [&] { require(material.mu > 0, "material.mu", "material: mu > 0 required (μ > 0)"); });
  check("material.lambda2", [&] { material.validate(); });
  check("material.kappa", [&] { PressureLaw{kappa, material.pressure_slope}.validate(); });
  check("indices.p", [&] {
    const IndexCheck ic = validate_index_pair(pair.q, pair.p);
    if (!ic.accepted)
      throw Error("indices: (q, p) = (" + fmt_double(pair.q) + ", " + fmt_double(pair.p) + ") rejected by validate_index_pair: " + ic.reason);
  });
  check("indices.k0", [&] {
    if (!k0) return;
    const DyadicPartition part(grid);
    if (*k0 <= part.k_min() || *k0 >= part.k_max())
      throw Error("indices: k0 must lie strictly between " + std::to_string(part.k_min()) + " and " + std::to_string(part.k_max()));
  });
  require(dt > 0, "stepper.dt", "stepper: dt must be positive");
  require(T > 0, "stepper.T", "stepper: T must be positive");
  check("stepper.formulation", [&] { form(); });
  require(sample_stride >= 1, "stepper.sample_stride", "stepper: sample_stride must be >= 1");
  require(snapshot_stride >= 0, "stepper.snapshot_stride", "stepper: snapshot_stride must be >= 0");
  require(vacuum_guard > 0 && vacuum_guard < 1, "stepper.vacuum_guard", "stepper: vacuum_guard must lie in (0, 1)");
  require(data.amplitude >= 0, "data.amplitude", "data: amplitude must be nonnegative");
  require(probe.d >= 1 && probe.d <= 3, "probe.d", "probe: d must be 1, 2 or 3");
  require(probe.p >= 1, "probe.p", "probe: p must be >= 1");
  require(probe.trials >= 1, "probe.trials", "probe: trials must be >= 1");
  require(probe.threads >= 1, "probe.threads", "probe: threads must be >= 1");
  for (double k : probe.k_list) require(k == std::floor(k), "probe.k_list", "probe: k_list entries must be integers");
  require(!out_dir.empty(), "output.dir", "output: dir must not be empty");
}

Formulation RunConfig::form() const {
  if (formulation == "velocity") return Formulation::Velocity;
  if (formulation == "momentum") return Formulation::Momentum;
  throw Error("stepper: formulation must be \"velocity\" or \"momentum\"");
}

SolverParams RunConfig::solver() const {
  SolverParams sp;
  sp.lame = material;
  sp.pressure = PressureLaw{kappa, material.pressure_slope};
  sp.dealias = dealias;
  sp.vacuum_guard = vacuum_guard;
  sp.linear_only = linear_only;
  return sp;
}

SimConfig RunConfig::sim() const {
  SimConfig sc;
  sc.dt = dt;
  sc.T = T;
  sc.form = form();
  sc.sp = solver();
  sc.track.pairs = {pair};
  sc.k0 = k0;
  sc.sample_stride = sample_stride;
  sc.snapshot_stride = snapshot_stride;
  return sc;
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  std::string section = "\x01";
  for (const auto& k : registry()) {
    if (k.section != section) {
      section = k.section;
      if (!section.empty()) os << "\n[" << section << "]\n";
    }
    os << k.name << " = " << k.get(*this) << "\n";
  }
  return os.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : registry()) out.push_back(full_name(k));
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  std::set<std::string> seen;
  std::map<std::string, int> lines;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      bool known = false;
      for (const auto& k : registry()) known = known || (k.section == section && !section.empty());
      if (!known) throw ConfigError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
    const std::string name = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const Key* k = find_key(section, name);
    if (!k) throw ConfigError(line, "unknown key '" + (section.empty() ? name : section + "." + name) + "'");
    if (!seen.insert(full_name(*k)).second) throw ConfigError(line, "duplicate key '" + full_name(*k) + "'");
    lines[full_name(*k)] = line;
    try {
      k->set(cfg, value);
    } catch (const Error& e) {
      throw ConfigError(line, full_name(*k) + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const auto it = lines.find(e.key);
    if (it != lines.end()) throw ConfigError(it->second, e.detail, e.key);
    // Blame the lambda2 line for a 2mu+lambda violation caused by mu.
    if (e.key == "material.lambda2" && lines.count("material.mu")) throw ConfigError(lines["material.mu"], e.detail, e.key);
    throw;
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
  const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
  const Key* k = find_key(section, name);
  if (!k) throw ConfigError(0, "unknown key '" + key + "'");
  try {
    k->set(cfg, value);
  } catch (const Error& e) {
    throw ConfigError(0, key + ": " + e.what());
  }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(0, "override must look like key=value: '" + assignment + "'");
  apply_override(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

}  // namespace cnslab
