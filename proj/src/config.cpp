#include "dmcool/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace dmcool {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& origin) {
  ConfigFile cfg;
  std::string current;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section header");
      current = lower(trim(line.substr(1, line.size() - 2)));
      if (current.empty()) fail(origin, lineno, "empty section name");
      cfg.sections[current];  // record even if empty
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    if (current.empty()) fail(origin, lineno, "key outside of any [section]");
    Entry e;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty()) fail(origin, lineno, "empty key");
    cfg.sections[current].push_back(std::move(e));
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse(in, path);
}

const std::vector<ConfigFile::Entry>& ConfigFile::section(const std::string& name) const {
  auto it = sections.find(name);
  if (it == sections.end()) throw ConfigError("missing [" + name + "] section");
  return it->second;
}

// ---------------------------------------------------------------------------
// value parsing with unit annotations
// ---------------------------------------------------------------------------

namespace {

enum class Quantity {
  Frequency,   // rad/s by default; Hz-family and w1 accepted
  Power,       // W by default
  Action,      // J*s
  Angle,       // rad by default; pi and deg accepted
  Plain,       // dimensionless
  PlainOrW1,   // dimensionless in units of omega_1; "w1" accepted as no-op
};

struct ParsedValue {
  std::vector<double> numbers;
  std::string unit;  // lowercased annotation, possibly empty
};

ParsedValue split_value(const std::string& value, const std::string& origin, int line) {
  // numbers separated by commas; an optional trailing unit token after the
  // last number
  ParsedValue out;
  std::vector<std::string> parts;
  std::string cur;
  for (char c : value) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  for (size_t i = 0; i < parts.size(); ++i) {
    std::string tok = trim(parts[i]);
    if (tok.empty()) fail(origin, line, "empty list element");
    const char* begin = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail(origin, line, "expected a number, got '" + tok + "'");
    out.numbers.push_back(v);
    std::string rest = trim(std::string(end));
    if (!rest.empty()) {
      if (i + 1 != parts.size()) fail(origin, line, "unit annotation must follow the last value");
      out.unit = lower(rest);
    }
  }
  return out;
}

// Returns the multiplicative factor; w1-relative units report needs_w1.
double unit_factor(Quantity q, const std::string& unit, bool* needs_w1, const std::string& origin,
                   int line) {
  *needs_w1 = false;
  switch (q) {
    case Quantity::Frequency:
      if (unit.empty() || unit == "rad/s") return 1.0;
      if (unit == "hz") return kTwoPi;
      if (unit == "khz") return kTwoPi * 1e3;
      if (unit == "mhz") return kTwoPi * 1e6;
      if (unit == "ghz") return kTwoPi * 1e9;
      if (unit == "thz") return kTwoPi * 1e12;
      if (unit == "w1") {
        *needs_w1 = true;
        return 1.0;
      }
      break;
    case Quantity::Power:
      if (unit.empty() || unit == "w") return 1.0;
      if (unit == "mw") return 1e-3;
      if (unit == "uw") return 1e-6;
      if (unit == "nw") return 1e-9;
      if (unit == "pw") return 1e-12;
      break;
    case Quantity::Action:
      if (unit.empty() || unit == "j*s" || unit == "js") return 1.0;
      break;
    case Quantity::Angle:
      if (unit.empty() || unit == "rad") return 1.0;
      if (unit == "pi") return kTwoPi / 2.0;
      if (unit == "deg") return kTwoPi / 360.0;
      break;
    case Quantity::Plain:
      if (unit.empty()) return 1.0;
      break;
    case Quantity::PlainOrW1:
      if (unit.empty() || unit == "w1") return 1.0;
      break;
  }
  fail(origin, line, "unit '" + unit + "' not valid here");
}

struct PendingW1 {
  std::function<void(double)> apply;  // called with omega[0] once known
};

class SectionReader {
 public:
  SectionReader(const std::vector<ConfigFile::Entry>& entries, std::string origin)
      : entries_(entries), origin_(std::move(origin)) {}

  int read_n_modes() const {
    for (const auto& e : entries_)
      if (lower(e.key) == "n_modes") {
        ParsedValue v = split_value(e.value, origin_, e.line);
        if (v.numbers.size() != 1 || !v.unit.empty() ||
            v.numbers[0] != std::floor(v.numbers[0]) || v.numbers[0] < 1)
          fail(origin_, e.line, "n_modes must be a positive integer");
        return static_cast<int>(v.numbers[0]);
      }
    throw ConfigError(origin_ + ": missing n_modes key");
  }

  // scalar value; quantity controls accepted units
  void scalar(const ConfigFile::Entry& e, Quantity q, double* dst,
              std::vector<PendingW1>* pending) {
    ParsedValue v = split_value(e.value, origin_, e.line);
    if (v.numbers.size() != 1) fail(origin_, e.line, e.key + " expects a single value");
    bool needs_w1 = false;
    double f = unit_factor(q, v.unit, &needs_w1, origin_, e.line);
    double raw = v.numbers[0] * f;
    if (needs_w1)
      pending->push_back({[dst, raw](double w1) { *dst = raw * w1; }});
    else
      *dst = raw;
  }

  void array(const ConfigFile::Entry& e, Quantity q, int n, std::vector<double>* dst,
             std::vector<PendingW1>* pending) {
    ParsedValue v = split_value(e.value, origin_, e.line);
    if (static_cast<int>(v.numbers.size()) != n)
      fail(origin_, e.line,
           e.key + " expects " + std::to_string(n) + " comma-separated values, got " +
               std::to_string(v.numbers.size()));
    bool needs_w1 = false;
    double f = unit_factor(q, v.unit, &needs_w1, origin_, e.line);
    std::vector<double> scaled = v.numbers;
    for (double& x : scaled) x *= f;
    if (needs_w1)
      pending->push_back({[dst, scaled](double w1) {
        *dst = scaled;
        for (double& x : *dst) x *= w1;
      }});
    else
      *dst = scaled;
  }

  const std::vector<ConfigFile::Entry>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

 private:
  const std::vector<ConfigFile::Entry>& entries_;
  std::string origin_;
};

}  // namespace

PhysicalParams physical_from_config(const ConfigFile& cfg) {
  SectionReader rd(cfg.section("physical"), "[physical]");
  PhysicalParams p;
  p.n_modes = rd.read_n_modes();
  std::vector<PendingW1> pending;
  bool omega_uses_w1 = false;
  for (const auto& e : rd.entries()) {
    std::string key = lower(e.key);
    if (key == "n_modes") continue;
    if (key == "omega") {
      size_t before = pending.size();
      rd.array(e, Quantity::Frequency, p.n_modes, &p.omega, &pending);
      omega_uses_w1 = pending.size() != before;
    } else if (key == "gamma")
      rd.array(e, Quantity::Frequency, p.n_modes, &p.gamma, &pending);
    else if (key == "g1")
      rd.array(e, Quantity::Frequency, p.n_modes, &p.g1, &pending);
    else if (key == "g2")
      rd.array(e, Quantity::Frequency, p.n_modes, &p.g2, &pending);
    else if (key == "eta")
      rd.array(e, Quantity::Frequency, p.n_modes, &p.eta, &pending);
    else if (key == "omega_c")
      rd.scalar(e, Quantity::Frequency, &p.omega_c, &pending);
    else if (key == "omega_l")
      rd.scalar(e, Quantity::Frequency, &p.omega_L, &pending);
    else if (key == "kappa1")
      rd.scalar(e, Quantity::Frequency, &p.kappa1, &pending);
    else if (key == "kappa2")
      rd.scalar(e, Quantity::Frequency, &p.kappa2, &pending);
    else if (key == "chi0")
      rd.scalar(e, Quantity::Frequency, &p.chi0, &pending);
    else if (key == "delta_c")
      rd.scalar(e, Quantity::Frequency, &p.delta_c, &pending);
    else if (key == "delta_c_prime")
      rd.scalar(e, Quantity::Frequency, &p.delta_c_prime, &pending);
    else if (key == "p1")
      rd.scalar(e, Quantity::Power, &p.P1, &pending);
    else if (key == "p2")
      rd.scalar(e, Quantity::Power, &p.P2, &pending);
    else if (key == "hbar")
      rd.scalar(e, Quantity::Action, &p.hbar, &pending);
    else
      fail("[physical]", e.line, "unknown key '" + e.key + "'");
  }
  if (!pending.empty()) {
    if (omega_uses_w1) throw ConfigError("[physical]: omega itself cannot be given in w1 units");
    if (p.omega.empty() || !(p.omega[0] > 0.0))
      throw ConfigError("[physical]: w1-relative units need omega to be set in absolute units");
    for (auto& task : pending) task.apply(p.omega[0]);
  }
  return p;
}

EffectiveParams effective_from_config(const ConfigFile& cfg) {
  SectionReader rd(cfg.section("effective"), "[effective]");
  EffectiveParams p;
  p.n_modes = rd.read_n_modes();
  std::vector<PendingW1> unused;
  for (const auto& e : rd.entries()) {
    std::string key = lower(e.key);
    if (key == "n_modes") continue;
    if (key == "omega")
      rd.array(e, Quantity::PlainOrW1, p.n_modes, &p.omega, &unused);
    else if (key == "gamma")
      rd.array(e, Quantity::PlainOrW1, p.n_modes, &p.gamma, &unused);
    else if (key == "g1")
      rd.array(e, Quantity::PlainOrW1, p.n_modes, &p.G1, &unused);
    else if (key == "lambda")
      rd.array(e, Quantity::PlainOrW1, p.n_modes, &p.Lambda, &unused);
    else if (key == "n_th_modes")
      rd.array(e, Quantity::Plain, p.n_modes, &p.n_th_modes, &unused);
    else if (key == "kappa1")
      rd.scalar(e, Quantity::PlainOrW1, &p.kappa1, &unused);
    else if (key == "delta_c")
      rd.scalar(e, Quantity::PlainOrW1, &p.delta_c, &unused);
    else if (key == "chi_mag")
      rd.scalar(e, Quantity::PlainOrW1, &p.chi_mag, &unused);
    else if (key == "phi")
      rd.scalar(e, Quantity::Angle, &p.phi, &unused);
    else if (key == "n_th")
      rd.scalar(e, Quantity::Plain, &p.n_th, &unused);
    else
      fail("[effective]", e.line, "unknown key '" + e.key + "'");
  }
  return p;
}

MeanFieldSolverConfig meanfield_config_from_config(const ConfigFile& cfg) {
  MeanFieldSolverConfig mc;
  if (!cfg.has_section("meanfield")) return mc;
  std::vector<PendingW1> unused;
  SectionReader rd(cfg.section("meanfield"), "[meanfield]");
  for (const auto& e : rd.entries()) {
    std::string key = lower(e.key);
    if (key == "tolerance")
      rd.scalar(e, Quantity::Plain, &mc.tolerance, &unused);
    else if (key == "max_iterations") {
      double v = 0;
      rd.scalar(e, Quantity::Plain, &v, &unused);
      mc.max_iterations = static_cast<int>(v);
    } else if (key == "max_newton_iterations") {
      double v = 0;
      rd.scalar(e, Quantity::Plain, &v, &unused);
      mc.max_newton_iterations = static_cast<int>(v);
    } else if (key == "time_step_init")
      rd.scalar(e, Quantity::Plain, &mc.time_step_init, &unused);
    else if (key == "blowup_norm")
      rd.scalar(e, Quantity::Plain, &mc.blowup_norm, &unused);
    else if (key == "strategy") {
      std::string v = lower(trim(e.value));
      if (v == "relax_then_newton")
        mc.strategy = MeanFieldStrategy::RelaxThenNewton;
      else if (v == "relax_only")
        mc.strategy = MeanFieldStrategy::RelaxOnly;
      else if (v == "newton_only")
        mc.strategy = MeanFieldStrategy::NewtonOnly;
      else
        fail("[meanfield]", e.line, "unknown strategy '" + e.value + "'");
    } else
      fail("[meanfield]", e.line, "unknown key '" + e.key + "'");
  }
  return mc;
}

// ---------------------------------------------------------------------------
// parameter paths
// ---------------------------------------------------------------------------

namespace {

struct PathPart {
  std::string field;
  int index = 0;  // 1-based; 0 = no index
};

struct Path {
  PathPart num;
  bool is_ratio = false;
  PathPart den;
};

PathPart parse_part(const std::string& text, const std::string& full) {
  PathPart part;
  std::string s = trim(text);
  size_t br = s.find('[');
  if (br == std::string::npos) {
    part.field = s;
  } else {
    if (s.back() != ']') throw ValidationError("path '" + full + "': missing ']'");
    part.field = trim(s.substr(0, br));
    std::string idx = s.substr(br + 1, s.size() - br - 2);
    char* end = nullptr;
    long v = std::strtol(idx.c_str(), &end, 10);
    if (end == idx.c_str() || *end != '\0' || v < 1)
      throw ValidationError("path '" + full + "': index must be a positive integer");
    part.index = static_cast<int>(v);
  }
  if (part.field.empty()) throw ValidationError("path '" + full + "': empty field name");
  return part;
}

Path parse_path(const std::string& text) {
  Path p;
  size_t slash = text.find('/');
  if (slash == std::string::npos) {
    p.num = parse_part(text, text);
  } else {
    p.is_ratio = true;
    p.num = parse_part(text.substr(0, slash), text);
    p.den = parse_part(text.substr(slash + 1), text);
  }
  return p;
}

template <typename Params>
struct FieldMap;

template <>
struct FieldMap<EffectiveParams> {
  static double* scalar(EffectiveParams& p, const std::string& f) {
    if (f == "kappa1") return &p.kappa1;
    if (f == "delta_c") return &p.delta_c;
    if (f == "chi_mag") return &p.chi_mag;
    if (f == "phi") return &p.phi;
    if (f == "n_th") return &p.n_th;
    return nullptr;
  }
  static std::vector<double>* array(EffectiveParams& p, const std::string& f) {
    if (f == "omega") return &p.omega;
    if (f == "gamma") return &p.gamma;
    if (f == "G1") return &p.G1;
    if (f == "Lambda") return &p.Lambda;
    if (f == "n_th_modes") return &p.n_th_modes;
    return nullptr;
  }
};

template <>
struct FieldMap<PhysicalParams> {
  static double* scalar(PhysicalParams& p, const std::string& f) {
    if (f == "omega_c") return &p.omega_c;
    if (f == "omega_L") return &p.omega_L;
    if (f == "kappa1") return &p.kappa1;
    if (f == "kappa2") return &p.kappa2;
    if (f == "chi0") return &p.chi0;
    if (f == "P1") return &p.P1;
    if (f == "P2") return &p.P2;
    if (f == "delta_c") return &p.delta_c;
    if (f == "delta_c_prime") return &p.delta_c_prime;
    if (f == "hbar") return &p.hbar;
    return nullptr;
  }
  static std::vector<double>* array(PhysicalParams& p, const std::string& f) {
    if (f == "omega") return &p.omega;
    if (f == "gamma") return &p.gamma;
    if (f == "g1") return &p.g1;
    if (f == "g2") return &p.g2;
    if (f == "eta") return &p.eta;
    return nullptr;
  }
};

template <typename Params>
double* resolve_part(Params& p, const PathPart& part, const std::string& full) {
  if (part.index == 0) {
    double* s = FieldMap<Params>::scalar(p, part.field);
    if (s) return s;
    if (FieldMap<Params>::array(p, part.field))
      throw ValidationError("path '" + full + "': field '" + part.field + "' needs an index");
    throw ValidationError("path '" + full + "': unknown field '" + part.field + "'");
  }
  std::vector<double>* a = FieldMap<Params>::array(p, part.field);
  if (!a) {
    if (FieldMap<Params>::scalar(p, part.field))
      throw ValidationError("path '" + full + "': field '" + part.field + "' is scalar");
    throw ValidationError("path '" + full + "': unknown field '" + part.field + "'");
  }
  if (part.index > static_cast<int>(a->size()))
    throw ValidationError("path '" + full + "': index " + std::to_string(part.index) +
                          " out of range for field '" + part.field + "' of length " +
                          std::to_string(a->size()));
  return &(*a)[static_cast<size_t>(part.index - 1)];
}

template <typename Params>
void set_path_impl(Params& p, const std::string& path, double value) {
  Path parsed = parse_path(path);
  double* num = resolve_part(p, parsed.num, path);
  if (parsed.is_ratio) {
    double den = *resolve_part(p, parsed.den, path);
    *num = value * den;
  } else {
    *num = value;
  }
}

template <typename Params>
double get_path_impl(const Params& cp, const std::string& path) {
  Params& p = const_cast<Params&>(cp);
  Path parsed = parse_path(path);
  double num = *resolve_part(p, parsed.num, path);
  if (parsed.is_ratio) {
    double den = *resolve_part(p, parsed.den, path);
    return num / den;
  }
  return num;
}

}  // namespace

void set_path(EffectiveParams& p, const std::string& path, double value) {
  set_path_impl(p, path, value);
}

void set_path(PhysicalParams& p, const std::string& path, double value) {
  if (path == "P") {  // both drives at once (power sweeps)
    p.P1 = value;
    p.P2 = value;
    return;
  }
  set_path_impl(p, path, value);
}

double get_path(const EffectiveParams& p, const std::string& path) {
  return get_path_impl(p, path);
}

double get_path(const PhysicalParams& p, const std::string& path) {
  if (path == "P") return p.P1;
  return get_path_impl(p, path);
}

}  // namespace dmcool
