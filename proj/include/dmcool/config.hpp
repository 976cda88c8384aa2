#ifndef DMCOOL_CONFIG_HPP
#define DMCOOL_CONFIG_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dmcool/meanfield.hpp"
#include "dmcool/model.hpp"

namespace dmcool {

// Flat key-value parameter file with [section] headers, '#'/';' comments,
// comma-separated arrays and optional unit annotations after the value(s),
// e.g.
//   [physical]
//   n_modes = 2
//   omega   = 20, 20 MHz
//   kappa1  = 100 w1
//   P1      = 4 uW
//   [effective]
//   phi     = 0.5 pi
// See docs/CONFIG.md for the full schema.
struct ConfigFile {
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  std::map<std::string, std::vector<Entry>> sections;

  static ConfigFile parse(std::istream& in, const std::string& origin);
  static ConfigFile parse_file(const std::string& path);

  bool has_section(const std::string& name) const { return sections.count(name) != 0; }
  const std::vector<Entry>& section(const std::string& name) const;
};

// Build parameter sets from the matching section. Throws ConfigError on
// unknown keys, malformed values or unit annotations; field invariants are
// checked by validate() downstream.
PhysicalParams physical_from_config(const ConfigFile& cfg);
EffectiveParams effective_from_config(const ConfigFile& cfg);

// Optional [meanfield] section (tolerance, max_iterations, time_step_init,
// blowup_norm, strategy); absent keys keep defaults.
MeanFieldSolverConfig meanfield_config_from_config(const ConfigFile& cfg);

// Parameter paths address scalar fields ("kappa1"), 1-based array elements
// ("Lambda[2]"), or ratios ("Lambda[2]/Lambda[1]"). Setting a ratio path
// assigns numerator := value * denominator. PhysicalParams additionally
// accepts the pseudo-path "P" (sets both drive powers).
void set_path(EffectiveParams& p, const std::string& path, double value);
void set_path(PhysicalParams& p, const std::string& path, double value);
double get_path(const EffectiveParams& p, const std::string& path);
double get_path(const PhysicalParams& p, const std::string& path);

}  // namespace dmcool

#endif
