// dmcool command-line interface. Built entirely on the public C API.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dmcool/dmcool.h"

namespace {

// exit codes: 0 ok, 2 validation error, 3 instability with --strict,
// 4 numerical failure
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(dmcool_status status) {
  switch (status) {
    case DMCOOL_OK:
      return kExitOk;
    case DMCOOL_ERROR_VALIDATION:
    case DMCOOL_ERROR_INVALID_ARGUMENT:
      return kExitValidation;
    case DMCOOL_ERROR_UNSTABLE:
      return kExitUnstable;
    default:
      return kExitNumerical;
  }
}

int fail(dmcool_status status) {
  std::fprintf(stderr, "error: %s\n", dmcool_last_error());
  return exit_code_for(status);
}

struct SetFlag {
  std::string path;
  double value;
};

bool parse_set(const std::string& text, SetFlag* out) {
  size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  out->path = text.substr(0, eq);
  char* end = nullptr;
  out->value = std::strtod(text.c_str() + eq + 1, &end);
  return end != text.c_str() + eq + 1 && *end == '\0';
}

bool parse_powers(const std::string& text, std::vector<double>* out) {
  // "lo:hi:count" or a single value
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else
      cur += c;
  }
  parts.push_back(cur);
  try {
    if (parts.size() == 1) {
      out->push_back(std::stod(parts[0]));
      return true;
    }
    if (parts.size() != 3) return false;
    double lo = std::stod(parts[0]);
    double hi = std::stod(parts[1]);
    int count = std::stoi(parts[2]);
    if (count < 1) return false;
    for (int i = 0; i < count; ++i)
      out->push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

int run_preset(const std::string& action, const std::string& id) {
  if (action == "list") {
    char ids[256];
    if (auto rc = dmcool_preset_ids(ids, sizeof ids); rc != DMCOOL_OK) return fail(rc);
    std::printf("%s\n", ids);
    return kExitOk;
  }
  // show
  if (id.empty()) {
    std::fprintf(stderr, "error: preset show needs an id\n");
    return kExitValidation;
  }
  char descr[4096];
  if (auto rc = dmcool_preset_describe(id.c_str(), descr, sizeof descr); rc != DMCOOL_OK)
    return fail(rc);
  std::printf("%s", descr);
  return kExitOk;
}

int run_sweep_cmd(const std::string& preset_id, const std::string& config,
                  const std::vector<std::string>& sets, const std::string& out_path,
                  const std::string& format, int grid, int jobs, bool strict, bool dark_scan,
                  double dark_threshold, const std::string& peaks_column, double prominence,
                  bool quiet) {
  dmcool_sweep_spec* spec = nullptr;
  dmcool_status rc;
  if (!preset_id.empty() && !config.empty()) {
    std::fprintf(stderr, "error: pass either --preset or --config, not both\n");
    return kExitValidation;
  }
  if (!preset_id.empty())
    rc = dmcool_preset(preset_id.c_str(), &spec);
  else if (!config.empty())
    rc = dmcool_sweep_spec_load(config.c_str(), &spec);
  else {
    std::fprintf(stderr, "error: sweep needs --preset <id> or --config <file>\n");
    return kExitValidation;
  }
  if (rc != DMCOOL_OK) return fail(rc);

  for (const auto& s : sets) {
    SetFlag flag;
    if (!parse_set(s, &flag)) {
      std::fprintf(stderr, "error: malformed --set '%s' (expected path=value)\n", s.c_str());
      dmcool_sweep_spec_destroy(spec);
      return kExitValidation;
    }
    if ((rc = dmcool_sweep_spec_set(spec, flag.path.c_str(), flag.value)) != DMCOOL_OK) {
      dmcool_sweep_spec_destroy(spec);
      return fail(rc);
    }
  }
  if (grid > 0 && (rc = dmcool_sweep_spec_grid(spec, grid)) != DMCOOL_OK) {
    dmcool_sweep_spec_destroy(spec);
    return fail(rc);
  }
  if (dark_scan) dmcool_sweep_spec_dark_scan(spec, 1, dark_threshold);

  int missing = 0;
  char missing_buf[2048];
  dmcool_sweep_spec_missing(spec, missing_buf, sizeof missing_buf, &missing);
  if (missing > 0) {
    std::fprintf(stderr,
                 "error: this preset leaves %d parameter(s) unset; supply them with --set:\n%s\n",
                 missing, missing_buf);
    dmcool_sweep_spec_destroy(spec);
    return kExitValidation;
  }

  dmcool_sweep_result* result = nullptr;
  rc = dmcool_sweep_run(spec, jobs, quiet ? 0 : 1, &result);
  dmcool_sweep_spec_destroy(spec);
  if (rc != DMCOOL_OK) return fail(rc);

  rc = dmcool_sweep_emit(result, format.c_str(), out_path.empty() ? nullptr : out_path.c_str());
  if (rc != DMCOOL_OK) {
    dmcool_sweep_result_destroy(result);
    return fail(rc);
  }

  if (!peaks_column.empty()) {
    double locations[64];
    int count = 0;
    rc = dmcool_sweep_find_peaks(result, peaks_column.c_str(), prominence, locations, 64, &count);
    if (rc != DMCOOL_OK) {
      dmcool_sweep_result_destroy(result);
      return fail(rc);
    }
    std::fprintf(stderr, "peaks(%s):", peaks_column.c_str());
    for (int i = 0; i < count; ++i) std::fprintf(stderr, " %.17g", locations[i]);
    std::fprintf(stderr, "\n");
  }

  int rows = 0, unstable = 0, failed = 0;
  dmcool_sweep_result_stats(result, &rows, &unstable, &failed);
  dmcool_sweep_result_destroy(result);
  if (failed > 0) {
    std::fprintf(stderr, "error: %d of %d points failed numerically\n", failed, rows);
    return kExitNumerical;
  }
  if (unstable > 0) {
    std::fprintf(stderr, "note: %d of %d points are unstable (no steady state)\n", unstable,
                 rows);
    if (strict) return kExitUnstable;
  }
  return kExitOk;
}

int run_cool_cmd(const std::string& config, const std::vector<std::string>& sets,
                 const std::string& out_path, bool strict) {
  if (config.empty()) {
    std::fprintf(stderr, "error: cool needs --config <file> with an [effective] section\n");
    return kExitValidation;
  }
  dmcool_effective* eff = nullptr;
  dmcool_status rc = dmcool_effective_load(config.c_str(), &eff);
  if (rc != DMCOOL_OK) return fail(rc);
  for (const auto& s : sets) {
    SetFlag flag;
    if (!parse_set(s, &flag)) {
      std::fprintf(stderr, "error: malformed --set '%s'\n", s.c_str());
      dmcool_effective_destroy(eff);
      return kExitValidation;
    }
    if ((rc = dmcool_effective_set(eff, flag.path.c_str(), flag.value)) != DMCOOL_OK) {
      dmcool_effective_destroy(eff);
      return fail(rc);
    }
  }
  if ((rc = dmcool_effective_validate(eff)) != DMCOOL_OK) {
    dmcool_effective_destroy(eff);
    return fail(rc);
  }
  dmcool_cooling* cool = nullptr;
  if ((rc = dmcool_cooling_point(eff, &cool)) != DMCOOL_OK) {
    dmcool_effective_destroy(eff);
    return fail(rc);
  }
  rc = dmcool_cooling_emit_json(eff, cool, out_path.empty() ? nullptr : out_path.c_str());
  int stable = 1;
  dmcool_cooling_stable(cool, &stable);
  dmcool_cooling_destroy(cool);
  dmcool_effective_destroy(eff);
  if (rc != DMCOOL_OK) return fail(rc);
  if (!stable) {
    std::fprintf(stderr, "note: point is unstable (no steady state)\n");
    if (strict) return kExitUnstable;
  }
  return kExitOk;
}

int run_meanfield_cmd(const std::string& preset_id, const std::string& config,
                      const std::vector<std::string>& sets, const std::string& powers_text,
                      const std::string& out_path, const std::string& format, bool strict) {
  dmcool_physical* phys = nullptr;
  dmcool_sweep_spec* spec = nullptr;
  std::vector<double> powers;
  dmcool_status rc;

  if (!preset_id.empty()) {
    // preset fig2 carries the physical parameters and the power grid; load
    // the grid by re-deriving it here (ascending linspace over [0, 4 uW])
    if (preset_id != "fig2") {
      std::fprintf(stderr, "error: meanfield supports the fig2 preset only\n");
      return kExitValidation;
    }
    if ((rc = dmcool_preset("fig2", &spec)) != DMCOOL_OK) return fail(rc);
  } else if (!config.empty()) {
    if ((rc = dmcool_physical_load(config.c_str(), &phys)) != DMCOOL_OK) return fail(rc);
  } else {
    std::fprintf(stderr, "error: meanfield needs --preset fig2 or --config <file>\n");
    return kExitValidation;
  }

  if (!powers_text.empty() && !parse_powers(powers_text, &powers)) {
    std::fprintf(stderr, "error: malformed --powers (expected lo:hi:count or a single value)\n");
    if (spec) dmcool_sweep_spec_destroy(spec);
    if (phys) dmcool_physical_destroy(phys);
    return kExitValidation;
  }

  if (spec) {
    // run through the generic sweep engine so the preset's grid is honored
    for (const auto& s : sets) {
      SetFlag flag;
      if (!parse_set(s, &flag)) {
        std::fprintf(stderr, "error: malformed --set '%s'\n", s.c_str());
        dmcool_sweep_spec_destroy(spec);
        return kExitValidation;
      }
      if ((rc = dmcool_sweep_spec_set(spec, flag.path.c_str(), flag.value)) != DMCOOL_OK) {
        dmcool_sweep_spec_destroy(spec);
        return fail(rc);
      }
    }
    if (!powers.empty()) {
      rc = dmcool_sweep_spec_set_axis(spec, 1, "P", powers.front(), powers.back(),
                                      static_cast<int>(powers.size()));
      if (rc != DMCOOL_OK) {
        dmcool_sweep_spec_destroy(spec);
        return fail(rc);
      }
    }
    dmcool_sweep_result* result = nullptr;
    rc = dmcool_sweep_run(spec, 1, 0, &result);
    dmcool_sweep_spec_destroy(spec);
    if (rc != DMCOOL_OK) return fail(rc);
    rc = dmcool_sweep_emit(result, format.c_str(), out_path.empty() ? nullptr : out_path.c_str());
    dmcool_sweep_result_destroy(result);
    if (rc != DMCOOL_OK) return fail(rc);
    return kExitOk;
  }

  for (const auto& s : sets) {
    SetFlag flag;
    if (!parse_set(s, &flag)) {
      std::fprintf(stderr, "error: malformed --set '%s'\n", s.c_str());
      dmcool_physical_destroy(phys);
      return kExitValidation;
    }
    if ((rc = dmcool_physical_set(phys, flag.path.c_str(), flag.value)) != DMCOOL_OK) {
      dmcool_physical_destroy(phys);
      return fail(rc);
    }
  }
  if (powers.empty()) {
    // single solve at the configured drive powers
    double p1 = 0.0;
    dmcool_physical_get(phys, "P1", &p1);
    powers.push_back(p1);
  }
  dmcool_meanfield_options opts;
  dmcool_meanfield_options_init(&opts);
  rc = dmcool_meanfield_sweep_emit(phys, powers.data(), static_cast<int>(powers.size()), &opts,
                                   format.c_str(), out_path.empty() ? nullptr : out_path.c_str());
  dmcool_physical_destroy(phys);
  if (rc != DMCOOL_OK) return fail(rc);
  (void)strict;
  return kExitOk;
}

int run_darkmode_cmd(const std::string& config, const std::vector<std::string>& sets,
                     double threshold, const std::string& out_path) {
  if (config.empty()) {
    std::fprintf(stderr, "error: darkmode needs --config <file> with an [effective] section\n");
    return kExitValidation;
  }
  dmcool_effective* eff = nullptr;
  dmcool_status rc = dmcool_effective_load(config.c_str(), &eff);
  if (rc != DMCOOL_OK) return fail(rc);
  for (const auto& s : sets) {
    SetFlag flag;
    if (!parse_set(s, &flag)) {
      std::fprintf(stderr, "error: malformed --set '%s'\n", s.c_str());
      dmcool_effective_destroy(eff);
      return kExitValidation;
    }
    if ((rc = dmcool_effective_set(eff, flag.path.c_str(), flag.value)) != DMCOOL_OK) {
      dmcool_effective_destroy(eff);
      return fail(rc);
    }
  }
  rc = dmcool_dark_scan_emit_json(eff, threshold, out_path.empty() ? nullptr : out_path.c_str());
  dmcool_effective_destroy(eff);
  if (rc != DMCOOL_OK) return fail(rc);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady-state cooling simulator for multimode optomechanics"};
  app.set_version_flag("--version", dmcool_version());
  app.require_subcommand(1);

  std::string config, preset_id, out_path, format = "csv";
  std::vector<std::string> sets;
  int grid = 0, jobs = 1;
  bool strict = false, dark_scan = false, quiet = false;
  double dark_threshold = 0.0, prominence = 0.05;
  std::string peaks_column, powers_text;

  auto add_common = [&](CLI::App* cmd, bool with_format) {
    cmd->add_option("--config", config, "parameter file");
    cmd->add_option("--set", sets, "override a parameter, path=value (repeatable)");
    cmd->add_option("--out", out_path, "output file (default: stdout)");
    if (with_format)
      cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* sweep = app.add_subcommand("sweep", "evaluate a parameter sweep");
  add_common(sweep, true);
  sweep->add_option("--preset", preset_id, "bundled preset id (see 'preset list')");
  sweep->add_option("--grid", grid, "re-sample every axis to this many points");
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_flag("--strict", strict, "exit 3 when any point is unstable");
  sweep->add_flag("--dark-scan", dark_scan, "attach pairwise dark-mode diagnostics");
  sweep->add_option("--dark-threshold", dark_threshold, "dark-mode coupling threshold");
  sweep->add_option("--peaks", peaks_column, "report peak locations of this column to stderr");
  sweep->add_option("--prominence", prominence, "peak prominence fraction of the column range");
  sweep->add_flag("--quiet", quiet, "suppress progress reporting");

  CLI::App* cool = app.add_subcommand("cool", "single steady-state cooling point (JSON record)");
  add_common(cool, false);
  cool->add_flag("--strict", strict, "exit 3 when the point is unstable");

  CLI::App* meanfield =
      app.add_subcommand("meanfield", "classical steady-state amplitudes vs drive power (SI units)");
  add_common(meanfield, true);
  meanfield->add_option("--preset", preset_id, "bundled preset id (fig2)");
  meanfield->add_option("--powers", powers_text, "power grid in W, lo:hi:count or one value");

  CLI::App* darkmode = app.add_subcommand("darkmode", "pairwise hybrid-mode diagnostics (JSON)");
  add_common(darkmode, false);
  darkmode->add_option("--threshold", dark_threshold, "dark-mode coupling threshold");

  CLI::App* preset_cmd = app.add_subcommand("preset", "list or show bundled presets");
  std::string preset_action, preset_arg;
  preset_cmd->add_option("action", preset_action, "list | show")->required();
  preset_cmd->add_option("id", preset_arg, "preset id for 'show'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (sweep->parsed())
    return run_sweep_cmd(preset_id, config, sets, out_path, format, grid, jobs, strict,
                         dark_scan, dark_threshold, peaks_column, prominence, quiet);
  if (cool->parsed()) return run_cool_cmd(config, sets, out_path, strict);
  if (meanfield->parsed())
    return run_meanfield_cmd(preset_id, config, sets, powers_text, out_path, format, strict);
  if (darkmode->parsed()) return run_darkmode_cmd(config, sets, dark_threshold, out_path);
  if (preset_cmd->parsed()) {
    if (preset_action != "list" && preset_action != "show") {
      std::fprintf(stderr, "error: preset action must be 'list' or 'show'\n");
      return kExitValidation;
    }
    return run_preset(preset_action, preset_arg);
  }
  return kExitValidation;
}
