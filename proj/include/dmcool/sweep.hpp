#ifndef DMCOOL_SWEEP_HPP
#define DMCOOL_SWEEP_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dmcool/config.hpp"
#include "dmcool/darkmode.hpp"
#include "dmcool/dynamics.hpp"
#include "dmcool/meanfield.hpp"

namespace dmcool {

enum class SweepKind { Cooling, MeanField };

struct SweepAxis {
  std::string path;
  std::vector<double> values;  // nonempty, strictly monotone
};

SweepAxis linspace_axis(const std::string& path, double lo, double hi, int count);

// A parameter a preset deliberately leaves unset; sweeps refuse to run until
// the user supplies it (never silently defaulted).
struct RequiredInput {
  std::string path;
  std::string note;  // documented best reading, where one exists
};

struct SweepSpec {
  SweepKind kind = SweepKind::Cooling;
  EffectiveParams effective;  // Cooling base
  PhysicalParams physical;    // MeanField base
  MeanFieldSolverConfig mf_config;
  bool zero_beta_phase = false;
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;  // Cooling only
  // Requested output columns; std::nullopt selects the full canonical set,
  // an empty list yields a header-only CSV.
  std::optional<std::vector<std::string>> outputs;
  std::string preset_id;
  std::vector<RequiredInput> required;
  bool dark_scan = false;
  double dark_threshold = kDarkThreshold;
};

// Bundled parameter presets fig2..fig7 (see docs/PRESETS.md). Values a
// preset's source does not pin are listed in `required`.
SweepSpec preset(const std::string& figure_id);
std::vector<std::string> preset_ids();
std::string preset_describe(const std::string& figure_id);

// Set a parameter on the spec's base (effective or physical depending on
// kind) and clear any matching required-input marker.
void apply_set(SweepSpec& spec, const std::string& path, double value);

// Replace every axis with a same-range linspace of `count` points.
void resize_axes(SweepSpec& spec, int count);

std::vector<RequiredInput> missing_inputs(const SweepSpec& spec);

// [sweep] section: axis1/axis2 = "path : lo : hi : count", outputs =
// comma-separated column names, dark_scan = 0/1, dark_threshold = x.
// The params come from [effective] or [physical] (exactly one must exist).
SweepSpec spec_from_config(const ConfigFile& cfg);

struct SweepRow {
  std::vector<std::optional<double>> cells;  // aligned with SweepResult::columns
  std::string dark_pairs;  // "j-k;..." (1-based), only when dark_scan
  bool evaluated = false;
  std::string error;
};

struct SweepResult {
  SweepSpec spec;                    // inputs echo
  std::vector<std::string> columns;  // axis columns first, then outputs
  std::vector<SweepRow> rows;        // axis2-major, axis1 fastest
};

// Evaluate every grid point (axis2-major row ordering). Points run on
// `jobs` worker threads for cooling sweeps; mean-field sweeps are warm-
// started and therefore sequential. Per-point failures are recorded in the
// row, never thrown. Progress goes to *progress when given.
SweepResult run_sweep(const SweepSpec& spec, int jobs = 1, std::ostream* progress = nullptr);

// Local maxima of a 1D sweep column whose topographic prominence exceeds
// prominence * (column max - column min); returns axis1 locations.
std::vector<double> find_peaks(const SweepResult& result, const std::string& column,
                               double prominence = 0.05);

enum class EmitFormat { Csv, Json };

// CSV: header row + one data row per point, 17 significant digits,
// byte-stable for identical inputs. JSON mirrors SweepResult.
void emit(const SweepResult& result, EmitFormat format, std::ostream& out);
void emit_to_file(const SweepResult& result, EmitFormat format, const std::string& path);

// Inverse of emit(Json): reproduces all values exactly.
SweepResult load_sweep_result_json(std::istream& in);

// Single-point JSON records.
std::string cooling_point_json(const EffectiveParams& p, const CoolingResult& result);
std::string dark_scan_json(const EffectiveParams& p, double threshold);

}  // namespace dmcool

#endif
