#ifndef AOI_PRESETS_HPP_
#define AOI_PRESETS_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/experiment.hpp"

namespace aoi {

/// Published reference values at one arrival rate; unset where the figure
/// has no such curve.
struct ReferencePoint {
    double theta = 0.0;
    std::optional<double> naaoi;
    std::optional<double> p_success;
    std::optional<double> active_fraction;
};

struct PresetSeries {
    std::string label;
    ExperimentConfig config;  ///< theta is taken from each point
    std::vector<ReferencePoint> points;
};

struct Preset {
    std::string name;
    std::string description;
    std::vector<PresetSeries> series;
};

std::span<const std::string_view> preset_names();

/// Throws ConfigError("preset", ...) for unknown names.
const Preset& find_preset(std::string_view name);

struct PresetRow {
    std::string label;
    RunRecord mean;  ///< replication means; replication holds the count
    double naaoi_se = 0.0;
    ReferencePoint reference;
};

struct PresetResult {
    std::vector<RunRecord> records;
    std::vector<PresetRow> rows;
};

/// Runs every series of `preset`. horizon, seed, replications, burn_in and
/// jobs come from `run`; everything else from the preset.
PresetResult run_preset(const Preset& preset, const ExperimentConfig& run);

void write_preset_summary(std::ostream& os, std::span<const PresetRow> rows);

}  // namespace aoi

#endif  // AOI_PRESETS_HPP_
