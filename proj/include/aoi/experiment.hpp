#ifndef AOI_EXPERIMENT_HPP_
#define AOI_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/policies.hpp"
#include "json.hpp"

namespace aoi {

/// Invalid experiment description; field() names the offending parameter.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ExperimentConfig {
    PolicyId policy = PolicyId::sat;
    std::int64_t sources = 500;
    double theta = 1.0;
    std::int64_t horizon = 1'000'000;
    std::uint64_t seed = 1;
    std::int64_t replications = 5;
    std::int64_t truncation = 0;  ///< aat estimate support; 0 = 4 * ceil(eM)
    std::optional<double> capacity;  ///< gsat only
    Technology technology = Technology::idealized;  ///< gsat only
    LoadMode load_mode = LoadMode::clamped;
    std::optional<double> transmit_prob;  ///< randomized only; default 1/M
    std::int64_t burn_in = 0;
    std::string out;
    unsigned jobs = 0;  ///< worker threads; 0 = hardware concurrency
};

/// Throws ConfigError naming the first invalid field.
void validate(const ExperimentConfig& config);

/// Overlays the keys present in `j` on `base`. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

PolicyParams policy_params(const ExperimentConfig& config);

/// One replication's results plus the analytical companions for plotting.
struct RunRecord {
    PolicyId policy = PolicyId::sat;
    std::int64_t sources = 0;
    double theta = 0.0;
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
    std::int64_t replication = 0;

    double naaoi = 0.0;
    double throughput = 0.0;
    double p_success = 0.0;
    double p_idle = 0.0;
    double p_collision = 0.0;
    double threshold = 0.0;  ///< fixed threshold, mean adaptive threshold, or 0
    double active_fraction = 0.0;

    double lb_arrival = 0.0;
    double lb_capacity = 0.0;
    double asymptote = 0.0;  ///< NaN when no limit is known for the policy

    double wall_time = 0.0;  ///< seconds; excluded from the CSV
};

/// Sum throughput used for the capacity lower bound of this configuration.
double bound_capacity(const ExperimentConfig& config);

/// Large-M NAAoI companion for this configuration, NaN if none applies.
double asymptote_for(const ExperimentConfig& config);

/// Runs every replication of `config`; record r uses stream_seed(seed, r).
/// Records are returned in replication order regardless of scheduling.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

enum class SweepAxis { theta, sources, policy, capacity };
SweepAxis parse_sweep_axis(std::string_view name);

/// Applies one sweep value to a copy of `base`.
ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis, const std::string& value);

/// run_experiment for each value in turn, concatenated.
std::vector<RunRecord> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                 std::span<const std::string> values);

std::string_view csv_header();
std::string csv_row(const RunRecord& record);
void write_csv(std::ostream& os, std::span<const RunRecord> records);

/// Formats a value with six significant digits, "nan" for NaN.
std::string format_number(double value);

/// Per-configuration means and standard errors over replications.
nlohmann::ordered_json summary_json(std::span<const RunRecord> records);

}  // namespace aoi

#endif  // AOI_EXPERIMENT_HPP_
