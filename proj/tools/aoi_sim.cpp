// aoi-sim: seeded age-of-information experiments on a collision channel.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aoi/age_core.hpp"
#include "aoi/experiment.hpp"
#include "aoi/presets.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> policy;
    std::optional<std::int64_t> sources;
    std::optional<double> theta;
    std::optional<std::int64_t> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> replications;
    std::optional<std::int64_t> truncation;
    std::optional<double> capacity;
    std::optional<std::string> load_mode;
    std::optional<std::string> technology;
    std::optional<double> transmit_prob;
    std::optional<std::int64_t> burn_in;
    std::optional<std::string> out;
    std::optional<unsigned> jobs;
    std::optional<std::string> preset;
    std::optional<std::string> sweep_axis;
    std::vector<std::string> sweep_values;
    std::optional<std::string> summary;
};

int fail(const std::string& kind, const std::string& message, const std::string& field = {})
{
    json err{{"error", kind}, {"message", message}};
    if (!field.empty())
        err["field"] = field;
    std::cerr << err.dump() << '\n';
    return kind == "config" || kind == "usage" ? 2 : 1;
}

aoi::ExperimentConfig build_config(const Flags& f)
{
    aoi::ExperimentConfig c;
    if (f.config) {
        std::ifstream in(*f.config);
        if (!in)
            throw aoi::ConfigError("config", "cannot open '" + *f.config + "'");
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw aoi::ConfigError("config", e.what());
        }
        c = aoi::config_from_json(j, c);
    }

    // flags win over the file
    json overlay = json::object();
    if (f.policy)
        overlay["policy"] = *f.policy;
    if (f.load_mode)
        overlay["load_mode"] = *f.load_mode;
    if (f.technology)
        overlay["technology"] = *f.technology;
    c = aoi::config_from_json(overlay, c);

    if (f.sources)
        c.sources = *f.sources;
    if (f.theta)
        c.theta = *f.theta;
    if (f.horizon)
        c.horizon = *f.horizon;
    if (f.seed)
        c.seed = *f.seed;
    if (f.replications)
        c.replications = *f.replications;
    if (f.truncation)
        c.truncation = *f.truncation;
    if (f.capacity)
        c.capacity = *f.capacity;
    if (f.transmit_prob)
        c.transmit_prob = *f.transmit_prob;
    if (f.burn_in)
        c.burn_in = *f.burn_in;
    if (f.out)
        c.out = *f.out;
    if (f.jobs)
        c.jobs = *f.jobs;
    return c;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write '" + path + "'");
    return os;
}

void emit_records(const aoi::ExperimentConfig& c, const std::vector<aoi::RunRecord>& records)
{
    if (c.out.empty() || c.out == "-") {
        aoi::write_csv(std::cout, records);
    } else {
        auto os = open_output(c.out);
        aoi::write_csv(os, records);
    }
}

void emit_summary(const Flags& f, const std::vector<aoi::RunRecord>& records)
{
    if (!f.summary)
        return;
    auto os = open_output(*f.summary);
    os << aoi::summary_json(records).dump(2) << '\n';
}

int run(const Flags& f)
{
    aoi::ExperimentConfig c = build_config(f);

    if (f.preset) {
        const aoi::Preset& preset = aoi::find_preset(*f.preset);
        if (f.policy || f.sources || f.theta || f.capacity || f.sweep_axis)
            throw aoi::ConfigError("preset",
                                   "fixes policy, sources, theta and capacity; drop those flags");
        if (c.out.empty())
            c.out = preset.name + ".csv";
        // validate the shared run settings before hours of simulation
        aoi::ExperimentConfig probe = c;
        probe.policy = aoi::PolicyId::sat;
        probe.capacity.reset();
        aoi::validate(probe);

        auto result = aoi::run_preset(preset, c);
        emit_records(c, result.records);
        auto os = open_output(c.out + ".summary.csv");
        aoi::write_preset_summary(os, result.rows);
        emit_summary(f, result.records);
        return 0;
    }

    std::vector<aoi::RunRecord> records;
    if (f.sweep_axis) {
        records = aoi::run_sweep(c, aoi::parse_sweep_axis(*f.sweep_axis), f.sweep_values);
    } else {
        if (!f.sweep_values.empty())
            throw aoi::ConfigError("sweep_values", "given without --sweep-axis");
        records = aoi::run_experiment(c);
    }
    emit_records(c, records);
    emit_summary(f, records);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Seeded age-of-information experiments on a shared collision channel."};
    app.set_version_flag("--version", "aoi-sim 1.0");
    Flags f;

    app.add_option("--config", f.config, "JSON configuration file; flags override its keys");
    app.add_option("--policy", f.policy, "maxweight, aloha, aat, sat, gsat or randomized");
    app.add_option("--sources,-M", f.sources, "number of sources M");
    app.add_option("--theta", f.theta, "per-source arrival probability in (0, 1]");
    app.add_option("--horizon,-K", f.horizon, "measured slots per replication");
    app.add_option("--seed", f.seed, "64-bit experiment seed");
    app.add_option("--replications", f.replications, "independent replications");
    app.add_option("--truncation", f.truncation, "aat estimate support N (0 = 4*ceil(eM))");
    app.add_option("--capacity", f.capacity, "gsat technology throughput C");
    app.add_option("--technology", f.technology, "gsat channel access: ideal or aloha");
    app.add_option("--load-mode", f.load_mode, "backlog estimator load: clamped or raw");
    app.add_option("--transmit-prob", f.transmit_prob, "randomized transmit probability");
    app.add_option("--burn-in", f.burn_in, "unmeasured slots before the horizon");
    app.add_option("--out", f.out, "CSV output path (default stdout)");
    app.add_option("--jobs", f.jobs, "worker threads (default: hardware parallelism)");
    app.add_option("--preset", f.preset, "fig1a, fig1b, fig2a or fig2b");
    app.add_option("--sweep-axis", f.sweep_axis, "theta, M, policy or capacity");
    app.add_option("--sweep-values", f.sweep_values, "values for the sweep axis")
        ->delimiter(',');
    app.add_option("--summary", f.summary, "write per-configuration means as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }

    try {
        return run(f);
    } catch (const aoi::ConfigError& e) {
        return fail("config", e.what(), e.field());
    } catch (const aoi::SimulationIntegrityError& e) {
        return fail("integrity", e.what());
    } catch (const std::exception& e) {
        return fail("runtime", e.what());
    }
}
