#include "aoi/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "aoi/metrics.hpp"
#include "aoi/rng.hpp"
#include "aoi/simulator.hpp"
#include "aoi/thinning_math.hpp"

namespace aoi {

namespace {

using nlohmann::json;

template <class T>
T read_field(const json& j, const char* field)
{
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(field, std::string("wrong type: ") + e.what());
    }
}

std::int64_t read_integer(const json& j, const char* field)
{
    if (!j.is_number_integer())
        throw ConfigError(field, "expected an integer");
    return j.get<std::int64_t>();
}

std::uint64_t read_seed(const json& j)
{
    if (j.is_number_unsigned())
        return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        // negative seeds keep their two's-complement bit pattern
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    throw ConfigError("seed", "expected an integer");
}

double read_real(const json& j, const char* field)
{
    if (!j.is_number())
        throw ConfigError(field, "expected a number");
    return j.get<double>();
}

template <class F>
auto parse_enum(const json& j, const char* field, F parse)
{
    if (!j.is_string())
        throw ConfigError(field, "expected a string");
    try {
        return parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
}

double parse_real(const std::string& text, const char* field)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(field, "not a number: '" + text + "'");
    }
    if (used != text.size())
        throw ConfigError(field, "not a number: '" + text + "'");
    return value;
}

std::int64_t parse_integer(const std::string& text, const char* field)
{
    std::size_t used = 0;
    long long value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(field, "not an integer: '" + text + "'");
    }
    if (used != text.size())
        throw ConfigError(field, "not an integer: '" + text + "'");
    return value;
}

// Runs body(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any task is rethrown once all workers have stopped.
template <class Body>
void parallel_for(std::size_t n, unsigned jobs, Body body)
{
    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            if (failed.load())
                return;
            std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed.store(true);
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace

void validate(const ExperimentConfig& c)
{
    if (c.sources < 1)
        throw ConfigError("sources", "must be at least 1");
    if (!(c.theta > 0.0 && c.theta <= 1.0))
        throw ConfigError("theta", "must lie in (0, 1]");
    if (c.horizon < 1)
        throw ConfigError("horizon", "must be at least 1");
    if (c.replications < 1)
        throw ConfigError("replications", "must be at least 1");
    if (c.burn_in < 0)
        throw ConfigError("burn_in", "must be non-negative");
    if (c.truncation < 0)
        throw ConfigError("truncation", "must be non-negative");

    if (c.policy == PolicyId::gsat) {
        if (!c.capacity)
            throw ConfigError("capacity", "required for policy gsat");
        if (!(*c.capacity > 0.0 && *c.capacity <= 1.0))
            throw ConfigError("capacity", "must lie in (0, 1]");
    } else if (c.capacity) {
        throw ConfigError("capacity", "only valid for policy gsat");
    }

    if (c.transmit_prob) {
        if (c.policy != PolicyId::randomized)
            throw ConfigError("transmit_prob", "only valid for policy randomized");
        if (!(*c.transmit_prob >= 0.0 && *c.transmit_prob <= 1.0))
            throw ConfigError("transmit_prob", "must lie in [0, 1]");
    }

    if (c.policy == PolicyId::aat && c.truncation != 0 &&
        c.truncation < fixed_threshold(c.sources, c.theta))
        throw ConfigError("truncation", "must not be below the fixed threshold");
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c)
{
    if (!j.is_object())
        throw ConfigError("config", "expected a JSON object");

    for (const auto& [key, value] : j.items()) {
        if (key == "policy") {
            c.policy = parse_enum(value, "policy", parse_policy);
        } else if (key == "sources" || key == "M") {
            c.sources = read_integer(value, "sources");
        } else if (key == "theta") {
            c.theta = read_real(value, "theta");
        } else if (key == "horizon" || key == "K") {
            c.horizon = read_integer(value, "horizon");
        } else if (key == "seed") {
            c.seed = read_seed(value);
        } else if (key == "replications") {
            c.replications = read_integer(value, "replications");
        } else if (key == "truncation") {
            c.truncation = read_integer(value, "truncation");
        } else if (key == "capacity") {
            if (value.is_null())
                c.capacity.reset();
            else
                c.capacity = read_real(value, "capacity");
        } else if (key == "technology") {
            c.technology = parse_enum(value, "technology", parse_technology);
        } else if (key == "load_mode") {
            c.load_mode = parse_enum(value, "load_mode", parse_load_mode);
        } else if (key == "transmit_prob") {
            if (value.is_null())
                c.transmit_prob.reset();
            else
                c.transmit_prob = read_real(value, "transmit_prob");
        } else if (key == "burn_in") {
            c.burn_in = read_integer(value, "burn_in");
        } else if (key == "out") {
            c.out = read_field<std::string>(value, "out");
        } else if (key == "jobs") {
            auto jobs = read_integer(value, "jobs");
            if (jobs < 0)
                throw ConfigError("jobs", "must be non-negative");
            c.jobs = static_cast<unsigned>(jobs);
        } else {
            throw ConfigError(key, "unknown configuration key");
        }
    }
    return c;
}

PolicyParams policy_params(const ExperimentConfig& c)
{
    PolicyParams p;
    p.id = c.policy;
    p.sources = c.sources;
    p.theta = c.theta;
    p.load_mode = c.load_mode;
    p.capacity = c.capacity.value_or(1.0);
    p.technology = c.technology;
    p.transmit_prob = c.transmit_prob;
    p.truncation = static_cast<std::size_t>(c.truncation);
    return p;
}

double bound_capacity(const ExperimentConfig& c)
{
    switch (c.policy) {
    case PolicyId::maxweight:
        return 1.0;
    case PolicyId::gsat:
        return c.capacity.value_or(1.0);
    default:
        return kCollisionChannelCapacity;
    }
}

double asymptote_for(const ExperimentConfig& c)
{
    const double load = static_cast<double>(c.sources) * c.theta;
    switch (c.policy) {
    case PolicyId::aloha:
        return asymptotic_naaoi(PolicyId::aloha, std::min(load, 1.0 / kE));
    case PolicyId::sat:
        // below the ALOHA capacity nothing is thinned and SAT is plain ALOHA
        if (load <= 1.0 / kE)
            return 1.0 / load;
        return asymptotic_naaoi(PolicyId::sat, 0.0);
    case PolicyId::gsat:
        return asymptotic_naaoi(PolicyId::gsat, c.capacity.value_or(1.0));
    default:
        return std::numeric_limits<double>::quiet_NaN();
    }
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config)
{
    validate(config);

    const auto n = static_cast<std::size_t>(config.replications);
    std::vector<RunRecord> records(n);

    RunRecord base;
    base.policy = config.policy;
    base.sources = config.sources;
    base.theta = config.theta;
    base.horizon = config.horizon;
    base.seed = config.seed;
    base.lb_arrival = lower_bound_arrival(config.sources, config.theta);
    base.lb_capacity = lower_bound_capacity(config.sources, bound_capacity(config));
    base.asymptote = asymptote_for(config);

    SimulationParams sim;
    sim.policy = policy_params(config);
    sim.horizon = config.horizon;
    sim.burn_in = config.burn_in;

    parallel_for(n, config.jobs, [&](std::size_t r) {
        const auto start = std::chrono::steady_clock::now();
        SimulationParams params = sim;
        params.seed = stream_seed(config.seed, r);
        const RunMetrics m = finalize(simulate(params), config.sources);

        RunRecord rec = base;
        rec.replication = static_cast<std::int64_t>(r);
        rec.naaoi = m.naaoi;
        rec.throughput = m.throughput;
        rec.p_success = m.p_success;
        rec.p_idle = m.p_idle;
        rec.p_collision = m.p_collision;
        rec.threshold = m.mean_threshold;
        rec.active_fraction = m.active_fraction;
        rec.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        records[r] = rec;
    });
    return records;
}

SweepAxis parse_sweep_axis(std::string_view name)
{
    if (name == "theta")
        return SweepAxis::theta;
    if (name == "M" || name == "sources")
        return SweepAxis::sources;
    if (name == "policy")
        return SweepAxis::policy;
    if (name == "capacity")
        return SweepAxis::capacity;
    throw ConfigError("sweep_axis", "unknown axis '" + std::string(name) + "'");
}

ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis, const std::string& value)
{
    ExperimentConfig c = base;
    switch (axis) {
    case SweepAxis::theta:
        c.theta = parse_real(value, "theta");
        break;
    case SweepAxis::sources:
        c.sources = parse_integer(value, "sources");
        break;
    case SweepAxis::policy:
        try {
            c.policy = parse_policy(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("policy", e.what());
        }
        // capacity and transmit_prob belong to one policy each
        if (c.policy != PolicyId::gsat)
            c.capacity.reset();
        else if (!c.capacity)
            c.capacity = 1.0;
        if (c.policy != PolicyId::randomized)
            c.transmit_prob.reset();
        break;
    case SweepAxis::capacity:
        c.capacity = parse_real(value, "capacity");
        break;
    }
    return c;
}

std::vector<RunRecord> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                 std::span<const std::string> values)
{
    if (values.empty())
        throw ConfigError("sweep_values", "must not be empty");
    // fail before any simulation starts
    std::vector<ExperimentConfig> configs;
    configs.reserve(values.size());
    for (const auto& v : values) {
        configs.push_back(apply_axis(base, axis, v));
        validate(configs.back());
    }

    std::vector<RunRecord> out;
    for (const auto& c : configs) {
        auto records = run_experiment(c);
        out.insert(out.end(), records.begin(), records.end());
    }
    return out;
}

std::string_view csv_header()
{
    return "policy,M,theta,K,seed,replication,naaoi,throughput,p_success,p_idle,p_collision,"
           "threshold,lb_arrival,lb_capacity,asymptote";
}

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string csv_row(const RunRecord& r)
{
    std::string row;
    row.reserve(160);
    row += to_string(r.policy);
    row += ',' + std::to_string(r.sources);
    row += ',' + format_number(r.theta);
    row += ',' + std::to_string(r.horizon);
    row += ',' + std::to_string(r.seed);
    row += ',' + std::to_string(r.replication);
    for (double v : {r.naaoi, r.throughput, r.p_success, r.p_idle, r.p_collision, r.threshold,
                     r.lb_arrival, r.lb_capacity, r.asymptote})
        row += ',' + format_number(v);
    return row;
}

void write_csv(std::ostream& os, std::span<const RunRecord> records)
{
    os << csv_header() << '\n';
    for (const auto& r : records)
        os << csv_row(r) << '\n';
}

nlohmann::ordered_json summary_json(std::span<const RunRecord> records)
{
    // groups keep first-appearance order
    using Key = std::tuple<PolicyId, std::int64_t, double, std::int64_t>;
    std::vector<Key> order;
    std::map<Key, std::vector<const RunRecord*>> groups;
    for (const auto& r : records) {
        Key key{r.policy, r.sources, r.theta, r.horizon};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted)
            order.push_back(key);
        it->second.push_back(&r);
    }

    auto mean_se = [](const std::vector<const RunRecord*>& rs, double RunRecord::*field) {
        const double n = static_cast<double>(rs.size());
        double sum = 0.0;
        for (const auto* r : rs)
            sum += r->*field;
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto* r : rs)
            ss += (r->*field - mean) * (r->*field - mean);
        const double se = rs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
        return std::pair{mean, se};
    };
    auto num = [](double v) -> nlohmann::ordered_json {
        if (std::isfinite(v))
            return v;
        return nullptr;
    };

    nlohmann::ordered_json groups_out = nlohmann::ordered_json::array();
    for (const auto& key : order) {
        const auto& rs = groups[key];
        const RunRecord& first = *rs.front();
        auto [naaoi, naaoi_se] = mean_se(rs, &RunRecord::naaoi);
        double wall = 0.0;
        for (const auto* r : rs)
            wall += r->wall_time;

        nlohmann::ordered_json g;
        g["policy"] = std::string(to_string(first.policy));
        g["M"] = first.sources;
        g["theta"] = first.theta;
        g["K"] = first.horizon;
        g["seed"] = first.seed;
        g["replications"] = rs.size();
        g["naaoi"] = naaoi;
        g["naaoi_se"] = naaoi_se;
        for (auto [name, field] : {std::pair{"throughput", &RunRecord::throughput},
                                   std::pair{"p_success", &RunRecord::p_success},
                                   std::pair{"p_idle", &RunRecord::p_idle},
                                   std::pair{"p_collision", &RunRecord::p_collision},
                                   std::pair{"threshold", &RunRecord::threshold},
                                   std::pair{"active_fraction", &RunRecord::active_fraction}})
            g[name] = mean_se(rs, field).first;
        g["lb_arrival"] = first.lb_arrival;
        g["lb_capacity"] = first.lb_capacity;
        g["asymptote"] = num(first.asymptote);
        g["wall_time"] = wall;
        groups_out.push_back(std::move(g));
    }
    nlohmann::ordered_json out;
    out["groups"] = std::move(groups_out);
    return out;
}

}  // namespace aoi
