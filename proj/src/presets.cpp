#include "aoi/presets.hpp"

#include <array>
#include <cmath>
#include <ostream>

namespace aoi {

namespace {

struct Coord {
    double x;
    double y;
};

// Reference curves as published, (theta, value).
constexpr Coord kFig1aAat500[] = {
    {0.002, 1.6643}, {0.05, 1.4013}, {0.1, 1.3875}, {0.15, 1.3898}, {0.2, 1.3887},
    {0.25, 1.3813}, {0.3, 1.3832}, {0.35, 1.3847}, {0.4, 1.3866}, {0.45, 1.3804}, {0.5, 1.3800},
    {0.55, 1.3827}, {0.6, 1.3768}, {0.65, 1.3764}, {0.7, 1.3776}, {0.75, 1.3638}, {0.8, 1.3616},
    {0.85, 1.3621}, {0.9, 1.3397}, {0.95, 1.2345}, {1, 1.0578}
};
constexpr Coord kFig1aSat500[] = {
    {0.002, 1.6983}, {0.05, 1.4410}, {0.1, 1.4293}, {0.15, 1.4301}, {0.2, 1.4279},
    {0.25, 1.4261}, {0.3, 1.4255}, {0.35, 1.4247}, {0.4, 1.4248}, {0.45, 1.4211}, {0.5, 1.4256},
    {0.55, 1.4219}, {0.6, 1.4232}, {0.65, 1.4212}, {0.7, 1.4221}, {0.75, 1.4216}, {0.8, 1.4158},
    {0.85, 1.4176}, {0.9, 1.4058}, {0.95, 1.3847}, {1, 1.3590}
};
constexpr Coord kFig1aAat100[] = {
    {0.01, 1.8157}, {0.05, 1.4716}, {0.1, 1.4553}, {0.15, 1.4370}, {0.2, 1.4159}, {0.25, 1.4110},
    {0.3, 1.4035}, {0.35, 1.4066}, {0.4, 1.4076}, {0.45, 1.4015}, {0.5, 1.4044}, {0.55, 1.4008},
    {0.6, 1.3889}, {0.65, 1.3780}, {0.7, 1.3782}, {0.75, 1.3672}, {0.8, 1.3633}, {0.85, 1.3657},
    {0.9, 1.3439}, {0.95, 1.2770}, {1, 1.0633}
};
constexpr Coord kFig1aSat100[] = {
    {0.01, 1.7277}, {0.05, 1.4947}, {0.1, 1.4706}, {0.15, 1.4637}, {0.2, 1.4522}, {0.25, 1.4514},
    {0.3, 1.4474}, {0.35, 1.4430}, {0.4, 1.4414}, {0.45, 1.4403}, {0.5, 1.4347}, {0.55, 1.4375},
    {0.6, 1.4420}, {0.65, 1.4317}, {0.7, 1.4259}, {0.75, 1.4324}, {0.8, 1.4237}, {0.85, 1.4208},
    {0.9, 1.4095}, {0.95, 1.3922}, {1, 1.3675}
};
constexpr Coord kFig1aAat50[] = {
    {0.02, 1.8459}, {0.05, 1.5713}, {0.1, 1.5012}, {0.15, 1.4866}, {0.2, 1.4533}, {0.25, 1.4425},
    {0.3, 1.4368}, {0.35, 1.4347}, {0.4, 1.4345}, {0.45, 1.4339}, {0.5, 1.4276}, {0.55, 1.4168},
    {0.6, 1.4141}, {0.65, 1.4172}, {0.7, 1.4180}, {0.75, 1.3953}, {0.8, 1.3844}, {0.85, 1.3738},
    {0.9, 1.3463}, {0.95, 1.2945}, {1, 1.0721}
};
constexpr Coord kFig1aSat50[] = {
    {0.02, 1.8286}, {0.05, 1.5842}, {0.1, 1.5069}, {0.15, 1.4967}, {0.2, 1.4870}, {0.25, 1.4806},
    {0.3, 1.4730}, {0.35, 1.4824}, {0.4, 1.4711}, {0.45, 1.4622}, {0.5, 1.4599}, {0.55, 1.4598},
    {0.6, 1.4512}, {0.65, 1.4500}, {0.7, 1.4442}, {0.75, 1.4444}, {0.8, 1.4350}, {0.85, 1.4267},
    {0.9, 1.4087}, {0.95, 1.3919}, {1, 1.3584}
};
constexpr Coord kFig1bSuccess[] = {
    {0.95, 0.3700}, {0.955, 0.3804}, {0.96, 0.3829}, {0.965, 0.3863}, {0.97, 0.3863},
    {0.975, 0.3900}, {0.98, 0.4045}, {0.985, 0.4127}, {0.99, 0.4229}, {0.995, 0.4505},
    {1, 0.4778}
};
constexpr Coord kFig1bActive[] = {
    {0.95, 0.0222}, {0.955, 0.0215}, {0.96, 0.0219}, {0.965, 0.0216}, {0.97, 0.0226},
    {0.975, 0.0218}, {0.98, 0.0215}, {0.985, 0.0217}, {0.99, 0.0216}, {0.995, 0.0223},
    {1, 0.0221}
};
constexpr Coord kFig2aAloha[] = {
    {0.002, 2.9296}, {0.05, 2.7164}, {0.1, 2.7187}, {0.15, 2.7128}, {0.2, 2.7136},
    {0.25, 2.7136}, {0.3, 2.7201}, {0.35, 2.7127}, {0.4, 2.7172}, {0.45, 2.7104}, {0.5, 2.7179},
    {0.55, 2.7106}, {0.6, 2.7174}, {0.65, 2.7168}, {0.7, 2.7160}, {0.75, 2.7160}, {0.8, 2.7131},
    {0.85, 2.7147}, {0.9, 2.7176}, {0.95, 2.7170}, {1, 2.7134}
};
constexpr Coord kFig2aRandomized[] = {
    {0.002, 2.7138}, {0.05, 2.7149}, {0.1, 2.7149}, {0.15, 2.7103}, {0.2, 2.7129},
    {0.25, 2.7083}, {0.3, 2.7164}, {0.35, 2.7149}, {0.4, 2.7158}, {0.45, 2.7156}, {0.5, 2.7122},
    {0.55, 2.7143}, {0.6, 2.7145}, {0.65, 2.7151}, {0.7, 2.7103}, {0.75, 2.7157}, {0.8, 2.7141},
    {0.85, 2.7139}, {0.9, 2.7136}, {0.95, 2.7122}, {1, 2.7163}
};
constexpr Coord kFig2aSat[] = {
    {0.002, 1.6983}, {0.05, 1.4410}, {0.1, 1.4293}, {0.15, 1.4301}, {0.2, 1.4279},
    {0.25, 1.4261}, {0.3, 1.4255}, {0.35, 1.4247}, {0.4, 1.4248}, {0.45, 1.4211}, {0.5, 1.4256},
    {0.55, 1.4219}, {0.6, 1.4232}, {0.65, 1.4212}, {0.7, 1.4221}, {0.75, 1.4216}, {0.8, 1.4158},
    {0.85, 1.4176}, {0.9, 1.4058}, {0.95, 1.3847}, {1, 1.3590}
};
constexpr Coord kFig2aAat[] = {
    {0.002, 1.6643}, {0.05, 1.4013}, {0.1, 1.3875}, {0.15, 1.3898}, {0.2, 1.3887},
    {0.25, 1.3813}, {0.3, 1.3832}, {0.35, 1.3847}, {0.4, 1.3866}, {0.45, 1.3804}, {0.5, 1.3800},
    {0.55, 1.3827}, {0.6, 1.3768}, {0.65, 1.3784}, {0.7, 1.3776}, {0.75, 1.3738}, {0.8, 1.3616},
    {0.85, 1.3621}, {0.9, 1.3397}, {0.95, 1.2345}, {1, 1.0778}
};
constexpr Coord kFig2aMaxWeight[] = {
    {0.002, 1.0064}, {0.05, 0.5023}, {0.1, 0.5013}, {0.15, 0.5008}, {0.2, 0.5005},
    {0.25, 0.5002}, {0.3, 0.5000}, {0.35, 0.4999}, {0.4, 0.4998}, {0.45, 0.4996}, {0.5, 0.4995},
    {0.55, 0.4995}, {0.6, 0.4994}, {0.65, 0.4993}, {0.7, 0.4992}, {0.75, 0.4992}, {0.8, 0.4991},
    {0.85, 0.4991}, {0.9, 0.4991}, {0.95, 0.4990}, {1, 0.4989}
};
constexpr Coord kFig2aGsat[] = {
    {0.002, 1.0615}, {0.05, 0.5496}, {0.1, 0.5402}, {0.15, 0.5363}, {0.2, 0.5344},
    {0.25, 0.5331}, {0.3, 0.5319}, {0.35, 0.5314}, {0.4, 0.5307}, {0.45, 0.5302}, {0.5, 0.5301},
    {0.55, 0.5298}, {0.6, 0.5295}, {0.65, 0.5293}, {0.7, 0.5291}, {0.75, 0.5289}, {0.8, 0.5287},
    {0.85, 0.5285}, {0.9, 0.5284}, {0.95, 0.5283}, {1, 0.5283}
};
constexpr Coord kFig2bAloha[] = {
    {0.00024525, 8.1214}, {0.00049051, 4.0774}, {0.00073576, 2.7455}, {0.00098101, 2.7449},
    {0.0012, 2.8376}, {0.0015, 3.0772}, {0.0017, 3.0116}, {0.0020, 2.9296}
};
constexpr Coord kFig2bRandomized[] = {
    {0.00024525, 8.1549}, {0.00049051, 4.0535}, {0.00073576, 3.0025}, {0.00098101, 2.7303},
    {0.0012, 2.7340}, {0.0015, 2.7162}, {0.0017, 2.7171}, {0.0020, 2.7138}
};
constexpr Coord kFig2bSat[] = {
    {0.00024525, 8.1549}, {0.00049051, 4.0774}, {0.00073576, 2.7268}, {0.00098101, 2.2161},
    {0.0012, 1.9514}, {0.0015, 1.8038}, {0.0017, 1.7406}, {0.0020, 1.6983}
};
constexpr Coord kFig2bAat[] = {
    {0.00024525, 8.1549}, {0.00049051, 4.0774}, {0.00073576, 2.7263}, {0.00098101, 2.5984},
    {0.0012, 2.2805}, {0.0015, 1.9658}, {0.0017, 1.7867}, {0.0020, 1.6643}
};
constexpr Coord kFig2bMaxWeight[] = {
    {0.00024525, 8.1549}, {0.00049051, 4.0774}, {0.00073576, 2.7199}, {0.00098101, 2.0741},
    {0.0012, 1.6681}, {0.0015, 1.3419}, {0.0017, 1.1152}, {0.0020, 1.0174}
};
constexpr Coord kFig2bGsat[] = {
    {0.00024525, 8.0899}, {0.00049051, 4.0490}, {0.00073576, 2.7305}, {0.00098101, 2.0512},
    {0.0012, 1.6822}, {0.0015, 1.3552}, {0.0017, 1.2051}, {0.0020, 1.0615}
};

constexpr std::array<std::string_view, 4> kNames = {"fig1a", "fig1b", "fig2a", "fig2b"};

ExperimentConfig series_config(PolicyId policy, std::int64_t sources)
{
    ExperimentConfig c;
    c.policy = policy;
    c.sources = sources;
    if (policy == PolicyId::gsat) {
        c.capacity = 1.0;
        c.technology = Technology::idealized;
    }
    return c;
}

std::vector<ReferencePoint> naaoi_points(std::span<const Coord> coords)
{
    std::vector<ReferencePoint> points;
    for (const auto& c : coords) {
        ReferencePoint p;
        p.theta = c.x;
        p.naaoi = c.y;
        points.push_back(p);
    }
    return points;
}

PresetSeries naaoi_series(std::string label, PolicyId policy, std::int64_t sources,
                          std::span<const Coord> coords)
{
    return {std::move(label), series_config(policy, sources), naaoi_points(coords)};
}

std::vector<Preset> build_presets()
{
    std::vector<Preset> presets;

    presets.push_back({"fig1a",
                       "SAT and AAT NAAoI versus theta for M in {500, 100, 50}",
                       {naaoi_series("aat-M500", PolicyId::aat, 500, kFig1aAat500),
                        naaoi_series("sat-M500", PolicyId::sat, 500, kFig1aSat500),
                        naaoi_series("aat-M100", PolicyId::aat, 100, kFig1aAat100),
                        naaoi_series("sat-M100", PolicyId::sat, 100, kFig1aSat100),
                        naaoi_series("aat-M50", PolicyId::aat, 50, kFig1aAat50),
                        naaoi_series("sat-M50", PolicyId::sat, 50, kFig1aSat50)}});

    PresetSeries operating{"aat-M500", series_config(PolicyId::aat, 500), {}};
    for (std::size_t i = 0; i < std::size(kFig1bSuccess); ++i) {
        ReferencePoint p;
        p.theta = kFig1bSuccess[i].x;
        p.p_success = kFig1bSuccess[i].y;
        for (const auto& a : kFig1bActive)
            if (a.x == p.theta)
                p.active_fraction = a.y;
        operating.points.push_back(p);
    }
    presets.push_back({"fig1b",
                       "AAT success probability and active fraction, M=500, theta in [0.95, 1]",
                       {operating}});

    presets.push_back({"fig2a",
                       "NAAoI of every policy versus theta, M=500",
                       {naaoi_series("aloha", PolicyId::aloha, 500, kFig2aAloha),
                        naaoi_series("randomized", PolicyId::randomized, 500, kFig2aRandomized),
                        naaoi_series("sat", PolicyId::sat, 500, kFig2aSat),
                        naaoi_series("aat", PolicyId::aat, 500, kFig2aAat),
                        naaoi_series("gsat-csma", PolicyId::gsat, 500, kFig2aGsat),
                        naaoi_series("maxweight", PolicyId::maxweight, 500, kFig2aMaxWeight)}});

    presets.push_back({"fig2b",
                       "NAAoI of every policy at low load, M=500",
                       {naaoi_series("aloha", PolicyId::aloha, 500, kFig2bAloha),
                        naaoi_series("randomized", PolicyId::randomized, 500, kFig2bRandomized),
                        naaoi_series("sat", PolicyId::sat, 500, kFig2bSat),
                        naaoi_series("aat", PolicyId::aat, 500, kFig2bAat),
                        naaoi_series("gsat-csma", PolicyId::gsat, 500, kFig2bGsat),
                        naaoi_series("maxweight", PolicyId::maxweight, 500, kFig2bMaxWeight)}});
    return presets;
}

const std::vector<Preset>& all_presets()
{
    static const std::vector<Preset> presets = build_presets();
    return presets;
}

std::string optional_number(const std::optional<double>& v)
{
    return v ? format_number(*v) : std::string();
}

}  // namespace

std::span<const std::string_view> preset_names()
{
    return kNames;
}

const Preset& find_preset(std::string_view name)
{
    for (const auto& p : all_presets())
        if (p.name == name)
            return p;
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

PresetResult run_preset(const Preset& preset, const ExperimentConfig& run)
{
    PresetResult result;
    for (const auto& series : preset.series) {
        for (const auto& point : series.points) {
            ExperimentConfig c = series.config;
            c.theta = point.theta;
            c.horizon = run.horizon;
            c.seed = run.seed;
            c.replications = run.replications;
            c.burn_in = run.burn_in;
            c.jobs = run.jobs;

            auto records = run_experiment(c);

            PresetRow row;
            row.label = series.label;
            row.reference = point;
            row.mean = records.front();
            row.mean.replication = static_cast<std::int64_t>(records.size());
            const double n = static_cast<double>(records.size());
            for (double RunRecord::*f :
                 {&RunRecord::naaoi, &RunRecord::throughput, &RunRecord::p_success,
                  &RunRecord::p_idle, &RunRecord::p_collision, &RunRecord::threshold,
                  &RunRecord::active_fraction, &RunRecord::wall_time}) {
                double sum = 0.0;
                for (const auto& r : records)
                    sum += r.*f;
                row.mean.*f = sum / n;
            }
            double ss = 0.0;
            for (const auto& r : records)
                ss += (r.naaoi - row.mean.naaoi) * (r.naaoi - row.mean.naaoi);
            row.naaoi_se = records.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;

            result.rows.push_back(row);
            result.records.insert(result.records.end(), records.begin(), records.end());
        }
    }
    return result;
}

void write_preset_summary(std::ostream& os, std::span<const PresetRow> rows)
{
    os << "series,policy,M,theta,K,replications,naaoi,naaoi_se,ref_naaoi,p_success,"
          "ref_p_success,active_fraction,ref_active_fraction,threshold,lb_arrival,"
          "lb_capacity,asymptote\n";
    for (const auto& row : rows) {
        const RunRecord& m = row.mean;
        os << row.label << ',' << to_string(m.policy) << ',' << m.sources << ','
           << format_number(m.theta) << ',' << m.horizon << ',' << m.replication << ','
           << format_number(m.naaoi) << ',' << format_number(row.naaoi_se) << ','
           << optional_number(row.reference.naaoi) << ',' << format_number(m.p_success) << ','
           << optional_number(row.reference.p_success) << ','
           << format_number(m.active_fraction) << ','
           << optional_number(row.reference.active_fraction) << ','
           << format_number(m.threshold) << ',' << format_number(m.lb_arrival) << ','
           << format_number(m.lb_capacity) << ',' << format_number(m.asymptote) << '\n';
    }
}

}  // namespace aoi
