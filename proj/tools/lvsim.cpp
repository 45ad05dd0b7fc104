// Command-line front end: `lvsim run` for one configuration, `lvsim campaign`
// for a sweep over algorithms and traffic intensities.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lvsim/config.hpp"
#include "lvsim/report.hpp"
#include "lvsim/sim.hpp"

namespace fs = std::filesystem;
using namespace lvsim;

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::size_t> nodes;
    std::optional<double> area_side;
    std::optional<std::uint32_t> slots;
    std::optional<std::uint32_t> channels;
    std::optional<std::string> algorithm;
    std::optional<std::uint32_t> threshold;
    std::optional<std::uint32_t> packets_per_burst;
    std::optional<double> interarrival;
    std::optional<std::string> traffic;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> horizon;
    std::optional<std::size_t> parents;
};

void add_overrides(CLI::App& app, Overrides& o) {
    app.add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--nodes", o.nodes, "Number of nodes including the sink");
    app.add_option("--area-side", o.area_side, "Side of the square deployment area [m]");
    app.add_option("--slotframe-size", o.slots, "Slots per slotframe");
    app.add_option("--channels", o.channels, "Channel offsets");
    app.add_option("--algorithm", o.algorithm, "local_voting | local_voting_z | otf | eotf");
    app.add_option("--threshold", o.threshold, "OTF / E-OTF hysteresis threshold [cells]");
    app.add_option("--packets-per-burst", o.packets_per_burst, "Packets per node per burst");
    app.add_option("--interarrival", o.interarrival, "Mean uniform interarrival [s]");
    app.add_option("--traffic", o.traffic, "bursty | uniform");
    app.add_option("--seed", o.seed, "Base seed");
    app.add_option("--horizon", o.horizon, "Frames per run");
    app.add_option("--parents", o.parents, "Maximum routing parents");
}

RunConfig resolve(const Overrides& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config_file(o.config_path);
    if (o.nodes) c.n_nodes = *o.nodes;
    if (o.area_side) c.area_side = *o.area_side;
    if (o.slots) c.slots = *o.slots;
    if (o.channels) c.channels = *o.channels;
    if (o.algorithm) c.algorithm = parse_algorithm(*o.algorithm);
    if (o.threshold) c.otf.threshold = *o.threshold;
    if (o.traffic) c.traffic.mode = parse_traffic_mode(*o.traffic);
    if (o.packets_per_burst) c.traffic.packets_per_burst = *o.packets_per_burst;
    if (o.interarrival) c.traffic.interarrival = *o.interarrival;
    if (o.seed) c.seed = *o.seed;
    if (o.horizon) c.horizon_frames = *o.horizon;
    if (o.parents) c.parents_max = *o.parents;
    c.validate();
    return c;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::string series_name(const std::string& alg, const std::string& scenario, std::size_t run) {
    return "timeseries_" + alg + "_" + scenario + "_r" + std::to_string(run) + ".csv";
}

int cmd_run(const Overrides& o, const std::string& out_dir, bool trace, const std::string& event_trace,
            const std::string& topology_in, const std::string& topology_out, bool verify) {
    const RunConfig c = resolve(o);
    fs::create_directories(out_dir);

    std::optional<TopologyDocument> fixed;
    if (!topology_in.empty()) fixed = load_topology_json(topology_in);
    if (!topology_out.empty()) {
        const TopologyDocument doc = fixed ? *fixed : build_deployment(c);
        save_topology_json(topology_out, doc.topology, doc.routing ? &*doc.routing : nullptr);
    }

    RunHooks hooks;
    hooks.verify_schedule = verify;
    hooks.fixed_topology = fixed ? &*fixed : nullptr;
    std::ofstream events;
    if (!event_trace.empty()) {
        events = open_out(event_trace);
        hooks.event_trace = &events;
    }
    const RunRecord rec = run_once(c, hooks);

    auto agg = open_out(fs::path(out_dir) / "aggregates.csv");
    write_aggregates_header(agg);
    write_aggregates_row(agg, rec.algorithm, rec.scenario, rec.seed, 0, rec.aggregates);
    if (trace) {
        auto ts = open_out(fs::path(out_dir) / series_name(rec.algorithm, rec.scenario, 0));
        write_timeseries(ts, rec.series);
    }
    auto meta = open_out(fs::path(out_dir) / "metadata.json");
    meta << nlohmann::json{{"config", config_to_json(c)},
                           {"links", rec.link_count},
                           {"housekeeping_calls", rec.housekeeping_calls},
                           {"schedule_violations", rec.schedule_violations},
                           {"conservation_failures", rec.conservation_failures}}
                .dump(2)
         << '\n';

    for (const auto& [name, v] : metric_values(rec.aggregates))
        std::cout << name << " = " << (v ? format_value(v) : "n/a") << '\n';
    if (verify) std::cout << "schedule_violations = " << rec.schedule_violations << '\n';
    return rec.schedule_violations == 0 && rec.conservation_failures == 0 ? 0 : 2;
}

int cmd_campaign(const Overrides& o, const std::string& out_dir, bool trace, std::size_t runs,
                 std::size_t parallelism, const std::vector<std::string>& algorithms,
                 const std::vector<std::uint32_t>& ppb, const std::vector<double>& ia) {
    const RunConfig base = resolve(o);
    SweepGrid grid;
    for (const auto& a : algorithms) grid.algorithms.push_back(parse_algorithm(a));
    grid.packets_per_burst = ppb;
    grid.interarrivals = ia;
    CampaignOptions opts;
    opts.n_runs = runs == 0 ? base.runs_per_sample : runs;
    opts.parallelism = parallelism;
    opts.keep_series = trace;
    opts.log = &std::cerr;

    const CampaignResult res = run_campaign(base, grid, opts);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    {
        auto out = open_out(dir / "aggregates.csv");
        write_aggregates_header(out);
        for (const auto& r : res.runs)
            write_aggregates_row(out, r.algorithm, r.scenario, r.seed, r.run_index, r.aggregates);
    }
    {
        auto out = open_out(dir / "summary.csv");
        write_summary(out, res);
    }
    {
        auto out = open_out(dir / "long.csv");
        write_long(out, res);
    }
    {
        auto out = open_out(dir / "paired.csv");
        write_paired(out, res);
    }
    {
        auto out = open_out(dir / "metadata.json");
        auto meta = campaign_metadata(base, grid, opts);
        nlohmann::json retried = nlohmann::json::array();
        for (const auto& r : res.runs)
            if (r.topology_retries > 0)
                retried.push_back({{"algorithm", r.algorithm},
                                   {"scenario", r.scenario},
                                   {"run_index", r.run_index},
                                   {"seed", r.seed},
                                   {"retries", r.topology_retries}});
        meta["topology_retries"] = retried;
        out << meta.dump(2) << '\n';
    }
    if (trace)
        for (const auto& r : res.runs) {
            auto out = open_out(dir / series_name(r.algorithm, r.scenario, r.run_index));
            write_timeseries(out, r.series);
        }

    for (const auto& a : res.aggregates) {
        std::cout << a.algorithm << ' ' << a.scenario;
        for (const auto& m : a.metrics)
            if (m.name == "last_packet_time" || m.name == "reliability" || m.name == "charge_total" ||
                m.name == "jain_load_avg")
                std::cout << ' ' << m.name << '=' << (m.n ? format_value(m.mean) : "n/a");
        std::cout << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slotframe scheduling simulator: Local Voting, Local Voting z, OTF, E-OTF"};
    app.require_subcommand(1);

    Overrides run_o;
    std::string run_out = "out";
    bool run_trace = false;
    bool verify = false;
    std::string event_trace;
    std::string topology_in;
    std::string topology_out;
    auto* run = app.add_subcommand("run", "Run one configuration");
    add_overrides(*run, run_o);
    run->add_option("--out", run_out, "Output directory");
    run->add_flag("--trace", run_trace, "Write the per-frame time series");
    run->add_option("--event-trace", event_trace, "Write every MAC event as NDJSON");
    run->add_option("--topology-json", topology_in, "Replay a saved deployment")->check(CLI::ExistingFile);
    run->add_option("--save-topology", topology_out, "Save the deployment used by this run");
    run->add_flag("--verify", verify, "Scan the schedule for conflicts after every frame");

    Overrides camp_o;
    std::string camp_out = "out";
    bool camp_trace = false;
    std::size_t runs = 0;
    std::size_t parallelism = 1;
    std::vector<std::string> algorithms{"local_voting", "local_voting_z", "otf", "eotf"};
    std::vector<std::uint32_t> ppb;
    std::vector<double> ia;
    auto* camp = app.add_subcommand("campaign", "Sweep algorithms and traffic intensities");
    add_overrides(*camp, camp_o);
    camp->add_option("--out", camp_out, "Output directory");
    camp->add_flag("--trace", camp_trace, "Write one time series per run");
    camp->add_option("--runs", runs, "Runs per grid point (default from config)");
    camp->add_option("--parallelism", parallelism, "Worker threads");
    camp->add_option("--algorithms", algorithms, "Algorithms to compare")->delimiter(',');
    camp->add_option("--ppb-grid", ppb, "packets_per_burst sweep (bursty)")->delimiter(',');
    camp->add_option("--ia-grid", ia, "interarrival sweep (uniform)")->delimiter(',');

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(run_o, run_out, run_trace, event_trace, topology_in, topology_out, verify);
        return cmd_campaign(camp_o, camp_out, camp_trace, runs, parallelism, algorithms, ppb, ia);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
