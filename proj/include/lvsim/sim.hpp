#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lvsim/mac.hpp"
#include "lvsim/metrics.hpp"
#include "lvsim/scheduling.hpp"
#include "lvsim/topology.hpp"
#include "lvsim/traffic.hpp"

namespace lvsim {

/// Everything one run needs. Defaults reproduce the reference setup:
/// 50 nodes on a 2 km square, 101-slot frames of 10 ms, 16 channels,
/// 5 MAC retries, 100-packet queues, 100 frames, 3 parents.
struct RunConfig {
    std::size_t n_nodes = 50;
    double area_side = 2000.0;
    std::size_t min_neighbors = 3;
    double min_pdr = 0.5;
    std::uint32_t slots = 101;
    std::uint32_t channels = 16;
    double slot_duration = 0.01;
    std::uint32_t max_retries = 5;
    std::size_t queue_capacity = 100;
    Algorithm algorithm = Algorithm::LocalVoting;
    OtfParams otf{};
    TrafficProfile traffic{};
    std::uint64_t horizon_frames = 100;
    std::uint64_t seed = 1;
    std::size_t parents_max = 3;
    std::size_t runs_per_sample = 500;
    bool reserve_slot0 = true;
    double housekeeping_period = 1.0;  // seconds
    RadioModel radio{};
    EnergyModel energy{};

    /// e.g. "bursty_ppb25" or "uniform_ia0.2".
    std::string scenario() const;
    DeploymentParams deployment() const;
    void validate() const;
};

struct RunHooks {
    /// Exhaustive conflict scan after every scheduling step.
    bool verify_schedule = false;
    /// Newline-delimited JSON, one object per MAC event.
    std::ostream* event_trace = nullptr;
    /// Called with ASN k * period_slots for k = 1, 2, ...
    std::function<void(Asn)> housekeeping;
    /// Replay a fixed deployment instead of generating one.
    const TopologyDocument* fixed_topology = nullptr;
};

struct RunRecord {
    std::string algorithm;
    std::string scenario;
    std::uint64_t seed = 0;
    RunAggregates aggregates;
    std::vector<FrameSample> series;
    std::uint64_t schedule_violations = 0;
    std::vector<std::string> violation_samples;
    std::uint64_t conservation_failures = 0;
    std::uint64_t housekeeping_calls = 0;
    std::size_t link_count = 0;
};

/// Topology and routing exactly as run_once would build them.
TopologyDocument build_deployment(const RunConfig& config);

/// Per frame: publish views, scheduling step, S slots with arrivals,
/// rollover, metrics. Deterministic for a given config.
RunRecord run_once(const RunConfig& config, const RunHooks& hooks = {});

struct SweepGrid {
    std::vector<Algorithm> algorithms;
    /// Bursty sweeps use packets_per_burst, uniform sweeps interarrival; an
    /// empty list keeps the base value.
    std::vector<std::uint32_t> packets_per_burst;
    std::vector<double> interarrivals;
};

struct CampaignRun {
    std::string algorithm;
    std::string scenario;
    std::size_t run_index = 0;
    std::uint64_t seed = 0;           // seed actually used (after retries)
    std::uint32_t topology_retries = 0;
    RunAggregates aggregates;
    std::vector<FrameSample> series;
};

struct MetricSummary {
    std::string name;
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> ci95;  // half-width, Student t
};

struct CampaignAggregate {
    std::string algorithm;
    std::string scenario;
    std::size_t runs = 0;
    std::vector<MetricSummary> metrics;
};

struct CampaignResult {
    bool paired = true;
    std::vector<CampaignRun> runs;             // grid-point major, run index minor
    std::vector<CampaignAggregate> aggregates; // one per grid point
};

struct CampaignOptions {
    std::size_t n_runs = 500;
    std::size_t parallelism = 1;
    /// Same seeds for every algorithm at a grid point.
    bool paired = true;
    bool keep_series = false;
    std::uint32_t max_topology_retries = 10;
    std::ostream* log = nullptr;
};

CampaignResult run_campaign(const RunConfig& base, const SweepGrid& grid, const CampaignOptions& options);

/// Named scalar metrics of a run, in the stable column order.
std::vector<std::pair<std::string, std::optional<double>>> metric_values(const RunAggregates& a);

/// Mean and 95% half-width over the present values.
MetricSummary summarize(const std::string& name, const std::vector<double>& values);

}  // namespace lvsim
