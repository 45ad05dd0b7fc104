#include "lvsim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "lvsim/schedule.hpp"

namespace lvsim {

std::string RunConfig::scenario() const {
    char buf[64];
    if (traffic.mode == TrafficMode::Bursty)
        std::snprintf(buf, sizeof buf, "bursty_ppb%u", traffic.packets_per_burst);
    else
        std::snprintf(buf, sizeof buf, "uniform_ia%g", traffic.interarrival);
    return buf;
}

DeploymentParams RunConfig::deployment() const {
    DeploymentParams d;
    d.n_nodes = n_nodes;
    d.area_side = area_side;
    d.min_neighbors = min_neighbors;
    d.min_pdr = min_pdr;
    d.radio = radio;
    return d;
}

void RunConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(what);
    };
    require(n_nodes >= 2, "nodes must be >= 2");
    require(area_side > 0.0, "area_side must be positive");
    require(min_pdr > 0.0 && min_pdr <= 1.0, "min_pdr must be in (0, 1]");
    require(slots >= 1 && (!reserve_slot0 || slots >= 2), "slotframe too short");
    require(channels >= 1, "channels must be >= 1");
    require(slot_duration > 0.0, "slot_duration must be positive");
    require(queue_capacity >= 1, "queue_capacity must be >= 1");
    require(parents_max >= 1, "parents must be >= 1");
    require(otf.ewma_alpha > 0.0 && otf.ewma_alpha <= 1.0, "ewma_alpha must be in (0, 1]");
    require(otf.backlog_drain_frames >= 1, "backlog_drain_frames must be >= 1");
    require(housekeeping_period > 0.0, "housekeeping_period must be positive");
    energy.validate();
}

namespace {

void write_event(std::ostream& out, const MacEvent& e, const ConflictSets& links, std::uint32_t channels) {
    const Link& l = links.link(e.link);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "{\"asn\":%llu,\"slot\":%u,\"channel_offset\":%u,\"channel\":%u,\"tx\":%u,\"rx\":%u,"
                  "\"event\":\"%s\",\"packet\":%llu,\"origin\":%u,\"retries\":%u}\n",
                  static_cast<unsigned long long>(e.asn.value), e.cell.slot_offset, e.cell.channel_offset,
                  physical_channel(e.cell, e.asn, channels), l.tx.value, l.rx.value, to_string(e.kind),
                  static_cast<unsigned long long>(e.packet.id), e.packet.origin.value,
                  e.packet.mac_retries_used);
    out << buf;
}

}  // namespace

TopologyDocument build_deployment(const RunConfig& config) {
    TopologyDocument doc{generate_topology(config.deployment(), derive_seed(config.seed, 0, "topology")),
                         std::nullopt};
    doc.routing = build_routing(doc.topology, config.parents_max, derive_seed(config.seed, 0, "routing"),
                                config.min_pdr);
    return doc;
}

RunRecord run_once(const RunConfig& config, const RunHooks& hooks) {
    config.validate();
    TopologyDocument doc;
    if (hooks.fixed_topology != nullptr) {
        doc = *hooks.fixed_topology;
        if (!doc.routing)
            doc.routing = build_routing(doc.topology, config.parents_max,
                                        derive_seed(config.seed, 0, "routing"), config.min_pdr);
    } else {
        doc = build_deployment(config);
    }
    const Topology& topo = doc.topology;
    const RoutingTree& routing = *doc.routing;
    const std::size_t n = topo.size();

    const ConflictSets conflicts(topo, routing_links(routing));
    Slotframe frame(config.slots, config.channels, conflicts, config.reserve_slot0);
    MacEngine mac(topo, routing, conflicts, {config.max_retries, config.queue_capacity});
    auto sf = make_scheduling_function(config.algorithm, config.otf);
    TrafficGenerator traffic(config.traffic, n, config.slot_duration,
                             Rng(derive_seed(config.seed, 0, "traffic")));
    MetricsCollector metrics(n, config.slot_duration, config.energy);
    Rng mac_rng(derive_seed(config.seed, 0, "mac"));
    Rng sixtop_rng(derive_seed(config.seed, 0, "sixtop"));

    RunRecord rec;
    rec.algorithm = std::string(to_string(config.algorithm));
    rec.scenario = config.scenario();
    rec.seed = config.seed;
    rec.link_count = conflicts.link_count();

    const auto period_slots = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::llround(config.housekeeping_period / config.slot_duration)));
    std::vector<LinkSnapshot> snap(conflicts.link_count());
    std::vector<double> loads;

    for (std::uint64_t f = 0; f < config.horizon_frames; ++f) {
        mac.begin_frame();

        // 1. publish
        for (LinkIndex l = 0; l < snap.size(); ++l) {
            const LinkState& s = mac.state(l);
            const Link& link = conflicts.link(l);
            snap[l] = {s.q(), s.z_last, frame.allocation_count(l), topo.pdr(link.tx, link.rx)};
        }
        const auto views = publish_views(snap, conflicts);

        // 2. scheduling function through 6top
        const FrameInputs in{snap, conflicts, views, config.slots, config.channels};
        const auto wanted = sf->decide(in);
        for (LinkIndex l = 0; l < snap.size(); ++l) mac.state(l).u_last = 0;
        for (const auto& g : apply_deltas(frame, wanted, sixtop_rng))
            mac.state(g.link).u_last = static_cast<std::int32_t>(g.delta);
        if (hooks.verify_schedule) {
            const auto bad = find_violations(frame, topo);
            rec.schedule_violations += bad.size();
            for (const auto& v : bad)
                if (rec.violation_samples.size() < 10) rec.violation_samples.push_back(to_string(v));
        }

        // 3. slots
        for (std::uint32_t t = 0; t < config.slots; ++t) {
            const Asn asn{f * config.slots + t};
            for (std::uint32_t v = 1; v < n; ++v) {
                const std::uint32_t k = traffic.arrivals_for_slot(NodeId{v}, asn);
                for (std::uint32_t i = 0; i < k; ++i) mac.generate(NodeId{v}, asn);
            }
            for (const MacEvent& e : mac.execute_slot(asn, frame, mac_rng)) {
                if (e.kind == MacEvent::Kind::Delivered) metrics.on_delivery(e.packet, asn);
                if (hooks.event_trace != nullptr) write_event(*hooks.event_trace, e, conflicts, config.channels);
            }
            metrics.on_slot(mac.activity());
            if ((asn.value + 1) % period_slots == 0) {
                ++rec.housekeeping_calls;
                if (hooks.housekeeping) hooks.housekeeping(Asn{asn.value + 1});
            }
        }

        // 4. rollover
        mac.frame_rollover(frame);
        if (!mac.conserves_packets()) ++rec.conservation_failures;

        // 5. metrics
        loads.clear();
        const auto& active = mac.active_this_frame();
        for (std::uint32_t v = 1; v < n; ++v) {
            if (!active[v]) continue;
            std::uint64_t q = 0;
            std::uint64_t p = 0;
            for (LinkIndex l : mac.out_links(NodeId{v})) {
                q += mac.state(l).occupancy();
                p += frame.allocation_count(l);
            }
            loads.push_back(node_load(q, p));
        }
        metrics.on_frame_end(f, Asn{(f + 1) * config.slots}, mac.in_queues(), loads);
    }

    rec.aggregates = metrics.finish(mac.generated(), mac.dropped_queue(), mac.dropped_retry(), mac.in_queues());
    rec.series = metrics.series();
    return rec;
}

std::vector<std::pair<std::string, std::optional<double>>> metric_values(const RunAggregates& a) {
    auto d = [](std::uint64_t v) { return std::optional<double>(static_cast<double>(v)); };
    return {
        {"last_packet_time", a.last_packet_time},
        {"latency_avg", a.latency_avg},
        {"latency_max", a.latency_max},
        {"reliability", a.reliability},
        {"charge_total", a.charge_total},
        {"charge_per_delivered", a.charge_per_delivered},
        {"queue_fill_avg", a.queue_fill_avg},
        {"queue_fill_max", d(a.queue_fill_max)},
        {"jain_load_avg", a.jain_load_avg},
        {"g_load_avg", a.g_load_avg},
        {"generated", d(a.generated)},
        {"delivered", d(a.delivered)},
        {"dropped_queue", d(a.dropped_queue)},
        {"dropped_retry", d(a.dropped_retry)},
        {"in_queues", d(a.in_queues)},
    };
}

MetricSummary summarize(const std::string& name, const std::vector<double>& values) {
    MetricSummary s{name, values.size(), 0.0, std::nullopt};
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        const double n = static_cast<double>(values.size());
        const double sd = std::sqrt(ss / (n - 1.0));
        boost::math::students_t dist(n - 1.0);
        s.ci95 = boost::math::quantile(dist, 0.975) * sd / std::sqrt(n);
    }
    return s;
}

CampaignResult run_campaign(const RunConfig& base, const SweepGrid& grid, const CampaignOptions& options) {
    struct Point {
        RunConfig config;
    };
    std::vector<Point> points;
    const std::vector<Algorithm> algorithms =
        grid.algorithms.empty() ? std::vector<Algorithm>{base.algorithm} : grid.algorithms;
    std::vector<RunConfig> traffic_variants;
    if (base.traffic.mode == TrafficMode::Bursty && !grid.packets_per_burst.empty()) {
        for (auto ppb : grid.packets_per_burst) {
            RunConfig c = base;
            c.traffic.packets_per_burst = ppb;
            traffic_variants.push_back(c);
        }
    } else if (base.traffic.mode == TrafficMode::Uniform && !grid.interarrivals.empty()) {
        for (double ia : grid.interarrivals) {
            RunConfig c = base;
            c.traffic.interarrival = ia;
            traffic_variants.push_back(c);
        }
    } else {
        traffic_variants.push_back(base);
    }
    for (const auto& tv : traffic_variants) {
        for (Algorithm a : algorithms) {
            RunConfig c = tv;
            c.algorithm = a;
            points.push_back({c});
        }
    }

    CampaignResult result;
    result.paired = options.paired;
    const std::size_t total = points.size() * options.n_runs;
    result.runs.resize(total);
    std::mutex log_mutex;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t job = next++; job < total; job = next++) {
            const std::size_t pi = job / options.n_runs;
            const std::size_t r = job % options.n_runs;
            RunConfig c = points[pi].config;
            const std::uint64_t seed0 = options.paired
                                            ? base.seed + r
                                            : derive_seed(base.seed, r, to_string(c.algorithm));
            CampaignRun& out = result.runs[job];
            out.algorithm = std::string(to_string(c.algorithm));
            out.scenario = c.scenario();
            out.run_index = r;
            try {
                for (std::uint32_t attempt = 0;; ++attempt) {
                    c.seed = seed0 + 1000003ULL * attempt;
                    try {
                        RunRecord rec = run_once(c);
                        out.seed = c.seed;
                        out.topology_retries = attempt;
                        out.aggregates = rec.aggregates;
                        if (options.keep_series) out.series = std::move(rec.series);
                        break;
                    } catch (const std::runtime_error& e) {
                        if (attempt >= options.max_topology_retries) throw;
                        if (options.log != nullptr) {
                            std::lock_guard lock(log_mutex);
                            *options.log << "run " << r << " (" << out.algorithm << ", " << out.scenario
                                         << ") seed " << c.seed << ": " << e.what() << "; retrying with seed "
                                         << seed0 + 1000003ULL * (attempt + 1) << '\n';
                        }
                    }
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(options.parallelism, total));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    // Ordered reduction: independent of completion order.
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        CampaignAggregate agg;
        agg.algorithm = std::string(to_string(points[pi].config.algorithm));
        agg.scenario = points[pi].config.scenario();
        agg.runs = options.n_runs;
        std::vector<std::string> names;
        std::vector<std::vector<double>> columns;
        for (std::size_t r = 0; r < options.n_runs; ++r) {
            const auto values = metric_values(result.runs[pi * options.n_runs + r].aggregates);
            if (names.empty()) {
                for (const auto& [name, _] : values) names.push_back(name);
                columns.resize(names.size());
            }
            for (std::size_t k = 0; k < values.size(); ++k)
                if (values[k].second) columns[k].push_back(*values[k].second);
        }
        for (std::size_t k = 0; k < names.size(); ++k) agg.metrics.push_back(summarize(names[k], columns[k]));
        result.aggregates.push_back(std::move(agg));
    }
    return result;
}

}  // namespace lvsim
