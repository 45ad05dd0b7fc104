#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "lvsim/rng.hpp"
#include "lvsim/schedule.hpp"
#include "lvsim/topology.hpp"

namespace lvsim {

enum class TrafficMode { Bursty, Uniform };

std::string_view to_string(TrafficMode m);
TrafficMode parse_traffic_mode(std::string_view s);

struct TrafficProfile {
    TrafficMode mode = TrafficMode::Bursty;
    std::vector<double> burst_times{20.0, 60.0};  // seconds
    std::uint32_t packets_per_burst = 25;
    double interarrival = 0.2;                    // seconds
    double interarrival_jitter = 0.05;            // fraction of the interval
    std::pair<double, double> start_window{16.9, 33.0};
};

/// Application packet arrivals per node and slot. Uniform mode keeps one
/// next-arrival clock per node.
class TrafficGenerator {
public:
    TrafficGenerator(TrafficProfile profile, std::size_t n_nodes, double slot_duration, Rng rng);

    std::uint32_t arrivals_for_slot(NodeId node, Asn asn);

    const TrafficProfile& profile() const { return profile_; }
    /// Inter-arrival gaps drawn so far (uniform mode), for inspection.
    const std::vector<double>& drawn_gaps() const { return gaps_; }

private:
    double next_gap();

    TrafficProfile profile_;
    double slot_duration_;
    Rng rng_;
    std::vector<std::uint64_t> burst_slots_;
    std::vector<double> next_arrival_;
    std::vector<double> gaps_;
};

}  // namespace lvsim
