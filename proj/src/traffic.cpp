#include "lvsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lvsim {

std::string_view to_string(TrafficMode m) { return m == TrafficMode::Bursty ? "bursty" : "uniform"; }

TrafficMode parse_traffic_mode(std::string_view s) {
    if (s == "bursty") return TrafficMode::Bursty;
    if (s == "uniform" || s == "steady") return TrafficMode::Uniform;
    throw std::invalid_argument("unknown traffic mode '" + std::string(s) + "'");
}

TrafficGenerator::TrafficGenerator(TrafficProfile profile, std::size_t n_nodes, double slot_duration,
                                   Rng rng)
    : profile_(std::move(profile)), slot_duration_(slot_duration), rng_(rng) {
    if (slot_duration <= 0.0) throw std::invalid_argument("slot duration must be positive");
    if (profile_.mode == TrafficMode::Bursty) {
        for (double t : profile_.burst_times) {
            if (t < 0.0) throw std::invalid_argument("burst time must be non-negative");
            // First slot whose start time reaches t; the epsilon absorbs 20/0.01 style rounding.
            burst_slots_.push_back(static_cast<std::uint64_t>(std::ceil(t / slot_duration - 1e-9)));
        }
        return;
    }
    if (profile_.interarrival <= 0.0) throw std::invalid_argument("interarrival must be positive");
    if (profile_.interarrival_jitter < 0.0 || profile_.interarrival_jitter >= 1.0)
        throw std::invalid_argument("interarrival jitter must be in [0, 1)");
    const auto [lo, hi] = profile_.start_window;
    if (lo < 0.0 || hi < lo) throw std::invalid_argument("bad start window");
    next_arrival_.assign(n_nodes, 0.0);
    // Node order fixes the stream consumption, so the draws do not depend on
    // which scheduling function runs.
    for (std::size_t v = 1; v < n_nodes; ++v) next_arrival_[v] = rng_.uniform(lo, hi);
}

double TrafficGenerator::next_gap() {
    const double j = profile_.interarrival_jitter;
    const double gap = profile_.interarrival * (1.0 + j * rng_.uniform(-1.0, 1.0));
    gaps_.push_back(gap);
    return gap;
}

std::uint32_t TrafficGenerator::arrivals_for_slot(NodeId node, Asn asn) {
    if (node == kSink) return 0;
    if (profile_.mode == TrafficMode::Bursty) {
        const auto hits = std::count(burst_slots_.begin(), burst_slots_.end(), asn.value);
        return static_cast<std::uint32_t>(hits) * profile_.packets_per_burst;
    }
    double& next = next_arrival_.at(node.index());
    const double now = static_cast<double>(asn.value) * slot_duration_;
    std::uint32_t n = 0;
    while (next <= now) {
        ++n;
        next += next_gap();
    }
    return n;
}

}  // namespace lvsim
