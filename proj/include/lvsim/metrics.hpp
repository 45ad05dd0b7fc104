#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lvsim/mac.hpp"

namespace lvsim {

/// Jain's index (sum x)^2 / (n sum x^2); 1 when every value is zero.
double jain_index(std::span<const double> values);

/// Product of sin(pi/2 * x_i / x_max), raised to 1/n; 1 when every value is zero.
double g_index(std::span<const double> values);

/// Queue length over allocation; the raw backlog when nothing is allocated.
double node_load(std::uint64_t q, std::uint64_t p);

/// Charge per slot by radio activity, in microcoulombs. Defaults follow a
/// CC2538-class TSCH slot profile.
struct EnergyModel {
    double tx_data_rx_ack = 64.82;
    double rx_data_tx_ack = 76.90;
    double idle_listen = 24.60;
    double sleep = 0.013;

    double charge(Activity a) const;
    void validate() const;
};

/// Adds this slot's per-node charge into `accumulated`; returns the slot total.
double accrue_energy(std::span<const Activity> activity, const EnergyModel& model,
                     std::span<double> accumulated);

struct FrameSample {
    std::uint64_t frame;
    double time_s;  // end of frame
    std::uint64_t queue_fill_total;
    std::uint64_t delivered_cum;
    double charge_cum;
    std::optional<double> jain_load;
    std::optional<double> g_load;
};

struct RunAggregates {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_queue = 0;
    std::uint64_t dropped_retry = 0;
    std::uint64_t in_queues = 0;
    std::optional<double> last_packet_time;
    std::optional<double> latency_avg;
    std::optional<double> latency_max;
    std::optional<double> reliability;
    double charge_total = 0.0;
    std::optional<double> charge_per_delivered;
    double queue_fill_avg = 0.0;
    std::uint64_t queue_fill_max = 0;
    std::optional<double> jain_load_avg;
    std::optional<double> g_load_avg;
};

/// Per-run collector fed by the engine once per delivery and once per frame.
class MetricsCollector {
public:
    MetricsCollector(std::size_t n_nodes, double slot_duration, EnergyModel energy);

    void on_slot(std::span<const Activity> activity);
    void on_delivery(const Packet& pkt, Asn asn);
    /// `loads` holds node_load values of the nodes counted for fairness.
    void on_frame_end(std::uint64_t frame, Asn next_asn, std::uint64_t queue_fill,
                      std::span<const double> loads);

    RunAggregates finish(std::uint64_t generated, std::uint64_t dropped_queue,
                         std::uint64_t dropped_retry, std::uint64_t in_queues) const;

    const std::vector<FrameSample>& series() const { return series_; }
    const std::vector<double>& node_charge() const { return node_charge_; }
    double charge_total() const { return charge_total_; }

private:
    double slot_duration_;
    EnergyModel energy_;
    std::vector<double> node_charge_;
    double charge_total_ = 0.0;
    std::uint64_t delivered_ = 0;
    double latency_sum_ = 0.0;
    double latency_max_ = 0.0;
    std::optional<Asn> last_delivery_;
    std::vector<FrameSample> series_;
};

}  // namespace lvsim
