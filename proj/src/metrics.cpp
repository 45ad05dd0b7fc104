#include "lvsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lvsim {

namespace {

void check_values(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("fairness index of an empty set");
    for (double v : values)
        if (!(v >= 0.0)) throw std::invalid_argument("fairness index needs non-negative values");
}

}  // namespace

double jain_index(std::span<const double> values) {
    check_values(values);
    double sum = 0.0;
    double sq = 0.0;
    for (double v : values) {
        sum += v;
        sq += v * v;
    }
    if (sq == 0.0) return 1.0;
    return sum * sum / (static_cast<double>(values.size()) * sq);
}

double g_index(std::span<const double> values) {
    check_values(values);
    const double top = *std::max_element(values.begin(), values.end());
    if (top == 0.0) return 1.0;
    // Geometric mean in log space; a zero factor makes the whole index zero.
    double log_sum = 0.0;
    for (double v : values) {
        const double s = std::sin(std::numbers::pi / 2.0 * v / top);
        if (s <= 0.0) return 0.0;
        log_sum += std::log(s);
    }
    return std::exp(log_sum / static_cast<double>(values.size()));
}

double node_load(std::uint64_t q, std::uint64_t p) {
    if (p == 0) return static_cast<double>(q);
    return static_cast<double>(q) / static_cast<double>(p);
}

double EnergyModel::charge(Activity a) const {
    switch (a) {
        case Activity::Sleep: return sleep;
        case Activity::IdleListen: return idle_listen;
        case Activity::Rx: return rx_data_tx_ack;
        case Activity::Tx: return tx_data_rx_ack;
    }
    return 0.0;
}

void EnergyModel::validate() const {
    if (sleep < 0.0 || idle_listen < sleep || tx_data_rx_ack < idle_listen ||
        rx_data_tx_ack < idle_listen)
        throw std::invalid_argument("energy model must satisfy 0 <= sleep <= idle <= active");
}

double accrue_energy(std::span<const Activity> activity, const EnergyModel& model,
                     std::span<double> accumulated) {
    double total = 0.0;
    for (std::size_t i = 0; i < activity.size(); ++i) {
        const double c = model.charge(activity[i]);
        accumulated[i] += c;
        total += c;
    }
    return total;
}

MetricsCollector::MetricsCollector(std::size_t n_nodes, double slot_duration, EnergyModel energy)
    : slot_duration_(slot_duration), energy_(energy), node_charge_(n_nodes, 0.0) {
    energy_.validate();
}

void MetricsCollector::on_slot(std::span<const Activity> activity) {
    charge_total_ += accrue_energy(activity, energy_, node_charge_);
}

void MetricsCollector::on_delivery(const Packet& pkt, Asn asn) {
    ++delivered_;
    // A delivery in slot asn completes at the end of that slot.
    const double latency = static_cast<double>(asn.value + 1 - pkt.created_at.value) * slot_duration_;
    latency_sum_ += latency;
    latency_max_ = std::max(latency_max_, latency);
    last_delivery_ = asn;
}

void MetricsCollector::on_frame_end(std::uint64_t frame, Asn next_asn, std::uint64_t queue_fill,
                                    std::span<const double> loads) {
    FrameSample s{frame, static_cast<double>(next_asn.value) * slot_duration_, queue_fill, delivered_,
                  charge_total_, std::nullopt, std::nullopt};
    if (!loads.empty()) {
        s.jain_load = jain_index(loads);
        s.g_load = g_index(loads);
    }
    series_.push_back(s);
}

RunAggregates MetricsCollector::finish(std::uint64_t generated, std::uint64_t dropped_queue,
                                       std::uint64_t dropped_retry, std::uint64_t in_queues) const {
    RunAggregates a;
    a.generated = generated;
    a.delivered = delivered_;
    a.dropped_queue = dropped_queue;
    a.dropped_retry = dropped_retry;
    a.in_queues = in_queues;
    a.charge_total = charge_total_;
    if (last_delivery_) a.last_packet_time = static_cast<double>(last_delivery_->value + 1) * slot_duration_;
    if (delivered_ > 0) {
        a.latency_avg = latency_sum_ / static_cast<double>(delivered_);
        a.latency_max = latency_max_;
        a.charge_per_delivered = charge_total_ / static_cast<double>(delivered_);
    }
    if (generated > 0) a.reliability = static_cast<double>(delivered_) / static_cast<double>(generated);
    double fill = 0.0;
    double jain = 0.0;
    double g = 0.0;
    std::size_t fair_frames = 0;
    for (const auto& s : series_) {
        fill += static_cast<double>(s.queue_fill_total);
        a.queue_fill_max = std::max(a.queue_fill_max, s.queue_fill_total);
        if (s.jain_load) {
            jain += *s.jain_load;
            g += *s.g_load;
            ++fair_frames;
        }
    }
    if (!series_.empty()) a.queue_fill_avg = fill / static_cast<double>(series_.size());
    if (fair_frames > 0) {
        a.jain_load_avg = jain / static_cast<double>(fair_frames);
        a.g_load_avg = g / static_cast<double>(fair_frames);
    }
    return a;
}

}  // namespace lvsim
