#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "lvsim/rng.hpp"
#include "lvsim/schedule.hpp"
#include "lvsim/topology.hpp"

namespace lvsim {

struct Packet {
    std::uint64_t id{};
    NodeId origin{};
    Asn created_at{};
    std::uint32_t mac_retries_used = 0;
    std::uint32_t hop_count = 0;
};

/// Load of a link: round(q/p + 1/2), 0 for an empty queue, absent when a
/// backlogged link has no cells. For integers this is floor(q/p) + 1.
constexpr std::optional<std::int64_t> link_load(std::uint64_t q, std::uint64_t p) {
    if (q == 0) return 0;
    if (p == 0) return std::nullopt;
    return static_cast<std::int64_t>(q / p + 1);
}

/// Per-link queue state. Packets that arrive during a frame wait in
/// `pending` and only become transmittable after the frame rollover.
struct LinkState {
    std::deque<Packet> queue;
    std::deque<Packet> pending;
    std::uint32_t p = 0;          // cells held at the last rollover
    std::uint32_t z_last = 0;     // arrivals during the last completed frame
    std::int32_t u_last = 0;      // last granted cell delta
    std::optional<std::int64_t> x = 0;

    std::size_t q() const { return queue.size(); }
    std::size_t z_pending() const { return pending.size(); }
    std::size_t occupancy() const { return queue.size() + pending.size(); }
};

struct MacConfig {
    std::uint32_t max_retries = 5;
    std::size_t queue_capacity = 100;
};

enum class Activity : std::uint8_t { Sleep = 0, IdleListen = 1, Rx = 2, Tx = 3 };

struct MacEvent {
    enum class Kind : std::uint8_t {
        Idle,        // cell scheduled, nothing to send
        Success,     // hop delivered to a relay
        Delivered,   // hop delivered to the sink
        Failure,     // attempt lost, packet stays at the head
        RetryDrop,   // attempt lost with the retry budget exhausted
        QueueDrop,   // no room on any next-hop link
    };
    Kind kind;
    Asn asn;
    CellCoord cell;
    LinkIndex link;
    Packet packet;
};

const char* to_string(MacEvent::Kind k);

/**
 * Slot execution over per-link FIFO queues. Owns every queued packet and
 * the per-node radio activity of the last executed slot.
 */
class MacEngine {
public:
    MacEngine(const Topology& topology, const RoutingTree& routing, const ConflictSets& links,
              MacConfig config = {});

    /// Appends to the link's pending queue; drops and counts when full.
    bool enqueue(LinkIndex link, Packet pkt);
    /// New application packet at `origin`; returns false when dropped.
    bool generate(NodeId origin, Asn asn);

    /// Runs every cell scheduled at slot_offset = asn mod S. The returned
    /// events stay valid until the next call.
    std::span<const MacEvent> execute_slot(Asn asn, const Slotframe& frame, Rng& rng);

    /// Folds pending arrivals into the queues and refreshes p and x.
    void frame_rollover(const Slotframe& frame);
    /// Clears the per-frame activity marks; nodes holding packets stay marked.
    void begin_frame();

    const LinkState& state(LinkIndex l) const { return links_[l]; }
    LinkState& state(LinkIndex l) { return links_[l]; }
    std::size_t link_count() const { return links_.size(); }
    const std::vector<LinkIndex>& out_links(NodeId n) const { return out_links_[n.index()]; }
    std::span<const Activity> activity() const { return activity_; }
    const std::vector<bool>& active_this_frame() const { return active_; }

    std::uint64_t generated() const { return generated_; }
    std::uint64_t delivered() const { return delivered_; }
    std::uint64_t dropped_queue() const { return dropped_queue_; }
    std::uint64_t dropped_retry() const { return dropped_retry_; }
    std::uint64_t in_queues() const;
    /// generated == delivered + queued + dropped.
    bool conserves_packets() const;

private:
    bool forward(NodeId at, Packet pkt, Asn asn, CellCoord cell);
    void mark(NodeId n, Activity a);

    const Topology* topology_;
    const ConflictSets* links_table_;
    MacConfig config_;
    std::vector<LinkState> links_;
    std::vector<double> link_pdr_;
    std::vector<std::vector<LinkIndex>> out_links_;
    std::vector<Activity> activity_;
    std::vector<bool> active_;
    std::vector<MacEvent> events_;
    std::uint64_t next_id_ = 0;
    std::uint64_t generated_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t dropped_queue_ = 0;
    std::uint64_t dropped_retry_ = 0;
};

}  // namespace lvsim
