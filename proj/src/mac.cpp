#include "lvsim/mac.hpp"

#include <algorithm>
#include <stdexcept>

namespace lvsim {

const char* to_string(MacEvent::Kind k) {
    switch (k) {
        case MacEvent::Kind::Idle: return "idle";
        case MacEvent::Kind::Success: return "success";
        case MacEvent::Kind::Delivered: return "delivered";
        case MacEvent::Kind::Failure: return "failure";
        case MacEvent::Kind::RetryDrop: return "retry_drop";
        case MacEvent::Kind::QueueDrop: return "queue_drop";
    }
    return "?";
}

MacEngine::MacEngine(const Topology& topology, const RoutingTree& routing, const ConflictSets& links,
                     MacConfig config)
    : topology_(&topology), links_table_(&links), config_(config) {
    const std::size_t n = topology.size();
    links_.resize(links.link_count());
    link_pdr_.resize(links.link_count());
    for (LinkIndex l = 0; l < links.link_count(); ++l)
        link_pdr_[l] = topology.pdr(links.link(l).tx, links.link(l).rx);
    out_links_.assign(n, {});
    for (std::uint32_t v = 1; v < n; ++v) {
        for (NodeId parent : routing.parents[v]) {
            const auto idx = links.find({NodeId{v}, parent});
            if (!idx) throw std::invalid_argument("routing link missing from link table");
            out_links_[v].push_back(*idx);
        }
    }
    activity_.assign(n, Activity::Sleep);
    active_.assign(n, false);
}

bool MacEngine::enqueue(LinkIndex link, Packet pkt) {
    LinkState& s = links_[link];
    if (s.occupancy() >= config_.queue_capacity) {
        ++dropped_queue_;
        return false;
    }
    s.pending.push_back(pkt);
    return true;
}

bool MacEngine::forward(NodeId at, Packet pkt, Asn asn, CellCoord cell) {
    active_[at.index()] = true;
    // Preferred parent first, then the remaining parents in PDR order.
    for (LinkIndex l : out_links_[at.index()]) {
        if (links_[l].occupancy() < config_.queue_capacity) {
            links_[l].pending.push_back(pkt);
            return true;
        }
    }
    ++dropped_queue_;
    if (!out_links_[at.index()].empty())
        events_.push_back({MacEvent::Kind::QueueDrop, asn, cell, out_links_[at.index()].front(), pkt});
    return false;
}

bool MacEngine::generate(NodeId origin, Asn asn) {
    if (origin == kSink) throw std::invalid_argument("the sink does not generate traffic");
    ++generated_;
    Packet pkt{next_id_++, origin, asn, 0, 0};
    return forward(origin, pkt, asn, CellCoord{});
}

void MacEngine::mark(NodeId n, Activity a) {
    auto& cur = activity_[n.index()];
    if (static_cast<int>(a) > static_cast<int>(cur)) cur = a;
}

std::span<const MacEvent> MacEngine::execute_slot(Asn asn, const Slotframe& frame, Rng& rng) {
    events_.clear();
    std::fill(activity_.begin(), activity_.end(), Activity::Sleep);
    const auto t = static_cast<std::uint32_t>(asn.value % frame.slots());
    for (const auto& placement : frame.slot(t)) {
        const LinkIndex l = placement.link;
        const Link& link = links_table_->link(l);
        const CellCoord cell{t, placement.channel_offset};
        LinkState& s = links_[l];
        if (s.queue.empty()) {
            mark(link.rx, Activity::IdleListen);
            events_.push_back({MacEvent::Kind::Idle, asn, cell, l, Packet{}});
            continue;
        }
        active_[link.tx.index()] = true;
        mark(link.tx, Activity::Tx);
        Packet& head = s.queue.front();
        if (rng.bernoulli(link_pdr_[l])) {
            mark(link.rx, Activity::Rx);
            Packet pkt = head;
            s.queue.pop_front();
            pkt.mac_retries_used = 0;
            ++pkt.hop_count;
            if (link.rx == kSink) {
                ++delivered_;
                events_.push_back({MacEvent::Kind::Delivered, asn, cell, l, pkt});
            } else {
                events_.push_back({MacEvent::Kind::Success, asn, cell, l, pkt});
                forward(link.rx, pkt, asn, cell);
            }
        } else {
            mark(link.rx, Activity::IdleListen);
            if (head.mac_retries_used >= config_.max_retries) {
                events_.push_back({MacEvent::Kind::RetryDrop, asn, cell, l, head});
                s.queue.pop_front();
                ++dropped_retry_;
            } else {
                ++head.mac_retries_used;
                events_.push_back({MacEvent::Kind::Failure, asn, cell, l, head});
            }
        }
    }
    return events_;
}

void MacEngine::frame_rollover(const Slotframe& frame) {
    for (LinkIndex l = 0; l < links_.size(); ++l) {
        LinkState& s = links_[l];
        s.z_last = static_cast<std::uint32_t>(s.pending.size());
        s.queue.insert(s.queue.end(), s.pending.begin(), s.pending.end());
        s.pending.clear();
        s.p = frame.allocation_count(l);
        s.x = link_load(s.q(), s.p);
    }
}

void MacEngine::begin_frame() {
    std::fill(active_.begin(), active_.end(), false);
    for (LinkIndex l = 0; l < links_.size(); ++l)
        if (links_[l].occupancy() > 0) active_[links_table_->link(l).tx.index()] = true;
}

std::uint64_t MacEngine::in_queues() const {
    std::uint64_t n = 0;
    for (const auto& s : links_) n += s.occupancy();
    return n;
}

bool MacEngine::conserves_packets() const {
    return generated_ == delivered_ + in_queues() + dropped_queue_ + dropped_retry_;
}

}  // namespace lvsim
