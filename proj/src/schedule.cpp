#include "lvsim/schedule.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lvsim {

Slotframe::Slotframe(std::uint32_t slots, std::uint32_t channels, const ConflictSets& conflicts,
                     bool reserve_slot0)
    : slots_(slots), channels_(channels), conflicts_(&conflicts), reserve_slot0_(reserve_slot0) {
    if (slots == 0 || channels == 0) throw std::invalid_argument("slotframe needs S >= 1 and M >= 1");
    grid_.assign(std::size_t{slots} * channels, {});
    by_slot_.assign(slots, {});
    owned_.assign(conflicts.link_count(), {});
}

bool Slotframe::feasible(LinkIndex link, CellCoord c) const {
    if (c.slot_offset >= slots_ || c.channel_offset >= channels_) return false;
    if (reserve_slot0_ && c.slot_offset == 0) return false;
    const Link& l = conflicts_->link(link);
    for (const Placement& p : by_slot_[c.slot_offset])
        if (l.shares_node(conflicts_->link(p.link))) return false;
    for (LinkIndex other : grid_[index(c)])
        if (conflicts_->between(link, other) != ConflictClass::None) return false;
    return true;
}

void Slotframe::place(LinkIndex link, CellCoord c) {
    grid_[index(c)].push_back(link);
    by_slot_[c.slot_offset].push_back({c.channel_offset, link});
    owned_[link].push_back(c);
}

void Slotframe::remove(LinkIndex link, CellCoord c) {
    auto& cell = grid_[index(c)];
    cell.erase(std::find(cell.begin(), cell.end(), link));
    auto& slot = by_slot_[c.slot_offset];
    slot.erase(std::find_if(slot.begin(), slot.end(), [&](const Placement& p) {
        return p.link == link && p.channel_offset == c.channel_offset;
    }));
}

std::vector<CellCoord> Slotframe::add_cells(LinkIndex link, std::uint32_t count, Rng& rng) {
    std::vector<CellCoord> granted;
    if (count == 0) return granted;
    std::vector<CellCoord> candidates;
    for (std::uint32_t t = 0; t < slots_; ++t)
        for (std::uint32_t ch = 0; ch < channels_; ++ch)
            if (feasible(link, {t, ch})) candidates.push_back({t, ch});
    while (granted.size() < count && !candidates.empty()) {
        const CellCoord pick = candidates[rng.below(candidates.size())];
        place(link, pick);
        granted.push_back(pick);
        // The link now occupies this slot, so nothing else in it stays feasible.
        std::erase_if(candidates, [&](const CellCoord& c) { return c.slot_offset == pick.slot_offset; });
    }
    return granted;
}

std::vector<CellCoord> Slotframe::delete_cells(LinkIndex link, std::uint32_t count) {
    auto& mine = owned_[link];
    if (count > mine.size()) {
        std::ostringstream os;
        os << "delete_cells: link " << conflicts_->link(link).tx.value << ">"
           << conflicts_->link(link).rx.value << " owns " << mine.size() << " cells, asked to release "
           << count;
        throw std::logic_error(os.str());
    }
    std::vector<CellCoord> released;
    for (std::uint32_t k = 0; k < count; ++k) {
        const CellCoord c = mine.back();
        mine.pop_back();
        remove(link, c);
        released.push_back(c);
    }
    return released;
}

std::size_t Slotframe::total_allocations() const {
    std::size_t n = 0;
    for (const auto& v : owned_) n += v.size();
    return n;
}

void Slotframe::write_csv(std::ostream& out) const {
    out << "channel_offset";
    for (std::uint32_t t = 0; t < slots_; ++t) out << ",s" << t;
    out << '\n';
    for (std::uint32_t ch = 0; ch < channels_; ++ch) {
        out << ch;
        for (std::uint32_t t = 0; t < slots_; ++t) {
            out << ',';
            bool first = true;
            for (LinkIndex l : grid_[index({t, ch})]) {
                if (!first) out << '|';
                first = false;
                out << conflicts_->link(l).tx.value << '>' << conflicts_->link(l).rx.value;
            }
        }
        out << '\n';
    }
}

std::vector<ScheduleViolation> find_violations(const Slotframe& frame, const Topology& topology) {
    std::vector<ScheduleViolation> out;
    const ConflictSets& cs = frame.conflicts();
    for (std::uint32_t t = 0; t < frame.slots(); ++t) {
        const auto entries = frame.slot(t);
        for (std::size_t a = 0; a < entries.size(); ++a) {
            for (std::size_t b = a + 1; b < entries.size(); ++b) {
                const Link& la = cs.link(entries[a].link);
                const Link& lb = cs.link(entries[b].link);
                const bool shared = la.tx == lb.tx || la.tx == lb.rx || la.rx == lb.tx || la.rx == lb.rx;
                if (shared) {
                    out.push_back({ScheduleViolation::Kind::SharedEndpoint, t, la, lb});
                    continue;
                }
                if (entries[a].channel_offset != entries[b].channel_offset) continue;
                const bool hears = topology.pdr(lb.rx, la.tx) > 0.0 || topology.pdr(lb.tx, la.rx) > 0.0;
                if (hears) out.push_back({ScheduleViolation::Kind::Interference, t, la, lb});
            }
        }
    }
    return out;
}

std::string to_string(const ScheduleViolation& v) {
    std::ostringstream os;
    os << (v.kind == ScheduleViolation::Kind::SharedEndpoint ? "shared-endpoint" : "interference")
       << " at slot " << v.slot_offset << ": " << v.a.tx.value << ">" << v.a.rx.value << " vs "
       << v.b.tx.value << ">" << v.b.rx.value;
    return os.str();
}

}  // namespace lvsim
