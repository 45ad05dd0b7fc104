#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lvsim/rng.hpp"
#include "lvsim/topology.hpp"

namespace lvsim {

struct CellCoord {
    std::uint32_t slot_offset{};
    std::uint32_t channel_offset{};

    constexpr auto operator<=>(const CellCoord&) const = default;
};

/// Absolute slot number.
struct Asn {
    std::uint64_t value{};

    constexpr auto operator<=>(const Asn&) const = default;
};

/// Channel-hopping translation with the identity channel map.
constexpr std::uint32_t physical_channel(CellCoord coord, Asn asn, std::uint32_t channels) {
    return static_cast<std::uint32_t>((coord.channel_offset + asn.value) % channels);
}

/**
 * The S x M cell matrix plus the 6top-style add/delete service.
 *
 * All cells are soft. A coordinate may hold several links as long as none of
 * them conflict; adds only pick coordinates that keep both the slot-level
 * (shared endpoint) and cell-level (interference) constraints satisfied.
 * The conflict table passed in must outlive the slotframe.
 */
class Slotframe {
public:
    struct Placement {
        std::uint32_t channel_offset;
        LinkIndex link;
    };

    Slotframe(std::uint32_t slots, std::uint32_t channels, const ConflictSets& conflicts,
              bool reserve_slot0 = true);

    std::uint32_t slots() const { return slots_; }
    std::uint32_t channels() const { return channels_; }
    bool slot0_reserved() const { return reserve_slot0_; }
    const ConflictSets& conflicts() const { return *conflicts_; }

    /// Allocates up to `count` cells picked uniformly among feasible
    /// coordinates; returns what was actually allocated.
    std::vector<CellCoord> add_cells(LinkIndex link, std::uint32_t count, Rng& rng);
    /// Releases `count` cells, most recently added first. Throws
    /// std::logic_error when the link owns fewer cells.
    std::vector<CellCoord> delete_cells(LinkIndex link, std::uint32_t count);

    std::uint32_t allocation_count(LinkIndex link) const {
        return static_cast<std::uint32_t>(owned_[link].size());
    }
    /// Cells of a link in allocation order.
    const std::vector<CellCoord>& cells_of(LinkIndex link) const { return owned_[link]; }
    std::span<const LinkIndex> links_at(CellCoord c) const { return grid_[index(c)]; }
    std::span<const Placement> slot(std::uint32_t slot_offset) const { return by_slot_[slot_offset]; }
    bool feasible(LinkIndex link, CellCoord c) const;
    std::size_t total_allocations() const;

    /// Grid dump: one row per channel offset, one column per slot offset;
    /// entries list owning links as "tx>rx" joined by '|'.
    void write_csv(std::ostream& out) const;

private:
    std::size_t index(CellCoord c) const { return std::size_t{c.slot_offset} * channels_ + c.channel_offset; }
    void place(LinkIndex link, CellCoord c);
    void remove(LinkIndex link, CellCoord c);

    std::uint32_t slots_;
    std::uint32_t channels_;
    const ConflictSets* conflicts_;
    bool reserve_slot0_;
    std::vector<std::vector<LinkIndex>> grid_;
    std::vector<std::vector<Placement>> by_slot_;
    std::vector<std::vector<CellCoord>> owned_;
};

struct ScheduleViolation {
    enum class Kind { SharedEndpoint, Interference };
    Kind kind;
    std::uint32_t slot_offset;
    Link a;
    Link b;
};

/// Exhaustive pairwise scan of the slotframe, evaluated straight from the
/// topology's neighbor sets rather than the precomputed conflict table.
std::vector<ScheduleViolation> find_violations(const Slotframe& frame, const Topology& topology);

std::string to_string(const ScheduleViolation& v);

}  // namespace lvsim
