#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lvsim/rng.hpp"
#include "lvsim/schedule.hpp"
#include "lvsim/topology.hpp"

namespace lvsim {

/// What a node publishes about one of its links at a frame boundary.
struct LinkSnapshot {
    std::uint64_t q = 0;   // transmittable queue length
    std::uint64_t z = 0;   // arrivals during the last frame
    std::uint32_t p = 0;   // cells currently held
    double pdr = 1.0;
};

struct NeighborEntry {
    LinkIndex link;
    std::uint64_t q;
    std::uint64_t z;
    ConflictClass cls;
};

/// State of every link in N_{i,j} as last published by its owner.
using NeighborhoodView = std::vector<NeighborEntry>;

struct CellDelta {
    LinkIndex link;
    std::int64_t delta;

    bool operator==(const CellDelta&) const = default;
};

std::vector<NeighborhoodView> publish_views(std::span<const LinkSnapshot> links,
                                            const ConflictSets& conflicts);

/// Exact rational weight num/den.
struct Weight {
    std::uint32_t num;
    std::uint32_t den;

    double value() const { return static_cast<double>(num) / den; }
    bool operator==(const Weight&) const = default;
};

/// 1 for links sharing an endpoint, 1/M otherwise.
Weight lv_weight(const Link& a, const Link& b, std::uint32_t channels);

/**
 * Cell delta of one link under local voting:
 *
 *   u = round( (q+z) S / ((q+z) + sum_w w (q_lk + z_lk)) ) - p
 *
 * with every z set to zero unless `use_z`. An empty own queue releases all
 * cells. Evaluated in exact integer arithmetic, ties rounded away from zero.
 */
std::int64_t lv_delta(std::uint64_t q, std::uint64_t z, std::uint32_t p, std::uint32_t slots,
                      std::uint32_t channels, const NeighborhoodView& view, bool use_z);

/// Cell target round(...) of the local-voting rule, i.e. lv_delta + p.
std::int64_t lv_target(std::uint64_t q, std::uint64_t z, std::uint32_t slots,
                       std::uint32_t channels, const NeighborhoodView& view, bool use_z);

/// Closed-form load after a fully honored update: weighted neighborhood
/// sum / S - 1.
double lv_projected_load(std::uint64_t q, std::uint64_t z, std::uint32_t slots,
                         std::uint32_t channels, const NeighborhoodView& view, bool use_z);

struct FrameInputs {
    std::span<const LinkSnapshot> links;
    const ConflictSets& conflicts;
    std::span<const NeighborhoodView> views;
    std::uint32_t slots;
    std::uint32_t channels;
};

class SchedulingFunction {
public:
    virtual ~SchedulingFunction() = default;
    virtual std::string_view name() const = 0;
    /// Desired per-link deltas for the coming frame, ascending link order.
    virtual std::vector<CellDelta> decide(const FrameInputs& in) = 0;
};

class LocalVoting final : public SchedulingFunction {
public:
    explicit LocalVoting(bool use_z) : use_z_(use_z) {}
    std::string_view name() const override { return use_z_ ? "local_voting_z" : "local_voting"; }
    std::vector<CellDelta> decide(const FrameInputs& in) override;

private:
    bool use_z_;
};

struct OtfParams {
    std::uint32_t threshold = 4;
    double ewma_alpha = 0.5;
    /// E-OTF only: standing queues are targeted to drain within this many frames.
    std::uint32_t backlog_drain_frames = 1;
};

/// Threshold-hysteresis rule shared by OTF and E-OTF.
std::int64_t otf_rule(std::int64_t required, std::uint32_t p, std::uint32_t threshold);

/**
 * On-the-fly reservation: follows a smoothed estimate of per-frame traffic
 * with a hysteresis band of `threshold` cells. Queue state and neighbors
 * are ignored.
 */
class Otf : public SchedulingFunction {
public:
    explicit Otf(OtfParams params = {}) : params_(params) {}
    std::string_view name() const override { return "otf"; }
    std::vector<CellDelta> decide(const FrameInputs& in) override;

    double estimate(LinkIndex l) const { return l < ewma_.size() ? ewma_[l] : 0.0; }

protected:
    void update_estimates(std::span<const LinkSnapshot> links);
    virtual std::int64_t required(LinkIndex l, const LinkSnapshot& s, std::uint32_t slots) const;

    OtfParams params_;
    std::vector<double> ewma_;
};

/// OTF with retransmission-scaled demand plus a queue-draining term.
class Eotf final : public Otf {
public:
    explicit Eotf(OtfParams params = {}) : Otf(params) {}
    std::string_view name() const override { return "eotf"; }

protected:
    std::int64_t required(LinkIndex l, const LinkSnapshot& s, std::uint32_t slots) const override;
};

/// Pure rule evaluation behind Otf/Eotf, exposed for testing.
std::int64_t otf_required(double ewma);
std::int64_t eotf_required(double ewma, double pdr, std::uint64_t q, std::uint32_t drain_frames);

/// Releases first, then adds, each in ascending link order. Returns the
/// deltas actually granted (adds can be partial).
std::vector<CellDelta> apply_deltas(Slotframe& frame, std::span<const CellDelta> deltas, Rng& rng);

/// One local-voting frame step: decide then apply.
std::vector<CellDelta> lv_step(Slotframe& frame, std::span<const LinkSnapshot> links,
                               std::span<const NeighborhoodView> views, bool use_z, Rng& rng);

enum class Algorithm { LocalVoting, LocalVotingZ, Otf, Eotf };

std::string_view to_string(Algorithm a);
/// Accepts local_voting | local_voting_z | otf | eotf.
Algorithm parse_algorithm(std::string_view name);
std::unique_ptr<SchedulingFunction> make_scheduling_function(Algorithm a, const OtfParams& otf);

}  // namespace lvsim
