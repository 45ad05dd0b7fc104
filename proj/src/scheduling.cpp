#include "lvsim/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lvsim {

std::vector<NeighborhoodView> publish_views(std::span<const LinkSnapshot> links,
                                            const ConflictSets& conflicts) {
    std::vector<NeighborhoodView> views(links.size());
    for (LinkIndex l = 0; l < links.size(); ++l) {
        for (const auto& e : conflicts.of(l))
            views[l].push_back({e.other, links[e.other].q, links[e.other].z, e.cls});
    }
    return views;
}

Weight lv_weight(const Link& a, const Link& b, std::uint32_t channels) {
    if (channels == 0) throw std::invalid_argument("channel count must be positive");
    return a.shares_node(b) ? Weight{1, 1} : Weight{1, channels};
}

namespace {

struct Share {
    std::uint64_t num;  // (q+z) S M
    std::uint64_t den;  // M (q+z) + sum over primary M (q+z) + sum over secondary (q+z)
};

Share lv_share(std::uint64_t q, std::uint64_t z, std::uint32_t slots, std::uint32_t channels,
               const NeighborhoodView& view, bool use_z) {
    const std::uint64_t own = q + (use_z ? z : 0);
    std::uint64_t den = std::uint64_t{channels} * own;
    for (const auto& e : view) {
        const std::uint64_t load = e.q + (use_z ? e.z : 0);
        den += e.cls == ConflictClass::Primary ? std::uint64_t{channels} * load : load;
    }
    return {own * slots * channels, den};
}

}  // namespace

std::int64_t lv_target(std::uint64_t q, std::uint64_t z, std::uint32_t slots,
                       std::uint32_t channels, const NeighborhoodView& view, bool use_z) {
    if (slots == 0 || channels == 0) throw std::invalid_argument("S and M must be positive");
    const Share s = lv_share(q, z, slots, channels, view, use_z);
    if (s.num == 0) return 0;
    return static_cast<std::int64_t>((2 * s.num + s.den) / (2 * s.den));
}

std::int64_t lv_delta(std::uint64_t q, std::uint64_t z, std::uint32_t p, std::uint32_t slots,
                      std::uint32_t channels, const NeighborhoodView& view, bool use_z) {
    return lv_target(q, z, slots, channels, view, use_z) - static_cast<std::int64_t>(p);
}

double lv_projected_load(std::uint64_t q, std::uint64_t z, std::uint32_t slots,
                         std::uint32_t channels, const NeighborhoodView& view, bool use_z) {
    const Share s = lv_share(q, z, slots, channels, view, use_z);
    return static_cast<double>(s.den) / (static_cast<double>(channels) * slots) - 1.0;
}

std::vector<CellDelta> LocalVoting::decide(const FrameInputs& in) {
    std::vector<CellDelta> out;
    for (LinkIndex l = 0; l < in.links.size(); ++l) {
        const auto& s = in.links[l];
        const std::int64_t u = lv_delta(s.q, s.z, s.p, in.slots, in.channels, in.views[l], use_z_);
        if (u != 0) out.push_back({l, u});
    }
    return out;
}

std::int64_t otf_rule(std::int64_t required, std::uint32_t p, std::uint32_t threshold) {
    const auto held = static_cast<std::int64_t>(p);
    const auto band = static_cast<std::int64_t>(threshold);
    if (held < required) return required - held + band;
    if (held > required + 2 * band) return required + band - held;
    return 0;
}

std::int64_t otf_required(double ewma) {
    return static_cast<std::int64_t>(std::ceil(ewma - 1e-9));
}

std::int64_t eotf_required(double ewma, double pdr, std::uint64_t q, std::uint32_t drain_frames) {
    if (!(pdr > 0.0)) throw std::invalid_argument("E-OTF needs a positive link PDR");
    if (drain_frames == 0) throw std::invalid_argument("drain horizon must be positive");
    const auto scaled = static_cast<std::int64_t>(std::ceil(ewma / pdr - 1e-9));
    const auto backlog = static_cast<std::int64_t>((q + drain_frames - 1) / drain_frames);
    return scaled + backlog;
}

void Otf::update_estimates(std::span<const LinkSnapshot> links) {
    ewma_.resize(links.size(), 0.0);
    for (LinkIndex l = 0; l < links.size(); ++l)
        ewma_[l] = params_.ewma_alpha * static_cast<double>(links[l].z) +
                   (1.0 - params_.ewma_alpha) * ewma_[l];
}

std::int64_t Otf::required(LinkIndex l, const LinkSnapshot&, std::uint32_t) const {
    return otf_required(ewma_[l]);
}

std::int64_t Eotf::required(LinkIndex l, const LinkSnapshot& s, std::uint32_t) const {
    return eotf_required(ewma_[l], s.pdr, s.q, params_.backlog_drain_frames);
}

std::vector<CellDelta> Otf::decide(const FrameInputs& in) {
    update_estimates(in.links);
    std::vector<CellDelta> out;
    for (LinkIndex l = 0; l < in.links.size(); ++l) {
        const std::int64_t u = otf_rule(required(l, in.links[l], in.slots), in.links[l].p, params_.threshold);
        if (u != 0) out.push_back({l, u});
    }
    return out;
}

std::vector<CellDelta> apply_deltas(Slotframe& frame, std::span<const CellDelta> deltas, Rng& rng) {
    std::vector<CellDelta> granted;
    for (const auto& d : deltas) {
        if (d.delta >= 0) continue;
        frame.delete_cells(d.link, static_cast<std::uint32_t>(-d.delta));
        granted.push_back(d);
    }
    for (const auto& d : deltas) {
        if (d.delta <= 0) continue;
        const auto got = frame.add_cells(d.link, static_cast<std::uint32_t>(d.delta), rng);
        if (!got.empty()) granted.push_back({d.link, static_cast<std::int64_t>(got.size())});
    }
    std::stable_sort(granted.begin(), granted.end(),
                     [](const CellDelta& a, const CellDelta& b) { return a.link < b.link; });
    return granted;
}

std::vector<CellDelta> lv_step(Slotframe& frame, std::span<const LinkSnapshot> links,
                               std::span<const NeighborhoodView> views, bool use_z, Rng& rng) {
    LocalVoting lv(use_z);
    const FrameInputs in{links, frame.conflicts(), views, frame.slots(), frame.channels()};
    const auto wanted = lv.decide(in);
    return apply_deltas(frame, wanted, rng);
}

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::LocalVoting: return "local_voting";
        case Algorithm::LocalVotingZ: return "local_voting_z";
        case Algorithm::Otf: return "otf";
        case Algorithm::Eotf: return "eotf";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "local_voting" || name == "lv") return Algorithm::LocalVoting;
    if (name == "local_voting_z" || name == "lvz") return Algorithm::LocalVotingZ;
    if (name == "otf") return Algorithm::Otf;
    if (name == "eotf" || name == "e-otf") return Algorithm::Eotf;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                                "' (expected local_voting, local_voting_z, otf or eotf)");
}

std::unique_ptr<SchedulingFunction> make_scheduling_function(Algorithm a, const OtfParams& otf) {
    switch (a) {
        case Algorithm::LocalVoting: return std::make_unique<LocalVoting>(false);
        case Algorithm::LocalVotingZ: return std::make_unique<LocalVoting>(true);
        case Algorithm::Otf: return std::make_unique<Otf>(otf);
        case Algorithm::Eotf: return std::make_unique<Eotf>(otf);
    }
    throw std::invalid_argument("unknown algorithm");
}

}  // namespace lvsim
