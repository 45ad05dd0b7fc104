#include "small_instances.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>

#include "lvsim/mac.hpp"
#include "lvsim/scheduling.hpp"

namespace lvsim::testing {

SmallInstance random_instance(Rng& rng, std::size_t max_nodes, std::size_t max_links, std::uint32_t max_slots) {
    for (;;) {
        const std::size_t n = 3 + rng.below(max_nodes - 2);
        std::vector<double> pdr(n * n, 0.0);
        std::vector<Point> pos(n);
        for (std::size_t a = 0; a < n; ++a) {
            pos[a] = {rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
            for (std::size_t b = a + 1; b < n; ++b)
                if (rng.bernoulli(0.6)) pdr[a * n + b] = pdr[b * n + a] = 0.9;
        }
        std::vector<Link> candidates;
        for (std::uint32_t a = 0; a < n; ++a)
            for (std::uint32_t b = 0; b < n; ++b)
                if (a != b && pdr[a * n + b] > 0.0) candidates.push_back({NodeId{a}, NodeId{b}});
        if (candidates.size() < 2) continue;

        SmallInstance inst{Topology(100.0, pos, pdr), {}, {}, 0, 0};
        const std::size_t want = 2 + rng.below(std::min(max_links, candidates.size()) - 1);
        for (std::size_t i = 0; i < want; ++i) {
            const std::size_t k = i + rng.below(candidates.size() - i);
            std::swap(candidates[i], candidates[k]);
            inst.links.push_back(candidates[i]);
        }
        std::sort(inst.links.begin(), inst.links.end());
        for (std::size_t i = 0; i < inst.links.size(); ++i) inst.q.push_back(1 + rng.below(40));
        inst.slots = 3 + static_cast<std::uint32_t>(rng.below(max_slots - 2));
        inst.channels = 1 + static_cast<std::uint32_t>(rng.below(3));
        return inst;
    }
}

FixedPoint run_to_fixed_point(const SmallInstance& inst, const ConflictSets& conflicts, Slotframe& frame,
                              std::uint64_t seed, std::size_t max_iterations) {
    Rng rng(seed);
    LocalVoting lv(false);
    FixedPoint fp;
    const std::size_t n = conflicts.link_count();
    std::vector<LinkSnapshot> snap(n);
    for (; fp.iterations < max_iterations && !fp.converged; ++fp.iterations) {
        for (LinkIndex l = 0; l < n; ++l) snap[l] = {inst.q[l], 0, frame.allocation_count(l), 1.0};
        const auto views = publish_views(snap, conflicts);
        const FrameInputs in{snap, conflicts, views, inst.slots, inst.channels};
        const auto granted = apply_deltas(frame, lv.decide(in), rng);
        fp.converged = std::all_of(granted.begin(), granted.end(), [](const CellDelta& d) { return d.delta == 0; });
    }
    std::vector<LinkSnapshot> final_snap(n);
    for (LinkIndex l = 0; l < n; ++l) final_snap[l] = {inst.q[l], 0, frame.allocation_count(l), 1.0};
    const auto views = publish_views(final_snap, conflicts);
    fp.honorable = true;
    for (LinkIndex l = 0; l < n; ++l) {
        fp.p.push_back(frame.allocation_count(l));
        fp.target.push_back(lv_target(inst.q[l], 0, inst.slots, inst.channels, views[l], false));
        fp.x.push_back(link_load(inst.q[l], fp.p.back()));
        fp.honorable = fp.honorable && fp.target.back() == static_cast<std::int64_t>(fp.p.back());
    }
    return fp;
}

bool can_cede(const Slotframe& frame, LinkIndex from, LinkIndex to) {
    const ConflictSets& cs = frame.conflicts();
    const Link& taker = cs.link(to);
    for (const CellCoord& c : frame.cells_of(from)) {
        bool blocked = false;
        for (const auto& pl : frame.slot(c.slot_offset)) {
            if (pl.link == from && pl.channel_offset == c.channel_offset) continue;
            if (pl.link == to || cs.link(pl.link).shares_node(taker)) {
                blocked = true;
                break;
            }
            if (pl.channel_offset == c.channel_offset && cs.between(pl.link, to) == ConflictClass::Secondary) {
                blocked = true;
                break;
            }
        }
        if (!blocked) return true;
    }
    return false;
}

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double as_number(const std::optional<std::int64_t>& x) {
    return x ? static_cast<double>(*x) : kInfinity;
}

}  // namespace

BalanceReport check_balance(const Slotframe& frame, const FixedPoint& fp, double tolerance) {
    BalanceReport report;
    double worst = -1.0;
    for (LinkIndex l = 0; l < fp.x.size(); ++l) worst = std::max(worst, as_number(fp.x[l]));
    const ConflictSets& cs = frame.conflicts();
    for (LinkIndex m = 0; m < fp.x.size(); ++m) {
        if (as_number(fp.x[m]) != worst) continue;
        for (const auto& e : cs.of(m)) {
            const std::uint32_t p = fp.p[e.other];
            if (p < 2 || !can_cede(frame, e.other, m)) continue;
            const double bound = as_number(fp.x[e.other]) / (1.0 - 1.0 / p) + tolerance;
            if (worst > bound) {
                report.holds = false;
                report.max_link = m;
                report.offender = e.other;
                return report;
            }
        }
        report.max_link = m;
    }
    return report;
}

bool has_feasible_addition(const Slotframe& frame, const std::vector<std::uint64_t>& q) {
    const std::uint32_t first = frame.slot0_reserved() ? 1 : 0;
    for (LinkIndex l = 0; l < q.size(); ++l) {
        if (q[l] == 0) continue;
        for (std::uint32_t t = first; t < frame.slots(); ++t)
            for (std::uint32_t ch = 0; ch < frame.channels(); ++ch)
                if (frame.feasible(l, {t, ch})) return true;
    }
    return false;
}

std::optional<std::int64_t> max_load(const std::vector<std::optional<std::int64_t>>& x) {
    std::int64_t best = 0;
    for (const auto& v : x) {
        if (!v) return std::nullopt;
        best = std::max(best, *v);
    }
    return best;
}

std::optional<std::int64_t> exhaustive_min_max_load(const SmallInstance& inst) {
    const std::size_t n = inst.links.size();
    const std::uint32_t m = inst.channels;

    // Link sets that may all be active in one slot: pairwise node-disjoint
    // and the interference graph among them colorable with M channels.
    std::vector<std::uint32_t> active_sets;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        std::vector<std::size_t> members;
        bool ok = true;
        for (std::size_t a = 0; a < n && ok; ++a) {
            if (!(mask >> a & 1U)) continue;
            for (std::size_t b : members)
                if (inst.links[a].shares_node(inst.links[b])) ok = false;
            members.push_back(a);
        }
        if (!ok) continue;
        std::vector<std::uint32_t> color(members.size(), 0);
        std::function<bool(std::size_t)> paint = [&](std::size_t i) {
            if (i == members.size()) return true;
            for (std::uint32_t c = 0; c < m; ++c) {
                bool clash = false;
                for (std::size_t j = 0; j < i && !clash; ++j)
                    clash = color[j] == c &&
                            classify_conflict(inst.topology, inst.links[members[i]], inst.links[members[j]]) !=
                                ConflictClass::None;
                if (clash) continue;
                color[i] = c;
                if (paint(i + 1)) return true;
            }
            return false;
        };
        if (paint(0)) active_sets.push_back(mask);
    }

    std::set<std::vector<std::uint32_t>> states{std::vector<std::uint32_t>(n, 0)};
    for (std::uint32_t t = 0; t < inst.slots; ++t) {
        std::set<std::vector<std::uint32_t>> next;
        for (const auto& p : states)
            for (std::uint32_t mask : active_sets) {
                auto q = p;
                for (std::size_t a = 0; a < n; ++a) q[a] += mask >> a & 1U;
                next.insert(std::move(q));
            }
        states = std::move(next);
    }
    std::optional<std::int64_t> best;
    for (const auto& p : states) {
        std::vector<std::optional<std::int64_t>> x;
        for (std::size_t a = 0; a < n; ++a) x.push_back(link_load(inst.q[a], p[a]));
        const auto v = max_load(x);
        if (v && (!best || *v < *best)) best = v;
    }
    return best;
}

}  // namespace lvsim::testing
