#include "lvsim/report.hpp"

#include <cstdio>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lvsim/config.hpp"

namespace lvsim {

std::string format_value(std::optional<double> v) {
    if (!v) return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return buf;
}

void write_aggregates_header(std::ostream& out) {
    out << "algorithm,scenario,seed,run_index";
    for (const auto& [name, _] : metric_values(RunAggregates{})) out << ',' << name;
    out << '\n';
}

void write_aggregates_row(std::ostream& out, const std::string& algorithm, const std::string& scenario,
                          std::uint64_t seed, std::size_t run_index, const RunAggregates& a) {
    out << algorithm << ',' << scenario << ',' << seed << ',' << run_index;
    for (const auto& [_, v] : metric_values(a)) out << ',' << format_value(v);
    out << '\n';
}

void write_timeseries(std::ostream& out, const std::vector<FrameSample>& series) {
    out << "frame,time_s,queue_fill_total,delivered_cum,charge_cum,jain_load,g_load\n";
    for (const auto& s : series) {
        out << s.frame << ',' << format_value(s.time_s) << ',' << s.queue_fill_total << ','
            << s.delivered_cum << ',' << format_value(s.charge_cum) << ',' << format_value(s.jain_load)
            << ',' << format_value(s.g_load) << '\n';
    }
}

void write_summary(std::ostream& out, const CampaignResult& result) {
    out << "algorithm,scenario,runs";
    if (!result.aggregates.empty())
        for (const auto& m : result.aggregates.front().metrics)
            out << ',' << m.name << "_n," << m.name << "_mean," << m.name << "_ci95";
    out << '\n';
    for (const auto& a : result.aggregates) {
        out << a.algorithm << ',' << a.scenario << ',' << a.runs;
        for (const auto& m : a.metrics) {
            out << ',' << m.n << ',' << (m.n > 0 ? format_value(m.mean) : std::string{}) << ','
                << format_value(m.ci95);
        }
        out << '\n';
    }
}

void write_long(std::ostream& out, const CampaignResult& result) {
    out << "algorithm,scenario,metric,n,mean,ci95\n";
    for (const auto& a : result.aggregates)
        for (const auto& m : a.metrics)
            out << a.algorithm << ',' << a.scenario << ',' << m.name << ',' << m.n << ','
                << (m.n > 0 ? format_value(m.mean) : std::string{}) << ',' << format_value(m.ci95) << '\n';
}

void write_paired(std::ostream& out, const CampaignResult& result) {
    std::vector<std::string> algorithms;
    for (const auto& a : result.aggregates)
        if (std::find(algorithms.begin(), algorithms.end(), a.algorithm) == algorithms.end())
            algorithms.push_back(a.algorithm);
    // (scenario, run_index) -> algorithm -> run
    std::map<std::pair<std::string, std::size_t>, std::map<std::string, const CampaignRun*>> rows;
    std::vector<std::pair<std::string, std::size_t>> order;
    for (const auto& r : result.runs) {
        auto key = std::make_pair(r.scenario, r.run_index);
        if (!rows.contains(key)) order.push_back(key);
        rows[key][r.algorithm] = &r;
    }
    out << "scenario,run_index,seed,metric";
    for (const auto& a : algorithms) out << ',' << a;
    out << '\n';
    const auto names = metric_values(RunAggregates{});
    for (const auto& key : order) {
        const auto& by_alg = rows[key];
        const CampaignRun* any = by_alg.begin()->second;
        for (std::size_t k = 0; k < names.size(); ++k) {
            out << key.first << ',' << key.second << ',' << any->seed << ',' << names[k].first;
            for (const auto& a : algorithms) {
                out << ',';
                auto it = by_alg.find(a);
                if (it != by_alg.end()) out << format_value(metric_values(it->second->aggregates)[k].second);
            }
            out << '\n';
        }
    }
}

nlohmann::json campaign_metadata(const RunConfig& base, const SweepGrid& grid, const CampaignOptions& options) {
    nlohmann::json algs = nlohmann::json::array();
    for (auto a : grid.algorithms) algs.push_back(std::string(to_string(a)));
    return {
        {"base_config", config_to_json(base)},
        {"algorithms", algs},
        {"packets_per_burst", grid.packets_per_burst},
        {"interarrivals", grid.interarrivals},
        {"runs", options.n_runs},
        {"paired_seeds", options.paired},
        {"seed_rule", options.paired ? "seed = base_seed + run_index for every algorithm"
                                     : "seed = hash(base_seed, run_index, algorithm)"},
        {"topology_retry_offset", 1000003},
        {"confidence_interval", "95% Student t half-width"},
    };
}

}  // namespace lvsim
