#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lvsim/sim.hpp"

namespace lvsim {

/// "%.10g", or empty for an absent value.
std::string format_value(std::optional<double> v);

/// Per-run aggregates keyed by (algorithm, scenario, seed).
void write_aggregates_header(std::ostream& out);
void write_aggregates_row(std::ostream& out, const std::string& algorithm, const std::string& scenario,
                          std::uint64_t seed, std::size_t run_index, const RunAggregates& a);

/// Columns: frame,time_s,queue_fill_total,delivered_cum,charge_cum,jain_load,g_load
void write_timeseries(std::ostream& out, const std::vector<FrameSample>& series);

/// One row per (algorithm, scenario) with mean and 95% half-width per metric.
void write_summary(std::ostream& out, const CampaignResult& result);

/// Plot-ready long format: algorithm,scenario,metric,n,mean,ci95
void write_long(std::ostream& out, const CampaignResult& result);

/// Runs aligned by (scenario, run_index): one column per algorithm for each metric.
void write_paired(std::ostream& out, const CampaignResult& result);

nlohmann::json campaign_metadata(const RunConfig& base, const SweepGrid& grid, const CampaignOptions& options);

}  // namespace lvsim
