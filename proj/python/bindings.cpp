#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "lvsim/config.hpp"
#include "lvsim/metrics.hpp"
#include "lvsim/report.hpp"
#include "lvsim/scheduling.hpp"
#include "lvsim/sim.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace lvsim;

namespace {

json metrics_json(const RunAggregates& a) {
    json out = json::object();
    for (const auto& [name, v] : metric_values(a)) out[name] = v ? json(*v) : json(nullptr);
    return out;
}

json series_json(const std::vector<FrameSample>& series) {
    json out = json::array();
    for (const auto& s : series)
        out.push_back({{"frame", s.frame},
                       {"time_s", s.time_s},
                       {"queue_fill_total", s.queue_fill_total},
                       {"delivered_cum", s.delivered_cum},
                       {"charge_cum", s.charge_cum},
                       {"jain_load", s.jain_load ? json(*s.jain_load) : json(nullptr)},
                       {"g_load", s.g_load ? json(*s.g_load) : json(nullptr)}});
    return out;
}

RunConfig parse_config(const std::string& text) {
    try {
        return apply_config_json(json::parse(text));
    } catch (const std::exception& e) {
        throw py::value_error(e.what());
    }
}

std::string default_config() { return config_to_json(RunConfig{}).dump(); }

std::string run_once_json(const std::string& config, bool verify) {
    const RunConfig c = parse_config(config);
    RunHooks hooks;
    hooks.verify_schedule = verify;
    RunRecord r;
    {
        py::gil_scoped_release release;
        r = run_once(c, hooks);
    }
    return json{{"algorithm", r.algorithm},
                {"scenario", r.scenario},
                {"seed", r.seed},
                {"links", r.link_count},
                {"metrics", metrics_json(r.aggregates)},
                {"series", series_json(r.series)},
                {"schedule_violations", r.schedule_violations},
                {"conservation_failures", r.conservation_failures}}
        .dump();
}

std::string campaign_json(const std::string& config, const std::vector<std::string>& algorithms,
                          const std::vector<std::uint32_t>& packets_per_burst, const std::vector<double>& interarrivals,
                          std::size_t runs, std::size_t parallelism, bool paired) {
    const RunConfig c = parse_config(config);
    SweepGrid grid{{}, packets_per_burst, interarrivals};
    for (const auto& a : algorithms) grid.algorithms.push_back(parse_algorithm(a));
    if (grid.algorithms.empty()) grid.algorithms.push_back(c.algorithm);
    CampaignOptions opt;
    opt.n_runs = runs;
    opt.parallelism = parallelism;
    opt.paired = paired;
    CampaignResult res;
    {
        py::gil_scoped_release release;
        res = run_campaign(c, grid, opt);
    }
    json out{{"paired", res.paired}, {"runs", json::array()}, {"summary", json::array()}};
    for (const auto& r : res.runs)
        out["runs"].push_back({{"algorithm", r.algorithm},
                               {"scenario", r.scenario},
                               {"run_index", r.run_index},
                               {"seed", r.seed},
                               {"topology_retries", r.topology_retries},
                               {"metrics", metrics_json(r.aggregates)}});
    for (const auto& g : res.aggregates) {
        json metrics = json::object();
        for (const auto& m : g.metrics)
            metrics[m.name] = {{"n", m.n}, {"mean", m.mean}, {"ci95", m.ci95 ? json(*m.ci95) : json(nullptr)}};
        out["summary"].push_back(
            {{"algorithm", g.algorithm}, {"scenario", g.scenario}, {"runs", g.runs}, {"metrics", metrics}});
    }
    return out.dump();
}

std::int64_t lv_delta_py(std::uint64_t q, std::uint64_t z, std::uint32_t p, std::uint32_t slots,
                         std::uint32_t channels, const std::vector<std::tuple<std::uint64_t, std::uint64_t, bool>>& nbrs,
                         bool use_z) {
    NeighborhoodView view;
    LinkIndex next = 1;
    for (const auto& [nq, nz, primary] : nbrs)
        view.push_back({next++, nq, nz, primary ? ConflictClass::Primary : ConflictClass::Secondary});
    return lv_delta(q, z, p, slots, channels, view, use_z);
}

}  // namespace

PYBIND11_MODULE(_lvsim, m) {
    m.doc() = "TSCH slotframe scheduling simulator";
    m.def("default_config", &default_config);
    m.def("run_once", &run_once_json, py::arg("config"), py::arg("verify") = false);
    m.def("campaign", &campaign_json, py::arg("config"), py::arg("algorithms"), py::arg("packets_per_burst"),
          py::arg("interarrivals"), py::arg("runs"), py::arg("parallelism"), py::arg("paired"));
    m.def("lv_delta", &lv_delta_py, py::arg("q"), py::arg("z"), py::arg("p"), py::arg("slots"), py::arg("channels"),
          py::arg("neighbors"), py::arg("use_z") = false);
    m.def("jain_index", [](const std::vector<double>& v) { return jain_index(v); });
    m.def("g_index", [](const std::vector<double>& v) { return g_index(v); });
}
