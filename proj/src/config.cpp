#include "lvsim/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lvsim {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw std::runtime_error("config: " + where + " must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw std::runtime_error("config: unknown key '" + key + "' in " + where);
}

template <typename T>
void take(const json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

RunConfig apply_config_json(const json& j, RunConfig c) {
    check_keys(j,
               {"nodes", "area_side", "min_neighbors", "min_pdr", "slotframe_size", "channels",
                "slot_duration", "max_retries", "queue_capacity", "algorithm", "threshold", "ewma_alpha",
                "backlog_drain_frames", "traffic", "packets_per_burst", "burst_times", "interarrival",
                "interarrival_jitter", "start_window", "horizon", "seed", "parents", "runs",
                "reserve_slot0", "housekeeping_period", "radio", "energy"},
               "config");
    take(j, "nodes", c.n_nodes);
    take(j, "area_side", c.area_side);
    take(j, "min_neighbors", c.min_neighbors);
    take(j, "min_pdr", c.min_pdr);
    take(j, "slotframe_size", c.slots);
    take(j, "channels", c.channels);
    take(j, "slot_duration", c.slot_duration);
    take(j, "max_retries", c.max_retries);
    take(j, "queue_capacity", c.queue_capacity);
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    take(j, "threshold", c.otf.threshold);
    take(j, "ewma_alpha", c.otf.ewma_alpha);
    take(j, "backlog_drain_frames", c.otf.backlog_drain_frames);
    if (j.contains("traffic")) c.traffic.mode = parse_traffic_mode(j.at("traffic").get<std::string>());
    take(j, "packets_per_burst", c.traffic.packets_per_burst);
    take(j, "burst_times", c.traffic.burst_times);
    take(j, "interarrival", c.traffic.interarrival);
    take(j, "interarrival_jitter", c.traffic.interarrival_jitter);
    if (j.contains("start_window")) {
        const auto& w = j.at("start_window");
        c.traffic.start_window = {w.at(0).get<double>(), w.at(1).get<double>()};
    }
    take(j, "horizon", c.horizon_frames);
    take(j, "seed", c.seed);
    take(j, "parents", c.parents_max);
    take(j, "runs", c.runs_per_sample);
    take(j, "reserve_slot0", c.reserve_slot0);
    take(j, "housekeeping_period", c.housekeeping_period);
    if (j.contains("radio")) {
        const auto& r = j.at("radio");
        check_keys(r,
                   {"tx_power_dbm", "reference_loss_db", "reference_distance_m", "path_loss_exponent",
                    "shadowing_sigma_db", "sensitivity_dbm", "waterfall"},
                   "radio");
        take(r, "tx_power_dbm", c.radio.tx_power_dbm);
        take(r, "reference_loss_db", c.radio.reference_loss_db);
        take(r, "reference_distance_m", c.radio.reference_distance_m);
        take(r, "path_loss_exponent", c.radio.path_loss_exponent);
        take(r, "shadowing_sigma_db", c.radio.shadowing_sigma_db);
        take(r, "sensitivity_dbm", c.radio.sensitivity_dbm);
        if (r.contains("waterfall")) {
            c.radio.waterfall.clear();
            for (const auto& p : r.at("waterfall"))
                c.radio.waterfall.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
            for (std::size_t i = 1; i < c.radio.waterfall.size(); ++i)
                if (c.radio.waterfall[i].first <= c.radio.waterfall[i - 1].first ||
                    c.radio.waterfall[i].second < c.radio.waterfall[i - 1].second)
                    throw std::runtime_error("config: waterfall must be increasing in rssi and pdr");
        }
    }
    if (j.contains("energy")) {
        const auto& e = j.at("energy");
        check_keys(e, {"tx_data_rx_ack", "rx_data_tx_ack", "idle_listen", "sleep"}, "energy");
        take(e, "tx_data_rx_ack", c.energy.tx_data_rx_ack);
        take(e, "rx_data_tx_ack", c.energy.rx_data_tx_ack);
        take(e, "idle_listen", c.energy.idle_listen);
        take(e, "sleep", c.energy.sleep);
    }
    c.validate();
    return c;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    return apply_config_json(json::parse(in, nullptr, true, /*ignore_comments=*/true), std::move(base));
}

json config_to_json(const RunConfig& c) {
    json waterfall = json::array();
    for (const auto& [rssi, pdr] : c.radio.waterfall) waterfall.push_back({rssi, pdr});
    return {
        {"nodes", c.n_nodes},
        {"area_side", c.area_side},
        {"min_neighbors", c.min_neighbors},
        {"min_pdr", c.min_pdr},
        {"slotframe_size", c.slots},
        {"channels", c.channels},
        {"slot_duration", c.slot_duration},
        {"max_retries", c.max_retries},
        {"queue_capacity", c.queue_capacity},
        {"algorithm", std::string(to_string(c.algorithm))},
        {"threshold", c.otf.threshold},
        {"ewma_alpha", c.otf.ewma_alpha},
        {"backlog_drain_frames", c.otf.backlog_drain_frames},
        {"traffic", std::string(to_string(c.traffic.mode))},
        {"packets_per_burst", c.traffic.packets_per_burst},
        {"burst_times", c.traffic.burst_times},
        {"interarrival", c.traffic.interarrival},
        {"interarrival_jitter", c.traffic.interarrival_jitter},
        {"start_window", {c.traffic.start_window.first, c.traffic.start_window.second}},
        {"horizon", c.horizon_frames},
        {"seed", c.seed},
        {"parents", c.parents_max},
        {"runs", c.runs_per_sample},
        {"reserve_slot0", c.reserve_slot0},
        {"housekeeping_period", c.housekeeping_period},
        {"radio",
         {{"tx_power_dbm", c.radio.tx_power_dbm},
          {"reference_loss_db", c.radio.reference_loss_db},
          {"reference_distance_m", c.radio.reference_distance_m},
          {"path_loss_exponent", c.radio.path_loss_exponent},
          {"shadowing_sigma_db", c.radio.shadowing_sigma_db},
          {"sensitivity_dbm", c.radio.sensitivity_dbm},
          {"waterfall", waterfall}}},
        {"energy",
         {{"tx_data_rx_ack", c.energy.tx_data_rx_ack},
          {"rx_data_tx_ack", c.energy.rx_data_tx_ack},
          {"idle_listen", c.energy.idle_listen},
          {"sleep", c.energy.sleep}}},
    };
}

}  // namespace lvsim
