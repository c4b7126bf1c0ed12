#include "mwnc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mwnc::io {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string topology_json(const Topology& topo) {
    json j;
    j["K"] = topo.channels;
    json rows = json::array();
    for (int i = 0; i < topo.nodes; ++i) {
        json row = json::array();
        for (int k = 0; k < topo.nodes; ++k) row.push_back(topo.at(i, k));
        rows.push_back(row);
    }
    j["prp"] = rows;
    return j.dump(2) + "\n";
}

Topology topology_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("prp") || !j["prp"].is_array())
        throw std::invalid_argument("topology: missing prp matrix");
    Topology topo;
    topo.nodes = static_cast<int>(j["prp"].size());
    if (topo.nodes < 2) throw std::invalid_argument("topology: need a source and a receiver");
    topo.channels = j.value("K", 1);
    if (topo.channels < 1) throw std::invalid_argument("topology: K must be >= 1");
    topo.prp.assign(static_cast<std::size_t>(topo.nodes) * topo.nodes, 0.0);
    for (int i = 0; i < topo.nodes; ++i) {
        const auto& row = j["prp"][static_cast<std::size_t>(i)];
        if (static_cast<int>(row.size()) != topo.nodes)
            throw std::invalid_argument("topology: prp matrix must be square");
        for (int k = 0; k < topo.nodes; ++k) {
            const double v = row[static_cast<std::size_t>(k)].get<double>();
            if (v < 0.0 || v > 1.0)
                throw std::invalid_argument("topology: PRP entries must lie in [0, 1]");
            topo.at(i, k) = v;
        }
    }
    return topo;
}

Topology load_topology(const std::string& path) { return topology_from_json(read_file(path)); }

void save_topology(const Topology& topo, const std::string& path) {
    write_file(path, topology_json(topo));
}

std::string plan_json(const PlanResult& result) {
    json j;
    j["capacity"] = result.capacity;
    j["relays"] = result.plan.relays;
    j["receivers"] = result.plan.receivers;
    json rounds = json::array();
    for (const auto& r : result.plan.rounds) {
        json jr;
        jr["relays"] = r.relays;
        jr["phi"] = r.phi;
        rounds.push_back(jr);
    }
    j["rounds"] = rounds;
    json assign = json::object();
    for (const int recv : result.plan.receivers) {
        json per_round = json::array();
        for (const auto& r : result.plan.rounds) {
            int tx = 0;
            for (const auto& [node, t] : r.assignment) {
                if (node == recv) {
                    tx = t;
                    break;
                }
            }
            per_round.push_back(tx);
        }
        assign[std::to_string(recv)] = per_round;
    }
    j["assignment"] = assign;
    return j.dump(2) + "\n";
}

std::string metrics_json(const Metrics& m) {
    json j;
    j["protocol"] = protocol_name(m.protocol);
    j["nodes"] = m.nodes;
    j["K"] = m.channels;
    j["W"] = m.window;
    j["V"] = m.v_used;
    j["rho"] = m.rho;
    j["seed"] = m.seed;
    j["capacity"] = m.capacity;
    j["throughput_min"] = m.throughput_min;
    j["throughput_mean"] = m.throughput_mean;
    j["delay_mean"] = m.delay_mean;
    j["delay_max"] = m.delay_max;
    j["loss"] = m.loss;
    j["ops_per_packet"] = m.ops_per_packet;
    json per = json::array();
    for (const auto& n : m.per_node) {
        json jn;
        jn["node"] = n.node;
        jn["relay"] = n.relay;
        jn["decoded"] = n.decoded;
        jn["lost"] = n.lost;
        jn["throughput"] = n.throughput;
        jn["delay_mean"] = n.delay_mean;
        jn["delay_max"] = n.delay_max;
        jn["loss"] = n.loss;
        jn["ops_per_packet"] = n.ops_per_packet;
        per.push_back(jn);
    }
    j["per_node"] = per;
    return j.dump(2) + "\n";
}

std::string metrics_csv_header() {
    return "protocol,N,K,W,V,rho,seed,throughput_min,throughput_mean,delay_mean,delay_max,loss,"
           "ops_per_packet\n";
}

std::string metrics_csv_row(const Metrics& m) {
    std::ostringstream out;
    out << protocol_name(m.protocol) << ',' << m.nodes << ',' << m.channels << ',' << m.window
        << ',' << fmt(m.v_used) << ',' << fmt(m.rho) << ',' << m.seed << ','
        << fmt(m.throughput_min) << ',' << fmt(m.throughput_mean) << ',' << fmt(m.delay_mean)
        << ',' << fmt(m.delay_max) << ',' << fmt(m.loss) << ',' << fmt(m.ops_per_packet) << '\n';
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << content;
}

}  // namespace mwnc::io
