#pragma once

#include <string>

#include "mwnc/coopsched.hpp"
#include "mwnc/simulator.hpp"

namespace mwnc::io {

// Topology files: {"prp": [[...]], "K": int}.
std::string topology_json(const Topology& topo);
Topology topology_from_json(const std::string& text);
Topology load_topology(const std::string& path);
void save_topology(const Topology& topo, const std::string& path);

// Plan files: {capacity, rounds: [{relays, phi}], assignment, relays, receivers}.
std::string plan_json(const PlanResult& result);

std::string metrics_json(const Metrics& m);

// Sweep/compare rows. Stable column order:
// protocol,N,K,W,V,rho,seed,throughput_min,throughput_mean,delay_mean,delay_max,loss,ops_per_packet
std::string metrics_csv_header();
std::string metrics_csv_row(const Metrics& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mwnc::io
