#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mwnc/codec.hpp"
#include "mwnc/coopsched.hpp"
#include "mwnc/rational.hpp"

namespace mwnc {

enum class Protocol { kMwnc, kMwncast, kRlnc, kCoopRlnc };

const char* protocol_name(Protocol p);
std::optional<Protocol> parse_protocol(const std::string& name);

struct SimConfig {
    Topology topo;
    Protocol protocol{Protocol::kMwnc};
    std::int64_t window{20};
    std::optional<Rational> speed;  // V; exactly one of speed / rho
    std::optional<double> rho;      // target load, sets V = rho * C*
    std::int64_t block_size{20};    // RLNC family
    std::size_t payload_len{4};
    std::int64_t slots{100000};
    std::uint64_t seed{1};
    double delta{1e-3};             // planner tolerance
};

struct NodeMetrics {
    int node{0};
    bool relay{false};
    std::uint64_t decoded{0}, lost{0};
    double throughput{0};
    double delay_mean{0}, delay_max{0};
    double loss{0};
    double ops_per_packet{0};
};

struct Metrics {
    Protocol protocol{Protocol::kMwnc};
    int nodes{0};
    int channels{1};
    std::int64_t window{0};
    double v_used{0};
    double rho{0};
    std::uint64_t seed{0};
    double capacity{0};  // C* used for rho -> V
    std::vector<NodeMetrics> per_node;
    double throughput_min{0}, throughput_mean{0};
    double delay_mean{0}, delay_max{0};
    double loss{0};  // aggregate: total lost / total measured
    double ops_per_packet{0};
};

// Random disk topology: clients uniform around the source, link PRP a
// monotone map of distance, exp(-(d/d0)^alpha), symmetric.
Topology generate_topology(int receivers, int channels, std::uint64_t seed, double radius = 1.0,
                           double d0 = 1.2, double alpha = 2.0);

// One deterministic simulation run. For the cooperative protocols the relay
// plan is computed up front; a zero-capacity plan with a load target is an
// error before any slot runs.
Metrics run(const SimConfig& config);

}  // namespace mwnc
