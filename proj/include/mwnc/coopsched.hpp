#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mwnc/rng.hpp"

namespace mwnc {

// Node 0 is the source. prp is the n-by-n packet reception probability
// matrix; entry (i, j) is also the capacity of link i->j. channels is K; at
// most K-1 relays transmit concurrently with the source.
struct Topology {
    int nodes{0};
    std::vector<double> prp;
    int channels{1};

    double at(int i, int j) const { return prp[static_cast<std::size_t>(i) * nodes + j]; }
    double& at(int i, int j) { return prp[static_cast<std::size_t>(i) * nodes + j]; }
    std::vector<int> client_ids() const {
        std::vector<int> ids;
        for (int i = 1; i < nodes; ++i) ids.push_back(i);
        return ids;
    }
};

inline constexpr double kSchedEps = 1e-9;

struct GreedyCover {
    std::vector<int> subset;                       // chosen relays, at most K-1
    std::vector<std::pair<int, int>> assignment;   // receiver -> best transmitter
    double capacity{0.0};                          // sum over receivers of C(tx, j)
};

// Greedy maximum-capacity coverage: start from the source alone, repeatedly
// add the candidate with the largest positive total residual capacity.
// Ties go to the lowest node index.
GreedyCover greedy_cover(const std::vector<int>& candidates, const std::vector<int>& receivers,
                         const Topology& topo);

struct BruteCover {
    std::vector<int> subset;
    double capacity{0.0};
};

// Exhaustive optimum over all relay subsets of size <= K-1. Enumeration guard:
// at most 12 candidates.
BruteCover brute_force_cover(const std::vector<int>& candidates,
                             const std::vector<int>& receivers, const Topology& topo);

struct PlanRound {
    std::vector<int> relays;
    double phi{0.0};
    std::vector<std::pair<int, int>> assignment;  // every end receiver -> best transmitter
};

struct RelayPlan {
    std::vector<int> relays;
    std::vector<int> receivers;
    std::vector<PlanRound> rounds;
    double capacity{0.0};

    double phi_total() const {
        double s = 0.0;
        for (const auto& r : rounds) s += r.phi;
        return s;
    }
};

// Relay-time allocation for a fixed target capacity. Returns the plan iff the
// target is feasible: rounds are assigned greedily, then any residual demand
// must fit into the leftover source-only time.
std::optional<RelayPlan> allocate_relay_time(const std::vector<int>& relays,
                                             const std::vector<int>& receivers, double c_target,
                                             const Topology& topo);

struct PlanResult {
    double capacity{0.0};  // C*, the largest feasible target found
    RelayPlan plan;
};

// Binary search on the target capacity; each probe partitions nodes by their
// source link and checks feasibility via allocate_relay_time.
PlanResult select_relays(const Topology& topo, double delta);

// Per-node equivalent channel capacity under the plan: (1 - Phi_i) * C_{0,i}
// for relays, sum of phi_l * C_{R(j),j} (plus leftover source time) for
// receivers. Index 0 is the source and reads 1.
std::vector<double> equivalent_capacity(const RelayPlan& plan, const Topology& topo);

// Deterministic core of the schedule draw: the round whose cumulative time
// share brackets x in [0, 1), or -1 for a source-only slot.
int round_for(const RelayPlan& plan, double x);

// Stochastic per-slot schedule: round_for on a fresh uniform draw.
int draw_slot(const RelayPlan& plan, Rng& rng);

}  // namespace mwnc
