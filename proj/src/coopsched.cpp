#include "mwnc/coopsched.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace mwnc {

namespace {

// Best transmitter for receiver j among the subset plus the source. Scanning
// in ascending id order with a strict compare makes ties land on the lowest
// id (so the source wins them).
int best_transmitter(int j, const std::vector<int>& subset, const Topology& topo) {
    int best = 0;
    double best_c = topo.at(0, j);
    for (const int i : subset) {
        if (topo.at(i, j) > best_c) {
            best = i;
            best_c = topo.at(i, j);
        }
    }
    return best;
}

std::vector<std::pair<int, int>> assign_all(const std::vector<int>& receivers,
                                            const std::vector<int>& subset,
                                            const Topology& topo) {
    std::vector<std::pair<int, int>> out;
    out.reserve(receivers.size());
    for (const int j : receivers) out.emplace_back(j, best_transmitter(j, subset, topo));
    return out;
}

}  // namespace

GreedyCover greedy_cover(const std::vector<int>& candidates, const std::vector<int>& receivers,
                         const Topology& topo) {
    GreedyCover result;
    // assignment starts at the source for everyone
    std::map<int, int> tx;
    for (const int j : receivers) tx[j] = 0;

    std::vector<int> pool = candidates;
    std::sort(pool.begin(), pool.end());

    const int max_relays = std::max(0, topo.channels - 1);
    while (static_cast<int>(result.subset.size()) < max_relays) {
        int best = -1;
        double best_gain = 0.0;
        for (const int i : pool) {  // ascending, so equal gains keep the lowest id
            if (std::find(result.subset.begin(), result.subset.end(), i) != result.subset.end())
                continue;
            double gain = 0.0;
            for (const int j : receivers) {
                const double d = topo.at(i, j) - topo.at(tx[j], j);
                if (d > 0) gain += d;
            }
            if (gain > best_gain) {
                best = i;
                best_gain = gain;
            }
        }
        if (best == -1 || best_gain <= kSchedEps) break;
        result.subset.push_back(best);
        for (const int j : receivers) {
            if (topo.at(best, j) > topo.at(tx[j], j)) tx[j] = best;
        }
    }
    std::sort(result.subset.begin(), result.subset.end());
    for (const int j : receivers) {
        result.assignment.emplace_back(j, tx[j]);
        result.capacity += topo.at(tx[j], j);
    }
    return result;
}

BruteCover brute_force_cover(const std::vector<int>& candidates,
                             const std::vector<int>& receivers, const Topology& topo) {
    if (candidates.size() > 12)
        throw std::domain_error("brute_force_cover: enumeration guard (> 12 candidates)");
    const int max_relays = std::max(0, topo.channels - 1);
    BruteCover best;
    const std::uint32_t masks = 1u << candidates.size();
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
        if (std::popcount(mask) > max_relays) continue;
        std::vector<int> subset;
        for (std::size_t b = 0; b < candidates.size(); ++b)
            if (mask & (1u << b)) subset.push_back(candidates[b]);
        double cap = 0.0;
        for (const int j : receivers) {
            double c = topo.at(0, j);
            for (const int i : subset) c = std::max(c, topo.at(i, j));
            cap += c;
        }
        if (cap > best.capacity + kSchedEps || mask == 0) {
            best.capacity = cap;
            best.subset = subset;
        }
    }
    return best;
}

std::optional<RelayPlan> allocate_relay_time(const std::vector<int>& relays,
                                             const std::vector<int>& receivers, double c_target,
                                             const Topology& topo) {
    RelayPlan plan;
    plan.relays = relays;
    plan.receivers = receivers;
    plan.capacity = c_target;
    if (receivers.empty() || c_target <= kSchedEps) return plan;

    std::map<int, double> residual_time;  // C_i
    for (const int i : relays) {
        if (topo.at(0, i) < c_target - kSchedEps)
            throw std::domain_error("allocate_relay_time: relay below target capacity");
        if (topo.at(0, i) <= 0.0) continue;
        const double c = (topo.at(0, i) - c_target) / topo.at(0, i);
        if (c > kSchedEps) residual_time[i] = c;
    }
    std::map<int, double> demand;  // D_j
    for (const int j : receivers) demand[j] = c_target;

    double phi_sum = 0.0;
    while (!residual_time.empty() && !demand.empty() && phi_sum < 1.0 - kSchedEps) {
        std::vector<int> active_relays, active_receivers;
        for (const auto& kv : residual_time) active_relays.push_back(kv.first);
        for (const auto& kv : demand) active_receivers.push_back(kv.first);

        const GreedyCover cover = greedy_cover(active_relays, active_receivers, topo);
        if (cover.subset.empty()) break;

        double phi = 1.0 - phi_sum;
        for (const int i : cover.subset) phi = std::min(phi, residual_time[i]);
        for (const auto& [j, tx] : cover.assignment) {
            const double c = topo.at(tx, j);
            if (c > kSchedEps) phi = std::min(phi, demand[j] / c);
        }
        if (phi <= kSchedEps) break;

        PlanRound round;
        round.relays = cover.subset;
        round.phi = phi;
        round.assignment = assign_all(receivers, cover.subset, topo);
        plan.rounds.push_back(round);
        phi_sum += phi;

        for (const int i : cover.subset) {
            residual_time[i] -= phi;
            if (residual_time[i] <= kSchedEps) residual_time.erase(i);
        }
        for (const auto& [j, tx] : cover.assignment) {
            demand[j] -= phi * topo.at(tx, j);
            if (demand[j] <= kSchedEps) demand.erase(j);
        }
    }

    // Whatever demand remains must fit in the leftover source-only time; the
    // worked example relies on exactly this residual source service.
    const double left = 1.0 - phi_sum;
    for (const auto& [j, d] : demand) {
        if (d > left * topo.at(0, j) + kSchedEps) return std::nullopt;
    }
    return plan;
}

PlanResult select_relays(const Topology& topo, double delta) {
    if (delta <= 0.0) throw std::domain_error("select_relays: tolerance must be positive");
    const std::vector<int> clients = topo.client_ids();

    PlanResult best;
    best.capacity = 0.0;
    best.plan.relays = clients;  // C_T = 0: every node qualifies, nothing to serve
    best.plan.capacity = 0.0;

    double lo = 0.0, hi = 1.0;
    while (hi - lo > delta) {
        const double target = (hi + lo) / 2.0;
        std::vector<int> relays, receivers;
        for (const int j : clients) {
            if (topo.at(0, j) >= target - kSchedEps)
                relays.push_back(j);
            else
                receivers.push_back(j);
        }
        auto plan = allocate_relay_time(relays, receivers, target, topo);
        if (plan.has_value()) {
            lo = target;
            best.capacity = target;
            best.plan = std::move(*plan);
        } else {
            hi = target;
        }
    }
    return best;
}

std::vector<double> equivalent_capacity(const RelayPlan& plan, const Topology& topo) {
    std::vector<double> cap(static_cast<std::size_t>(topo.nodes), 0.0);
    cap[0] = 1.0;

    std::vector<double> relay_share(static_cast<std::size_t>(topo.nodes), 0.0);
    for (const auto& round : plan.rounds)
        for (const int i : round.relays) relay_share[static_cast<std::size_t>(i)] += round.phi;

    for (const int i : plan.relays)
        cap[static_cast<std::size_t>(i)] = (1.0 - relay_share[static_cast<std::size_t>(i)]) * topo.at(0, i);

    const double left = 1.0 - plan.phi_total();
    for (const int j : plan.receivers) {
        double c = left * topo.at(0, j);
        for (const auto& round : plan.rounds) {
            for (const auto& [r, tx] : round.assignment) {
                if (r == j) {
                    c += round.phi * topo.at(tx, j);
                    break;
                }
            }
        }
        cap[static_cast<std::size_t>(j)] = c;
    }
    return cap;
}

int round_for(const RelayPlan& plan, double x) {
    double cum = 0.0;
    for (std::size_t l = 0; l < plan.rounds.size(); ++l) {
        cum += plan.rounds[l].phi;
        if (x < cum) return static_cast<int>(l);
    }
    return -1;
}

int draw_slot(const RelayPlan& plan, Rng& rng) { return round_for(plan, rng.uniform01()); }

}  // namespace mwnc
