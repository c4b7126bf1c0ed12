#include "mwnc/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace mwnc {

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::kMwnc: return "mwnc";
        case Protocol::kMwncast: return "mwncast";
        case Protocol::kRlnc: return "rlnc";
        case Protocol::kCoopRlnc: return "coop-rlnc";
    }
    return "?";
}

std::optional<Protocol> parse_protocol(const std::string& name) {
    if (name == "mwnc") return Protocol::kMwnc;
    if (name == "mwncast") return Protocol::kMwncast;
    if (name == "rlnc") return Protocol::kRlnc;
    if (name == "coop-rlnc" || name == "cooprlnc") return Protocol::kCoopRlnc;
    return std::nullopt;
}

Topology generate_topology(int receivers, int channels, std::uint64_t seed, double radius,
                           double d0, double alpha) {
    if (receivers < 1) throw std::domain_error("generate_topology: need at least one receiver");
    Topology topo;
    topo.nodes = receivers + 1;
    topo.channels = channels;
    topo.prp.assign(static_cast<std::size_t>(topo.nodes) * topo.nodes, 1.0);

    Rng rng = Rng::stream(seed, 0x746f706fULL);
    std::vector<double> xs{0.0}, ys{0.0};  // source at the center
    for (int i = 0; i < receivers; ++i) {
        const double r = radius * std::sqrt(rng.uniform01());
        const double phi = 2.0 * 3.14159265358979323846 * rng.uniform01();
        xs.push_back(r * std::cos(phi));
        ys.push_back(r * std::sin(phi));
    }
    for (int i = 0; i < topo.nodes; ++i) {
        for (int j = 0; j < topo.nodes; ++j) {
            if (i == j) continue;
            const double d = std::hypot(xs[i] - xs[j], ys[i] - ys[j]);
            topo.at(i, j) = std::exp(-std::pow(d / d0, alpha));
        }
    }
    return topo;
}

namespace {

constexpr std::int64_t kSpeedDen = 10000;

Rational snap_speed(double v) {
    auto num = static_cast<std::int64_t>(std::floor(v * kSpeedDen));
    num = std::clamp<std::int64_t>(num, 1, kSpeedDen - 1);
    return Rational(num, kSpeedDen);
}

// Measured packet range: ids that entered the window after warm-up and whose
// fate is decided within the horizon.
struct MeasureWindow {
    std::int64_t id_min;
    std::int64_t id_max;
    std::int64_t warm;
};

struct NodeAccum {
    std::uint64_t decoded{0}, lost{0};
    double delay_sum{0}, delay_max{0};
    std::uint64_t ops_at_warm{0};
};

struct PlanContext {
    RelayPlan plan;
    double capacity{0};
    std::vector<bool> is_relay;
};

PlanContext make_plan(const SimConfig& cfg) {
    PlanContext ctx;
    ctx.is_relay.assign(static_cast<std::size_t>(cfg.topo.nodes), false);
    const bool cooperative =
        cfg.protocol == Protocol::kMwncast || cfg.protocol == Protocol::kCoopRlnc;
    if (cooperative) {
        PlanResult pr = select_relays(cfg.topo, cfg.delta);
        ctx.plan = std::move(pr.plan);
        ctx.capacity = pr.capacity;
        for (const int r : ctx.plan.relays) ctx.is_relay[static_cast<std::size_t>(r)] = true;
    } else {
        double worst = 1.0;
        for (const int j : cfg.topo.client_ids()) worst = std::min(worst, cfg.topo.at(0, j));
        ctx.capacity = worst;
        ctx.plan.receivers = cfg.topo.client_ids();
    }
    return ctx;
}

// Transmitter the receiver tunes to this slot: best PRP among the source and
// the scheduled relays, ties to the lowest id. Relays only ever listen to the
// source.
int pick_transmitter(int node, bool node_is_relay, const std::vector<int>& active,
                     const Topology& topo) {
    if (node_is_relay) return 0;
    int best = 0;
    double best_c = topo.at(0, node);
    for (const int r : active) {
        if (topo.at(r, node) > best_c) {
            best = r;
            best_c = topo.at(r, node);
        }
    }
    return best;
}

void finalize(Metrics& m, const std::vector<NodeAccum>& acc, const std::vector<std::uint64_t>& ops_end,
              const std::vector<bool>& is_relay, std::int64_t measured_slots) {
    std::uint64_t all_lost = 0, all_total = 0;
    double thr_sum = 0, delay_w_sum = 0;
    std::uint64_t delay_n = 0;
    m.throughput_min = 1e300;
    for (std::size_t i = 1; i < acc.size(); ++i) {
        const NodeAccum& a = acc[i];
        NodeMetrics nm;
        nm.node = static_cast<int>(i);
        nm.relay = is_relay[i];
        nm.decoded = a.decoded;
        nm.lost = a.lost;
        nm.throughput = measured_slots > 0
                            ? static_cast<double>(a.decoded) / static_cast<double>(measured_slots)
                            : 0.0;
        nm.delay_mean = a.decoded > 0 ? a.delay_sum / static_cast<double>(a.decoded) : 0.0;
        nm.delay_max = a.delay_max;
        const std::uint64_t tot = a.decoded + a.lost;
        nm.loss = tot > 0 ? static_cast<double>(a.lost) / static_cast<double>(tot) : 0.0;
        const std::uint64_t ops = ops_end[i] - a.ops_at_warm;
        nm.ops_per_packet = a.decoded > 0 ? static_cast<double>(ops) / static_cast<double>(a.decoded) : 0.0;
        m.per_node.push_back(nm);

        all_lost += a.lost;
        all_total += tot;
        thr_sum += nm.throughput;
        m.throughput_min = std::min(m.throughput_min, nm.throughput);
        delay_w_sum += a.delay_sum;
        delay_n += a.decoded;
        m.delay_max = std::max(m.delay_max, nm.delay_max);
        m.ops_per_packet += nm.ops_per_packet;
    }
    const double clients = static_cast<double>(acc.size() - 1);
    m.throughput_mean = thr_sum / clients;
    m.delay_mean = delay_n > 0 ? delay_w_sum / static_cast<double>(delay_n) : 0.0;
    m.loss = all_total > 0 ? static_cast<double>(all_lost) / static_cast<double>(all_total) : 0.0;
    m.ops_per_packet /= clients;
    if (m.throughput_min > 1e299) m.throughput_min = 0;
}

Metrics run_window_coded(const SimConfig& cfg, const PlanContext& ctx, const Rational& speed) {
    const Topology& topo = cfg.topo;
    const CodecParams params{cfg.window, speed, cfg.payload_len};
    const DeterministicPacketSource source(cfg.seed ^ 0x9e3779b97f4a7c15ULL, cfg.payload_len);

    const std::int64_t warm = cfg.slots / 20;
    const MeasureWindow mw{speed.ceil_mul(warm) + 1, speed.ceil_mul(cfg.slots + 1) - cfg.window,
                           warm};

    std::vector<Decoder> dec;
    dec.reserve(static_cast<std::size_t>(topo.nodes));
    for (int i = 0; i < topo.nodes; ++i) dec.emplace_back(params);
    std::vector<NodeAccum> acc(static_cast<std::size_t>(topo.nodes));

    Rng rng = Rng::stream(cfg.seed, 1);

    // Continuous encode instant of a packet: the moment the window head
    // reaches it. Decode instants are end-of-slot.
    const auto enc_time = [&](std::int64_t id) {
        return static_cast<double>(id - 1) * static_cast<double>(speed.den) /
               static_cast<double>(speed.num);
    };

    for (std::int64_t t = 1; t <= cfg.slots; ++t) {
        const int round =
            ctx.plan.rounds.empty() ? -1 : draw_slot(ctx.plan, rng);
        static const std::vector<int> kNone;
        const std::vector<int>& active = round >= 0 ? ctx.plan.rounds[static_cast<std::size_t>(round)].relays : kNone;
        assert(static_cast<int>(active.size()) <= std::max(0, topo.channels - 1));

        const CodedSymbol src_sym = encode(t, source, params, rng);
        std::vector<std::optional<CodedSymbol>> relay_sym(static_cast<std::size_t>(topo.nodes));
        for (const int r : active) relay_sym[static_cast<std::size_t>(r)] = dec[static_cast<std::size_t>(r)].recode(t, rng);

        for (int node = 1; node < topo.nodes; ++node) {
            const bool transmitting =
                std::find(active.begin(), active.end(), node) != active.end();
            const int tx = pick_transmitter(node, ctx.is_relay[static_cast<std::size_t>(node)], active, topo);
            const bool received = rng.bernoulli(topo.at(tx, node));
            if (transmitting || !received) continue;  // half-duplex or erasure
            const CodedSymbol* sym = nullptr;
            if (tx == 0)
                sym = &src_sym;
            else if (relay_sym[static_cast<std::size_t>(tx)])
                sym = &*relay_sym[static_cast<std::size_t>(tx)];
            if (!sym) continue;  // scheduled relay had nothing to say
            auto event = dec[static_cast<std::size_t>(node)].ingest(*sym);
            if (!event) continue;
            NodeAccum& a = acc[static_cast<std::size_t>(node)];
            for (const auto& [id, payload] : event->packets) {
                if (payload != source.packet(id))
                    throw std::runtime_error("simulator: decoded payload mismatch");
                if (id < mw.id_min || id > mw.id_max) continue;
                ++a.decoded;
                const double delay = static_cast<double>(t) - enc_time(id);
                a.delay_sum += delay;
                a.delay_max = std::max(a.delay_max, delay);
            }
        }
        for (int node = 1; node < topo.nodes; ++node) {
            auto loss = dec[static_cast<std::size_t>(node)].advance(t);
            if (!loss) continue;
            NodeAccum& a = acc[static_cast<std::size_t>(node)];
            for (const std::int64_t id : loss->packets) {
                if (id >= mw.id_min && id <= mw.id_max) ++a.lost;
            }
        }
        if (t == warm) {
            for (int node = 1; node < topo.nodes; ++node)
                acc[static_cast<std::size_t>(node)].ops_at_warm = dec[static_cast<std::size_t>(node)].counters().ops;
        }
    }

    Metrics m;
    m.protocol = cfg.protocol;
    m.nodes = topo.nodes - 1;
    m.channels = topo.channels;
    m.window = cfg.window;
    m.v_used = speed.value();
    m.rho = cfg.rho.value_or(ctx.capacity > 0 ? speed.value() / ctx.capacity : 0.0);
    m.seed = cfg.seed;
    m.capacity = ctx.capacity;
    std::vector<std::uint64_t> ops_end(static_cast<std::size_t>(topo.nodes), 0);
    for (int node = 1; node < topo.nodes; ++node)
        ops_end[static_cast<std::size_t>(node)] = dec[static_cast<std::size_t>(node)].counters().ops;
    finalize(m, acc, ops_end, ctx.is_relay, cfg.slots - warm);
    return m;
}

// ---- RLNC baseline ----------------------------------------------------------

struct RlncRow {
    gf::FieldVector coef;  // dense from pivot to block end, coef[0] == 1
    std::vector<std::uint8_t> payload;
};

struct RlncNode {
    std::vector<std::optional<RlncRow>> rows;
    std::vector<std::vector<std::uint8_t>> decoded;
    int rank{0};
    bool done{false};
    std::uint64_t ops{0};
    std::uint64_t decode_slot{0};

    void reset(std::int64_t block_size) {
        rows.assign(static_cast<std::size_t>(block_size), std::nullopt);
        decoded.assign(static_cast<std::size_t>(block_size), {});
        rank = 0;
        done = false;
    }
};

void rlnc_payload_axpy(std::vector<std::uint8_t>& payload, const std::vector<std::uint8_t>& other,
                       gf::FieldElement scale) {
    for (std::size_t i = 0; i < payload.size(); ++i)
        payload[i] = gf::add(payload[i], gf::mul(scale, other[i]));
}

// Reduce-and-insert; on full rank, back-substitute. Same operation accounting
// as the moving-window decoder.
bool rlnc_ingest(RlncNode& node, gf::FieldVector vec, std::vector<std::uint8_t> payload,
                 std::int64_t block_size) {
    if (node.done) return false;
    std::size_t p = 0;
    const std::size_t b = static_cast<std::size_t>(block_size);
    while (true) {
        while (p < b && vec[p] == 0) ++p;
        if (p >= b) return false;
        if (!node.rows[p]) break;
        const RlncRow& row = *node.rows[p];
        const gf::FieldElement scale = vec[p];
        node.ops += gf::row_axpy({vec.data() + p, row.coef.size()}, row.coef, scale);
        rlnc_payload_axpy(payload, row.payload, scale);
    }
    RlncRow row;
    row.coef.assign(vec.begin() + static_cast<std::ptrdiff_t>(p), vec.end());
    const gf::FieldElement lead = row.coef[0];
    if (lead != 1) {
        gf::row_scale(row.coef, gf::inv(lead));
        gf::row_scale(payload, gf::inv(lead));
    }
    row.payload = std::move(payload);
    node.rows[p] = std::move(row);
    ++node.rank;
    if (node.rank < block_size) return false;

    for (std::size_t q = b; q-- > 0;) {
        RlncRow& r = *node.rows[q];
        for (std::size_t k = 1; k < r.coef.size(); ++k) {
            if (r.coef[k] == 0) continue;
            rlnc_payload_axpy(r.payload, node.decoded[q + k], r.coef[k]);
            ++node.ops;
        }
        node.decoded[q] = r.payload;
    }
    node.done = true;
    return true;
}

Metrics run_block_coded(const SimConfig& cfg, const PlanContext& ctx) {
    const Topology& topo = cfg.topo;
    const std::int64_t block = cfg.block_size;
    if (block < 1) throw std::domain_error("run: block size must be >= 1");
    const DeterministicPacketSource source(cfg.seed ^ 0x9e3779b97f4a7c15ULL, cfg.payload_len);

    const std::int64_t warm = cfg.slots / 20;
    std::vector<RlncNode> nodes(static_cast<std::size_t>(topo.nodes));
    for (auto& n : nodes) n.reset(block);
    std::vector<NodeAccum> acc(static_cast<std::size_t>(topo.nodes));

    Rng rng = Rng::stream(cfg.seed, 1);
    std::int64_t block_base = 0;   // packets (block_base, block_base + block]
    std::int64_t block_start = 1;  // first slot of the current block

    for (std::int64_t t = 1; t <= cfg.slots; ++t) {
        const int round = ctx.plan.rounds.empty() ? -1 : draw_slot(ctx.plan, rng);
        static const std::vector<int> kNone;
        const std::vector<int>& active =
            round >= 0 ? ctx.plan.rounds[static_cast<std::size_t>(round)].relays : kNone;

        // Source symbol: uniform combination over the whole block.
        gf::FieldVector src_vec(static_cast<std::size_t>(block));
        bool nonzero = false;
        while (!nonzero)
            for (auto& c : src_vec) nonzero |= (c = rng.byte()) != 0;
        std::vector<std::uint8_t> src_payload(cfg.payload_len, 0);
        for (std::size_t i = 0; i < src_vec.size(); ++i) {
            if (src_vec[i] == 0) continue;
            rlnc_payload_axpy(src_payload, source.packet(block_base + static_cast<std::int64_t>(i) + 1),
                              src_vec[i]);
        }

        // Relay recodes: random combination of the relay's rows.
        std::vector<std::optional<std::pair<gf::FieldVector, std::vector<std::uint8_t>>>> relay_sym(
            static_cast<std::size_t>(topo.nodes));
        for (const int r : active) {
            RlncNode& rn = nodes[static_cast<std::size_t>(r)];
            if (rn.rank == 0) continue;  // silence
            gf::FieldVector vec(static_cast<std::size_t>(block), 0);
            std::vector<std::uint8_t> pay(cfg.payload_len, 0);
            bool any = false;
            for (std::size_t p = 0; p < rn.rows.size(); ++p) {
                if (!rn.rows[p]) continue;
                const gf::FieldElement c = rng.byte();
                if (c == 0) continue;
                gf::row_axpy({vec.data() + p, rn.rows[p]->coef.size()}, rn.rows[p]->coef, c);
                rlnc_payload_axpy(pay, rn.rows[p]->payload, c);
                any = true;
            }
            for (const auto c : vec) any |= c != 0;
            if (any) relay_sym[static_cast<std::size_t>(r)] = std::make_pair(std::move(vec), std::move(pay));
        }

        for (int node = 1; node < topo.nodes; ++node) {
            const bool transmitting =
                std::find(active.begin(), active.end(), node) != active.end();
            const int tx = pick_transmitter(node, ctx.is_relay[static_cast<std::size_t>(node)], active, topo);
            const bool received = rng.bernoulli(topo.at(tx, node));
            if (transmitting || !received) continue;
            const gf::FieldVector* vec = nullptr;
            const std::vector<std::uint8_t>* pay = nullptr;
            if (tx == 0) {
                vec = &src_vec;
                pay = &src_payload;
            } else if (relay_sym[static_cast<std::size_t>(tx)]) {
                vec = &relay_sym[static_cast<std::size_t>(tx)]->first;
                pay = &relay_sym[static_cast<std::size_t>(tx)]->second;
            }
            if (!vec) continue;
            RlncNode& rn = nodes[static_cast<std::size_t>(node)];
            if (rlnc_ingest(rn, *vec, *pay, block)) rn.decode_slot = static_cast<std::uint64_t>(t);
        }

        bool all_done = true;
        for (int node = 1; node < topo.nodes; ++node) all_done &= nodes[static_cast<std::size_t>(node)].done;
        if (all_done) {
            // Genie feedback: every receiver finished, advance the block.
            const bool measured = block_start > warm;
            for (int node = 1; node < topo.nodes; ++node) {
                RlncNode& rn = nodes[static_cast<std::size_t>(node)];
                if (measured) {
                    NodeAccum& a = acc[static_cast<std::size_t>(node)];
                    for (std::int64_t k = 0; k < block; ++k) {
                        if (nodes[static_cast<std::size_t>(node)].decoded[static_cast<std::size_t>(k)] !=
                            source.packet(block_base + k + 1))
                            throw std::runtime_error("simulator: RLNC payload mismatch");
                        ++a.decoded;
                        const double delay = static_cast<double>(rn.decode_slot) -
                                             static_cast<double>(block_start - 1);
                        a.delay_sum += delay;
                        a.delay_max = std::max(a.delay_max, delay);
                    }
                }
                rn.reset(block);
            }
            block_base += block;
            block_start = t + 1;
        }
        if (t == warm) {
            for (int node = 1; node < topo.nodes; ++node)
                acc[static_cast<std::size_t>(node)].ops_at_warm = nodes[static_cast<std::size_t>(node)].ops;
        }
    }

    Metrics m;
    m.protocol = cfg.protocol;
    m.nodes = topo.nodes - 1;
    m.channels = topo.channels;
    m.window = block;
    m.v_used = 0.0;
    m.rho = cfg.rho.value_or(0.0);
    m.seed = cfg.seed;
    m.capacity = ctx.capacity;
    std::vector<std::uint64_t> ops_end(static_cast<std::size_t>(topo.nodes), 0);
    for (int node = 1; node < topo.nodes; ++node)
        ops_end[static_cast<std::size_t>(node)] = nodes[static_cast<std::size_t>(node)].ops;
    finalize(m, acc, ops_end, ctx.is_relay, cfg.slots - warm);
    return m;
}

}  // namespace

Metrics run(const SimConfig& cfg) {
    if (cfg.slots < 1) throw std::domain_error("run: horizon must be >= 1 slot");
    if (cfg.topo.nodes < 2) throw std::domain_error("run: topology has no receivers");
    const PlanContext ctx = make_plan(cfg);

    if (cfg.protocol == Protocol::kRlnc || cfg.protocol == Protocol::kCoopRlnc)
        return run_block_coded(cfg, ctx);

    if (cfg.speed.has_value() == cfg.rho.has_value())
        throw std::domain_error("run: give exactly one of speed or rho");
    Rational speed{1, 2};
    if (cfg.speed) {
        speed = *cfg.speed;
    } else {
        if (ctx.capacity <= 0.0)
            throw std::domain_error("run: plan capacity is zero, cannot derive V from rho");
        speed = snap_speed(*cfg.rho * ctx.capacity);
    }
    if (!(speed.num > 0 && speed.num <= speed.den))
        throw std::domain_error("run: V must be in (0, 1]");
    return run_window_coded(cfg, ctx, speed);
}

}  // namespace mwnc
