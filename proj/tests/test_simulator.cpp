#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mwnc/io.hpp"
#include "mwnc/simulator.hpp"

using namespace mwnc;

namespace {

Topology single_link(double prp, int channels = 1) {
    Topology t;
    t.nodes = 2;
    t.channels = channels;
    t.prp.assign(4, 0.0);
    t.at(0, 1) = t.at(1, 0) = prp;
    return t;
}

Topology three_node() {
    Topology t;
    t.nodes = 4;
    t.channels = 2;
    t.prp.assign(16, 0.0);
    t.at(0, 1) = t.at(1, 0) = 0.7;
    t.at(0, 2) = t.at(2, 0) = 0.9;
    t.at(0, 3) = t.at(3, 0) = 0.4;
    t.at(1, 3) = t.at(3, 1) = 0.9;
    t.at(2, 3) = t.at(3, 2) = 0.8;
    t.at(1, 2) = t.at(2, 1) = 0.5;
    return t;
}

}  // namespace

TEST_CASE("perfect channel: no loss, throughput V, unit delays") {
    SimConfig cfg;
    cfg.topo = single_link(1.0);
    cfg.protocol = Protocol::kMwnc;
    cfg.window = 4;
    cfg.speed = Rational(1, 2);
    cfg.slots = 20000;
    cfg.seed = 4;
    const Metrics m = run(cfg);
    CHECK(m.loss == 0.0);
    CHECK(std::abs(m.throughput_mean - 0.5) < 0.01);
    // the decode cadence is deterministic: every packet waits exactly one slot
    CHECK(m.delay_mean == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.delay_max == doctest::Approx(1.0).epsilon(1e-9));
    // every measured packet's fate is decided
    const auto& n = m.per_node[0];
    const std::int64_t id_min = cfg.speed->ceil_mul(cfg.slots / 20) + 1;
    const std::int64_t id_max = cfg.speed->ceil_mul(cfg.slots + 1) - cfg.window;
    CHECK(n.decoded + n.lost == static_cast<std::uint64_t>(id_max - id_min + 1));
}

TEST_CASE("identical seeds give byte-identical metrics") {
    SimConfig cfg;
    cfg.topo = three_node();
    cfg.protocol = Protocol::kMwncast;
    cfg.window = 8;
    cfg.rho = 0.8;
    cfg.slots = 5000;
    cfg.seed = 77;
    const std::string a = io::metrics_json(run(cfg));
    const std::string b = io::metrics_json(run(cfg));
    CHECK(a == b);
    cfg.seed = 78;
    CHECK(a != io::metrics_json(run(cfg)));
}

TEST_CASE("cooperative run achieves the worked example's rate") {
    SimConfig cfg;
    cfg.topo = three_node();
    cfg.protocol = Protocol::kMwncast;
    cfg.window = 20;
    cfg.speed = Rational(57, 100);
    cfg.slots = 100000;
    cfg.seed = 5;
    const Metrics m = run(cfg);
    CHECK(m.capacity >= 0.59);
    for (const auto& n : m.per_node) {
        CHECK(n.throughput >= 0.55);
        CHECK(n.loss <= 1e-2);
    }
    // relays are flagged as such
    CHECK(m.per_node[0].relay);
    CHECK(m.per_node[1].relay);
    CHECK_FALSE(m.per_node[2].relay);
}

TEST_CASE("plain mwnc under load stays near the target rate") {
    SimConfig cfg;
    cfg.topo = single_link(0.8);
    cfg.protocol = Protocol::kMwnc;
    cfg.window = 20;
    cfg.rho = 0.9;  // V = 0.72
    cfg.slots = 100000;
    cfg.seed = 6;
    const Metrics m = run(cfg);
    CHECK(m.v_used == doctest::Approx(0.72).epsilon(1e-9));
    CHECK(m.loss <= 1e-3);
    CHECK(std::abs(m.throughput_mean - m.v_used) / m.v_used < 0.05);
}

TEST_CASE("rlnc throughput approaches the link rate as the block grows") {
    SimConfig cfg;
    cfg.topo = single_link(0.8);
    cfg.protocol = Protocol::kRlnc;
    cfg.slots = 60000;
    cfg.seed = 8;

    cfg.block_size = 1;  // degenerate: every packet needs its own reception
    const Metrics b1 = run(cfg);
    CHECK(b1.loss == 0.0);
    CHECK(b1.throughput_mean < 0.81);

    cfg.block_size = 8;
    const Metrics b8 = run(cfg);
    cfg.block_size = 40;
    const Metrics b40 = run(cfg);
    CHECK(b8.throughput_mean > b1.throughput_mean - 0.02);
    CHECK(b40.throughput_mean > b8.throughput_mean - 0.02);
    CHECK(std::abs(b40.throughput_mean - 0.8) < 0.05);
    // batch decoding pays with delay: at least the block fill time
    CHECK(b40.delay_mean > static_cast<double>(cfg.block_size));
}

TEST_CASE("coop-rlnc runs the planned schedule") {
    SimConfig cfg;
    cfg.topo = three_node();
    cfg.protocol = Protocol::kCoopRlnc;
    cfg.block_size = 20;
    cfg.slots = 40000;
    cfg.seed = 9;
    const Metrics m = run(cfg);
    CHECK(m.loss == 0.0);  // genie block advance never abandons packets
    for (const auto& n : m.per_node) CHECK(n.throughput > 0.3);
}

TEST_CASE("generated topologies: center link perfect, PRP falls with distance") {
    const Topology topo = generate_topology(30, 2, 42);
    CHECK(topo.nodes == 31);
    for (int j = 1; j < topo.nodes; ++j) {
        CHECK(topo.at(0, j) > 0.0);
        CHECK(topo.at(0, j) <= 1.0);
        CHECK(topo.at(0, j) == topo.at(j, 0));
    }
    // defaults keep every source link at 0.5 or better (radius 1, d0 1.2, alpha 2)
    for (int j = 1; j < topo.nodes; ++j) CHECK(topo.at(0, j) >= 0.5);
    // determinism
    const Topology again = generate_topology(30, 2, 42);
    CHECK(topo.prp == again.prp);
    CHECK_THROWS_AS(generate_topology(0, 1, 1), std::domain_error);

    // the PRP map itself is monotone in distance: probe via a 1-client disk
    const Topology near = generate_topology(1, 1, 7, 0.1);
    const Topology far = generate_topology(1, 1, 7, 2.5);
    CHECK(near.at(0, 1) > far.at(0, 1));
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.topo = single_link(0.8);
    cfg.slots = 0;
    CHECK_THROWS_AS(run(cfg), std::domain_error);
    cfg.slots = 100;
    cfg.speed = Rational(1, 2);
    cfg.rho = 0.5;  // both given
    CHECK_THROWS_AS(run(cfg), std::domain_error);
    cfg.speed.reset();
    cfg.rho.reset();  // neither given
    CHECK_THROWS_AS(run(cfg), std::domain_error);
}
