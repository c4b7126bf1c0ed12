#include <doctest.h>

#include <cstdio>
#include <stdexcept>
#include <string>

#include "mwnc/io.hpp"

using namespace mwnc;

namespace {

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

TEST_CASE("topology file round-trips byte-identically") {
    const Topology topo = three_node();
    const std::string path = "io_test_topology.json";
    io::save_topology(topo, path);
    const Topology back = io::load_topology(path);
    CHECK(back.nodes == topo.nodes);
    CHECK(back.channels == topo.channels);
    CHECK(back.prp == topo.prp);

    const std::string first = io::read_file(path);
    io::save_topology(back, path);
    CHECK(io::read_file(path) == first);
    std::remove(path.c_str());
}

TEST_CASE("topology parse errors are loud") {
    CHECK_THROWS(io::topology_from_json("not json"));
    CHECK_THROWS_AS(io::topology_from_json(R"({"K": 2})"), std::invalid_argument);
    CHECK_THROWS_AS(io::topology_from_json(R"({"prp": [[0,1],[1,0],[0,0]], "K": 2})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(io::topology_from_json(R"({"prp": [[0,2],[1,0]], "K": 2})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(io::topology_from_json(R"({"prp": [[0,1],[1,0]], "K": 0})"),
                    std::invalid_argument);
}

TEST_CASE("plan JSON carries capacity, rounds and per-round assignments") {
    const PlanResult result = select_relays(three_node(), 1e-3);
    const std::string text = io::plan_json(result);
    CHECK(text.find("\"capacity\"") != std::string::npos);
    CHECK(text.find("\"rounds\"") != std::string::npos);
    CHECK(text.find("\"phi\"") != std::string::npos);
    CHECK(text.find("\"assignment\"") != std::string::npos);
    CHECK(text.find("\"3\"") != std::string::npos);  // the end receiver's row
}

TEST_CASE("CSV header and row shape are stable") {
    CHECK(io::metrics_csv_header() ==
          "protocol,N,K,W,V,rho,seed,throughput_min,throughput_mean,delay_mean,delay_max,loss,"
          "ops_per_packet\n");
    Metrics m;
    m.protocol = Protocol::kMwnc;
    m.nodes = 3;
    m.channels = 2;
    m.window = 20;
    m.v_used = 0.72;
    m.rho = 0.9;
    m.seed = 11;
    m.throughput_min = 0.7;
    m.throughput_mean = 0.71;
    m.delay_mean = 3.25;
    m.delay_max = 40;
    m.loss = 0.001;
    m.ops_per_packet = 60.5;
    CHECK(io::metrics_csv_row(m) == "mwnc,3,2,20,0.72,0.9,11,0.7,0.71,3.25,40,0.001,60.5\n");
}
