// Command-line front end: plan / analyze / simulate / sweep / compare.
// Exit codes: 0 ok, 2 user error or infeasible input, 3 numeric failure.

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mwnc/analysis.hpp"
#include "mwnc/io.hpp"
#include "mwnc/simulator.hpp"

namespace {

using namespace mwnc;

struct TopoArgs {
    std::string path;
    int nodes = 0;
    std::uint64_t topo_seed = 7;
    int channels = 0;  // override / generation K
    double radius = 1.0, d0 = 1.2, alpha = 2.0;
};

void add_topo_options(CLI::App* cmd, TopoArgs& args) {
    cmd->add_option("--topology", args.path, "topology JSON file");
    cmd->add_option("--nodes", args.nodes, "generate a random disk topology with N receivers");
    cmd->add_option("--topo-seed", args.topo_seed, "seed for topology generation");
    cmd->add_option("--k,--channels", args.channels, "channel count override");
    cmd->add_option("--radius", args.radius, "disk radius for generated topologies");
    cmd->add_option("--d0", args.d0, "PRP distance scale");
    cmd->add_option("--alpha", args.alpha, "PRP distance exponent");
}

Topology resolve_topology(const TopoArgs& args) {
    Topology topo;
    if (!args.path.empty()) {
        topo = io::load_topology(args.path);
    } else if (args.nodes > 0) {
        topo = generate_topology(args.nodes, args.channels > 0 ? args.channels : 1,
                                 args.topo_seed, args.radius, args.d0, args.alpha);
    } else {
        throw std::invalid_argument("need --topology or --nodes");
    }
    if (args.channels > 0) topo.channels = args.channels;
    return topo;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        io::write_file(out_path, text);
}

std::vector<std::int64_t> parse_int_list(const std::string& csv) {
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const auto comma = csv.find(',', pos);
        const std::string tok = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(std::stoll(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const auto comma = csv.find(',', pos);
        const std::string tok = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

unsigned worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 2;
    if (const char* env = std::getenv("MWNC_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = static_cast<unsigned>(cap);
    }
    return std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(jobs, 1)));
}

std::vector<Metrics> run_parallel(const std::vector<SimConfig>& configs) {
    std::vector<Metrics> results(configs.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(configs.size());
    const unsigned workers = worker_count(configs.size());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= configs.size()) return;
                try {
                    results[i] = run(configs[i]);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (!err.empty()) throw std::runtime_error("simulation failed: " + err);
    return results;
}

int cmd_plan(const TopoArgs& topo_args, double delta, const std::string& out) {
    const Topology topo = resolve_topology(topo_args);
    const PlanResult result = select_relays(topo, delta);
    if (result.capacity <= 0.0) {
        std::cerr << "plan: no positive capacity is feasible for this topology\n";
        return 2;
    }
    emit(io::plan_json(result), out);
    return 0;
}

int cmd_analyze(double c_hat, const std::string& v_str, std::int64_t w, const std::string& out) {
    const Rational v = Rational::parse(v_str);
    if (v.value() >= c_hat) {
        std::cerr << "analyze: unstable regime, need V < c_hat (got V=" << v.value()
                  << ", c_hat=" << c_hat << ")\n";
        return 2;
    }
    const WalkModel model{c_hat, v};
    nlohmann::json j;
    j["c_hat"] = c_hat;
    j["v"] = v.value();
    j["w"] = w;
    j["rho"] = model.rho();
    const auto theta0 = find_theta0(model);
    if (theta0)
        j["theta0"] = *theta0;
    else
        j["theta0"] = nullptr;
    const DelayMoments dm = single_barrier_moments(model);
    j["e_n"] = dm.e_n;
    j["e_n2"] = dm.e_n2;
    j["delay_mean"] = dm.d_bar;
    const PointProcessModel pp = point_process(w, model);
    j["point_process"] = {{"p_dd", pp.p_dd}, {"p_dl", pp.p_dl}, {"p_ld", pp.p_ld},
                          {"p_ll", pp.p_ll}, {"t_dd", pp.t_dd}, {"t_dl", pp.t_dl},
                          {"t_ld", pp.t_ld}, {"t_ll", pp.t_ll}, {"pi_d", pp.pi_d},
                          {"pi_l", pp.pi_l}};
    const LossEstimate loss = packet_loss_prob(pp, model);
    j["p_loss"] = loss.p_loss;
    j["p_loss_clamped"] = loss.clamped;
    const ComplexityBound cb = complexity_bound(model);
    j["complexity"] = {{"slope", cb.slope}, {"intercept", cb.intercept},
                       {"bound", cb.at(static_cast<double>(w))}};
    emit(j.dump(2) + "\n", out);
    return 0;
}

struct SimArgs {
    TopoArgs topo;
    std::string protocol = "mwnc";
    std::int64_t window = 20;
    std::string v_str;
    double rho = 0;
    bool has_rho = false;
    std::int64_t block = 20;
    std::int64_t slots = 100000;
    std::uint64_t seed = 1;
    std::size_t payload = 4;
    double delta = 1e-3;
};

SimConfig make_config(const SimArgs& a, const Topology& topo) {
    SimConfig cfg;
    cfg.topo = topo;
    const auto proto = parse_protocol(a.protocol);
    if (!proto) throw std::invalid_argument("unknown protocol: " + a.protocol);
    cfg.protocol = *proto;
    cfg.window = a.window;
    if (!a.v_str.empty()) cfg.speed = Rational::parse(a.v_str);
    if (a.has_rho) cfg.rho = a.rho;
    cfg.block_size = a.block;
    cfg.slots = a.slots;
    cfg.seed = a.seed;
    cfg.payload_len = a.payload;
    cfg.delta = a.delta;
    return cfg;
}

int cmd_simulate(const SimArgs& args, const std::string& out) {
    const Topology topo = resolve_topology(args.topo);
    const Metrics m = run(make_config(args, topo));
    emit(io::metrics_json(m), out);
    return 0;
}

int cmd_sweep(const SimArgs& args, const std::string& w_grid, const std::string& rho_grid,
              const std::string& n_grid, const std::string& out) {
    std::vector<std::int64_t> ws = parse_int_list(w_grid);
    std::vector<double> rhos = parse_double_list(rho_grid);
    std::vector<std::int64_t> ns = parse_int_list(n_grid);
    if (ws.empty()) ws.push_back(args.window);
    if (rhos.empty() && args.has_rho) rhos.push_back(args.rho);
    const bool use_rho = !rhos.empty();
    if (!use_rho && args.v_str.empty())
        throw std::invalid_argument("sweep: need --rho-grid, --rho or --v");
    if (ws.empty() || (use_rho && rhos.empty()))
        throw std::invalid_argument("sweep: empty grid");

    std::vector<Topology> topos;
    if (ns.empty()) {
        topos.push_back(resolve_topology(args.topo));
    } else {
        for (const std::int64_t n : ns) {
            TopoArgs ta = args.topo;
            ta.path.clear();
            ta.nodes = static_cast<int>(n);
            topos.push_back(resolve_topology(ta));
        }
    }

    std::vector<SimConfig> configs;
    for (const auto& topo : topos) {
        for (const std::int64_t w : ws) {
            if (use_rho) {
                for (const double rho : rhos) {
                    SimArgs a = args;
                    a.window = w;
                    a.has_rho = true;
                    a.rho = rho;
                    a.v_str.clear();
                    SimConfig cfg = make_config(a, topo);
                    cfg.block_size = w;  // RLNC sweeps treat the grid as block size
                    cfg.seed = args.seed + configs.size();
                    configs.push_back(cfg);
                }
            } else {
                SimArgs a = args;
                a.window = w;
                SimConfig cfg = make_config(a, topo);
                cfg.block_size = w;
                cfg.seed = args.seed + configs.size();
                configs.push_back(cfg);
            }
        }
    }
    if (configs.empty()) throw std::invalid_argument("sweep: empty grid");

    const std::vector<Metrics> results = run_parallel(configs);
    std::string csv = io::metrics_csv_header();
    for (const auto& m : results) csv += io::metrics_csv_row(m);
    emit(csv, out);
    return 0;
}

int cmd_compare(const SimArgs& args, const std::string& protocols, const std::string& out) {
    std::vector<std::string> protos;
    std::size_t pos = 0;
    while (pos < protocols.size()) {
        const auto comma = protocols.find(',', pos);
        protos.push_back(protocols.substr(pos, comma == std::string::npos ? comma : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (protos.empty()) throw std::invalid_argument("compare: empty protocol list");

    const Topology topo = resolve_topology(args.topo);
    std::vector<SimConfig> configs;
    for (const auto& p : protos) {
        SimArgs a = args;
        a.protocol = p;
        configs.push_back(make_config(a, topo));
    }
    const std::vector<Metrics> results = run_parallel(configs);

    std::string csv = io::metrics_csv_header();
    for (const auto& m : results) csv += io::metrics_csv_row(m);
    emit(csv, out);
    for (const auto& m : results) {
        std::cout << "# " << protocol_name(m.protocol) << ": throughput_mean=" << m.throughput_mean
                  << " delay_mean=" << m.delay_mean << " loss=" << m.loss
                  << " ops_per_packet=" << m.ops_per_packet << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moving window network coding toolkit"};
    app.require_subcommand(1);

    TopoArgs plan_topo;
    double plan_delta = 1e-3;
    std::string plan_out;
    auto* plan_cmd = app.add_subcommand("plan", "relay selection and time allocation");
    add_topo_options(plan_cmd, plan_topo);
    plan_cmd->add_option("--delta", plan_delta, "binary search tolerance");
    plan_cmd->add_option("--out", plan_out, "output JSON path");

    double an_c_hat = 0.8;
    std::string an_v = "0.6";
    std::int64_t an_w = 20;
    std::string an_out;
    auto* an_cmd = app.add_subcommand("analyze", "closed-form model for one (c_hat, V, W)");
    an_cmd->add_option("--c-hat", an_c_hat, "equivalent channel capacity")->required();
    an_cmd->add_option("--v", an_v, "window speed (rational or decimal)")->required();
    an_cmd->add_option("--w", an_w, "window size")->required();
    an_cmd->add_option("--out", an_out, "output JSON path");

    SimArgs sim_args;
    std::string sim_out;
    auto* sim_cmd = app.add_subcommand("simulate", "one simulation run");
    add_topo_options(sim_cmd, sim_args.topo);
    sim_cmd->add_option("--protocol", sim_args.protocol, "mwnc|mwncast|rlnc|coop-rlnc");
    sim_cmd->add_option("--w", sim_args.window, "window size");
    sim_cmd->add_option("--v", sim_args.v_str, "window speed (rational or decimal)");
    sim_cmd->add_option("--rho", sim_args.rho, "target load (sets V = rho * C*)")
        ->check(CLI::Range(0.0, 1.0));
    sim_cmd->add_option("--block-size", sim_args.block, "RLNC block size");
    sim_cmd->add_option("--slots", sim_args.slots, "horizon in slots");
    sim_cmd->add_option("--seed", sim_args.seed, "random seed");
    sim_cmd->add_option("--payload", sim_args.payload, "payload bytes per packet");
    sim_cmd->add_option("--delta", sim_args.delta, "planner tolerance");
    sim_cmd->add_option("--out", sim_out, "output JSON path");

    SimArgs sweep_args;
    std::string sweep_w, sweep_rho, sweep_n, sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "grid of simulation runs, CSV out");
    add_topo_options(sweep_cmd, sweep_args.topo);
    sweep_cmd->add_option("--protocol", sweep_args.protocol, "protocol for all runs");
    sweep_cmd->add_option("--w-grid", sweep_w, "comma list of window sizes");
    sweep_cmd->add_option("--rho-grid", sweep_rho, "comma list of target loads");
    sweep_cmd->add_option("--n-grid", sweep_n, "comma list of receiver counts (generated)");
    sweep_cmd->add_option("--w", sweep_args.window, "window size when no grid");
    sweep_cmd->add_option("--v", sweep_args.v_str, "fixed speed");
    sweep_cmd->add_option("--rho", sweep_args.rho, "fixed load");
    sweep_cmd->add_option("--slots", sweep_args.slots, "horizon in slots");
    sweep_cmd->add_option("--seed", sweep_args.seed, "base seed");
    sweep_cmd->add_option("--payload", sweep_args.payload, "payload bytes per packet");
    sweep_cmd->add_option("--out", sweep_out, "output CSV path");

    SimArgs cmp_args;
    std::string cmp_protocols = "mwnc,rlnc";
    std::string cmp_out;
    auto* cmp_cmd = app.add_subcommand("compare", "same config across protocols");
    add_topo_options(cmp_cmd, cmp_args.topo);
    cmp_cmd->add_option("--protocols", cmp_protocols, "comma list of protocols");
    cmp_cmd->add_option("--w", cmp_args.window, "window size");
    cmp_cmd->add_option("--block-size", cmp_args.block, "RLNC block size");
    cmp_cmd->add_option("--v", cmp_args.v_str, "window speed");
    cmp_cmd->add_option("--rho", cmp_args.rho, "target load");
    cmp_cmd->add_option("--slots", cmp_args.slots, "horizon in slots");
    cmp_cmd->add_option("--seed", cmp_args.seed, "random seed");
    cmp_cmd->add_option("--payload", cmp_args.payload, "payload bytes per packet");
    cmp_cmd->add_option("--out", cmp_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    sim_args.has_rho = sim_cmd->count("--rho") > 0;
    sweep_args.has_rho = sweep_cmd->count("--rho") > 0;
    cmp_args.has_rho = cmp_cmd->count("--rho") > 0;

    try {
        if (plan_cmd->parsed()) return cmd_plan(plan_topo, plan_delta, plan_out);
        if (an_cmd->parsed()) return cmd_analyze(an_c_hat, an_v, an_w, an_out);
        if (sim_cmd->parsed()) return cmd_simulate(sim_args, sim_out);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, sweep_w, sweep_rho, sweep_n, sweep_out);
        if (cmp_cmd->parsed()) return cmd_compare(cmp_args, cmp_protocols, cmp_out);
    } catch (const mwnc::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
