// Command-line driver: configured runs, parameter sweeps, exact Riemann
// profiles, and the pressure-splitting ablation.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ceuler/harness.hpp"

using namespace ceuler;

namespace {

struct CommonFlags {
    std::string config;
    std::string case_id, scheme, boundary, out, snapshots;
    // numeric flags are kept as text so the rational form ("1/250") works
    std::string epsilon, gamma, rho_star, dx, dt, t_end, sigma;
    int picard = -1;
    bool no_split = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "flat key = value configuration file");
    cmd->add_option("--case", f.case_id, "P1, P2, P3, P4, P1prime, cluster2d, custom");
    cmd->add_option("--scheme", f.scheme, "direct, gauge1, gauge2");
    cmd->add_option("--epsilon", f.epsilon, "pressure stiffness parameter");
    cmd->add_option("--gamma", f.gamma, "pressure exponent");
    cmd->add_option("--rho-star", f.rho_star, "congestion density");
    cmd->add_option("--dx", f.dx, "mesh spacing, plain or rational (1/200)");
    cmd->add_option("--dt", f.dt, "time step, plain or rational");
    cmd->add_option("--t-end", f.t_end, "final time");
    cmd->add_option("--snapshots", f.snapshots, "comma-separated snapshot times");
    cmd->add_option("--picard", f.picard, "extra convective-refresh iterations");
    cmd->add_option("--boundary", f.boundary, "copy or periodic");
    cmd->add_option("--sigma", f.sigma, "Courant number for adaptive dt");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_flag("--no-split", f.no_split, "disable the pressure splitting (p0 = 0)");
}

std::pair<RunConfig, SweepSpec> resolve(const CommonFlags& f) {
    RunConfig cfg;
    SweepSpec spec;
    if (!f.config.empty()) std::tie(cfg, spec) = load_config(f.config);
    if (!f.case_id.empty()) cfg.test_case = parse_case(f.case_id);
    if (!f.scheme.empty()) cfg.scheme = parse_scheme(f.scheme);
    if (!f.boundary.empty()) cfg.boundary = parse_boundary(f.boundary);
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (!f.snapshots.empty())
        cfg.snapshot_times = detail::parse_number_list(f.snapshots);
    using detail::parse_number;
    if (!f.epsilon.empty()) cfg.epsilon = parse_number(f.epsilon);
    if (!f.gamma.empty()) cfg.gamma = parse_number(f.gamma);
    if (!f.rho_star.empty()) cfg.rho_star = parse_number(f.rho_star);
    if (!f.dx.empty()) cfg.dx = parse_number(f.dx);
    if (!f.dt.empty()) cfg.dt = parse_number(f.dt);
    if (!f.t_end.empty()) cfg.t_end = parse_number(f.t_end);
    if (!f.sigma.empty()) cfg.courant_sigma = parse_number(f.sigma);
    if (f.picard >= 0) cfg.picard_iters = f.picard;
    if (f.no_split) cfg.no_split = true;
    spec.base = cfg;
    return {cfg, spec};
}

void print_report(const ErrorReport& rep) {
    std::ostringstream os;
    os << error_report_header() << '\n';
    write_csv_row(os, rep);
    std::cout << os.str();
}

int cmd_run(const CommonFlags& f) {
    auto [cfg, spec] = resolve(f);
    const RunResult res = run(cfg);
    print_report(res.report);
    for (const auto& path : res.files) std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_sweep(const CommonFlags& f) {
    auto [cfg, spec] = resolve(f);
    if (spec.varying.empty())
        throw std::invalid_argument("sweep: config must declare vary.<param> entries");
    const std::string path = sweep(spec);
    std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_ablate(const CommonFlags& f) {
    auto [cfg, spec] = resolve(f);
    const AblationResult res = p0_ablation(cfg);
    std::cout << "with splitting:    TV(rho) = " << res.tv_rho_with << "\n";
    std::cout << "without splitting: TV(rho) = " << res.tv_rho_without << "\n";
    print_report(res.with_split.report);
    print_report(res.without_split.report);
    for (const auto& r : {res.with_split, res.without_split})
        for (const auto& path : r.files) std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_riemann(const CommonFlags& f, bool finite_eps, double t) {
    auto [cfg, spec] = resolve(f);
    const PressureLaw law = make_law(cfg);
    CaseOracle oracle;
    if (cfg.test_case == CaseId::custom) {
        oracle.available = true;
        oracle.positions = {cfg.jump_x};
        oracle.structures = {finite_eps ? solve_riemann_eps(law, cfg.left, cfg.right)
                                        : limit_riemann(law, cfg.left, cfg.right)};
    } else {
        oracle = finite_eps ? eps_oracle(cfg.test_case, law)
                            : limit_oracle(cfg.test_case, law);
    }
    if (!oracle.available)
        throw std::invalid_argument("no exact solution for this case");

    for (size_t k = 0; k < oracle.structures.size(); ++k) {
        std::cout << "problem at x = " << oracle.positions[k] << ":\n";
        for (const Wave& w : oracle.structures[k].waves)
            std::cout << "  " << to_string(w.kind) << " speeds [" << w.speed_lo << ", "
                      << w.speed_hi << "]\n";
    }

    const int m = detail::interval_count(cfg.dx);
    Grid1D grid(m);
    std::vector<double> xs(grid.nodes());
    for (int j = 0; j < grid.nodes(); ++j) xs[j] = grid.x(j);
    auto [rr, qr] = oracle.sample(xs, t);
    std::filesystem::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/" + to_string(cfg.test_case) +
                             (finite_eps ? "_riemann_eps_t" : "_riemann_t") +
                             detail::time_tag(t) + ".csv";
    std::ofstream os(path, std::ios::binary);
    os << "x,rho,q\n";
    for (int j = 0; j < grid.nodes(); ++j) {
        write_value(os, xs[j]);
        os << ',';
        write_value(os, rr[j]);
        os << ',';
        write_value(os, qr[j]);
        os << '\n';
    }
    std::cout << "wrote " << path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume solver for the Euler system with a maximal-density "
                 "constraint (Direct and Gauge asymptotic-preserving schemes)"};
    app.require_subcommand(1);

    CommonFlags frun, fsweep, fabl, frie;
    bool finite_eps = false;
    double rie_t = 0.05;

    CLI::App* crun = app.add_subcommand("run", "execute one configured run");
    add_common(crun, frun);
    CLI::App* csweep = app.add_subcommand("sweep", "run a parameter sweep table");
    add_common(csweep, fsweep);
    CLI::App* cabl = app.add_subcommand(
        "ablate-p0", "compare runs with and without the pressure splitting");
    add_common(cabl, fabl);
    CLI::App* crie = app.add_subcommand("riemann", "dump an exact solution profile");
    add_common(crie, frie);
    crie->add_flag("--finite-eps", finite_eps,
                   "sample the finite-eps wave structure instead of the limit");
    crie->add_option("--t", rie_t, "sampling time");

    CLI11_PARSE(app, argc, argv);
    try {
        if (crun->parsed()) return cmd_run(frun);
        if (csweep->parsed()) return cmd_sweep(fsweep);
        if (cabl->parsed()) return cmd_ablate(fabl);
        if (crie->parsed()) return cmd_riemann(frie, finite_eps, rie_t);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
