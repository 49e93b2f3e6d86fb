#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceuler/cases.hpp"
#include "ceuler/grid.hpp"
#include "ceuler/metrics.hpp"
#include "ceuler/pressure.hpp"
#include "ceuler/riemann.hpp"
#include "ceuler/scheme1d.hpp"
#include "ceuler/scheme2d.hpp"

namespace ceuler {

struct RunConfig {
    CaseId test_case = CaseId::P1;
    SchemeKind scheme = SchemeKind::direct;
    int picard_iters = 0;
    double epsilon = 1e-4;
    double gamma = 2.0;
    double rho_star = 1.0;
    double dx = 5e-3;  // also dy for the 2D case
    double dt = 5e-4;
    double courant_sigma = 0.0;  // > 0: adaptive time step
    double max_dt = 1.0;
    double t_end = 0.05;
    std::vector<double> snapshot_times;
    BoundaryRule boundary = BoundaryRule::copy;
    std::string output_dir = ".";
    bool no_split = false;    // pressure-splitting ablation: p0 = 0, p1 = p
    bool write_files = true;
    // data for test_case == custom: a single jump at jump_x
    double jump_x = 0.5;
    RiemannState left{0.7, 0.8, 0.0};
    RiemannState right{0.7, -0.8, 0.0};
};

struct RunResult {
    ErrorReport report;
    RunLog log;
    std::vector<std::string> files;
    std::optional<GridState1D> final_1d;
    std::optional<GridState2D> final_2d;
};

inline PressureLaw make_law(const RunConfig& cfg) {
    return PressureLaw(cfg.gamma, cfg.rho_star, cfg.epsilon, !cfg.no_split);
}

namespace detail {

inline std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", t);
    return buf;
}

inline std::string run_stem(const RunConfig& cfg) {
    return to_string(cfg.test_case) + "_" + to_string(cfg.scheme) +
           (cfg.no_split ? "_nosplit" : "");
}

inline void write_file(std::vector<std::string>& files, const std::string& path,
                       const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
    files.push_back(path);
}

/// Watches the outermost nodes; once they move, the Courant measurement
/// stops accumulating, so the reported maxima cover only the span before
/// the waves reach the boundary.
class BoundaryWatch1D {
public:
    explicit BoundaryWatch1D(const GridState1D& s) {
        for (int k = 0; k < depth; ++k) {
            vals_.push_back(s.rho(k));
            vals_.push_back(s.q(k));
            vals_.push_back(s.rho(s.grid.intervals - k));
            vals_.push_back(s.q(s.grid.intervals - k));
        }
    }
    bool quiet(const GridState1D& s) const {
        size_t p = 0;
        for (int k = 0; k < depth; ++k) {
            if (std::abs(s.rho(k) - vals_[p++]) > tol) return false;
            if (std::abs(s.q(k) - vals_[p++]) > tol) return false;
            if (std::abs(s.rho(s.grid.intervals - k) - vals_[p++]) > tol) return false;
            if (std::abs(s.q(s.grid.intervals - k) - vals_[p++]) > tol) return false;
        }
        return true;
    }

private:
    static constexpr int depth = 3;
    static constexpr double tol = 1e-10;
    std::vector<double> vals_;
};

class BoundaryWatch2D {
public:
    explicit BoundaryWatch2D(const GridState2D& s) { collect(s, vals_); }
    bool quiet(const GridState2D& s) const {
        std::vector<double> now;
        collect(s, now);
        for (size_t i = 0; i < now.size(); ++i)
            if (std::abs(now[i] - vals_[i]) > 1e-10) return false;
        return true;
    }

private:
    static void collect(const GridState2D& s, std::vector<double>& out) {
        const int m1 = s.grid.intervals_x, m2 = s.grid.intervals_y;
        out.clear();
        for (int i = 0; i <= m1; ++i) {
            out.push_back(s.rho(i, 0));
            out.push_back(s.rho(i, m2));
        }
        for (int j = 0; j <= m2; ++j) {
            out.push_back(s.rho(0, j));
            out.push_back(s.rho(m1, j));
        }
    }
    std::vector<double> vals_;
};

inline CaseOracle run_oracle(const RunConfig& cfg, const PressureLaw& law) {
    if (cfg.test_case == CaseId::custom) {
        CaseOracle o;
        o.available = true;
        o.positions = {cfg.jump_x};
        o.structures = {limit_riemann(law, cfg.left, cfg.right)};
        return o;
    }
    return limit_oracle(cfg.test_case, law);
}

inline int interval_count(double dx) {
    const int m = static_cast<int>(std::llround(1.0 / dx));
    if (m < 4 || std::abs(m * dx - 1.0) > 1e-9)
        throw std::invalid_argument("dx must divide the unit domain");
    return m;
}

}  // namespace detail

/// Execute one configured run: march the scheme to t_end, write snapshots
/// and exact-solution overlays at the requested times, and assemble the
/// error report against the limit-solution oracle when one is available.
inline RunResult run(const RunConfig& cfg) {
    const PressureLaw law = make_law(cfg);
    RunResult out;
    out.log.dx = cfg.dx;
    out.log.dt = cfg.dt;
    if (cfg.t_end <= 0.0) throw std::invalid_argument("t_end must be positive");
    for (double t : cfg.snapshot_times)
        if (t < 0.0 || t > cfg.t_end + 1e-12)
            throw std::invalid_argument("snapshot times must lie in [0, t_end]");
    if (cfg.write_files) std::filesystem::create_directories(cfg.output_dir);

    SchemeConfig scfg;
    scfg.scheme = cfg.scheme;
    scfg.dt = cfg.dt;
    scfg.picard_iters = cfg.picard_iters;
    scfg.boundary = cfg.boundary;

    std::vector<double> targets = cfg.snapshot_times;
    std::sort(targets.begin(), targets.end());
    if (targets.empty() || std::abs(targets.back() - cfg.t_end) > 1e-12)
        targets.push_back(cfg.t_end);

    const std::string stem = cfg.output_dir + "/" + detail::run_stem(cfg);

    ErrorReport& rep = out.report;
    rep.test_case = to_string(cfg.test_case);
    rep.scheme = to_string(cfg.scheme) + (cfg.no_split ? "+nosplit" : "");
    rep.epsilon = cfg.epsilon;
    rep.dx = cfg.dx;
    rep.dt = cfg.dt;
    rep.t = cfg.t_end;

    const bool two_d = cfg.test_case == CaseId::cluster2d;
    double mass0 = 0.0;

    auto record = [&](double time, double ml, double rho_max, double mass, bool quiet) {
        if (quiet) out.log.boundary_quiet_steps = static_cast<long>(out.log.steps.size()) + 1;
        out.log.steps.push_back({time, ml, rho_max, mass});
        rep.max_rho = std::max(rep.max_rho, rho_max);
    };

    if (!two_d) {
        const Grid1D grid(detail::interval_count(cfg.dx));
        GridState1D s = cfg.test_case == CaseId::custom
                            ? GridState1D(grid)
                            : build_case_1d(cfg.test_case, grid);
        if (cfg.test_case == CaseId::custom) {
            for (int j = 0; j <= grid.intervals; ++j) {
                const RiemannState& v = grid.x(j) <= cfg.jump_x ? cfg.left : cfg.right;
                s.rho(j) = v.rho;
                s.q(j) = v.q;
            }
        }
        GaugeState1D g = make_gauge_state(s);
        const detail::BoundaryWatch1D watch(s);
        const CaseOracle oracle = detail::run_oracle(cfg, law);
        mass0 = total_mass(s);
        rep.max_rho = 0.0;
        for (int j = 0; j <= grid.intervals; ++j)
            rep.max_rho = std::max(rep.max_rho, s.rho(j));

        auto snapshot = [&](double t) {
            if (!cfg.write_files) return;
            std::ostringstream num;
            write_csv(num, s);
            detail::write_file(out.files, stem + "_t" + detail::time_tag(t) + ".csv",
                               num.str());
            if (oracle.available && t > 0.0) {
                std::vector<double> xs(grid.nodes());
                for (int j = 0; j < grid.nodes(); ++j) xs[j] = grid.x(j);
                try {
                    auto [rr, qr] = oracle.sample(xs, t);
                    std::ostringstream ex;
                    ex << "x,rho,q\n";
                    for (int j = 0; j < grid.nodes(); ++j) {
                        write_value(ex, xs[j]);
                        ex << ',';
                        write_value(ex, rr[j]);
                        ex << ',';
                        write_value(ex, qr[j]);
                        ex << '\n';
                    }
                    detail::write_file(out.files,
                                       cfg.output_dir + "/" + to_string(cfg.test_case) +
                                           "_exact_t" + detail::time_tag(t) + ".csv",
                                       ex.str());
                } catch (const interaction_error&) {
                    // constituent problems already interact; no overlay
                }
            }
        };

        bool quiet = true;
        for (double target : targets) {
            while (s.time < target - 1e-13) {
                scfg.dt = cfg.courant_sigma > 0.0
                              ? adaptive_dt(law, s, cfg.courant_sigma, cfg.max_dt)
                              : cfg.dt;
                scfg.dt = std::min(scfg.dt, target - s.time);
                StepResult sr;
                try {
                    sr = scheme_step(law, s, g, scfg);
                } catch (const std::exception& e) {
                    throw solver_error("step " + std::to_string(s.step + 1) + " (t = " +
                                       std::to_string(s.time) + "): " + e.what());
                }
                double rho_max = 0.0;
                for (int j = 0; j <= grid.intervals; ++j)
                    rho_max = std::max(rho_max, s.rho(j));
                quiet = quiet && watch.quiet(s);
                record(s.time, sr.max_lambda, rho_max, total_mass(s), quiet);
            }
            snapshot(target);
        }
        rep.mass_drift = (total_mass(s) - mass0) / mass0;
        if (oracle.available) {
            std::vector<double> xs(grid.nodes());
            for (int j = 0; j < grid.nodes(); ++j) xs[j] = grid.x(j);
            try {
                auto [rr, qr] = oracle.sample(xs, cfg.t_end);
                std::vector<double> W, w;
                for (int j = 0; j < grid.nodes(); ++j) {
                    W.push_back(s.rho(j));
                    w.push_back(rr[j]);
                }
                std::vector<double> num_rho = W, ref_rho = w;
                for (int j = 0; j < grid.nodes(); ++j) {
                    W.push_back(s.q(j));
                    w.push_back(qr[j]);
                }
                rep.e_l1 = l1_relative_error(W, w);
                std::vector<double> num_q(W.begin() + grid.nodes(), W.end());
                std::vector<double> ref_q(w.begin() + grid.nodes(), w.end());
                const double tv_ref =
                    total_variation(ref_rho) + total_variation(ref_q);
                rep.g_tv = std::abs(total_variation(num_rho) + total_variation(num_q) -
                                    tv_ref) /
                           tv_ref;
            } catch (const interaction_error&) {
                // post-interaction: qualitative only, errors stay NaN
            }
        }
        out.final_1d = std::move(s);
    } else {
        const int m = detail::interval_count(cfg.dx);
        const Grid2D grid(m, m);
        GridState2D s = build_cluster2d(grid);
        SchemeConfig scfg2 = scfg;
        GaugeState2D g = cfg.scheme == SchemeKind::direct ? GaugeState2D{}
                                                          : make_gauge_state_2d(s, scfg2);
        const detail::BoundaryWatch2D watch(s);
        mass0 = total_mass(s);
        rep.max_rho = 0.0;
        for (int j = 0; j <= m; ++j)
            for (int i = 0; i <= m; ++i) rep.max_rho = std::max(rep.max_rho, s.rho(i, j));

        auto snapshot = [&](double t) {
            if (!cfg.write_files) return;
            std::ostringstream num;
            write_csv(num, s);
            detail::write_file(out.files, stem + "_t" + detail::time_tag(t) + ".csv",
                               num.str());
        };

        bool quiet = true;
        for (double target : targets) {
            while (s.time < target - 1e-13) {
                scfg2.dt = std::min(cfg.dt, target - s.time);
                StepResult sr;
                try {
                    sr = scheme_step(law, s, g, scfg2);
                } catch (const std::exception& e) {
                    throw solver_error("step " + std::to_string(s.step + 1) + " (t = " +
                                       std::to_string(s.time) + "): " + e.what());
                }
                double rho_max = 0.0;
                for (int j = 0; j <= m; ++j)
                    for (int i = 0; i <= m; ++i) rho_max = std::max(rho_max, s.rho(i, j));
                quiet = quiet && watch.quiet(s);
                record(s.time, sr.max_lambda, rho_max, total_mass(s), quiet);
            }
            snapshot(target);
        }
        rep.mass_drift = (total_mass(s) - mass0) / mass0;
        out.final_2d = std::move(s);
    }

    if (!out.log.steps.empty()) {
        const auto [ml, co] = courant_number(out.log);
        rep.max_lambda = ml;
        rep.courant = co;
    }
    if (cfg.write_files) {
        std::ostringstream os;
        os << error_report_header() << '\n';
        write_csv_row(os, rep);
        detail::write_file(out.files, stem + "_report.csv", os.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
    RunConfig base;
    std::vector<std::pair<std::string, std::vector<double>>> varying;
    std::string table_name = "sweep.csv";
};

namespace detail {

inline void apply_numeric(RunConfig& cfg, const std::string& key, double v) {
    if (key == "epsilon") cfg.epsilon = v;
    else if (key == "gamma") cfg.gamma = v;
    else if (key == "rho_star") cfg.rho_star = v;
    else if (key == "dx") cfg.dx = v;
    else if (key == "dt") cfg.dt = v;
    else if (key == "t_end") cfg.t_end = v;
    else if (key == "sigma") cfg.courant_sigma = v;
    else if (key == "max_dt") cfg.max_dt = v;
    else if (key == "picard") cfg.picard_iters = static_cast<int>(v);
    else throw std::invalid_argument("sweep: unknown numeric parameter '" + key + "'");
}

}  // namespace detail

/// Run the cartesian product of the varying parameters; one table row per
/// combination, with the previous-to-current error ratio and a status
/// column. Failed runs are recorded and the sweep continues.
inline std::string sweep(const SweepSpec& spec) {
    if (spec.varying.empty() || spec.varying.size() > 4)
        throw std::invalid_argument("sweep: need 1..4 varying parameters");
    for (const auto& [k, vals] : spec.varying)
        if (vals.empty()) throw std::invalid_argument("sweep: empty value list for " + k);

    std::filesystem::create_directories(spec.base.output_dir);
    std::ostringstream os;
    os << error_report_header() << ",ratio,status\n";

    std::vector<size_t> idx(spec.varying.size(), 0);
    double prev_e = std::nan("");
    bool done = false;
    while (!done) {
        RunConfig cfg = spec.base;
        cfg.write_files = false;
        for (size_t k = 0; k < idx.size(); ++k)
            detail::apply_numeric(cfg, spec.varying[k].first,
                                  spec.varying[k].second[idx[k]]);
        std::string status = "ok";
        ErrorReport rep;
        rep.test_case = to_string(cfg.test_case);
        rep.scheme = to_string(cfg.scheme);
        rep.epsilon = cfg.epsilon;
        rep.dx = cfg.dx;
        rep.dt = cfg.dt;
        rep.t = cfg.t_end;
        try {
            rep = run(cfg).report;
        } catch (const std::exception& e) {
            status = std::string("error: ") + e.what();
        }
        std::ostringstream row;
        write_csv_row(row, rep);
        std::string line = row.str();
        line.pop_back();  // newline
        os << line << ',';
        write_value(os, prev_e / rep.e_l1);
        os << ',' << status << '\n';
        prev_e = rep.e_l1;

        // advance the cartesian index, last parameter fastest
        done = true;
        for (size_t k = idx.size(); k-- > 0;) {
            if (++idx[k] < spec.varying[k].second.size()) {
                done = false;
                break;
            }
            idx[k] = 0;
        }
    }
    const std::string path = spec.base.output_dir + "/" + spec.table_name;
    std::ofstream f(path, std::ios::binary);
    f << os.str();
    return path;
}

// ---------------------------------------------------------------------------
// Pressure-splitting ablation
// ---------------------------------------------------------------------------

struct AblationResult {
    RunResult with_split;
    RunResult without_split;
    double tv_rho_with = 0.0;
    double tv_rho_without = 0.0;
};

/// Run the low-momentum colliding case with the standard splitting and with
/// the splitting turned off (p0 = 0, p1 = p); report the density total
/// variations for comparison.
inline AblationResult p0_ablation(RunConfig cfg) {
    cfg.test_case = CaseId::P1prime;
    auto tv_rho = [](const RunResult& r) {
        std::vector<double> rho;
        for (int j = 0; j <= r.final_1d->grid.intervals; ++j)
            rho.push_back(r.final_1d->rho(j));
        return total_variation(rho);
    };
    AblationResult out;
    cfg.no_split = false;
    out.with_split = run(cfg);
    cfg.no_split = true;
    out.without_split = run(cfg);
    out.tv_rho_with = tv_rho(out.with_split);
    out.tv_rho_without = tv_rho(out.without_split);
    return out;
}

// ---------------------------------------------------------------------------
// Flat key = value configuration files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Numeric values may be plain or rational ("1/250"), matching how the
/// meshes are usually quoted.
inline double parse_number(const std::string& s) {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const double num = std::stod(s.substr(0, slash));
        const double den = std::stod(s.substr(slash + 1));
        if (den == 0.0) throw std::invalid_argument("division by zero in '" + s + "'");
        return num / den;
    }
    return std::stod(s);
}

inline std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number(item));
    }
    return out;
}

}  // namespace detail

inline BoundaryRule parse_boundary(const std::string& s) {
    if (s == "copy") return BoundaryRule::copy;
    if (s == "periodic") return BoundaryRule::periodic;
    throw std::invalid_argument("unknown boundary rule: " + s);
}

inline SchemeKind parse_scheme(const std::string& s) {
    if (s == "direct") return SchemeKind::direct;
    if (s == "gauge1") return SchemeKind::gauge1;
    if (s == "gauge2") return SchemeKind::gauge2;
    throw std::invalid_argument("unknown scheme: " + s);
}

/// Apply one configuration entry; returns false if the key is not a
/// RunConfig key (sweep-specific keys are handled by the caller).
inline bool apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
    using detail::parse_number;
    if (key == "case") cfg.test_case = parse_case(value);
    else if (key == "scheme") cfg.scheme = parse_scheme(value);
    else if (key == "picard") cfg.picard_iters = std::stoi(value);
    else if (key == "epsilon") cfg.epsilon = parse_number(value);
    else if (key == "gamma") cfg.gamma = parse_number(value);
    else if (key == "rho_star") cfg.rho_star = parse_number(value);
    else if (key == "dx") cfg.dx = parse_number(value);
    else if (key == "dt") cfg.dt = parse_number(value);
    else if (key == "sigma") cfg.courant_sigma = parse_number(value);
    else if (key == "max_dt") cfg.max_dt = parse_number(value);
    else if (key == "t_end") cfg.t_end = parse_number(value);
    else if (key == "snapshots") cfg.snapshot_times = detail::parse_number_list(value);
    else if (key == "boundary") cfg.boundary = parse_boundary(value);
    else if (key == "out") cfg.output_dir = value;
    else if (key == "no_split") cfg.no_split = (value == "1" || value == "true");
    else if (key == "jump") cfg.jump_x = parse_number(value);
    else if (key == "left_rho") cfg.left.rho = parse_number(value);
    else if (key == "left_q") cfg.left.q = parse_number(value);
    else if (key == "right_rho") cfg.right.rho = parse_number(value);
    else if (key == "right_q") cfg.right.q = parse_number(value);
    else return false;
    return true;
}

/// Parse a flat key = value file into a run configuration plus sweep
/// entries ("vary.<param> = v1,v2,..." lines).
inline std::pair<RunConfig, SweepSpec> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    RunConfig cfg;
    SweepSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.rfind("vary.", 0) == 0) {
            spec.varying.emplace_back(key.substr(5), detail::parse_number_list(value));
        } else if (key == "table") {
            spec.table_name = value;
        } else if (!apply_config_entry(cfg, key, value)) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        }
    }
    spec.base = cfg;
    return {cfg, spec};
}

}  // namespace ceuler
