#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ceuler/harness.hpp"

using namespace ceuler;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("ceuler_test_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("build_case: initial data of the named cases") {
    Grid1D g(200);
    auto p1 = build_case_1d(CaseId::P1, g);
    CHECK(p1.rho(0) == 0.7);
    CHECK(p1.q(0) == 0.8);
    CHECK(p1.q(100) == 0.8);   // node on the jump takes the left value
    CHECK(p1.q(101) == -0.8);
    CHECK(p1.q(200) == -0.8);

    auto p1p = build_case_1d(CaseId::P1prime, g);
    CHECK(p1p.q(0) == 0.08);
    CHECK(p1p.q(200) == -0.08);

    auto p3 = build_case_1d(CaseId::P3, g);
    CHECK(p3.rho(49) == 0.7);
    CHECK(p3.rho(50) == 0.7);  // jump node -> left value
    CHECK(p3.rho(51) == 0.8);
    CHECK(p3.q(151) == -1.2);

    Grid2D g2(48, 48);
    auto cl = build_cluster2d(g2);
    CHECK(cl.rho(12, 20) == 0.8);   // inside A
    CHECK(cl.q1(12, 20) == 1.0);
    CHECK(cl.rho(34, 26) == 0.8);   // inside B
    CHECK(cl.q1(34, 26) == -1.0);
    CHECK(cl.rho(24, 5) == 0.6);    // background
    CHECK(cl.q1(24, 5) == 0.0);
    CHECK(cl.q2(24, 5) == 0.0);
}

TEST_CASE("unknown case id is rejected") {
    CHECK_THROWS_AS(parse_case("P9"), std::invalid_argument);
}

TEST_CASE("run produces snapshots with one row per interior node") {
    const auto dir = temp_dir("rows");
    RunConfig cfg;
    cfg.test_case = CaseId::P1;
    cfg.dx = 1.0 / 50;
    cfg.dt = 1.0 / 500;
    cfg.t_end = 0.02;
    cfg.snapshot_times = {0.01, 0.02};
    cfg.output_dir = dir.string();
    const RunResult res = run(cfg);
    REQUIRE(res.final_1d.has_value());
    for (const auto& f : res.files) {
        if (f.find("_t0.0") == std::string::npos) continue;
        const std::string text = slurp(f);
        CHECK(std::count(text.begin(), text.end(), '\n') == 52);  // header + 51 nodes
    }
    CHECK(res.report.e_l1 > 0.0);
    CHECK(res.report.max_rho < 1.0);
    CHECK(std::filesystem::exists(dir / "P1_direct_report.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("identical configurations produce bit-identical outputs") {
    const auto d1 = temp_dir("det1");
    const auto d2 = temp_dir("det2");
    RunConfig cfg;
    cfg.test_case = CaseId::P2;
    cfg.scheme = SchemeKind::gauge1;
    cfg.dx = 1.0 / 50;
    cfg.dt = 1.0 / 500;
    cfg.t_end = 0.02;
    cfg.snapshot_times = {0.02};
    cfg.output_dir = d1.string();
    const RunResult r1 = run(cfg);
    cfg.output_dir = d2.string();
    const RunResult r2 = run(cfg);
    REQUIRE(r1.files.size() == r2.files.size());
    for (size_t k = 0; k < r1.files.size(); ++k)
        CHECK(slurp(r1.files[k]) == slurp(r2.files[k]));
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
}

TEST_CASE("sweep: ratio column is the quotient of consecutive errors") {
    const auto dir = temp_dir("sweep");
    SweepSpec spec;
    spec.base.test_case = CaseId::P1;
    spec.base.dx = 1.0 / 50;
    spec.base.t_end = 0.02;
    spec.base.output_dir = dir.string();
    spec.varying = {{"dt", {1.0 / 250, 1.0 / 500, 1.0 / 1000}}};
    const std::string path = sweep(spec);
    const std::string text = slurp(path);

    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    CHECK(line == error_report_header() + ",ratio,status");
    std::vector<double> errors, ratios;
    while (std::getline(is, line)) {
        std::stringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 14);
        CHECK(cells[13] == "ok");
        errors.push_back(std::stod(cells[6]));
        ratios.push_back(std::stod(cells[12]));
    }
    REQUIRE(errors.size() == 3);
    CHECK(std::isnan(ratios[0]));
    CHECK(ratios[1] == Catch::Approx(errors[0] / errors[1]).epsilon(1e-11));
    CHECK(ratios[2] == Catch::Approx(errors[1] / errors[2]).epsilon(1e-11));
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep records failing combinations and continues") {
    const auto dir = temp_dir("sweeperr");
    SweepSpec spec;
    spec.base.test_case = CaseId::P1;
    spec.base.dx = 1.0 / 50;
    spec.base.t_end = 0.01;
    spec.base.output_dir = dir.string();
    // epsilon = 2 is rejected by the pressure law; the sweep must go on
    spec.varying = {{"epsilon", {1e-4, 2.0, 1e-2}}};
    const std::string text = slurp(sweep(spec));
    CHECK(text.find("error:") != std::string::npos);
    int ok_rows = 0;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
        if (line.size() > 2 && line.substr(line.size() - 3) == ",ok") ++ok_rows;
    CHECK(ok_rows == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config files: fractions, lists, vary entries, unknown keys") {
    const auto dir = temp_dir("config");
    const auto path = dir / "run.cfg";
    {
        std::ofstream os(path);
        os << "# comment line\n";
        os << "case = P4\n";
        os << "scheme = gauge2\n";
        os << "dt = 1/2000   # rational\n";
        os << "dx = 1/100\n";
        os << "epsilon = 1e-2\n";
        os << "snapshots = 0.01, 1/50\n";
        os << "boundary = periodic\n";
        os << "vary.dt = 1/100, 1/200\n";
    }
    auto [cfg, spec] = load_config(path.string());
    CHECK(cfg.test_case == CaseId::P4);
    CHECK(cfg.scheme == SchemeKind::gauge2);
    CHECK(cfg.dt == Catch::Approx(5e-4).epsilon(1e-14));
    CHECK(cfg.dx == Catch::Approx(0.01).epsilon(1e-14));
    CHECK(cfg.boundary == BoundaryRule::periodic);
    REQUIRE(cfg.snapshot_times.size() == 2);
    CHECK(cfg.snapshot_times[1] == Catch::Approx(0.02).epsilon(1e-14));
    REQUIRE(spec.varying.size() == 1);
    CHECK(spec.varying[0].first == "dt");
    CHECK(spec.varying[0].second.size() == 2);

    {
        std::ofstream os(path);
        os << "nonsense = 1\n";
    }
    CHECK_THROWS_AS(load_config(path.string()), std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("p0 ablation: both runs complete and stay below the congestion density") {
    RunConfig cfg;
    cfg.dx = 1.0 / 100;
    cfg.dt = 1.0 / 1000;
    cfg.t_end = 0.05;
    cfg.write_files = false;
    const AblationResult res = p0_ablation(cfg);
    CHECK(res.with_split.report.max_rho < 1.0);
    CHECK(res.without_split.report.max_rho < 1.0);
    CHECK(res.tv_rho_with > 0.0);
    CHECK(res.tv_rho_without > 0.0);
}

TEST_CASE("adaptive-dt mode honors the CFL target") {
    RunConfig cfg;
    cfg.test_case = CaseId::P1;
    cfg.dx = 1.0 / 50;
    cfg.dt = 1.0;  // ignored in adaptive mode except as an upper bound via max_dt
    cfg.courant_sigma = 0.5;
    cfg.max_dt = 0.01;
    cfg.t_end = 0.02;
    cfg.write_files = false;
    const RunResult res = run(cfg);
    REQUIRE(!res.log.steps.empty());
    // every executed step satisfied lambda dt / dx <= sigma (clipped steps shorter)
    double prev_t = 0.0;
    for (size_t k = 0; k < res.log.steps.size(); ++k) {
        const double dt_k = res.log.steps[k].time - prev_t;
        prev_t = res.log.steps[k].time;
        CHECK(res.log.steps[k].max_lambda * dt_k / cfg.dx <= 0.5 + 1e-9);
    }
}

TEST_CASE("custom case: uniform data gives the sound speed as max lambda") {
    RunConfig cfg;
    cfg.test_case = CaseId::custom;
    cfg.left = {0.5, 0.0, 0.0};
    cfg.right = {0.5, 0.0, 0.0};
    cfg.dx = 1.0 / 50;
    cfg.dt = 1.0 / 100;
    cfg.t_end = 0.1;
    cfg.write_files = false;
    const RunResult res = run(cfg);
    for (const auto& rec : res.log.steps)
        CHECK(rec.max_lambda == Catch::Approx(0.02).epsilon(1e-12));
    CHECK(res.report.e_l1 == 0.0);  // solution stays equal to the (constant) reference
}

TEST_CASE("oracle sampling fails past the interaction time for composed problems") {
    RunConfig cfg;
    cfg.test_case = CaseId::P3;
    cfg.dx = 1.0 / 50;
    cfg.dt = 1.0 / 200;
    cfg.t_end = 0.12;  // past the inner-shock interaction at t ~ 0.081
    cfg.write_files = false;
    const RunResult res = run(cfg);
    CHECK(std::isnan(res.report.e_l1));  // qualitative-only regime
    CHECK(res.report.max_rho < 1.0);
}
