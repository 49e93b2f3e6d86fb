#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ceuler/grid.hpp"

using namespace ceuler;

namespace {

GridState1D tiny_state(std::initializer_list<double> rho) {
    Grid1D g(static_cast<int>(rho.size()) - 1, 0.0, 1.0);
    GridState1D s(g);
    int j = 0;
    for (double v : rho) s.rho(j++) = v;
    return s;
}

}  // namespace

TEST_CASE("fill_ghosts copy duplicates nearest interior value") {
    Field1D f(3);
    f(0) = 1.0;
    f(1) = 2.0;
    f(2) = 3.0;
    fill_ghosts(f, BoundaryRule::copy);
    CHECK(f(-2) == 1.0);
    CHECK(f(-1) == 1.0);
    CHECK(f(3) == 3.0);
    CHECK(f(4) == 3.0);
}

TEST_CASE("fill_ghosts periodic wraps") {
    Field1D f(3);
    f(0) = 1.0;
    f(1) = 2.0;
    f(2) = 3.0;
    fill_ghosts(f, BoundaryRule::periodic);
    CHECK(f(-2) == 2.0);
    CHECK(f(-1) == 3.0);
    CHECK(f(3) == 1.0);
    CHECK(f(4) == 2.0);
}

TEST_CASE("fill_ghosts keeps constant fields constant and is idempotent") {
    for (auto rule : {BoundaryRule::copy, BoundaryRule::periodic}) {
        Field1D f(6, 4.25);
        fill_ghosts(f, rule);
        for (int j = -2; j <= 7; ++j) CHECK(f(j) == 4.25);
        Field1D g(5);
        for (int j = 0; j < 5; ++j) g(j) = j * j - 2.0;
        fill_ghosts(g, rule);
        Field1D g2 = g;
        fill_ghosts(g2, rule);
        for (int j = -2; j <= 6; ++j) CHECK(g2(j) == g(j));
    }
}

TEST_CASE("total_mass on uniform, zero, and scaled fields") {
    Grid1D g(17, 0.0, 1.0);
    GridState1D s(g);
    for (int j = 0; j < g.nodes(); ++j) s.rho(j) = 0.7;
    CHECK(total_mass(s) == Catch::Approx(0.7).epsilon(1e-14));

    GridState1D z(g);
    CHECK(total_mass(z) == 0.0);

    GridState1D d(g);
    for (int j = 0; j < g.nodes(); ++j) d.rho(j) = 1.4;
    CHECK(total_mass(d) == Catch::Approx(2.0 * total_mass(s)).epsilon(1e-14));
}

TEST_CASE("total_mass is linear in rho") {
    auto a = tiny_state({0.1, 0.2, 0.3, 0.4, 0.5});
    auto b = tiny_state({0.5, 0.4, 0.3, 0.2, 0.1});
    auto sum = tiny_state({0.6, 0.6, 0.6, 0.6, 0.6});
    CHECK(total_mass(a) + total_mass(b) == Catch::Approx(total_mass(sum)).epsilon(1e-14));
}

TEST_CASE("2D ghosts: copy and periodic, corners included") {
    Grid2D g(4, 4);
    GridState2D s(g);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) s.rho(i, j) = 10.0 * j + i;
    fill_ghosts(s.rho, BoundaryRule::copy);
    CHECK(s.rho(-1, 2) == s.rho(0, 2));
    CHECK(s.rho(5, 2) == s.rho(4, 2));
    CHECK(s.rho(2, -2) == s.rho(2, 0));
    CHECK(s.rho(5, 5) == s.rho(4, 4));  // corner

    fill_ghosts(s.rho, BoundaryRule::periodic);
    CHECK(s.rho(-1, 2) == s.rho(4, 2));
    CHECK(s.rho(5, 2) == s.rho(0, 2));
    CHECK(s.rho(2, 6) == s.rho(2, 1));
    CHECK(s.rho(5, 5) == s.rho(0, 0));  // corner wraps both axes
}

TEST_CASE("2D total mass of uniform field") {
    Grid2D g(7, 9);
    GridState2D s(g);
    for (int j = 0; j < g.nodes_y(); ++j)
        for (int i = 0; i < g.nodes_x(); ++i) s.rho(i, j) = 0.6;
    CHECK(total_mass(s) == Catch::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("csv dump: header, row count, 17 significant digits") {
    Grid1D g(4, 0.0, 1.0);
    GridState1D s(g);
    for (int j = 0; j < 5; ++j) {
        s.rho(j) = 1.0 / 3.0;
        s.q(j) = -0.1 * j;
    }
    std::ostringstream os;
    write_csv(os, s);
    const std::string text = os.str();
    CHECK(text.substr(0, 8) == "x,rho,q\n");
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
    CHECK(text.find("0.33333333333333331") != std::string::npos);

    Grid2D g2(4, 4);
    GridState2D s2(g2);
    std::ostringstream os2;
    write_csv(os2, s2);
    const std::string text2 = os2.str();
    CHECK(text2.substr(0, 15) == "x,y,rho,q1,q2\n0");
    CHECK(std::count(text2.begin(), text2.end(), '\n') == 26);
}
