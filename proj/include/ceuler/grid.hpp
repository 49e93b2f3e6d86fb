#pragma once

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ceuler {

enum class BoundaryRule { copy, periodic };

inline std::string to_string(BoundaryRule r) {
    return r == BoundaryRule::copy ? "copy" : "periodic";
}

/// Uniform node-centered 1D grid on [b, c]: x_j = b + j dx, j = 0..M.
/// Two ghost nodes per side (the widest stencil reaches j +- 2).
struct Grid1D {
    int intervals;  // M
    double b, c;

    Grid1D(int m, double b_ = 0.0, double c_ = 1.0) : intervals(m), b(b_), c(c_) {
        if (m < 4 || !(c > b)) throw std::invalid_argument("Grid1D: bad extents");
    }
    int nodes() const { return intervals + 1; }
    double dx() const { return (c - b) / intervals; }
    double x(int j) const { return b + j * dx(); }
    static constexpr int ghost = 2;
};

/// Scalar field over interior nodes 0..M plus two ghosts per side.
class Field1D {
public:
    explicit Field1D(int nodes = 0, double init = 0.0)
        : n_(nodes), v_(static_cast<size_t>(nodes) + 4, init) {}
    double& operator()(int j) { return v_[static_cast<size_t>(j) + 2]; }
    double operator()(int j) const { return v_[static_cast<size_t>(j) + 2]; }
    int nodes() const { return n_; }

private:
    int n_;
    std::vector<double> v_;
};

struct GridState1D {
    Grid1D grid;
    Field1D rho, q;
    double time = 0.0;
    long step = 0;

    explicit GridState1D(const Grid1D& g)
        : grid(g), rho(g.nodes()), q(g.nodes()) {}
};

inline void fill_ghosts(Field1D& f, BoundaryRule rule) {
    const int n = f.nodes();  // interior 0..n-1
    if (rule == BoundaryRule::copy) {
        f(-1) = f(-2) = f(0);
        f(n) = f(n + 1) = f(n - 1);
    } else {
        f(-1) = f(n - 1);
        f(-2) = f(n - 2);
        f(n) = f(0);
        f(n + 1) = f(1);
    }
}

inline void fill_ghosts(GridState1D& s, BoundaryRule rule) {
    fill_ghosts(s.rho, rule);
    fill_ghosts(s.q, rule);
}

/// domain length times the mean interior density
inline double total_mass(const GridState1D& s) {
    double sum = 0.0;
    for (int j = 0; j < s.grid.nodes(); ++j) sum += s.rho(j);
    return (s.grid.c - s.grid.b) * sum / s.grid.nodes();
}

// ---------------------------------------------------------------------------
// 2D
// ---------------------------------------------------------------------------

struct Grid2D {
    int intervals_x, intervals_y;  // M1, M2
    double bx, cx, by, cy;

    Grid2D(int m1, int m2, double bx_ = 0.0, double cx_ = 1.0, double by_ = 0.0,
           double cy_ = 1.0)
        : intervals_x(m1), intervals_y(m2), bx(bx_), cx(cx_), by(by_), cy(cy_) {
        if (m1 < 4 || m2 < 4 || !(cx > bx) || !(cy > by))
            throw std::invalid_argument("Grid2D: bad extents");
    }
    int nodes_x() const { return intervals_x + 1; }
    int nodes_y() const { return intervals_y + 1; }
    double dx() const { return (cx - bx) / intervals_x; }
    double dy() const { return (cy - by) / intervals_y; }
    double x(int i) const { return bx + i * dx(); }
    double y(int j) const { return by + j * dy(); }
    static constexpr int ghost = 2;
};

/// Scalar field over the 2D node set with two ghosts per side.
/// Storage is row-major with x fastest.
class Field2D {
public:
    Field2D() : nx_(0), ny_(0) {}
    Field2D(int nodes_x, int nodes_y, double init = 0.0)
        : nx_(nodes_x), ny_(nodes_y),
          v_(static_cast<size_t>(nodes_x + 4) * (nodes_y + 4), init) {}
    double& operator()(int i, int j) { return v_[idx(i, j)]; }
    double operator()(int i, int j) const { return v_[idx(i, j)]; }
    int nodes_x() const { return nx_; }
    int nodes_y() const { return ny_; }

private:
    size_t idx(int i, int j) const {
        return static_cast<size_t>(j + 2) * (nx_ + 4) + (i + 2);
    }
    int nx_, ny_;
    std::vector<double> v_;
};

struct GridState2D {
    Grid2D grid;
    Field2D rho, q1, q2;
    double time = 0.0;
    long step = 0;

    explicit GridState2D(const Grid2D& g)
        : grid(g), rho(g.nodes_x(), g.nodes_y()), q1(g.nodes_x(), g.nodes_y()),
          q2(g.nodes_x(), g.nodes_y()) {}
};

inline void fill_ghosts(Field2D& f, BoundaryRule rule) {
    const int nx = f.nodes_x(), ny = f.nodes_y();
    // x-direction first over interior rows, then y-direction over all
    // columns so that corner ghosts are defined.
    for (int j = 0; j < ny; ++j) {
        if (rule == BoundaryRule::copy) {
            f(-1, j) = f(-2, j) = f(0, j);
            f(nx, j) = f(nx + 1, j) = f(nx - 1, j);
        } else {
            f(-1, j) = f(nx - 1, j);
            f(-2, j) = f(nx - 2, j);
            f(nx, j) = f(0, j);
            f(nx + 1, j) = f(1, j);
        }
    }
    for (int i = -2; i < nx + 2; ++i) {
        if (rule == BoundaryRule::copy) {
            f(i, -1) = f(i, -2) = f(i, 0);
            f(i, ny) = f(i, ny + 1) = f(i, ny - 1);
        } else {
            f(i, -1) = f(i, ny - 1);
            f(i, -2) = f(i, ny - 2);
            f(i, ny) = f(i, 0);
            f(i, ny + 1) = f(i, 1);
        }
    }
}

inline void fill_ghosts(GridState2D& s, BoundaryRule rule) {
    fill_ghosts(s.rho, rule);
    fill_ghosts(s.q1, rule);
    fill_ghosts(s.q2, rule);
}

inline double total_mass(const GridState2D& s) {
    double sum = 0.0;
    for (int j = 0; j < s.grid.nodes_y(); ++j)
        for (int i = 0; i < s.grid.nodes_x(); ++i) sum += s.rho(i, j);
    const double area = (s.grid.cx - s.grid.bx) * (s.grid.cy - s.grid.by);
    return area * sum / (static_cast<double>(s.grid.nodes_x()) * s.grid.nodes_y());
}

// ---------------------------------------------------------------------------
// Field dumps: CSV with header, one row per interior node, 17 significant
// digits.
// ---------------------------------------------------------------------------

inline void write_value(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

inline void write_csv(std::ostream& os, const GridState1D& s) {
    os << "x,rho,q\n";
    for (int j = 0; j < s.grid.nodes(); ++j) {
        write_value(os, s.grid.x(j));
        os << ',';
        write_value(os, s.rho(j));
        os << ',';
        write_value(os, s.q(j));
        os << '\n';
    }
}

inline void write_csv(std::ostream& os, const GridState2D& s) {
    os << "x,y,rho,q1,q2\n";
    for (int j = 0; j < s.grid.nodes_y(); ++j)
        for (int i = 0; i < s.grid.nodes_x(); ++i) {
            write_value(os, s.grid.x(i));
            os << ',';
            write_value(os, s.grid.y(j));
            os << ',';
            write_value(os, s.rho(i, j));
            os << ',';
            write_value(os, s.q1(i, j));
            os << ',';
            write_value(os, s.q2(i, j));
            os << '\n';
        }
}

}  // namespace ceuler
