#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace fput {

/// Domain tag carried by serialized fields (see FieldFile in io.hpp).
enum class FieldDomain : uint8_t { Sos = 0, Config = 1, Phase = 2 };

/// Real scalar field sampled on a uniform rectangular grid, cell-centered.
/// Empty cells (outside the admissible region) hold NaN.
struct GridField {
    int nx = 0, ny = 0;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    FieldDomain domain = FieldDomain::Sos;
    std::vector<double> v;  // row-major, index = iy*nx + ix

    GridField() = default;
    GridField(int nx_, int ny_, double x0, double x1, double y0, double y1,
              FieldDomain dom = FieldDomain::Sos)
        : nx(nx_), ny(ny_), xmin(x0), xmax(x1), ymin(y0), ymax(y1), domain(dom),
          v(static_cast<size_t>(nx_) * ny_, std::nan("")) {}

    double dx() const { return (xmax - xmin) / nx; }
    double dy() const { return (ymax - ymin) / ny; }
    double xc(int ix) const { return xmin + (ix + 0.5) * dx(); }
    double yc(int iy) const { return ymin + (iy + 0.5) * dy(); }
    double& at(int ix, int iy) { return v[static_cast<size_t>(iy) * nx + ix]; }
    double at(int ix, int iy) const { return v[static_cast<size_t>(iy) * nx + ix]; }
    size_t size() const { return v.size(); }

    bool same_geometry(const GridField& o) const {
        return nx == o.nx && ny == o.ny && xmin == o.xmin && xmax == o.xmax &&
               ymin == o.ymin && ymax == o.ymax;
    }

    /// sum over non-empty cells
    double sum() const {
        double s = 0;
        for (double x : v)
            if (!std::isnan(x)) s += x;
        return s;
    }
    int count_filled() const {
        int c = 0;
        for (double x : v)
            if (!std::isnan(x)) ++c;
        return c;
    }
    void scale(double f) {
        for (double& x : v)
            if (!std::isnan(x)) x *= f;
    }
};

/// Requested grid geometry for field evaluations.
struct GridSpec {
    int nx = 200, ny = 200;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

}  // namespace fput
