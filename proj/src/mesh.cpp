#include "chemo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "chemo/errors.hpp"
#include "chemo/format.hpp"

namespace chemo {

Grid::Grid(int dim, std::array<double, 2> extent, std::array<int, 2> cells)
    : dim_(dim), extent_(extent), cells_(cells) {
    for (int a = 0; a < dim_; ++a) {
        const auto ax = static_cast<std::size_t>(a);
        if (cells_[ax] < 2) {
            throw ParameterError("grid: every axis needs at least 2 cells");
        }
        if (!(extent_[ax] > 0.0) || !std::isfinite(extent_[ax])) {
            throw ParameterError("grid: extents must be positive and finite");
        }
        spacing_[ax] = extent_[ax] / cells_[ax];
        if (spacing_[ax] * cells_[ax] != extent_[ax]) {
            throw ParameterError("grid: extent " + format_double(extent_[ax]) + " is not " +
                                 std::to_string(cells_[ax]) +
                                 " exact multiples of its spacing; pick another cell count");
        }
    }
}

Grid Grid::line(double length, int cells) { return Grid(1, {length, 1.0}, {cells, 1}); }

Grid Grid::rect(double lx, double ly, int nx, int ny) { return Grid(2, {lx, ly}, {nx, ny}); }

double Grid::min_spacing() const noexcept {
    return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

std::size_t Grid::cell_count() const noexcept {
    return static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(cells_[1]);
}

std::size_t Grid::face_count(int axis) const {
    if (axis < 0 || axis >= dim_) return 0;
    const auto nx = static_cast<std::size_t>(cells_[0]);
    const auto ny = static_cast<std::size_t>(cells_[1]);
    return axis == 0 ? (nx + 1) * ny : nx * (ny + 1);
}

double Grid::cell_volume() const noexcept {
    return dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

double Grid::measure() const noexcept {
    return dim_ == 1 ? extent_[0] : extent_[0] * extent_[1];
}

std::array<double, 2> Grid::cell_center(std::size_t k) const {
    const auto nx = static_cast<std::size_t>(cells_[0]);
    const std::size_t i = k % nx;
    const std::size_t j = k / nx;
    const double x = (static_cast<double>(i) + 0.5) * spacing_[0];
    const double y = dim_ == 1 ? 0.0 : (static_cast<double>(j) + 0.5) * spacing_[1];
    return {x, y};
}

ScalarField::ScalarField(const Grid& g, double fill) : grid(g), values(g.cell_count(), fill) {}

ScalarField::ScalarField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.cell_count()) {
        throw ParameterError("field: value count does not match the grid");
    }
}

ScalarField ScalarField::from_function(const Grid& g,
                                       const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto [x, y] = g.cell_center(k);
        out[k] = f(x, y);
    }
    return out;
}

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }

double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }

bool ScalarField::all_finite() const noexcept {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

double integrate(const ScalarField& f) {
    double sum = 0.0;
    for (double x : f.values) {
        if (!std::isfinite(x)) throw IntegrationError("integrate: non-finite cell value");
        sum += x;
    }
    return sum * f.grid.cell_volume();
}

FaceField face_gradient(const ScalarField& f) {
    const Grid& g = f.grid;
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    FaceField out;
    {
        auto& gx = out.axis[0];
        gx.assign(g.face_count(0), 0.0);
        const double inv_h = 1.0 / g.spacing(0);
        for (int j = 0; j < ny; ++j) {
            for (int i = 1; i < nx; ++i) {
                const std::size_t k = static_cast<std::size_t>(i + nx * j);
                gx[static_cast<std::size_t>(i + (nx + 1) * j)] = (f[k] - f[k - 1]) * inv_h;
            }
        }
    }
    if (g.dim() == 2) {
        auto& gy = out.axis[1];
        gy.assign(g.face_count(1), 0.0);
        const double inv_h = 1.0 / g.spacing(1);
        const auto snx = static_cast<std::size_t>(nx);
        for (int j = 1; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t k = static_cast<std::size_t>(i + nx * j);
                gy[k] = (f[k] - f[k - snx]) * inv_h;
            }
        }
    }
    return out;
}

ScalarField cell_gradient_sq(const ScalarField& f) {
    const Grid& g = f.grid;
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    const FaceField faces = face_gradient(f);
    ScalarField out(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(i + nx * j);
            const std::size_t fx = static_cast<std::size_t>(i + (nx + 1) * j);
            const double gx = 0.5 * (faces.axis[0][fx] + faces.axis[0][fx + 1]);
            double s = gx * gx;
            if (g.dim() == 2) {
                const double gy = 0.5 * (faces.axis[1][k] + faces.axis[1][k + static_cast<std::size_t>(nx)]);
                s += gy * gy;
            }
            out[k] = s;
        }
    }
    return out;
}

ScalarField divergence(const Grid& g, const FaceField& flux) {
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    ScalarField out(g);
    const double inv_hx = 1.0 / g.spacing(0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(i + nx * j);
            const std::size_t fx = static_cast<std::size_t>(i + (nx + 1) * j);
            out[k] = (flux.axis[0][fx + 1] - flux.axis[0][fx]) * inv_hx;
        }
    }
    if (g.dim() == 2) {
        const double inv_hy = 1.0 / g.spacing(1);
        const auto snx = static_cast<std::size_t>(nx);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += (flux.axis[1][k + snx] - flux.axis[1][k]) * inv_hy;
        }
    }
    return out;
}

double face_energy(const Grid& g, const FaceField& faces) {
    double sum = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        for (double x : faces.axis[static_cast<std::size_t>(a)]) sum += x * x;
    }
    return sum * g.cell_volume();
}

std::vector<double> apply_screened_laplacian(const Grid& g, double mu,
                                             const std::vector<double>& v) {
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    const double cx = 1.0 / (g.spacing(0) * g.spacing(0));
    const double cy = g.dim() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;
    std::vector<double> out(v.size());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(i + nx * j);
            double lap = 0.0;
            if (i > 0) lap += cx * (v[k - 1] - v[k]);
            if (i < nx - 1) lap += cx * (v[k + 1] - v[k]);
            if (g.dim() == 2) {
                const auto snx = static_cast<std::size_t>(nx);
                if (j > 0) lap += cy * (v[k - snx] - v[k]);
                if (j < ny - 1) lap += cy * (v[k + snx] - v[k]);
            }
            out[k] = mu * v[k] - lap;
        }
    }
    return out;
}

void write_snapshot(std::ostream& os, const ScalarField& f, double t) {
    const Grid& g = f.grid;
    os << g.dim() << ' ' << g.cells(0);
    if (g.dim() == 2) os << ' ' << g.cells(1);
    os << ' ' << format_double(g.extent(0));
    if (g.dim() == 2) os << ' ' << format_double(g.extent(1));
    os << ' ' << format_double(t) << '\n';
    for (double x : f.values) os << format_double(x) << '\n';
}

Snapshot read_snapshot(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw ConfigError("snapshot: missing header line");
    std::istringstream hs(header);
    int dim = 0;
    hs >> dim;
    if (dim != 1 && dim != 2) throw ConfigError("snapshot: dim must be 1 or 2");
    int nx = 0, ny = 1;
    double lx = 0.0, ly = 1.0, t = 0.0;
    hs >> nx;
    if (dim == 2) hs >> ny;
    hs >> lx;
    if (dim == 2) hs >> ly;
    hs >> t;
    if (!hs) throw ConfigError("snapshot: malformed header '" + header + "'");
    const Grid g = dim == 1 ? Grid::line(lx, nx) : Grid::rect(lx, ly, nx, ny);
    std::vector<double> values(g.cell_count());
    for (auto& x : values) {
        if (!(is >> x)) throw ConfigError("snapshot: fewer values than cells");
    }
    return {ScalarField(g, std::move(values)), t};
}

void write_field_csv(std::ostream& os, const ScalarField& f) {
    const Grid& g = f.grid;
    const auto nx = static_cast<std::size_t>(g.cells(0));
    os << (g.dim() == 1 ? "k,i,x,value\n" : "k,i,j,x,y,value\n");
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto [x, y] = g.cell_center(k);
        os << k << ',' << k % nx << ',';
        if (g.dim() == 2) os << k / nx << ',';
        os << format_double(x) << ',';
        if (g.dim() == 2) os << format_double(y) << ',';
        os << format_double(f[k]) << '\n';
    }
}

}  // namespace chemo
