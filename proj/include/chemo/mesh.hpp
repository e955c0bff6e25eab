#pragma once

/// @file mesh.hpp
/// @brief Uniform cell-centered grids on boxes with Neumann closure.
///
/// Cells are stored with the x index running fastest: the linear index of
/// cell (i, j) is k = i + nx * j. In 1D j is always 0. Faces normal to axis 0
/// are indexed i + (nx + 1) * j with i in [0, nx]; faces normal to axis 1 are
/// indexed i + nx * j with j in [0, ny]. The first and last face along each
/// axis lie on the boundary.
///
/// Boundary closure uses mirror ghost cells (ghost value = adjacent interior
/// value), so every boundary face carries exactly zero gradient and flux.

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace chemo {

class Grid {
public:
    /// 1D grid on [0, length] with `cells` cells.
    static Grid line(double length, int cells);
    /// 2D grid on [0, lx] x [0, ly].
    static Grid rect(double lx, double ly, int nx, int ny);

    int dim() const noexcept { return dim_; }
    int cells(int axis) const { return cells_.at(static_cast<std::size_t>(axis)); }
    double extent(int axis) const { return extent_.at(static_cast<std::size_t>(axis)); }
    double spacing(int axis) const { return spacing_.at(static_cast<std::size_t>(axis)); }
    double min_spacing() const noexcept;

    std::size_t cell_count() const noexcept;
    /// Number of faces normal to `axis` (boundary faces included).
    std::size_t face_count(int axis) const;
    /// Product of spacings: the quadrature weight of one cell.
    double cell_volume() const noexcept;
    /// |Omega|.
    double measure() const noexcept;

    std::array<double, 2> cell_center(std::size_t k) const;

    bool operator==(const Grid& other) const noexcept = default;

private:
    Grid(int dim, std::array<double, 2> extent, std::array<int, 2> cells);

    int dim_ = 1;
    std::array<double, 2> extent_{};
    std::array<int, 2> cells_{1, 1};
    std::array<double, 2> spacing_{1.0, 1.0};
};

/// One value per cell.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    explicit ScalarField(const Grid& g, double fill = 0.0);
    ScalarField(const Grid& g, std::vector<double> v);

    /// Samples `f(x, y)` at cell centers (y = 0 in 1D).
    static ScalarField from_function(const Grid& g,
                                     const std::function<double(double, double)>& f);

    std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }

    double min() const;
    double max() const;
    bool all_finite() const noexcept;
};

/// Per-axis arrays of face-normal quantities. `axis[1]` is empty in 1D.
struct FaceField {
    std::array<std::vector<double>, 2> axis;
};

/// Midpoint quadrature: sum of values times the cell volume.
/// Throws IntegrationError on a non-finite value.
double integrate(const ScalarField& f);

/// (f_right - f_left) / h on interior faces, 0 on boundary faces.
FaceField face_gradient(const ScalarField& f);

/// Cell-centered |grad f|^2: per axis the mean of the two adjacent face
/// gradients, squared and summed over axes.
ScalarField cell_gradient_sq(const ScalarField& f);

/// Conservative divergence of a face field.
ScalarField divergence(const Grid& g, const FaceField& flux);

/// Sum over faces of g_f^2 times the cell volume; the face-based analog of
/// integrate(cell_gradient_sq(f)) when called on face_gradient(f).
double face_energy(const Grid& g, const FaceField& faces);

/// (mu I - Delta_h) applied to `v` with the mirror-ghost Neumann closure.
std::vector<double> apply_screened_laplacian(const Grid& g, double mu,
                                             const std::vector<double>& v);

/// Snapshot format: one header line `dim nx [ny] Lx [Ly] t`, then the cell
/// values in linear index order, one per line, printed with 17 significant digits.
void write_snapshot(std::ostream& os, const ScalarField& f, double t);

struct Snapshot {
    ScalarField field;
    double t;
};
Snapshot read_snapshot(std::istream& is);

/// CSV with header `k,i,j,x,y,value` (1D: `k,i,x,value`).
void write_field_csv(std::ostream& os, const ScalarField& f);

}  // namespace chemo
