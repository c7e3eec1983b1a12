#include "nehari/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "nehari/errors.hpp"
#include "nehari/numerics.hpp"

namespace nehari {

Mesh::Mesh(double extent_x, int cells_x) : dim_(1) {
    if (!(extent_x > 0.0) || cells_x < 4) {
        throw DegenerateInputError(
            "1D mesh requires positive extent and at least 4 cells");
    }
    extent_[0] = extent_x;
    cells_[0] = cells_x;
    nodes_ = cells_x + 1;
    cell_total_ = cells_x;
    cell_vol_ = extent_x / cells_x;
}

Mesh::Mesh(double extent_x, double extent_y, int cells_x, int cells_y)
    : dim_(2) {
    if (!(extent_x > 0.0) || !(extent_y > 0.0) || cells_x < 2 || cells_y < 2 ||
        cells_x * cells_y < 4) {
        throw DegenerateInputError(
            "2D mesh requires positive extents and at least 4 cells");
    }
    extent_[0] = extent_x;
    extent_[1] = extent_y;
    cells_[0] = cells_x;
    cells_[1] = cells_y;
    nodes_ = (cells_x + 1) * (cells_y + 1);
    cell_total_ = cells_x * cells_y;
    cell_vol_ = (extent_x / cells_x) * (extent_y / cells_y);
}

bool Mesh::is_boundary_node(int idx) const noexcept {
    const int nx = cells_[0] + 1;
    const int i = idx % nx;
    if (dim_ == 1) return i == 0 || i == cells_[0];
    const int j = idx / nx;
    return i == 0 || i == cells_[0] || j == 0 || j == cells_[1];
}

std::array<double, 2> Mesh::node_coord(int idx) const noexcept {
    const int nx = cells_[0] + 1;
    const int i = idx % nx;
    const int j = idx / nx;
    return {i * spacing(0), dim_ == 2 ? j * spacing(1) : 0.0};
}

std::array<int, 4> Mesh::cell_corners(int c) const noexcept {
    if (dim_ == 1) {
        return {c, c + 1, -1, -1};
    }
    const int ci = c % cells_[0];
    const int cj = c / cells_[0];
    const int n00 = node_index(ci, cj);
    const int n10 = node_index(ci + 1, cj);
    const int n01 = node_index(ci, cj + 1);
    const int n11 = node_index(ci + 1, cj + 1);
    return {n00, n10, n01, n11};
}

std::array<double, 2> Mesh::cell_center(int c) const noexcept {
    if (dim_ == 1) {
        return {(c + 0.5) * spacing(0), 0.0};
    }
    const int ci = c % cells_[0];
    const int cj = c / cells_[0];
    return {(ci + 0.5) * spacing(0), (cj + 0.5) * spacing(1)};
}

bool Mesh::same_as(const Mesh& other) const noexcept {
    if (dim_ != other.dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        if (cells_[a] != other.cells_[a]) return false;
        const double rel = std::abs(extent_[a] - other.extent_[a]) /
                           std::max(extent_[a], other.extent_[a]);
        if (rel > 1e-12) return false;
    }
    return true;
}

std::uint64_t Mesh::hash() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a64_mix(h, &dim_, sizeof dim_);
    h = fnv1a64_mix(h, extent_, sizeof extent_);
    h = fnv1a64_mix(h, cells_, sizeof cells_);
    return h;
}

} // namespace nehari
