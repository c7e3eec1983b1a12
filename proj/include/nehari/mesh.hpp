#pragma once

#include <array>
#include <cstdint>

namespace nehari {

/// Uniform structured mesh on an axis-aligned box (0,Lx) or (0,Lx)x(0,Ly)
/// with fields stored at nodes, row-major in 2D. Cells are the intervals /
/// rectangles between adjacent nodes.
class Mesh {
public:
    Mesh(double extent_x, int cells_x);                            // 1D
    Mesh(double extent_x, double extent_y, int cells_x, int cells_y); // 2D

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] double extent(int axis) const { return extent_[axis]; }
    [[nodiscard]] int cells(int axis) const { return cells_[axis]; }
    [[nodiscard]] double spacing(int axis) const {
        return extent_[axis] / cells_[axis];
    }

    [[nodiscard]] int node_count() const noexcept { return nodes_; }
    [[nodiscard]] int cell_count() const noexcept { return cell_total_; }
    [[nodiscard]] double cell_volume() const noexcept { return cell_vol_; }

    [[nodiscard]] int node_index(int i, int j = 0) const noexcept {
        return j * (cells_[0] + 1) + i;
    }
    [[nodiscard]] bool is_boundary_node(int idx) const noexcept;
    [[nodiscard]] std::array<double, 2> node_coord(int idx) const noexcept;

    /// Cell index decomposition: 1D cell c spans nodes (c, c+1); 2D cell
    /// (ci, cj) has corners (ci,cj), (ci+1,cj), (ci,cj+1), (ci+1,cj+1).
    [[nodiscard]] std::array<int, 4> cell_corners(int c) const noexcept;
    [[nodiscard]] std::array<double, 2> cell_center(int c) const noexcept;

    [[nodiscard]] bool same_as(const Mesh& other) const noexcept;
    [[nodiscard]] std::uint64_t hash() const noexcept;

private:
    int dim_;
    double extent_[2]{0.0, 0.0};
    int cells_[2]{0, 0};
    int nodes_ = 0;
    int cell_total_ = 0;
    double cell_vol_ = 0.0;
};

} // namespace nehari
