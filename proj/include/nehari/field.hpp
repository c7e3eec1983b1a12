#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nehari/mesh.hpp"
#include "nehari/phi.hpp"

namespace nehari {

/// Nodal scalar field with zero boundary trace. The boundary values are
/// clamped to zero on construction and after any bulk mutation helper.
class ScalarField {
public:
    explicit ScalarField(const Mesh& mesh);

    /// Sample a callable at the nodes; boundary stays zero.
    static ScalarField from_function(
        const Mesh& mesh, const std::function<double(double, double)>& f);

    [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] double operator[](int n) const { return values_[n]; }
    double& operator[](int n) { return values_[n]; }
    [[nodiscard]] std::span<const double> values() const noexcept {
        return values_;
    }
    [[nodiscard]] int size() const noexcept {
        return static_cast<int>(values_.size());
    }

    void fill(double v);
    void enforce_zero_boundary();
    /// Throws NumericError on non-finite entries, DimensionError if the
    /// boundary trace is nonzero.
    void validate() const;

    ScalarField& operator*=(double c);
    ScalarField& operator+=(const ScalarField& other);
    [[nodiscard]] ScalarField scaled(double c) const;
    [[nodiscard]] ScalarField abs() const;
    [[nodiscard]] double min_value() const;
    [[nodiscard]] double max_abs() const;

private:
    const Mesh* mesh_;
    std::vector<double> values_;
};

/// Cell-centred gradient values. gx/gy hold one entry per cell (gy empty in
/// 1D).
struct GradientField {
    const Mesh* mesh = nullptr;
    std::vector<double> gx, gy;

    [[nodiscard]] double magnitude(int c) const {
        return gy.empty() ? std::abs(gx[c])
                          : std::hypot(gx[c], gy[c]);
    }
};

/// Cell-centred differences of the nodal values: exact for affine fields.
/// In 2D each component averages the two node differences across the cell,
/// which uses only that cell's corners (boundary cells therefore see the
/// zero trace directly).
[[nodiscard]] GradientField gradient(const ScalarField& u);

/// Midpoint-rule integral of per-cell values.
[[nodiscard]] double integrate(std::span<const double> cell_values,
                               const Mesh& mesh);

/// Corner average per cell; the quadrature rule used for all zero-order
/// terms, consistent with the gradient rule.
[[nodiscard]] std::vector<double> cell_average(const ScalarField& u);

/// Modular sum(V_c * Phi(|v_c| / lambda)) over cells.
[[nodiscard]] double modular(std::span<const double> cell_values,
                             const Mesh& mesh, const PhiSpec& spec,
                             double lambda);

/// Luxemburg norm: the lambda with modular(lambda) = 1, solved to
/// |modular - 1| <= 1e-10 by bisection (closed form for Power). Zero input
/// returns 0.
[[nodiscard]] double luxemburg_norm(std::span<const double> cell_values,
                                    const Mesh& mesh, const PhiSpec& spec);
[[nodiscard]] double luxemburg_norm(const GradientField& g, const PhiSpec& spec);
[[nodiscard]] double luxemburg_norm(const ScalarField& u, const PhiSpec& spec);

/// L^p norm of the cell-averaged values.
[[nodiscard]] double lp_norm(const ScalarField& u, double p);

/// The space norm: Luxemburg norm of the gradient.
[[nodiscard]] double sobolev_norm(const ScalarField& u, const PhiSpec& spec);

/// ASCII field files: optional '#'-prefixed header lines, then
///   dim nx [ny]
///   extent_x [extent_y]
/// followed by nodal values row-major, one per line, printed with 17
/// significant digits (bitwise round trip).
void save_field(const ScalarField& u, const std::string& path,
                const std::string& header = "");
[[nodiscard]] ScalarField load_field(const std::string& path, const Mesh& mesh);

} // namespace nehari
