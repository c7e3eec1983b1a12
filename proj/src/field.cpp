#include "nehari/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nehari/errors.hpp"
#include "nehari/numerics.hpp"

namespace nehari {

ScalarField::ScalarField(const Mesh& mesh)
    : mesh_(&mesh), values_(mesh.node_count(), 0.0) {}

ScalarField ScalarField::from_function(
    const Mesh& mesh, const std::function<double(double, double)>& f) {
    ScalarField u(mesh);
    for (int n = 0; n < mesh.node_count(); ++n) {
        const auto xy = mesh.node_coord(n);
        u.values_[n] = f(xy[0], xy[1]);
    }
    u.enforce_zero_boundary();
    return u;
}

void ScalarField::fill(double v) {
    std::fill(values_.begin(), values_.end(), v);
    enforce_zero_boundary();
}

void ScalarField::enforce_zero_boundary() {
    for (int n = 0; n < static_cast<int>(values_.size()); ++n) {
        if (mesh_->is_boundary_node(n)) values_[n] = 0.0;
    }
}

void ScalarField::validate() const {
    for (int n = 0; n < static_cast<int>(values_.size()); ++n) {
        if (!std::isfinite(values_[n])) {
            throw NumericError("field contains a non-finite nodal value");
        }
        if (mesh_->is_boundary_node(n) && values_[n] != 0.0) {
            throw DimensionError("field violates the zero boundary trace");
        }
    }
}

ScalarField& ScalarField::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    if (!mesh_->same_as(other.mesh())) {
        throw DimensionError("field sum across different meshes");
    }
    for (std::size_t n = 0; n < values_.size(); ++n) {
        values_[n] += other.values_[n];
    }
    return *this;
}

ScalarField ScalarField::scaled(double c) const {
    ScalarField out = *this;
    out *= c;
    return out;
}

ScalarField ScalarField::abs() const {
    ScalarField out = *this;
    for (double& v : out.values_) v = std::abs(v);
    return out;
}

double ScalarField::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

GradientField gradient(const ScalarField& u) {
    const Mesh& mesh = u.mesh();
    GradientField g;
    g.mesh = &mesh;
    g.gx.resize(mesh.cell_count());
    if (mesh.dim() == 1) {
        const double h = mesh.spacing(0);
        for (int c = 0; c < mesh.cell_count(); ++c) {
            g.gx[c] = (u[c + 1] - u[c]) / h;
        }
        return g;
    }
    g.gy.resize(mesh.cell_count());
    const double hx = mesh.spacing(0);
    const double hy = mesh.spacing(1);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const auto k = mesh.cell_corners(c);
        const double u00 = u[k[0]], u10 = u[k[1]], u01 = u[k[2]],
                     u11 = u[k[3]];
        g.gx[c] = (u10 + u11 - u00 - u01) / (2.0 * hx);
        g.gy[c] = (u01 + u11 - u00 - u10) / (2.0 * hy);
    }
    return g;
}

double integrate(std::span<const double> cell_values, const Mesh& mesh) {
    if (static_cast<int>(cell_values.size()) != mesh.cell_count()) {
        throw DimensionError("integrate: cell value count mismatch");
    }
    double sum = 0.0;
    for (double v : cell_values) sum += v;
    return sum * mesh.cell_volume();
}

std::vector<double> cell_average(const ScalarField& u) {
    const Mesh& mesh = u.mesh();
    std::vector<double> avg(mesh.cell_count());
    if (mesh.dim() == 1) {
        for (int c = 0; c < mesh.cell_count(); ++c) {
            avg[c] = 0.5 * (u[c] + u[c + 1]);
        }
        return avg;
    }
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const auto k = mesh.cell_corners(c);
        avg[c] = 0.25 * (u[k[0]] + u[k[1]] + u[k[2]] + u[k[3]]);
    }
    return avg;
}

double modular(std::span<const double> cell_values, const Mesh& mesh,
               const PhiSpec& spec, double lambda) {
    double sum = 0.0;
    for (double v : cell_values) {
        sum += spec.big_phi(std::abs(v) / lambda);
    }
    return sum * mesh.cell_volume();
}

double luxemburg_norm(std::span<const double> cell_values, const Mesh& mesh,
                      const PhiSpec& spec) {
    double vmax = 0.0;
    for (double v : cell_values) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) return 0.0;

    if (spec.family() == PhiFamily::Power) {
        // modular = sum(V |v|^p) / (p lambda^p) = 1.
        const double p = spec.param_p();
        double s = 0.0;
        for (double v : cell_values) s += std::pow(std::abs(v), p);
        s *= mesh.cell_volume();
        return std::pow(s / p, 1.0 / p);
    }

    double lo = vmax * 1e-12, hi = vmax * 1e12;
    while (modular(cell_values, mesh, spec, hi) > 1.0) hi *= 4.0;
    while (modular(cell_values, mesh, spec, lo) < 1.0) lo *= 0.25;
    // The modular is strictly decreasing in lambda; bisect until it pins 1.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double m = modular(cell_values, mesh, spec, mid);
        if (std::abs(m - 1.0) <= 1e-10) return mid;
        if (m > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-16 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double luxemburg_norm(const GradientField& g, const PhiSpec& spec) {
    std::vector<double> mag(g.gx.size());
    for (std::size_t c = 0; c < mag.size(); ++c) {
        mag[c] = g.magnitude(static_cast<int>(c));
    }
    return luxemburg_norm(mag, *g.mesh, spec);
}

double luxemburg_norm(const ScalarField& u, const PhiSpec& spec) {
    return luxemburg_norm(cell_average(u), u.mesh(), spec);
}

double lp_norm(const ScalarField& u, double p) {
    if (!(p >= 1.0)) {
        throw DegenerateInputError("lp_norm requires p >= 1");
    }
    const auto avg = cell_average(u);
    double s = 0.0;
    for (double v : avg) s += std::pow(std::abs(v), p);
    return std::pow(s * u.mesh().cell_volume(), 1.0 / p);
}

double sobolev_norm(const ScalarField& u, const PhiSpec& spec) {
    return luxemburg_norm(gradient(u), spec);
}

void save_field(const ScalarField& u, const std::string& path,
                const std::string& header) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open field file for writing: " + path);
    }
    if (!header.empty()) {
        std::istringstream lines(header);
        std::string line;
        while (std::getline(lines, line)) out << "# " << line << "\n";
    }
    const Mesh& mesh = u.mesh();
    out << mesh.dim() << " " << mesh.cells(0);
    if (mesh.dim() == 2) out << " " << mesh.cells(1);
    out << "\n";
    out.precision(17);
    out << mesh.extent(0);
    if (mesh.dim() == 2) out << " " << mesh.extent(1);
    out << "\n";
    for (int n = 0; n < u.size(); ++n) {
        out << u[n] << "\n";
    }
    if (!out) {
        throw IoError("failed while writing field file: " + path);
    }
}

ScalarField load_field(const std::string& path, const Mesh& mesh) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open field file: " + path);
    }
    std::string line;
    // Skip provenance comments.
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') break;
    }
    std::istringstream head(line);
    int dim = 0, nx = 0, ny = 0;
    head >> dim >> nx;
    if (dim == 2) head >> ny;
    if (!head || (dim != 1 && dim != 2)) {
        throw IoError("malformed field file header: " + path);
    }
    if (dim != mesh.dim() || nx != mesh.cells(0) ||
        (dim == 2 && ny != mesh.cells(1))) {
        throw DimensionError(
            "field file mesh does not match the configured mesh: " + path);
    }
    if (!std::getline(in, line)) {
        throw IoError("field file truncated (extents): " + path);
    }
    std::istringstream ext(line);
    double ex = 0.0, ey = 0.0;
    ext >> ex;
    if (dim == 2) ext >> ey;
    if (!ext) {
        throw IoError("malformed field file extents: " + path);
    }
    auto close = [](double a, double b) {
        return std::abs(a - b) <= 1e-12 * std::max({1.0, a, b});
    };
    if (!close(ex, mesh.extent(0)) ||
        (dim == 2 && !close(ey, mesh.extent(1)))) {
        throw DimensionError(
            "field file extents do not match the configured mesh: " + path);
    }
    ScalarField u(mesh);
    for (int n = 0; n < mesh.node_count(); ++n) {
        if (!(in >> u[n])) {
            throw IoError("field file truncated (values): " + path);
        }
    }
    u.validate();
    return u;
}

} // namespace nehari
