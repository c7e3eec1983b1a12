#include "nehari/functional.hpp"

#include <cmath>

#include "nehari/errors.hpp"

namespace nehari {

ProblemData ProblemData::make(PhiSpec spec, int space_dim, const Mesh& mesh,
                              ScalarField f,
                              std::optional<double> crit_exp_override) {
    if (!f.mesh().same_as(mesh)) {
        throw DimensionError("source field lives on a different mesh");
    }
    ExponentData exps = extract_exponents(spec, space_dim);
    ProblemData data{std::move(spec), exps, &mesh, std::move(f), 0.0, true};
    if (crit_exp_override) {
        data.crit_exp = *crit_exp_override;
        data.is_critical =
            std::abs(data.crit_exp - data.exps.ell_star) <= 1e-12;
        if (!(data.crit_exp > 1.0)) {
            throw DegenerateInputError("crit_exp override must exceed 1");
        }
    } else {
        data.crit_exp = data.exps.ell_star;
    }
    return data;
}

namespace {

// |a|^(q-2) * a, extended by 0 at a = 0 (q > 1 keeps it continuous).
double signed_power(double a, double q) {
    if (a == 0.0) return 0.0;
    return std::pow(std::abs(a), q - 2.0) * a;
}

} // namespace

double energy(const ScalarField& u, const ProblemData& data) {
    const Mesh& mesh = *data.mesh;
    const GradientField g = gradient(u);
    const auto au = cell_average(u);
    const auto af = cell_average(data.f);
    const double q = data.crit_exp;
    double sum = 0.0;
    for (int c = 0; c < mesh.cell_count(); ++c) {
        sum += data.spec.big_phi(g.magnitude(c)) -
               std::pow(std::abs(au[c]), q) / q - af[c] * au[c];
    }
    const double J = sum * mesh.cell_volume();
    if (!std::isfinite(J)) {
        throw NumericError("energy overflow on an extreme field");
    }
    return J;
}

DualVector residual(const ScalarField& u, const ProblemData& data) {
    const Mesh& mesh = *data.mesh;
    const GradientField g = gradient(u);
    const auto au = cell_average(u);
    const auto af = cell_average(data.f);
    const double q = data.crit_exp;
    const double vol = mesh.cell_volume();
    DualVector r;
    r.mesh = &mesh;
    r.values.assign(mesh.node_count(), 0.0);

    if (mesh.dim() == 1) {
        const double h = mesh.spacing(0);
        for (int c = 0; c < mesh.cell_count(); ++c) {
            const double gc = g.gx[c];
            const double w = gc == 0.0 ? 0.0 : data.spec.phi(std::abs(gc)) * gc;
            const double zero_order =
                0.5 * (signed_power(au[c], q) + af[c]);
            // d|G|-part: dG/du_{c} = -1/h, dG/du_{c+1} = +1/h.
            r.values[c] += vol * (-w / h - zero_order);
            r.values[c + 1] += vol * (w / h - zero_order);
        }
    } else {
        const double hx = mesh.spacing(0);
        const double hy = mesh.spacing(1);
        for (int c = 0; c < mesh.cell_count(); ++c) {
            const double gx = g.gx[c], gy = g.gy[c];
            const double mag = g.magnitude(c);
            const double phi_c = mag == 0.0 ? 0.0 : data.spec.phi(mag);
            const double wx = phi_c * gx, wy = phi_c * gy;
            const double zero_order =
                0.25 * (signed_power(au[c], q) + af[c]);
            const auto k = mesh.cell_corners(c);
            // gx couples corners with sign (-,+,-,+)/(2hx); gy with
            // (-,-,+,+)/(2hy).
            const double cx = wx / (2.0 * hx), cy = wy / (2.0 * hy);
            r.values[k[0]] += vol * (-cx - cy - zero_order);
            r.values[k[1]] += vol * (cx - cy - zero_order);
            r.values[k[2]] += vol * (-cx + cy - zero_order);
            r.values[k[3]] += vol * (cx + cy - zero_order);
        }
    }
    for (int n = 0; n < mesh.node_count(); ++n) {
        if (mesh.is_boundary_node(n)) r.values[n] = 0.0;
        if (!std::isfinite(r.values[n])) {
            throw NumericError("residual overflow on an extreme field");
        }
    }
    return r;
}

double pairing(const DualVector& r, const ScalarField& v) {
    if (!r.mesh->same_as(v.mesh())) {
        throw DimensionError("pairing across different meshes");
    }
    double s = 0.0;
    for (int n = 0; n < v.size(); ++n) s += r.values[n] * v[n];
    return s;
}

double psi(const ScalarField& u, const ProblemData& data) {
    const Mesh& mesh = *data.mesh;
    const GradientField g = gradient(u);
    const auto au = cell_average(u);
    const auto af = cell_average(data.f);
    const double q = data.crit_exp;
    double sum = 0.0;
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const double mag = g.magnitude(c);
        const double grad_term = mag == 0.0 ? 0.0 : data.spec.phi(mag) * mag * mag;
        sum += grad_term - std::pow(std::abs(au[c]), q) - af[c] * au[c];
    }
    return sum * mesh.cell_volume();
}

namespace {

// Shared kernel for the <psi'(u), u> family: coefficients select the
// combination  a1*phi'|g|^3 + a2*phi|g|^2 + b*|u|^q + c*f*u  per cell.
double psi_prime_kernel(const ScalarField& u, const ProblemData& data,
                        double a1, double a2, double b, double c) {
    const Mesh& mesh = *data.mesh;
    const GradientField g = gradient(u);
    const auto au = cell_average(u);
    const auto af = cell_average(data.f);
    const double q = data.crit_exp;
    double sum = 0.0;
    for (int cell = 0; cell < mesh.cell_count(); ++cell) {
        const double mag = g.magnitude(cell);
        double grad_term = 0.0;
        if (mag > 0.0) {
            grad_term = a1 * data.spec.phi_prime(mag) * mag * mag * mag +
                        a2 * data.spec.phi(mag) * mag * mag;
        }
        sum += grad_term + b * std::pow(std::abs(au[cell]), q) +
               c * af[cell] * au[cell];
    }
    return sum * mesh.cell_volume();
}

} // namespace

double psi_prime_pair(const ScalarField& u, const ProblemData& data) {
    const double q = data.crit_exp;
    return psi_prime_kernel(u, data, 1.0, 2.0, -q, -1.0);
}

double psi_prime_reduced_a(const ScalarField& u, const ProblemData& data) {
    const double q = data.crit_exp;
    return psi_prime_kernel(u, data, 1.0, 1.0, -(q - 1.0), 0.0);
}

double psi_prime_reduced_b(const ScalarField& u, const ProblemData& data) {
    const double q = data.crit_exp;
    return psi_prime_kernel(u, data, 1.0, 2.0 - q, 0.0, -(1.0 - q));
}

FunctionalEval evaluate_all(const ScalarField& u, const ProblemData& data) {
    FunctionalEval ev;
    ev.J = energy(u, data);
    ev.psi_value = psi(u, data);
    ev.psi_prime = psi_prime_pair(u, data);
    ev.res = residual(u, data);
    return ev;
}

double dual_norm(const DualVector& r, const PhiSpec& spec) {
    double sq = 0.0;
    for (double v : r.values) sq += v * v;
    if (sq == 0.0) return 0.0;
    ScalarField vr(*r.mesh);
    for (int n = 0; n < vr.size(); ++n) vr[n] = r.values[n];
    vr.enforce_zero_boundary();
    const double nrm = sobolev_norm(vr, spec);
    if (nrm == 0.0) return 0.0;
    return sq / nrm;
}

} // namespace nehari
