#pragma once

#include <optional>

#include "nehari/field.hpp"
#include "nehari/mesh.hpp"
#include "nehari/phi.hpp"

namespace nehari {

/// Problem instance: generator, exponents, mesh, source field and the
/// zero-order exponent q (the critical exponent ell* by default, or a
/// subcritical surrogate when overridden).
struct ProblemData {
    PhiSpec spec;
    ExponentData exps;
    const Mesh* mesh = nullptr;
    ScalarField f;
    double crit_exp = 0.0;
    bool is_critical = true;

    static ProblemData make(PhiSpec spec, int space_dim, const Mesh& mesh,
                            ScalarField f,
                            std::optional<double> crit_exp_override = {});
};

/// Assembled first-variation direction; one value per node, zero on the
/// boundary. Pairs against zero-trace fields by the plain nodal dot product.
struct DualVector {
    const Mesh* mesh = nullptr;
    std::vector<double> values;
};

/// J(u) = integral Phi(|grad u|) - (1/q) integral |u|^q - integral f u,
/// all three terms by the cell-average quadrature. Throws NumericError on
/// overflow (non-finite result).
[[nodiscard]] double energy(const ScalarField& u, const ProblemData& data);

/// Exact discrete gradient of energy() with respect to interior nodal
/// values: pairing(residual(u), v) equals the directional derivative of the
/// discrete J for every zero-trace v.
[[nodiscard]] DualVector residual(const ScalarField& u, const ProblemData& data);

[[nodiscard]] double pairing(const DualVector& r, const ScalarField& v);

/// psi(u) = <J'(u), u>.
[[nodiscard]] double psi(const ScalarField& u, const ProblemData& data);

/// <psi'(u), u> = integral phi'(|grad u|)|grad u|^3 + 2 phi(|grad u|)|grad u|^2
///                - q |u|^q - f u.
[[nodiscard]] double psi_prime_pair(const ScalarField& u,
                                    const ProblemData& data);

/// Reduced forms of <psi'(u), u>, valid for u on the manifold (psi(u) = 0):
///   (a) integral [phi' |grad u|^3 + phi |grad u|^2] - (q-1) |u|^q
///   (b) integral [phi' |grad u|^3 + (2-q) phi |grad u|^2] - (1-q) f u
[[nodiscard]] double psi_prime_reduced_a(const ScalarField& u,
                                         const ProblemData& data);
[[nodiscard]] double psi_prime_reduced_b(const ScalarField& u,
                                         const ProblemData& data);

/// Single-sweep evaluation of everything the solver needs per iterate.
struct FunctionalEval {
    double J = 0.0;
    double psi_value = 0.0;
    double psi_prime = 0.0;
    DualVector res;
};
[[nodiscard]] FunctionalEval evaluate_all(const ScalarField& u,
                                          const ProblemData& data);

/// Dual-norm proxy for an assembled residual: <r, v_r> / ||v_r|| with v_r
/// the zero-trace field holding r's nodal values. Returns 0 for r = 0.
[[nodiscard]] double dual_norm(const DualVector& r, const PhiSpec& spec);

} // namespace nehari
