#include "nehari/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nehari/errors.hpp"
#include "nehari/fibering.hpp"
#include "nehari/sampling.hpp"

namespace nehari {

double dual_exponent(double q) {
    if (!(q > 1.0)) {
        throw DegenerateInputError("dual exponent needs q > 1");
    }
    return q / (q - 1.0);
}

namespace {

/// Nodal gradient of u -> ||grad u||_Phi at fixed norm value lam:
///   dlam/du_n = (1/(lam D)) sum_c V phi(g_c/lam) (G_c . dG_c/du_n),
///   D = sum_c V phi(g_c/lam) (g_c/lam)^2.
/// Same cell-assembly stencil as the energy residual, zero on the boundary.
std::vector<double> norm_gradient(const ScalarField& u, const PhiSpec& spec,
                                  double lam) {
    const Mesh& mesh = u.mesh();
    const GradientField g = gradient(u);
    const double vol = mesh.cell_volume();
    double D = 0.0;
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const double ghat = g.magnitude(c) / lam;
        if (ghat > 0.0) D += vol * spec.phi(ghat) * ghat * ghat;
    }
    if (!(D > 0.0)) {
        throw DegenerateInputError("norm gradient of the zero field");
    }
    std::vector<double> out(static_cast<std::size_t>(mesh.node_count()), 0.0);
    const double scale = 1.0 / (lam * D);
    if (mesh.dim() == 1) {
        const double h = mesh.spacing(0);
        for (int c = 0; c < mesh.cell_count(); ++c) {
            const double gc = g.gx[c];
            if (gc == 0.0) continue;
            const double w = vol * scale * spec.phi(std::abs(gc) / lam) * gc;
            out[static_cast<std::size_t>(c)] += -w / h;
            out[static_cast<std::size_t>(c) + 1] += w / h;
        }
    } else {
        const double hx = mesh.spacing(0), hy = mesh.spacing(1);
        for (int c = 0; c < mesh.cell_count(); ++c) {
            const double mag = g.magnitude(c);
            if (mag == 0.0) continue;
            const double phi_c = vol * scale * spec.phi(mag / lam);
            const double cx = phi_c * g.gx[c] / (2.0 * hx);
            const double cy = phi_c * g.gy[c] / (2.0 * hy);
            const auto k = mesh.cell_corners(c);
            out[static_cast<std::size_t>(k[0])] += -cx - cy;
            out[static_cast<std::size_t>(k[1])] += cx - cy;
            out[static_cast<std::size_t>(k[2])] += -cx + cy;
            out[static_cast<std::size_t>(k[3])] += cx + cy;
        }
    }
    for (int n = 0; n < mesh.node_count(); ++n) {
        if (mesh.is_boundary_node(n)) out[static_cast<std::size_t>(n)] = 0.0;
    }
    return out;
}

struct StartResult {
    double lam = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

StartResult descend_quotient(ScalarField u, const ProblemData& data) {
    const PhiSpec& spec = data.spec;
    const double q = data.crit_exp;
    const int budget = 2000;
    StartResult out;

    const double n0 = lp_norm(u, q);
    if (!(n0 > 0.0)) return out;
    u *= 1.0 / n0;

    double lam = sobolev_norm(u, spec);
    std::vector<double> grad = norm_gradient(u, spec, lam);
    std::vector<double> prev_u, prev_grad;
    double step = 1e-2;
    int flat_streak = 0;

    for (int it = 0; it < budget; ++it) {
        ++out.iterations;
        if (it > 0) {
            // Barzilai-Borwein (first form) from the previous accepted move.
            double num = 0.0, den = 0.0;
            for (std::size_t n = 0; n < grad.size(); ++n) {
                const double du = u[static_cast<int>(n)] - prev_u[n];
                const double dg = grad[n] - prev_grad[n];
                num += du * du;
                den += du * dg;
            }
            step = den > 0.0 ? std::clamp(num / den, 1e-12, 1e3) : 1e-2;
        }
        prev_u.assign(u.values().begin(), u.values().end());
        prev_grad = grad;

        double lam_new = lam;
        ScalarField trial = u;
        bool accepted = false;
        for (int back = 0; back < 40; ++back) {
            trial = u;
            for (int n = 0; n < trial.size(); ++n) {
                trial[n] -= step * grad[static_cast<std::size_t>(n)];
            }
            const double tn = lp_norm(trial, q);
            if (tn > 0.0) {
                trial *= 1.0 / tn;
                lam_new = sobolev_norm(trial, spec);
                if (lam_new <= lam * (1.0 + 1e-12)) {
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            out.lam = lam;
            out.converged = true; // no descent direction left at this scale
            return out;
        }
        const double drop = lam - lam_new;
        u = trial;
        lam = lam_new;
        grad = norm_gradient(u, spec, lam);
        flat_streak = drop <= 1e-13 * lam ? flat_streak + 1 : 0;
        if (flat_streak >= 5) {
            out.lam = lam;
            out.converged = true;
            return out;
        }
    }
    out.lam = lam;
    return out;
}

} // namespace

SEstimate estimate_S(const ProblemData& data, std::uint64_t seed, int starts) {
    if (starts < 1) {
        throw DegenerateInputError("the quotient descent needs >= 1 start");
    }
    DirectionSampler sampler(*data.mesh, seed, "embedding-constant");
    SEstimate est;
    est.per_start.reserve(static_cast<std::size_t>(starts));
    double best = std::numeric_limits<double>::infinity();
    double worst = 0.0;
    const double ell = data.exps.ell;
    for (int s = 0; s < starts; ++s) {
        ScalarField u0 = s == 0 ? sampler.fundamental() : sampler.next();
        const StartResult r = descend_quotient(std::move(u0), data);
        est.iterations_total += r.iterations;
        est.converged = est.converged && r.converged;
        if (!std::isfinite(r.lam)) {
            est.converged = false;
            continue;
        }
        const double value = std::pow(r.lam, ell);
        est.per_start.push_back(value);
        best = std::min(best, value);
        worst = std::max(worst, value);
    }
    if (!std::isfinite(best)) {
        throw NumericError("embedding-constant descent failed on every start");
    }
    est.value = best;
    est.spread = worst - best;
    return est;
}

ThresholdSet thresholds_from(double S, const ExponentData& exps, double q) {
    const double ell = exps.ell, m = exps.m;
    if (!(S > 0.0)) {
        throw DegenerateInputError("threshold ladder needs S > 0");
    }
    if (!(ell <= m && m < q)) {
        throw HypothesisError("threshold ladder needs ell <= m < q");
    }
    const auto branch = [&](double alpha) {
        return std::pow(S, alpha * (q - 1.0) / (ell * (q - alpha))) *
               std::pow(ell * (ell - 1.0) / (q - 1.0),
                        (alpha - 1.0) / (q - alpha)) *
               (ell * (q - m) / (q - 1.0));
    };
    ThresholdSet t;
    t.branch_ell = branch(ell);
    t.branch_m = branch(m);
    t.lambda1 = std::min(t.branch_ell, t.branch_m);
    t.lambda2 = t.lambda1 / m;
    const double cap = (q - m) / (m - 1.0);
    t.Lambda1 = std::min(t.lambda1, cap);
    t.Lambda2 = std::min(t.lambda2, cap);
    t.Lambda = std::min(t.Lambda1, t.Lambda2);
    return t;
}

std::optional<double> delta1_bound(double S, const ExponentData& exps,
                                   double q, double f_norm) {
    const double ell = exps.ell, m = exps.m;
    const double B = (1.0 - 1.0 / q) * std::pow(S, -1.0 / ell);
    double best = std::numeric_limits<double>::infinity();
    for (const double alpha : {ell, m}) {
        const double K = std::pow(ell * (ell - 1.0) * std::pow(S, q / ell) /
                                      (q - 1.0),
                                  1.0 / (q - alpha));
        const double A = ell * (1.0 / m - 1.0 / q) * std::pow(K, alpha - 1.0);
        best = std::min(best, K * (A - f_norm * B));
    }
    if (!(best > 0.0)) return std::nullopt;
    return best;
}

ScalarField auto_scale_f(const ScalarField& shape, double fraction,
                         double Lambda, double q) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw DegenerateInputError("scale fraction must lie in (0, 1)");
    }
    if (shape.min_value() < 0.0) {
        throw DegenerateInputError("source shape must be nonnegative");
    }
    const double norm = lp_norm(shape, dual_exponent(q));
    if (!(norm > 0.0)) {
        throw DegenerateInputError("source shape is identically zero");
    }
    return shape.scaled(fraction * Lambda / norm);
}

ConstantsReport compute_constants(const ProblemData& data, std::uint64_t seed,
                                  int starts, int directions) {
    return finish_constants(data, estimate_S(data, seed, starts), seed,
                            directions);
}

ConstantsReport finish_constants(const ProblemData& data, SEstimate S,
                                 std::uint64_t seed, int directions) {
    ConstantsReport rep;
    rep.S = std::move(S);
    const double q = data.crit_exp;
    rep.thresholds = thresholds_from(rep.S.value, data.exps, q);
    rep.f_norm = lp_norm(data.f, dual_exponent(q));
    rep.f1_ok = rep.f_norm <= rep.thresholds.lambda1;
    rep.f2_ok = rep.f_norm <= rep.thresholds.Lambda1;
    rep.f2_prime_ok = rep.f_norm <= rep.thresholds.Lambda2;
    rep.delta1 = delta1_bound(rep.S.value, data.exps, q, rep.f_norm);

    // Direction sweep: peak-dominates-source and zero-class detection.
    DirectionSampler sampler(*data.mesh, seed, "condition-sweep");
    rep.directions = directions;
    rep.sweep.reserve(static_cast<std::size_t>(std::max(directions, 0)));
    for (int d = 0; d < directions; ++d) {
        ScalarField u = d == 0 ? sampler.fundamental() : sampler.next();
        const double nq = lp_norm(u, q);
        if (!(nq > 0.0)) continue;
        u *= 1.0 / nq;
        const FiberCache cache(u, data);
        SweepRecord rec;
        const auto [t_tilde, m_peak] = find_peak(cache);
        (void)t_tilde;
        rec.m_peak = m_peak;
        rec.fu = cache.F();
        rec.dominated = m_peak >= rec.fu;
        const double A = cache.A();
        const double ell = data.exps.ell, m = data.exps.m;
        rec.t_bar_ell = std::pow((ell - 1.0) * A / ((q - 1.0) * cache.B()),
                                 1.0 / (q - ell));
        rec.t_bar_m = std::pow((m - 1.0) * A / ((q - 1.0) * cache.B()),
                               1.0 / (q - m));
        if (rec.t_bar_ell >= 1.0 && rec.t_bar_m >= 1.0) {
            rec.case_id = 1;
        } else if (rec.t_bar_ell <= 1.0 && rec.t_bar_m <= 1.0) {
            rec.case_id = 3;
        } else {
            rec.case_id = 2;
        }
        ++rep.case_counts[static_cast<std::size_t>(rec.case_id - 1)];
        if (!rec.dominated) ++rep.violations;
        const FiberingProfile prof = nehari_roots(cache);
        for (const NehariClass cls : prof.classes) {
            if (cls == NehariClass::Zero) rec.zero_class = true;
        }
        if (rec.zero_class) ++rep.zero_class_hits;
        rep.sweep.push_back(rec);
    }
    return rep;
}

} // namespace nehari
