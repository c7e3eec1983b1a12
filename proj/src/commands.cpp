#include "nehari/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nehari/constants.hpp"
#include "nehari/errors.hpp"
#include "nehari/fibering.hpp"
#include "nehari/sampling.hpp"
#include "nehari/solver.hpp"
#include "nehari/verify.hpp"

namespace nehari {

namespace {

using nlohmann::json;

[[nodiscard]] std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

[[nodiscard]] Mesh make_mesh(const RunConfig& cfg) {
    if (cfg.mesh_dim == 1) {
        return Mesh(cfg.extent_x, cfg.cells_x);
    }
    return Mesh(cfg.extent_x, cfg.extent_y, cfg.cells_x, cfg.cells_y);
}

[[nodiscard]] ScalarField make_shape(const RunConfig& cfg, const Mesh& mesh) {
    if (cfg.source_shape == "zero") {
        return ScalarField(mesh);
    }
    if (cfg.source_shape == "file") {
        return load_field(cfg.source_file, mesh);
    }
    const double cx = cfg.bump_center_x, cy = cfg.bump_center_y;
    const double w = cfg.bump_width;
    if (!(w > 0.0)) {
        throw DegenerateInputError("bump width must be positive");
    }
    return ScalarField::from_function(mesh, [&](double x, double y) {
        double r2 = (x - cx) * (x - cx);
        if (mesh.dim() == 2) r2 += (y - cy) * (y - cy);
        return std::exp(-r2 / (w * w));
    });
}

struct Prepared {
    PhiSpec spec;
    HypothesisReport hyp;
    ScalarField f;
    SEstimate S;       ///< populated when with_S
    ThresholdSet th;   ///< populated when with_S
    bool has_S = false;
};

/// Shared front half of every computing subcommand: generator, hypothesis
/// gate, source construction (and threshold-relative rescale when asked).
[[nodiscard]] Prepared prepare(const RunConfig& cfg, const Mesh& mesh,
                               bool with_S) {
    PhiSpec spec = make_phi(cfg);
    HypothesisReport hyp = check_hypotheses(spec, cfg.space_dim);
    ScalarField shape = make_shape(cfg, mesh);
    Prepared out{std::move(spec), hyp, std::move(shape), {}, {}, false};
    if (!hyp.all_ok()) {
        return out; // callers gate on hyp before touching S / exponents
    }
    const bool need_S = with_S || cfg.target_fraction.has_value();
    if (need_S) {
        const ProblemData data_shape = ProblemData::make(
            out.spec, cfg.space_dim, mesh, out.f, cfg.crit_exp);
        out.S = estimate_S(data_shape, cfg.seed, cfg.constants_starts);
        out.th = thresholds_from(out.S.value, data_shape.exps,
                                 data_shape.crit_exp);
        out.has_S = true;
        if (cfg.target_fraction) {
            out.f = auto_scale_f(out.f, *cfg.target_fraction, out.th.Lambda,
                                 data_shape.crit_exp);
        }
    }
    if (cfg.amplitude) {
        out.f = out.f.scaled(*cfg.amplitude);
    }
    return out;
}

[[nodiscard]] std::ofstream open_output(const RunConfig& cfg,
                                        const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/" + name;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    return out;
}

[[nodiscard]] json provenance(const RunConfig& cfg, const Mesh& mesh,
                              const PhiSpec& spec, const char* command) {
    return json{{"record", "provenance"},
                {"artifact", kArtifactName},
                {"version", kArtifactVersion},
                {"command", command},
                {"seed", cfg.seed},
                {"mesh_hash", hex64(mesh.hash())},
                {"phi_hash", hex64(spec.hash())}};
}

[[nodiscard]] std::string file_header(const RunConfig& cfg, const Mesh& mesh,
                                      const std::string& extra) {
    std::ostringstream os;
    os << "artifact=" << kArtifactName << " version=" << kArtifactVersion
       << " seed=" << cfg.seed << " mesh=" << hex64(mesh.hash());
    if (!extra.empty()) os << ' ' << extra;
    return os.str();
}

void print_hypotheses(std::ostream& out, const HypothesisReport& hyp,
                      int space_dim) {
    const auto line = [&out](const char* name, bool ok, const std::string& d) {
        out << (ok ? "[ ok ] " : "[FAIL] ") << name;
        if (!d.empty()) out << "  (" << d << ")";
        out << '\n';
    };
    std::ostringstream d1;
    d1 << "t*phi at window min/1/max: " << hyp.measured.tphi_at_min << " / "
       << hyp.measured.tphi_at_one << " / " << hyp.measured.tphi_at_max;
    line("growth-window", hyp.phi1_ok, d1.str());
    line("monotone-generator", hyp.phi2_ok, "");
    std::ostringstream d3;
    d3 << "ell = " << hyp.measured.ell << ", m = " << hyp.measured.m
       << ", N = " << space_dim;
    line("exponent-range", hyp.phi3_ok, d3.str());
    std::ostringstream dh;
    if (hyp.phi3_ok) {
        dh << "chain value " << hyp.exponents.h_product << ", ell* = "
           << hyp.exponents.ell_star;
    }
    line("inequality-chain", hyp.h_ok, dh.str());
    line("shift-convexity", hyp.psi_convex_ok, "");
}

[[nodiscard]] json hypotheses_record(const HypothesisReport& hyp,
                                     int space_dim) {
    json rec{{"record", "hypotheses"},
             {"growth_window_ok", hyp.phi1_ok},
             {"monotone_generator_ok", hyp.phi2_ok},
             {"exponent_range_ok", hyp.phi3_ok},
             {"inequality_chain_ok", hyp.h_ok},
             {"shift_convexity_ok", hyp.psi_convex_ok},
             {"ell", hyp.measured.ell},
             {"m", hyp.measured.m},
             {"space_dim", space_dim},
             {"all_ok", hyp.all_ok()}};
    if (hyp.phi3_ok) {
        rec["ell_star"] = hyp.exponents.ell_star;
        rec["m_star"] = hyp.exponents.m_star;
        rec["chain_value"] = hyp.exponents.h_product;
    }
    return rec;
}

[[nodiscard]] json constants_record(const ConstantsReport& rep) {
    json rec{{"record", "constants"},
             {"S", rep.S.value},
             {"S_spread", rep.S.spread},
             {"S_starts", rep.S.per_start},
             {"S_converged", rep.S.converged},
             {"lambda1", rep.thresholds.lambda1},
             {"lambda1_branch_ell", rep.thresholds.branch_ell},
             {"lambda1_branch_m", rep.thresholds.branch_m},
             {"lambda2", rep.thresholds.lambda2},
             {"Lambda1", rep.thresholds.Lambda1},
             {"Lambda2", rep.thresholds.Lambda2},
             {"Lambda", rep.thresholds.Lambda},
             {"f_norm", rep.f_norm},
             {"cond_first", rep.f1_ok},
             {"cond_second", rep.f2_ok},
             {"cond_second_strict", rep.f2_prime_ok},
             {"case_counts", rep.case_counts},
             {"sweep_directions", rep.directions},
             {"peak_violations", rep.violations},
             {"zero_class_hits", rep.zero_class_hits}};
    if (rep.delta1) {
        rec["delta1"] = *rep.delta1;
    } else {
        rec["delta1"] = nullptr;
    }
    return rec;
}

void print_constants(std::ostream& out, const ConstantsReport& rep) {
    out << "S           = " << rep.S.value << "  (spread " << rep.S.spread
        << " over " << rep.S.per_start.size() << " starts)\n"
        << "lambda1     = " << rep.thresholds.lambda1 << "  (branches "
        << rep.thresholds.branch_ell << ", " << rep.thresholds.branch_m
        << ")\n"
        << "lambda2     = " << rep.thresholds.lambda2 << "\n"
        << "Lambda1     = " << rep.thresholds.Lambda1 << "\n"
        << "Lambda2     = " << rep.thresholds.Lambda2 << "\n"
        << "Lambda      = " << rep.thresholds.Lambda << "\n"
        << "f_norm      = " << rep.f_norm << "\n"
        << "cond (f1)   = " << (rep.f1_ok ? "pass" : "fail") << "\n"
        << "cond (f2)   = " << (rep.f2_ok ? "pass" : "fail") << "\n"
        << "cond (f2)'  = " << (rep.f2_prime_ok ? "pass" : "fail") << "\n";
    if (rep.delta1) {
        out << "delta1      = " << *rep.delta1 << "\n";
    } else {
        out << "delta1      = (not positive at this source size)\n";
    }
    out << "t-bar cases = " << rep.case_counts[0] << " / "
        << rep.case_counts[1] << " / " << rep.case_counts[2] << "\n"
        << "peak sweep  = " << rep.violations << " violations, "
        << rep.zero_class_hits << " degenerate hits over " << rep.directions
        << " directions\n";
}

[[nodiscard]] const char* class_name(NehariClass c) {
    switch (c) {
    case NehariClass::Plus: return "plus";
    case NehariClass::Minus: return "minus";
    default: return "zero";
    }
}

[[nodiscard]] const char* status_name(StartStatus s) {
    switch (s) {
    case StartStatus::Converged: return "converged";
    case StartStatus::Stalled: return "stalled";
    case StartStatus::ClassFlip: return "class-flip";
    case StartStatus::BudgetExhausted: return "budget-exhausted";
    default: return "projection-failed";
    }
}

[[nodiscard]] json solve_record(const SolveResult& r, const ProblemData& data) {
    json starts = json::array();
    for (const StartOutcome& o : r.start_outcomes) {
        starts.push_back(json{{"status", status_name(o.status)},
                              {"J", o.J_final},
                              {"residual_rel", o.res_rel},
                              {"iterations", o.iterations},
                              {"restarts", o.restarts}});
    }
    const double scale = FiberCache(r.u, data).scale();
    return json{{"record", "solution"},
                {"branch", class_name(r.branch)},
                {"J", r.J_value},
                {"psi", r.psi_value},
                {"psi_scale", scale},
                {"residual_rel", r.residual_rel},
                {"iterations", r.iterations},
                {"best_start", r.best_start},
                {"converged", r.converged},
                {"tied_starts", r.tied_starts},
                {"min_node", r.u.min_value()},
                {"norm", sobolev_norm(r.u, data.spec)},
                {"starts", starts}};
}

} // namespace

int cmd_check(const RunConfig& cfg, std::ostream& out, bool quiet) {
    const Mesh mesh = make_mesh(cfg);
    const PhiSpec spec = make_phi(cfg);
    const HypothesisReport hyp = check_hypotheses(spec, cfg.space_dim);
    if (!quiet) print_hypotheses(out, hyp, cfg.space_dim);
    auto jout = open_output(cfg, "check.jsonl");
    jout << provenance(cfg, mesh, spec, "check").dump() << '\n'
         << hypotheses_record(hyp, cfg.space_dim).dump() << '\n';
    if (!hyp.all_ok()) {
        if (!quiet) out << "hypotheses failed\n";
        return 1;
    }
    return 0;
}

int cmd_constants(const RunConfig& cfg, std::ostream& out, bool quiet) {
    const Mesh mesh = make_mesh(cfg);
    Prepared prep = prepare(cfg, mesh, /*with_S=*/true);
    if (!prep.hyp.all_ok()) {
        if (!quiet) {
            print_hypotheses(out, prep.hyp, cfg.space_dim);
            out << "hypotheses failed; constants not computed\n";
        }
        return 1;
    }
    const ProblemData data =
        ProblemData::make(prep.spec, cfg.space_dim, mesh, prep.f, cfg.crit_exp);
    const ConstantsReport rep =
        finish_constants(data, prep.S, cfg.seed, cfg.sweep_directions);
    if (!quiet) print_constants(out, rep);
    auto jout = open_output(cfg, "constants.jsonl");
    jout << provenance(cfg, mesh, prep.spec, "constants").dump() << '\n'
         << constants_record(rep).dump() << '\n';
    return 0;
}

int cmd_fiber(const RunConfig& cfg, std::ostream& out, bool quiet) {
    const Mesh mesh = make_mesh(cfg);
    Prepared prep = prepare(cfg, mesh, /*with_S=*/false);
    if (!prep.hyp.all_ok()) {
        if (!quiet) out << "hypotheses failed; fiber scan not computed\n";
        return 1;
    }
    const ProblemData data =
        ProblemData::make(prep.spec, cfg.space_dim, mesh, prep.f, cfg.crit_exp);
    ScalarField dir(mesh);
    DirectionSampler sampler(mesh, cfg.seed, "fiber-direction");
    if (cfg.fiber_direction == "fundamental") {
        dir = sampler.fundamental();
    } else if (cfg.fiber_direction == "sample") {
        dir = sampler.next();
    } else {
        dir = load_field(cfg.fiber_file, mesh);
    }
    const FiberingProfile prof = nehari_roots(dir, data);
    const auto samples =
        scan(dir, data, cfg.fiber_t_lo, cfg.fiber_t_hi, cfg.fiber_points);

    auto csv = open_output(cfg, "fiber_scan.csv");
    csv << "# " << file_header(cfg, mesh, "columns=t,gamma,gamma_prime,m_u")
        << '\n';
    char buf[160];
    for (const FiberSample& s : samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s.t,
                      s.gamma, s.gamma_prime, s.m);
        csv << buf;
    }

    if (!quiet) {
        out << "direction integrals: A = " << prof.A << ", B = " << prof.B
            << ", F = " << prof.F << "\n"
            << "peak: t = " << prof.t_tilde << ", m = " << prof.m_peak << "\n";
        if (prof.threshold_violated) {
            out << "no constrained points on this ray (source level above "
                   "the peak)\n";
        }
        for (std::size_t i = 0; i < prof.roots.size(); ++i) {
            out << "root " << i + 1 << ": t = " << prof.roots[i]
                << "  class = " << class_name(prof.classes[i]) << "\n";
        }
        if (prof.tangency) out << "warning: near-tangent source level\n";
        out << "scan rows: " << samples.size() << "\n";
    }

    json rec{{"record", "fiber-profile"},
             {"A", prof.A},
             {"B", prof.B},
             {"F", prof.F},
             {"t_tilde", prof.t_tilde},
             {"m_peak", prof.m_peak},
             {"roots", prof.roots},
             {"threshold_violated", prof.threshold_violated},
             {"tangency", prof.tangency},
             {"scan_rows", samples.size()}};
    json classes = json::array();
    for (const NehariClass c : prof.classes) classes.push_back(class_name(c));
    rec["classes"] = classes;
    auto jout = open_output(cfg, "fiber.jsonl");
    jout << provenance(cfg, mesh, prep.spec, "fiber").dump() << '\n'
         << rec.dump() << '\n';
    return 0;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, bool quiet) {
    const Mesh mesh = make_mesh(cfg);
    Prepared prep = prepare(cfg, mesh, /*with_S=*/true);
    if (!prep.hyp.all_ok()) {
        if (!quiet) {
            print_hypotheses(out, prep.hyp, cfg.space_dim);
            out << "hypotheses failed; solve refused\n";
        }
        return 1;
    }
    const ProblemData data =
        ProblemData::make(prep.spec, cfg.space_dim, mesh, prep.f, cfg.crit_exp);
    const ConstantsReport rep =
        finish_constants(data, prep.S, cfg.seed, cfg.sweep_directions);
    if (rep.f_norm > 0.0 && rep.f_norm >= rep.thresholds.Lambda) {
        if (!quiet) {
            out << "refusing to solve: source norm " << rep.f_norm
                << " is not below the threshold Lambda = "
                << rep.thresholds.Lambda << "\n";
        }
        return 1;
    }

    SolverOptions sopt;
    sopt.starts = cfg.starts;
    sopt.budget = cfg.budget;
    sopt.tol_res = cfg.tol_res;
    sopt.tol_step = cfg.tol_step;
    sopt.armijo = cfg.armijo;
    sopt.seed = cfg.seed;

    auto jout = open_output(cfg, "solve.jsonl");
    jout << provenance(cfg, mesh, prep.spec, "solve").dump() << '\n'
         << constants_record(rep).dump() << '\n';

    const bool f_zero = !(rep.f_norm > 0.0);
    bool plus_ok = true;
    std::optional<SolveResult> plus;
    if (f_zero) {
        if (!quiet) {
            out << "plus branch skipped: with a zero source every ray has a "
                   "single descending-branch point\n";
        }
        jout << json{{"record", "solution"},
                     {"branch", "plus"},
                     {"skipped", "zero source"}}
                    .dump()
             << '\n';
    } else {
        try {
            plus = minimize_branch(data, NehariClass::Plus, sopt);
            save_field(plus->u, cfg.output_dir + "/u_plus.field",
                       file_header(cfg, mesh, "branch=plus"));
            jout << solve_record(*plus, data).dump() << '\n';
        } catch (const Error& e) {
            plus_ok = false;
            if (!quiet) out << "plus branch failed: " << e.what() << "\n";
            jout << json{{"record", "solution"},
                         {"branch", "plus"},
                         {"error", e.what()}}
                        .dump()
                 << '\n';
        }
    }
    bool minus_ok = true;
    std::optional<SolveResult> minus;
    try {
        minus = minimize_branch(data, NehariClass::Minus, sopt);
        save_field(minus->u, cfg.output_dir + "/u_minus.field",
                   file_header(cfg, mesh, "branch=minus"));
        jout << solve_record(*minus, data).dump() << '\n';
    } catch (const Error& e) {
        minus_ok = false;
        if (!quiet) out << "minus branch failed: " << e.what() << "\n";
        jout << json{{"record", "solution"},
                     {"branch", "minus"},
                     {"error", e.what()}}
                    .dump()
             << '\n';
    }

    if (plus && rep.f_norm > 0.0) {
        const MonitorReport mon =
            monitor_bounds(plus->history, plus->J_value, rep.S.value,
                           rep.f_norm, data.exps, data.crit_exp);
        jout << json{{"record", "monitors"},
                     {"entries", mon.entries.size()},
                     {"lower_violations", mon.lower_violations},
                     {"upper_violations", mon.upper_violations},
                     {"tail_ok", mon.tail_ok}}
                    .dump()
             << '\n';
        if (!quiet) {
            out << "monitors: " << mon.lower_violations << " lower / "
                << mon.upper_violations
                << " upper violations, tail " << (mon.tail_ok ? "ok" : "BAD")
                << "\n";
        }
    }

    if (!quiet) {
        out << "branch   J              psi            residual   iters  "
               "status\n";
        const auto row = [&](const char* name,
                             const std::optional<SolveResult>& r) {
            if (!r) return;
            std::ostringstream os;
            os.setf(std::ios::scientific);
            os.precision(6);
            os << name << (std::string(9 - std::string(name).size(), ' '))
               << r->J_value << "  " << r->psi_value << "  " << r->residual_rel
               << "  " << r->iterations << "  "
               << (r->converged ? "converged" : "partial");
            out << os.str() << "\n";
        };
        row("plus", plus);
        row("minus", minus);
        if (minus && rep.delta1) {
            out << "minus-branch floor delta1 = " << *rep.delta1
                << (minus->J_value >= *rep.delta1 ? " (satisfied)"
                                                  : " (VIOLATED)")
                << "\n";
        }
    }
    return plus_ok && minus_ok ? 0 : 1;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, bool quiet) {
    const Mesh mesh = make_mesh(cfg);
    Prepared prep = prepare(cfg, mesh, /*with_S=*/false);
    VerifyOptions vopt;
    vopt.seed = cfg.seed;
    vopt.sweep_directions = std::min(cfg.sweep_directions, 30);
    vopt.solver_starts = std::min(cfg.starts, 3);
    vopt.solver_budget = cfg.budget;
    const auto suites = verify_all(prep.spec, cfg.space_dim, mesh, prep.f,
                                   cfg.crit_exp, vopt);
    auto jout = open_output(cfg, "verify.jsonl");
    jout << provenance(cfg, mesh, prep.spec, "verify").dump() << '\n';
    bool all_ok = true;
    for (const SuiteResult& s : suites) {
        if (!quiet) {
            out << (s.skipped ? "[skip] " : (s.passed ? "[ ok ] " : "[FAIL] "))
                << s.name;
            if (!s.detail.empty()) out << "  (" << s.detail << ")";
            out << "\n";
        }
        if (!s.skipped && !s.passed) all_ok = false;
        jout << json{{"record", "suite"},
                     {"name", s.name},
                     {"passed", s.passed},
                     {"skipped", s.skipped},
                     {"detail", s.detail}}
                    .dump()
             << '\n';
    }
    if (!quiet) out << (all_ok ? "all suites passed\n" : "suite failures\n");
    return all_ok ? 0 : 1;
}

int run_command(const std::string& name, const RunConfig& cfg,
                std::ostream& out, bool quiet) {
    try {
        if (name == "check") return cmd_check(cfg, out, quiet);
        if (name == "constants") return cmd_constants(cfg, out, quiet);
        if (name == "fiber") return cmd_fiber(cfg, out, quiet);
        if (name == "solve") return cmd_solve(cfg, out, quiet);
        if (name == "verify") return cmd_verify(cfg, out, quiet);
        out << "unknown subcommand '" << name << "'\n";
        return 2;
    } catch (const ConfigError& e) {
        out << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace nehari
