#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nshoot/io.hpp"
#include "nshoot/nshoot.hpp"

namespace fs = std::filesystem;
using namespace nshoot;

namespace {

bool log_enabled() {
    const char* v = std::getenv("SHOOTING_LOG");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "[nshoot] " << msg << "\n";
}

struct CommonOpts {
    std::string input;
    std::string out = ".";
    double lambda = 0.0;  // 0: keep the input file's value
    double mu = 0.0;
    double tol_rel = 1e-10;
    double tol_abs = 1e-12;
    double gap_max = 0.05;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 1)
        throw schema_error("grid must be 'lo:hi:count' with count >= 1: got '" + text + "'");
    if (n == 1) return {lo};
    return linspace(lo, hi, static_cast<std::size_t>(n));
}

ProblemDef load_problem(const CommonOpts& c) {
    ProblemDef p = problem_from_json(load_json(c.input));
    const double lam = c.lambda > 0.0 ? c.lambda : p.lambda;
    const double mu = c.mu > 0.0 ? c.mu : p.mu;
    return p.with_parameters(lam, mu);
}

FindOptions find_options(const CommonOpts& c) {
    FindOptions f;
    f.continuum.gap_max = c.gap_max;
    f.continuum.solve.rel_tol = c.tol_rel;
    f.continuum.solve.abs_tol = c.tol_abs;
    f.intersect.solve = f.continuum.solve;
    f.refine.solve = f.continuum.solve;
    return f;
}

void emit_solve_outputs(const fs::path& dir, const ProblemDef& p, const FindReport& rep,
                        const CommonOpts& c, const std::string& command) {
    Json summary;
    summary["command"] = command;
    summary["lambda"] = p.lambda;
    summary["mu"] = p.mu;
    summary["seed"] = c.seed;
    summary["tolerances"] =
        Json{{"rel", c.tol_rel}, {"abs", c.tol_abs}, {"gap_max", c.gap_max}};
    summary["solution_count"] = rep.solutions.size();
    Json sols = Json::array();
    for (const auto& s : rep.solutions) {
        sols.push_back(Json{{"xi_forward", s.xi},
                            {"xi_backward", s.xi_backward},
                            {"residual_left", s.residual_left},
                            {"residual_right", s.residual_right},
                            {"min_u", s.min_u},
                            {"max_u", s.max_u},
                            {"ode_residual", s.ode_residual}});
    }
    summary["solutions"] = std::move(sols);
    summary["forward_continuum"] = Json{{"nodes", rep.forward.nodes.size()},
                                        {"conforming", rep.forward.conforming},
                                        {"max_gap", rep.forward.max_gap}};
    summary["backward_continuum"] = Json{{"nodes", rep.backward.nodes.size()},
                                         {"conforming", rep.backward.conforming},
                                         {"max_gap", rep.backward.max_gap}};
    write_file((dir / "summary.json").string(), summary.dump(2) + "\n");
    write_file((dir / "solutions.csv").string(), solutions_to_csv(rep.solutions, p));
    write_file((dir / "continua.csv").string(), continua_to_csv(rep.forward, rep.backward));
    write_file((dir / "intersections.json").string(),
               intersections_to_json(rep.intersections).dump(2) + "\n");
}

int run_solve(const CommonOpts& c, bool bundled) {
    ProblemDef p = bundled ? example_problem(c.lambda > 0.0 ? c.lambda : 25.0,
                                             c.mu > 0.0 ? c.mu : 500.0)
                           : load_problem(c);
    log_line("solving with lambda=" + fmt_double(p.lambda) + " mu=" + fmt_double(p.mu));
    const fs::path dir(c.out);
    fs::create_directories(dir);
    const FindReport rep = find_solutions(p, find_options(c));
    emit_solve_outputs(dir, p, rep, c, bundled ? "reproduce-example" : "solve");
    log_line("found " + std::to_string(rep.solutions.size()) + " solutions");
    return 0;
}

int run_sweep(const CommonOpts& c, const std::string& grid_lambda, const std::string& grid_mu) {
    ProblemDef p = load_problem(c);
    const std::vector<double> lambdas = parse_grid(grid_lambda);
    const std::vector<double> mus = parse_grid(grid_mu);
    const fs::path dir(c.out);
    fs::create_directories(dir);
    const SweepResult res = sweep(p, lambdas, mus, find_options(c), c.jobs);
    write_file((dir / "sweep.csv").string(), sweep_to_csv(res));
    Json summary;
    summary["command"] = "sweep";
    summary["seed"] = c.seed;
    summary["lambda_grid"] = lambdas;
    summary["mu_grid"] = mus;
    std::size_t failures = 0;
    for (const auto& cell : res.cells)
        if (cell.count < 0) ++failures;
    summary["cells"] = res.cells.size();
    summary["failed_cells"] = failures;
    write_file((dir / "summary.json").string(), summary.dump(2) + "\n");
    return 0;
}

int run_thresholds(const CommonOpts& c, double lambda_margin) {
    ProblemDef p = load_problem(c);
    CertifyOptions copts;
    copts.lambda_margin = lambda_margin;
    copts.solve.rel_tol = c.tol_rel;
    copts.solve.abs_tol = c.tol_abs;
    const ThresholdReport rep = certify(p.weight, p.g, copts);
    const fs::path dir(c.out);
    fs::create_directories(dir);
    write_file((dir / "thresholds.json").string(), threshold_report_to_json(rep).dump(2) + "\n");
    log_line("lambda* = " + fmt_double(rep.lambda_star) + ", mu* = " + fmt_double(rep.mu_star));
    return 0;
}

int run_check_lemmas(const CommonOpts& c, std::size_t trials) {
    ProblemDef p = load_problem(c);
    const ThresholdReport rep = certify(p.weight, p.g);
    if (!rep.feasible) throw infeasible_error("no feasible threshold certificate for this problem");
    const LemmaParams lp = lemma_params_from(rep);
    const LemmaSuiteResult res = run_lemma_suite(p, lp, trials, c.seed, SolveOptions{}, c.jobs);
    const fs::path dir(c.out);
    fs::create_directories(dir);
    Json j = lemma_suite_to_json(res, c.seed);
    j["thresholds"] = threshold_report_to_json(rep);
    write_file((dir / "lemma_verdicts.json").string(), j.dump(2) + "\n");
    log_line(std::to_string(res.failures) + " failures in " + std::to_string(res.total) +
             " trials");
    return 0;
}

int run_radial(const CommonOpts& c) {
    const RadialSpec rs = radial_from_json(load_json(c.input));
    const RadialReduction red = radial_reduce(rs);
    const double lam = c.lambda > 0.0 ? c.lambda : 25.0;
    const double mu = c.mu > 0.0 ? c.mu : 500.0;
    const ProblemDef p = make_problem(red.reduced, Nonlinearity::logistic2(), lam, mu);
    const FindReport rep = find_solutions(p, find_options(c));
    const fs::path dir(c.out);
    fs::create_directories(dir);
    emit_solve_outputs(dir, p, rep, c, "radial");

    Json summary;
    summary["command"] = "radial";
    summary["N"] = rs.dimension;
    summary["R_i"] = rs.r_inner;
    summary["R_e"] = rs.r_outer;
    summary["T"] = red.maps.T;
    summary["sigma"] = red.marks.sigma;
    summary["tau"] = red.marks.tau;
    summary["solution_count"] = rep.solutions.size();

    std::string lifted = "solution,r,u\n";
    Json lifts = Json::array();
    for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
        const RadialLift lift = radial_lift(rep.solutions[i].trajectory, p, rs, red.maps);
        lifts.push_back(Json{{"max_interior_residual", lift.max_interior_residual},
                             {"excluded_stencils", lift.excluded_stencils},
                             {"boundary_residual_inner", lift.boundary_residual_inner},
                             {"boundary_residual_outer", lift.boundary_residual_outer}});
        for (std::size_t k = 0; k < lift.r.size(); ++k) {
            lifted += std::to_string(i);
            lifted += ',';
            lifted += fmt_double(lift.r[k]);
            lifted += ',';
            lifted += fmt_double(lift.u[k]);
            lifted += '\n';
        }
    }
    summary["lifts"] = std::move(lifts);
    write_file((dir / "radial_summary.json").string(), summary.dump(2) + "\n");
    write_file((dir / "lifted.csv").string(), lifted);
    return 0;
}

int run_extend_periodic(const CommonOpts& c, std::size_t periods) {
    ProblemDef p = load_problem(c);
    const FindReport rep = find_solutions(p, find_options(c));
    const fs::path dir(c.out);
    fs::create_directories(dir);

    std::string csv = "solution,t,u\n";
    Json summary;
    summary["command"] = "extend-periodic";
    summary["periods"] = periods;
    summary["solution_count"] = rep.solutions.size();
    Json exts = Json::array();
    for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
        const PeriodicExtension ext = periodic_extend(rep.solutions[i].trajectory, periods);
        exts.push_back(Json{{"period", ext.period()},
                            {"gluing_defect", gluing_defect(ext)},
                            {"ode_residual", periodic_ode_residual(p, ext)}});
        const auto& ts = ext.sample_times();
        const auto& us = ext.sample_values();
        for (std::size_t k = 0; k < ts.size(); ++k) {
            csv += std::to_string(i);
            csv += ',';
            csv += fmt_double(ts[k]);
            csv += ',';
            csv += fmt_double(us[k]);
            csv += '\n';
        }
    }
    summary["extensions"] = std::move(exts);
    write_file((dir / "summary.json").string(), summary.dump(2) + "\n");
    write_file((dir / "periodic.csv").string(), csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shooting-method solver and verification toolkit for indefinite Neumann problems"};
    app.require_subcommand(1);

    CommonOpts c;
    std::string grid_lambda = "25:25:1", grid_mu = "500:500:1";
    std::size_t trials = 100, periods = 2;
    double lambda_margin = 1.01;

    const auto add_common = [&](CLI::App* cmd, bool needs_input) {
        if (needs_input)
            cmd->add_option("--input", c.input, "problem definition JSON")->required();
        cmd->add_option("--out", c.out, "output directory");
        cmd->add_option("--lambda", c.lambda, "override lambda");
        cmd->add_option("--mu", c.mu, "override mu");
        cmd->add_option("--tol-rel", c.tol_rel, "relative integration tolerance");
        cmd->add_option("--tol-abs", c.tol_abs, "absolute integration tolerance");
        cmd->add_option("--gap-max", c.gap_max, "continuum refinement gap");
        cmd->add_option("--seed", c.seed, "random seed");
        cmd->add_option("--jobs", c.jobs, "worker threads");
    };

    auto* solve = app.add_subcommand("solve", "find positive solutions of a problem file");
    add_common(solve, true);
    auto* repex = app.add_subcommand("reproduce-example",
                                     "run the bundled three-hump demonstration instance");
    add_common(repex, false);
    auto* sw = app.add_subcommand("sweep", "solution counts over a (lambda, mu) grid");
    add_common(sw, true);
    sw->add_option("--grid-lambda", grid_lambda, "lambda grid lo:hi:count");
    sw->add_option("--grid-mu", grid_mu, "mu grid lo:hi:count");
    auto* th = app.add_subcommand("thresholds", "sufficiency certificate (lambda*, mu*)");
    add_common(th, true);
    th->add_option("--lambda-margin", lambda_margin, "lambda_eval = margin * lambda*");
    auto* lem = app.add_subcommand("check-lemmas", "randomized verification battery");
    add_common(lem, true);
    lem->add_option("--trials", trials, "trials per lemma");
    auto* rad = app.add_subcommand("radial", "reduce an annular problem, solve and lift");
    add_common(rad, true);
    auto* per = app.add_subcommand("extend-periodic", "extend solutions by even reflection");
    add_common(per, true);
    per->add_option("--periods", periods, "number of periods to materialize");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(c, false);
        if (repex->parsed()) return run_solve(c, true);
        if (sw->parsed()) return run_sweep(c, grid_lambda, grid_mu);
        if (th->parsed()) return run_thresholds(c, lambda_margin);
        if (lem->parsed()) return run_check_lemmas(c, trials);
        if (rad->parsed()) return run_radial(c);
        if (per->parsed()) return run_extend_periodic(c, periods);
    } catch (const schema_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const sign_structure_error& e) {
        std::cerr << "sign-structure error: " << e.what() << "\n";
        return 2;
    } catch (const unsupported_structure_error& e) {
        std::cerr << "unsupported weight structure: " << e.what() << "\n";
        return 2;
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
