// eamg: run prolongation-variant experiments on generated or file-loaded
// SPD problems and write a JSON report.

#include "eamg/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

namespace {

std::string trace_path(const std::string& base, const std::string& variant, bool several) {
    if (!several) return base;
    std::string slug;
    for (char c : variant)
        if (std::isalnum(static_cast<unsigned char>(c))) slug += static_cast<char>(std::tolower(c));
    const auto dot = base.find_last_of('.');
    const auto slash = base.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return base + "_" + slug;
    return base.substr(0, dot) + "_" + slug + base.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-minimizing AMG prolongation experiments"};

    std::string problem = "poisson2d";
    eamg::Index nx = 64, ny = 0, nz = 0;
    std::string matrix, nullspace;
    std::vector<std::string> variant_names;
    std::optional<double> theta;
    eamg::ExperimentConfig cfg;
    std::string precond = "jacobi";
    double young = 1.0, poisson = 0.3, patch = 0.125;
    std::string out_path, trace_csv;
    int threads = 0;
    bool quiet = false;

    app.add_option("--problem", problem, "poisson2d | poisson3d | elasticity3d | file")
        ->check(CLI::IsMember({"poisson2d", "poisson3d", "elasticity3d", "file"}, CLI::ignore_case));
    app.add_option("--nx", nx, "grid points (Poisson) or elements (elasticity) along x")->check(CLI::PositiveNumber);
    app.add_option("--ny", ny, "along y (default: nx)");
    app.add_option("--nz", nz, "along z (default: nx)");
    app.add_option("--matrix", matrix, "Matrix Market file; implies --problem file")->check(CLI::ExistingFile);
    app.add_option("--nullspace", nullspace, "dense Matrix Market near-kernel file")->check(CLI::ExistingFile);
    app.add_option("--variant", variant_names, "TENTATIVE | SMOOTHED | EMIN | EMIN-J(n) | EMIN-GS(n); repeatable");
    app.add_option("--theta,--strength-threshold", theta, "strength threshold (default 0.25, elasticity 0.06)");
    app.add_option("--pattern-distance", cfg.pattern_distance, "pattern expansion distance")->check(CLI::NonNegativeNumber);
    app.add_option("--tau", cfg.tau, "relative energy-decrease stopping threshold")->check(CLI::Range(0.0, 1.0));
    app.add_option("--emin-maxit", cfg.emin_maxit, "maximum minimization steps for EMIN")->check(CLI::PositiveNumber);
    app.add_option("--precond", precond, "minimization preconditioner for EMIN")
        ->check(CLI::IsMember({"jacobi", "sgs"}, CLI::ignore_case));
    app.add_option("--lmax", cfg.l_max, "maximum neighbourhood distance of the tentative interpolation")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "coarsening seed");
    app.add_option("--tol", cfg.tol, "relative residual tolerance of the outer solve")->check(CLI::PositiveNumber);
    app.add_option("--coarse-size", cfg.coarse_size, "stop coarsening at this many unknowns")->check(CLI::PositiveNumber);
    app.add_option("--young", young, "Young's modulus (elasticity)")->check(CLI::PositiveNumber);
    app.add_option("--poisson-ratio", poisson, "Poisson ratio (elasticity)");
    app.add_option("--patch", patch, "side of the clamped square at z = 0 (elasticity); negative: none");
    app.add_option("--out", out_path, "JSON report path (default: stdout)");
    app.add_option("--trace-csv", trace_csv, "CSV of finest-level energy traces for EMIN runs");
    app.add_option("--threads", threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("-q,--quiet", quiet, "no summary on stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        if (threads > 0) eamg::set_num_threads(threads);
        cfg.threads = eamg::num_threads();

        eamg::ProblemSpec spec;
        spec.kind = matrix.empty() ? eamg::parse_problem_kind(problem) : eamg::ProblemKind::File;
        spec.path = matrix;
        if (spec.kind == eamg::ProblemKind::Poisson2d) spec.dims = {nx, ny > 0 ? ny : nx};
        else if (spec.kind != eamg::ProblemKind::File) spec.dims = {nx, ny > 0 ? ny : nx, nz > 0 ? nz : nx};
        spec.material = {young, poisson, patch};
        if (!nullspace.empty()) {
            spec.nullspace = eamg::NullspaceKind::File;
            spec.nullspace_path = nullspace;
        } else if (spec.kind == eamg::ProblemKind::Elasticity3d) {
            spec.nullspace = eamg::NullspaceKind::RigidBody;
        }
        cfg.theta = theta.value_or(spec.kind == eamg::ProblemKind::Elasticity3d ? 0.06 : 0.25);
        cfg.precond = precond == "sgs" || precond == "SGS" ? eamg::Preconditioner::BlockSGS : eamg::Preconditioner::Jacobi;

        if (variant_names.empty()) variant_names = {"TENTATIVE", "SMOOTHED", "EMIN-J(2)", "EMIN-GS(1)"};
        std::vector<eamg::Variant> variants;
        for (const std::string& v : variant_names) variants.push_back(eamg::parse_variant(v));

        const eamg::Problem prob = eamg::make_problem(spec);
        const eamg::ExperimentOutcome res = eamg::run_experiment(spec, prob, variants, cfg);

        const std::string text = eamg::dump_report(res.report);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(out_path);
            if (!f) throw eamg::Error(eamg::ErrorCode::Io, "cannot write " + out_path);
            f << text;
        }

        if (!trace_csv.empty()) {
            std::size_t n_emin = 0;
            for (const auto& r : res.runs) n_emin += r.emin.empty() ? 0 : 1;
            for (const auto& r : res.runs) {
                if (r.emin.empty()) continue;
                const std::string path = trace_path(trace_csv, r.variant, n_emin > 1);
                std::ofstream f(path);
                if (!f) throw eamg::Error(eamg::ErrorCode::Io, "cannot write " + path);
                f << eamg::energy_trace_csv(r.emin.front());
            }
        }

        if (!quiet) {
            std::cerr << "n = " << prob.A.nrows << ", nnz = " << prob.A.nnz() << ", modes = " << prob.near_kernel.modes()
                      << "\n";
            for (const auto& r : res.runs)
                std::cerr << r.variant << ": levels " << r.levels << ", C_gd " << r.grid_complexity << ", C_op "
                          << r.operator_complexity << ", n_it " << r.solve.iterations
                          << (r.solve.converged ? "" : " (not converged)") << ", T_t " << r.solve.total_seconds << " s\n";
        }
        return res.all_converged ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
