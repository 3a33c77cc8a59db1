#pragma once

#include "eamg/problems.hpp"
#include "eamg/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eamg {

inline constexpr const char* kSoftwareVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1.0";

enum class ProblemKind { Poisson2d, Poisson3d, Elasticity3d, File };
enum class NullspaceKind { Ones, RigidBody, File };

struct ProblemSpec {
    ProblemKind kind = ProblemKind::Poisson2d;
    std::vector<Index> dims;
    ElasticityConfig material;
    std::string path;
    NullspaceKind nullspace = NullspaceKind::Ones;
    std::string nullspace_path;

    void validate() const;
};

ProblemKind parse_problem_kind(const std::string& s);
std::string to_string(ProblemKind k);
std::string to_string(NullspaceKind k);

/// Builds the matrix and near kernel described by `spec`. File problems use
/// the constant vector unless a near-kernel file is given.
Problem make_problem(const ProblemSpec& spec);

struct Variant {
    std::string name;  ///< canonical form, e.g. "EMIN-J(2)"
    ProlongationKind kind = ProlongationKind::Tentative;
    Preconditioner precond = Preconditioner::Jacobi;
    /// Fixed number of minimization steps; empty means run to the tau test.
    std::optional<Index> emin_steps;
};

/// Accepts TENTATIVE, SMOOTHED, EMIN, EMIN-J(n), EMIN-GS(n) (also EMIN-J:n),
/// case-insensitive. Plain EMIN uses the configured preconditioner.
Variant parse_variant(const std::string& s);

struct ExperimentConfig {
    double theta = 0.25;
    Index pattern_distance = 1;
    double tau = 0.1;
    Index emin_maxit = 10;
    Preconditioner precond = Preconditioner::Jacobi;
    Index l_max = 3;
    std::uint64_t seed = 42;
    double tol = 1e-8;
    Index solve_maxit = 1000;
    Index coarse_size = 500;
    int threads = 0;  ///< echoed only; 0 means the runtime default
};

HierarchyConfig hierarchy_config(const ExperimentConfig& cfg, const Variant& v);

struct RunSummary {
    std::string variant;
    Index levels = 0;
    double grid_complexity = 0.0;
    double operator_complexity = 0.0;
    std::vector<EminReport> emin;  ///< one per level where P was minimized
    SolveReport solve;
};

struct ExperimentOutcome {
    nlohmann::ordered_json report;
    std::vector<RunSummary> runs;
    bool all_converged = true;
};

/// Right-hand side used by every run: the normalized vector of ones.
Vector unit_rhs(Index n);

ExperimentOutcome run_experiment(const ProblemSpec& spec, const Problem& problem, const std::vector<Variant>& variants,
                                 const ExperimentConfig& cfg);

/// The JSON schema every report must satisfy.
const nlohmann::ordered_json& report_schema();

/// Checks `doc` against a schema using the type, required, properties,
/// items, enum and minimum keywords. Returns the first violation found.
std::optional<std::string> validate_json(const nlohmann::ordered_json& doc, const nlohmann::ordered_json& schema);

/// Serializes with every floating-point value printed to 17 significant digits.
std::string dump_report(const nlohmann::ordered_json& doc, int indent = 2);

/// Copy of the report without timings and the creation timestamp.
nlohmann::ordered_json strip_volatile(const nlohmann::ordered_json& doc);

/// CSV rows `iter,dE_rel,energy` for one minimization report.
std::string energy_trace_csv(const EminReport& rep);

}  // namespace eamg
