#include "eamg/experiment.hpp"

#include "eamg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <regex>
#include <sstream>

namespace eamg {

using ojson = nlohmann::ordered_json;

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const char* precond_name(Preconditioner p) { return p == Preconditioner::Jacobi ? "jacobi" : "sgs"; }

ojson to_json(const Vector& v) {
    ojson a = ojson::array();
    for (double x : v) a.push_back(x);
    return a;
}

ojson to_json(const std::vector<Index>& v) {
    ojson a = ojson::array();
    for (Index x : v) a.push_back(x);
    return a;
}

ojson emin_json(const EminReport& r, Index svd_rows) {
    ojson j;
    j["n_it_E"] = r.iterations;
    j["dE_rel"] = to_json(r.dE_rel);
    j["energy_initial"] = r.energy_initial;
    j["energy_final"] = r.energy_final;
    j["constraint_residual"] = r.constraint_residual;
    j["svd_rows"] = svd_rows;
    j["time_seconds"] = r.time_seconds;
    return j;
}

}  // namespace

void ProblemSpec::validate() const {
    switch (kind) {
    case ProblemKind::Poisson2d:
    case ProblemKind::Poisson3d: {
        const std::size_t d = kind == ProblemKind::Poisson2d ? 2 : 3;
        if (dims.size() != d) throw Error(ErrorCode::InvalidArgument, "poisson problem needs one size per dimension");
        for (Index x : dims)
            if (x < 1) throw Error(ErrorCode::InvalidArgument, "grid sizes must be positive");
        if (nullspace == NullspaceKind::RigidBody)
            throw Error(ErrorCode::InvalidArgument, "rigid-body modes are only defined for elasticity");
        break;
    }
    case ProblemKind::Elasticity3d:
        if (dims.size() != 3) throw Error(ErrorCode::InvalidArgument, "elasticity3d needs three element counts");
        for (Index x : dims)
            if (x < 2) throw Error(ErrorCode::InvalidArgument, "elasticity3d needs at least 2 elements per axis");
        if (!(material.poisson > 0.0 && material.poisson < 0.5))
            throw Error(ErrorCode::InvalidArgument, "Poisson ratio must lie in (0, 0.5)");
        if (nullspace == NullspaceKind::Ones)
            throw Error(ErrorCode::InvalidArgument, "elasticity3d uses rigid-body modes or a near-kernel file");
        break;
    case ProblemKind::File:
        if (path.empty()) throw Error(ErrorCode::InvalidArgument, "file problem needs a matrix path");
        if (nullspace == NullspaceKind::RigidBody)
            throw Error(ErrorCode::InvalidArgument, "rigid-body modes need node coordinates, which a matrix file lacks");
        break;
    }
    if (nullspace == NullspaceKind::File && nullspace_path.empty())
        throw Error(ErrorCode::InvalidArgument, "near-kernel file path missing");
}

ProblemKind parse_problem_kind(const std::string& s) {
    const std::string k = lower(s);
    if (k == "poisson2d") return ProblemKind::Poisson2d;
    if (k == "poisson3d") return ProblemKind::Poisson3d;
    if (k == "elasticity3d") return ProblemKind::Elasticity3d;
    if (k == "file") return ProblemKind::File;
    throw Error(ErrorCode::InvalidArgument, "unknown problem kind '" + s + "'");
}

std::string to_string(ProblemKind k) {
    switch (k) {
    case ProblemKind::Poisson2d: return "poisson2d";
    case ProblemKind::Poisson3d: return "poisson3d";
    case ProblemKind::Elasticity3d: return "elasticity3d";
    case ProblemKind::File: return "file";
    }
    return "?";
}

std::string to_string(NullspaceKind k) {
    switch (k) {
    case NullspaceKind::Ones: return "ones";
    case NullspaceKind::RigidBody: return "rigid_body";
    case NullspaceKind::File: return "file";
    }
    return "?";
}

Problem make_problem(const ProblemSpec& spec) {
    spec.validate();
    Problem p;
    switch (spec.kind) {
    case ProblemKind::Poisson2d:
    case ProblemKind::Poisson3d:
        p = gen_poisson(spec.dims);
        break;
    case ProblemKind::Elasticity3d:
        p = gen_elasticity_cube(spec.dims[0], spec.dims[1], spec.dims[2], spec.material);
        break;
    case ProblemKind::File:
        p.A = mm_read(spec.path);
        if (p.A.nrows != p.A.ncols) throw Error(ErrorCode::DimensionMismatch, "matrix file is not square");
        p.near_kernel.V = DenseMatrix(p.A.nrows, 1, 1.0);
        break;
    }
    if (spec.nullspace == NullspaceKind::File) {
        p.near_kernel.V = mm_read_dense(spec.nullspace_path);
        if (p.near_kernel.V.rows() != p.A.nrows)
            throw Error(ErrorCode::DimensionMismatch, "near-kernel file has " + std::to_string(p.near_kernel.V.rows()) +
                                                          " rows, matrix has " + std::to_string(p.A.nrows));
    }
    p.near_kernel.validate();
    return p;
}

Variant parse_variant(const std::string& s) {
    const std::string u = upper(s);
    Variant v;
    if (u == "TENTATIVE") {
        v.kind = ProlongationKind::Tentative;
        v.name = "TENTATIVE";
        return v;
    }
    if (u == "SMOOTHED") {
        v.kind = ProlongationKind::Smoothed;
        v.name = "SMOOTHED";
        return v;
    }
    if (u == "EMIN") {
        v.kind = ProlongationKind::Emin;
        v.name = "EMIN";
        return v;
    }
    static const std::regex re(R"(EMIN-(J|GS)(?:\((\d+)\)|:(\d+)))");
    std::smatch m;
    if (!std::regex_match(u, m, re))
        throw Error(ErrorCode::InvalidArgument, "unknown variant '" + s + "' (TENTATIVE, SMOOTHED, EMIN, EMIN-J(n), EMIN-GS(n))");
    v.kind = ProlongationKind::Emin;
    v.precond = m[1] == "J" ? Preconditioner::Jacobi : Preconditioner::BlockSGS;
    const std::string digits = m[2].matched ? m[2].str() : m[3].str();
    const long n = std::stol(digits);
    if (n < 1 || n > 100000) throw Error(ErrorCode::InvalidArgument, "step count in '" + s + "' must be positive");
    v.emin_steps = static_cast<Index>(n);
    v.name = "EMIN-" + m[1].str() + "(" + std::to_string(n) + ")";
    return v;
}

HierarchyConfig hierarchy_config(const ExperimentConfig& cfg, const Variant& v) {
    HierarchyConfig h;
    h.kind = v.kind;
    h.theta = cfg.theta;
    h.l_max = cfg.l_max;
    h.seed = cfg.seed;
    h.coarse_size = cfg.coarse_size;
    h.emin.pattern_distance = cfg.pattern_distance;
    h.emin.tau = cfg.tau;
    if (v.emin_steps) {
        h.emin.precond = v.precond;
        h.emin.maxit = *v.emin_steps;
        h.emin.fixed_iterations = true;
    } else {
        h.emin.precond = cfg.precond;
        h.emin.maxit = cfg.emin_maxit;
    }
    return h;
}

Vector unit_rhs(Index n) { return Vector(n, n > 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 0.0); }

ExperimentOutcome run_experiment(const ProblemSpec& spec, const Problem& problem, const std::vector<Variant>& variants,
                                 const ExperimentConfig& cfg) {
    if (variants.empty()) throw Error(ErrorCode::InvalidArgument, "no variants requested");
    ExperimentOutcome out;
    ojson& rep = out.report;
    rep["schema_version"] = kReportSchemaVersion;
    rep["software"] = {{"name", "eamg"}, {"version", kSoftwareVersion}};
    rep["created_utc"] = utc_now();

    ojson prob;
    prob["kind"] = to_string(spec.kind);
    prob["dims"] = to_json(spec.dims);
    if (spec.kind == ProblemKind::Elasticity3d)
        prob["material"] = {{"E", spec.material.young}, {"nu", spec.material.poisson}, {"patch", spec.material.patch}};
    if (spec.kind == ProblemKind::File) prob["path"] = spec.path;
    prob["nullspace"] = to_string(spec.nullspace);
    if (spec.nullspace == NullspaceKind::File) prob["nullspace_path"] = spec.nullspace_path;
    prob["n"] = problem.A.nrows;
    prob["nnz"] = problem.A.nnz();
    prob["modes"] = problem.near_kernel.modes();
    rep["problem"] = prob;

    rep["config"] = {{"theta", cfg.theta},
                     {"pattern_distance", cfg.pattern_distance},
                     {"tau", cfg.tau},
                     {"emin_maxit", cfg.emin_maxit},
                     {"precond", precond_name(cfg.precond)},
                     {"l_max", cfg.l_max},
                     {"seed", cfg.seed},
                     {"tol", cfg.tol},
                     {"threads", cfg.threads > 0 ? cfg.threads : num_threads()}};

    const Vector b = unit_rhs(problem.A.nrows);
    rep["runs"] = ojson::array();
    for (const Variant& v : variants) {
        const HierarchyConfig hc = hierarchy_config(cfg, v);
        Hierarchy H = build_hierarchy(problem.A, problem.near_kernel, hc);
        SolveResult sr = pcg_solve(problem.A, b, H, cfg.tol, cfg.solve_maxit);

        RunSummary sum;
        sum.variant = v.name;
        sum.levels = static_cast<Index>(H.levels.size());
        sum.grid_complexity = H.grid_complexity;
        sum.operator_complexity = H.operator_complexity;
        sum.solve = sr.report;

        ojson run;
        run["variant"] = v.name;
        ojson hier;
        hier["levels"] = sum.levels;
        hier["C_gd"] = H.grid_complexity;
        hier["C_op"] = H.operator_complexity;
        ojson details = ojson::array();
        for (std::size_t l = 0; l < H.levels.size(); ++l) {
            const Level& L = H.levels[l];
            ojson d;
            d["level"] = static_cast<Index>(l);
            d["n"] = L.A.nrows;
            d["nnz"] = L.A.nnz();
            if (L.tentative) {
                d["tentative"] = {{"accepted_at_distance", to_json(L.tentative->accepted_at_distance)},
                                  {"violating", L.tentative->violating},
                                  {"empty_rows", L.tentative->empty_rows},
                                  {"constraint_residual", L.tentative_constraint_residual}};
            }
            if (L.emin) {
                d["emin"] = emin_json(*L.emin, L.svd_rows);
                sum.emin.push_back(*L.emin);
            }
            details.push_back(d);
        }
        hier["level_details"] = details;
        ojson warn = ojson::array();
        for (const std::string& w : H.warnings) warn.push_back(w);
        hier["warnings"] = warn;
        run["hierarchy"] = hier;

        const SolveReport& s = sr.report;
        run["solve"] = {{"n_it", s.iterations},
                        {"converged", s.converged},
                        {"final_relative_residual", s.relative_residuals.back()},
                        {"relative_residuals", to_json(s.relative_residuals)},
                        {"timings", {{"T_p", s.setup_seconds}, {"T_s", s.solve_seconds}, {"T_t", s.total_seconds},
                                     {"T_i", s.improve_seconds}}}};
        rep["runs"].push_back(run);
        out.all_converged = out.all_converged && s.converged;
        out.runs.push_back(std::move(sum));
    }
    if (auto err = validate_json(rep, report_schema()))
        throw Error(ErrorCode::InvalidArgument, "report does not match its schema: " + *err);
    return out;
}

const ojson& report_schema() {
    static const ojson schema = ojson::parse(R"({
  "type": "object",
  "required": ["schema_version", "software", "created_utc", "problem", "config", "runs"],
  "properties": {
    "schema_version": {"type": "string", "enum": ["1.0"]},
    "software": {"type": "object", "required": ["name", "version"],
                 "properties": {"name": {"type": "string"}, "version": {"type": "string"}}},
    "created_utc": {"type": "string"},
    "problem": {
      "type": "object",
      "required": ["kind", "dims", "nullspace", "n", "nnz", "modes"],
      "properties": {
        "kind": {"type": "string", "enum": ["poisson2d", "poisson3d", "elasticity3d", "file"]},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "material": {"type": "object", "required": ["E", "nu", "patch"]},
        "nullspace": {"type": "string", "enum": ["ones", "rigid_body", "file"]},
        "n": {"type": "integer", "minimum": 1},
        "nnz": {"type": "integer", "minimum": 1},
        "modes": {"type": "integer", "minimum": 1}
      }
    },
    "config": {
      "type": "object",
      "required": ["theta", "pattern_distance", "tau", "emin_maxit", "precond", "l_max", "seed", "tol", "threads"],
      "properties": {
        "theta": {"type": "number", "minimum": 0},
        "pattern_distance": {"type": "integer", "minimum": 0},
        "tau": {"type": "number", "minimum": 0},
        "emin_maxit": {"type": "integer", "minimum": 1},
        "precond": {"type": "string", "enum": ["jacobi", "sgs"]},
        "l_max": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "tol": {"type": "number", "minimum": 0},
        "threads": {"type": "integer", "minimum": 1}
      }
    },
    "runs": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["variant", "hierarchy", "solve"],
        "properties": {
          "variant": {"type": "string"},
          "hierarchy": {
            "type": "object",
            "required": ["levels", "C_gd", "C_op", "level_details", "warnings"],
            "properties": {
              "levels": {"type": "integer", "minimum": 1},
              "C_gd": {"type": "number", "minimum": 1},
              "C_op": {"type": "number", "minimum": 1},
              "level_details": {
                "type": "array",
                "items": {
                  "type": "object",
                  "required": ["level", "n", "nnz"],
                  "properties": {
                    "level": {"type": "integer", "minimum": 0},
                    "n": {"type": "integer", "minimum": 1},
                    "nnz": {"type": "integer", "minimum": 0},
                    "tentative": {"type": "object",
                                  "required": ["accepted_at_distance", "violating", "empty_rows", "constraint_residual"]},
                    "emin": {
                      "type": "object",
                      "required": ["n_it_E", "dE_rel", "energy_initial", "energy_final", "constraint_residual",
                                   "svd_rows", "time_seconds"],
                      "properties": {
                        "n_it_E": {"type": "integer", "minimum": 0},
                        "dE_rel": {"type": "array", "items": {"type": "number"}},
                        "energy_initial": {"type": "number"},
                        "energy_final": {"type": "number"},
                        "constraint_residual": {"type": "number", "minimum": 0},
                        "svd_rows": {"type": "integer", "minimum": 0},
                        "time_seconds": {"type": "number", "minimum": 0}
                      }
                    }
                  }
                }
              },
              "warnings": {"type": "array", "items": {"type": "string"}}
            }
          },
          "solve": {
            "type": "object",
            "required": ["n_it", "converged", "final_relative_residual", "relative_residuals", "timings"],
            "properties": {
              "n_it": {"type": "integer", "minimum": 0},
              "converged": {"type": "boolean"},
              "final_relative_residual": {"type": "number"},
              "relative_residuals": {"type": "array", "items": {"type": "number"}},
              "timings": {"type": "object", "required": ["T_p", "T_s", "T_t", "T_i"]}
            }
          }
        }
      }
    }
  }
})");
    return schema;
}

namespace {

bool type_matches(const ojson& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    if (t == "null") return v.is_null();
    return false;
}

std::optional<std::string> validate_at(const ojson& doc, const ojson& schema, const std::string& where) {
    if (schema.contains("type") && !type_matches(doc, schema["type"].get<std::string>()))
        return where + ": expected " + schema["type"].get<std::string>();
    if (schema.contains("enum")) {
        const ojson& e = schema["enum"];
        if (std::find(e.begin(), e.end(), doc) == e.end()) return where + ": value not in enum";
    }
    if (schema.contains("minimum") && doc.is_number() && doc.get<double>() < schema["minimum"].get<double>())
        return where + ": below minimum";
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& k : schema["required"])
                if (!doc.contains(k.get<std::string>())) return where + ": missing '" + k.get<std::string>() + "'";
        if (schema.contains("properties"))
            for (const auto& [k, sub] : schema["properties"].items())
                if (doc.contains(k))
                    if (auto err = validate_at(doc[k], sub, where + "." + k)) return err;
    }
    if (doc.is_array() && schema.contains("items"))
        for (std::size_t i = 0; i < doc.size(); ++i)
            if (auto err = validate_at(doc[i], schema["items"], where + "[" + std::to_string(i) + "]")) return err;
    return std::nullopt;
}

void dump_value(const ojson& v, int indent, int depth, std::string& out) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    if (v.is_object() || v.is_array()) {
        const bool obj = v.is_object();
        out += obj ? '{' : '[';
        if (v.empty()) {
            out += obj ? '}' : ']';
            return;
        }
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            if (obj) {
                out += ojson(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
            }
            dump_value(*it, indent, depth + 1, out);
        }
        newline(depth);
        out += obj ? '}' : ']';
    } else if (v.is_number_float()) {
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            out += "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
    } else {
        out += v.dump();
    }
}

void strip_in_place(ojson& v) {
    if (v.is_object()) {
        v.erase("timings");
        v.erase("time_seconds");
        v.erase("created_utc");
        for (auto& [k, sub] : v.items()) strip_in_place(sub);
    } else if (v.is_array()) {
        for (auto& sub : v) strip_in_place(sub);
    }
}

}  // namespace

std::optional<std::string> validate_json(const ojson& doc, const ojson& schema) { return validate_at(doc, schema, "$"); }

std::string dump_report(const ojson& doc, int indent) {
    std::string out;
    dump_value(doc, indent, 0, out);
    out += '\n';
    return out;
}

ojson strip_volatile(const ojson& doc) {
    ojson copy = doc;
    strip_in_place(copy);
    return copy;
}

std::string energy_trace_csv(const EminReport& rep) {
    std::string out = "iter,dE_rel,energy\n";
    char buf[96];
    for (std::size_t k = 0; k < rep.dE_rel.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k + 1, rep.dE_rel[k],
                      k < rep.energy.size() ? rep.energy[k] : rep.energy_final);
        out += buf;
    }
    return out;
}

}  // namespace eamg
