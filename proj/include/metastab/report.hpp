// Run configuration (strict JSON schema), report envelope, and the
// deterministic CSV/JSON emitters used by the command-line front end.
#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "metastab/audit.hpp"
#include "metastab/geometry.hpp"
#include "metastab/mie.hpp"

namespace metastab {

using json = nlohmann::json;

struct SurfaceSpec {
    std::string type = "sphere";  // sphere | ellipsoid
    Vec3 center{0, 0, 0};
    double radius = 1.0;
    Vec3 semi_axes{1, 1, 1};

    Surface build() const;
};

struct RunConfig {
    int version = 1;
    std::string subcommand;  // check-complementing | audit | mie-sweep | estimates
    unsigned long long seed = 0;
    std::string output_dir = ".";

    // materials
    SymMatrix3 eps_plus = SymMatrix3::identity();
    SymMatrix3 mu_plus = SymMatrix3::identity();
    SymMatrix3 eps_minus = -2.0 * SymMatrix3::identity();
    SymMatrix3 mu_minus = -2.0 * SymMatrix3::identity();
    double delta = 0.0;

    SurfaceSpec surface;

    // solver (mie-sweep)
    double omega = 1.0;
    double R = 1.0;
    std::string source_type = "shell";  // shell | plane
    double Rs = 1.5;
    int source_n = 1, source_m = 0;
    std::string source_pol = "TE";
    double source_amplitude = 1.0;
    Vec3 plane_direction{0, 0, 1};
    Vec3 plane_polarization{1, 0, 0};
    std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    int n_cap = 200;

    // audit
    std::string theorem = "thm1";  // thm1 | corADN | thm2 | corisotropic3
    int n_samples = 2048;
    double tau = 0.1;
    double alpha1 = 1.0, alpha2 = 1.0;
    double beta = -0.5;
    int n_beta = 19;

    // check-complementing
    SymMatrix3 check_a1 = SymMatrix3::identity();
    SymMatrix3 check_a2 = 2.0 * SymMatrix3::identity();
    Vec3 check_e{0, 0, 1};

    // estimates
    std::string estimates_which = "both";  // anti-curl | trace | both
    std::vector<double> alphas{0.0, 1.0, 1.5};
    std::vector<int> k_values{1, 2, 4, 8, 16, 32};
    int grid = 64;

    LayeredSphereProblem build_problem() const;
    MaterialSpec build_materials() const;
};

// Parses and schema-validates; unknown keys are rejected with the offending
// key named in the exception message.
RunConfig parse_config(const json& j);
RunConfig parse_config_file(const std::string& path);

// "I", "2", "-2.5", "2I", "diag(4,1/4,1)", or a 9-element row-major array.
SymMatrix3 parse_matrix(const json& v);

// full round-trip precision (17 significant digits)
std::string format_float(double v);

// FNV-1a 64 over the canonical (sorted-key) dump of the config
std::string config_hash(const json& config);

struct ReportEnvelope {
    std::string tool = "metastab";
    std::string version = "1.0.0";
    std::string hash;
    std::string timestamp;  // empty unless stamping was requested
    json payload;

    json to_json() const;
};

json audit_report_to_json(const AuditReport& rep);
json sweep_report_to_json(const SweepReport& rep);
std::string sweep_report_to_csv(const SweepReport& rep);

// estimates rows: (kind, field id, parameter, lhs, rhs, ratio)
struct EstimateRow {
    std::string kind;   // anti-curl | trace
    std::string field;
    double param = 0;   // alpha or k
    double lhs = 0, rhs = 0, ratio = 0;
};
std::string estimates_to_csv(const std::vector<EstimateRow>& rows);
json estimates_to_json(const std::vector<EstimateRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace metastab
