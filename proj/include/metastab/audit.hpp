// Hypothesis-checking engine: which of the stability results apply to a given
// material pair and interface, with quantified margins and failure witnesses.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "metastab/complementing.hpp"
#include "metastab/geometry.hpp"

namespace metastab {

// Matrix field on a collar: constant, piecewise constant over plane-split
// labels, or a sampled box grid with trilinear interpolation.
class MaterialField {
  public:
    static MaterialField constant(SymMatrix3 value);
    // value = inside if dot(x, plane_normal) < plane_offset else outside
    static MaterialField piecewise_plane(Vec3 plane_normal, double plane_offset,
                                         SymMatrix3 inside, SymMatrix3 outside);
    static MaterialField sampled_grid(Vec3 lo, Vec3 hi, int nx, int ny, int nz,
                                      std::function<SymMatrix3(Vec3)> sampler);

    SymMatrix3 operator()(Vec3 x) const;
    // region label at x (0 for constant/sampled, 0/1 for piecewise)
    int region_label(Vec3 x) const;

  private:
    enum class Kind { Constant, PiecewisePlane, Grid } kind_ = Kind::Constant;
    SymMatrix3 const_{}, inside_{}, outside_{};
    Vec3 normal_{0, 0, 1};
    double offset_ = 0;
    Vec3 lo_{}, hi_{};
    int nx_ = 0, ny_ = 0, nz_ = 0;
    std::vector<SymMatrix3> grid_;
};

struct MaterialSpec {
    MaterialField eps_plus, mu_plus;    // on the exterior collar
    MaterialField eps_minus, mu_minus;  // on the interior collar (negative definite)
    double delta = 0.0;                 // loss, applied as +i delta I inside D
    double ellipticity_floor = 1e-9;

    // eps_plus, mu_plus, -eps_minus, -mu_minus uniformly elliptic at the
    // given points; throws std::invalid_argument on violation.
    void validate_on(const std::vector<Vec3>& exterior_pts,
                     const std::vector<Vec3>& interior_pts) const;
};

enum class Verdict { Applies, Fails, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Applies: return "Applies";
        case Verdict::Fails: return "Fails";
        default: return "Inconclusive";
    }
}

struct SampleRecord {
    Vec3 location{};
    double margin_eps = 0;  // complementing margin of (eps+, -eps-) at the point
    double margin_mu = 0;
};

struct AuditReport {
    std::string theorem;
    Verdict verdict = Verdict::Inconclusive;
    int n_samples = 0;
    double min_margin_eps = 0, min_margin_mu = 0;
    SampleRecord worst_eps{}, worst_mu{};
    std::vector<SampleRecord> sample_records;  // one per boundary sample (thm1)
    std::optional<Vec3> witness_direction;  // failure witness (tangent), if any
    // ordering data (thm2 / corisotropic3)
    double c_eps = 0, c_mu = 0;
    double alpha1 = 0, alpha2 = 0;
    bool source_support_obligation = false;  // alpha1 + alpha2 > 0
    double best_beta = 0, best_gamma = 0;    // corisotropic3 scan result
    std::vector<std::pair<double, double>> beta_scan;  // (beta, certified gamma)
    // user-asserted smoothness flags, recorded not verified
    bool user_asserts_c1 = false, user_asserts_c2 = false, user_asserts_c3 = false;
    std::string note;
};

// Complementing conditions of both pairs at n_samples boundary points.
AuditReport audit_thm1(const MaterialSpec& m, const Surface& s, int n_samples = 2048);

// Constant-gap matrix orderings per connected component.
AuditReport audit_corADN(const MaterialSpec& m, const Surface& s, int n_samples = 2048);

// Graded orderings (eps vs pushforward of eps-) for a given reflection.
AuditReport audit_thm2(const MaterialSpec& m, const Surface& s, const DiffeoMap& reflection,
                       double tau, double alpha1, double alpha2, int n_samples = 512);

// Convex-reflection certificate: scans beta over a grid in (-1, 0), builds
// the convex reflection for each, delegates to the graded ordering with
// alpha1 = alpha2 = 1, and reports the best certified (beta, gamma).
// Requires a strictly convex surface and constant isotropic materials near
// the boundary; throws std::invalid_argument otherwise.
AuditReport audit_corisotropic3(const MaterialSpec& m, const Surface& s, double tau,
                                int n_samples = 256, int n_beta = 19);

}  // namespace metastab
