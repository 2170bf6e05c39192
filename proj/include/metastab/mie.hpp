// Semi-analytic radiating solver for the ball transmission problem with
// constant isotropic (possibly negative) interior coefficients plus loss
// i*delta: per-mode transmission solves, field synthesis, L2 norms over
// radial regions, the dissipation/flux balance, and delta-sweeps.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "metastab/vec.hpp"

namespace metastab {

enum class Polarization { TE, TM };

inline const char* to_string(Polarization p) { return p == Polarization::TE ? "TE" : "TM"; }

// tangential surface current  J = amplitude * V_nm * delta(r - radius), with
// V = C_nm for TE and V = B_nm for TM
struct ShellCurrent {
    double radius = 1.5;
    int n = 1, m = 0;
    Polarization pol = Polarization::TE;
    complexd amplitude{1.0, 0.0};
};

struct PlaneWave {
    Vec3 direction{0, 0, 1};
    Vec3 polarization{1, 0, 0};
    double amplitude = 1.0;
};

struct LayeredSphereProblem {
    double omega = 1.0;
    double interface_radius = 1.0;     // R
    double eps_minus = -1.0;           // real interior permittivity
    double mu_minus = -1.0;            // real interior permeability
    double delta = 0.0;                // loss, added as +i delta to both
    std::variant<ShellCurrent, PlaneWave> source = ShellCurrent{};

    // Throws std::invalid_argument on violated invariants (delta < 0, R <= 0,
    // shell radius <= R, zero plane-wave polarization, ...).
    void validate() const;
    complexd eps_c() const { return {eps_minus, delta}; }
    complexd mu_c() const { return {mu_minus, delta}; }
    bool has_shell() const { return std::holds_alternative<ShellCurrent>(source); }
    double source_radius() const;  // +inf for plane wave
};

// Per-(n, pol) radial solution. Radial shapes are m-independent; the actual
// angular content is carried by (m, amplitude) pairs. Coefficients a,b,c,d
// are per unit drive:
//   r < R:          a j_n(k_c r)
//   R < r < R_s:    b j_n(k r) + c h1_n(k r)
//   r > R_s:        d h1_n(k r)
// (plane wave: no shell, b = incident, d unused).
struct ModeSolution {
    int n = 1;
    Polarization pol = Polarization::TE;
    complexd k_interior{0, 0};
    complexd denominator{0, 0};  // transmission determinant at r = R
    complexd a{0, 0}, b{0, 0}, c{0, 0}, d{0, 0};
    std::vector<std::pair<int, complexd>> m_amplitudes;

    // problem snapshot
    double omega = 1.0, R = 1.0, Rs = 0.0;  // Rs = +inf when no shell
    complexd eps_c{1, 0}, mu_c{1, 0};
    bool plane_wave = false;
};

// Radiating per-mode transmission solve. For a ShellCurrent source, modes
// other than the driven one come back identically zero. At delta = 0 a
// denominator within 1e-13 of zero (relative to its term scale) raises
// std::runtime_error mentioning "resonant mode".
ModeSolution solve_mode(const LayeredSphereProblem& p, int n, Polarization pol);

// All modes needed for the source: one for a shell current, a truncated
// multipole family for a plane wave (relative contribution threshold 1e-12,
// hard cap n <= n_cap with a warning flag).
struct ModeSet {
    std::vector<ModeSolution> modes;
    bool truncation_warning = false;
    int n_max_used = 0;
};
ModeSet solve_all_modes(const LayeredSphereProblem& p, int n_cap = 200);

struct EMField {
    CVec3 E{}, H{};
};

// Field synthesis at a point (lab frame). Throws when evaluating on the
// source sphere.
EMField field_at(const ModeSet& set, const LayeredSphereProblem& p, Vec3 x);

// L2 norm of (E, H) over the spherical annulus r in [r1, r2]: angular
// integrals exact by VSH orthonormality, radial by Gauss-Legendre (split at
// R and R_s).
double l2_norm(const ModeSet& set, const LayeredSphereProblem& p, double r1, double r2);

// Residual of the exact dissipation/flux balance
//   omega delta int_D (|E|^2+|H|^2) + Re oint_{|x|=rho} (conj(E) x H).nu
//     + Re int J . conj(E)  =  0
// relative to the term magnitudes. Requires delta > 0 (the identity
// degenerates to pure flux balance at delta = 0; allowed only for the
// no-contrast sanity configuration via allow_lossless).
double energy_identity_check(const ModeSet& set, const LayeredSphereProblem& p,
                             bool allow_lossless = false);

// max over directions of r * |H x rhat - E| at radius r (Silver-Mueller)
double silver_muller_residual(const ModeSet& set, const LayeredSphereProblem& p, double r,
                              int n_dirs = 16);

// Surface L2 norm of the driving sheet current; NaN for a plane wave.
double source_norm(const LayeredSphereProblem& p);

struct SweepRow {
    double delta = 0;
    double norm_exterior_annulus = 0;  // L2(B_2R \ V), V = {|r-R| < 0.1R}
    double norm_interior = 0;          // L2(B_R)
    double norm_collar = 0;            // L2(|r-R| < 0.1R)
    double energy_residual = 0;
    double silver_muller = 0;
    double min_mode_denominator = 0;
    int n_modes_used = 0;
    bool truncation_warning = false;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // in the order of the given delta list
    bool lap_convergent = false;
    bool resonant = false;
    // max over rows of delta * ||(E,H)||_{L2(B_2R)} / ||J|| (NaN if no J)
    double envelope_constant = 0;
};

// delta list must be positive and descending. LAP-convergent: exterior norms
// Cauchy within 1% across the last three deltas. Resonant: collar norm grows
// monotonically by >= 10x from the first to the last delta.
SweepReport delta_sweep(const LayeredSphereProblem& base, const std::vector<double>& deltas,
                        int n_cap = 200);

}  // namespace metastab
