#include "metastab/vsh.hpp"

#include <cmath>
#include <stdexcept>

#include "metastab/specfun.hpp"

namespace metastab {

double legendre_norm(int n, int m, double ct) {
    // stable upward recurrence on the fully normalized functions
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double pmm = std::sqrt(1.0 / (4.0 * M_PI));
    for (int k = 1; k <= m; ++k)
        pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * st;
    if (n == m) return pmm;
    double pm1 = std::sqrt(2.0 * m + 3.0) * ct * pmm;
    if (n == m + 1) return pm1;
    double p = 0.0;
    for (int k = m + 2; k <= n; ++k) {
        const double a = std::sqrt((4.0 * k * k - 1.0) / (double(k) * k - double(m) * m));
        const double b =
            std::sqrt((double(k - 1) * (k - 1) - double(m) * m) / (4.0 * double(k - 1) * (k - 1) - 1.0));
        p = a * (ct * pm1 - b * pmm);
        pmm = pm1;
        pm1 = p;
    }
    return p;
}

AngularBasis vsh_basis(int n, int m, Vec3 dir) {
    if (n < 1 || std::abs(m) > n) throw std::invalid_argument("vsh_basis: need n >= 1, |m| <= n");
    const Vec3 rhat = normalized(dir);
    double ct = rhat.z;
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double cp = 1.0, sp = 0.0;
    if (st > 1e-13) {
        cp = rhat.x / st;
        sp = rhat.y / st;
    } else {
        // on the polar axis the azimuth is arbitrary; nudge off the pole so
        // the m = +-1 components take their finite limits
        st = 1e-13;
        ct = (ct >= 0) ? std::sqrt(1.0 - st * st) : -std::sqrt(1.0 - st * st);
    }

    const int ma = std::abs(m);
    const double pbar = legendre_norm(n, ma, ct);
    const double pbar_prev = (n - 1 >= ma) ? legendre_norm(n - 1, ma, ct) : 0.0;
    // sin(theta) dP/dtheta = n ct Pbar_n - sqrt((n^2-m^2)(2n+1)/(2n-1)) Pbar_{n-1}
    const double st_dp = n * ct * pbar -
                         std::sqrt((double(n) * n - double(ma) * ma) * (2.0 * n + 1.0) / (2.0 * n - 1.0)) *
                             pbar_prev;
    const double dp_dtheta = st_dp / st;
    const double m_over_st_p = ma * pbar / st;

    // e^{i m phi} for m >= 0 via (cp + i sp)^ma
    complexd phase{1.0, 0.0};
    for (int k = 0; k < ma; ++k) phase *= complexd(cp, sp);

    complexd Y = pbar * phase;
    complexd dY_dtheta = dp_dtheta * phase;
    complexd imY_over_st = complexd(0, 1) * (m_over_st_p * phase);
    if (m < 0) {
        // Y_{n,-m} = (-1)^m conj(Y_{n,m})
        const double sgn = (ma % 2 == 0) ? 1.0 : -1.0;
        Y = sgn * std::conj(Y);
        dY_dtheta = sgn * std::conj(dY_dtheta);
        imY_over_st = sgn * std::conj(imY_over_st);  // conj flips the i m factor sign
    }

    const Vec3 theta_hat{ct * cp, ct * sp, -st};
    const Vec3 phi_hat{-sp, cp, 0.0};

    AngularBasis out;
    out.rhat = rhat;
    out.Y = Y;
    // B = grad_S Y = dY/dtheta theta_hat + (i m / sin) Y phi_hat
    out.B = dY_dtheta * theta_hat + imY_over_st * phi_hat;
    // C = B x rhat = (i m / sin) Y theta_hat - dY/dtheta phi_hat
    out.C = imY_over_st * theta_hat + (-dY_dtheta) * phi_hat;
    return out;
}

namespace {

CVec3 canonical_plane_wave(double k, Vec3 x) {
    const complexd e = std::exp(complexd(0, k * x.z));
    return {e, 0, 0};
}

}  // namespace

PlaneWaveModeCoeffs plane_wave_coeffs(int n, double k) {
    // projection radius candidates near the first Bessel peak, chosen per
    // denominator so neither j_n nor Z_n is near a zero
    const double r_base = (n + 0.5) / k;
    const double candidates[3] = {r_base, r_base * 1.17, r_base * 1.41};

    double r_p = candidates[0], r_q = candidates[0];
    double best_j = 0.0, best_z = 0.0;
    for (double r : candidates) {
        const BesselEval j = sph_bessel_j(n, complexd(k * r, 0));
        const double aj = std::abs(j.value);
        const double az = std::abs(riccati_z_factor(j));
        if (aj > best_j) {
            best_j = aj;
            r_p = r;
        }
        if (az > best_z) {
            best_z = az;
            r_q = r;
        }
    }

    const int n_theta = 2 * n + 48;
    const int n_phi = 16;
    const QuadratureRule& gl = gauss_legendre(std::min(n_theta, 512));

    auto project = [&](double r0, bool c_channel, int m) -> complexd {
        complexd acc{0, 0};
        for (int i = 0; i < gl.order; ++i) {
            const double ct = gl.nodes[i];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            complexd phi_acc{0, 0};
            for (int j = 0; j < n_phi; ++j) {
                const double phi = 2.0 * M_PI * j / n_phi;
                const Vec3 xhat{st * std::cos(phi), st * std::sin(phi), ct};
                const AngularBasis ab = vsh_basis(n, m, xhat);
                const CVec3 E = canonical_plane_wave(k, r0 * xhat);
                const CVec3& v = c_channel ? ab.C : ab.B;
                // E . conj(v)
                phi_acc += dot_conj(E, v);
            }
            acc += gl.weights[i] * phi_acc * (2.0 * M_PI / n_phi);
        }
        return acc;
    };

    const double nn1 = double(n) * (n + 1);
    const BesselEval jp = sph_bessel_j(n, complexd(k * r_p, 0));
    const BesselEval jq = sph_bessel_j(n, complexd(k * r_q, 0));
    const complexd denom_p = jp.value * nn1;
    const complexd denom_q = riccati_z_factor(jq) * nn1;

    PlaneWaveModeCoeffs out;
    out.p_plus = project(r_p, true, +1) / denom_p;
    out.p_minus = project(r_p, true, -1) / denom_p;
    out.q_plus = project(r_q, false, +1) / denom_q;
    out.q_minus = project(r_q, false, -1) / denom_q;
    return out;
}

}  // namespace metastab
