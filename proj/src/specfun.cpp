#include "metastab/specfun.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace metastab {

namespace {

// double factorial (2n+1)!! in log space to survive large n
double log_double_factorial_odd(int n) {
    // log((2n+1)!!) = lgamma(2n+2) - n log 2 - lgamma(n+1)
    return std::lgamma(2.0 * n + 2.0) - n * std::log(2.0) - std::lgamma(n + 1.0);
}

complexd sph_j_series(int n, complexd z) {
    // j_n(z) = z^n/(2n+1)!! sum_k (-z^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    complexd term{1.0, 0.0};
    complexd sum = term;
    const complexd z2 = -0.5 * z * z;
    for (int k = 1; k <= 20; ++k) {
        term *= z2 / (double(k) * double(2 * n + 2 * k + 1));
        sum += term;
    }
    const double lg = log_double_factorial_odd(n);
    // z^n / (2n+1)!!  computed in log space for the modulus
    if (n == 0) return sum;
    const complexd logz = std::log(z);
    return std::exp(double(n) * logz - lg) * sum;
}

}  // namespace

BesselEval sph_bessel_j(int n, complexd z) {
    if (n < 0) throw std::domain_error("sph_bessel_j: order must be nonnegative");
    if (n > 5000) throw std::domain_error("sph_bessel_j: order beyond supported range (5000)");
    BesselEval out;
    out.order = n;
    out.z = z;
    const double az = std::abs(z);
    if (az == 0.0) {
        out.value = (n == 0) ? 1.0 : 0.0;
        out.derivative = (n == 1) ? complexd(1.0 / 3.0, 0) : 0.0;
        return out;
    }
    if (az < 0.5) {
        out.value = sph_j_series(n, z);
        const complexd prev = (n == 0) ? std::cos(z) / z : sph_j_series(n - 1, z);
        out.derivative = prev - (double(n + 1) / z) * out.value;
        return out;
    }

    const complexd j0 = std::sin(z) / z;
    if (n == 0) {
        out.value = j0;
        out.derivative = std::cos(z) / z - j0 / z;
        return out;
    }

    // downward Miller recurrence: f_{k-1} = (2k+1)/z f_k - f_{k+1}.
    // The +25 on top of the usual margin buys full double accuracy through
    // the oscillatory transition (contamination decays superexponentially
    // past the turning point).
    const int n_start = n + std::max(20, int(std::ceil(1.5 * az))) + 25;
    complexd fkp1{0.0, 0.0};
    complexd fk{1e-280, 0.0};
    complexd fn{0, 0}, fnm1{0, 0};
    for (int k = n_start; k >= 1; --k) {
        complexd fkm1 = (double(2 * k + 1) / z) * fk - fkp1;
        fkp1 = fk;
        fk = fkm1;
        if (k - 1 == n) fn = fk;
        if (k - 1 == n - 1) fnm1 = fk;
        // rescale to avoid overflow of the unnormalized recurrence
        const double m = std::abs(fk);
        if (m > 1e250) {
            fk /= m;
            fkp1 /= m;
            fn /= m;
            fnm1 /= m;
        }
    }
    const complexd scale = j0 / fk;  // fk now holds the unnormalized j_0
    out.value = fn * scale;
    out.derivative = fnm1 * scale - (double(n + 1) / z) * out.value;
    return out;
}

namespace {

// Upward recurrence for the dominant Hankel branch: h2 = j - i y grows like
// e^{+Im z} for Im z >= 0 (h1 for Im z < 0), so its relative accuracy
// survives the n ~ |z| transition where plain y recursion loses digits to
// cancellation dips. Returns (h_{n-1}, h_n).
std::pair<complexd, complexd> dominant_hankel(int n, complexd z, bool conjugate_branch) {
    // seeds: h1_{-1} = e^{iz}/z, h1_0 = -i e^{iz}/z; h2 mirrors with e^{-iz}
    const complexd ez = std::exp(complexd(0, conjugate_branch ? -1.0 : 1.0) * z);
    complexd hm1 = ez / z;
    complexd h0 = (conjugate_branch ? complexd(0, 1) : complexd(0, -1)) * ez / z;
    if (n == 0) return {hm1, h0};
    complexd hk = h0, hkm1 = hm1;
    for (int k = 0; k < n; ++k) {
        const complexd hkp1 = (double(2 * k + 1) / z) * hk - hkm1;
        hkm1 = hk;
        hk = hkp1;
    }
    return {hkm1, hk};
}

}  // namespace

BesselEval sph_bessel_y(int n, complexd z) {
    if (n < 0) throw std::domain_error("sph_bessel_y: order must be nonnegative");
    if (n > 5000) throw std::domain_error("sph_bessel_y: order beyond supported range (5000)");
    if (std::abs(z) == 0.0) throw std::domain_error("sph_bessel_y: z = 0");
    BesselEval out;
    out.order = n;
    out.z = z;
    const bool conj_branch = z.imag() >= 0.0;  // h2 dominant in the upper half plane
    const auto [hm1, hn] = dominant_hankel(n, z, conj_branch);
    const BesselEval jn = sph_bessel_j(n, z);
    const BesselEval jm1 = (n == 0)
                               ? BesselEval{-1, z, std::cos(z) / z, complexd(0, 0)}
                               : sph_bessel_j(n - 1, z);
    // h2 = j - i y  =>  y = -i (j - h2);   h1 = j + i y  =>  y = -i (h1 - j)
    const complexd yn = conj_branch ? complexd(0, -1) * (jn.value - hn)
                                    : complexd(0, -1) * (hn - jn.value);
    const complexd ynm1 = conj_branch ? complexd(0, -1) * (jm1.value - hm1)
                                      : complexd(0, -1) * (hm1 - jm1.value);
    out.value = yn;
    out.derivative = ynm1 - (double(n + 1) / z) * yn;
    return out;
}

BesselEval sph_hankel1(int n, complexd z) {
    const BesselEval j = sph_bessel_j(n, z);
    const BesselEval y = sph_bessel_y(n, z);
    BesselEval out;
    out.order = n;
    out.z = z;
    out.value = j.value + complexd(0, 1) * y.value;
    out.derivative = j.derivative + complexd(0, 1) * y.derivative;
    return out;
}

complexd riccati_z_factor(const BesselEval& f) { return f.derivative + f.value / f.z; }

namespace {

QuadratureRule build_gauss_legendre(int order) {
    QuadratureRule q;
    q.order = order;
    q.nodes.resize(order);
    q.weights.resize(order);
    auto legendre = [order](double x) -> std::pair<double, double> {
        // P_order(x) and P'_order(x) via the three-term recurrence
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double pn = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pn;
        }
        const double dp = (order == 1) ? 1.0 : order * (x * p1 - p0) / (x * x - 1.0);
        return {p1, dp};
    };
    for (int i = 0; i < order; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const auto [p, dp] = legendre(x);
        q.nodes[i] = x;
        q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

}  // namespace

const QuadratureRule& gauss_legendre(int order) {
    if (order < 1 || order > 512)
        throw std::domain_error("gauss_legendre: order must lie in [1, 512]");
    static std::map<int, QuadratureRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_gauss_legendre(order)).first;
    return it->second;
}

}  // namespace metastab
