#include "metastab/estimates.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "metastab/specfun.hpp"

namespace metastab {

Vec3 anti_curl(const std::function<Vec3(Vec3)>& f, Vec3 x, int quad_order) {
    const QuadratureRule& q = gauss_legendre(quad_order);
    Vec3 acc{0, 0, 0};
    for (int i = 0; i < q.order; ++i) {
        const double t = 0.5 * (1.0 + q.nodes[i]);
        acc = acc + (q.weights[i] * t) * cross(x, f(t * x));
    }
    return -0.5 * acc;  // the 0.5 is the [0,1] interval jacobian
}

double anti_curl_order_doubling_error(const std::function<Vec3(Vec3)>& f, Vec3 x,
                                      int quad_order) {
    const Vec3 a = anti_curl(f, x, quad_order);
    const Vec3 b = anti_curl(f, x, std::min(2 * quad_order, 512));
    return norm(a - b) / (norm(b) + 1e-300);
}

double weighted_ratio(const std::function<Vec3(Vec3)>& f, double alpha, int n_r, int n_theta,
                      int n_phi, int quad_order, bool allow_any_alpha) {
    if (!allow_any_alpha && !(alpha >= 0.0 && alpha < 2.0))
        throw std::invalid_argument("weighted_ratio: alpha must lie in [0, 2)");
    const QuadratureRule& qr = gauss_legendre(n_r);
    const QuadratureRule& qt = gauss_legendre(n_theta);

    double num = 0, den = 0;
    for (int ir = 0; ir < n_r; ++ir) {
        const double r = 0.5 * (1.0 + qr.nodes[ir]);
        const double wr = 0.5 * qr.weights[ir] * r * r;
        const double wgt_alpha = std::pow(1.0 - r, alpha);
        for (int it = 0; it < n_theta; ++it) {
            const double ct = qt.nodes[it];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            for (int ip = 0; ip < n_phi; ++ip) {
                const double phi = 2.0 * M_PI * ip / n_phi;
                const Vec3 x{r * st * std::cos(phi), r * st * std::sin(phi), r * ct};
                const double w = wr * qt.weights[it] * (2.0 * M_PI / n_phi);
                const Vec3 F = anti_curl(f, x, quad_order);
                const Vec3 fv = f(x);
                num += w * dot(F, F);
                den += w * wgt_alpha * dot(fv, fv);
            }
        }
    }
    if (den <= 1e-290) throw std::domain_error("weighted_ratio: vanishing denominator");
    return num / den;
}

namespace {

constexpr double kPi = M_PI;

double max_abs(const Vec3& v) {
    return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

void check_support_clearance(const TestField& u, int n) {
    double peak = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = -kPi + 2 * kPi * i / n;
            const double b = kPi * (j + 0.5) / n;
            peak = std::max(peak, max_abs(u.value({a, -kPi + 2 * kPi * j / n, kPi * 0.5})));
            peak = std::max(peak, max_abs(u.value({a, 0.0, b})));
        }
    double boundary = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = -kPi + 2 * kPi * i / n;
            const double b = kPi * j / n;
            boundary = std::max(boundary, max_abs(u.value({kPi, a, b})));     // lateral x1
            boundary = std::max(boundary, max_abs(u.value({a, kPi, b})));     // lateral x2
            boundary = std::max(boundary, max_abs(u.value({a, -kPi + 2 * kPi * j / n, kPi})));
        }
    if (boundary > 1e-9 * (peak + 1e-300))
        throw std::invalid_argument("trace_estimate_check: support touches the box boundary");
}

}  // namespace

TraceCheck trace_estimate_check(const TestField& u, int N) {
    if (N < 8 || (N & (N - 1)) != 0)
        throw std::invalid_argument("trace_estimate_check: grid must be a power of two >= 8");
    check_support_clearance(u, 32);

    const double hx = 2 * kPi / N, hz = kPi / N;

    // volume factors by midpoint grid (periodic laterally, supported away
    // from the top)
    double u2 = 0, d2 = 0;
    const double hfd = 1e-5;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                const Vec3 x{-kPi + hx * i, -kPi + hx * j, hz * (k + 0.5)};
                const Vec3 v = u.value(x);
                u2 += dot(v, v);
                double dv;
                if (u.divergence) {
                    dv = u.divergence(x);
                } else {
                    dv = 0;
                    for (int c = 0; c < 3; ++c) {
                        Vec3 xp = x, xm = x;
                        xp[c] += hfd;
                        xm[c] -= hfd;
                        dv += (u.value(xp)[c] - u.value(xm)[c]) / (2 * hfd);
                    }
                }
                d2 += dv * dv;
            }
    const double cell = hx * hx * hz;
    TraceCheck out;
    out.u_l2 = std::sqrt(u2 * cell);
    out.div_l2 = std::sqrt(d2 * cell);

    // 2-D DFT of the bottom-face trace of u_3 by separable matrix transform
    std::vector<double> tr(N * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            tr[i * N + j] = u.value({-kPi + hx * i, -kPi + hx * j, 0.0}).z;

    std::vector<complexd> twiddle(N * N);  // twiddle[k*N+i] = e^{-i k x_i} hx
    for (int k = 0; k < N; ++k) {
        const int kk = (k < N / 2) ? k : k - N;
        for (int i = 0; i < N; ++i) {
            const double x = -kPi + hx * i;
            twiddle[k * N + i] = std::polar(hx, -kk * x);
        }
    }
    // partial[k1*N+j] = sum_i twiddle[k1,i] tr[i,j]
    std::vector<complexd> partial(N * N, complexd(0, 0));
    for (int k1 = 0; k1 < N; ++k1)
        for (int i = 0; i < N; ++i) {
            const complexd w = twiddle[k1 * N + i];
            for (int j = 0; j < N; ++j) partial[k1 * N + j] += w * tr[i * N + j];
        }
    double lhs = 0;
    for (int k1 = 0; k1 < N; ++k1) {
        const int kk1 = (k1 < N / 2) ? k1 : k1 - N;
        for (int k2 = 0; k2 < N; ++k2) {
            const int kk2 = (k2 < N / 2) ? k2 : k2 - N;
            complexd uhat{0, 0};
            for (int j = 0; j < N; ++j) uhat += twiddle[k2 * N + j] * partial[k1 * N + j];
            lhs += std::norm(uhat) / std::sqrt(1.0 + kk1 * kk1 + kk2 * kk2);
        }
    }
    out.lhs = lhs / (4 * kPi * kPi);  // Parseval-consistent continuum scale
    out.ratio = out.lhs / (out.u_l2 * (out.u_l2 + out.div_l2) + 1e-300);
    return out;
}

std::vector<TestField> anti_curl_polynomial_corpus() {
    std::vector<TestField> fs;
    fs.push_back({"const_ez", [](Vec3) { return Vec3{0, 0, 1}; }, nullptr,
                  [](Vec3) { return 0.0; }});
    fs.push_back({"linear_x1_ez", [](Vec3 x) { return Vec3{0, 0, x.x}; }, nullptr,
                  [](Vec3) { return 0.0; }});
    fs.push_back({"rotation", [](Vec3 x) { return Vec3{-x.y, x.x, 0}; }, nullptr,
                  [](Vec3) { return 0.0; }});
    fs.push_back({"quadratic_shear",
                  [](Vec3 x) {
                      return Vec3{x.x * x.z, x.y * x.z, -x.z * x.z};
                  },
                  nullptr, [](Vec3) { return 0.0; }});
    fs.push_back({"cubic_cycle",
                  [](Vec3 x) {
                      return Vec3{x.y * x.y * x.y, x.z * x.z * x.z, x.x * x.x * x.x};
                  },
                  nullptr, [](Vec3) { return 0.0; }});
    fs.push_back({"curl_of_quartic",
                  [](Vec3 x) {
                      // curl (0, 0, x1^2 x2^2)
                      return Vec3{2 * x.x * x.x * x.y, -2 * x.x * x.y * x.y, 0};
                  },
                  nullptr, [](Vec3) { return 0.0; }});
    return fs;
}

TestField boundary_concentrated_field(int k) {
    const double rk = 1.0 - 1.0 / k;
    const double kk = double(k) * k;
    auto shell = [rk, kk](double r) { return std::exp(-kk * (r - rk) * (r - rk)); };
    TestField f;
    f.name = "boundary_k" + std::to_string(k);
    // azimuthal field g(r) (-y, x, 0): divergence-free for any radial profile
    f.value = [shell](Vec3 x) {
        const double r = norm(x);
        return shell(r) * Vec3{-x.y, x.x, 0};
    };
    f.divergence = [](Vec3) { return 0.0; };
    return f;
}

TestField anchored_boundary_family(int k) {
    const TestField shell = boundary_concentrated_field(k);
    TestField f;
    f.name = "anchored_k" + std::to_string(k);
    f.value = [shell](Vec3 x) { return 2.0 * Vec3{-x.y, x.x, 0} + shell.value(x); };
    f.divergence = [](Vec3) { return 0.0; };
    return f;
}

namespace {

TestField slab_bump(std::string name, Vec3 center, double sigma, Vec3 dir) {
    TestField f;
    f.name = std::move(name);
    auto phi = [center, sigma](Vec3 x) {
        const Vec3 d = x - center;
        return std::exp(-dot(d, d) / (sigma * sigma));
    };
    f.value = [phi, dir](Vec3 x) { return phi(x) * dir; };
    f.divergence = [phi, dir, center, sigma](Vec3 x) {
        const Vec3 d = x - center;
        return phi(x) * (-2.0 / (sigma * sigma)) * dot(d, dir);
    };
    return f;
}

}  // namespace

TestField oscillatory_slab_field(int k) {
    const Vec3 center{0, 0, 0.6};
    const double sigma = 0.45;
    TestField f;
    f.name = "oscillatory_k" + std::to_string(k);
    f.value = [center, sigma, k](Vec3 x) {
        const Vec3 d = x - center;
        const double phi = std::exp(-dot(d, d) / (sigma * sigma));
        return Vec3{0, 0, phi * std::cos(k * x.x)};
    };
    f.divergence = [center, sigma, k](Vec3 x) {
        const Vec3 d = x - center;
        const double phi = std::exp(-dot(d, d) / (sigma * sigma));
        return std::cos(k * x.x) * phi * (-2.0 * d.z / (sigma * sigma));
    };
    return f;
}

std::vector<TestField> trace_corpus() {
    std::vector<TestField> fs;
    int id = 0;
    // widths shrink with height so every tail clears the top face
    const std::pair<double, std::pair<double, double>> layers[] = {
        {0.5, {0.35, 0.45}}, {0.9, {0.35, 0.42}}, {1.3, {0.28, 0.33}}};
    for (const auto& [cz, sigmas] : layers) {
        fs.push_back(slab_bump("bump_z" + std::to_string(id++), {0, 0, cz}, sigmas.first,
                               {0, 0, 1}));
        fs.push_back(slab_bump("bump_z" + std::to_string(id++), {0, 0, cz}, sigmas.second,
                               {0, 0, 1}));
    }
    for (double off : {-0.5, 0.5}) {
        fs.push_back(slab_bump("bump_off" + std::to_string(id++), {off, 0, 0.7}, 0.4, {0, 0, 1}));
        fs.push_back(slab_bump("bump_off" + std::to_string(id++), {0, off, 0.7}, 0.4, {0, 0, 1}));
    }
    fs.push_back(slab_bump("bump_mixed0", {0, 0, 0.8}, 0.45, normalized({1, 0, 1})));
    fs.push_back(slab_bump("bump_mixed1", {0.3, -0.3, 0.9}, 0.4, normalized({0, 1, 1})));
    fs.push_back(slab_bump("bump_mixed2", {-0.4, 0.2, 1.0}, 0.4, normalized({1, 1, 1})));
    fs.push_back(slab_bump("bump_tangential", {0, 0, 0.7}, 0.45, {1, 0, 0}));
    for (int k : {1, 2, 4, 6, 8, 12}) fs.push_back(oscillatory_slab_field(k));
    return fs;
}

}  // namespace metastab
