#include "metastab/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "metastab/parallel.hpp"

namespace metastab {

namespace {

constexpr double kGolden = 0.6180339887498949;  // 1/phi

Vec3 fib_direction(int i, int n) {
    const double z = 1.0 - 2.0 * (i + 0.5) / double(n);
    const double phi = 2.0 * M_PI * std::fmod(i * kGolden, 1.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

}  // namespace

Surface Surface::sphere(Vec3 center, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("Surface::sphere: radius must be positive");
    Surface s;
    s.kind_ = Kind::Sphere;
    s.center_ = center;
    s.radius_ = radius;
    return s;
}

Surface Surface::ellipsoid(Vec3 center, Vec3 semi_axes) {
    if (semi_axes.x <= 0 || semi_axes.y <= 0 || semi_axes.z <= 0)
        throw std::invalid_argument("Surface::ellipsoid: semi-axes must be positive");
    Surface s;
    s.kind_ = Kind::Ellipsoid;
    s.center_ = center;
    s.axes_ = semi_axes;
    return s;
}

Surface Surface::implicit(std::function<double(Vec3)> level, Vec3 box_lo, Vec3 box_hi) {
    Surface s;
    s.kind_ = Kind::Implicit;
    s.level_ = std::move(level);
    s.box_lo_ = box_lo;
    s.box_hi_ = box_hi;
    s.center_ = 0.5 * (box_lo + box_hi);
    return s;
}

double Surface::level_at(Vec3 x) const {
    switch (kind_) {
        case Kind::Sphere: {
            Vec3 d = x - center_;
            return dot(d, d) / (radius_ * radius_) - 1.0;
        }
        case Kind::Ellipsoid: {
            Vec3 d = x - center_;
            return d.x * d.x / (axes_.x * axes_.x) + d.y * d.y / (axes_.y * axes_.y) +
                   d.z * d.z / (axes_.z * axes_.z) - 1.0;
        }
        case Kind::Implicit:
            return level_(x);
    }
    return 0.0;
}

Vec3 Surface::level_grad(Vec3 x) const {
    if (kind_ == Kind::Sphere) return 2.0 / (radius_ * radius_) * (x - center_);
    if (kind_ == Kind::Ellipsoid) {
        Vec3 d = x - center_;
        return {2 * d.x / (axes_.x * axes_.x), 2 * d.y / (axes_.y * axes_.y),
                2 * d.z / (axes_.z * axes_.z)};
    }
    const double h = 1e-6 * (1.0 + norm(x - center_));
    Vec3 g;
    for (int k = 0; k < 3; ++k) {
        Vec3 hp = x, hm = x;
        hp[k] += h;
        hm[k] -= h;
        g[k] = (level_(hp) - level_(hm)) / (2 * h);
    }
    return g;
}

Vec3 Surface::closest_point(Vec3 x) const {
    switch (kind_) {
        case Kind::Sphere: {
            Vec3 d = x - center_;
            const double r = norm(d);
            if (r < 1e-14) return center_ + Vec3{radius_, 0, 0};  // center: any point
            return center_ + (radius_ / r) * d;
        }
        case Kind::Ellipsoid: {
            // stationarity: y_i (1 + t/a_i^2) = p_i. For p_i != 0 this pins
            // y_i through the root of sum (p_i a_i/(a_i^2+t))^2 = 1; for
            // p_i = 0 either y_i = 0 (reduced root problem) or t = -a_i^2
            // (the off-axis ring inside the evolute). Both candidate families
            // are enumerated and the nearest point wins; ring ties break to
            // the lowest axis index.
            const Vec3 p = x - center_;
            const double pv[3] = {p.x, p.y, p.z};
            const double av[3] = {axes_.x, axes_.y, axes_.z};
            const double a2[3] = {av[0] * av[0], av[1] * av[1], av[2] * av[2]};
            const double scale = std::max({av[0], av[1], av[2]});
            bool zero[3];
            for (int i = 0; i < 3; ++i) zero[i] = std::abs(pv[i]) < 1e-14 * scale;

            Vec3 best{av[0], 0, 0};
            double best_d = 1e300;
            auto consider = [&](Vec3 y) {
                const double d = norm(y - p);
                if (d < best_d) {
                    best_d = d;
                    best = y;
                }
            };

            // candidate A: y_i = 0 on the zero axes, root problem on the rest
            double tmin = -1e300;
            bool any_nonzero = false;
            for (int i = 0; i < 3; ++i)
                if (!zero[i]) {
                    tmin = std::max(tmin, -a2[i]);
                    any_nonzero = true;
                }
            if (any_nonzero) {
                auto phi = [&](double t) {
                    double s = 0;
                    for (int i = 0; i < 3; ++i) {
                        if (zero[i]) continue;
                        const double q = pv[i] * av[i] / (a2[i] + t);
                        s += q * q;
                    }
                    return s - 1.0;
                };
                double lo = tmin + 1e-14 * (1.0 + std::abs(tmin));
                double hi = std::max({a2[0], a2[1], a2[2]}) + norm(p) * scale + 1.0;
                while (phi(hi) > 0.0) hi *= 2.0;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (phi(mid) > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                const double t = 0.5 * (lo + hi);
                Vec3 y{};
                for (int i = 0; i < 3; ++i)
                    y[i] = zero[i] ? 0.0 : pv[i] * a2[i] / (a2[i] + t);
                consider(y);
            }

            // candidates B_i: t = -a_i^2 for a zero axis i
            for (int i = 0; i < 3; ++i) {
                if (!zero[i]) continue;
                Vec3 y{};
                double rest = 0;
                bool valid = true;
                for (int j = 0; j < 3; ++j) {
                    if (j == i || zero[j]) continue;
                    const double den = a2[j] - a2[i];
                    if (std::abs(den) < 1e-14 * a2[j]) {
                        valid = false;
                        break;
                    }
                    y[j] = pv[j] * a2[j] / den;
                    rest += (y[j] / av[j]) * (y[j] / av[j]);
                }
                if (!valid || rest > 1.0) continue;
                y[i] = av[i] * std::sqrt(1.0 - rest);
                consider(y);
            }
            return center_ + best;
        }
        case Kind::Implicit: {
            auto project_once = [&](Vec3 y) {
                const double f = level_at(y);
                Vec3 g = level_grad(y);
                const double g2 = dot(g, g);
                if (g2 < 1e-30) throw std::runtime_error("Surface: vanishing level gradient");
                return y - (f / g2) * g;
            };
            const double tol = 1e-10 * (1.0 + norm(x - center_));
            Vec3 y = x;
            bool converged = false;
            for (int attempt = 0; attempt < 2 && !converged; ++attempt) {
                if (attempt == 1) {
                    // sampled initialization: coarse scan of the box for the
                    // nearest near-surface cell
                    const int N = 14;
                    double best = 1e300;
                    Vec3 init = x;
                    for (int i = 0; i <= N; ++i)
                        for (int j = 0; j <= N; ++j)
                            for (int k = 0; k <= N; ++k) {
                                Vec3 q{box_lo_.x + (box_hi_.x - box_lo_.x) * i / N,
                                       box_lo_.y + (box_hi_.y - box_lo_.y) * j / N,
                                       box_lo_.z + (box_hi_.z - box_lo_.z) * k / N};
                                Vec3 g = level_grad(q);
                                const double d =
                                    std::abs(level_at(q)) / std::max(norm(g), 1e-12);
                                const double score = d + norm(q - x);
                                if (score < best) {
                                    best = score;
                                    init = q;
                                }
                            }
                    y = init;
                }
                // damped Newton on the Lagrangian stationarity: alternate a
                // level-projection step with a tangential slide toward x
                for (int it = 0; it < 50; ++it) {
                    for (int k = 0; k < 4; ++k) y = project_once(y);
                    Vec3 n = normalized(level_grad(y));
                    Vec3 tangential = (y - x) - dot(y - x, n) * n;
                    if (norm(tangential) <= tol && std::abs(level_at(y)) <= tol) {
                        converged = true;
                        break;
                    }
                    y = y - 0.8 * tangential;
                }
            }
            if (!converged)
                throw std::runtime_error("Surface: closest-point projection failed to converge");
            return y;
        }
    }
    return x;
}

SignedDistance Surface::signed_distance(Vec3 x) const {
    if (kind_ == Kind::Sphere) {
        const double d = radius_ - norm(x - center_);
        return {d, d > 0 ? Side::Interior : (d < 0 ? Side::Exterior : Side::Boundary)};
    }
    const Vec3 cp = closest_point(x);
    const double dist = norm(x - cp);
    const double f = level_at(x);
    const Side side = f < 0 ? Side::Interior : (f > 0 ? Side::Exterior : Side::Boundary);
    return {side == Side::Exterior ? -dist : dist, side};
}

Vec3 Surface::outward_normal(Vec3 x) const {
    if (kind_ == Kind::Sphere) return normalized(x - center_);
    return normalized(level_grad(closest_point(x)));
}

double Surface::curvature_trace(Vec3 x) const {
    if (kind_ == Kind::Sphere) return 2.0 / radius_;
    // shape operator of a level set: S = (I - n n^T) Hess(f) (I - n n^T)/|grad f|
    // trace Pi = (trace H - n^T H n)/|grad f|
    Vec3 g = level_grad(x);
    const double gn = norm(g);
    Vec3 n = g / gn;
    SymMatrix3 H;
    if (kind_ == Kind::Ellipsoid) {
        H = SymMatrix3::diag(2.0 / (axes_.x * axes_.x), 2.0 / (axes_.y * axes_.y),
                             2.0 / (axes_.z * axes_.z));
    } else {
        const double h = 1e-5 * (1.0 + norm(x - center_));
        std::array<double, 9> rows{};
        for (int j = 0; j < 3; ++j) {
            Vec3 hp = x, hm = x;
            hp[j] += h;
            hm[j] -= h;
            Vec3 gp = level_grad(hp), gm = level_grad(hm);
            for (int i = 0; i < 3; ++i) rows[3 * i + j] = (gp[i] - gm[i]) / (2 * h);
        }
        // symmetrize
        H = SymMatrix3::from_rows({rows[0], 0.5 * (rows[1] + rows[3]), 0.5 * (rows[2] + rows[6]),
                                   0.5 * (rows[3] + rows[1]), rows[4], 0.5 * (rows[5] + rows[7]),
                                   0.5 * (rows[6] + rows[2]), 0.5 * (rows[7] + rows[5]), rows[8]});
    }
    return (H.trace() - H.quad(n)) / gn;
}

bool Surface::strictly_convex() const { return kind_ != Kind::Implicit; }

double Surface::reach() const {
    if (kind_ == Kind::Sphere) return radius_;
    double max_norm_pi = 0.0;
    for (Vec3 p : boundary_samples(256)) {
        // largest |principal curvature| from the projected Hessian
        Vec3 g = level_grad(p);
        const double gn = norm(g);
        Vec3 n = g / gn;
        const double h = 1e-5;
        // FD shape operator applied to two tangents
        TangentFrame fr = tangent_frame(n);
        double kmax = 0.0;
        for (Vec3 t : {fr.t1, fr.t2}) {
            Vec3 np = outward_normal(closest_point(p + h * t));
            Vec3 nm = outward_normal(closest_point(p - h * t));
            kmax = std::max(kmax, norm(np - nm) / (2 * h));
        }
        max_norm_pi = std::max(max_norm_pi, kmax);
    }
    return max_norm_pi > 0 ? 1.0 / max_norm_pi : 1e300;
}

std::vector<Vec3> Surface::boundary_samples(int count) const {
    std::vector<Vec3> out;
    out.reserve(count);
    double big = 1.0;
    if (kind_ == Kind::Sphere)
        big = radius_;
    else if (kind_ == Kind::Ellipsoid)
        big = std::max({axes_.x, axes_.y, axes_.z});
    else
        big = 0.5 * norm(box_hi_ - box_lo_);
    for (int i = 0; i < count; ++i)
        out.push_back(closest_point(center_ + 2.0 * big * fib_direction(i, count)));
    return out;
}

CollarRegion CollarRegion::make(const Surface& s, double tau, Side side) {
    if (tau <= 0.0 || tau >= s.reach())
        throw std::invalid_argument("CollarRegion: half-width must lie in (0, reach)");
    return {s, tau, side};
}

bool CollarRegion::contains(Vec3 x) const {
    const SignedDistance d = surface.signed_distance(x);
    if (std::abs(d.value) >= half_width) return false;
    return side == Side::Interior ? d.side == Side::Interior : d.side == Side::Exterior;
}

namespace {

Mat3 fd_jacobian(const std::function<Vec3(Vec3)>& f, Vec3 x, double h) {
    Mat3 J;
    for (int k = 0; k < 3; ++k) {
        Vec3 hp = x, hm = x;
        hp[k] += h;
        hm[k] -= h;
        Vec3 fp = f(hp), fm = f(hm);
        for (int i = 0; i < 3; ++i) J(i, k) = (fp[i] - fm[i]) / (2 * h);
    }
    return J;
}

}  // namespace

DiffeoMap normal_reflection(const Surface& s, double tau) {
    if (tau <= 0.0 || tau >= s.reach())
        throw std::invalid_argument("normal_reflection: tau must lie in (0, reach)");

    auto forward = [s, tau](Vec3 x) -> Vec3 {
        const Vec3 cp = s.closest_point(x);
        const Vec3 nu = s.outward_normal(cp);
        const double t = dot(x - cp, nu);
        if (std::abs(t) > tau * (1.0 + 1e-9))
            throw std::domain_error("normal_reflection: point outside collar");
        return cp - t * nu;
    };

    DiffeoMap F;
    F.forward = forward;
    F.inverse = forward;  // involution
    if (s.kind() == Surface::Kind::Sphere) {
        const Vec3 c = s.center();
        const double R = s.radius();
        F.jacobian = [c, R](Vec3 x) -> Mat3 {
            const Vec3 d = x - c;
            const double r = norm(d);
            const Vec3 u = d / r;
            const double a = (2.0 * R - r) / r;  // tangential stretch
            Mat3 J;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    J(i, j) = a * ((i == j) - u[i] * u[j]) - u[i] * u[j];
            return J;
        };
    } else {
        const double h = 1e-5 * s.reach();
        F.jacobian = [forward, h](Vec3 x) { return fd_jacobian(forward, x, h); };
    }
    return F;
}

DiffeoMap convex_reflection(const Surface& s, double beta, double tau) {
    if (!s.strictly_convex())
        throw std::invalid_argument("convex_reflection: surface must be strictly convex");
    if (!(beta > -1.0 && beta < 0.0))
        throw std::invalid_argument("convex_reflection: beta must lie in (-1, 0)");
    if (tau <= 0.0 || tau >= s.reach())
        throw std::invalid_argument("convex_reflection: tau must lie in (0, reach)");

    // curvature correction, with the trace taken for the normal pointing into
    // the target (exterior) side: positive for convex D and beta < 0
    auto c_of = [s, beta](Vec3 x_gamma) { return -beta * s.curvature_trace(x_gamma); };

    auto forward = [s, tau, c_of](Vec3 x) -> Vec3 {
        const Vec3 cp = s.closest_point(x);
        const Vec3 nu = s.outward_normal(cp);
        const double t = -dot(x - cp, nu);  // interior offset, t >= 0
        if (t < -1e-12 || t > tau * (1.0 + 1e-9))
            throw std::domain_error("convex_reflection: point outside interior collar");
        const double c = c_of(cp);
        return cp + t * (1.0 + t * c) * nu;
    };
    auto inverse = [s, tau, c_of](Vec3 xp) -> Vec3 {
        const Vec3 cp = s.closest_point(xp);
        const Vec3 nu = s.outward_normal(cp);
        const double sd = dot(xp - cp, nu);  // exterior offset, >= 0
        if (sd < -1e-12)
            throw std::domain_error("convex_reflection: inverse input must be exterior");
        const double c = c_of(cp);
        // t (1 + t c) = sd, stable positive root
        const double t = (c == 0.0) ? sd : 2.0 * sd / (1.0 + std::sqrt(1.0 + 4.0 * c * sd));
        if (t > tau * (1.0 + 1e-9))
            throw std::domain_error("convex_reflection: inverse image outside collar");
        return cp - t * nu;
    };

    DiffeoMap F;
    F.forward = forward;
    F.inverse = inverse;
    if (s.kind() == Surface::Kind::Sphere) {
        const Vec3 ctr = s.center();
        const double R = s.radius();
        const double c = -beta * 2.0 / R;
        F.jacobian = [ctr, R, c](Vec3 x) -> Mat3 {
            const Vec3 d = x - ctr;
            const double r = norm(d);
            const Vec3 u = d / r;
            const double t = R - r;
            const double g = R + t * (1.0 + t * c);
            const double gp = -(1.0 + 2.0 * t * c);  // dg/dr
            Mat3 J;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    J(i, j) = gp * u[i] * u[j] + (g / r) * ((i == j) - u[i] * u[j]);
            return J;
        };
    } else {
        const double h = 1e-5 * s.reach();
        F.jacobian = [forward, h](Vec3 x) { return fd_jacobian(forward, x, h); };
    }
    return F;
}

SymMatrix3 pushforward_matrix(const DiffeoMap& F, const std::function<SymMatrix3(Vec3)>& A,
                              Vec3 x_prime) {
    const Vec3 x = F.inverse(x_prime);
    const Mat3 J = F.jacobian(x);
    const double d = det(J);
    if (std::abs(d) < 1e-300) throw std::runtime_error("pushforward_matrix: singular Jacobian");
    return (1.0 / d) * congruence(J, A(x));
}

CVec3 pushforward_field(const DiffeoMap& F, const std::function<CVec3(Vec3)>& E, Vec3 x_prime) {
    const Vec3 x = F.inverse(x_prime);
    const Mat3 J = F.jacobian(x);
    if (std::abs(det(J)) < 1e-300) throw std::runtime_error("pushforward_field: singular Jacobian");
    return transpose(inverse(J)) * E(x);
}

CVec3 pushforward_source(const DiffeoMap& F, const std::function<CVec3(Vec3)>& J_field,
                         Vec3 x_prime) {
    const Vec3 x = F.inverse(x_prime);
    const double d = det(F.jacobian(x));
    if (std::abs(d) < 1e-300) throw std::runtime_error("pushforward_source: singular Jacobian");
    return (complexd(1.0 / d, 0.0)) * J_field(x);
}

OrderingCertificate reflected_material_ordering(const Surface& s, const DiffeoMap& F,
                                                const std::function<SymMatrix3(Vec3)>& A_minus,
                                                const std::function<SymMatrix3(Vec3)>& A_plus,
                                                double alpha, double tau, int n_samples,
                                                int n_depths) {
    if (!(alpha >= 0.0 && alpha < 2.0))
        throw std::invalid_argument("reflected_material_ordering: alpha must lie in [0, 2)");
    if (n_samples <= 0 || n_depths <= 0)
        throw std::invalid_argument("reflected_material_ordering: empty sample set");

    const std::vector<Vec3> bsamples = s.boundary_samples(n_samples);
    struct Local {
        double hat = 1e300, mir = 1e300;
        Vec3 hat_pt{}, mir_pt{};
    };
    std::vector<Local> locals(bsamples.size());
    parallel_for(int(bsamples.size()), [&](int i) {
        const Vec3 cp = bsamples[i];
        const Vec3 nu = s.outward_normal(cp);
        Local& loc = locals[i];
        for (int j = 1; j <= n_depths; ++j) {
            const double d = tau * double(j) / double(n_depths);
            const Vec3 xp = cp + d * nu;
            const SymMatrix3 hatA = pushforward_matrix(F, A_minus, xp);
            const SymMatrix3 Ap = A_plus(xp);
            const double w = std::pow(d, alpha);
            const double m_hat = min_eig_margin(hatA, Ap) / w;
            const double m_mir = min_eig_margin(Ap, hatA) / w;
            if (m_hat < loc.hat) {
                loc.hat = m_hat;
                loc.hat_pt = xp;
            }
            if (m_mir < loc.mir) {
                loc.mir = m_mir;
                loc.mir_pt = xp;
            }
        }
    });
    // deterministic reduction in sample order (ties keep the earlier sample)
    OrderingCertificate cert;
    cert.c_hat_minus_plus = 1e300;
    cert.c_plus_minus_hat = 1e300;
    for (const Local& loc : locals) {
        if (loc.hat < cert.c_hat_minus_plus) {
            cert.c_hat_minus_plus = loc.hat;
            cert.worst_point_hat = loc.hat_pt;
        }
        if (loc.mir < cert.c_plus_minus_hat) {
            cert.c_plus_minus_hat = loc.mir;
            cert.worst_point_mirror = loc.mir_pt;
        }
    }
    return cert;
}

}  // namespace metastab
