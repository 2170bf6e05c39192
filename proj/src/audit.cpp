#include "metastab/audit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "metastab/parallel.hpp"

namespace metastab {

MaterialField MaterialField::constant(SymMatrix3 value) {
    MaterialField f;
    f.kind_ = Kind::Constant;
    f.const_ = value;
    return f;
}

MaterialField MaterialField::piecewise_plane(Vec3 n, double off, SymMatrix3 inside,
                                             SymMatrix3 outside) {
    MaterialField f;
    f.kind_ = Kind::PiecewisePlane;
    f.normal_ = normalized(n);
    f.offset_ = off;
    f.inside_ = inside;
    f.outside_ = outside;
    return f;
}

MaterialField MaterialField::sampled_grid(Vec3 lo, Vec3 hi, int nx, int ny, int nz,
                                          std::function<SymMatrix3(Vec3)> sampler) {
    if (nx < 2 || ny < 2 || nz < 2)
        throw std::invalid_argument("MaterialField: grid needs at least 2 nodes per axis");
    MaterialField f;
    f.kind_ = Kind::Grid;
    f.lo_ = lo;
    f.hi_ = hi;
    f.nx_ = nx;
    f.ny_ = ny;
    f.nz_ = nz;
    f.grid_.resize(size_t(nx) * ny * nz);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                const Vec3 x{lo.x + (hi.x - lo.x) * i / (nx - 1),
                             lo.y + (hi.y - lo.y) * j / (ny - 1),
                             lo.z + (hi.z - lo.z) * k / (nz - 1)};
                f.grid_[(size_t(i) * ny + j) * nz + k] = sampler(x);
            }
    return f;
}

SymMatrix3 MaterialField::operator()(Vec3 x) const {
    switch (kind_) {
        case Kind::Constant:
            return const_;
        case Kind::PiecewisePlane:
            return dot(x, normal_) < offset_ ? inside_ : outside_;
        case Kind::Grid: {
            auto clampf = [](double v, double lo, double hi) {
                return std::min(std::max(v, lo), hi);
            };
            const double fx = clampf((x.x - lo_.x) / (hi_.x - lo_.x), 0.0, 1.0) * (nx_ - 1);
            const double fy = clampf((x.y - lo_.y) / (hi_.y - lo_.y), 0.0, 1.0) * (ny_ - 1);
            const double fz = clampf((x.z - lo_.z) / (hi_.z - lo_.z), 0.0, 1.0) * (nz_ - 1);
            const int i0 = std::min(int(fx), nx_ - 2), j0 = std::min(int(fy), ny_ - 2),
                      k0 = std::min(int(fz), nz_ - 2);
            const double a = fx - i0, b = fy - j0, c = fz - k0;
            SymMatrix3 out{};
            for (int di = 0; di < 2; ++di)
                for (int dj = 0; dj < 2; ++dj)
                    for (int dk = 0; dk < 2; ++dk) {
                        const double w = (di ? a : 1 - a) * (dj ? b : 1 - b) * (dk ? c : 1 - c);
                        const SymMatrix3& g =
                            grid_[(size_t(i0 + di) * ny_ + (j0 + dj)) * nz_ + (k0 + dk)];
                        for (int t = 0; t < 6; ++t) out.u[t] += w * g.u[t];
                    }
            return out;
        }
    }
    return const_;
}

int MaterialField::region_label(Vec3 x) const {
    if (kind_ == Kind::PiecewisePlane) return dot(x, normal_) < offset_ ? 0 : 1;
    return 0;
}

void MaterialSpec::validate_on(const std::vector<Vec3>& ext, const std::vector<Vec3>& in) const {
    if (delta < 0) throw std::invalid_argument("MaterialSpec: delta must be >= 0");
    auto need_pd = [&](const SymMatrix3& m, const char* what) {
        if (eig_sym3(m).lam[2] < ellipticity_floor)
            throw std::invalid_argument(std::string("MaterialSpec: ") + what +
                                        " not uniformly elliptic at a sample");
    };
    for (const Vec3& x : ext) {
        need_pd(eps_plus(x), "eps_plus");
        need_pd(mu_plus(x), "mu_plus");
    }
    for (const Vec3& x : in) {
        need_pd(-eps_minus(x), "-eps_minus");
        need_pd(-mu_minus(x), "-mu_minus");
    }
}

namespace {

// boundary samples with a tiny two-sided probe offset for field evaluation
struct ProbedSample {
    Vec3 on_surface, inside, outside, normal;
};

std::vector<ProbedSample> probe_samples(const Surface& s, int n) {
    const double h = 1e-7 * s.reach();
    std::vector<ProbedSample> out;
    out.reserve(n);
    for (Vec3 p : s.boundary_samples(n)) {
        const Vec3 nu = s.outward_normal(p);
        out.push_back({p, p - h * nu, p + h * nu, nu});
    }
    return out;
}

}  // namespace

AuditReport audit_thm1(const MaterialSpec& m, const Surface& s, int n_samples) {
    AuditReport rep;
    rep.theorem = "thm1";
    rep.n_samples = n_samples;
    rep.user_asserts_c1 = true;  // recorded, not verified

    auto samples = probe_samples(s, n_samples);
    std::vector<Vec3> ext, in;
    for (auto& ps : samples) {
        ext.push_back(ps.outside);
        in.push_back(ps.inside);
    }
    m.validate_on(ext, in);

    rep.min_margin_eps = 1e300;
    rep.min_margin_mu = 1e300;
    bool any_fail = false;
    // per-sample checks are independent; verdicts land by index and the
    // min/argmin reduction below runs serially in sample order
    std::vector<std::pair<CauchyVerdict, CauchyVerdict>> verdicts(samples.size());
    parallel_for(int(samples.size()), [&](int i) {
        const auto& ps = samples[i];
        verdicts[i].first = check_complementing(
            CauchyPair::make(m.eps_plus(ps.outside), -m.eps_minus(ps.inside), ps.normal));
        verdicts[i].second = check_complementing(
            CauchyPair::make(m.mu_plus(ps.outside), -m.mu_minus(ps.inside), ps.normal));
    });
    rep.sample_records.reserve(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        const auto& ps = samples[i];
        const CauchyVerdict& ve = verdicts[i].first;
        const CauchyVerdict& vm = verdicts[i].second;
        rep.sample_records.push_back({ps.on_surface, ve.margin, vm.margin});
        if (ve.margin < rep.min_margin_eps) {
            rep.min_margin_eps = ve.margin;
            rep.worst_eps = {ps.on_surface, ve.margin, vm.margin};
            if (!ve.satisfied()) rep.witness_direction = ve.witness;
        }
        if (vm.margin < rep.min_margin_mu) {
            rep.min_margin_mu = vm.margin;
            rep.worst_mu = {ps.on_surface, ve.margin, vm.margin};
            if (!vm.satisfied() && !rep.witness_direction) rep.witness_direction = vm.witness;
        }
        any_fail = any_fail || !ve.satisfied() || !vm.satisfied();
    }
    rep.verdict = any_fail ? Verdict::Fails : Verdict::Applies;
    if (!any_fail) rep.witness_direction.reset();
    return rep;
}

AuditReport audit_corADN(const MaterialSpec& m, const Surface& s, int n_samples) {
    AuditReport rep;
    rep.theorem = "corADN";
    rep.n_samples = n_samples;
    rep.user_asserts_c1 = true;

    auto samples = probe_samples(s, n_samples);
    std::vector<Vec3> ext, in;
    for (auto& ps : samples) {
        ext.push_back(ps.outside);
        in.push_back(ps.inside);
    }
    m.validate_on(ext, in);

    // per connected "component": single component for sphere/ellipsoid; for
    // piecewise materials the plane label splits the sample set
    auto label_of = [&](const ProbedSample& ps) {
        return m.eps_minus.region_label(ps.inside) * 2 + m.mu_minus.region_label(ps.inside);
    };
    std::vector<int> labels;
    for (auto& ps : samples) {
        const int l = label_of(ps);
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    }

    double worst_c_eps = 1e300, worst_c_mu = 1e300;
    for (int l : labels) {
        double fwd_e = 1e300, rev_e = 1e300, fwd_m = 1e300, rev_m = 1e300;
        for (auto& ps : samples) {
            if (label_of(ps) != l) continue;
            const SymMatrix3 ep = m.eps_plus(ps.outside), em = -m.eps_minus(ps.inside);
            const SymMatrix3 mp = m.mu_plus(ps.outside), mm = -m.mu_minus(ps.inside);
            fwd_e = std::min(fwd_e, min_eig_margin(ep, em));
            rev_e = std::min(rev_e, min_eig_margin(em, ep));
            fwd_m = std::min(fwd_m, min_eig_margin(mp, mm));
            rev_m = std::min(rev_m, min_eig_margin(mm, mp));
        }
        worst_c_eps = std::min(worst_c_eps, std::max(fwd_e, rev_e));
        worst_c_mu = std::min(worst_c_mu, std::max(fwd_m, rev_m));
    }
    rep.c_eps = worst_c_eps;
    rep.c_mu = worst_c_mu;
    rep.min_margin_eps = worst_c_eps;
    rep.min_margin_mu = worst_c_mu;
    rep.verdict = (worst_c_eps > 0 && worst_c_mu > 0) ? Verdict::Applies : Verdict::Fails;
    return rep;
}

AuditReport audit_thm2(const MaterialSpec& m, const Surface& s, const DiffeoMap& reflection,
                       double tau, double alpha1, double alpha2, int n_samples) {
    if (!(alpha1 >= 0 && alpha1 < 2 && alpha2 >= 0 && alpha2 < 2))
        throw std::invalid_argument("audit_thm2: alpha must lie in [0, 2)");
    AuditReport rep;
    rep.theorem = "thm2";
    rep.n_samples = n_samples;
    rep.alpha1 = alpha1;
    rep.alpha2 = alpha2;
    rep.user_asserts_c2 = true;

    // reflection domain check at a few collar samples
    for (Vec3 p : s.boundary_samples(std::min(64, n_samples))) {
        const Vec3 nu = s.outward_normal(p);
        const Vec3 xin = p - 0.5 * tau * nu;
        const Vec3 img = reflection.forward(xin);
        if (s.signed_distance(img).side != Side::Exterior ||
            std::abs(s.signed_distance(img).value) > tau * (1 + 1e-6))
            throw std::invalid_argument("audit_thm2: reflection does not map into the collar");
    }

    auto eps_minus = [&](Vec3 x) { return m.eps_minus(x); };
    auto mu_minus = [&](Vec3 x) { return m.mu_minus(x); };
    auto eps_plus = [&](Vec3 x) { return m.eps_plus(x); };
    auto mu_plus = [&](Vec3 x) { return m.mu_plus(x); };

    const OrderingCertificate ce =
        reflected_material_ordering(s, reflection, eps_minus, eps_plus, alpha1, tau, n_samples);
    const OrderingCertificate cm =
        reflected_material_ordering(s, reflection, mu_minus, mu_plus, alpha2, tau, n_samples);
    rep.c_eps = ce.best();
    rep.c_mu = cm.best();
    rep.worst_eps.location =
        ce.c_hat_minus_plus > ce.c_plus_minus_hat ? ce.worst_point_hat : ce.worst_point_mirror;
    rep.worst_mu.location =
        cm.c_hat_minus_plus > cm.c_plus_minus_hat ? cm.worst_point_hat : cm.worst_point_mirror;
    rep.source_support_obligation = (alpha1 + alpha2 > 0);
    rep.verdict = (rep.c_eps > 0 && rep.c_mu > 0) ? Verdict::Applies : Verdict::Fails;
    if (rep.source_support_obligation)
        rep.note = "source must avoid the collar and its reflected preimage";
    return rep;
}

AuditReport audit_corisotropic3(const MaterialSpec& m, const Surface& s, double tau,
                                int n_samples, int n_beta) {
    if (!s.strictly_convex())
        throw std::invalid_argument("audit_corisotropic3: surface must be strictly convex");

    // materials must be constant and isotropic near the boundary
    auto isotropy_check = [&](const MaterialField& f, bool interior, const char* what) {
        auto pts = s.boundary_samples(32);
        double v0 = 0;
        bool first = true;
        for (Vec3 p : pts) {
            const Vec3 nu = s.outward_normal(p);
            const Vec3 x = interior ? p - 0.25 * tau * nu : p + 0.25 * tau * nu;
            const SymMatrix3 a = f(x);
            const Eig3 e = eig_sym3(a);
            if (std::abs(e.lam[0] - e.lam[2]) > 1e-10 * (std::abs(e.lam[0]) + 1e-30))
                throw std::invalid_argument(std::string("audit_corisotropic3: ") + what +
                                            " must be isotropic near the boundary");
            if (first) {
                v0 = e.lam[0];
                first = false;
            } else if (std::abs(e.lam[0] - v0) > 1e-10 * (std::abs(v0) + 1e-30)) {
                throw std::invalid_argument(std::string("audit_corisotropic3: ") + what +
                                            " must be constant near the boundary");
            }
        }
        return v0;
    };
    isotropy_check(m.eps_plus, false, "eps_plus");
    isotropy_check(m.mu_plus, false, "mu_plus");
    isotropy_check(m.eps_minus, true, "eps_minus");
    isotropy_check(m.mu_minus, true, "mu_minus");

    AuditReport rep;
    rep.theorem = "corisotropic3";
    rep.n_samples = n_samples;
    rep.alpha1 = rep.alpha2 = 1.0;
    rep.user_asserts_c3 = true;
    rep.best_gamma = -1e300;
    rep.verdict = Verdict::Fails;
    for (int i = 1; i <= n_beta; ++i) {
        const double beta = -double(i) / (n_beta + 1);
        const DiffeoMap F = convex_reflection(s, beta, tau);
        const AuditReport sub = audit_thm2(m, s, F, tau, 1.0, 1.0, n_samples);
        const double gamma = std::min(sub.c_eps, sub.c_mu);
        rep.beta_scan.push_back({beta, gamma});
        if (gamma > rep.best_gamma) {
            rep.best_gamma = gamma;
            rep.best_beta = beta;
            rep.c_eps = sub.c_eps;
            rep.c_mu = sub.c_mu;
        }
        if (gamma > 0) rep.verdict = Verdict::Applies;
    }
    rep.source_support_obligation = true;
    rep.note = "alpha1 = alpha2 = 1; source must avoid the collar and its reflected preimage";
    return rep;
}

}  // namespace metastab
