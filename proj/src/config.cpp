#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "metastab/report.hpp"

namespace metastab {

namespace {

double parse_number_token(const std::string& s) {
    // plain double or a simple fraction "a/b"
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const double a = std::stod(s.substr(0, slash));
        const double b = std::stod(s.substr(slash + 1));
        if (b == 0.0) throw std::invalid_argument("matrix literal: division by zero");
        return a / b;
    }
    return std::stod(s);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + where + it.key() + "'");
    }
}

Vec3 parse_vec3(const json& v, const std::string& what) {
    if (!v.is_array() || v.size() != 3)
        throw std::invalid_argument("config: '" + what + "' must be a 3-element array");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

SymMatrix3 parse_matrix(const json& v) {
    if (v.is_number()) return v.get<double>() * SymMatrix3::identity();
    if (v.is_array()) {
        if (v.size() != 9)
            throw std::invalid_argument("matrix literal: array form must have 9 entries");
        std::array<double, 9> r{};
        for (int i = 0; i < 9; ++i) r[i] = v[i].get<double>();
        // symmetry check
        if (std::abs(r[1] - r[3]) > 1e-12 || std::abs(r[2] - r[6]) > 1e-12 ||
            std::abs(r[5] - r[7]) > 1e-12)
            throw std::invalid_argument("matrix literal: row-major entries are not symmetric");
        return SymMatrix3::from_rows(r);
    }
    if (!v.is_string()) throw std::invalid_argument("matrix literal: expected number/string/array");
    std::string s = v.get<std::string>();
    // strip spaces
    std::string t;
    for (char c : s)
        if (c != ' ') t += c;
    if (t.empty()) throw std::invalid_argument("matrix literal: empty");
    if (t == "I") return SymMatrix3::identity();
    if (t == "-I") return -SymMatrix3::identity();
    if (t.size() > 5 && t.substr(0, 5) == "diag(" && t.back() == ')') {
        std::string inner = t.substr(5, t.size() - 6);
        std::array<double, 3> d{};
        int idx = 0;
        std::stringstream ss(inner);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (idx >= 3) throw std::invalid_argument("matrix literal: diag needs 3 entries");
            d[idx++] = parse_number_token(tok);
        }
        if (idx != 3) throw std::invalid_argument("matrix literal: diag needs 3 entries");
        return SymMatrix3::diag(d[0], d[1], d[2]);
    }
    // scalar shorthand, optionally suffixed with I: "2", "2I", "-0.5I"
    if (t.back() == 'I') t.pop_back();
    return parse_number_token(t) * SymMatrix3::identity();
}

Surface SurfaceSpec::build() const {
    if (type == "sphere") return Surface::sphere(center, radius);
    if (type == "ellipsoid") return Surface::ellipsoid(center, semi_axes);
    throw std::invalid_argument("config: surface type must be sphere|ellipsoid");
}

LayeredSphereProblem RunConfig::build_problem() const {
    LayeredSphereProblem p;
    p.omega = omega;
    p.interface_radius = R;
    // the solver takes scalar interior coefficients: use the isotropic value
    const Eig3 ee = eig_sym3(eps_minus), em = eig_sym3(mu_minus);
    if (std::abs(ee.lam[0] - ee.lam[2]) > 1e-10 * (std::abs(ee.lam[0]) + 1e-30) ||
        std::abs(em.lam[0] - em.lam[2]) > 1e-10 * (std::abs(em.lam[0]) + 1e-30))
        throw std::invalid_argument("mie-sweep: interior tensors must be isotropic scalars");
    p.eps_minus = ee.lam[0];
    p.mu_minus = em.lam[0];
    p.delta = delta;
    if (source_type == "shell") {
        ShellCurrent sc;
        sc.radius = Rs;
        sc.n = source_n;
        sc.m = source_m;
        sc.pol = (source_pol == "TM") ? Polarization::TM : Polarization::TE;
        sc.amplitude = complexd(source_amplitude, 0);
        p.source = sc;
    } else if (source_type == "plane") {
        PlaneWave pw;
        pw.direction = plane_direction;
        pw.polarization = plane_polarization;
        pw.amplitude = source_amplitude;
        p.source = pw;
    } else {
        throw std::invalid_argument("config: source type must be shell|plane");
    }
    p.validate();
    return p;
}

MaterialSpec RunConfig::build_materials() const {
    MaterialSpec m;
    m.eps_plus = MaterialField::constant(eps_plus);
    m.mu_plus = MaterialField::constant(mu_plus);
    m.eps_minus = MaterialField::constant(eps_minus);
    m.mu_minus = MaterialField::constant(mu_minus);
    m.delta = delta;
    return m;
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    reject_unknown_keys(j,
                        {"version", "subcommand", "seed", "output_dir", "materials", "surface",
                         "solver", "audit", "check", "estimates"},
                        "");
    if (j.contains("version")) c.version = j["version"].get<int>();
    if (c.version != 1) throw std::invalid_argument("config: unsupported schema version");
    if (!j.contains("subcommand")) throw std::invalid_argument("config: missing 'subcommand'");
    c.subcommand = j["subcommand"].get<std::string>();
    if (c.subcommand != "check-complementing" && c.subcommand != "audit" &&
        c.subcommand != "mie-sweep" && c.subcommand != "estimates")
        throw std::invalid_argument("config: unknown subcommand '" + c.subcommand + "'");
    if (j.contains("seed")) c.seed = j["seed"].get<unsigned long long>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();

    if (j.contains("materials")) {
        const json& m = j["materials"];
        reject_unknown_keys(m, {"eps_plus", "mu_plus", "eps_minus", "mu_minus", "delta"},
                            "materials.");
        if (m.contains("eps_plus")) c.eps_plus = parse_matrix(m["eps_plus"]);
        if (m.contains("mu_plus")) c.mu_plus = parse_matrix(m["mu_plus"]);
        if (m.contains("eps_minus")) c.eps_minus = parse_matrix(m["eps_minus"]);
        if (m.contains("mu_minus")) c.mu_minus = parse_matrix(m["mu_minus"]);
        if (m.contains("delta")) c.delta = m["delta"].get<double>();
    }
    if (j.contains("surface")) {
        const json& s = j["surface"];
        reject_unknown_keys(s, {"type", "center", "radius", "semi_axes"}, "surface.");
        if (s.contains("type")) c.surface.type = s["type"].get<std::string>();
        if (s.contains("center")) c.surface.center = parse_vec3(s["center"], "surface.center");
        if (s.contains("radius")) c.surface.radius = s["radius"].get<double>();
        if (s.contains("semi_axes"))
            c.surface.semi_axes = parse_vec3(s["semi_axes"], "surface.semi_axes");
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        reject_unknown_keys(
            s, {"omega", "R", "source", "deltas", "n_cap"}, "solver.");
        if (s.contains("omega")) c.omega = s["omega"].get<double>();
        if (s.contains("R")) c.R = s["R"].get<double>();
        if (s.contains("n_cap")) c.n_cap = s["n_cap"].get<int>();
        if (s.contains("deltas")) {
            c.deltas.clear();
            for (const auto& d : s["deltas"]) c.deltas.push_back(d.get<double>());
        }
        if (s.contains("source")) {
            const json& src = s["source"];
            reject_unknown_keys(src,
                                {"type", "Rs", "n", "m", "pol", "amplitude", "direction",
                                 "polarization"},
                                "solver.source.");
            if (src.contains("type")) c.source_type = src["type"].get<std::string>();
            if (src.contains("Rs")) c.Rs = src["Rs"].get<double>();
            if (src.contains("n")) c.source_n = src["n"].get<int>();
            if (src.contains("m")) c.source_m = src["m"].get<int>();
            if (src.contains("pol")) c.source_pol = src["pol"].get<std::string>();
            if (src.contains("amplitude")) c.source_amplitude = src["amplitude"].get<double>();
            if (src.contains("direction"))
                c.plane_direction = parse_vec3(src["direction"], "solver.source.direction");
            if (src.contains("polarization"))
                c.plane_polarization =
                    parse_vec3(src["polarization"], "solver.source.polarization");
        }
    }
    if (j.contains("audit")) {
        const json& a = j["audit"];
        reject_unknown_keys(a, {"theorem", "n_samples", "tau", "alpha1", "alpha2", "beta", "n_beta"},
                            "audit.");
        if (a.contains("theorem")) c.theorem = a["theorem"].get<std::string>();
        if (a.contains("n_samples")) c.n_samples = a["n_samples"].get<int>();
        if (a.contains("tau")) c.tau = a["tau"].get<double>();
        if (a.contains("alpha1")) c.alpha1 = a["alpha1"].get<double>();
        if (a.contains("alpha2")) c.alpha2 = a["alpha2"].get<double>();
        if (a.contains("beta")) c.beta = a["beta"].get<double>();
        if (a.contains("n_beta")) c.n_beta = a["n_beta"].get<int>();
    }
    if (j.contains("check")) {
        const json& k = j["check"];
        reject_unknown_keys(k, {"a1", "a2", "e"}, "check.");
        if (k.contains("a1")) c.check_a1 = parse_matrix(k["a1"]);
        if (k.contains("a2")) c.check_a2 = parse_matrix(k["a2"]);
        if (k.contains("e")) c.check_e = parse_vec3(k["e"], "check.e");
    }
    if (j.contains("estimates")) {
        const json& e = j["estimates"];
        reject_unknown_keys(e, {"which", "alphas", "k_values", "grid"}, "estimates.");
        if (e.contains("which")) c.estimates_which = e["which"].get<std::string>();
        if (e.contains("grid")) c.grid = e["grid"].get<int>();
        if (e.contains("alphas")) {
            c.alphas.clear();
            for (const auto& a : e["alphas"]) c.alphas.push_back(a.get<double>());
        }
        if (e.contains("k_values")) {
            c.k_values.clear();
            for (const auto& k : e["k_values"]) c.k_values.push_back(k.get<int>());
        }
    }
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    json j;
    in >> j;
    return parse_config(j);
}

}  // namespace metastab
