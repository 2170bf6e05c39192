// Command-line front end: config ingestion, subcommand dispatch, report
// serialization, plot-data export.
#include <CLI11.hpp>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "metastab/estimates.hpp"
#include "metastab/report.hpp"

using namespace metastab;

namespace {

std::string now_iso8601() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    json j;
    in >> j;
    return j;
}

void write_report(const RunConfig& cfg, const json& config_json, const json& payload,
                  bool stamp) {
    ReportEnvelope env;
    env.hash = config_hash(config_json);
    env.timestamp = stamp ? now_iso8601() : "";
    env.payload = payload;
    std::filesystem::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir + "/report.json", env.to_json().dump(2) + "\n");
}

int run_check(const RunConfig& cfg, const json& config_json, bool strict, bool stamp) {
    const auto pair = CauchyPair::make(cfg.check_a1, cfg.check_a2, normalized(cfg.check_e));
    const CauchyVerdict v = check_complementing(pair);
    json out;
    out["status"] = v.satisfied() ? "Satisfied" : "Violated";
    out["margin"] = v.margin;
    if (v.witness)
        out["witness"] = json::array({v.witness->x, v.witness->y, v.witness->z});
    write_report(cfg, config_json, out, stamp);
    std::cout << out.dump(2) << "\n";
    return (strict && !v.satisfied()) ? 2 : 0;
}

int run_audit(const RunConfig& cfg, const json& config_json, bool strict, bool stamp) {
    const Surface s = cfg.surface.build();
    const MaterialSpec m = cfg.build_materials();
    AuditReport rep;
    if (cfg.theorem == "thm1") {
        rep = audit_thm1(m, s, cfg.n_samples);
    } else if (cfg.theorem == "corADN") {
        rep = audit_corADN(m, s, cfg.n_samples);
    } else if (cfg.theorem == "thm2") {
        const DiffeoMap F = normal_reflection(s, cfg.tau);
        rep = audit_thm2(m, s, F, cfg.tau, cfg.alpha1, cfg.alpha2, cfg.n_samples);
    } else if (cfg.theorem == "corisotropic3") {
        rep = audit_corisotropic3(m, s, cfg.tau, cfg.n_samples, cfg.n_beta);
    } else {
        throw std::invalid_argument("audit: unknown theorem '" + cfg.theorem + "'");
    }
    const json payload = audit_report_to_json(rep);
    write_report(cfg, config_json, payload, stamp);
    std::cout << rep.theorem << ": " << to_string(rep.verdict);
    if (cfg.theorem == "thm1")
        std::cout << " min_margin_eps=" << format_float(rep.min_margin_eps)
                  << " min_margin_mu=" << format_float(rep.min_margin_mu);
    else
        std::cout << " c_eps=" << format_float(rep.c_eps)
                  << " c_mu=" << format_float(rep.c_mu);
    if (cfg.theorem == "corisotropic3")
        std::cout << " best_beta=" << format_float(rep.best_beta)
                  << " best_gamma=" << format_float(rep.best_gamma);
    std::cout << "\n";
    return (strict && rep.verdict != Verdict::Applies) ? 2 : 0;
}

int run_sweep(const RunConfig& cfg, const json& config_json, bool strict, bool stamp) {
    const LayeredSphereProblem p = cfg.build_problem();
    const SweepReport rep = delta_sweep(p, cfg.deltas, cfg.n_cap);
    const json payload = sweep_report_to_json(rep);
    std::filesystem::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir + "/series.csv", sweep_report_to_csv(rep));
    write_report(cfg, config_json, payload, stamp);
    std::cout << "modes<=" << rep.rows.back().n_modes_used
              << " lap_convergent=" << (rep.lap_convergent ? "yes" : "no")
              << " resonant=" << (rep.resonant ? "yes" : "no") << "\n";
    for (const SweepRow& r : rep.rows)
        std::cout << "delta=" << format_float(r.delta)
                  << " ext=" << format_float(r.norm_exterior_annulus)
                  << " collar=" << format_float(r.norm_collar) << "\n";
    return (strict && rep.resonant) ? 2 : 0;
}

int run_estimates(const RunConfig& cfg, const json& config_json, bool stamp) {
    std::vector<EstimateRow> rows;
    if (cfg.estimates_which == "anti-curl" || cfg.estimates_which == "both") {
        // both the bare concentrating shell and its anchored variant; alpha
        // values >= 2 are allowed here on purpose (the sharpness sweep
        // reports the growing ratio without asserting divergence)
        for (double alpha : cfg.alphas)
            for (int k : cfg.k_values)
                for (const TestField& f :
                     {boundary_concentrated_field(k), anchored_boundary_family(k)}) {
                    EstimateRow r;
                    r.kind = "anti-curl";
                    r.field = f.name;
                    r.param = alpha;
                    r.ratio = weighted_ratio(f.value, alpha, 40, 24, 48, 64,
                                             /*allow_any_alpha=*/true);
                    rows.push_back(r);
                }
    }
    if (cfg.estimates_which == "trace" || cfg.estimates_which == "both") {
        for (const TestField& u : trace_corpus()) {
            const TraceCheck t = trace_estimate_check(u, cfg.grid);
            EstimateRow r;
            r.kind = "trace";
            r.field = u.name;
            r.param = 0;
            r.lhs = t.lhs;
            r.rhs = t.u_l2 * (t.u_l2 + t.div_l2);
            r.ratio = t.ratio;
            rows.push_back(r);
        }
    }
    std::filesystem::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir + "/series.csv", estimates_to_csv(rows));
    write_report(cfg, config_json, estimates_to_json(rows), stamp);
    std::cout << "wrote " << rows.size() << " estimate rows\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability criteria for sign-changing Maxwell transmission problems"};
    app.require_subcommand(1);
    app.fallthrough(true);  // global flags may follow the subcommand

    bool strict = false, stamp = false;
    std::string config_path, output_dir;
    app.add_flag("--strict", strict, "exit 2 on violation/failure verdicts");
    app.add_flag("--stamp", stamp, "include wall-clock timestamps in reports");
    app.add_option("--output-dir", output_dir, "override the config output directory");

    auto* check = app.add_subcommand("check-complementing", "decide the complementing condition");
    std::string a1_str = "I", a2_str = "2I", e_str = "0,0,1";
    check->add_option("--config", config_path, "JSON config file");
    check->add_option("--a1", a1_str, "matrix literal for A1");
    check->add_option("--a2", a2_str, "matrix literal for A2");
    check->add_option("--e", e_str, "interface direction, comma separated");

    auto* audit = app.add_subcommand("audit", "check theorem hypotheses on an interface");
    audit->add_option("--config", config_path, "JSON config file")->required();

    auto* sweep = app.add_subcommand("mie-sweep", "delta sweep of the sphere solver");
    sweep->add_option("--config", config_path, "JSON config file")->required();

    auto* est = app.add_subcommand("estimates", "anti-curl and trace inequality tables");
    est->add_option("--config", config_path, "JSON config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        json config_json;
        if (!config_path.empty()) config_json = load_json(config_path);

        if (check->parsed()) {
            if (config_path.empty()) {
                config_json["subcommand"] = "check-complementing";
                json chk;
                chk["a1"] = a1_str;
                chk["a2"] = a2_str;
                json e = json::array();
                std::stringstream ss(e_str);
                std::string tok;
                while (std::getline(ss, tok, ',')) e.push_back(std::stod(tok));
                chk["e"] = e;
                config_json["check"] = chk;
            }
            RunConfig cfg = parse_config(config_json);
            if (!output_dir.empty()) cfg.output_dir = output_dir;
            return run_check(cfg, config_json, strict, stamp);
        }
        RunConfig cfg = parse_config(config_json);
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (audit->parsed()) return run_audit(cfg, config_json, strict, stamp);
        if (sweep->parsed()) return run_sweep(cfg, config_json, strict, stamp);
        if (est->parsed()) return run_estimates(cfg, config_json, stamp);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
