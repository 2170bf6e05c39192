#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "metastab/report.hpp"

namespace metastab {

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string config_hash(const json& config) {
    // nlohmann objects iterate in sorted key order, so dump() is canonical
    const std::string bytes = config.dump();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016" PRIx64, h);
    return buf;
}

json ReportEnvelope::to_json() const {
    json j;
    j["tool"] = tool;
    j["version"] = version;
    j["config_hash"] = hash;
    j["timestamp"] = timestamp;
    j["payload"] = payload;
    return j;
}

namespace {

json vec3_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

json audit_report_to_json(const AuditReport& rep) {
    json j;
    j["theorem"] = rep.theorem;
    j["verdict"] = to_string(rep.verdict);
    j["n_samples"] = rep.n_samples;
    j["min_margin_eps"] = rep.min_margin_eps;
    j["min_margin_mu"] = rep.min_margin_mu;
    j["worst_eps_location"] = vec3_json(rep.worst_eps.location);
    j["worst_mu_location"] = vec3_json(rep.worst_mu.location);
    if (!rep.sample_records.empty()) {
        json recs = json::array();
        for (const SampleRecord& r : rep.sample_records)
            recs.push_back(json::array(
                {r.location.x, r.location.y, r.location.z, r.margin_eps, r.margin_mu}));
        j["samples"] = recs;
    }
    if (rep.witness_direction) j["witness_direction"] = vec3_json(*rep.witness_direction);
    j["c_eps"] = rep.c_eps;
    j["c_mu"] = rep.c_mu;
    j["alpha1"] = rep.alpha1;
    j["alpha2"] = rep.alpha2;
    j["source_support_obligation"] = rep.source_support_obligation;
    if (rep.theorem == "corisotropic3") {
        j["best_beta"] = rep.best_beta;
        j["best_gamma"] = rep.best_gamma;
        json scan = json::array();
        for (auto& [b, g] : rep.beta_scan) scan.push_back(json::array({b, g}));
        j["beta_scan"] = scan;
    }
    j["user_asserts_c1"] = rep.user_asserts_c1;
    j["user_asserts_c2"] = rep.user_asserts_c2;
    j["user_asserts_c3"] = rep.user_asserts_c3;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

json sweep_report_to_json(const SweepReport& rep) {
    json rows = json::array();
    for (const SweepRow& r : rep.rows) {
        json row;
        row["delta"] = r.delta;
        row["norm_exterior_annulus"] = r.norm_exterior_annulus;
        row["norm_interior"] = r.norm_interior;
        row["norm_collar"] = r.norm_collar;
        row["energy_residual"] = r.energy_residual;
        row["silver_muller_residual"] = r.silver_muller;
        row["min_mode_denominator"] = r.min_mode_denominator;
        row["n_modes_used"] = r.n_modes_used;
        row["truncation_warning"] = r.truncation_warning;
        rows.push_back(row);
    }
    json j;
    j["rows"] = rows;
    j["lap_convergent"] = rep.lap_convergent;
    j["resonant"] = rep.resonant;
    j["envelope_constant"] = rep.envelope_constant;
    return j;
}

std::string sweep_report_to_csv(const SweepReport& rep) {
    std::string out =
        "delta,norm_exterior_annulus,norm_interior,norm_collar,energy_residual,"
        "silver_muller_residual,min_mode_denominator,n_modes_used,truncation_warning\n";
    for (const SweepRow& r : rep.rows) {
        out += format_float(r.delta) + "," + format_float(r.norm_exterior_annulus) + "," +
               format_float(r.norm_interior) + "," + format_float(r.norm_collar) + "," +
               format_float(r.energy_residual) + "," + format_float(r.silver_muller) + "," +
               format_float(r.min_mode_denominator) + "," + std::to_string(r.n_modes_used) +
               "," + (r.truncation_warning ? "1" : "0") + "\n";
    }
    return out;
}

std::string estimates_to_csv(const std::vector<EstimateRow>& rows) {
    std::string out = "kind,field,param,lhs,rhs,ratio\n";
    for (const EstimateRow& r : rows) {
        out += r.kind + "," + r.field + "," + format_float(r.param) + "," +
               format_float(r.lhs) + "," + format_float(r.rhs) + "," + format_float(r.ratio) +
               "\n";
    }
    return out;
}

json estimates_to_json(const std::vector<EstimateRow>& rows) {
    json arr = json::array();
    for (const EstimateRow& r : rows) {
        json row;
        row["kind"] = r.kind;
        row["field"] = r.field;
        row["param"] = r.param;
        row["lhs"] = r.lhs;
        row["rhs"] = r.rhs;
        row["ratio"] = r.ratio;
        arr.push_back(row);
    }
    return json{{"rows", arr}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace metastab
