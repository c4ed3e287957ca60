#include "pwave/io.hpp"

#include "pwave/errors.hpp"

#include <openssl/sha.h>

#include <cstdio>
#include <fstream>

namespace pwave {

namespace {

void append_row(std::string& out, std::initializer_list<double> values) {
    char buf[32];
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        first = false;
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    }
    out += '\n';
}

} // namespace

std::string profile_csv(const ProfilePair& p) {
    std::string out = "r,f_minus,f_plus\n";
    for (std::size_t i = 0; i < p.grid.size(); ++i) append_row(out, {p.grid.r(i), p.fm[i], p.fp[i]});
    return out;
}

std::string h_csv(const HSolution& h) {
    std::string out = "r,h\n";
    for (std::size_t i = 0; i < h.grid.size(); ++i) append_row(out, {h.grid.r(i), h.h[i]});
    return out;
}

std::string planar_csv(const PlanarField& f) {
    std::string out = "r,theta,re_eta_minus,im_eta_minus,re_eta_plus,im_eta_plus\n";
    const DiskGrid& g = f.grid;
    for (std::size_t k = 0; k < g.num_nodes(); ++k)
        append_row(out, {g.r(g.ring_of(k)), g.theta(g.angle_of(k)), f.eta_minus[k].real(), f.eta_minus[k].imag(),
                         f.eta_plus[k].real(), f.eta_plus[k].imag()});
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::invalid_argument, "cannot open " + path.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json to_json(const SolveReport& r) {
    nlohmann::json j{{"converged", r.converged},
                     {"iterations", r.iterations},
                     {"final_residual", r.final_residual},
                     {"history", r.history},
                     {"damping_events", r.damping_events},
                     {"exploratory", r.exploratory}};
    j["diagnostics"] = nlohmann::json::object();
    for (const auto& [k, v] : r.diagnostics) j["diagnostics"][k] = v;
    return j;
}

nlohmann::json to_json(const EnergyBreakdown& e) {
    return {{"kinetic_diag", e.kinetic_diag}, {"kinetic_cross", e.kinetic_cross}, {"potential", e.potential}, {"total", e.total}};
}

nlohmann::json to_json(const TailModel& m) {
    return {{"t", m.t},
            {"a_minus", m.a_minus},
            {"a_plus", m.a_plus},
            {"b_minus", m.b_minus},
            {"b_plus", m.b_plus},
            {"c_minus", m.c_minus},
            {"c_plus", m.c_plus},
            {"R_ref", m.R_ref}};
}

nlohmann::json to_json(const TailFit& f) {
    nlohmann::json j{{"fit_window", {f.r_lo, f.r_hi}},
                     {"nodes", f.nodes},
                     {"fitted_a_minus", f.a_minus},
                     {"fitted_b_minus", f.b_minus},
                     {"residual_minus", f.residual_minus}};
    if (f.has_plus) {
        j["fitted_a_plus"] = f.a_plus;
        j["fitted_b_plus"] = f.b_plus;
        j["residual_plus"] = f.residual_plus;
    }
    return j;
}

nlohmann::json to_json(const PohozaevReport& p, bool with_profile) {
    nlohmann::json j{{"sup_mismatch", p.sup_mismatch},
                     {"potential_integral", p.potential_integral},
                     {"boundary_exact", p.boundary_exact},
                     {"boundary_derivative_form", p.boundary_derivative_form},
                     {"boundary_literal_form", p.boundary_literal_form}};
    if (with_profile) {
        j["r"] = p.r;
        j["mismatch"] = p.mismatch;
    }
    return j;
}

nlohmann::json to_json(const DerivativeTailReport& d) {
    nlohmann::json j{{"window", {d.r_lo, d.r_hi}},
                     {"lead_minus", d.lead_minus},
                     {"corr_minus", d.corr_minus},
                     {"bound_minus", d.bound_minus},
                     {"monotone_minus", d.monotone_minus}};
    if (d.has_plus) {
        j["lead_plus"] = d.lead_plus;
        j["corr_plus"] = d.corr_plus;
        j["bound_plus"] = d.bound_plus;
    }
    return j;
}

nlohmann::json to_json(const FourierDiagnostics& f) {
    return {{"max_mode", f.max_mode},
            {"mass_minus", f.mass_minus},
            {"mass_plus", f.mass_plus},
            {"equivariant_fraction", f.equivariant_fraction}};
}

std::string git_blob_sha1(std::string_view content) {
    std::string blob = "blob " + std::to_string(content.size());
    blob.push_back('\0');
    blob.append(content);
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned char c : digest) {
        out += hex[c >> 4];
        out += hex[c & 15];
    }
    return out;
}

} // namespace pwave
