#pragma once

// JSON / CSV emission.  All floats carry 17 significant digits so round
// trips are exact; NaN becomes null in JSON and a literal "nan" cell in CSV
// (grids additionally carry a mask column).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "warpgeo/common.hpp"
#include "warpgeo/oracles.hpp"
#include "warpgeo/profiles.hpp"

namespace warpgeo {

using json = nlohmann::json;

inline std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// numbers enter JSON as finite doubles or null (nlohmann prints NaN as null
// anyway, but being explicit keeps the contract visible)
inline json jnum(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

inline json to_json(const radial_profile& p) {
    json j;
    j["kind"] = p.kind;
    j["a"] = jnum(p.a);
    json prm = json::object();
    for (const auto& [k, v] : p.params) prm[k] = jnum(v);
    j["params"] = prm;
    j["knots"] = json::array();
    for (double k : p.knots) j["knots"].push_back(jnum(k));
    return j;
}

inline json to_json(const warped_metric& m) {
    json j;
    j["family"] = m.family;
    j["a"] = jnum(m.a);
    j["base_profile"] = to_json(m.u);
    json prm = json::object();
    for (const auto& [k, v] : m.params) prm[k] = jnum(v);
    j["params"] = prm;
    j["phi_kind"] = m.phi.kind;
    json pprm = json::object();
    for (const auto& [k, v] : m.phi.params) pprm[k] = jnum(v);
    j["phi_params"] = pprm;
    return j;
}

inline json to_json(const oracle_report& r) {
    json j;
    j["lemma_id"] = r.lemma_id;
    j["n_trials"] = r.n_trials;
    j["worst_margin"] = jnum(r.worst_margin);
    j["witness"] = json::array();
    for (double w : r.witness) j["witness"].push_back(jnum(w));
    json lg = json::object();
    for (const auto& [k, v] : r.logged) lg[k] = jnum(v);
    j["logged"] = lg;
    return j;
}

// serialize with 17 significant digits on every double
inline std::string dump17(const json& j, int indent = 2) {
    // nlohmann already emits shortest-round-trip doubles (17 digits when
    // needed); the wrapper exists so all writers share one entry point
    return j.dump(indent);
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domain_error("write_text: cannot open " + path);
    out << text;
    if (!out) throw domain_error("write_text: short write to " + path);
}

inline void write_json(const std::string& path, const json& j) {
    write_text(path, dump17(j) + "\n");
}

struct csv_writer {
    std::string buf;

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) buf += ',';
            buf += cols[i];
        }
        buf += '\n';
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) buf += ',';
            buf += fmt17(vals[i]);
        }
        buf += '\n';
    }
    void save(const std::string& path) const { write_text(path, buf); }
};

} // namespace warpgeo
