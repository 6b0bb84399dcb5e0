#include "gsd/patchio.hpp"

#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "gsd/charmap.hpp"

namespace gsd {

namespace {

using nlohmann::json;

json patch_doc(const BBPatch<double>& p) {
    json coeffs = json::array();
    for (int r = 0; r < p.c.rows(); ++r) {
        json row = json::array();
        for (int d = 0; d < p.c.cols(); ++d) row.push_back(p.c(r, d));
        coeffs.push_back(std::move(row));
    }
    return {{"deg_u", p.du}, {"deg_v", p.dv}, {"coeffs", std::move(coeffs)}};
}

BBPatch<double> patch_undoc(const json& j) {
    const int du = j.at("deg_u").get<int>();
    const int dv = j.at("deg_v").get<int>();
    const auto& coeffs = j.at("coeffs");
    if (du < 1 || dv < 1 || static_cast<int>(coeffs.size()) != (du + 1) * (dv + 1))
        throw std::runtime_error("patch document has a malformed coefficient grid");
    const int dim = static_cast<int>(coeffs.at(0).size());
    BBPatch<double> p(du, dv, dim);
    for (int r = 0; r < p.c.rows(); ++r) {
        const auto& row = coeffs.at(r);
        if (static_cast<int>(row.size()) != dim)
            throw std::runtime_error("patch document has ragged coefficient rows");
        for (int d = 0; d < dim; ++d) p.c(r, d) = row.at(d).get<double>();
    }
    return p;
}

json sector_array(const std::vector<std::array<BBPatch<double>, 3>>& sectors) {
    json out = json::array();
    for (const auto& sec : sectors) {
        json patches = json::array();
        for (const auto& p : sec) patches.push_back(patch_doc(p));
        out.push_back({{"patches", std::move(patches)}});
    }
    return out;
}

}  // namespace

std::string patch_to_json(const BBPatch<double>& p) { return patch_doc(p).dump(2); }

BBPatch<double> patch_from_json(const std::string& text) {
    return patch_undoc(json::parse(text));
}

std::string surface_to_json(const GuidedSurface& s) {
    const int n = s.guide.n ? s.guide.n : s.net.n;
    json doc{{"valence", n},
             {"degree", s.degree},
             {"lambda", char_lambda(n)},
             {"rings", json::array()},
             {"cap", nullptr}};
    for (const auto& r : s.rings)
        doc["rings"].push_back({{"level", r.level}, {"sectors", sector_array(r.sectors)}});
    if (s.cap) {
        json sectors = json::array();
        for (const auto& p : s.cap->sectors)
            sectors.push_back({{"patches", json::array({patch_doc(p)})}});
        doc["cap"] = {{"sectors", std::move(sectors)},
                      {"center",
                       {s.cap->center(0), s.cap->center(1), s.cap->center(2)}}};
    }
    return doc.dump(2);
}

GuidedSurface surface_from_json(const std::string& text) {
    json doc = json::parse(text);
    GuidedSurface s;
    s.net.n = s.guide.n = doc.at("valence").get<int>();
    s.degree = doc.at("degree").get<int>();
    for (const auto& rj : doc.at("rings")) {
        SurfaceRing r;
        r.level = rj.at("level").get<int>();
        r.degree = s.degree;
        for (const auto& sj : rj.at("sectors")) {
            const auto& ps = sj.at("patches");
            if (ps.size() != 3)
                throw std::runtime_error("ring sector must hold three patches");
            r.sectors.push_back(
                {patch_undoc(ps.at(0)), patch_undoc(ps.at(1)), patch_undoc(ps.at(2))});
        }
        s.rings.push_back(std::move(r));
    }
    if (!doc.at("cap").is_null()) {
        Cap cap;
        cap.n = s.net.n;
        for (const auto& sj : doc["cap"].at("sectors"))
            cap.sectors.push_back(patch_undoc(sj.at("patches").at(0)));
        const auto& c = doc["cap"].at("center");
        cap.center << c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>();
        s.cap = std::move(cap);
    }
    return s;
}

std::string guide_to_json(const Guide& g) {
    json doc{{"valence", g.n}, {"lambda", char_lambda(g.n)}, {"sectors", json::array()}};
    for (const auto& p : g.sectors) doc["sectors"].push_back(patch_doc(p));
    Eigen::MatrixXd labels = extract_labels(g);
    json lv = json::array();
    for (int r = 0; r < labels.rows(); ++r) {
        json row = json::array();
        for (int d = 0; d < labels.cols(); ++d) row.push_back(labels(r, d));
        lv.push_back(std::move(row));
    }
    doc["free_labels"] = std::move(lv);
    return doc.dump(2);
}

void write_obj(std::ostream& os, const TessMesh& m) {
    os.precision(17);
    for (int v = 0; v < m.V.rows(); ++v)
        os << "v " << m.V(v, 0) << " " << m.V(v, 1) << " " << m.V(v, 2) << "\n";
    for (const auto& f : m.F)
        os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << " " << f[3] + 1 << "\n";
}

}  // namespace gsd
