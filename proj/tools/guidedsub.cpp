// Command-line driver: build guided surfaces from a quad mesh, dump the
// characteristic map, run the eigen-analysis, or check smoothness residuals.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsd/charmap.hpp"
#include "gsd/patchio.hpp"
#include "gsd/quadmesh.hpp"
#include "gsd/quality.hpp"
#include "gsd/spectrum.hpp"
#include "gsd/surface.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

gsd::QuadMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    return gsd::load_quad_mesh(in);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int cmd_build(const std::string& input, int degree, int rings, bool cap, int res,
              const std::string& out_dir) {
    if (cap && degree != 6) throw std::runtime_error("--cap requires --degree 6");
    gsd::QuadMesh mesh = load_mesh(input);
    fs::create_directories(out_dir);

    gsd::RegularSurface regular = gsd::regular_to_bspline(mesh);
    std::vector<gsd::CNet> cnets = gsd::extract_cnets(mesh);

    gsd::BuildOptions opt;
    opt.degree = degree;
    opt.num_rings = rings;
    opt.cap = cap;
    std::vector<gsd::GuidedSurface> surfaces;
    surfaces.reserve(cnets.size());
    for (const auto& net : cnets) surfaces.push_back(gsd::build_surface(net, opt));

    json doc{{"regular", json::array()}, {"guided", json::array()}};
    for (const auto& p : regular.patches)
        doc["regular"].push_back(json::parse(gsd::patch_to_json(p)));
    for (const auto& s : surfaces)
        doc["guided"].push_back(json::parse(gsd::surface_to_json(s)));
    write_file(fs::path(out_dir) / "surface.json", doc.dump(2));

    std::vector<const gsd::BBPatch<double>*> patches;
    for (const auto& p : regular.patches) patches.push_back(&p);
    for (const auto& s : surfaces)
        for (const auto* p : gsd::surface_patches(s)) patches.push_back(p);
    gsd::TessMesh tess = gsd::tessellate_patches(patches, res);
    std::ofstream obj(fs::path(out_dir) / "surface.obj");
    gsd::write_obj(obj, tess);

    gsd::LightLine light;
    light.point << 0, 0, 10;
    light.dir << 1, 0, 0;
    std::vector<gsd::QualityField> fields;
    fields.reserve(patches.size());
    for (const auto* p : patches) fields.push_back(gsd::sample_quality(*p, res, light));
    std::ofstream csv(fs::path(out_dir) / "quality.csv");
    gsd::write_quality_csv(csv, fields);

    std::cout << "regular patches: " << regular.patches.size()
              << "  extraordinary vertices: " << surfaces.size()
              << "  tessellation vertices: " << tess.V.rows() << "\n";
    return 0;
}

int cmd_charmap(int n, const std::string& out_path) {
    const gsd::CharMap& cm = gsd::char_map(n);
    std::cout.precision(16);
    std::cout << "valence " << n << " lambda " << cm.lambda << "\n";
    if (!out_path.empty()) {
        json doc{{"valence", n},
                 {"lambda", cm.lambda},
                 {"chi", json::array()},
                 {"chi_tilde", json::array()}};
        for (int q = 0; q < 3; ++q) {
            doc["chi"].push_back(json::parse(gsd::patch_to_json(cm.chi[q])));
            doc["chi_tilde"].push_back(json::parse(gsd::patch_to_json(cm.chi_tilde[q])));
        }
        write_file(out_path, doc.dump(2));
    }
    return 0;
}

int cmd_eigen(int n, double lambda, const std::string& out_dir, int levels) {
    if (n == 4) throw std::runtime_error("valence 4 is regular; no eigen-analysis");
    const bool have_lambda = lambda > 0;
    if (!have_lambda) lambda = gsd::char_lambda(n);
    Eigen::MatrixXd M = gsd::restriction_map(n, lambda);
    gsd::Spectrum sp = gsd::verify_spectrum(M, n, lambda);

    std::cout.precision(10);
    std::cout << "valence " << n << " lambda " << lambda << "\n";
    std::cout << "  s  eigenvalue        count  expected\n";
    std::cout << "  0  1                 1      1\n";
    for (const auto& cl : sp.clusters) {
        std::cout << "  " << cl.s << (cl.s < 10 ? "  " : " ") << std::left << std::setw(18)
                  << cl.value << std::right << std::setw(5) << cl.count << std::setw(10)
                  << cl.expected << "\n";
    }
    std::cout << "max eigenvector residual " << sp.max_residual << "\n";
    std::cout << "spectrum " << (sp.ok ? "ok" : "MISMATCH") << "\n";

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        for (int s = 1; s <= 10; ++s) {
            const int label = gsd::eigen_free_labels(n, s).front();
            gsd::EigenRingSequence seq = gsd::eigenring_sequence(n, s, label, levels);
            json doc{{"valence", n}, {"degree", 5},     {"lambda", seq.lambda},
                     {"s", s},       {"label", label},  {"rings", json::array()}};
            for (const auto& r : seq.rings) {
                json sectors = json::array();
                for (const auto& sec : r.sectors) {
                    json patches = json::array();
                    for (const auto& p : sec)
                        patches.push_back(json::parse(gsd::patch_to_json(p)));
                    sectors.push_back({{"patches", std::move(patches)}});
                }
                doc["rings"].push_back({{"level", r.level}, {"sectors", std::move(sectors)}});
            }
            char name[32];
            std::snprintf(name, sizeof name, "eigenring_s%02d.json", s);
            write_file(fs::path(out_dir) / name, doc.dump(2));
        }
    }
    return sp.ok ? 0 : 2;
}

int cmd_check(const std::string& input, int degree, int rings, bool cap) {
    gsd::QuadMesh mesh = load_mesh(input);
    std::vector<gsd::CNet> cnets = gsd::extract_cnets(mesh);
    if (cnets.empty()) {
        std::cout << "no extraordinary vertices; regular patches: "
                  << gsd::regular_to_bspline(mesh).patches.size() << "\n";
        return 0;
    }
    gsd::BuildOptions opt;
    opt.degree = cap ? 6 : degree;
    opt.num_rings = rings;
    opt.cap = cap;

    std::cout.precision(3);
    std::cout << std::scientific;
    double worst = 0;
    for (const auto& net : cnets) {
        gsd::GuidedSurface s = gsd::build_surface(net, opt);
        gsd::SurfaceReport rep = gsd::check_surface(s);
        std::cout << "vertex " << net.center << " valence " << net.n << ": guide_g2 "
                  << rep.guide_g2 << " ring_c2 " << rep.ring_c2 << " surround_c2 "
                  << rep.surround_c2;
        if (cap) std::cout << " cap_g1 " << rep.cap_g1 << " cap_rim_c1 " << rep.cap_rim_c1;
        std::cout << "\n";
        for (double r : {rep.guide_g2, rep.ring_c2, rep.surround_c2, rep.cap_g1, rep.cap_rim_c1})
            worst = std::max(worst, r);
    }
    std::cout << "max residual " << worst << "\n";
    return worst <= 1e-6 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"guided subdivision surfaces around extraordinary vertices"};
    app.require_subcommand(1);

    std::string input, out_dir = ".", out_path;
    int degree = 5, rings = 6, res = 8, valence = 5, levels = 3;
    double lambda = -1;
    bool cap = false;

    CLI::App* build = app.add_subcommand("build", "build surfaces from a quad mesh");
    build->add_option("--input", input, "OBJ quad mesh")->required();
    build->add_option("--degree", degree, "patch degree")->check(CLI::IsMember({5, 6}));
    build->add_option("--rings", rings, "number of ring levels")->check(CLI::PositiveNumber);
    build->add_flag("--cap", cap, "close the hole with a bi-6 cap (degree 6 only)");
    build->add_option("--res", res, "samples per patch edge")->check(CLI::PositiveNumber);
    build->add_option("--out", out_dir, "output directory");

    CLI::App* charmap = app.add_subcommand("charmap", "characteristic map of a valence");
    charmap->add_option("--valence", valence, "vertex valence")->required()->check(CLI::Range(3, 20));
    charmap->add_option("--out", out_path, "write the map as JSON");

    CLI::App* eigen = app.add_subcommand("eigen", "spectrum of the guide restriction map");
    eigen->add_option("--valence", valence, "vertex valence")->required()->check(CLI::Range(3, 12));
    eigen->add_option("--lambda", lambda, "restriction factor (default: characteristic)")
        ->check(CLI::Range(1e-3, 0.99));
    eigen->add_option("--out", out_dir, "directory for eigenring patch sets")->default_val("");
    eigen->add_option("--levels", levels, "ring levels per eigenring")->check(CLI::PositiveNumber);

    CLI::App* check = app.add_subcommand("check", "smoothness diagnostics for a quad mesh");
    check->add_option("--input", input, "OBJ quad mesh")->required();
    check->add_option("--degree", degree, "patch degree")->check(CLI::IsMember({5, 6}));
    check->add_option("--rings", rings, "number of ring levels")->check(CLI::PositiveNumber);
    check->add_flag("--cap", cap, "also check a capped bi-6 build");

    try {
        app.parse(argc, argv);
        if (build->parsed()) return cmd_build(input, degree, rings, cap, res, out_dir);
        if (charmap->parsed()) return cmd_charmap(valence, out_path);
        if (eigen->parsed()) return cmd_eigen(valence, lambda, out_dir, levels);
        if (check->parsed()) return cmd_check(input, degree, rings, cap);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
