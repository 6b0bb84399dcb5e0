#include "gsd/rings.hpp"

#include <cmath>
#include <stdexcept>

#include "gsd/parallel.hpp"
#include "gsd/series.hpp"
#include "gsd/surface.hpp"

namespace gsd {

namespace {

int jet_size(int degree) { return degree == 5 ? 3 : 4; }

void check_degree(int degree) {
    if (degree != 5 && degree != 6)
        throw std::invalid_argument("ring degree must be 5 or 6");
}

// chi cells pulled back to the guide's unit-square chart.
std::array<BBPatch<double>, 3> unsheared_cells(const CharMap& cm) {
    Eigen::Matrix2d Li = sector_shear(cm.n).inverse();
    return {apply_frame(Li, cm.chi[0]), apply_frame(Li, cm.chi[1]),
            apply_frame(Li, cm.chi[2])};
}

// Taylor jet of h(scale * rho(u,v)) at a corner of the unit square.
Jet<double> sampled_jet(const BBPatch<double>& h, const BBPatch<double>& rho,
                        double scale, int degree, Corner corner) {
    BBPatch<double> r = rho;
    r.c *= scale;
    const double u0 = corner_u_high(corner) ? 1.0 : 0.0;
    const double v0 = corner_v_high(corner) ? 1.0 : 0.0;
    auto xy = patch_series(r, u0, v0);
    auto f = compose_series<double>(patch_deriv_or_zero(h, xy[0].a(0, 0), xy[1].a(0, 0)),
                                    xy[0], xy[1]);
    return corner_jet<double>(series_sampler(std::move(f)), degree, jet_size(degree), corner);
}

// Patch with guide samples at all four corners; rings at level l continue
// these patches taken at level l-1.
BBPatch<double> pure_patch(const BBPatch<double>& h, const BBPatch<double>& rho,
                           double scale, int degree) {
    std::array<Jet<double>, 4> js;
    for (int c = 0; c < 4; ++c)
        js[c] = sampled_jet(h, rho, scale, degree, static_cast<Corner>(c));
    return assemble_from_jets(js, degree, jet_size(degree));
}

// Outer corners read the coarser neighbor at half parameter speed; the
// source points follow the half-to-full-scale joins of the characteristic
// cells (see charmap).
struct GraySource {
    int q;
    Corner corner;
    int src;
    double su, sv;
};

constexpr GraySource kGray[6] = {
    {0, Corner::HL, 0, 0.0, 0.0}, {0, Corner::HH, 0, 0.0, 0.5},
    {1, Corner::HL, 0, 0.0, 0.5}, {1, Corner::LH, 2, 0.5, 0.0},
    {2, Corner::HH, 2, 0.5, 0.0}, {2, Corner::LH, 2, 0.0, 0.0},
};

Jet<double> prolonged_jet(const BBPatch<double>& src, double su, double sv,
                          int degree, Corner corner) {
    auto f = [&](int a, int b) {
        return Eigen::RowVectorXd(std::pow(0.5, a + b) * eval(src, su, sv, a, b));
    };
    return corner_jet<double>(f, degree, jet_size(degree), corner);
}

// Far corner of the diagonal patch, where three coarser patches meet.  The
// two sources flanking the corner agree only through second order, so each
// third-order row must come from the neighbor that owns that outer edge or
// the seams lose continuity.
Jet<double> junction_jet(const BBPatch<double>& s0, const BBPatch<double>& s2,
                         int degree) {
    auto f = [&](int a, int b) -> Eigen::RowVectorXd {
        const double w = std::pow(0.5, a + b);
        if (b > 2 && a <= 2) return w * eval(s0, 0.0, 1.0, a, b);
        if (a > 2 && b <= 2) return w * eval(s2, 1.0, 0.0, a, b);
        return 0.5 * w * (eval(s0, 0.0, 1.0, a, b) + eval(s2, 1.0, 0.0, a, b));
    };
    return corner_jet<double>(f, degree, jet_size(degree), Corner::HH);
}

std::array<BBPatch<double>, 3> ring_sector(const BBPatch<double>& h,
                                           const std::array<BBPatch<double>, 3>& rho,
                                           double scale,
                                           const std::array<const BBPatch<double>*, 3>& outer,
                                           int degree) {
    std::array<std::array<Jet<double>, 4>, 3> jets;
    for (int q = 0; q < 3; ++q)
        for (int c = 0; c < 4; ++c)
            if (SurfaceRing::corner_sampled(q, static_cast<Corner>(c)))
                jets[q][c] = sampled_jet(h, rho[q], scale, degree, static_cast<Corner>(c));
    for (const GraySource& s : kGray)
        jets[s.q][static_cast<int>(s.corner)] =
            prolonged_jet(*outer[s.src], s.su, s.sv, degree, s.corner);
    jets[1][static_cast<int>(Corner::HH)] = junction_jet(*outer[0], *outer[2], degree);

    std::array<BBPatch<double>, 3> out;
    for (int q = 0; q < 3; ++q) out[q] = assemble_from_jets(jets[q], degree, jet_size(degree));
    return out;
}

std::array<BBPatch<double>, 3> ring_sector_uniform(const BBPatch<double>& h,
                                                   const std::array<BBPatch<double>, 3>& rho,
                                                   double lambda, int level, int degree) {
    const double s = std::pow(lambda, level);
    std::array<BBPatch<double>, 3> prev;
    for (int q = 0; q < 3; ++q) prev[q] = pure_patch(h, rho[q], s / lambda, degree);
    return ring_sector(h, rho, s, {&prev[0], &prev[1], &prev[2]}, degree);
}

}  // namespace

bool SurfaceRing::corner_sampled(int q, Corner c) {
    switch (q) {
        case 0: return c == Corner::LL || c == Corner::LH;
        case 1: return c == Corner::LL;
        case 2: return c == Corner::LL || c == Corner::HL;
    }
    throw std::out_of_range("corner_sampled: patch index must be 0..2");
}

SurfaceRing build_ring(const Guide& g, const CharMap& cm, int level, int degree) {
    check_degree(degree);
    if (level < 0) throw std::invalid_argument("ring level must be nonnegative");
    if (g.n != cm.n)
        throw std::invalid_argument("guide and characteristic ring valence differ");

    auto rho = unsheared_cells(cm);
    SurfaceRing ring;
    ring.level = level;
    ring.degree = degree;
    ring.sectors.resize(g.n);
    parallel_for(g.n, [&](int k) {
        ring.sectors[k] = ring_sector_uniform(g.sectors[k], rho, cm.lambda, level, degree);
    });
    return ring;
}

SurfaceRing build_ring(const Guide& g, const CharMap& cm, int degree,
                       const SurroundingSurface& surround) {
    check_degree(degree);
    if (g.n != cm.n || surround.n != g.n)
        throw std::invalid_argument("guide, characteristic ring, and surrounding surface "
                                    "valences differ");

    auto rho = unsheared_cells(cm);
    SurfaceRing ring;
    ring.level = 0;
    ring.degree = degree;
    ring.sectors.resize(g.n);
    parallel_for(g.n, [&](int k) {
        const auto& sp = surround.sectors[k];
        ring.sectors[k] = ring_sector(g.sectors[k], rho, 1.0, {&sp[0], &sp[1], &sp[2]}, degree);
    });
    return ring;
}

RingTables tabulate(int n, int degree) {
    check_degree(degree);
    const CharMap& cm = char_map(n);
    auto rho = unsheared_cells(cm);

    RingTables t;
    t.n = n;
    t.degree = degree;
    t.restrict_op.resize(36, 36);
    const int rows = (degree + 1) * (degree + 1);
    for (int q = 0; q < 3; ++q) t.patch_op[q].resize(rows, 36);

    parallel_for(36, [&](int c) {
        BBPatch<double> unit(5, 5, 1);
        unit.c(c, 0) = 1.0;
        t.restrict_op.col(c) = restrict(unit, cm.lambda, cm.lambda).c;
        auto patches = ring_sector_uniform(unit, rho, cm.lambda, 1, degree);
        for (int q = 0; q < 3; ++q) t.patch_op[q].col(c) = patches[q].c;
    });
    return t;
}

GuidedSurface build_surface(const CNet& net, const BuildOptions& opt) {
    check_degree(opt.degree);
    if (opt.num_rings < 1) throw std::invalid_argument("need at least one ring");
    if (opt.cap && opt.degree != 6) throw std::invalid_argument("bi-5 cap out of scope");

    GuidedSurface s;
    s.net = net;
    s.degree = opt.degree;
    s.guide = fit_guide(net).guide;
    const CharMap& cm = char_map(net.n);
    SurroundingSurface surround = surrounding_surface(net);

    s.rings.resize(opt.num_rings);
    s.rings[0] = build_ring(s.guide, cm, opt.degree, surround);
    parallel_for(opt.num_rings - 1, [&](int i) {
        s.rings[i + 1] = build_ring(s.guide, cm, i + 1, opt.degree);
    });
    if (opt.cap) s.cap = build_cap(s.guide, s.rings.back(), opt.num_rings);
    return s;
}

}  // namespace gsd
