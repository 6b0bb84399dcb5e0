#include "gsd/quality.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "gsd/parallel.hpp"

namespace gsd {

namespace {

// Zero-padded past the patch degrees, so low-degree patches still have
// well-defined fundamental forms.
Eigen::Vector3d deriv(const BBPatch<double>& p, double u, double v, int a, int b) {
    if (a > p.du || b > p.dv) return Eigen::Vector3d::Zero();
    return eval(p, u, v, a, b).transpose();
}

}  // namespace

CurvatureSample curvature(const BBPatch<double>& p, double u, double v) {
    if (p.dim() != 3) throw std::invalid_argument("curvature: patch must be 3-dimensional");
    const Eigen::Vector3d Su = deriv(p, u, v, 1, 0), Sv = deriv(p, u, v, 0, 1);
    const Eigen::Vector3d Nr = Su.cross(Sv);
    const double nn = Nr.norm();
    if (nn <= 1e-12) throw std::runtime_error("curvature: degenerate tangent plane");

    CurvatureSample out;
    out.position = deriv(p, u, v, 0, 0);
    out.normal = Nr / nn;
    const double E = Su.dot(Su), F = Su.dot(Sv), G = Sv.dot(Sv);
    const double L = deriv(p, u, v, 2, 0).dot(out.normal);
    const double M = deriv(p, u, v, 1, 1).dot(out.normal);
    const double N = deriv(p, u, v, 0, 2).dot(out.normal);
    const double den = E * G - F * F;
    out.K = (L * N - M * M) / den;
    out.H = (E * N - 2 * F * M + G * L) / (2 * den);
    return out;
}

double highlight_field(const BBPatch<double>& p, const LightLine& light, double u, double v) {
    CurvatureSample s = curvature(p, u, v);
    const Eigen::Vector3d cr = light.dir.cross(s.normal);
    if (cr.norm() <= 1e-12 * light.dir.norm())
        throw std::runtime_error("highlight: normal parallel to the light direction");
    Eigen::Matrix3d D;
    D.col(0) = light.dir;
    D.col(1) = s.normal;
    D.col(2) = s.position - light.point;
    return D.determinant() / cr.norm();
}

QualityField sample_quality(const BBPatch<double>& p, int res, const LightLine& light) {
    if (res < 1) throw std::invalid_argument("sample_quality: res must be at least 1");
    QualityField f;
    f.res = res;
    f.samples.resize((res + 1) * (res + 1));
    for (int i = 0; i <= res; ++i)
        for (int j = 0; j <= res; ++j) {
            QualitySample& q = f.samples[i * (res + 1) + j];
            q.u = double(i) / res;
            q.v = double(j) / res;
            CurvatureSample c = curvature(p, q.u, q.v);
            q.position = c.position;
            q.normal = c.normal;
            q.K = c.K;
            q.H = c.H;
            try {
                q.h = highlight_field(p, light, q.u, q.v);
            } catch (const std::runtime_error&) {
                q.h = std::numeric_limits<double>::quiet_NaN();
            }
        }
    return f;
}

void write_quality_csv(std::ostream& os, const std::vector<QualityField>& fields) {
    os << "u,v,x,y,z,nx,ny,nz,K,H,h\n";
    os.precision(17);
    for (const auto& f : fields)
        for (const auto& q : f.samples) {
            os << q.u << ',' << q.v << ',' << q.position(0) << ',' << q.position(1) << ','
               << q.position(2) << ',' << q.normal(0) << ',' << q.normal(1) << ',' << q.normal(2)
               << ',' << q.K << ',' << q.H << ',' << q.h << '\n';
        }
}

std::vector<const BBPatch<double>*> surface_patches(const GuidedSurface& s) {
    std::vector<const BBPatch<double>*> out;
    for (const auto& r : s.rings)
        for (const auto& sec : r.sectors)
            for (const auto& p : sec) out.push_back(&p);
    if (s.cap)
        for (const auto& p : s.cap->sectors) out.push_back(&p);
    return out;
}

TessMesh tessellate_patches(const std::vector<const BBPatch<double>*>& patches, int res) {
    if (res < 1) throw std::invalid_argument("tessellate: res must be at least 1");
    const double tol = 1e-9;

    // Sample grids in parallel, then weld serially: a vertex is reused when a
    // previous one lies within tol, found through the 27 neighboring boxes of
    // its quantized position.
    std::vector<Eigen::MatrixXd> grids(patches.size());
    parallel_for(patches.size(), [&](size_t pi) {
        Eigen::MatrixXd G((res + 1) * (res + 1), 3);
        for (int i = 0; i <= res; ++i)
            for (int j = 0; j <= res; ++j)
                G.row(i * (res + 1) + j) =
                    eval(*patches[pi], double(i) / res, double(j) / res, 0, 0);
        grids[pi] = std::move(G);
    });

    TessMesh m;
    std::map<std::array<std::int64_t, 3>, int> boxes;
    std::vector<Eigen::RowVector3d> verts;
    auto weld = [&](const Eigen::RowVector3d& p) {
        std::array<std::int64_t, 3> key{std::llround(p(0) / tol), std::llround(p(1) / tol),
                                        std::llround(p(2) / tol)};
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    auto it = boxes.find({key[0] + dx, key[1] + dy, key[2] + dz});
                    if (it != boxes.end() && (verts[it->second] - p).norm() <= tol)
                        return it->second;
                }
        int id = static_cast<int>(verts.size());
        verts.push_back(p);
        boxes.emplace(key, id);
        return id;
    };

    std::vector<int> ids((res + 1) * (res + 1));
    for (size_t pi = 0; pi < patches.size(); ++pi) {
        for (int s = 0; s < (res + 1) * (res + 1); ++s) ids[s] = weld(grids[pi].row(s));
        for (int i = 0; i < res; ++i)
            for (int j = 0; j < res; ++j)
                m.F.push_back({ids[i * (res + 1) + j], ids[(i + 1) * (res + 1) + j],
                               ids[(i + 1) * (res + 1) + j + 1], ids[i * (res + 1) + j + 1]});
    }
    m.V.resize(verts.size(), 3);
    for (size_t i = 0; i < verts.size(); ++i) m.V.row(i) = verts[i];
    return m;
}

TessMesh tessellate(const GuidedSurface& s, int res) {
    return tessellate_patches(surface_patches(s), res);
}

namespace {

constexpr double pi = 3.14159265358979323846;

Eigen::Matrix2d rot(double a) {
    Eigen::Matrix2d R;
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return R;
}

// Univariate Bernstein degree raise of stacked coefficient rows.
Eigen::MatrixXd raise_rows(const Eigen::MatrixXd& a) {
    const int d = static_cast<int>(a.rows()) - 1;
    Eigen::MatrixXd out(d + 2, a.cols());
    out.row(0) = a.row(0);
    out.row(d + 1) = a.row(d);
    for (int i = 1; i <= d; ++i)
        out.row(i) =
            (double(i) / (d + 1)) * a.row(i - 1) + (1.0 - double(i) / (d + 1)) * a.row(i);
    return out;
}

// Coefficientwise residual of the two cross-ray relations on every shared ray
// of the guide.
double guide_g2_residual(const Guide& g) {
    const int n = g.n;
    const double c = std::cos(2 * pi / n);
    const int D = g.sectors[0].dim();
    double worst = 0;
    for (int k = 0; k < n; ++k) {
        const auto& F = g.sectors[k];
        const auto& G = g.sectors[(k + 1) % n];
        Eigen::MatrixXd S1(6, D), T1(6, D), S2(6, D), T2(6, D), U1(5, D), M2(5, D), U2(4, D);
        for (int i = 0; i < 6; ++i) {
            S1.row(i) = 5 * (F.at(i, 1) - F.at(i, 0));
            T1.row(i) = 5 * (G.at(1, i) - G.at(0, i));
            S2.row(i) = 20 * (F.at(i, 2) - 2 * F.at(i, 1) + F.at(i, 0));
            T2.row(i) = 20 * (G.at(2, i) - 2 * G.at(1, i) + G.at(0, i));
        }
        for (int i = 0; i < 5; ++i) {
            U1.row(i) = 5 * (F.at(i + 1, 0) - F.at(i, 0));
            M2.row(i) = 25 * (F.at(i + 1, 1) - F.at(i, 1) - F.at(i + 1, 0) + F.at(i, 0));
        }
        for (int i = 0; i < 4; ++i)
            U2.row(i) = 20 * (F.at(i + 2, 0) - 2 * F.at(i + 1, 0) + F.at(i, 0));
        worst = std::max(worst, (T1 + S1 - 2 * c * raise_rows(U1)).cwiseAbs().maxCoeff());
        worst = std::max(
            worst, (T2 - S2 + 4 * c * raise_rows(M2) - 4 * c * c * raise_rows(raise_rows(U2)))
                       .cwiseAbs()
                       .maxCoeff());
    }
    return worst;
}

// Second-order jet of S in the plane coordinates of its chart C at (u,v).
Eigen::Matrix<double, 6, Eigen::Dynamic> plane_jet(const BBPatch<double>& S,
                                                   const BBPatch<double>& C, double u,
                                                   double v) {
    auto cd = [&](int a, int b) { return eval(C, u, v, a, b); };
    const Eigen::RowVector2d xu = cd(1, 0), xv = cd(0, 1);
    const Eigen::RowVector2d xuu = cd(2, 0), xuv = cd(1, 1), xvv = cd(0, 2);

    Eigen::Matrix<double, 6, Eigen::Dynamic> rows(6, S.dim());
    rows.row(0) = eval(S, u, v, 0, 0);

    Eigen::Matrix2d J;
    J << xu(0), xu(1), xv(0), xv(1);
    Eigen::Matrix<double, 2, Eigen::Dynamic> g1(2, S.dim());
    g1.row(0) = eval(S, u, v, 1, 0);
    g1.row(1) = eval(S, u, v, 0, 1);
    Eigen::Matrix<double, 2, Eigen::Dynamic> Sxy = J.partialPivLu().solve(g1);
    rows.row(1) = Sxy.row(0);
    rows.row(2) = Sxy.row(1);

    Eigen::Matrix3d Q;
    Q << xu(0) * xu(0), 2 * xu(0) * xu(1), xu(1) * xu(1),
         xu(0) * xv(0), xu(0) * xv(1) + xv(0) * xu(1), xu(1) * xv(1),
         xv(0) * xv(0), 2 * xv(0) * xv(1), xv(1) * xv(1);
    Eigen::Matrix<double, 3, Eigen::Dynamic> r2(3, S.dim());
    r2.row(0) = eval(S, u, v, 2, 0) - xuu(0) * Sxy.row(0) - xuu(1) * Sxy.row(1);
    r2.row(1) = eval(S, u, v, 1, 1) - xuv(0) * Sxy.row(0) - xuv(1) * Sxy.row(1);
    r2.row(2) = eval(S, u, v, 0, 2) - xvv(0) * Sxy.row(0) - xvv(1) * Sxy.row(1);
    Eigen::Matrix<double, 3, Eigen::Dynamic> Sxx = Q.partialPivLu().solve(r2);
    rows.row(3) = Sxx.row(0);
    rows.row(4) = Sxx.row(1);
    rows.row(5) = Sxx.row(2);
    return rows;
}

double jet_gap(const BBPatch<double>& Sa, const BBPatch<double>& Ca, double ua, double va,
               const BBPatch<double>& Sb, const BBPatch<double>& Cb, double ub, double vb) {
    auto A = plane_jet(Sa, Ca, ua, va);
    auto B = plane_jet(Sb, Cb, ub, vb);
    double worst = 0;
    for (int r = 0; r < 6; ++r)
        worst = std::max(worst,
                         (A.row(r) - B.row(r)).norm() / (1.0 + A.row(r).norm()));
    return worst;
}

BBPatch<double> level_chart(const CharMap& cm, int k, int level, int q) {
    BBPatch<double> c = apply_frame(rot(-k * 2 * pi / cm.n), cm.chi[q]);
    c.c *= std::pow(cm.lambda, level);
    return c;
}

}  // namespace

SurfaceReport check_surface(const GuidedSurface& s) {
    if (s.guide.n < 3 || s.guide.sectors.empty())
        throw std::invalid_argument("check_surface: surface carries no guide");
    const int n = s.guide.n;
    const CharMap& cm = char_map(n);
    const std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};

    SurfaceReport rep;
    rep.guide_g2 = guide_g2_residual(s.guide);

    for (const auto& ring : s.rings) {
        const int l = ring.level;
        for (int k = 0; k < n; ++k) {
            const auto& sec = ring.sectors[k];
            BBPatch<double> c0 = level_chart(cm, k, l, 0);
            BBPatch<double> c1 = level_chart(cm, k, l, 1);
            BBPatch<double> c2 = level_chart(cm, k, l, 2);
            BBPatch<double> cn = level_chart(cm, (k + 1) % n, l, 2);
            const auto& next = ring.sectors[(k + 1) % n];
            for (double t : ts) {
                rep.ring_c2 = std::max(rep.ring_c2,
                                       jet_gap(sec[0], c0, t, 1, sec[1], c1, t, 0));
                rep.ring_c2 = std::max(rep.ring_c2,
                                       jet_gap(sec[1], c1, 0, t, sec[2], c2, 1, t));
                rep.ring_c2 = std::max(rep.ring_c2,
                                       jet_gap(sec[0], c0, t, 0, next[2], cn, 0, t));
            }
            if (l > 0) {
                const auto& coarse = s.rings[l - 1].sectors[k];
                BBPatch<double> d0 = level_chart(cm, k, l - 1, 0);
                BBPatch<double> d2 = level_chart(cm, k, l - 1, 2);
                for (double t : ts) {
                    rep.ring_c2 = std::max(
                        rep.ring_c2, jet_gap(sec[0], c0, 1, t, coarse[0], d0, 0, t / 2));
                    rep.ring_c2 = std::max(
                        rep.ring_c2,
                        jet_gap(sec[1], c1, 1, t, coarse[0], d0, 0, (1 + t) / 2));
                    rep.ring_c2 = std::max(
                        rep.ring_c2,
                        jet_gap(sec[1], c1, t, 1, coarse[2], d2, (1 + t) / 2, 0));
                    rep.ring_c2 = std::max(
                        rep.ring_c2, jet_gap(sec[2], c2, t, 1, coarse[2], d2, t / 2, 0));
                }
            }
        }
    }

    if (!s.rings.empty() && s.net.n == n && s.net.mesh) {
        SurroundingSurface surround = surrounding_surface(s.net);
        for (int k = 0; k < n; ++k) {
            const auto& sec = s.rings[0].sectors[k];
            const auto& o = surround.sectors[k];
            BBPatch<double> c0 = level_chart(cm, k, 0, 0);
            BBPatch<double> c1 = level_chart(cm, k, 0, 1);
            BBPatch<double> c2 = level_chart(cm, k, 0, 2);
            BBPatch<double> d0 = apply_frame(rot(-k * 2 * pi / n), cm.chi_tilde[0]);
            BBPatch<double> d2 = apply_frame(rot(-k * 2 * pi / n), cm.chi_tilde[2]);
            for (double t : ts) {
                rep.surround_c2 = std::max(rep.surround_c2,
                                           jet_gap(sec[0], c0, 1, t, o[0], d0, 0, t / 2));
                rep.surround_c2 = std::max(
                    rep.surround_c2, jet_gap(sec[1], c1, 1, t, o[0], d0, 0, (1 + t) / 2));
                rep.surround_c2 = std::max(
                    rep.surround_c2, jet_gap(sec[1], c1, t, 1, o[2], d2, (1 + t) / 2, 0));
                rep.surround_c2 = std::max(rep.surround_c2,
                                           jet_gap(sec[2], c2, t, 1, o[2], d2, t / 2, 0));
            }
        }
    }

    if (s.cap) {
        const double c = std::cos(2 * pi / n);
        double scale = 0;
        for (const auto& p : s.cap->sectors)
            scale = std::max(scale, p.c.cwiseAbs().maxCoeff());
        for (int k = 0; k < n; ++k) {
            const auto& a = s.cap->sectors[k];
            const auto& b = s.cap->sectors[(k + 1) % n];
            for (double t : ts) {
                Eigen::RowVectorXd r = eval(a, t, 0.0, 0, 1) + eval(b, 0.0, t, 1, 0) -
                                       2 * c * (1 - t) * (1 - t) * eval(a, t, 0.0, 1, 0);
                rep.cap_g1 = std::max(rep.cap_g1, r.norm() / (1.0 + scale));
            }
            // rim: position and unit normal against the last ring
            const auto& ring = s.rings.back().sectors[k];
            for (double t : ts) {
                CurvatureSample qa = curvature(a, 1.0, t);
                CurvatureSample q0 = curvature(ring[0], 0.0, t);
                rep.cap_rim_c1 =
                    std::max(rep.cap_rim_c1, (qa.position - q0.position).norm() / (1.0 + scale));
                rep.cap_rim_c1 =
                    std::max(rep.cap_rim_c1, (qa.normal - q0.normal).norm());
                CurvatureSample qb = curvature(a, t, 1.0);
                CurvatureSample q2 = curvature(ring[2], t, 0.0);
                rep.cap_rim_c1 =
                    std::max(rep.cap_rim_c1, (qb.position - q2.position).norm() / (1.0 + scale));
                rep.cap_rim_c1 =
                    std::max(rep.cap_rim_c1, (qb.normal - q2.normal).norm());
            }
        }
    }
    return rep;
}

}  // namespace gsd

