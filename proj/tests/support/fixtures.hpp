#pragma once

#include "gsd/quadmesh.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

namespace fixtures {

// Structured "spider" around one valence-n vertex: per sector a grid
// (i,j) in [0..R]^2, column (0,j) shared with the previous sector.  Vertex
// ownership: center plus each sector's i >= 1 block.
inline int spider_vid(int n, int R, int k, int i, int j) {
    k = ((k % n) + n) % n;
    if (i == 0 && j == 0) return 0;
    if (i == 0) return spider_vid(n, R, k - 1, j, 0);
    return 1 + k * R * (R + 1) + (i - 1) * (R + 1) + j;
}

// Plane chart position: sector k spans rays at angles -k*theta -/+ theta/2,
// u axis on the ray shared with sector k+1.
inline Eigen::RowVector2d spider_plane(int n, int k, int i, int j) {
    const double th = 2.0 * std::numbers::pi / n;
    const double au = -k * th - th / 2, av = au + th;
    return i * Eigen::RowVector2d(std::cos(au), std::sin(au)) +
           j * Eigen::RowVector2d(std::cos(av), std::sin(av));
}

inline gsd::QuadMesh make_spider_mesh(
    int n, int R = 3,
    const std::function<Eigen::RowVector3d(int, int, int)>& pos = nullptr) {
    const int nv = 1 + n * R * (R + 1);
    Eigen::Matrix<double, Eigen::Dynamic, 3> V(nv, 3);
    for (int k = 0; k < n; ++k)
        for (int i = (k == 0 ? 0 : 1); i <= R; ++i)
            for (int j = 0; j <= R; ++j) {
                if (i == 0 && j > 0) continue;
                int id = spider_vid(n, R, k, i, j);
                if (pos) {
                    V.row(id) = pos(k, i, j);
                } else {
                    Eigen::RowVector2d p = spider_plane(n, k, i, j);
                    V.row(id) << p(0), p(1), 0.0;
                }
            }
    std::vector<std::array<int, 4>> F;
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < R; ++a)
            for (int b = 0; b < R; ++b)
                F.push_back({spider_vid(n, R, k, a, b), spider_vid(n, R, k, a + 1, b),
                             spider_vid(n, R, k, a + 1, b + 1), spider_vid(n, R, k, a, b + 1)});
    return gsd::make_quad_mesh(std::move(V), std::move(F));
}

// Spider with a height field for non-planar tests.
inline gsd::QuadMesh make_spider_bump(int n, int R = 3, double amp = 0.35) {
    return make_spider_mesh(n, R, [&](int k, int i, int j) {
        Eigen::RowVector2d p = fixtures::spider_plane(n, k, i, j);
        double z = amp * std::exp(-0.35 * p.squaredNorm());
        return Eigen::RowVector3d(p(0), p(1), z);
    });
}

inline gsd::QuadMesh make_grid_mesh(int nx, int ny,
                                    const std::function<double(double, double)>& fz = nullptr) {
    Eigen::Matrix<double, Eigen::Dynamic, 3> V(nx * ny, 3);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            V.row(i * ny + j) << i, j, fz ? fz(i, j) : 0.0;
    std::vector<std::array<int, 4>> F;
    for (int i = 0; i + 1 < nx; ++i)
        for (int j = 0; j + 1 < ny; ++j)
            F.push_back({i * ny + j, (i + 1) * ny + j, (i + 1) * ny + j + 1, i * ny + j + 1});
    return gsd::make_quad_mesh(std::move(V), std::move(F));
}

inline std::string mesh_to_obj(const gsd::QuadMesh& m) {
    std::ostringstream os;
    os.precision(17);
    for (int v = 0; v < m.V.rows(); ++v)
        os << "v " << m.V(v, 0) << " " << m.V(v, 1) << " " << m.V(v, 2) << "\n";
    for (const auto& f : m.F)
        os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << " " << f[3] + 1 << "\n";
    return os.str();
}

inline std::string cube_obj() {
    return "v -1 -1 -1\nv 1 -1 -1\nv 1 1 -1\nv -1 1 -1\n"
           "v -1 -1 1\nv 1 -1 1\nv 1 1 1\nv -1 1 1\n"
           "f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n";
}

// Direct uniform bicubic B-spline evaluation over an integer-parameter
// control grid; (x,y) must lie in a cell with a full stencil.
inline Eigen::RowVector3d bspline_eval(const Eigen::Matrix<double, Eigen::Dynamic, 3>& P, int ny,
                                       double x, double y) {
    auto basis = [](double t, double N[4]) {
        N[0] = (1 - t) * (1 - t) * (1 - t) / 6;
        N[1] = (3 * t * t * t - 6 * t * t + 4) / 6;
        N[2] = (-3 * t * t * t + 3 * t * t + 3 * t + 1) / 6;
        N[3] = t * t * t / 6;
    };
    int cx = static_cast<int>(std::floor(x)), cy = static_cast<int>(std::floor(y));
    double Nx[4], Ny[4];
    basis(x - cx, Nx);
    basis(y - cy, Ny);
    Eigen::RowVector3d r = Eigen::RowVector3d::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r += Nx[i] * Ny[j] * P.row((cx - 1 + i) * ny + (cy - 1 + j));
    return r;
}

}  // namespace fixtures
