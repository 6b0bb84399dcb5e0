#include "gsd/quadmesh.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gsd {
namespace {

std::pair<int, int> ekey(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

int corner_pos(const std::array<int, 4>& q, int v) {
    for (int i = 0; i < 4; ++i)
        if (q[i] == v) return i;
    return -1;
}

int across(const QuadMesh& m, int f, int a, int b) {
    auto it = m.edge_quads.find(ekey(a, b));
    if (it == m.edge_quads.end()) return -1;
    if (it->second[0] == f) return it->second[1];
    if (it->second[1] == f) return it->second[0];
    return -1;
}

// Next quad counterclockwise around interior vertex v (crosses the edge that
// precedes v in f's winding).
int next_ccw(const QuadMesh& m, int f, int v) {
    int p = corner_pos(m.F[f], v);
    return across(m, f, v, m.F[f][(p + 3) % 4]);
}

// Face that traverses the directed edge a -> b in its winding.
int face_traversing(const QuadMesh& m, int a, int b) {
    auto it = m.edge_quads.find(ekey(a, b));
    if (it == m.edge_quads.end()) return -1;
    for (int f : {it->second[0], it->second[1]}) {
        if (f < 0) continue;
        int p = corner_pos(m.F[f], a);
        if (p >= 0 && m.F[f][(p + 1) % 4] == b) return f;
    }
    return -1;
}

// Quad across the edge x -> y of f, plus its two far corners in winding
// order starting from y (the neighbor traverses y -> x, then far2, far3).
struct Side {
    int f = -1, far2 = -1, far3 = -1;
};

Side side_read(const QuadMesh& m, int f, int x, int y) {
    Side s;
    s.f = across(m, f, x, y);
    if (s.f < 0) return s;
    int p = corner_pos(m.F[s.f], y);
    s.far2 = m.F[s.f][(p + 2) % 4];
    s.far3 = m.F[s.f][(p + 3) % 4];
    return s;
}

// 4x4 B-spline stencil of the cell (c00,c10,c11,c01); g[1+x][1+y] holds the
// grid neighbor (x,y) in the cell's frame.  The four corners must be regular
// interior so the eight surrounding quads form a grid; stencil entries
// themselves may be boundary or extraordinary vertices.
bool quad_stencil(const QuadMesh& m, const std::array<int, 4>& cell, int g[4][4]) {
    for (int v : cell)
        if (!m.interior[v] || m.valence[v] != 4) return false;
    const int f = face_traversing(m, cell[0], cell[1]);
    if (f < 0) return false;
    g[1][1] = cell[0];
    g[2][1] = cell[1];
    g[2][2] = cell[2];
    g[1][2] = cell[3];

    Side S = side_read(m, f, cell[0], cell[1]);
    Side E = side_read(m, f, cell[1], cell[2]);
    Side N = side_read(m, f, cell[2], cell[3]);
    Side W = side_read(m, f, cell[3], cell[0]);
    if (S.f < 0 || E.f < 0 || N.f < 0 || W.f < 0) return false;
    g[1][0] = S.far2;
    g[2][0] = S.far3;
    g[3][1] = E.far2;
    g[3][2] = E.far3;
    g[2][3] = N.far2;
    g[1][3] = N.far3;
    g[0][2] = W.far2;
    g[0][1] = W.far3;

    Side SW = side_read(m, S.f, cell[0], S.far2);
    Side SE = side_read(m, S.f, S.far3, cell[1]);
    Side NW = side_read(m, N.f, N.far3, cell[3]);
    Side NE = side_read(m, N.f, cell[2], N.far2);
    if (SW.f < 0 || SE.f < 0 || NW.f < 0 || NE.f < 0) return false;
    g[0][0] = SW.far3;
    g[3][0] = SE.far2;
    g[0][3] = NW.far2;
    g[3][3] = NE.far3;
    // the diagonal reads must agree with the side reads
    return SW.far2 == g[0][1] && SE.far3 == g[3][1] && NW.far3 == g[0][2] &&
           NE.far2 == g[3][2];
}

BBPatch<double> stencil_to_patch(const QuadMesh& m, const int g[4][4]) {
    Eigen::Matrix<double, 4, Eigen::Dynamic> col(4, 3), tmp(4, 3);
    Eigen::Matrix<double, 4, Eigen::Dynamic> half[4];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) col.row(j) = m.V.row(g[i][j]);
        bspline_segment_to_bezier(col, tmp);
        half[i] = tmp;
    }
    BBPatch<double> p(3, 3, 3);
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 4; ++i) col.row(i) = half[i].row(j);
        bspline_segment_to_bezier(col, tmp);
        for (int i = 0; i < 4; ++i) p.at(i, j) = tmp.row(i);
    }
    return p;
}

// The three second-ring quads of one sector, each as (base, a-dir corner,
// diag, b-dir corner) with axes aligned to the sector's (u,v); reads only
// across-quad incidence so a minimal two-ring net works.
struct SectorCells {
    int u1, u2, d1, v1;                 // (1,0) (2,0) (1,1) (0,1)
    int du, dv, dd;                     // (2,1) (1,2) (2,2)
    std::array<std::array<int, 4>, 3> cells;
};

SectorCells sector_cells(const QuadMesh& m, int center, int f) {
    const auto& q = m.F[f];
    const int p = corner_pos(q, center);
    SectorCells s;
    s.u1 = q[(p + 1) % 4];
    s.d1 = q[(p + 2) % 4];
    s.v1 = q[(p + 3) % 4];

    const int qu = across(m, f, s.u1, s.d1);
    const int qv = across(m, f, s.v1, s.d1);
    if (qu < 0 || qv < 0)
        throw std::runtime_error("extraordinary vertex " + std::to_string(center) +
                                 " lacks a full 2-ring");
    {
        const int pu = corner_pos(m.F[qu], s.u1);
        s.u2 = m.F[qu][(pu + 1) % 4];
        s.du = m.F[qu][(pu + 2) % 4];
    }
    {
        const int pv = corner_pos(m.F[qv], s.v1);
        s.dv = m.F[qv][(pv + 2) % 4];
    }
    const int qd = across(m, qu, s.du, s.d1);
    if (qd < 0)
        throw std::runtime_error("extraordinary vertex " + std::to_string(center) +
                                 " lacks a full 2-ring");
    {
        const int pd = corner_pos(m.F[qd], s.d1);
        s.dd = m.F[qd][(pd + 2) % 4];
    }

    s.cells = {{{s.u1, s.u2, s.du, s.d1},    // cell [1,2]x[0,1]
                {s.d1, s.du, s.dd, s.dv},    // cell [1,2]x[1,2]
                {s.v1, s.d1, s.dv, -1}}};    // cell [0,1]x[1,2]; last corner filled below
    {
        const int pv = corner_pos(m.F[qv], s.v1);
        s.cells[2][3] = m.F[qv][(pv + 3) % 4];  // (0,2), shared ray of sector k-1
    }
    return s;
}

}  // namespace

QuadMesh make_quad_mesh(Eigen::Matrix<double, Eigen::Dynamic, 3> V,
                        std::vector<std::array<int, 4>> F) {
    QuadMesh m;
    m.V = std::move(V);
    m.F = std::move(F);
    const int nv = static_cast<int>(m.V.rows());

    m.vert_quads.assign(nv, {});
    for (int f = 0; f < static_cast<int>(m.F.size()); ++f) {
        const auto& q = m.F[f];
        for (int i = 0; i < 4; ++i) {
            if (q[i] < 0 || q[i] >= nv)
                throw std::runtime_error("face " + std::to_string(f) + " references vertex " +
                                         std::to_string(q[i]) + " out of range");
            for (int j = i + 1; j < 4; ++j)
                if (q[i] == q[j])
                    throw std::runtime_error("face " + std::to_string(f) + " repeats vertex " +
                                             std::to_string(q[i]));
            m.vert_quads[q[i]].push_back(f);
        }
    }

    std::map<std::pair<int, int>, int> directed;
    for (int f = 0; f < static_cast<int>(m.F.size()); ++f) {
        const auto& q = m.F[f];
        for (int i = 0; i < 4; ++i) {
            int a = q[i], b = q[(i + 1) % 4];
            auto [it, fresh] = m.edge_quads.try_emplace(ekey(a, b), std::array<int, 2>{f, -1});
            if (!fresh) {
                if (it->second[1] != -1)
                    throw std::runtime_error("non-manifold edge (" + std::to_string(a) + "," +
                                             std::to_string(b) + ")");
                it->second[1] = f;
            }
            if (!directed.try_emplace({a, b}, f).second)
                throw std::runtime_error("inconsistent winding across edge (" +
                                         std::to_string(a) + "," + std::to_string(b) + ")");
        }
    }

    m.valence.assign(nv, 0);
    m.interior.assign(nv, true);
    for (int v = 0; v < nv; ++v) m.valence[v] = static_cast<int>(m.vert_quads[v].size());
    for (const auto& [e, fs] : m.edge_quads)
        if (fs[1] == -1) m.interior[e.first] = m.interior[e.second] = false;

    // No extraordinary vertex within two edges of another.
    for (int ev = 0; ev < nv; ++ev) {
        if (!m.is_extraordinary(ev)) continue;
        std::vector<std::pair<int, int>> frontier = {{ev, 0}};
        std::map<int, int> dist = {{ev, 0}};
        while (!frontier.empty()) {
            auto [v, d] = frontier.back();
            frontier.pop_back();
            if (v != ev && m.is_extraordinary(v) && v < ev)
                throw std::runtime_error("extraordinary vertices " + std::to_string(v) + " and " +
                                         std::to_string(ev) +
                                         " are within two edges of each other");
            if (d == 2) continue;
            for (int f : m.vert_quads[v]) {
                int p = corner_pos(m.F[f], v);
                for (int w : {m.F[f][(p + 1) % 4], m.F[f][(p + 3) % 4]})
                    if (dist.try_emplace(w, d + 1).second) frontier.push_back({w, d + 1});
            }
        }
    }
    return m;
}

QuadMesh load_quad_mesh(std::istream& in) {
    std::vector<Eigen::RowVector3d> verts;
    std::vector<std::array<int, 4>> faces;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Eigen::RowVector3d p;
            if (!(ls >> p(0) >> p(1) >> p(2)))
                throw std::runtime_error("malformed vertex at line " + std::to_string(lineno));
            verts.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                int v = std::stoi(tok.substr(0, tok.find('/')));  // v, v/vt, v//vn forms
                if (v < 0) v = static_cast<int>(verts.size()) + v + 1;
                idx.push_back(v - 1);
            }
            if (idx.size() != 4)
                throw std::runtime_error("non-quad face at line " + std::to_string(lineno) + " (" +
                                         std::to_string(idx.size()) + " vertices)");
            faces.push_back({idx[0], idx[1], idx[2], idx[3]});
        }
    }
    Eigen::Matrix<double, Eigen::Dynamic, 3> V(verts.size(), 3);
    for (size_t i = 0; i < verts.size(); ++i) V.row(i) = verts[i];
    return make_quad_mesh(std::move(V), std::move(faces));
}

int cnet_node(int n, int k, int i, int j) {
    k = ((k % n) + n) % n;
    if (i == 0 && j == 0) return 0;
    if (i == 0) return cnet_node(n, k - 1, j, 0);
    static const int slot[3][3] = {{-1, -1, -1}, {0, 2, 4}, {1, 3, 5}};
    return 1 + 6 * k + slot[i][j];
}

std::vector<CNet> extract_cnets(const QuadMesh& mesh) {
    std::vector<CNet> nets;
    for (int v = 0; v < static_cast<int>(mesh.V.rows()); ++v) {
        if (!mesh.is_extraordinary(v)) continue;
        const int n = mesh.valence[v];

        // Counterclockwise fan; sectors enumerate the fan in reverse so that
        // each sector's u-ray is the edge shared with the next sector.
        std::vector<int> fan(n);
        fan[0] = *std::min_element(mesh.vert_quads[v].begin(), mesh.vert_quads[v].end());
        for (int t = 1; t < n; ++t) {
            fan[t] = next_ccw(mesh, fan[t - 1], v);
            if (fan[t] < 0)
                throw std::runtime_error("extraordinary vertex " + std::to_string(v) +
                                         " lacks a closed quad fan");
        }

        CNet net;
        net.n = n;
        net.center = v;
        net.mesh = &mesh;
        net.values.setZero(6 * n + 1, 3);
        net.values.row(0) = mesh.V.row(v);
        net.sector_quads.resize(n);

        for (int k = 0; k < n; ++k) {
            const int f = fan[(n - k) % n];
            net.sector_quads[k] = f;
            SectorCells s = sector_cells(mesh, v, f);
            if (mesh.is_extraordinary(s.u1) || mesh.is_extraordinary(s.d1))
                throw std::runtime_error("extraordinary vertex " + std::to_string(v) +
                                         " has an extraordinary 1-ring neighbor");
            net.values.row(cnet_node(n, k, 1, 0)) = mesh.V.row(s.u1);
            net.values.row(cnet_node(n, k, 2, 0)) = mesh.V.row(s.u2);
            net.values.row(cnet_node(n, k, 1, 1)) = mesh.V.row(s.d1);
            net.values.row(cnet_node(n, k, 2, 1)) = mesh.V.row(s.du);
            net.values.row(cnet_node(n, k, 1, 2)) = mesh.V.row(s.dv);
            net.values.row(cnet_node(n, k, 2, 2)) = mesh.V.row(s.dd);
        }
        nets.push_back(std::move(net));
    }
    return nets;
}

Eigen::RowVector3d limit_position(const CNet& net) {
    const int n = net.n;
    Eigen::RowVector3d e = Eigen::RowVector3d::Zero(), d = Eigen::RowVector3d::Zero();
    for (int k = 0; k < n; ++k) {
        e += net.values.row(cnet_node(n, k, 1, 0));
        d += net.values.row(cnet_node(n, k, 1, 1));
    }
    return (double(n) * double(n) * net.values.row(0) + 4.0 * e + d) / (double(n) * (n + 5));
}

RegularSurface regular_to_bspline(const QuadMesh& mesh) {
    RegularSurface out;
    for (int f = 0; f < static_cast<int>(mesh.F.size()); ++f) {
        int g[4][4];
        if (!quad_stencil(mesh, mesh.F[f], g)) {
            out.skipped.push_back(f);
            continue;
        }
        out.patches.push_back(stencil_to_patch(mesh, g));
        out.quads.push_back(f);
    }
    return out;
}

SurroundingSurface surrounding_surface(const CNet& net) {
    const QuadMesh& m = *net.mesh;
    SurroundingSurface out;
    out.n = net.n;
    out.sectors.resize(net.n);

    for (int k = 0; k < net.n; ++k) {
        SectorCells s = sector_cells(m, net.center, net.sector_quads[k]);
        for (int c = 0; c < 3; ++c) {
            int g[4][4];
            if (!quad_stencil(m, s.cells[c], g))
                throw std::runtime_error("surrounding surface of vertex " +
                                         std::to_string(net.center) +
                                         " lacks a regular stencil");
            out.sectors[k][c] = stencil_to_patch(m, g);
        }
    }
    return out;
}

}  // namespace gsd
