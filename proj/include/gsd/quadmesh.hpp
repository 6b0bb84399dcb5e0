#pragma once

#include "gsd/bbpatch.hpp"

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <map>
#include <vector>

namespace gsd {

// Manifold all-quad mesh with consistent winding.  Interior vertices with
// valence != 4 are extraordinary; validation rejects two extraordinary
// vertices within two edges of each other so every extraordinary vertex has
// a regular 2-ring.
struct QuadMesh {
    Eigen::Matrix<double, Eigen::Dynamic, 3> V;
    std::vector<std::array<int, 4>> F;

    std::vector<std::vector<int>> vert_quads;              // unordered incidence
    std::map<std::pair<int, int>, std::array<int, 2>> edge_quads;  // -1 = open side
    std::vector<int> valence;                              // #incident quads
    std::vector<bool> interior;

    bool is_extraordinary(int v) const { return interior[v] && valence[v] != 4; }
};

QuadMesh make_quad_mesh(Eigen::Matrix<double, Eigen::Dynamic, 3> V,
                        std::vector<std::array<int, 4>> F);
QuadMesh load_quad_mesh(std::istream& in);

// Two-ring control net around one extraordinary vertex.  Sector k's u-ray is
// shared with sector k+1 (storage row (j,0) of sector k equals row (0,j) of
// sector k+1); going from the u-ray to the v-ray crosses the sector quad
// counterclockwise on the surface.
//
// values layout: row 0 = center; sector k occupies rows 1+6k .. 6+6k in the
// order (1,0), (2,0), (1,1), (2,1), (1,2), (2,2).
struct CNet {
    int n = 0;
    int center = -1;
    Eigen::Matrix<double, Eigen::Dynamic, 3> values;
    std::vector<int> sector_quads;  // 1-ring quad of each sector
    const QuadMesh* mesh = nullptr;
};

// Structured index into the CNet layout; (0,j) resolves through the shared
// ray of sector k-1.
int cnet_node(int n, int k, int i, int j);

std::vector<CNet> extract_cnets(const QuadMesh& mesh);

// Limit position of the subdivision surface at the center of a c-net.
Eigen::RowVector3d limit_position(const CNet& net);

// One cubic B-spline segment to Bezier: controls (P-1,P0,P1,P2) ->
// coefficients of the segment over [knot(P0), knot(P1)].
template <class S>
void bspline_segment_to_bezier(const Eigen::Matrix<S, 4, Eigen::Dynamic>& P,
                               Eigen::Matrix<S, 4, Eigen::Dynamic>& B) {
    B.resize(4, P.cols());
    B.row(0) = (P.row(0) + S(4) * P.row(1) + P.row(2)) / S(6);
    B.row(1) = (S(2) * P.row(1) + P.row(2)) / S(3);
    B.row(2) = (P.row(1) + S(2) * P.row(2)) / S(3);
    B.row(3) = (P.row(1) + S(4) * P.row(2) + P.row(3)) / S(6);
}

struct RegularSurface {
    std::vector<BBPatch<double>> patches;
    std::vector<int> quads;    // source quad of each patch
    std::vector<int> skipped;  // quads without a full regular stencil
};

// Bi-3 patches for every quad whose four corners are regular and whose 4x4
// control stencil is complete.
RegularSurface regular_to_bspline(const QuadMesh& mesh);

// The three bi-3 patches of the second ring around the hole, per sector, in
// sub-quad order: next to the k/k+1 boundary, diagonal, next to the k/k-1
// boundary.  Local (a,b) axes follow the sector's (u,v) axes.
struct SurroundingSurface {
    int n = 0;
    std::vector<std::array<BBPatch<double>, 3>> sectors;
};

SurroundingSurface surrounding_surface(const CNet& net);

}  // namespace gsd
