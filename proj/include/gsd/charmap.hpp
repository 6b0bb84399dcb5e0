#pragma once
// Catmull-Clark machinery around an extraordinary vertex: structured control
// nets, the one-step refinement operator, and the planar characteristic ring
// built from its subdominant eigenvector.

#include <array>

#include "gsd/bbpatch.hpp"

namespace gsd {

// Structured R-ring net around a valence-n vertex: row 0 is the center,
// sector k owns (i,j) with i = 1..R, j = 0..R in slots (i-1) + R*j.  Column
// (0,j) aliases sector k-1's ray (j,0); row (i,-1) continues into sector k+1
// as (1,i) and column (-1,j) into sector k-1 as (j,1).
int net_node(int n, int R, int k, int i, int j);
int net_size(int n, int R);

// One Catmull-Clark step as a matrix: maps an R_in-ring net (R_in = 2 or 3)
// to the half-scale 3-ring net (12n+1 rows).  For R_in = 3 the operator is
// square; refinement only reads the 2-ring portion of its input.
Eigen::MatrixXd refine_matrix(int n, int R_in);

// Rows of refine_matrix(n, 2) that land back on the 2-ring: the classic
// (6n+1)-square subdivision matrix of the invariant neighborhood.
Eigen::MatrixXd subdivision_matrix(int n);

// Subdominant eigenvalue of Catmull-Clark subdivision, closed form.
double char_lambda(int n);

// Frame of sector 0's wedge: columns are the two unit rays bounding it, so
// the unit square's axes map onto the sector's rays.
Eigen::Matrix2d sector_shear(int n);

// Plane position of the half cell covered by ring piece q (0,1,2) at local
// coordinates (u,v): the three pieces tile the L-shape between the unit cell
// and its half-scale copy.
inline Eigen::RowVector2d subquad_embed(int q, double u, double v) {
    switch (q) {
        case 0: return {(1 + u) / 2, v / 2};
        case 1: return {(1 + u) / 2, (1 + v) / 2};
        default: return {u / 2, (1 + v) / 2};
    }
}

// B-spline patch of the full-scale cell (a,b) of sector k of a structured
// R-ring net (one column of `net` per coordinate).
BBPatch<double> net_cell_patch(int n, int R, const Eigen::MatrixXd& net, int k, int a, int b);

// Apply a linear map to every coefficient of a planar patch.
BBPatch<double> apply_frame(const Eigen::Matrix2d& M, const BBPatch<double>& p);

// Characteristic ring of sector 0.  chi holds the three bi-3 pieces over the
// half cells q0 = [1/2,1]x[0,1/2], q1 = [1/2,1]^2, q2 = [0,1/2]x[1/2,1];
// chi_tilde the full-scale cells (1,0), (1,1), (0,1) of the same eigen-net,
// with chi = lambda * chi_tilde coefficient-wise.  Sector k's ring is sector
// 0's rotated by -k*2pi/n.  Normalized so chi[1] maps (1,1) to (1,0) and
// sector_shear(n)^-1 * chi preserves orientation.
struct CharMap {
    int n = 0;
    double lambda = 0;
    std::array<BBPatch<double>, 3> chi;
    std::array<BBPatch<double>, 3> chi_tilde;
    Eigen::Matrix<double, Eigen::Dynamic, 2> net;  // normalized 3-ring eigen-net
};

// Cached per valence; thread-safe.
const CharMap& char_map(int n);

}  // namespace gsd
