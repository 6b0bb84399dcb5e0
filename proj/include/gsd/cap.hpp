#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gsd/bbpatch.hpp"
#include "gsd/guide.hpp"
#include "gsd/rings.hpp"

namespace gsd {

// Planar reparameterization used to sample the guide for the cap: one bi-6
// piece per sector, rotationally symmetric and mirror-symmetric across the
// sector bisectrix, whose outer two coefficient layers continue the
// characteristic ring C1.  The interior is fixed by minimizing a fifth-
// derivative energy over the remaining free parameters.
struct SigmaHat {
    int n = 0;
    std::vector<BBPatch<double>> sectors;  // dim 2, bi-6
    Eigen::VectorXd params;                // minimizing free parameters
    double condition = 0;                  // of the energy normal system
};

SigmaHat build_sigma_hat(int n);

// Cached per valence; thread-safe.
const SigmaHat& sigma_hat(int n);

// In-place resolution of the tangent-plane constraints along the interior
// sector boundaries of a cap candidate: reads the free coefficients (center,
// two seed tangents, the [1][1] block, rows 2..3 of each sector's own
// boundary band, and the outer bands) and overwrites the dependent boundary
// rows plus the mirrored band entries of the next sector.
void solve_cap_g1(int n, std::vector<BBPatch<double>>& sectors);

// n bi-6 patches filling the central hole left after the last ring, joined
// C1 to it and curvature continuous at the shared center.
struct Cap {
    int n = 0;
    std::vector<BBPatch<double>> sectors;  // dim 3, bi-6
    Eigen::RowVector3d center;
    // Least-squares band coefficients per boundary (rows: the two interior
    // band entries on each side), recorded for inspection.
    std::vector<Eigen::Matrix<double, 4, Eigen::Dynamic>> boundary_fit;
};

// last_ring must be the level L-1 bi-6 ring of the same guide.
Cap build_cap(const Guide& g, const SurfaceRing& last_ring, int L);

}  // namespace gsd
