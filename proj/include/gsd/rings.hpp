#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "gsd/bbpatch.hpp"
#include "gsd/charmap.hpp"
#include "gsd/guide.hpp"
#include "gsd/quadmesh.hpp"

namespace gsd {

// One contracting surface ring: three bi-5 or bi-6 patches per sector laid
// out like SurroundingSurface (next to the k/k+1 boundary, diagonal, next to
// the k/k-1 boundary).  Ring l covers the annulus between the lambda^l and
// lambda^(l+1) images of the characteristic ring.
struct SurfaceRing {
    int level = 0;
    int degree = 5;
    std::vector<std::array<BBPatch<double>, 3>> sectors;

    // True where the corner block of patch q carries fresh guide samples;
    // false at the outer corners whose data extends the coarser neighbor.
    static bool corner_sampled(int q, Corner c);
};

// Ring l from the guide alone; the outer corner blocks continue the patches
// the same sampling produces at level l-1.  Valid for every l >= 0.
SurfaceRing build_ring(const Guide& g, const CharMap& cm, int level, int degree);

// Ring 0 whose outer corner blocks are instead prolonged from the
// surrounding bi-3 surface, so the first ring joins it C2.
SurfaceRing build_ring(const Guide& g, const CharMap& cm, int degree,
                       const SurroundingSurface& surround);

// Precomputed linear maps from one sector's 36 guide coefficients to its
// three ring patches: ring(l) patch q = patch_op[q] * restrict_op^(l-1) *
// coefficients for l >= 1.
struct RingTables {
    int n = 0;
    int degree = 5;
    Eigen::MatrixXd restrict_op;              // 36 x 36, de Casteljau to [0,lambda]^2
    std::array<Eigen::MatrixXd, 3> patch_op;  // (degree+1)^2 x 36 each
};

RingTables tabulate(int n, int degree);

}  // namespace gsd
