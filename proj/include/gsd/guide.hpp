#pragma once
// Piecewise bi-5 guide around an extraordinary vertex: one patch per sector,
// curvature continuous across the sector rays.  A small set of determining
// labels parameterizes all such guides; everything else follows by explicit
// resolution formulas.

#include <vector>

#include "gsd/bbpatch.hpp"
#include "gsd/quadmesh.hpp"

namespace gsd {

struct Guide {
    int n = 0;
    std::vector<BBPatch<double>> sectors;  // bi-5, one column per dimension
};

// n, or n+1 at the two resonant valences (3 and 6) where the ray-coupling
// system gains a rank deficiency and hence one extra label.
int n_star(int n);

// Number of determining labels excluding the center value.
int guide_label_count(int n);

// Atom (sector, i, j) carrying each label; entry 0 is the center.
struct GuideAtom {
    int k, i, j;
};
const std::vector<GuideAtom>& guide_atoms(int n);

// Build the curvature-continuous guide from its labels
// ((1 + guide_label_count(n)) rows, one column per dimension).
Guide complete_guide(int n, const Eigen::MatrixXd& labels);

// Read the determining labels back off a guide.
Eigen::MatrixXd extract_labels(const Guide& g);

// Each sector restricted to [0,a]^2.
Guide guide_restrict(const Guide& g, double a);

struct GuideFit {
    Guide guide;
    double condition = 0;  // of the least-squares design matrix
};

// Least-squares guide for a c-net: the center is pinned to the subdivision
// limit point; the labels fit the patches of one and two Catmull-Clark steps
// on the matching dyadic sub-quads of each sector.
GuideFit fit_guide(const CNet& net);

}  // namespace gsd
