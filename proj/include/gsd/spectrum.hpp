#pragma once
// Linear analysis of guide restriction: the map induced on the determining
// labels by De Casteljau restriction of every sector, its spectrum, and
// scalar eigenfunction ring sequences.

#include <vector>

#include "gsd/guide.hpp"
#include "gsd/surface.hpp"

namespace gsd {

// Map on the determining labels (center excluded) induced by restricting
// every sector to [0,a]^2: column j is the re-extracted label set of the
// restricted unit-label guide.  Errors if a restricted guide is not
// reproduced by completion from its own labels.
Eigen::MatrixXd restriction_map(int n, double a);

struct SpectrumCluster {
    int s = 0;          // matched exponent, eigenvalue ~ lambda^s
    double value = 0;   // mean of the cluster
    int count = 0;
    int expected = 0;
};

struct Spectrum {
    int n = 0;
    double lambda = 0;
    std::vector<SpectrumCluster> clusters;  // s = 1..10
    double max_residual = 0;                // worst |M v - mu v| over eigenpairs
    bool ok = false;
};

// Eigen-decompose M and match eigenvalues against {lambda^s, s = 1..10} with
// multiplicities (2, 3, n*, 2n, 3n, 3n, 3n, 3n, 2n, n).
Spectrum verify_spectrum(const Eigen::MatrixXd& M, int n, double lambda);

// Labels free to seed the lambda^s eigenspace; s = 0 is the center.
std::vector<int> eigen_free_labels(int n, int s);

struct EigenRingSequence {
    int n = 0, s = 0, label = 0;
    double lambda = 0;
    std::vector<SurfaceRing> rings;  // scalar-valued, levels 0..L-1
};

// Seed the free label, project onto the lambda^s eigenspace of the
// restriction map, complete the guide, and build L rings of the given degree.
// Consecutive rings scale by lambda^s.
EigenRingSequence eigenring_sequence(int n, int s, int label, int L, int degree = 5);

}  // namespace gsd
