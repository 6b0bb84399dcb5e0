#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "gsd/bbpatch.hpp"
#include "gsd/surface.hpp"

namespace gsd {

// One line of a family of parallel light lines; highlight lines are the zero
// set of the signed distance between it and the surface-normal line.
struct LightLine {
    Eigen::Vector3d point{0, 0, 0};
    Eigen::Vector3d dir{1, 0, 0};
};

struct CurvatureSample {
    Eigen::Vector3d position;
    Eigen::Vector3d normal;  // unit
    double K = 0;            // Gauss
    double H = 0;            // mean, with respect to the stored normal
};

// Fundamental forms from exact patch derivatives.  Throws when the tangent
// plane degenerates (|du x dv| <= 1e-12).
CurvatureSample curvature(const BBPatch<double>& p, double u, double v);

// Signed distance between the light line and the normal line at (u,v).
// Throws when the normal is parallel to the light direction.
double highlight_field(const BBPatch<double>& p, const LightLine& light, double u, double v);

struct QualitySample {
    double u = 0, v = 0;
    Eigen::Vector3d position;
    Eigen::Vector3d normal;
    double K = 0, H = 0;
    double h = 0;  // NaN where the light line degenerates
};

struct QualityField {
    int res = 0;
    std::vector<QualitySample> samples;  // (res+1)^2, row-major in u
};

QualityField sample_quality(const BBPatch<double>& p, int res, const LightLine& light);

// Fixed column order: u,v,x,y,z,nx,ny,nz,K,H,h.
void write_quality_csv(std::ostream& os, const std::vector<QualityField>& fields);

// Ring patches in (level, sector, piece) order, then cap sectors.
std::vector<const BBPatch<double>*> surface_patches(const GuidedSurface& s);

// Sampled quad mesh; may contain hanging vertices where patch sizes differ.
struct TessMesh {
    Eigen::Matrix<double, Eigen::Dynamic, 3> V;
    std::vector<std::array<int, 4>> F;
};

// (res+1)^2 grid per patch; samples closer than 1e-9 are merged so shared
// patch boundaries are emitted once.
TessMesh tessellate_patches(const std::vector<const BBPatch<double>*>& patches, int res);
TessMesh tessellate(const GuidedSurface& s, int res);

// Worst-case smoothness residuals.  Requires a surface built in this process:
// the control net and guide must be populated, not just the patch data.
struct SurfaceReport {
    double guide_g2 = 0;     // cross-ray relations of the guide sectors
    double ring_c2 = 0;      // second-order jet gaps across every ring seam
    double surround_c2 = 0;  // first ring against the surrounding bi-3 ring
    double cap_g1 = 0;       // weighted tangent relation inside the cap
    double cap_rim_c1 = 0;   // position/normal gap between cap and last ring
};

SurfaceReport check_surface(const GuidedSurface& s);

}  // namespace gsd
