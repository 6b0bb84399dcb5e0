#pragma once

#include <optional>
#include <vector>

#include "gsd/cap.hpp"
#include "gsd/guide.hpp"
#include "gsd/quadmesh.hpp"
#include "gsd/rings.hpp"

namespace gsd {

struct BuildOptions {
    int degree = 5;
    int num_rings = 6;
    bool cap = false;  // requires degree 6
};

// Multi-patch surface around one extraordinary vertex: contracting rings
// (levels 0..num_rings-1) plus an optional central cap.
struct GuidedSurface {
    CNet net;
    Guide guide;
    int degree = 5;
    std::vector<SurfaceRing> rings;
    std::optional<Cap> cap;
};

GuidedSurface build_surface(const CNet& net, const BuildOptions& opt);

}  // namespace gsd
