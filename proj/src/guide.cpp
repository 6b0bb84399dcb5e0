#include "gsd/guide.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>

#include "gsd/charmap.hpp"

namespace gsd {

namespace {

constexpr double pi = 3.14159265358979323846;

// Atom slots holding the per-sector labels beyond [1][2] and [2][2], in label
// block order.
constexpr int kSectorSlots[16][2] = {
    {4, 0}, {5, 0}, {3, 2}, {4, 2}, {2, 4}, {3, 3}, {5, 2}, {2, 5},
    {3, 4}, {4, 3}, {3, 5}, {4, 4}, {5, 3}, {4, 5}, {5, 4}, {5, 5},
};

bool resonant(int n) { return n == 3 || n == 6; }

}  // namespace

int n_star(int n) { return resonant(n) ? n + 1 : n; }

int guide_label_count(int n) { return 17 * n + n_star(n) + 5; }

const std::vector<GuideAtom>& guide_atoms(int n) {
    static std::map<int, std::vector<GuideAtom>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<GuideAtom> a;
    a.reserve(1 + guide_label_count(n));
    a.push_back({0, 0, 0});
    a.push_back({0, 1, 0});
    a.push_back({0, 0, 1});
    a.push_back({0, 2, 0});
    a.push_back({0, 1, 1});
    a.push_back({0, 0, 2});
    for (int k = 0; k < n; ++k) a.push_back({k, 1, 2});
    if (resonant(n)) a.push_back({0, 2, 1});
    for (int k = 0; k < n; ++k) a.push_back({k, 2, 2});
    for (auto& slot : kSectorSlots)
        for (int k = 0; k < n; ++k) a.push_back({k, slot[0], slot[1]});
    return cache.emplace(n, std::move(a)).first->second;
}

Guide complete_guide(int n, const Eigen::MatrixXd& labels) {
    if (n < 3) throw std::invalid_argument("complete_guide: valence must be at least 3");
    if (n == 4)
        throw std::invalid_argument("complete_guide: valence 4 is regular; no guide is needed");
    if (labels.rows() != 1 + guide_label_count(n))
        throw std::invalid_argument("complete_guide: wrong number of label rows");

    const int D = static_cast<int>(labels.cols());
    const double c = std::cos(2 * pi / n);
    const int m = 6 + n_star(n);

    Guide g;
    g.n = n;
    g.sectors.assign(n, BBPatch<double>(5, 5, D));

    auto at = [&](int k, int i, int j) -> Eigen::MatrixXd::RowXpr {
        return g.sectors[((k % n) + n) % n].c.row(i * 6 + j);
    };
    auto lab = [&](int idx) { return labels.row(idx); };

    for (int k = 0; k < n; ++k) at(k, 0, 0) = lab(0);
    at(0, 1, 0) = lab(1);
    at(0, 0, 1) = lab(2);
    at(0, 2, 0) = lab(3);
    at(0, 1, 1) = lab(4);
    at(0, 0, 2) = lab(5);

    // Propagate the central 2-jet sector to sector.  The loop closes by
    // construction: the data transforms like a quadratic under the chart
    // rotation, whose n-th power is the identity.
    for (int k = 0; k + 1 < n; ++k) {
        at(k + 1, 0, 1) = at(k, 1, 0);
        at(k + 1, 0, 2) = at(k, 2, 0);
        at(k + 1, 1, 0) = -at(k, 0, 1) + 2 * c * at(k, 1, 0) + 2 * (1 - c) * at(k, 0, 0);
        at(k + 1, 1, 1) = -at(k, 1, 1) + (8 * c / 5) * at(k, 2, 0) +
                          (2 - 6 * c / 5) * at(k, 1, 0) - (2 * c / 5) * at(k, 0, 0);
        at(k + 1, 2, 0) = at(k, 0, 2) - 5 * c * at(k, 1, 1) + 4 * c * c * at(k, 2, 0) +
                          (5 * c - 4) * at(k, 0, 1) + c * (9 - 8 * c) * at(k, 1, 0) +
                          (4 - 9 * c + 4 * c * c) * at(k, 0, 0);
    }

    for (int k = 0; k < n; ++k) {
        at(k, 1, 2) = lab(6 + k);
        at(k, 2, 2) = lab(m + k);
        for (int d = 1; d <= 16; ++d)
            at(k, kSectorSlots[d - 1][0], kSectorSlots[d - 1][1]) = lab(m + d * n + k);
    }

    // The [2][1] atoms couple cyclically around the vertex: x_{k+1} + 2c x_k
    // equals a combination of already-known atoms at ray k.
    Eigen::MatrixXd r(n, D);
    for (int k = 0; k < n; ++k)
        r.row(k) = at(k, 1, 2) + 2 * c * at(k + 1, 1, 2) + c * at(k, 0, 1) +
                   (3 * c - 4) * at(k, 1, 1) + (4.0 / 5) * c * (4 - 3 * c) * at(k, 2, 0) +
                   (4 - 27 * c / 5 + 4 * c * c / 5) * at(k, 1, 0) +
                   (c / 5) * (8 * c - 9) * at(k, 0, 0);
    if (resonant(n)) {
        // |2c| = 1: the cyclic system is rank deficient; the extra label
        // seeds a forward recursion that closes identically.
        at(0, 2, 1) = lab(m - 1);
        for (int k = 0; k + 1 < n; ++k) at(k + 1, 2, 1) = r.row(k) - 2 * c * at(k, 2, 1);
    } else {
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
        for (int k = 0; k < n; ++k) {
            C(k, k) = 2 * c;
            C(k, (k + 1) % n) = 1;
        }
        Eigen::MatrixXd x = C.partialPivLu().solve(r);
        for (int k = 0; k < n; ++k) at(k, 2, 1) = x.row(k);
    }

    // Interior resolution along each ray.  All reads are atoms fixed above,
    // so the rays are independent of one another.
    const double d1 = 4 + 8 * c + 5 * c * c;
    const double d2 = 4 + 5 * c;
    const double d3 = 36 + 45 * c + 5 * c * c;
    const double d4 = 20 + 36 * c + 9 * c * c - 15 * c * c * c;
    const double d5 = 32 + 48 * c + 15 * c * c;
    const double d6 = 16 + 36 * c + 36 * c * c + 15 * c * c * c;
    const double d7 = 32 + 64 * c + 72 * c * c + 48 * c * c * c + 15 * c * c * c * c;
    Eigen::MatrixXd shared30(n, D);
    for (int k = 0; k < n; ++k) {
        int j = (k + 1) % n;
        // pg reads sector k in ray-adapted indices (along, across); pa reads
        // sector j, whose along-ray index is the second one.
        auto pg = [&](int i, int jj) { return at(k, i, jj); };
        auto pa = [&](int i, int jj) { return at(j, jj, i); };

        shared30.row(k) = (2.0 / 3) * pg(1, 0) + ((c - 5) / (3 * c)) * pg(2, 0) +
                          (5 / (6 * c)) * (pg(2, 1) + pa(2, 1));

        at(j, 2, 3) = pg(3, 2) - (d6 / (3 * d1)) * (pg(1, 1) - pa(1, 1)) +
                      (d7 / (3 * c * d1)) * (pg(2, 1) - pa(2, 1)) -
                      (d6 / (3 * c * d1)) * (pg(2, 2) - pa(2, 2)) -
                      (c * d2 / (2 * d1)) * (pg(4, 2) - pa(4, 2)) +
                      (c * c / (2 * d1)) * (pg(5, 2) - pa(5, 2));

        at(k, 3, 1) = (2 * c / 15) * pg(0, 0) + (8 * c / 15) * pg(1, 0) +
                      (2.0 / 3) * pg(1, 1) - ((25 + 16 * c * c) / (15 * c)) * pg(2, 0) +
                      ((1 + 2 * c) / (6 * c)) * pg(2, 1) + (3 / (2 * c)) * pa(2, 1) +
                      (1 / (3 * c)) * (pg(2, 2) - pa(2, 2)) + (2 * c / 5) * pg(4, 0);
        at(j, 1, 3) = (2 * c / 15) * pg(0, 0) + (8 * c / 15) * pg(1, 0) +
                      (2.0 / 3) * pa(1, 1) - ((25 + 16 * c * c) / (15 * c)) * pg(2, 0) +
                      ((1 + 2 * c) / (6 * c)) * pa(2, 1) + (3 / (2 * c)) * pg(2, 1) +
                      (1 / (3 * c)) * (pa(2, 2) - pg(2, 2)) + (2 * c / 5) * pg(4, 0);

        at(k, 4, 1) = (2 * c / (15 * d1)) *
                          (c * d2 * pg(0, 0) - d3 * pg(1, 0) + 5 * d2 * pg(1, 1)) +
                      (4 * d4 / (15 * d1)) * pg(2, 0) - (d5 / (6 * d1)) * pg(2, 1) -
                      (c * (16 + 25 * c) / (6 * d1)) * pa(2, 1) +
                      (d2 / (3 * d1)) * (pg(2, 2) - pa(2, 2)) + (1 + 3 * c / 5) * pg(4, 0) +
                      (d2 / (4 * d1)) * (pg(4, 2) - pa(4, 2)) + (c / 5) * pg(5, 0) -
                      (c / (4 * d1)) * (pg(5, 2) - pa(5, 2));
        at(j, 1, 4) = (2 * c / (15 * d1)) *
                          (c * d2 * pg(0, 0) - d3 * pg(1, 0) + 5 * d2 * pa(1, 1)) +
                      (4 * d4 / (15 * d1)) * pg(2, 0) - (d5 / (6 * d1)) * pa(2, 1) -
                      (c * (16 + 25 * c) / (6 * d1)) * pg(2, 1) +
                      (d2 / (3 * d1)) * (pa(2, 2) - pg(2, 2)) + (1 + 3 * c / 5) * pg(4, 0) +
                      (d2 / (4 * d1)) * (pa(4, 2) - pg(4, 2)) + (c / 5) * pg(5, 0) -
                      (c / (4 * d1)) * (pa(5, 2) - pg(5, 2));

        at(k, 5, 1) = (2 * c * c / (3 * d1)) *
                          (c * pg(0, 0) + (3 * c - 5) * pg(1, 0) + 5 * pg(1, 1)) +
                      (c / (6 * d1)) * (-16 * c * c * pg(2, 0) +
                                        5 * (c - 4) * (pg(2, 1) - pa(2, 1)) +
                                        10 * (pg(2, 2) - pa(2, 2))) -
                      c * pg(4, 0) + (5 * c / (4 * d1)) * (pg(4, 2) - pa(4, 2)) +
                      (1 + c) * pg(5, 0) + ((4 + 3 * c) / (4 * d1)) * (pg(5, 2) - pa(5, 2));
        at(j, 1, 5) = (2 * c * c / (3 * d1)) *
                          (c * pg(0, 0) + (3 * c - 5) * pg(1, 0) + 5 * pa(1, 1)) +
                      (c / (6 * d1)) * (-16 * c * c * pg(2, 0) +
                                        5 * (c - 4) * (pa(2, 1) - pg(2, 1)) +
                                        10 * (pa(2, 2) - pg(2, 2))) -
                      c * pg(4, 0) + (5 * c / (4 * d1)) * (pa(4, 2) - pg(4, 2)) +
                      (1 + c) * pg(5, 0) + ((4 + 3 * c) / (4 * d1)) * (pa(5, 2) - pg(5, 2));
    }

    for (int k = 0; k < n; ++k) {
        at(k, 3, 0) = shared30.row(k);
        at(k + 1, 0, 3) = shared30.row(k);
        at(k + 1, 0, 4) = at(k, 4, 0);
        at(k + 1, 0, 5) = at(k, 5, 0);
    }
    return g;
}

Eigen::MatrixXd extract_labels(const Guide& g) {
    if (g.n < 3 || static_cast<int>(g.sectors.size()) != g.n)
        throw std::invalid_argument("extract_labels: malformed guide");
    const auto& atoms = guide_atoms(g.n);
    Eigen::MatrixXd L(atoms.size(), g.sectors[0].c.cols());
    for (size_t r = 0; r < atoms.size(); ++r)
        L.row(r) = g.sectors[atoms[r].k].c.row(atoms[r].i * 6 + atoms[r].j);
    return L;
}

Guide guide_restrict(const Guide& g, double a) {
    Guide out;
    out.n = g.n;
    out.sectors.reserve(g.sectors.size());
    for (const auto& p : g.sectors) out.sectors.push_back(restrict(p, a, a));
    return out;
}

GuideFit fit_guide(const CNet& net) {
    const int n = net.n;
    const int nf = guide_label_count(n);
    const Eigen::MatrixXd& B2 = refine_matrix(n, 2);
    const Eigen::MatrixXd& B3 = refine_matrix(n, 3);
    Eigen::MatrixXd net1 = B2 * net.values;
    Eigen::MatrixXd net2 = B3 * net1;

    // Sub-quad of the unit sector covered by cell (a,b) of the refined grid,
    // then of the twice-refined grid.
    struct Cell {
        int a, b;
        double u0, u1, v0, v1;
    };
    const Cell cells[2][3] = {
        {{1, 0, 0.5, 1.0, 0.0, 0.5}, {1, 1, 0.5, 1.0, 0.5, 1.0}, {0, 1, 0.0, 0.5, 0.5, 1.0}},
        {{1, 0, 0.25, 0.5, 0.0, 0.25}, {1, 1, 0.25, 0.5, 0.25, 0.5}, {0, 1, 0.0, 0.25, 0.25, 0.5}},
    };

    const int rows = n * 6 * 36;
    Eigen::MatrixXd M(rows, 1 + nf);
    for (int col = 0; col <= nf; ++col) {
        Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(1 + nf, 1);
        unit(col, 0) = 1;
        Guide gu = complete_guide(n, unit);
        int r = 0;
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < 2; ++l)
                for (int q = 0; q < 3; ++q) {
                    const Cell& cl = cells[l][q];
                    BBPatch<double> sub =
                        subpatch(gu.sectors[k], cl.u0, cl.u1, cl.v0, cl.v1);
                    M.block(r, col, 36, 1) = sub.c;
                    r += 36;
                }
    }

    Eigen::MatrixXd T(rows, 3);
    {
        int r = 0;
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < 2; ++l)
                for (int q = 0; q < 3; ++q) {
                    const Cell& cl = cells[l][q];
                    BBPatch<double> t = net_cell_patch(n, 3, l == 0 ? net1 : net2, k, cl.a, cl.b);
                    T.block(r, 0, 36, 3) = degree_elevate(t, 5, 5).c;
                    r += 36;
                }
    }

    Eigen::RowVector3d center = limit_position(net);
    Eigen::MatrixXd A = M.rightCols(nf);
    Eigen::MatrixXd b = T - M.col(0) * center;
    Eigen::MatrixXd x = (A.transpose() * A).ldlt().solve(A.transpose() * b);

    Eigen::MatrixXd labels(1 + nf, 3);
    labels.row(0) = center;
    labels.bottomRows(nf) = x;

    GuideFit fit;
    fit.guide = complete_guide(n, labels);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    fit.condition = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    return fit;
}

}  // namespace gsd
