#include "gsd/cap.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <Eigen/Geometry>

#include "gsd/charmap.hpp"
#include "gsd/series.hpp"

namespace gsd {

namespace {

Eigen::Matrix2d rot(double a) { return Eigen::Rotation2Dd(a).toRotationMatrix(); }

void check_cap_valence(int n) {
    if (n < 3 || n == 4)
        throw std::invalid_argument("cap valence must be 3 or at least 5");
}

// Coefficient operator of the k-th derivative of a degree-deg Bernstein poly.
Eigen::MatrixXd diff_op(int deg, int k) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(deg + 1, deg + 1);
    for (int t = 0; t < k; ++t) {
        const int d = deg - t;
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d + 1);
        for (int r = 0; r < d; ++r) {
            S(r, r) = -d;
            S(r, r + 1) = d;
        }
        M = S * M;
    }
    return M;
}

Eigen::MatrixXd bernstein_gram(int m) {
    Eigen::MatrixXd G(m + 1, m + 1);
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j)
            G(i, j) = binom<double>(m, i) * binom<double>(m, j) /
                      (binom<double>(2 * m, i + j) * (2 * m + 1));
    return G;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

// Gram matrix of the fifth-derivative energy over one bi-6 patch, acting on
// the 49 coefficients in row-major (i,j) order.
Eigen::MatrixXd energy_gram() {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(49, 49);
    for (int du = 0; du <= 5; ++du) {
        const int dv = 5 - du;
        Eigen::MatrixXd D = kron(diff_op(6, du), diff_op(6, dv));
        Eigen::MatrixXd Q = kron(bernstein_gram(6 - du), bernstein_gram(6 - dv));
        G += binom<double>(5, du) * D.transpose() * Q * D;
    }
    return G;
}

int coef(int i, int j) { return i * 7 + j; }

}  // namespace

SigmaHat build_sigma_hat(int n) {
    check_cap_valence(n);
    const CharMap& cm = char_map(n);
    const double theta = 2 * M_PI / n;

    // Work in a frame with the sector wedge spanning [0, theta] so the v=0
    // boundary lies on the +x axis.
    Eigen::Matrix2d Rw = rot(theta / 2);
    BBPatch<double> E0 = degree_elevate(apply_frame(Rw, cm.chi_tilde[0]), 6, 6);
    BBPatch<double> E2 = degree_elevate(apply_frame(Rw, cm.chi_tilde[2]), 6, 6);

    // Unknowns: the 49 control points as interleaved (x,y) pairs.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(160, 98);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(160);
    int r = 0;
    auto fix = [&](int i, int j, const Eigen::RowVector2d& val) {
        for (int comp = 0; comp < 2; ++comp) {
            A(r, 2 * coef(i, j) + comp) = 1;
            b(r) = val(comp);
            ++r;
        }
    };
    // Outer two layers extend the characteristic ring with matching tangent.
    for (int j = 0; j <= 6; ++j) {
        fix(6, j, E0.at(0, j));
        fix(5, j, 2 * E0.at(0, j) - E0.at(1, j));
    }
    for (int i = 0; i <= 4; ++i) {
        fix(i, 6, E2.at(i, 0));
        fix(i, 5, 2 * E2.at(i, 0) - E2.at(i, 1));
    }
    fix(0, 0, Eigen::RowVector2d::Zero());
    // The v=0 boundary stays on the sector ray.
    for (int i = 1; i <= 6; ++i) {
        A(r, 2 * coef(i, 0) + 1) = 1;
        ++r;
    }
    // Swapping parameters mirrors the patch across the wedge bisectrix.
    Eigen::Matrix2d M = rot(theta) * Eigen::Vector2d(1, -1).asDiagonal();
    for (int i = 0; i <= 6; ++i)
        for (int j = i; j <= 6; ++j)
            for (int comp = 0; comp < 2; ++comp) {
                A(r, 2 * coef(j, i) + comp) += 1;
                A(r, 2 * coef(i, j) + 0) -= M(comp, 0);
                A(r, 2 * coef(i, j) + 1) -= M(comp, 1);
                ++r;
            }
    // Adjacent sectors obey the weighted tangent-plane relation along the
    // shared ray.  Composing the guide with the chart inherits the relation,
    // which is what keeps the near-center resolution formulas consistent with
    // sampled data.  The residual is a degree-7 polynomial, pinned at eight
    // parameters.
    Eigen::Matrix2d Rm = rot(-theta);
    auto bern = [](int d, int i, double u) {
        return binom<double>(d, i) * std::pow(u, i) * std::pow(1 - u, d - i);
    };
    for (int sp = 0; sp <= 7; ++sp) {
        const double u = sp / 7.0;
        const double w = 2 * std::cos(theta) * (1 - u) * (1 - u);
        for (int comp = 0; comp < 2; ++comp) {
            for (int i = 0; i <= 6; ++i) {
                const double bi = 6 * bern(6, i, u);
                A(r, 2 * coef(i, 1) + comp) += bi;
                A(r, 2 * coef(i, 0) + comp) -= bi;
                A(r, 2 * coef(1, i) + 0) += bi * Rm(comp, 0);
                A(r, 2 * coef(1, i) + 1) += bi * Rm(comp, 1);
                A(r, 2 * coef(0, i) + 0) -= bi * Rm(comp, 0);
                A(r, 2 * coef(0, i) + 1) -= bi * Rm(comp, 1);
            }
            for (int i = 0; i <= 5; ++i) {
                const double bi = 6 * bern(5, i, u);
                A(r, 2 * coef(i + 1, 0) + comp) -= w * bi;
                A(r, 2 * coef(i, 0) + comp) += w * bi;
            }
            ++r;
        }
    }
    A.conservativeResize(r, Eigen::NoChange);
    b.conservativeResize(r);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
    Eigen::VectorXd xp = svd.solve(b);
    if ((A * xp - b).cwiseAbs().maxCoeff() > 1e-9)
        throw std::runtime_error("sigma hat constraints are inconsistent");
    const Eigen::VectorXd& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv(rank) > sv(0) * 1e-10) ++rank;
    Eigen::MatrixXd N = svd.matrixV().rightCols(98 - rank);

    Eigen::MatrixXd G = kron(energy_gram(), Eigen::MatrixXd::Identity(2, 2));
    Eigen::MatrixXd H = N.transpose() * G * N;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (ev.minCoeff() <= ev.maxCoeff() * 1e-12)
        throw std::runtime_error("sigma hat energy system is singular");
    Eigen::VectorXd alpha = es.eigenvectors() *
                            (es.eigenvectors().transpose() * (-N.transpose() * G * xp)).cwiseQuotient(ev);
    Eigen::VectorXd x = xp + N * alpha;

    BBPatch<double> W(6, 6, 2);
    for (int i = 0; i <= 6; ++i)
        for (int j = 0; j <= 6; ++j)
            W.at(i, j) = x.segment<2>(2 * coef(i, j)).transpose();

    SigmaHat sh;
    sh.n = n;
    sh.params = alpha;
    sh.condition = ev.maxCoeff() / ev.minCoeff();
    sh.sectors.reserve(n);
    for (int k = 0; k < n; ++k)
        sh.sectors.push_back(apply_frame(rot(-k * theta - theta / 2), W));
    return sh;
}

const SigmaHat& sigma_hat(int n) {
    static std::mutex mu;
    static std::map<int, SigmaHat> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_sigma_hat(n)).first;
    return it->second;
}

void solve_cap_g1(int n, std::vector<BBPatch<double>>& s) {
    check_cap_valence(n);
    if (static_cast<int>(s.size()) != n)
        throw std::invalid_argument("cap sector count does not match valence");
    for (const auto& p : s)
        if (p.du != 6 || p.dv != 6)
            throw std::invalid_argument("cap sectors must be bi-6");

    const double c = std::cos(2 * M_PI / n);
    const int dim = s[0].dim();

    const Eigen::RowVectorXd p00 = s[0].at(0, 0);
    for (auto& p : s) p.at(0, 0) = p00;

    // The center and the two boundary tangents of sector 0 seed the three-term
    // tangent ring recursion t_{k+1} = -t_{k-1} + 2c t_k + 2(1-c) p00; its
    // solutions are n-periodic, so the ring closes for any seeds.
    Eigen::MatrixXd T(n, dim);
    T.row(0) = s[0].at(1, 0);
    T.row(n - 1) = s[0].at(0, 1);
    for (int k = 0; k + 2 < n; ++k)
        T.row(k + 1) =
            -T.row((k + n - 1) % n) + 2 * c * T.row(k) + 2 * (1 - c) * p00;
    for (int k = 0; k < n; ++k) {
        s[k].at(1, 0) = T.row(k);
        s[(k + 1) % n].at(0, 1) = T.row(k);
    }

    // Per boundary, the tangent-plane identity of the two flanking patches
    // is a degree-7 polynomial with eight coefficient equations: one is the
    // tangent ring relation above, five determine the boundary row, and two
    // pair each side's band entry with its mirror.  The paired entries keep
    // their least-squares midpoint.
    for (int k = 0; k < n; ++k) {
        BBPatch<double>& a = s[k];
        BBPatch<double>& bb = s[(k + 1) % n];
        const Eigen::RowVectorXd t = T.row(k);
        Eigen::RowVectorXd p60 = 0.5 * (a.at(6, 1) + bb.at(1, 6));
        Eigen::RowVectorXd p50 = 0.5 * (a.at(5, 1) + bb.at(1, 5));
        Eigen::RowVectorXd p40 = 0.5 * (a.at(4, 1) + bb.at(1, 4)) + (c / 15) * (p50 - p60);
        Eigen::RowVectorXd p20 = (3 / (5 * c)) * (a.at(1, 1) + bb.at(1, 1)) +
                                 (1.2 - 6 / (5 * c)) * t - 0.2 * p00;
        Eigen::RowVectorXd p30 =
            (p00 + p60) / 20 - 0.3 * (t + p50) + 0.75 * (p20 + p40);
        Eigen::RowVectorXd K2 = -(c / 15) * p00 + 0.4 * c * t + (2 - c) * p20 +
                                c * p40 - 0.4 * c * p50 + (c / 15) * p60;
        Eigen::RowVectorXd K3 = 0.1 * p00 - 0.6 * t + 1.5 * p20 +
                                0.5 * (3 - c) * p40 + 0.1 * (1 - c) * (p60 - 6 * p50);
        Eigen::RowVectorXd x2 = 0.5 * (a.at(2, 1) + K2 - bb.at(1, 2));
        Eigen::RowVectorXd x3 = 0.5 * (a.at(3, 1) + K3 - bb.at(1, 3));
        a.at(2, 1) = x2;
        bb.at(1, 2) = K2 - x2;
        a.at(3, 1) = x3;
        bb.at(1, 3) = K3 - x3;
        a.at(2, 0) = p20;
        a.at(3, 0) = p30;
        a.at(4, 0) = p40;
        a.at(5, 0) = p50;
        a.at(6, 0) = p60;
        bb.at(0, 2) = p20;
        bb.at(0, 3) = p30;
        bb.at(0, 4) = p40;
        bb.at(0, 5) = p50;
        bb.at(0, 6) = p60;
    }
}

namespace {

// Taylor jet of h(rho(u,v)) at a corner, for the bi-6 assembly.
Jet<double> cap_jet(const BBPatch<double>& h, const BBPatch<double>& rho, Corner corner) {
    const double u0 = corner_u_high(corner) ? 1.0 : 0.0;
    const double v0 = corner_v_high(corner) ? 1.0 : 0.0;
    auto xy = patch_series(rho, u0, v0);
    auto f = compose_series<double>(patch_deriv_or_zero(h, xy[0].a(0, 0), xy[1].a(0, 0)),
                                    xy[0], xy[1]);
    return corner_jet<double>(series_sampler(std::move(f)), 6, 4, corner);
}

}  // namespace

Cap build_cap(const Guide& g, const SurfaceRing& last_ring, int L) {
    const int n = g.n;
    check_cap_valence(n);
    if (last_ring.degree != 6) throw std::invalid_argument("cap requires a bi-6 ring");
    if (static_cast<int>(last_ring.sectors.size()) != n)
        throw std::invalid_argument("guide and ring valence differ");
    if (L < 1 || last_ring.level != L - 1)
        throw std::invalid_argument("cap level does not continue the final ring");

    const CharMap& cm = char_map(n);
    const SigmaHat& sh = sigma_hat(n);
    Guide h = guide_restrict(g, std::pow(cm.lambda, L));
    BBPatch<double> rho = apply_frame(sector_shear(n).inverse(), sh.sectors[0]);

    std::vector<BBPatch<double>> sectors(n);
    for (int k = 0; k < n; ++k) {
        std::array<Jet<double>, 4> js;
        for (int ci = 0; ci < 4; ++ci)
            js[ci] = cap_jet(h.sectors[k], rho, static_cast<Corner>(ci));
        sectors[k] = assemble_from_jets(js, 6, 4);

        // The outer two layers continue the last ring C1 across the 1:1
        // interface along the sector's inner boundary.
        const BBPatch<double>& q0 = last_ring.sectors[k][0];
        const BBPatch<double>& q2 = last_ring.sectors[k][2];
        for (int j = 0; j <= 6; ++j) {
            sectors[k].at(6, j) = q0.at(0, j);
            sectors[k].at(5, j) = 2 * q0.at(0, j) - q0.at(1, j);
        }
        for (int i = 0; i <= 4; ++i) {
            sectors[k].at(i, 6) = q2.at(i, 0);
            sectors[k].at(i, 5) = 2 * q2.at(i, 0) - q2.at(i, 1);
        }
    }
    solve_cap_g1(n, sectors);

    Cap cap;
    cap.n = n;
    cap.center = sectors[0].at(0, 0);
    cap.boundary_fit.reserve(n);
    for (int k = 0; k < n; ++k) {
        Eigen::Matrix<double, 4, Eigen::Dynamic> fit(4, sectors[k].dim());
        fit.row(0) = sectors[k].at(2, 1);
        fit.row(1) = sectors[k].at(3, 1);
        fit.row(2) = sectors[(k + 1) % n].at(1, 2);
        fit.row(3) = sectors[(k + 1) % n].at(1, 3);
        cap.boundary_fit.push_back(std::move(fit));
    }
    cap.sectors = std::move(sectors);
    return cap;
}

}  // namespace gsd
