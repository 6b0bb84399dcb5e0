#include "gsd/charmap.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gsd/quadmesh.hpp"

namespace gsd {

int net_size(int n, int R) { return n * R * (R + 1) + 1; }

int net_node(int n, int R, int k, int i, int j) {
    k = ((k % n) + n) % n;
    if (i == 0 && j == 0) return 0;
    if (j == -1) return net_node(n, R, k + 1, 1, i);
    if (i == -1) return net_node(n, R, k - 1, j, 1);
    if (i == 0) return net_node(n, R, k - 1, j, 0);
    if (i < 1 || i > R || j < 0 || j > R)
        throw std::out_of_range("net_node: index outside the ring");
    return 1 + k * R * (R + 1) + (i - 1) + R * j;
}

Eigen::MatrixXd refine_matrix(int n, int R_in) {
    if (R_in != 2 && R_in != 3)
        throw std::invalid_argument("refine_matrix: input must be a 2- or 3-ring net");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(net_size(n, 3), net_size(n, R_in));
    auto add = [&](int r, int k, int i, int j, double w) { B(r, net_node(n, R_in, k, i, j)) += w; };
    auto face = [&](int r, int k, int a, int b, double w) {
        add(r, k, a, b, w / 4);
        add(r, k, a + 1, b, w / 4);
        add(r, k, a + 1, b + 1, w / 4);
        add(r, k, a, b + 1, w / 4);
    };

    B(0, 0) += double(n - 2) / n;
    for (int k = 0; k < n; ++k) {
        add(0, k, 1, 0, 1.0 / (n * n));
        face(0, k, 0, 0, 1.0 / (n * n));
    }
    for (int k = 0; k < n; ++k)
        for (int i = 1; i <= 3; ++i)
            for (int j = 0; j <= 3; ++j) {
                const int r = net_node(n, 3, k, i, j);
                if (i % 2 == 0 && j % 2 == 0) {  // vertex point of a regular vertex
                    const int a = i / 2, b = j / 2;
                    add(r, k, a, b, 0.5);
                    const int nb[4][2] = {{a + 1, b}, {a - 1, b}, {a, b + 1}, {a, b - 1}};
                    for (auto& e : nb) add(r, k, e[0], e[1], 1.0 / 16);
                    face(r, k, a - 1, b - 1, 1.0 / 16);
                    face(r, k, a, b - 1, 1.0 / 16);
                    face(r, k, a - 1, b, 1.0 / 16);
                    face(r, k, a, b, 1.0 / 16);
                } else if (i % 2 == 1 && j % 2 == 1) {  // face point
                    face(r, k, (i - 1) / 2, (j - 1) / 2, 1.0);
                } else if (i % 2 == 1) {  // edge point, edge along the u direction
                    const int a = (i - 1) / 2, b = j / 2;
                    add(r, k, a, b, 0.25);
                    add(r, k, a + 1, b, 0.25);
                    face(r, k, a, b - 1, 0.25);
                    face(r, k, a, b, 0.25);
                } else {  // edge point, edge along the v direction
                    const int a = i / 2, b = (j - 1) / 2;
                    add(r, k, a, b, 0.25);
                    add(r, k, a, b + 1, 0.25);
                    face(r, k, a - 1, b, 0.25);
                    face(r, k, a, b, 0.25);
                }
            }
    return B;
}

Eigen::MatrixXd subdivision_matrix(int n) {
    const Eigen::MatrixXd B = refine_matrix(n, 2);
    Eigen::MatrixXd A(net_size(n, 2), net_size(n, 2));
    A.row(0) = B.row(0);
    for (int k = 0; k < n; ++k)
        for (int i = 1; i <= 2; ++i)
            for (int j = 0; j <= 2; ++j)
                A.row(net_node(n, 2, k, i, j)) = B.row(net_node(n, 3, k, i, j));
    return A;
}

double char_lambda(int n) {
    const double c = std::cos(2 * std::numbers::pi / n);
    return (c + 5 + std::sqrt((c + 1) * (c + 9))) / 16;
}

Eigen::Matrix2d sector_shear(int n) {
    const double h = std::numbers::pi / n;
    Eigen::Matrix2d L;
    L << std::cos(h), std::cos(h), -std::sin(h), std::sin(h);
    return L;
}

BBPatch<double> net_cell_patch(int n, int R, const Eigen::MatrixXd& net, int k, int a, int b) {
    const int dim = static_cast<int>(net.cols());
    Eigen::Matrix<double, 4, Eigen::Dynamic> col(4, dim), tmp(4, dim);
    Eigen::Matrix<double, 4, Eigen::Dynamic> half[4];
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) col.row(y) = net.row(net_node(n, R, k, a - 1 + x, b - 1 + y));
        bspline_segment_to_bezier(col, tmp);
        half[x] = tmp;
    }
    BBPatch<double> p(3, 3, dim);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) col.row(x) = half[x].row(y);
        bspline_segment_to_bezier(col, tmp);
        for (int x = 0; x < 4; ++x) p.at(x, y) = tmp.row(x);
    }
    return p;
}

BBPatch<double> apply_frame(const Eigen::Matrix2d& M, const BBPatch<double>& p) {
    BBPatch<double> out = p;
    out.c = p.c * M.transpose();
    return out;
}

namespace {

CharMap build_char_map(int n) {
    if (n < 3) throw std::invalid_argument("char_map: valence must be at least 3");
    const double lambda = char_lambda(n);
    const Eigen::MatrixXd B = refine_matrix(n, 3);

    // first-frequency Fourier block of the square 3-ring operator
    const int S = 12;
    const std::complex<double> w1 =
        std::exp(std::complex<double>(0, 2 * std::numbers::pi / n));
    Eigen::MatrixXcd blk(S, S);
    for (int c = 0; c < S; ++c)
        for (int cc = 0; cc < S; ++cc) {
            std::complex<double> s = 0;
            for (int k = 0; k < n; ++k) s += B(1 + c, 1 + k * S + cc) * std::pow(w1, k);
            blk(c, cc) = s;
        }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(blk);
    int best = 0;
    for (int i = 1; i < S; ++i)
        if (std::abs(es.eigenvalues()(i) - lambda) < std::abs(es.eigenvalues()(best) - lambda))
            best = i;
    if (std::abs(es.eigenvalues()(best) - lambda) > 1e-8)
        throw std::runtime_error("char_map: subdivision spectrum has no eigenvalue near " +
                                 std::to_string(lambda) + " for valence " + std::to_string(n));
    const Eigen::VectorXcd v = es.eigenvectors().col(best);

    // lift to the full net and realize as a planar net
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(net_size(n, 3));
    for (int k = 0; k < n; ++k)
        for (int c = 0; c < S; ++c) z(1 + k * S + c) = std::pow(w1, k) * v(c);

    auto realize = [&](const Eigen::VectorXcd& zz) {
        Eigen::Matrix<double, Eigen::Dynamic, 2> N(zz.size(), 2);
        N.col(0) = zz.real();
        N.col(1) = zz.imag();
        return N;
    };

    // normalize: the outer corner of the diagonal ring piece goes to (1,0)
    {
        Eigen::MatrixXd net = realize(z);
        BBPatch<double> q1 = net_cell_patch(n, 3, refine_matrix(n, 3) * net, 0, 1, 1);
        std::complex<double> corner(q1.at(3, 3)(0), q1.at(3, 3)(1));
        if (std::abs(corner) < 1e-12)
            throw std::runtime_error("char_map: degenerate characteristic net");
        z /= corner;
    }

    CharMap cm;
    cm.n = n;
    cm.lambda = lambda;
    cm.net = realize(z);
    const Eigen::MatrixXd refined = B * cm.net;
    const int cells[3][2] = {{1, 0}, {1, 1}, {0, 1}};
    for (int q = 0; q < 3; ++q) {
        cm.chi[q] = net_cell_patch(n, 3, refined, 0, cells[q][0], cells[q][1]);
        cm.chi_tilde[q] = net_cell_patch(n, 3, cm.net, 0, cells[q][0], cells[q][1]);
    }

    // orient: the ring must wind the same way as the sector wedge
    Eigen::RowVector2d du = eval(cm.chi[1], 0.5, 0.5, 1, 0);
    Eigen::RowVector2d dv = eval(cm.chi[1], 0.5, 0.5, 0, 1);
    if (du(0) * dv(1) - du(1) * dv(0) < 0) {
        cm.net.col(1) *= -1;
        for (int q = 0; q < 3; ++q) {
            cm.chi[q].c.col(1) *= -1;
            cm.chi_tilde[q].c.col(1) *= -1;
        }
    }
    return cm;
}

}  // namespace

const CharMap& char_map(int n) {
    static std::mutex mu;
    static std::map<int, CharMap> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_char_map(n)).first;
    return it->second;
}

}  // namespace gsd
