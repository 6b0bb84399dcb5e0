#include "gsd/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gsd/charmap.hpp"
#include "gsd/parallel.hpp"

namespace gsd {

Eigen::MatrixXd restriction_map(int n, double a) {
    const int N = guide_label_count(n);
    Eigen::MatrixXd M(N, N);
    std::vector<double> col_err(N, 0.0);
    parallel_for(N, [&](int j) {
        Eigen::MatrixXd labels = Eigen::MatrixXd::Zero(1 + N, 1);
        labels(1 + j, 0) = 1;
        Guide r = guide_restrict(complete_guide(n, labels), a);
        Eigen::MatrixXd out = extract_labels(r);
        // The restricted patches must satisfy the sector constraints, i.e.
        // completion from the re-extracted labels reproduces them.
        Guide rc = complete_guide(n, out);
        double err = 0;
        for (int k = 0; k < n; ++k)
            err = std::max(err,
                           (rc.sectors[k].c - r.sectors[k].c).cwiseAbs().maxCoeff());
        col_err[j] = err;
        M.col(j) = out.bottomRows(N);
    });
    if (*std::max_element(col_err.begin(), col_err.end()) > 1e-9)
        throw std::runtime_error(
            "restricted guide is not reproduced by its labels");
    return M;
}

Spectrum verify_spectrum(const Eigen::MatrixXd& M, int n, double lambda) {
    if (lambda <= 0 || 1 - lambda < 1e-5)
        throw std::invalid_argument(
            "lambda powers are too close to cluster; use a smaller lambda");
    const int N = guide_label_count(n);
    const int ns = n_star(n);
    const int expected[11] = {1,      2,      3,      ns,     2 * n, 3 * n,
                              3 * n,  3 * n,  3 * n,  2 * n,  n};

    Spectrum sp;
    sp.n = n;
    sp.lambda = lambda;
    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();

    for (int i = 0; i < N; ++i) {
        Eigen::VectorXcd r = M * vecs.col(i) - vals(i) * vecs.col(i);
        sp.max_residual = std::max(sp.max_residual, r.norm() / vecs.col(i).norm());
    }

    std::vector<int> count(11, 0);
    bool matched_all = true;
    for (int i = 0; i < N; ++i) {
        int best = -1;
        double best_rel = 1e300;
        for (int s = 1; s <= 10; ++s) {
            double rel = std::abs(vals(i) - std::pow(lambda, s)) / std::pow(lambda, s);
            if (rel < best_rel) {
                best_rel = rel;
                best = s;
            }
        }
        if (best_rel <= 1e-6)
            ++count[best];
        else
            matched_all = false;
    }
    sp.ok = matched_all;
    for (int s = 1; s <= 10; ++s) {
        SpectrumCluster cl;
        cl.s = s;
        cl.count = count[s];
        cl.expected = expected[s];
        double sum = 0;
        int m = 0;
        for (int i = 0; i < N; ++i)
            if (std::abs(vals(i) - std::pow(lambda, s)) <=
                1e-6 * std::pow(lambda, s)) {
                sum += vals(i).real();
                ++m;
            }
        cl.value = m ? sum / m : 0;
        sp.clusters.push_back(cl);
        if (cl.count != cl.expected) sp.ok = false;
    }
    if (sp.max_residual > 1e-8) sp.ok = false;
    return sp;
}

std::vector<int> eigen_free_labels(int n, int s) {
    if (s < 0 || s > 10) throw std::invalid_argument("exponent out of range");
    const int m = 6 + n_star(n);
    auto block = [&](std::vector<int>& out, int d) {
        for (int k = 0; k < n; ++k) out.push_back(m + d * n + k);
    };
    std::vector<int> out;
    switch (s) {
        case 0: out = {0}; break;
        case 1: out = {1, 2}; break;
        case 2: out = {3, 4, 5}; break;
        case 3:
            for (int l = 6; l < m; ++l) out.push_back(l);
            break;
        case 4: block(out, 0); block(out, 1); break;
        case 5: block(out, 2); block(out, 3); block(out, 5); break;
        case 6: block(out, 4); block(out, 5); block(out, 6); break;
        case 7: block(out, 7); block(out, 9); block(out, 10); break;
        case 8: block(out, 11); block(out, 12); block(out, 13); break;
        case 9: block(out, 14); block(out, 15); break;
        case 10: block(out, 16); break;
    }
    return out;
}

EigenRingSequence eigenring_sequence(int n, int s, int label, int L, int degree) {
    std::vector<int> free = eigen_free_labels(n, s);
    if (std::find(free.begin(), free.end(), label) == free.end())
        throw std::invalid_argument("label is not free at this exponent");
    if (L < 1) throw std::invalid_argument("need at least one ring level");

    const CharMap& cm = char_map(n);
    const int N = guide_label_count(n);
    Eigen::MatrixXd labels = Eigen::MatrixXd::Zero(1 + N, 1);
    if (s == 0) {
        labels.setOnes();
    } else {
        // Project the unit label onto the lambda^s eigenspace of the
        // restriction map.
        Eigen::MatrixXd M = restriction_map(n, cm.lambda);
        Eigen::EigenSolver<Eigen::MatrixXd> es(M);
        Eigen::VectorXcd y =
            es.eigenvectors().partialPivLu().solve(
                Eigen::VectorXcd::Unit(N, label - 1));
        const double target = std::pow(cm.lambda, s);
        for (int i = 0; i < N; ++i)
            if (std::abs(es.eigenvalues()(i) - target) > 1e-6 * target) y(i) = 0;
        Eigen::VectorXcd w = es.eigenvectors() * y;
        if (w.norm() < 1e-10)
            throw std::runtime_error("seed has no component in the eigenspace");
        labels.bottomRows(N) = w.real();
    }

    EigenRingSequence seq;
    seq.n = n;
    seq.s = s;
    seq.label = label;
    seq.lambda = cm.lambda;
    Guide g = complete_guide(n, labels);
    seq.rings.reserve(L);
    for (int l = 0; l < L; ++l) seq.rings.push_back(build_ring(g, cm, l, degree));
    return seq;
}

}  // namespace gsd
