#pragma once

#include "gsd/bbpatch.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

namespace gsd {

// Bivariate Taylor series truncated to the coefficient block
// { s^p t^q : p <= 3, q <= 3 }.  The block is closed under multiplication,
// which makes it exactly the arithmetic needed to push 4x4 corner jets
// through a composition f(x(s,t), y(s,t)).
template <class S>
struct Series2 {
    Eigen::Matrix<S, 4, 4> a = Eigen::Matrix<S, 4, 4>::Zero();

    Series2 operator+(const Series2& o) const {
        Series2 r;
        r.a = a + o.a;
        return r;
    }
    Series2 operator*(const Series2& o) const {
        Series2 r;
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q) {
                if (a(p, q) == S(0)) continue;
                for (int p2 = 0; p2 + p < 4; ++p2)
                    for (int q2 = 0; q2 + q < 4; ++q2)
                        r.a(p + p2, q + q2) += a(p, q) * o.a(p2, q2);
            }
        return r;
    }
    Series2 operator*(S s) const {
        Series2 r;
        r.a = a * s;
        return r;
    }

    S deriv(int p, int q) const {
        S f(1);
        for (int t = 2; t <= p; ++t) f *= S(t);
        for (int t = 2; t <= q; ++t) f *= S(t);
        return a(p, q) * f;
    }
};

// Taylor expansion of each coordinate of a patch at (u0,v0); derivative
// orders beyond the degree contribute zero.
template <class S>
std::vector<Series2<S>> patch_series(const BBPatch<S>& p, S u0, S v0) {
    std::vector<Series2<S>> out(p.dim());
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            if (a > p.du || b > p.dv) continue;
            Eigen::RowVectorX<S> d = eval(p, u0, v0, a, b);
            S f(1);
            for (int t = 2; t <= a; ++t) f *= S(t);
            for (int t = 2; t <= b; ++t) f *= S(t);
            for (int k = 0; k < p.dim(); ++k) out[k].a(a, b) = d(k) / f;
        }
    return out;
}

// Composite jets: fder(p,q) must return d_x^p d_y^q f at (x,y) = value of
// (xs,ys) at the expansion point, for all p+q <= 6 (zero where the partial
// vanishes identically).  Result: one series per f-coordinate.
template <class S>
std::vector<Series2<S>> compose_series(const std::function<Eigen::RowVectorX<S>(int, int)>& fder,
                                       const Series2<S>& xs, const Series2<S>& ys) {
    Series2<S> dx = xs, dy = ys;
    dx.a(0, 0) = S(0);
    dy.a(0, 0) = S(0);

    std::array<Series2<S>, 7> xp, yp;
    xp[0].a(0, 0) = S(1);
    yp[0].a(0, 0) = S(1);
    for (int k = 1; k <= 6; ++k) {
        xp[k] = xp[k - 1] * dx;
        yp[k] = yp[k - 1] * dy;
    }

    std::vector<Series2<S>> out;
    for (int p = 0; p <= 6; ++p)
        for (int q = 0; p + q <= 6; ++q) {
            Eigen::RowVectorX<S> d = fder(p, q);
            if (out.empty()) out.resize(d.cols());
            S f(1);
            for (int t = 2; t <= p; ++t) f *= S(t);
            for (int t = 2; t <= q; ++t) f *= S(t);
            Series2<S> w = xp[p] * yp[q];
            for (int k = 0; k < d.cols(); ++k) out[k] = out[k] + w * (d(k) / f);
        }
    return out;
}

// Derivative oracle of a patch with zero-padding past its degrees, in the
// form compose_series expects.
template <class S>
std::function<Eigen::RowVectorX<S>(int, int)> patch_deriv_or_zero(const BBPatch<S>& p, S x, S y) {
    return [&p, x, y](int a, int b) {
        if (a > p.du || b > p.dv) return Eigen::RowVectorX<S>(Eigen::RowVectorX<S>::Zero(p.dim()));
        return eval(p, x, y, a, b);
    };
}

// Adapter: series block -> corner_jet sampler.
template <class S>
std::function<Eigen::RowVectorX<S>(int, int)> series_sampler(std::vector<Series2<S>> h) {
    return [h = std::move(h)](int a, int b) {
        Eigen::RowVectorX<S> r(h.size());
        for (size_t k = 0; k < h.size(); ++k) r(k) = h[k].deriv(a, b);
        return r;
    };
}

}  // namespace gsd
