#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gsd {

// Tensor-product Bernstein-Bezier patch over the unit square.
// Coefficient (i,j) = (u-index, v-index) lives in row i*(dv+1)+j of c;
// columns are the spatial dimension (1, 2 or 3).
template <class S>
struct BBPatch {
    int du = 0, dv = 0;
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> c;

    BBPatch() = default;
    BBPatch(int du_, int dv_, int dim)
        : du(du_), dv(dv_),
          c(Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>::Zero((du_ + 1) * (dv_ + 1), dim)) {}

    int dim() const { return static_cast<int>(c.cols()); }
    int idx(int i, int j) const { return i * (dv + 1) + j; }
    auto at(int i, int j) { return c.row(idx(i, j)); }
    auto at(int i, int j) const { return c.row(idx(i, j)); }
};

enum class Corner { LL = 0, HL = 1, LH = 2, HH = 3 };  // u-low/high x v-low/high

inline bool corner_u_high(Corner k) { return k == Corner::HL || k == Corner::HH; }
inline bool corner_v_high(Corner k) { return k == Corner::LH || k == Corner::HH; }

// Corner-anchored j x j block of coefficients of a bi-d patch.
// Block indices (a,b) count inward from the corner; row a*j+b.
template <class S>
struct Jet {
    int j = 0, d = 0;
    Corner corner = Corner::LL;
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> c;
};

template <class S = double>
S binom(int n, int k) {
    if (k < 0 || k > n) return S(0);
    S r(1);
    for (int t = 1; t <= k; ++t) r = r * S(n - k + t) / S(t);
    return r;
}

namespace detail {

// Bernstein basis values of degree d at t.
template <class S>
void bernstein(int d, S t, Eigen::Matrix<S, Eigen::Dynamic, 1>& w) {
    w.setZero(d + 1);
    w(0) = S(1);
    const S s = S(1) - t;
    for (int k = 1; k <= d; ++k) {
        for (int i = k; i > 0; --i) w(i) = t * w(i - 1) + s * w(i);
        w(0) *= s;
    }
}

}  // namespace detail

// Exact partial derivative d_u^a d_v^b p(u,v), by forward differencing of the
// control net followed by Bernstein evaluation of the reduced degrees.
template <class S>
Eigen::RowVectorX<S> eval(const BBPatch<S>& p, S u, S v, int a = 0, int b = 0) {
    if (a < 0 || b < 0 || a > p.du || b > p.dv)
        throw std::invalid_argument("eval: derivative order exceeds degree");

    const int nu = p.du + 1, nv = p.dv + 1;
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> t = p.c;
    S scale(1);

    int cu = p.du;
    for (int s = 0; s < a; ++s, --cu) {
        for (int i = 0; i < cu; ++i)
            for (int j = 0; j < nv; ++j)
                t.row(i * nv + j) = t.row((i + 1) * nv + j) - t.row(i * nv + j);
        scale *= S(cu);
    }
    int cv = p.dv;
    for (int s = 0; s < b; ++s, --cv) {
        for (int i = 0; i <= cu; ++i)
            for (int j = 0; j < cv; ++j)
                t.row(i * nv + j) = t.row(i * nv + j + 1) - t.row(i * nv + j);
        scale *= S(cv);
    }

    Eigen::Matrix<S, Eigen::Dynamic, 1> wu, wv;
    detail::bernstein(cu, u, wu);
    detail::bernstein(cv, v, wv);
    Eigen::RowVectorX<S> r = Eigen::RowVectorX<S>::Zero(p.dim());
    for (int i = 0; i <= cu; ++i)
        for (int j = 0; j <= cv; ++j) r += wu(i) * wv(j) * t.row(i * nv + j);
    return scale * r;
}

namespace detail {

// Blossom-based reparameterization of one direction to [t0,t1]: the new
// coefficient i is the blossom at t0 (deg-i times) and t1 (i times).
template <class S>
void remap_u(BBPatch<S>& p, S t0, S t1) {
    const int nu = p.du + 1, nv = p.dv + 1;
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> out(p.c.rows(), p.c.cols());
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> f(nu, p.c.cols());
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) f.row(i) = p.c.row(i * nv + j);
        for (int i = 0; i < nu; ++i) {
            auto tmp = f;
            for (int s = 1; s <= p.du; ++s) {
                const S t = (s <= p.du - i) ? t0 : t1;
                for (int r = 0; r <= p.du - s; ++r)
                    tmp.row(r) = (S(1) - t) * tmp.row(r) + t * tmp.row(r + 1);
            }
            out.row(i * nv + j) = tmp.row(0);
        }
    }
    p.c = std::move(out);
}

template <class S>
void remap_v(BBPatch<S>& p, S t0, S t1) {
    const int nv = p.dv + 1;
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> out(p.c.rows(), p.c.cols());
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> f(nv, p.c.cols());
    for (int i = 0; i <= p.du; ++i) {
        for (int j = 0; j < nv; ++j) f.row(j) = p.c.row(i * nv + j);
        for (int j = 0; j < nv; ++j) {
            auto tmp = f;
            for (int s = 1; s <= p.dv; ++s) {
                const S t = (s <= p.dv - j) ? t0 : t1;
                for (int r = 0; r <= p.dv - s; ++r)
                    tmp.row(r) = (S(1) - t) * tmp.row(r) + t * tmp.row(r + 1);
            }
            out.row(i * nv + j) = tmp.row(0);
        }
    }
    p.c = std::move(out);
}

}  // namespace detail

// Same polynomial restricted to [u0,u1]x[v0,v1], reparameterized to the unit square.
template <class S>
BBPatch<S> subpatch(const BBPatch<S>& p, S u0, S u1, S v0, S v1) {
    BBPatch<S> r = p;
    detail::remap_u(r, u0, u1);
    detail::remap_v(r, v0, v1);
    return r;
}

// Restriction to [0,a]x[0,b] (de Casteljau), reparameterized to the unit square.
template <class S>
BBPatch<S> restrict(const BBPatch<S>& p, S a, S b) {
    if (!(a > S(0)) || !(b > S(0)) || a > S(1) || b > S(1))
        throw std::invalid_argument("restrict: factors must lie in (0,1]");
    return subpatch(p, S(0), a, S(0), b);
}

// Quadrant split; order LL, HL, LH, HH matching Corner.
template <class S>
std::array<BBPatch<S>, 4> mid_split(const BBPatch<S>& p) {
    const S h = S(1) / S(2);
    return {subpatch(p, S(0), h, S(0), h), subpatch(p, h, S(1), S(0), h),
            subpatch(p, S(0), h, h, S(1)), subpatch(p, h, S(1), h, S(1))};
}

namespace detail {

template <class S>
void elevate_u(BBPatch<S>& p) {
    const int nv = p.dv + 1;
    BBPatch<S> r(p.du + 1, p.dv, p.dim());
    for (int i = 0; i <= p.du + 1; ++i) {
        const S w = S(i) / S(p.du + 1);
        for (int j = 0; j < nv; ++j) {
            auto row = r.c.row(i * nv + j);
            row.setZero();
            if (i > 0) row += w * p.c.row((i - 1) * nv + j);
            if (i <= p.du) row += (S(1) - w) * p.c.row(i * nv + j);
        }
    }
    p = std::move(r);
}

template <class S>
void elevate_v(BBPatch<S>& p) {
    const int nv = p.dv + 1;
    BBPatch<S> r(p.du, p.dv + 1, p.dim());
    for (int i = 0; i <= p.du; ++i)
        for (int j = 0; j <= p.dv + 1; ++j) {
            const S w = S(j) / S(p.dv + 1);
            auto row = r.c.row(i * (nv + 1) + j);
            row.setZero();
            if (j > 0) row += w * p.c.row(i * nv + j - 1);
            if (j <= p.dv) row += (S(1) - w) * p.c.row(i * nv + j);
        }
    p = std::move(r);
}

}  // namespace detail

template <class S>
BBPatch<S> degree_elevate(const BBPatch<S>& p, int du_t, int dv_t) {
    if (du_t < p.du || dv_t < p.dv)
        throw std::invalid_argument("degree_elevate: target below current degree");
    BBPatch<S> r = p;
    while (r.du < du_t) detail::elevate_u(r);
    while (r.dv < dv_t) detail::elevate_v(r);
    return r;
}

template <class S>
BBPatch<S> degree_elevate(const BBPatch<S>& p, int d_target) {
    return degree_elevate(p, d_target, d_target);
}

// Hermite data -> corner coefficient block.  The sampler returns the partial
// derivative d_u^a d_v^b of the target at the given corner (global u,v axes).
template <class S>
Jet<S> corner_jet(const std::function<Eigen::RowVectorX<S>(int, int)>& f, int d, int j,
                  Corner corner) {
    if (j < 1 || j > d + 1) throw std::invalid_argument("corner_jet: jet size exceeds degree");
    Jet<S> out;
    out.j = j;
    out.d = d;
    out.corner = corner;

    const S su = corner_u_high(corner) ? S(-1) : S(1);
    const S sv = corner_v_high(corner) ? S(-1) : S(1);

    // Cache derivative samples, sign-adjusted for mirrored corners.
    std::vector<Eigen::RowVectorX<S>> D(j * j);
    for (int a = 0; a < j; ++a)
        for (int b = 0; b < j; ++b) {
            D[a * j + b] = f(a, b);
            S sg = (a % 2 ? su : S(1)) * (b % 2 ? sv : S(1));
            D[a * j + b] *= sg;
        }

    const int dim = static_cast<int>(D[0].cols());
    out.c.setZero(j * j, dim);

    // Falling-factorial weights 1/(d ... (d-i+1)).
    std::vector<S> ff(j);
    ff[0] = S(1);
    for (int i = 1; i < j; ++i) ff[i] = ff[i - 1] / S(d - i + 1);

    for (int a = 0; a < j; ++a)
        for (int b = 0; b < j; ++b) {
            Eigen::RowVectorX<S> acc = Eigen::RowVectorX<S>::Zero(dim);
            for (int i = 0; i <= a; ++i)
                for (int p = 0; p <= b; ++p)
                    acc += binom<S>(a, i) * binom<S>(b, p) * ff[i] * ff[p] * D[i * j + p];
            out.c.row(a * j + b) = acc;
        }
    return out;
}

// Place four corner jets into one bi-d patch.  (5,3) tiles the grid exactly;
// (6,4) overlaps by one row/column and overlapped entries are averaged.
template <class S>
BBPatch<S> assemble_from_jets(const std::array<Jet<S>, 4>& jets, int d, int j) {
    if (!((d == 5 && j == 3) || (d == 6 && j == 4)))
        throw std::invalid_argument("assemble_from_jets: only (d,j)=(5,3) or (6,4) supported");
    bool seen[4] = {false, false, false, false};
    for (const auto& jet : jets) {
        if (jet.j != j || jet.d != d)
            throw std::invalid_argument("assemble_from_jets: jet size mismatch");
        seen[static_cast<int>(jet.corner)] = true;
    }
    if (!(seen[0] && seen[1] && seen[2] && seen[3]))
        throw std::invalid_argument("assemble_from_jets: need one jet per corner");

    const int dim = static_cast<int>(jets[0].c.cols());
    BBPatch<S> out(d, d, dim);
    Eigen::Matrix<S, Eigen::Dynamic, 1> cnt = Eigen::Matrix<S, Eigen::Dynamic, 1>::Zero(out.c.rows());
    for (const auto& jet : jets) {
        const bool uh = corner_u_high(jet.corner), vh = corner_v_high(jet.corner);
        for (int a = 0; a < j; ++a)
            for (int b = 0; b < j; ++b) {
                const int gi = uh ? d - a : a;
                const int gj = vh ? d - b : b;
                out.at(gi, gj) += jet.c.row(a * j + b);
                cnt(out.idx(gi, gj)) += S(1);
            }
    }
    for (int r = 0; r < out.c.rows(); ++r) out.c.row(r) /= cnt(r);
    return out;
}

// Convenience: jets of an existing patch (derivatives taken analytically).
template <class S>
Jet<S> patch_corner_jet(const BBPatch<S>& p, int d, int j, Corner corner) {
    const S u = corner_u_high(corner) ? S(1) : S(0);
    const S v = corner_v_high(corner) ? S(1) : S(0);
    return corner_jet<S>(
        [&](int a, int b) {
            if (a > p.du || b > p.dv) {
                return Eigen::RowVectorX<S>(Eigen::RowVectorX<S>::Zero(p.dim()));
            }
            return eval(p, u, v, a, b);
        },
        d, j, corner);
}

}  // namespace gsd
