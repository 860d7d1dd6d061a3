#pragma once

#include <optional>

#include "sl2wild/series.hpp"

namespace sl2wild {

// 2x2 matrix of germs
template <class T>
struct Mat2S {
    Series<T> a11, a12, a21, a22;

    static Mat2S identity() {
        Mat2S m;
        m.a11 = Series<T>::constant(scalar_traits<T>::one());
        m.a22 = Series<T>::constant(scalar_traits<T>::one());
        m.a12 = Series<T>::zero();
        m.a21 = Series<T>::zero();
        return m;
    }

    Series<T> det() const { return a11 * a22 - a12 * a21; }
    Series<T> trace() const { return a11 + a22; }

    friend Mat2S operator*(const Mat2S& a, const Mat2S& b) {
        Mat2S r;
        r.a11 = a.a11 * b.a11 + a.a12 * b.a21;
        r.a12 = a.a11 * b.a12 + a.a12 * b.a22;
        r.a21 = a.a21 * b.a11 + a.a22 * b.a21;
        r.a22 = a.a21 * b.a12 + a.a22 * b.a22;
        return r;
    }
    friend Mat2S operator+(const Mat2S& a, const Mat2S& b) {
        return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
    }
    friend Mat2S operator-(const Mat2S& a, const Mat2S& b) {
        return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
    }
    friend Mat2S operator*(const Mat2S& a, const Series<T>& s) {
        return {a.a11 * s, a.a12 * s, a.a21 * s, a.a22 * s};
    }

    Mat2S inverse(int want) const {
        Series<T> d = inverse_series(det(), want);
        Mat2S r;
        r.a11 = a22 * d;
        r.a12 = -(a12 * d);
        r.a21 = -(a21 * d);
        r.a22 = a11 * d;
        return r;
    }

    Mat2S theta_applied(int k) const {
        return {theta(a11, k), theta(a12, k), theta(a21, k), theta(a22, k)};
    }

    Mat2S jet(int n) const { return {a11.jet(n), a12.jet(n), a21.jet(n), a22.jet(n)}; }

    double max_abs_coeff() const {
        auto m = [](const Series<T>& s) {
            double v = 0;
            for (auto& x : s.c) v = std::max(v, scalar_traits<T>::abs(x));
            return v;
        };
        return std::max(std::max(m(a11), m(a12)), std::max(m(a21), m(a22)));
    }

  private:
    static Series<T> inverse_series(const Series<T>& s, int want) {
        return ::sl2wild::inverse(s, want);
    }
};

// x^{k+1} y' = A(x) y with trace A == 0, A(0) != 0
template <class T>
struct TracelessSystem {
    int k = 0;
    Mat2S<T> A;
};

// Companion system x^{k+1} y' = [[0,1],[Q,0]] y, or P(x) y' = ... in the
// parametric (unfolded) case when P is present.
template <class T>
struct CompanionSystem {
    int k = 0;
    Series<T> Q;
    std::optional<Poly<T>> P; // absent means P = x^{k+1}

    Mat2S<T> matrix() const {
        Mat2S<T> m;
        m.a11 = Series<T>::zero();
        m.a12 = Series<T>::constant(scalar_traits<T>::one());
        m.a21 = Q;
        m.a22 = Series<T>::zero();
        return m;
    }
};

// Gauge transform y' = T(x) y. In exact mode the 1/sqrt(a12) prefactor of the
// companion reduction is kept factored: T = M / sqrt(scale); scale == 1 means
// a plain matrix.
template <class T>
struct GaugeTransform {
    Mat2S<T> M;
    Series<T> scale = Series<T>::constant(scalar_traits<T>::one()); // T = M / sqrt(scale)
};

template <class T>
struct PointTransform {
    Series<T> phi; // phi(0) = 0, phi'(0) != 0
};

using CompanionC = CompanionSystem<Cx>;
using CompanionQ = CompanionSystem<RatC>;

// Gauge action on a traceless system: y' = T y sends A to (theta T + T A) T^{-1}.
template <class T>
TracelessSystem<T> gauge_conjugate(const TracelessSystem<T>& s, const Mat2S<T>& M, int want) {
    TracelessSystem<T> r;
    r.k = s.k;
    Mat2S<T> num = M.theta_applied(s.k) + M * s.A;
    r.A = num * M.inverse(want);
    r.A = r.A.jet(want);
    return r;
}

// Companion reduction, eq-by-eq:
//   Q = -det A + theta(a11) - a11 * L - 1/2 theta(L) + 1/4 L^2,  L = theta(a12)/a12
// with T = (1/sqrt(a12)) [[1, 0], [a11 - L/2, a12]].
// If a12(0) = 0 a constant conjugation is applied first.
template <class T>
std::pair<CompanionSystem<T>, GaugeTransform<T>> to_companion(const TracelessSystem<T>& sys,
                                                              int want) {
    const int k = sys.k;
    const T one = scalar_traits<T>::one();
    const T zero = scalar_traits<T>::zero();

    // candidate constant conjugations arranging a12(0) != 0
    std::vector<Mat2S<T>> candidates;
    candidates.push_back(Mat2S<T>::identity());
    {
        Mat2S<T> j; // swap
        j.a11 = Series<T>::zero();
        j.a12 = Series<T>::constant(one);
        j.a21 = Series<T>::constant(one);
        j.a22 = Series<T>::zero();
        candidates.push_back(j);
        Mat2S<T> r; // rotation-like mixer, works when A(0) is diagonal
        r.a11 = Series<T>::constant(one);
        r.a12 = Series<T>::constant(one);
        r.a21 = Series<T>::constant(-one);
        r.a22 = Series<T>::constant(one);
        candidates.push_back(r);
    }

    Mat2S<T> C;
    TracelessSystem<T> s;
    bool found = false;
    for (auto& cand : candidates) {
        TracelessSystem<T> t = gauge_conjugate(sys, cand, want + k + 2);
        if (!scalar_traits<T>::is_zero(t.A.a12.at0(), 1e-12)) {
            C = cand;
            s = t;
            found = true;
            break;
        }
    }
    if (!found) throw error("to_companion: a12 vanishes at 0 after constant conjugation attempts");

    const int w = want + 2 * (k + 1); // headroom for the theta applications
    Series<T> a11 = s.A.a11.jet(w), a12 = s.A.a12.jet(w);
    Series<T> L = divide(theta(a12, k), a12, w);
    Series<T> detA = s.A.det().jet(w);
    T half = one / scalar_traits<T>::from_int(2);
    T quarter = one / scalar_traits<T>::from_int(4);
    Series<T> Q = -detA + theta(a11, k) - a11 * L - half * theta(L, k) + quarter * (L * L);

    CompanionSystem<T> comp;
    comp.k = k;
    comp.Q = Q.jet(want);

    GaugeTransform<T> g;
    Mat2S<T> M;
    M.a11 = Series<T>::constant(one);
    M.a12 = Series<T>::zero();
    M.a21 = (a11 - half * L).jet(want);
    M.a22 = a12.jet(want);
    g.M = M * C; // g applies C first, then the companion normalization
    g.scale = a12.jet(want);
    (void)zero;
    return {comp, g};
}

// Residual of the conjugation identity theta(M) - M*L/2 = A_c M - M A (the
// sqrt-free form of theta(T) = A_c T - T A with T = M / sqrt(scale),
// L = theta(scale)/scale), evaluated on jets to `order`. Zero iff the gauge
// transform really conjugates `sys` to the companion system.
template <class T>
double companion_residual(const TracelessSystem<T>& sys, const CompanionSystem<T>& comp,
                          const GaugeTransform<T>& g, int order) {
    int w = order;
    Series<T> L = divide(theta(g.scale, sys.k), g.scale, w);
    T half = scalar_traits<T>::one() / scalar_traits<T>::from_int(2);
    Mat2S<T> lhs = g.M.theta_applied(sys.k) - (g.M * L) * Series<T>::constant(half);
    Mat2S<T> rhs = comp.matrix() * g.M - g.M * sys.A;
    Mat2S<T> d = (lhs - rhs).jet(order);
    return d.max_abs_coeff();
}

// ---- point transformations -------------------------------------------------

// psi = theta(phi) / phi^{k+1}
template <class T>
Series<T> point_psi(const Series<T>& phi, int k, int want) {
    Series<T> num = theta(phi, k);
    Series<T> den = Series<T>::constant(scalar_traits<T>::one());
    for (int i = 0; i <= k; ++i) den = den * phi;
    return divide(num, den, want);
}

// Pushforward of a companion system along x' = phi(x). Satisfies
// apply(phi1, apply(phi2, c)) == apply(phi1 ∘ phi2, c) on shared jets.
template <class T>
CompanionSystem<T> point_transform_apply(const PointTransform<T>& pt, const CompanionSystem<T>& c,
                                         int want) {
    if (scalar_traits<T>::is_zero(pt.phi.coeff(1)))
        throw error("point_transform_apply: phi'(0) = 0");
    const int k = c.k;
    const int w = want + 2 * (k + 1);
    Series<T> psi = point_psi(pt.phi, k, w);
    Series<T> L = divide(theta(psi, k), psi, w);
    T half = scalar_traits<T>::one() / scalar_traits<T>::from_int(2);
    T quarter = scalar_traits<T>::one() / scalar_traits<T>::from_int(4);
    // Q = psi^2 (Q' ∘ phi) - 1/2 [theta L - 1/2 L^2]  =>  solve for Q'∘phi
    Series<T> rhs = c.Q + half * theta(L, k) - quarter * (L * L);
    Series<T> qp_phi = divide(rhs, psi * psi, w);
    Series<T> phi_inv = reversion(pt.phi, w);
    CompanionSystem<T> out;
    out.k = k;
    out.Q = compose(qp_phi, phi_inv).jet(want);
    return out;
}

// G_phi matrix (floating only: needs sqrt(psi))
inline Mat2S<Cx> point_transform_matrix(const PointTransform<Cx>& pt, int k, int want) {
    Series<Cx> psi = point_psi(pt.phi, k, want + k + 2);
    Series<Cx> sp = sqrt_unit(psi, want);
    Series<Cx> isp = inverse(sp, want);
    Mat2S<Cx> g;
    g.a11 = sp;
    g.a12 = Series<Cx>::zero();
    g.a21 = divide(theta(psi, k), psi * sp, want) * Cx(0.5, 0);
    g.a22 = isp;
    return g;
}

// Schwarzian derivative associated to theta = x^{k+1} d/dx:
//   S(f) = theta(theta2 f / theta f) - 1/2 (theta2 f / theta f)^2
template <class T>
Series<T> schwarzian_theta(const Series<T>& f, int k, int want) {
    Series<T> tf = theta(f, k);
    Series<T> t2f = theta(tf, k);
    Series<T> r = divide(t2f, tf, want + k + 1);
    T half = scalar_traits<T>::one() / scalar_traits<T>::from_int(2);
    return (theta(r, k) - half * (r * r)).jet(want);
}

} // namespace sl2wild
