// Test-only oracles, independent of the library's implementation paths.
#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "sl2wild/poly.hpp"
#include "sl2wild/series.hpp"

namespace oracle {

using sl2wild::Cx;
using sl2wild::PolyC;

// Roots as eigenvalues of the companion matrix (Eigen's QR), independent of
// the Aberth iteration in the library.
inline std::vector<Cx> companion_eigen_roots(const PolyC& p) {
    int n = p.degree();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    Cx lc = p.c.back();
    for (int i = 0; i < n - 1; ++i) M(i + 1, i) = 1.0;
    for (int i = 0; i < n; ++i) M(i, n - 1) = -p.c[i] / lc;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<Cx> r(n);
    for (int i = 0; i < n; ++i) r[i] = es.eigenvalues()[i];
    return r;
}

// discriminant from the root product: lc^{2n-2} prod_{i<j} (ri - rj)^2
inline Cx root_product_discriminant(const PolyC& p) {
    auto r = companion_eigen_roots(p);
    int n = p.degree();
    Cx d = std::pow(p.c.back(), 2 * n - 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d *= (r[i] - r[j]) * (r[i] - r[j]);
    return d;
}

// winding number of f along a closed polyline (argument accumulation)
inline long winding_number(const std::vector<Cx>& values) {
    double total = 0;
    for (size_t i = 1; i < values.size(); ++i) total += std::arg(values[i] / values[i - 1]);
    return std::lround(total / (2 * M_PI));
}

// adaptive Simpson quadrature of a complex function over a straight segment
template <class F>
Cx simpson_segment(F&& f, Cx a, Cx b, int depth = 18, double tol = 1e-12) {
    struct Rec {
        F& f;
        double tol;
        Cx run(Cx a, Cx m, Cx b, Cx fa, Cx fm, Cx fb, Cx whole, int depth) {
            Cx lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            Cx flm = f(lm), frm = f(rm);
            Cx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            Cx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
                return left + right + (left + right - whole) / 15.0;
            return run(a, lm, m, fa, flm, fm, left, depth - 1) +
                   run(m, rm, b, fm, frm, fb, right, depth - 1);
        }
    } rec{f, tol};
    Cx m = 0.5 * (a + b);
    Cx fa = f(a), fm = f(m), fb = f(b);
    Cx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec.run(a, m, b, fa, fm, fb, whole, depth);
}

template <class F>
Cx quadrature_path(F&& f, const std::vector<Cx>& path, double tol = 1e-12) {
    Cx acc(0, 0);
    for (size_t i = 1; i < path.size(); ++i) acc += simpson_segment(f, path[i - 1], path[i], 18, tol);
    return acc;
}

// Independent oracle for the resonant residue: the log coefficient of the
// second Frobenius solution at exponent difference l. With
// v_j = Q_{2k+j} and n(n-l) w_n = sum_{j=1..n} v_j w_{n-j} (w_0 = 1, n < l),
// the obstruction C = (1/l) sum_{j=1..l} v_j w_{l-j} and rho = -C/l.
template <class T>
T frobenius_rho(const sl2wild::Series<T>& Q, int k, int l) {
    using traits = sl2wild::scalar_traits<T>;
    if (l <= 0) throw sl2wild::error("frobenius_rho oracle: needs l >= 1");
    std::vector<T> w(l, traits::zero());
    w[0] = traits::one();
    for (int n = 1; n < l; ++n) {
        T acc = traits::zero();
        for (int j = 1; j <= n; ++j) acc += Q.coeff(2 * k + j) * w[n - j];
        w[n] = acc / traits::from_int(long(n) * (n - l));
    }
    T C = traits::zero();
    for (int j = 1; j <= l; ++j) C += Q.coeff(2 * k + j) * w[l - j];
    C = C / traits::from_int(l);
    return -(C / traits::from_int(l));
}

inline std::mt19937& rng() {
    static std::mt19937 gen(20240817u);
    return gen;
}

inline sl2wild::RatC random_ratc(int num_range = 9, int den_range = 5) {
    std::uniform_int_distribution<int> dn(-num_range, num_range);
    std::uniform_int_distribution<int> dd(1, den_range);
    return sl2wild::RatC::make(dn(rng()), dd(rng()), dn(rng()), dd(rng()));
}

inline Cx random_unit_cx() {
    std::uniform_real_distribution<double> d(0, 2 * M_PI);
    double a = d(rng());
    return Cx(std::cos(a), std::sin(a));
}

inline Cx random_cx(double radius = 1.0) {
    std::uniform_real_distribution<double> d(-radius, radius);
    return Cx(d(rng()), d(rng()));
}

} // namespace oracle
