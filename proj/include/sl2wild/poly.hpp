#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "sl2wild/scalar.hpp"

namespace sl2wild {

// Dense univariate polynomial, coefficients lowest degree first.
// Invariant: leading coefficient nonzero unless the zero polynomial
// (coeffs empty). Trailing *exact* zeros are trimmed; nothing is trimmed
// by tolerance, degree semantics stay under caller control.
template <class T>
struct Poly {
    std::vector<T> c;

    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<T> coeffs) : c(coeffs) { trim(); }

    static Poly zero() { return Poly(); }
    static Poly constant(const T& v) { return Poly(std::vector<T>{v}); }
    static Poly x() { return Poly(std::vector<T>{scalar_traits<T>::zero(), scalar_traits<T>::one()}); }
    // x^n with coefficient a
    static Poly monomial(int n, const T& a) {
        std::vector<T> v(n + 1, scalar_traits<T>::zero());
        v[n] = a;
        return Poly(std::move(v));
    }

    void trim() {
        while (!c.empty() && scalar_traits<T>::is_zero(c.back())) c.pop_back();
    }

    bool is_zero() const { return c.empty(); }
    int degree() const { return int(c.size()) - 1; } // -1 for the zero polynomial

    const T& operator[](size_t i) const { return c[i]; }
    T coeff(int i) const {
        if (i < 0 || i >= int(c.size())) return scalar_traits<T>::zero();
        return c[i];
    }

    // valuation: order of vanishing at 0; -1 for the zero polynomial
    int valuation() const {
        for (size_t i = 0; i < c.size(); ++i)
            if (!scalar_traits<T>::is_zero(c[i])) return int(i);
        return -1;
    }

    T eval(const T& x) const {
        T r = scalar_traits<T>::zero();
        for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
        return r;
    }

    Poly derivative() const {
        if (c.size() <= 1) return Poly();
        std::vector<T> d(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * scalar_traits<T>::from_int(long(i));
        return Poly(std::move(d));
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<T> r(std::max(a.c.size(), b.c.size()), scalar_traits<T>::zero());
        for (size_t i = 0; i < a.c.size(); ++i) r[i] = a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<T> r(std::max(a.c.size(), b.c.size()), scalar_traits<T>::zero());
        for (size_t i = 0; i < a.c.size(); ++i) r[i] = a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
        return Poly(std::move(r));
    }
    Poly operator-() const {
        std::vector<T> r(c.size());
        for (size_t i = 0; i < c.size(); ++i) r[i] = -c[i];
        return Poly(std::move(r));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<T> r(a.c.size() + b.c.size() - 1, scalar_traits<T>::zero());
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return Poly(std::move(r));
    }
    friend Poly operator*(const Poly& a, const T& s) {
        std::vector<T> r(a.c.size());
        for (size_t i = 0; i < a.c.size(); ++i) r[i] = a.c[i] * s;
        return Poly(std::move(r));
    }
    friend Poly operator*(const T& s, const Poly& a) { return a * s; }

    // multiply by x^n
    Poly shifted_up(int n) const {
        if (is_zero()) return Poly();
        std::vector<T> r(c.size() + n, scalar_traits<T>::zero());
        for (size_t i = 0; i < c.size(); ++i) r[i + n] = c[i];
        return Poly(std::move(r));
    }

    // truncate to the n-jet (keep exponents 0..n)
    Poly jet(int n) const {
        if (n < 0) return Poly();
        std::vector<T> r(c.begin(), c.begin() + std::min<size_t>(c.size(), n + 1));
        return Poly(std::move(r));
    }

    Poly compose(const Poly& inner) const {
        Poly r;
        for (size_t i = c.size(); i-- > 0;) r = r * inner + constant(c[i]);
        return r;
    }

    // Taylor coefficients at `center`: returns coefficients of p(x + center)
    // (repeated synthetic division, in place).
    Poly taylor_at(const T& center) const {
        std::vector<T> a = c;
        int n = int(a.size()) - 1;
        for (int k = 0; k < n; ++k)
            for (int i = n - 1; i >= k; --i) a[i] += center * a[i + 1];
        return Poly(std::move(a));
    }

    double max_abs() const {
        double m = 0;
        for (auto& v : c) m = std::max(m, scalar_traits<T>::abs(v));
        return m;
    }
};

// Exact long division: q = d*quot + rem with deg rem < deg d.
// Requires invertible leading coefficient of d (any nonzero works over a field).
template <class T>
std::pair<Poly<T>, Poly<T>> divrem(const Poly<T>& q, const Poly<T>& d) {
    if (d.is_zero()) throw error("divrem: division by zero polynomial");
    int dn = d.degree();
    if (q.degree() < dn) return {Poly<T>(), q};
    std::vector<T> rem = q.c;
    std::vector<T> quot(q.degree() - dn + 1, scalar_traits<T>::zero());
    const T lc = d.c.back();
    for (int i = q.degree(); i >= dn; --i) {
        T f = rem[i] / lc;
        quot[i - dn] = f;
        if (!scalar_traits<T>::is_zero(f))
            for (int j = 0; j <= dn; ++j) rem[i - dn + j] -= f * d.c[j];
        rem[i] = scalar_traits<T>::zero();
    }
    return {Poly<T>(std::move(quot)), Poly<T>(std::move(rem))};
}

// Weierstrass division: divisor must be monic of degree >= 1.
template <class T>
std::pair<Poly<T>, Poly<T>> weierstrass_divide(const Poly<T>& q, const Poly<T>& p) {
    if (p.degree() < 1) throw error("weierstrass_divide: divisor must have degree >= 1");
    const T lc = p.c.back();
    bool monic;
    if constexpr (is_exact_v<T>)
        monic = (lc == scalar_traits<T>::one());
    else
        monic = scalar_traits<T>::abs(lc - scalar_traits<T>::one()) < 1e-12;
    if (!monic) throw error("weierstrass_divide: divisor is not monic");
    return divrem(q, p);
}

// Resultant via the Sylvester matrix, Gaussian elimination over the field T.
template <class T>
T resultant(const Poly<T>& p, const Poly<T>& q) {
    int n = p.degree(), m = q.degree();
    if (n < 0 || m < 0) return scalar_traits<T>::zero();
    if (n == 0) { // Res(c, q) = c^deg(q)
        T r = scalar_traits<T>::one();
        for (int i = 0; i < m; ++i) r *= p.c[0];
        return r;
    }
    if (m == 0) {
        T r = scalar_traits<T>::one();
        for (int i = 0; i < n; ++i) r *= q.c[0];
        return r;
    }
    int N = n + m;
    std::vector<std::vector<T>> a(N, std::vector<T>(N, scalar_traits<T>::zero()));
    for (int r = 0; r < m; ++r)
        for (int j = 0; j <= n; ++j) a[r][r + (n - j)] = p.c[j];
    for (int r = 0; r < n; ++r)
        for (int j = 0; j <= m; ++j) a[m + r][r + (m - j)] = q.c[j];
    // LU with partial pivoting (by approximate magnitude; exact arithmetic
    // only needs a nonzero pivot)
    T det = scalar_traits<T>::one();
    for (int col = 0; col < N; ++col) {
        int piv = -1;
        double best = 0;
        for (int r = col; r < N; ++r) {
            double m2 = scalar_traits<T>::abs2(a[r][col]);
            if (m2 > best) { best = m2; piv = r; }
        }
        if (piv < 0) return scalar_traits<T>::zero();
        if (piv != col) { std::swap(a[piv], a[col]); det = -det; }
        det *= a[col][col];
        for (int r = col + 1; r < N; ++r) {
            if (scalar_traits<T>::is_zero(a[r][col])) continue;
            T f = a[r][col] / a[col][col];
            for (int j = col; j < N; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return det;
}

// disc(p) = (-1)^{n(n-1)/2} Res(p, p') / lc(p)
template <class T>
T discriminant(const Poly<T>& p) {
    int n = p.degree();
    if (n < 1) throw error("discriminant: degree must be >= 1");
    T r = resultant(p, p.derivative()) / p.c.back();
    if ((n * (n - 1) / 2) % 2) r = -r;
    return r;
}

using PolyC = Poly<Cx>;
using PolyQ = Poly<RatC>;

inline PolyC to_cx(const PolyQ& p) {
    std::vector<Cx> v(p.c.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = p.c[i].to_cx();
    return PolyC(std::move(v));
}

} // namespace sl2wild
