#pragma once

#include <algorithm>
#include <vector>

#include "sl2wild/poly.hpp"

namespace sl2wild {

// Truncated power series: coefficients 0..ord are trusted, everything above
// is unknown. Polynomials carry ord = kExact. Every operation propagates the
// trusted order, so "insufficient jet" conditions are detectable instead of
// silently wrong.
template <class T>
struct Series {
    static constexpr int kExact = 1 << 24;

    std::vector<T> c; // lowest degree first; entries above ord are meaningless
    int ord = kExact;

    Series() = default;
    Series(std::vector<T> coeffs, int order) : c(std::move(coeffs)), ord(order) { clamp(); }
    explicit Series(const Poly<T>& p) : c(p.c), ord(kExact) {}

    static Series zero(int order = kExact) { return Series({}, order); }
    static Series constant(const T& v, int order = kExact) { return Series({v}, order); }
    static Series x(int order = kExact) {
        return Series({scalar_traits<T>::zero(), scalar_traits<T>::one()}, order);
    }
    static Series monomial(int n, const T& a, int order = kExact) {
        std::vector<T> v(n + 1, scalar_traits<T>::zero());
        v[n] = a;
        return Series(std::move(v), order);
    }

    void clamp() {
        if (ord < kExact && int(c.size()) > ord + 1) c.resize(ord + 1);
        while (!c.empty() && scalar_traits<T>::is_zero(c.back())) c.pop_back();
    }

    T coeff(int i) const {
        if (i < 0 || i >= int(c.size())) return scalar_traits<T>::zero();
        return c[i];
    }
    T at0() const { return coeff(0); }

    bool known_to(int n) const { return ord >= n; }

    // order of first nonzero trusted coefficient; ord+1 if none visible
    // (i.e. valuation > ord as far as this truncation can tell)
    int valuation() const {
        for (int i = 0; i < int(c.size()) && i <= ord; ++i)
            if (!scalar_traits<T>::is_zero(c[i])) return i;
        return ord == kExact ? kExact : ord + 1;
    }

    Series jet(int n) const {
        Series r = *this;
        r.ord = std::min(r.ord, n);
        r.clamp();
        return r;
    }

    Poly<T> to_poly() const { return Poly<T>(c); }

    Series operator-() const {
        Series r = *this;
        for (auto& v : r.c) v = -v;
        return r;
    }

    friend Series operator+(const Series& a, const Series& b) {
        Series r;
        r.ord = std::min(a.ord, b.ord);
        r.c.assign(std::max(a.c.size(), b.c.size()), scalar_traits<T>::zero());
        for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
        r.clamp();
        return r;
    }
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

    friend Series operator*(const Series& a, const Series& b) {
        Series r;
        int va = a.valuation() == kExact ? 0 : std::min(a.valuation(), a.ord + 1);
        int vb = b.valuation() == kExact ? 0 : std::min(b.valuation(), b.ord + 1);
        long oa = (a.ord == kExact) ? long(kExact) : long(a.ord) + vb;
        long ob = (b.ord == kExact) ? long(kExact) : long(b.ord) + va;
        r.ord = int(std::min({oa, ob, long(kExact)}));
        if (a.c.empty() || b.c.empty()) { r.c.clear(); return r; }
        size_t len = a.c.size() + b.c.size() - 1;
        if (r.ord < kExact) len = std::min(len, size_t(r.ord) + 1);
        r.c.assign(len, scalar_traits<T>::zero());
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (scalar_traits<T>::is_zero(a.c[i])) continue;
            for (size_t j = 0; j < b.c.size() && i + j < len; ++j) r.c[i + j] += a.c[i] * b.c[j];
        }
        r.clamp();
        return r;
    }
    friend Series operator*(const Series& a, const T& s) {
        Series r = a;
        for (auto& v : r.c) v = v * s;
        r.clamp();
        return r;
    }
    friend Series operator*(const T& s, const Series& a) { return a * s; }

    // multiply by x^n (n may be negative if valuation allows)
    Series shift(int n) const {
        Series r;
        r.ord = (ord == kExact) ? kExact : ord + n;
        if (n >= 0) {
            r.c.assign(c.size() + n, scalar_traits<T>::zero());
            for (size_t i = 0; i < c.size(); ++i) r.c[i + n] = c[i];
        } else {
            for (int i = 0; i < -n; ++i)
                if (!scalar_traits<T>::is_zero(coeff(i)))
                    throw error("Series::shift: negative shift below valuation");
            r.c.assign(c.begin() + std::min<size_t>(c.size(), -n), c.end());
        }
        r.clamp();
        return r;
    }

    Series derivative() const {
        Series r;
        r.ord = (ord == kExact) ? kExact : ord - 1;
        if (c.size() > 1) {
            r.c.assign(c.size() - 1, scalar_traits<T>::zero());
            for (size_t i = 1; i < c.size(); ++i) r.c[i - 1] = c[i] * scalar_traits<T>::from_int(long(i));
        }
        r.clamp();
        return r;
    }
};

// reciprocal of a unit series (f(0) != 0), to the same trusted order (capped)
template <class T>
Series<T> inverse(const Series<T>& f, int want = Series<T>::kExact) {
    if (scalar_traits<T>::is_zero(f.at0())) throw error("Series inverse: not a unit");
    Series<T> r;
    r.ord = std::min(f.ord, want);
    if (r.ord == Series<T>::kExact) {
        if (f.c.size() > 1)
            throw error("Series inverse: truncation order required for non-constant input");
        r.ord = Series<T>::kExact;
        r.c = {scalar_traits<T>::one() / f.c[0]};
        return r;
    }
    int len = r.ord + 1;
    r.c.assign(len, scalar_traits<T>::zero());
    T inv0 = scalar_traits<T>::one() / f.c[0];
    r.c[0] = inv0;
    for (int m = 1; m < len; ++m) {
        T acc = scalar_traits<T>::zero();
        for (int j = 1; j <= m; ++j) acc += f.coeff(j) * r.c[m - j];
        r.c[m] = -acc * inv0;
    }
    r.clamp();
    return r;
}

template <class T>
Series<T> divide(const Series<T>& a, const Series<T>& b, int want = Series<T>::kExact) {
    // allow common factors of x
    int vb = b.valuation();
    if (vb > 0 && vb < Series<T>::kExact) {
        int va = a.valuation();
        if (va < vb) throw error("Series divide: valuation mismatch");
        return divide(a.shift(-vb), b.shift(-vb), want);
    }
    Series<T> r = a * inverse(b, want);
    r.ord = std::min(r.ord, want);
    r.clamp();
    return r;
}

// principal sqrt of a unit series (floating scalars only)
inline Series<Cx> sqrt_unit(const Series<Cx>& f, int want = Series<Cx>::kExact) {
    if (std::abs(f.at0()) == 0.0) throw error("Series sqrt: not a unit");
    int out = std::min(f.ord, want);
    if (out == Series<Cx>::kExact && f.c.size() > 1)
        throw error("Series sqrt: truncation order required for non-constant input");
    int len = (out == Series<Cx>::kExact) ? 1 : out + 1;
    Series<Cx> g;
    g.ord = out;
    g.c.assign(len, Cx(0, 0));
    g.c[0] = std::sqrt(f.at0());
    Cx half_inv = Cx(0.5, 0) / g.c[0];
    for (int m = 1; m < len; ++m) {
        Cx acc = f.coeff(m);
        for (int j = 1; j < m; ++j) acc -= g.c[j] * g.c[m - j];
        g.c[m] = acc * half_inv;
    }
    g.clamp();
    return g;
}

// Relative sqrt jet: for unit E, returns t with sqrt(E) = sqrt(E_0) * t,
// t(0) = 1. All coefficients of t are rational in the coefficients of E, so
// this works in exact mode even when sqrt(E_0) does not exist in the field.
template <class T>
Series<T> sqrt_relative(const Series<T>& E, int want = Series<T>::kExact) {
    if (scalar_traits<T>::is_zero(E.at0())) throw error("sqrt_relative: not a unit");
    int out = std::min(E.ord, want);
    if (out == Series<T>::kExact && E.c.size() > 1)
        throw error("sqrt_relative: truncation order required for non-constant input");
    int len = (out == Series<T>::kExact) ? 1 : out + 1;
    T inv0 = scalar_traits<T>::one() / E.at0();
    Series<T> t;
    t.ord = out;
    t.c.assign(len, scalar_traits<T>::zero());
    t.c[0] = scalar_traits<T>::one();
    T half = scalar_traits<T>::one() / scalar_traits<T>::from_int(2);
    for (int m = 1; m < len; ++m) {
        T acc = E.coeff(m) * inv0;
        for (int j = 1; j < m; ++j) acc -= t.c[j] * t.c[m - j];
        t.c[m] = acc * half;
    }
    t.clamp();
    return t;
}

// f(g(x)) with g(0) = 0
template <class T>
Series<T> compose(const Series<T>& f, const Series<T>& g) {
    if (!scalar_traits<T>::is_zero(g.at0())) throw error("Series compose: g(0) != 0");
    int vg = std::max(1, std::min(g.valuation(), 4096));
    long of = (f.ord == Series<T>::kExact) ? long(Series<T>::kExact)
                                           : long(f.ord + 1) * vg - 1;
    int out_ord = int(std::min({long(g.ord), of, long(Series<T>::kExact)}));
    Series<T> r = Series<T>::zero(out_ord);
    // Horner over g
    for (size_t i = f.c.size(); i-- > 0;) {
        r = r * g;
        r = r + Series<T>::constant(f.c[i]);
        r.ord = out_ord;
        r.clamp();
    }
    r.ord = out_ord;
    r.clamp();
    return r;
}

// compositional inverse of g (g(0) = 0, g'(0) != 0): h with g(h(x)) = x
template <class T>
Series<T> reversion(const Series<T>& g, int want) {
    if (!scalar_traits<T>::is_zero(g.at0())) throw error("reversion: g(0) != 0");
    T g1 = g.coeff(1);
    if (scalar_traits<T>::is_zero(g1)) throw error("reversion: g'(0) = 0");
    int n = std::min(want, g.ord);
    if (n >= Series<T>::kExact) {
        if (g.c.size() > 2) throw error("reversion: truncation order required for nonlinear input");
        n = 1;
    }
    Series<T> h = Series<T>::monomial(1, scalar_traits<T>::one() / g1, n);
    for (int m = 2; m <= n; ++m) {
        Series<T> comp = compose(g.jet(n), h); // valid at least to order m
        T err = comp.coeff(m);
        // adjust h_m so that the x^m coefficient of g∘h vanishes
        h.c.resize(std::max<size_t>(h.c.size(), m + 1), scalar_traits<T>::zero());
        h.c[m] = -err / g1;
    }
    h.clamp();
    return h;
}

// theta_k f = x^{k+1} f'
template <class T>
Series<T> theta(const Series<T>& f, int k) {
    return f.derivative().shift(k + 1);
}

using SeriesC = Series<Cx>;
using SeriesQ = Series<RatC>;

inline SeriesC to_cx(const SeriesQ& s) {
    std::vector<Cx> v(s.c.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = s.c[i].to_cx();
    return SeriesC(std::move(v), s.ord);
}

} // namespace sl2wild
