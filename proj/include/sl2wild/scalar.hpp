#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <gmpxx.h>

namespace sl2wild {

using Cx = std::complex<double>;

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Complex number with exact rational real and imaginary parts. Used for the
// algebraic identities that must hold exactly (jet equality, cluster formulas,
// saddle-loop relations); all analytic/numeric work runs on Cx.
struct RatC {
    mpq_class re, im;

    RatC() : re(0), im(0) {}
    RatC(long r) : re(r), im(0) {}
    RatC(const mpq_class& r) : re(r), im(0) {}
    RatC(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

    static RatC make(long rn, long rd, long in = 0, long id = 1) {
        mpq_class r(rn, rd), i(in, id);
        r.canonicalize();
        i.canonicalize();
        return RatC(r, i);
    }

    bool is_zero() const { return re == 0 && im == 0; }

    RatC operator-() const { return RatC(-re, -im); }
    RatC conj() const { return RatC(re, -im); }

    friend RatC operator+(const RatC& a, const RatC& b) { return RatC(a.re + b.re, a.im + b.im); }
    friend RatC operator-(const RatC& a, const RatC& b) { return RatC(a.re - b.re, a.im - b.im); }
    friend RatC operator*(const RatC& a, const RatC& b) {
        return RatC(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend RatC operator/(const RatC& a, const RatC& b) {
        mpq_class n = b.re * b.re + b.im * b.im;
        if (n == 0) throw error("RatC: division by zero");
        return RatC((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
    }
    RatC& operator+=(const RatC& o) { *this = *this + o; return *this; }
    RatC& operator-=(const RatC& o) { *this = *this - o; return *this; }
    RatC& operator*=(const RatC& o) { *this = *this * o; return *this; }
    RatC& operator/=(const RatC& o) { *this = *this / o; return *this; }

    friend bool operator==(const RatC& a, const RatC& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const RatC& a, const RatC& b) { return !(a == b); }

    double re_d() const { return re.get_d(); }
    double im_d() const { return im.get_d(); }
    Cx to_cx() const { return Cx(re.get_d(), im.get_d()); }

    std::string str() const {
        std::string s = re.get_str();
        if (im != 0) s += (im > 0 ? "+" : "") + im.get_str() + "i";
        return s;
    }
};

template <class T> struct scalar_traits;

template <> struct scalar_traits<Cx> {
    static constexpr bool exact = false;
    static Cx zero() { return Cx(0, 0); }
    static Cx one() { return Cx(1, 0); }
    static Cx from_int(long n) { return Cx(double(n), 0); }
    static double abs2(const Cx& v) { return std::norm(v); }
    static double abs(const Cx& v) { return std::abs(v); }
    static bool is_zero(const Cx& v, double tol = 0.0) { return std::abs(v) <= tol; }
};

template <> struct scalar_traits<RatC> {
    static constexpr bool exact = true;
    static RatC zero() { return RatC(); }
    static RatC one() { return RatC(1); }
    static RatC from_int(long n) { return RatC(n); }
    static double abs2(const RatC& v) {
        mpq_class n = v.re * v.re + v.im * v.im;
        return n.get_d();
    }
    static double abs(const RatC& v) { return std::sqrt(abs2(v)); }
    static bool is_zero(const RatC& v, double = 0.0) { return v.is_zero(); }
};

template <class T> constexpr bool is_exact_v = scalar_traits<T>::exact;

inline Cx to_cx(const Cx& v) { return v; }
inline Cx to_cx(const RatC& v) { return v.to_cx(); }

} // namespace sl2wild
