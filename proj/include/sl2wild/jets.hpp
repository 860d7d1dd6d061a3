#pragma once

#include <functional>
#include <vector>

#include "sl2wild/poly.hpp"

namespace sl2wild {

template <class T>
struct Jet {
    T center = scalar_traits<T>::zero();
    int order = 0;
    std::vector<T> coeffs; // order+1 entries

    T coeff(int i) const {
        return (i >= 0 && i < int(coeffs.size())) ? coeffs[i] : scalar_traits<T>::zero();
    }
};

using JetC = Jet<Cx>;
using JetQ = Jet<RatC>;

template <class T>
Jet<T> jet_of(const Poly<T>& p, const T& center, int n) {
    Poly<T> sh = p.taylor_at(center).jet(n);
    Jet<T> j;
    j.center = center;
    j.order = n;
    j.coeffs.assign(n + 1, scalar_traits<T>::zero());
    for (int i = 0; i <= n; ++i) j.coeffs[i] = sh.coeff(i);
    return j;
}

// Taylor coefficients of an analytic evaluator by the Cauchy integral over a
// small circle (trapezoid rule, spectrally accurate).
JetC jet_of(const std::function<Cx(Cx)>& f, Cx center, int n, double radius = 0.25);

} // namespace sl2wild
