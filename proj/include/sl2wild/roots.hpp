#pragma once

#include <vector>

#include "sl2wild/poly.hpp"

namespace sl2wild {

struct Root {
    Cx location;
    int multiplicity = 1;
};

struct RootSet {
    std::vector<Root> roots;
    // relative coefficient-norm error of the reconstructed polynomial;
    // callers that need certified multiplicities check this against their tol
    double residual = 0.0;

    int total_multiplicity() const {
        int s = 0;
        for (auto& r : roots) s += r.multiplicity;
        return s;
    }
};

// All roots with multiplicities detected by clustering. Aberth-Ehrlich
// iteration followed by a merge loop that stops when the reconstructed
// product of (x - r)^m matches the input within tol in coefficient norm.
RootSet poly_roots(const PolyC& p, double tol = 1e-8);

// Raw simple-root list (no clustering), each repeated root appears as a
// scattered cluster of simple ones.
std::vector<Cx> poly_roots_raw(const PolyC& p);

PolyC from_roots(const RootSet& rs, Cx leading);

} // namespace sl2wild
