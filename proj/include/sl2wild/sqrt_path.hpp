#pragma once

#include <span>
#include <vector>

#include "sl2wild/poly.hpp"

namespace sl2wild {

struct RationalFn {
    PolyC num;
    PolyC den = PolyC::constant(Cx(1, 0));

    Cx eval(Cx x) const { return num.eval(x) / den.eval(x); }
};

// Continuous branch of sqrt(f) along a polyline. Segments are bisected until
// the argument of f moves by less than pi/2 between consecutive samples,
// which pins the sheet without global cuts. Returns the branch value at each
// input node. Throws if the path runs too close to a zero/pole of f.
std::vector<Cx> sqrt_continue(const RationalFn& f, std::span<const Cx> path, Cx initial_branch);

// Stateful single-step form used by the trajectory tracer: given the branch
// value at x0, return the branch value at x1 (bisecting [x0,x1] as needed).
Cx sqrt_step(const RationalFn& f, Cx x0, Cx v0, Cx x1, int depth = 0);

} // namespace sl2wild
