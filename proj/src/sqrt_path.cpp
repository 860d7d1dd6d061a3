#include "sl2wild/sqrt_path.hpp"

#include <cmath>

namespace sl2wild {

namespace {

// Bisection depth bounds the admissible closeness to a zero/pole: a segment
// needing more than 2^kMaxDepth subdivisions runs within |segment|*2^-kMaxDepth
// of a ramification point and is rejected.
constexpr int kMaxDepth = 26;

Cx pick_branch(Cx w, Cx prev) {
    Cx s = std::sqrt(w);
    if (std::norm(s - prev) > std::norm(s + prev)) s = -s;
    return s;
}

} // namespace

Cx sqrt_step(const RationalFn& f, Cx x0, Cx v0, Cx x1, int depth) {
    Cx w0 = v0 * v0;
    Cx w1 = f.eval(x1);
    if (!(std::isfinite(w1.real()) && std::isfinite(w1.imag())))
        throw error("sqrt_continue: path hits a pole");
    // accept |darg| < pi/2 with a fixed slack; without the slack a path
    // skimming a zero satisfies the open inequality at every bisection level
    Cx ratio = w1 / w0;
    if (std::isfinite(ratio.real()) && std::abs(std::arg(ratio)) < M_PI / 2 - 0.2)
        return pick_branch(w1, v0);
    if (depth >= kMaxDepth)
        throw error("sqrt_continue: branch ambiguity, path too close to a zero/pole");
    Cx xm = 0.5 * (x0 + x1);
    Cx vm = sqrt_step(f, x0, v0, xm, depth + 1);
    return sqrt_step(f, xm, vm, x1, depth + 1);
}

std::vector<Cx> sqrt_continue(const RationalFn& f, std::span<const Cx> path, Cx initial_branch) {
    if (path.empty()) return {};
    Cx w0 = f.eval(path[0]);
    double scale = std::max(1.0, std::abs(w0));
    if (std::abs(initial_branch * initial_branch - w0) > 1e-6 * scale)
        throw error("sqrt_continue: initial branch does not square to f(start)");
    std::vector<Cx> out;
    out.reserve(path.size());
    Cx v = initial_branch;
    out.push_back(v);
    for (size_t i = 1; i < path.size(); ++i) {
        v = sqrt_step(f, path[i - 1], v, path[i]);
        out.push_back(v);
    }
    return out;
}

} // namespace sl2wild
