#include "sl2wild/jets.hpp"

#include <cmath>

namespace sl2wild {

JetC jet_of(const std::function<Cx(Cx)>& f, Cx center, int n, double radius) {
    const int N = std::max(64, 4 * (n + 1));
    std::vector<Cx> vals(N);
    for (int k = 0; k < N; ++k) {
        double ang = 2 * M_PI * k / N;
        vals[k] = f(center + radius * Cx(std::cos(ang), std::sin(ang)));
    }
    JetC j;
    j.center = center;
    j.order = n;
    j.coeffs.assign(n + 1, Cx(0, 0));
    for (int m = 0; m <= n; ++m) {
        Cx acc(0, 0);
        for (int k = 0; k < N; ++k) {
            double ang = -2 * M_PI * k * m / N;
            acc += vals[k] * Cx(std::cos(ang), std::sin(ang));
        }
        j.coeffs[m] = acc / (double(N) * std::pow(radius, m));
    }
    return j;
}

} // namespace sl2wild
