#include "mixedpde/finite_difference.hpp"

#include <algorithm>

namespace mixedpde {

std::vector<double> fd_weights(double z, std::span<const double> xs, int d) {
    const int n = static_cast<int>(xs.size()) - 1;
    std::vector<std::vector<double>> c(xs.size(), std::vector<double>(static_cast<std::size_t>(d + 1), 0.0));
    double c1 = 1.0, c4 = xs[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, d);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[static_cast<std::size_t>(i)] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(xs.size());
    for (int i = 0; i <= n; ++i) w[static_cast<std::size_t>(i)] = c[i][d];
    return w;
}

std::vector<double> central_weights(int d, int half_width) {
    std::vector<double> nodes;
    for (int i = -half_width; i <= half_width; ++i) nodes.push_back(i);
    return fd_weights(0.0, nodes, d);
}

}  // namespace mixedpde
