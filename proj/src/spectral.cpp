#include <Eigen/Dense>
#include <cmath>

#include "topogcn/features.hpp"

namespace topogcn {

Column fiedler_vector(const DirectedGraph &g) {
    const auto n = g.n_nodes();
    Column result(n, 0.0);
    if (n < 2) {
        return result;
    }

    const auto comp = weak_components(g);
    std::vector<std::size_t> sizes(n, 0);
    for (auto c : comp) {
        ++sizes[c];
    }
    std::uint32_t largest = 0;
    for (std::uint32_t c = 0; c < n; ++c) {
        if (sizes[c] > sizes[largest]) {
            largest = c;
        }
    }
    std::vector<NodeId> members;
    std::vector<Eigen::Index> local(n, -1);
    for (NodeId u = 0; u < n; ++u) {
        if (comp[u] == largest) {
            local[u] = static_cast<Eigen::Index>(members.size());
            members.push_back(u);
        }
    }
    const auto k = static_cast<Eigen::Index>(members.size());
    if (k < 2) {
        return result;
    }

    Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto nb = g.undirected(members[static_cast<std::size_t>(i)]);
        laplacian(i, i) = static_cast<double>(nb.size());
        for (NodeId v : nb) {
            laplacian(i, local[v]) = -1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
    // Eigenvalues come back in ascending order.
    Eigen::VectorXd v = solver.eigenvectors().col(1);
    v.normalize();
    for (Eigen::Index i = 0; i < k; ++i) {
        if (std::abs(v(i)) > 1e-12) {
            if (v(i) < 0.0) {
                v = -v;
            }
            break;
        }
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        result[members[static_cast<std::size_t>(i)]] = v(i);
    }
    return result;
}

} // namespace topogcn
