#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "schro/uq.hpp"

namespace schro {

std::vector<double> z_position_matrix(int n_max) {
    if (n_max < 0) fail(ErrorKind::Validation, "n_max must be >= 0");
    const int n = n_max + 1;
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k + 1 < n; ++k) {
        const double v = std::sqrt((k + 1) / 2.0);
        m[(k + 1) * n + k] = v;
        m[k * n + k + 1] = v;
    }
    return m;
}

GaussHermite gauss_hermite(int order) {
    if (order < 1) fail(ErrorKind::Validation, "quadrature order must be >= 1");
    // Golub-Welsch on the orthonormal three-term recurrence
    Eigen::VectorXd d = Eigen::VectorXd::Zero(order), e(std::max(order - 1, 0));
    for (int k = 0; k + 1 < order; ++k) e[k] = std::sqrt((k + 1) / 2.0);
    GaussHermite g;
    if (order == 1) {
        g.nodes = {0.0};
        g.weights = {1.0};
        return g;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    for (int i = 0; i < order; ++i) {
        g.nodes.push_back(es.eigenvalues()[i]);
        const double q = es.eigenvectors()(0, i);
        g.weights.push_back(q * q);
    }
    return g;
}

std::vector<double> hermite_normalized(int n_max, double z) {
    std::vector<double> p(n_max + 1);
    p[0] = 1.0;
    if (n_max >= 1) p[1] = std::sqrt(2.0) * z;
    // z P_k = sqrt((k+1)/2) P_{k+1} + sqrt(k/2) P_{k-1}
    for (int k = 1; k < n_max; ++k) p[k + 1] = (z * p[k] - std::sqrt(k / 2.0) * p[k - 1]) / std::sqrt((k + 1) / 2.0);
    return p;
}


CVec hermite_project(const StochasticField& u0, const Layout& L, int order) {
    if (L.fock.empty()) fail(ErrorKind::Validation, "layout has no stochastic axes");
    if (L.qubits) fail(ErrorKind::Unsupported, "chaos projection on a qubit layout");
    const int nd = static_cast<int>(L.fock.size());
    int top = 0;
    for (int f : L.fock) top = std::max(top, f - 1);
    if (order == 0) order = std::max(2 * top, 1);
    if (order < top + 1) fail(ErrorKind::Validation, "quadrature order must be at least n_max + 1");
    const GaussHermite gh = gauss_hermite(order);
    const std::size_t M = L.mode_size(), F = L.block_count();
    CVec out(F * M, 0.0);

    std::vector<std::vector<std::vector<double>>> P(nd);  // P[axis][node][n]
    for (int a = 0; a < nd; ++a)
        for (int q = 0; q < order; ++q) P[a].push_back(hermite_normalized(L.fock[a] - 1, gh.nodes[q]));

    std::vector<double> z(nd);
    for_each_index(std::vector<int>(nd, order), [&](std::size_t, const std::vector<int>& node) {
        double w = 1.0;
        for (int a = 0; a < nd; ++a) {
            z[a] = gh.nodes[node[a]];
            w *= gh.weights[node[a]];
        }
        const CVec u = u0(z);
        if (u.size() != M) fail(ErrorKind::Validation, "stochastic field has the wrong size");
        for_each_index(L.fock, [&](std::size_t b, const std::vector<int>& n) {
            double pw = w;
            for (int a = 0; a < nd; ++a) pw *= P[a][node[a]][n[a]];
            cplx* o = out.data() + b * M;
            for (std::size_t i = 0; i < M; ++i) o[i] += pw * u[i];
        });
    });
    return out;
}

ChaosStatistics extract_statistics(const CVec& chaos, const Layout& L) {
    if (L.qubits) fail(ErrorKind::Unsupported, "project the qubits out first");
    const std::size_t M = L.mode_size(), F = L.block_count();
    if (chaos.size() != F * M) fail(ErrorKind::Validation, "chaos field has the wrong size");
    ChaosStatistics st;
    st.mean.assign(chaos.begin(), chaos.begin() + M);
    st.variance.assign(M, 0.0);
    double total = 0.0, top = 0.0;
    for_each_index(L.fock, [&](std::size_t b, const std::vector<int>& n) {
        bool edge = false;
        for (std::size_t a = 0; a < n.size(); ++a) edge = edge || n[a] == L.fock[a] - 1;
        const cplx* u = chaos.data() + b * M;
        double m = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double q = std::norm(u[i]);
            m += q;
            if (b) st.variance[i] += q;
        }
        total += m;
        if (edge && b) top += m;
    });
    st.top_population = total > 0.0 ? top / total : 0.0;
    return st;
}

SchrodingerisedSystem build_uq_generator(const PdeSpec& spec, const GridSpec& g, Pipeline p) {
    if (spec.L <= 0) fail(ErrorKind::Validation, "uncertain spec needs stochastic dimensions");
    if (static_cast<int>(g.n_max.size()) != spec.L) fail(ErrorKind::Validation, "need one Fock cutoff per stochastic dimension");
    for (const auto& t : spec.terms)
        if (!t.coef.is_polynomial()) fail(ErrorKind::Validation, "speeds must be polynomial in z");
    return schrodingerise(spec, g, p);
}

}  // namespace schro
