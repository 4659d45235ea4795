#pragma once

// Dense-eigensolver reference for eigenvector centrality, shared by the unit
// and acceptance suites.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "groupcast/netmetrics.hpp"

namespace groupcast::testing {

inline Eigen::MatrixXd transposed(const Sociogram& g) {
    Eigen::MatrixXd at(g.n(), g.n());
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j) at(i, j) = g.weight(j, i);
    return at;
}

inline std::vector<double> max_normalized(const Eigen::VectorXd& v) {
    std::vector<double> x(static_cast<std::size_t>(v.size()));
    double top = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) top = std::max(top, std::abs(v(i)));
    for (Eigen::Index i = 0; i < v.size(); ++i) x[static_cast<std::size_t>(i)] = std::abs(v(i)) / top;
    return x;
}

struct OracleCheck {
    bool exact = false;  // compared against a unique oracle vector
    double error = 0.0;
};

// Symmetric graphs: the limit is the orthogonal projection of the all-ones
// start onto the dominant eigenspace. Directed graphs: the Perron vector when
// the dominant root is simple; otherwise the centrality must be a non-negative
// eigenvector of the oracle's dominant root.
inline OracleCheck check_against_eigensolver(const Sociogram& g) {
    const auto x = network_metrics(g).eigenvector_centrality;
    const Eigen::MatrixXd at = transposed(g);
    const int n = g.n();
    OracleCheck out;
    if (!g.directed()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(at);
        const double r = es.eigenvalues().maxCoeff();
        Eigen::VectorXd proj = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < n; ++k)
            if (std::abs(es.eigenvalues()(k) - r) < 1e-9 * std::max(1.0, r)) {
                const Eigen::VectorXd v = es.eigenvectors().col(k);
                proj += v * v.sum();
            }
        const auto want = max_normalized(proj);
        out.exact = true;
        for (int i = 0; i < n; ++i)
            out.error = std::max(out.error, std::abs(want[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]));
        return out;
    }
    // The real QR iteration can stall on permutation-like 0/1 matrices (it then
    // reports NoConvergence with garbage values); a diagonal shift keeps the
    // eigenvectors and breaks the symmetry.
    Eigen::EigenSolver<Eigen::MatrixXd> es;
    double shift = 0.0;
    for (double s : {0.0, 0.37, 1.13, 2.71}) {
        shift = s;
        es.compute(at + s * Eigen::MatrixXd::Identity(n, n));
        if (es.info() == Eigen::Success) break;
    }
    if (es.info() != Eigen::Success) {
        out.error = 1.0;
        return out;
    }
    const Eigen::VectorXcd ev = es.eigenvalues().array() - shift;
    int top = 0;
    for (int k = 1; k < n; ++k)
        if (ev(k).real() > ev(top).real()) top = k;
    const double r = ev(top).real();
    // A Jordan block of size k splits under rounding by about eps^(1/k), which
    // is near 1e-3 for k = 5, so "repeated" needs a wide window.
    int near = 0;
    for (int k = 0; k < n; ++k) near += std::abs(ev(k) - ev(top)) < 1e-2 * std::max(1.0, std::abs(r)) ? 1 : 0;
    if (near == 1) {
        // Solver eigenvectors can be polluted by a defective root elsewhere in
        // the spectrum; the null vector of (A^T - rI) is taken from an SVD.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(at - r * Eigen::MatrixXd::Identity(n, n), Eigen::ComputeFullV);
        const auto want = max_normalized(svd.matrixV().col(n - 1));
        out.exact = true;
        for (int i = 0; i < n; ++i)
            out.error = std::max(out.error, std::abs(want[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]));
        return out;
    }
    Eigen::VectorXd xv(n);
    int arg = 0;
    for (int i = 0; i < n; ++i) {
        xv(i) = x[static_cast<std::size_t>(i)];
        if (xv(i) > xv(arg)) arg = i;
        if (xv(i) < 0.0) out.error = 1.0;
    }
    const Eigen::VectorXd ax = at * xv;
    const double rhat = ax(arg) / xv(arg);
    out.error = std::max(out.error, (ax - rhat * xv).cwiseAbs().maxCoeff());
    // Defective roots are ill-conditioned for the solver; the eigenvalue only
    // needs to agree loosely, the eigenvector equation is checked tightly.
    if (std::abs(rhat - r) > 1e-3) out.error = std::max(out.error, std::abs(rhat - r));
    return out;
}

}  // namespace groupcast::testing
