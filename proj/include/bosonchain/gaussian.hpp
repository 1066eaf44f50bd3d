#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bosonchain/model.hpp"

namespace bosonchain {

// Covariance matrix Gamma_ij = <{phi_i, phi_j}>/2 - <phi_i><phi_j> in the
// (x_1..x_N, p_1..p_N) ordering; physical states satisfy Gamma + i sigma / 2 >= 0,
// i.e. every symplectic eigenvalue is >= 1/2.
struct CovarianceState {
    Eigen::MatrixXd gamma;
    double time = 0.0;

    int modes() const { return static_cast<int>(gamma.rows()) / 2; }
};

inline CovarianceState vacuum_state(int n_modes) {
    if (n_modes < 1)
        throw std::invalid_argument("vacuum_state: n_modes must be >= 1");
    return {0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes), 0.0};
}

// Sites are 1-based; a region is a strictly increasing list of sites.
using Region = std::vector<int>;

inline Region contiguous_region(int first, int last) {
    if (first < 1 || last < first)
        throw std::invalid_argument("contiguous_region: need 1 <= first <= last");
    Region r(static_cast<std::size_t>(last - first + 1));
    for (int s = first; s <= last; ++s)
        r[static_cast<std::size_t>(s - first)] = s;
    return r;
}

// Left half {1..floor(L/2)}, the default entropy/negativity cut.
inline Region half_chain_region(int L) {
    if (L < 2)
        throw std::invalid_argument("half_chain_region: needs L >= 2");
    return contiguous_region(1, L / 2);
}

// Separated inner regions used for the mutual-information diagnostic.
// B = {L/4+1 .. 3L/8} and C is its mirror image; when the bounds are not
// integers (L not divisible by 8) they round to the nearest site, keeping
// the region fraction as close to 1/8 as an integer site count allows.
inline Region inner_region_b(int L) {
    if (L < 16 || L % 2 != 0)
        throw std::invalid_argument("inner_region_b: needs even L >= 16");
    const int lo = static_cast<int>(std::lround(L / 4.0)) + 1;
    const int hi = static_cast<int>(std::lround(3.0 * L / 8.0));
    return contiguous_region(lo, hi);
}

inline Region inner_region_c(int L) {
    const Region b = inner_region_b(L);
    return contiguous_region(L + 1 - b.back(), L + 1 - b.front());
}

inline void validate_region(const Region& region, int n_modes) {
    if (region.empty())
        throw std::invalid_argument("region: must be nonempty");
    int prev = 0;
    for (int s : region) {
        if (s <= prev)
            throw std::invalid_argument("region: sites must be strictly increasing");
        if (s > n_modes)
            throw std::invalid_argument("region: site index exceeds chain length");
        prev = s;
    }
}

// Reduced covariance of the kept sites (both quadratures per site).
inline Eigen::MatrixXd reduce(const Eigen::MatrixXd& gamma, const Region& region) {
    const int N = static_cast<int>(gamma.rows()) / 2;
    validate_region(region, N);
    const int m = static_cast<int>(region.size());
    Eigen::VectorXi idx(2 * m);
    for (int i = 0; i < m; ++i) {
        idx(i) = region[static_cast<std::size_t>(i)] - 1;
        idx(m + i) = N + region[static_cast<std::size_t>(i)] - 1;
    }
    return gamma(idx, idx);
}

// Symplectic eigenvalues, one per mode, descending.  Uses the symmetric
// similarity M = Gamma^(1/2) sigma^T Gamma sigma Gamma^(1/2) of -(sigma Gamma)^2,
// whose spectrum is the squared symplectic eigenvalues, each doubled.
inline Eigen::VectorXd symplectic_spectrum(const Eigen::MatrixXd& gamma) {
    const Eigen::Index dim = gamma.rows();
    if (dim < 2 || dim % 2 != 0 || gamma.cols() != dim)
        throw std::invalid_argument("symplectic_spectrum: matrix must be 2N x 2N");
    if (!gamma.isApprox(gamma.transpose(), 1e-10))
        throw std::invalid_argument("symplectic_spectrum: matrix must be symmetric");
    const int N = static_cast<int>(dim) / 2;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gamma + gamma.transpose()));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symplectic_spectrum: eigensolver failed");
    const double lambda_min = es.eigenvalues()(0);
    if (lambda_min <= 0.0)
        throw std::invalid_argument("symplectic_spectrum: matrix must be positive definite");
    Eigen::MatrixXd sqrt_gamma =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

    // C = sigma * sqrt_gamma assembled by block shuffle instead of a product.
    Eigen::MatrixXd C(dim, dim);
    C.topRows(N) = sqrt_gamma.bottomRows(N);
    C.bottomRows(N) = -sqrt_gamma.topRows(N);
    Eigen::MatrixXd M = C.transpose() * gamma * C;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(0.5 * (M + M.transpose()));
    if (em.info() != Eigen::Success)
        throw std::runtime_error("symplectic_spectrum: eigensolver failed");
    Eigen::VectorXd kappa(N);
    // Eigenvalues ascend and come in equal pairs; take one per pair, descending.
    for (int l = 0; l < N; ++l) {
        const double k2 = std::max(em.eigenvalues()(2 * (N - l) - 1), 0.0);
        kappa(l) = std::sqrt(k2);
    }
    return kappa;
}

inline double min_symplectic_eigenvalue(const Eigen::MatrixXd& gamma) {
    const Eigen::VectorXd kappa = symplectic_spectrum(gamma);
    return kappa(kappa.size() - 1);
}

// Heisenberg constraint kappa_l >= 1/2 up to tolerance.
inline bool check_uncertainty(const Eigen::MatrixXd& gamma, double tol = 1e-8) {
    return min_symplectic_eigenvalue(gamma) >= 0.5 - tol;
}

// Entropy contribution of a single symplectic eigenvalue; kappa is clamped
// to the physical domain [1/2, inf) so roundoff below 1/2 contributes zero.
inline double mode_entropy(double kappa) {
    const double k = std::max(kappa, 0.5);
    const double up = k + 0.5;
    const double dn = k - 0.5;
    const double lower = (dn > 0.0) ? dn * std::log(dn) : 0.0;
    return up * std::log(up) - lower;
}

inline double entanglement_entropy(const Eigen::MatrixXd& gamma) {
    const Eigen::VectorXd kappa = symplectic_spectrum(gamma);
    double s = 0.0;
    for (Eigen::Index l = 0; l < kappa.size(); ++l)
        s += mode_entropy(kappa(l));
    return s;
}

inline double entanglement_entropy(const CovarianceState& state, const Region& region) {
    return entanglement_entropy(reduce(state.gamma, region));
}

inline Region region_union_disjoint(const Region& b, const Region& c) {
    Region u;
    u.reserve(b.size() + c.size());
    std::merge(b.begin(), b.end(), c.begin(), c.end(), std::back_inserter(u));
    for (std::size_t i = 1; i < u.size(); ++i)
        if (u[i] == u[i - 1])
            throw std::invalid_argument("mutual_information: regions must be disjoint");
    return u;
}

inline double mutual_information(const CovarianceState& state, const Region& b, const Region& c) {
    const Region u = region_union_disjoint(b, c);
    return entanglement_entropy(state, b) + entanglement_entropy(state, c) -
           entanglement_entropy(state, u);
}

// Logarithmic negativity of `region` against the rest of the chain.  The
// partial transpose flips the sign of every momentum outside the region:
// Gamma~ = T Gamma T with T = diag(1_x, t_p), t_p = +1 kept / -1 traced.
inline double log_negativity(const CovarianceState& state, const Region& region) {
    const int N = state.modes();
    validate_region(region, N);
    Eigen::VectorXd t = Eigen::VectorXd::Ones(2 * N);
    t.tail(N).setConstant(-1.0);
    for (int s : region)
        t(N + s - 1) = 1.0;
    const Eigen::MatrixXd tilted = t.asDiagonal() * state.gamma * t.asDiagonal();
    const Eigen::VectorXd kappa = symplectic_spectrum(tilted);
    double neg = 0.0;
    for (Eigen::Index l = 0; l < kappa.size(); ++l)
        if (2.0 * kappa(l) < 1.0)
            neg += std::log(1.0 / (2.0 * kappa(l)));
    return neg;
}

}  // namespace bosonchain
