#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bosonchain {

// Phase-space coordinate ordering throughout: phi = (x_1..x_L, p_1..p_L).

enum class Coupling { LongRange, NearestNeighbor };
enum class Measurement { Local, Nonlocal };

struct ModelSpec {
    int sites = 1;            // chain length L, open boundary
    double alpha = 1.0;       // power-law decay exponent
    double omega = 1.0;       // on-site trap frequency
    double coupling = 1.0;    // spring constant K of the pair couplings
    Coupling range = Coupling::LongRange;
    Measurement measurement = Measurement::Local;
    double gamma = 0.0;       // measurement rate; 0 disables monitoring
    double eta = 1.0;         // detector efficiency in [0, 1]
};

inline void validate(const ModelSpec& spec) {
    if (spec.sites < 1)
        throw std::invalid_argument("ModelSpec: sites must be >= 1");
    if (!(spec.alpha > 0.0))
        throw std::invalid_argument("ModelSpec: alpha must be > 0");
    if (!(spec.omega > 0.0))
        throw std::invalid_argument("ModelSpec: omega must be > 0");
    if (spec.coupling < 0.0)
        throw std::invalid_argument("ModelSpec: coupling must be >= 0");
    if (spec.gamma < 0.0)
        throw std::invalid_argument("ModelSpec: gamma must be >= 0");
    if (spec.eta < 0.0 || spec.eta > 1.0)
        throw std::invalid_argument("ModelSpec: eta must lie in [0, 1]");
    if (spec.measurement == Measurement::Nonlocal && spec.gamma > 0.0 && spec.sites < 2)
        throw std::invalid_argument("ModelSpec: nonlocal measurement needs sites >= 2");
}

// Antisymmetric form sigma = [[0, I], [-I, 0]] fixing {x_i, p_j} pairings.
inline Eigen::MatrixXd symplectic_form(int n_modes) {
    if (n_modes < 1)
        throw std::invalid_argument("symplectic_form: n_modes must be >= 1");
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    sigma.topRightCorner(n_modes, n_modes).setIdentity();
    sigma.bottomLeftCorner(n_modes, n_modes) = -Eigen::MatrixXd::Identity(n_modes, n_modes);
    return sigma;
}

// Position-block quadratic form A of H = (1/2) phi^T h phi with
// h = blockdiag(A, omega * I).  Every pair (j, j+r) contributes
// K/r^alpha * (x_j - x_{j+r})^2 / 2, truncated at the open boundary;
// A is therefore omega * I plus a weighted graph Laplacian and is
// positive definite for every alpha > 0.
inline Eigen::MatrixXd position_coupling(const ModelSpec& spec) {
    validate(spec);
    const int L = spec.sites;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L, L);
    A.diagonal().setConstant(spec.omega);
    const int max_range = (spec.range == Coupling::NearestNeighbor) ? 1 : L - 1;
    for (int r = 1; r <= max_range; ++r) {
        const double w = spec.coupling / std::pow(static_cast<double>(r), spec.alpha);
        for (int j = 0; j + r < L; ++j) {
            A(j, j) += w;
            A(j + r, j + r) += w;
            A(j, j + r) -= w;
            A(j + r, j) -= w;
        }
    }
    return A;
}

inline Eigen::MatrixXd build_hamiltonian(const ModelSpec& spec) {
    const int L = spec.sites;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * L, 2 * L);
    h.topLeftCorner(L, L) = position_coupling(spec);
    h.bottomRightCorner(L, L) = spec.omega * Eigen::MatrixXd::Identity(L, L);
    return h;
}

// Rows of O define the monitored quadratures O_n = sum_j O_{nj} phi_j.
// Both families below touch position coordinates only, so O^T O is
// blockdiag(G, 0) with G the position-block kernel.
struct JumpOperatorSet {
    Eigen::MatrixXd O;    // M x 2L
    Eigen::MatrixXd OtO;  // 2L x 2L, equals O^T O
};

// One detector per site, O_n = sqrt(gamma) x_n.
inline JumpOperatorSet build_local_jumps(const ModelSpec& spec) {
    validate(spec);
    const int L = spec.sites;
    JumpOperatorSet set;
    set.O = Eigen::MatrixXd::Zero(L, 2 * L);
    const double c = std::sqrt(spec.gamma);
    for (int n = 0; n < L; ++n)
        set.O(n, n) = c;
    set.OtO = set.O.transpose() * set.O;
    return set;
}

// One detector pair per site pair, O_{(j,r,+-)} = sqrt(gamma/r^alpha) (x_j +- x_{j+r}),
// pairs truncated at the open boundary; M = L(L-1) rows.
inline JumpOperatorSet build_nonlocal_jumps(const ModelSpec& spec) {
    validate(spec);
    const int L = spec.sites;
    if (L < 2)
        throw std::invalid_argument("build_nonlocal_jumps: needs sites >= 2");
    JumpOperatorSet set;
    set.O = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(L) * (L - 1), 2 * L);
    Eigen::Index row = 0;
    for (int r = 1; r <= L - 1; ++r) {
        const double c = std::sqrt(spec.gamma / std::pow(static_cast<double>(r), spec.alpha));
        for (int j = 0; j + r < L; ++j) {
            set.O(row, j) = c;
            set.O(row, j + r) = c;
            ++row;
            set.O(row, j) = c;
            set.O(row, j + r) = -c;
            ++row;
        }
    }
    set.OtO = set.O.transpose() * set.O;
    return set;
}

// Diagonal of the position-block kernel G = (O^T O)_xx without materializing O.
// Local: G = gamma * I.  Nonlocal: the +/- pairs cancel all off-diagonal terms
// and G_jj = 2 gamma (H_{j-1} + H_{L-j}) with H_m = sum_{r=1}^m r^-alpha.
inline Eigen::VectorXd jump_kernel_diagonal(const ModelSpec& spec) {
    validate(spec);
    const int L = spec.sites;
    Eigen::VectorXd g(L);
    if (spec.measurement == Measurement::Local) {
        g.setConstant(spec.gamma);
        return g;
    }
    Eigen::VectorXd H(L);  // H(m) = sum_{r=1}^m r^-alpha, H(0) = 0
    H(0) = 0.0;
    for (int m = 1; m < L; ++m)
        H(m) = H(m - 1) + std::pow(static_cast<double>(m), -spec.alpha);
    for (int j = 1; j <= L; ++j)
        g(j - 1) = 2.0 * spec.gamma * (H(j - 1) + H(L - j));
    return g;
}

inline std::string to_string(Measurement m) {
    return m == Measurement::Local ? "local" : "nonlocal";
}

inline std::string to_string(Coupling c) {
    return c == Coupling::LongRange ? "long_range" : "nearest_neighbor";
}

}  // namespace bosonchain
