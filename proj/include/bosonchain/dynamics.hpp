#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bosonchain/gaussian.hpp"
#include "bosonchain/matrix_io.hpp"
#include "bosonchain/model.hpp"

namespace bosonchain {

struct IntegratorConfig {
    double dt = 1e-3;
    double t_max = 100.0;
    double steady_tol = 1e-9;        // converged when ||dGamma/dt||_F / ||Gamma||_F < steady_tol
    int symmetrize_every = 100;      // steps between explicit resymmetrizations
    int record_every = 100;          // steps between observable records (0 = endpoints only)
    int check_every = 50;            // steps between residual and divergence checks
    double divergence_max = 1e12;    // abort when any |Gamma_ij| exceeds this
    double uncertainty_guard = 1e-4; // abort when min kappa < 1/2 - this at a recorded state
    std::string checkpoint_path;     // empty = no checkpoints
    int checkpoint_every = 0;        // steps between checkpoint writes (0 = off)
};

struct EvolveObservables {
    bool entropy_half_chain = false;
    bool negativity_half_chain = false;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> entropy;     // S of the left half chain, one value per time
    std::vector<double> negativity;  // log negativity of the left half chain
    CovarianceState final_state;
    bool converged = false;
    double final_residual = std::numeric_limits<double>::quiet_NaN();
    long steps = 0;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flow of the conditional covariance under continuous position monitoring:
//   dGamma/dt = F Gamma + Gamma F^T + sigma O^T O sigma^T - 4 eta Gamma O^T O Gamma,
// with F = sigma h.  Reference implementation on full 2N x 2N matrices.
inline Eigen::MatrixXd riccati_rhs(const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& h,
                                   const Eigen::MatrixXd& OtO, double eta) {
    const Eigen::Index dim = gamma.rows();
    if (dim % 2 != 0 || gamma.cols() != dim || h.rows() != dim || OtO.rows() != dim)
        throw std::invalid_argument("riccati_rhs: dimension mismatch");
    const Eigen::MatrixXd sigma = symplectic_form(static_cast<int>(dim) / 2);
    const Eigen::MatrixXd F = sigma * h;
    Eigen::MatrixXd rhs = F * gamma;
    rhs += rhs.transpose().eval();
    rhs += sigma * OtO * sigma.transpose();
    if (eta != 0.0)
        rhs -= 4.0 * eta * gamma * OtO * gamma;
    return rhs;
}

namespace detail {

// Gamma = [[X, C], [C^T, P]] with h = blockdiag(A, omega I) and the
// measurement kernel diagonal on positions, G = diag(g).  The flow closes
// on the blocks:
//   dX = omega (C + C^T)            - 4 eta X G X
//   dC = omega P - X A              - 4 eta X G C
//   dP = G - (A C + C^T A)          - 4 eta C^T G C
struct BlockState {
    Eigen::MatrixXd X, C, P;

    void resize(int L) {
        X.resize(L, L);
        C.resize(L, L);
        P.resize(L, L);
    }
    void setZero(int L) {
        X = Eigen::MatrixXd::Zero(L, L);
        C = Eigen::MatrixXd::Zero(L, L);
        P = Eigen::MatrixXd::Zero(L, L);
    }
    double squaredNorm() const {
        return X.squaredNorm() + 2.0 * C.squaredNorm() + P.squaredNorm();
    }
    double maxAbs() const {
        return std::max({X.cwiseAbs().maxCoeff(), C.cwiseAbs().maxCoeff(),
                         P.cwiseAbs().maxCoeff()});
    }
};

inline BlockState split_blocks(const Eigen::MatrixXd& gamma) {
    const int L = static_cast<int>(gamma.rows()) / 2;
    BlockState b;
    b.X = gamma.topLeftCorner(L, L);
    b.C = gamma.topRightCorner(L, L);
    b.P = gamma.bottomRightCorner(L, L);
    return b;
}

inline Eigen::MatrixXd join_blocks(const BlockState& b) {
    const int L = static_cast<int>(b.X.rows());
    Eigen::MatrixXd gamma(2 * L, 2 * L);
    gamma.topLeftCorner(L, L) = b.X;
    gamma.topRightCorner(L, L) = b.C;
    gamma.bottomLeftCorner(L, L) = b.C.transpose();
    gamma.bottomRightCorner(L, L) = b.P;
    return gamma;
}

class RiccatiStepper {
public:
    RiccatiStepper(const ModelSpec& spec)
        : A_(position_coupling(spec)),
          omega_(spec.omega),
          g_(spec.gamma > 0.0 ? jump_kernel_diagonal(spec)
                              : Eigen::VectorXd::Zero(spec.sites)),
          eta_(spec.eta),
          measured_(spec.gamma > 0.0) {
        const int L = spec.sites;
        for (auto* k : {&k1_, &k2_, &k3_, &k4_, &work_})
            k->resize(L);
        XG_.resize(L, L);
        XA_.resize(L, L);
        AC_.resize(L, L);
        GC_.resize(L, L);
    }

    void rhs(const BlockState& s, BlockState& out) {
        out.X.noalias() = omega_ * (s.C + s.C.transpose());
        XA_.noalias() = s.X * A_;
        out.C.noalias() = omega_ * s.P - XA_;
        AC_.noalias() = A_ * s.C;
        out.P.noalias() = -AC_ - AC_.transpose();
        if (measured_) {
            out.P.diagonal() += g_;
            if (eta_ != 0.0) {
                XG_ = s.X * g_.asDiagonal();
                GC_ = g_.asDiagonal() * s.C;
                out.X.noalias() -= 4.0 * eta_ * (XG_ * s.X);
                out.C.noalias() -= 4.0 * eta_ * (XG_ * s.C);
                out.P.noalias() -= 4.0 * eta_ * (s.C.transpose() * GC_);
            }
        }
    }

    // Classical 4th-order Runge-Kutta step, in place.
    void step(BlockState& s, double dt) {
        rhs(s, k1_);
        axpy(work_, s, 0.5 * dt, k1_);
        rhs(work_, k2_);
        axpy(work_, s, 0.5 * dt, k2_);
        rhs(work_, k3_);
        axpy(work_, s, dt, k3_);
        rhs(work_, k4_);
        const double w = dt / 6.0;
        s.X += w * (k1_.X + 2.0 * k2_.X + 2.0 * k3_.X + k4_.X);
        s.C += w * (k1_.C + 2.0 * k2_.C + 2.0 * k3_.C + k4_.C);
        s.P += w * (k1_.P + 2.0 * k2_.P + 2.0 * k3_.P + k4_.P);
    }

    double residual(const BlockState& s) {
        rhs(s, k1_);
        const double denom = std::sqrt(s.squaredNorm());
        return std::sqrt(k1_.squaredNorm()) / (denom > 0.0 ? denom : 1.0);
    }

private:
    static void axpy(BlockState& out, const BlockState& base, double a, const BlockState& k) {
        out.X.noalias() = base.X + a * k.X;
        out.C.noalias() = base.C + a * k.C;
        out.P.noalias() = base.P + a * k.P;
    }

    Eigen::MatrixXd A_;
    double omega_;
    Eigen::VectorXd g_;
    double eta_;
    bool measured_;
    BlockState k1_, k2_, k3_, k4_, work_;
    Eigen::MatrixXd XG_, XA_, AC_, GC_;
};

}  // namespace detail

inline TrajectoryRecord evolve(const ModelSpec& spec, const CovarianceState& initial,
                               const IntegratorConfig& cfg,
                               const EvolveObservables& obs = {}) {
    validate(spec);
    if (cfg.dt <= 0.0 || cfg.t_max <= 0.0 || cfg.steady_tol < 0.0)
        throw std::invalid_argument("evolve: dt and t_max must be positive");
    const int L = spec.sites;
    if (initial.gamma.rows() != 2 * L || initial.gamma.cols() != 2 * L)
        throw std::invalid_argument("evolve: state dimension does not match model");
    if (!check_uncertainty(initial.gamma, 1e-8))
        throw std::invalid_argument("evolve: initial state violates the uncertainty bound");

    const bool want_records = obs.entropy_half_chain || obs.negativity_half_chain;
    const Region half = (L >= 2) ? half_chain_region(L) : Region{};

    detail::RiccatiStepper stepper(spec);
    detail::BlockState state = detail::split_blocks(initial.gamma);

    TrajectoryRecord record;
    record.final_state.time = initial.time;

    auto record_observables = [&](double t) {
        const Eigen::MatrixXd gamma = detail::join_blocks(state);
        if (min_symplectic_eigenvalue(gamma) < 0.5 - cfg.uncertainty_guard)
            throw DivergenceError("evolve: uncertainty bound violated at t = " + std::to_string(t));
        record.times.push_back(t);
        if (obs.entropy_half_chain)
            record.entropy.push_back(L >= 2 ? entanglement_entropy(reduce(gamma, half)) : 0.0);
        if (obs.negativity_half_chain)
            record.negativity.push_back(L >= 2 ? log_negativity({gamma, t}, half) : 0.0);
    };

    if (want_records)
        record_observables(initial.time);

    double t = initial.time;
    long step_index = 0;
    double residual = stepper.residual(state);
    bool converged = residual < cfg.steady_tol;

    while (!converged && t < cfg.t_max - 0.5 * cfg.dt) {
        stepper.step(state, cfg.dt);
        t += cfg.dt;
        ++step_index;

        if (cfg.symmetrize_every > 0 && step_index % cfg.symmetrize_every == 0) {
            state.X = 0.5 * (state.X + state.X.transpose()).eval();
            state.P = 0.5 * (state.P + state.P.transpose()).eval();
        }
        if (cfg.check_every > 0 && step_index % cfg.check_every == 0) {
            if (state.maxAbs() > cfg.divergence_max)
                throw DivergenceError("evolve: covariance entry exceeded divergence bound at t = " +
                                      std::to_string(t));
            residual = stepper.residual(state);
            if (residual < cfg.steady_tol)
                converged = true;
        }
        if (want_records && cfg.record_every > 0 && step_index % cfg.record_every == 0)
            record_observables(t);
        if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() &&
            step_index % cfg.checkpoint_every == 0)
            save_state(cfg.checkpoint_path, {detail::join_blocks(state), t});
    }

    record.final_state.gamma = detail::join_blocks(state);
    record.final_state.gamma = 0.5 * (record.final_state.gamma +
                                      record.final_state.gamma.transpose()).eval();
    record.final_state.time = t;
    record.steps = step_index;
    record.final_residual = stepper.residual(state);
    record.converged = record.final_residual < cfg.steady_tol;
    if (want_records && (record.times.empty() || record.times.back() < t))
        record_observables(t);
    else if (min_symplectic_eigenvalue(record.final_state.gamma) < 0.5 - cfg.uncertainty_guard)
        throw DivergenceError("evolve: uncertainty bound violated at final state");
    return record;
}

inline TrajectoryRecord evolve(const ModelSpec& spec, const IntegratorConfig& cfg,
                               const EvolveObservables& obs = {}) {
    return evolve(spec, vacuum_state(spec.sites), cfg, obs);
}

struct SteadyStateResult {
    CovarianceState state;
    bool converged = false;
    double residual = std::numeric_limits<double>::quiet_NaN();
    long steps = 0;
};

// Relaxes the vacuum to the unique fixed point of the covariance flow.
// With validate_uniqueness a second run from 0.7 I must land on the same
// fixed point within uniqueness_factor * steady_tol, elementwise.
inline SteadyStateResult steady_state(const ModelSpec& spec, const IntegratorConfig& cfg,
                                      bool validate_uniqueness = false,
                                      double uniqueness_factor = 10.0) {
    TrajectoryRecord run = evolve(spec, cfg);
    SteadyStateResult result{run.final_state, run.converged, run.final_residual, run.steps};
    if (validate_uniqueness) {
        CovarianceState alt{0.7 * Eigen::MatrixXd::Identity(2 * spec.sites, 2 * spec.sites), 0.0};
        TrajectoryRecord other = evolve(spec, alt, cfg);
        const double diff =
            (other.final_state.gamma - result.state.gamma).cwiseAbs().maxCoeff();
        if (diff > uniqueness_factor * cfg.steady_tol)
            throw std::runtime_error(
                "steady_state: fixed point depends on the initial condition, diff = " +
                std::to_string(diff));
    }
    return result;
}

// Euler-Maruyama sampling of the conditional means,
//   d phi = sigma h phi dt + 2 Gamma(t) O^T dW,
// against a frozen covariance path (one snapshot per step; a single entry
// is held constant).  Returns phi at t = 0, dt, 2 dt, ... as rows.
inline Eigen::MatrixXd sample_mean_trajectory(const Eigen::MatrixXd& h,
                                              const std::vector<Eigen::MatrixXd>& gamma_path,
                                              const Eigen::MatrixXd& O,
                                              const Eigen::VectorXd& phi0, std::uint64_t seed,
                                              double dt, double t_max) {
    const Eigen::Index dim = phi0.size();
    if (dim % 2 != 0 || h.rows() != dim || h.cols() != dim)
        throw std::invalid_argument("sample_mean_trajectory: dimension mismatch");
    if (gamma_path.empty())
        throw std::invalid_argument("sample_mean_trajectory: covariance path is empty");
    if (O.cols() != dim)
        throw std::invalid_argument("sample_mean_trajectory: jump matrix column mismatch");
    if (dt <= 0.0 || t_max <= 0.0)
        throw std::invalid_argument("sample_mean_trajectory: dt and t_max must be positive");
    const int n_steps = static_cast<int>(std::llround(t_max / dt));
    const int N = static_cast<int>(dim) / 2;

    const Eigen::MatrixXd sigma = symplectic_form(N);
    const Eigen::MatrixXd F = sigma * h;
    const Eigen::Index M = O.rows();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double root_dt = std::sqrt(dt);

    Eigen::MatrixXd out(n_steps + 1, dim);
    Eigen::VectorXd phi = phi0;
    out.row(0) = phi.transpose();
    Eigen::MatrixXd B;  // 2N x M diffusion, rebuilt only when the path moves
    Eigen::VectorXd dW(M);
    for (int step = 0; step < n_steps; ++step) {
        const Eigen::MatrixXd& gamma =
            gamma_path[gamma_path.size() == 1 ? 0 : std::min<std::size_t>(step, gamma_path.size() - 1)];
        if (gamma_path.size() > 1 || step == 0)
            B = 2.0 * gamma * O.transpose();
        for (Eigen::Index m = 0; m < M; ++m)
            dW(m) = normal(rng) * root_dt;
        phi += dt * (F * phi) + B * dW;
        out.row(step + 1) = phi.transpose();
    }
    return out;
}

enum class GrowthClassification { GrowsWithSize, SizeIndependent, Indeterminate };

struct GrowthRateScan {
    std::vector<int> sizes;
    std::vector<double> rates;   // least-squares slope of S_A(t) over the window
    double slope = 0.0;          // regression of rate against L
    double intercept = 0.0;
    double r_squared = 0.0;
    double relative_spread = 0.0;
    GrowthClassification classification = GrowthClassification::Indeterminate;
};

// Unitary entropy production: evolves each size without measurement and fits
// S_A(t) linearly inside [window_lo, window_hi].  cfg.record_every must
// resolve the window with at least three samples.
inline GrowthRateScan entanglement_growth_rate(const ModelSpec& base, const std::vector<int>& sizes,
                                               double window_lo, double window_hi,
                                               const IntegratorConfig& cfg) {
    if (sizes.size() < 2)
        throw std::invalid_argument("entanglement_growth_rate: need at least two sizes");
    if (!(window_lo >= 0.0 && window_hi > window_lo))
        throw std::invalid_argument("entanglement_growth_rate: bad fit window");
    GrowthRateScan scan;
    EvolveObservables obs;
    obs.entropy_half_chain = true;
    for (int L : sizes) {
        ModelSpec spec = base;
        spec.sites = L;
        spec.gamma = 0.0;
        IntegratorConfig run_cfg = cfg;
        run_cfg.t_max = window_hi;
        run_cfg.steady_tol = 0.0;  // transient study; never stop early
        TrajectoryRecord record = evolve(spec, run_cfg, obs);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t i = 0; i < record.times.size(); ++i) {
            const double t = record.times[i];
            if (t < window_lo - 1e-12 || t > window_hi + 1e-12)
                continue;
            sx += t;
            sy += record.entropy[i];
            sxx += t * t;
            sxy += t * record.entropy[i];
            ++n;
        }
        if (n < 3)
            throw std::invalid_argument("entanglement_growth_rate: window holds fewer than 3 samples");
        const double denom = n * sxx - sx * sx;
        scan.sizes.push_back(L);
        scan.rates.push_back((n * sxy - sx * sy) / denom);
    }
    // regression of the rates against L
    {
        const int n = static_cast<int>(scan.sizes.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (int i = 0; i < n; ++i) {
            const double x = scan.sizes[static_cast<std::size_t>(i)];
            const double y = scan.rates[static_cast<std::size_t>(i)];
            sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
        }
        const double sxx_c = sxx - sx * sx / n;
        const double sxy_c = sxy - sx * sy / n;
        const double syy_c = syy - sy * sy / n;
        scan.slope = sxy_c / sxx_c;
        scan.intercept = (sy - scan.slope * sx) / n;
        scan.r_squared = (syy_c > 0.0) ? (sxy_c * sxy_c) / (sxx_c * syy_c) : 1.0;
        const auto [mn, mx] = std::minmax_element(scan.rates.begin(), scan.rates.end());
        const double mean = sy / n;
        scan.relative_spread = (mean != 0.0) ? (*mx - *mn) / std::abs(mean)
                                             : std::numeric_limits<double>::infinity();
    }
    if (scan.relative_spread < 0.2)
        scan.classification = GrowthClassification::SizeIndependent;
    else if (scan.slope > 0.0 && scan.r_squared > 0.9)
        scan.classification = GrowthClassification::GrowsWithSize;
    return scan;
}

}  // namespace bosonchain
