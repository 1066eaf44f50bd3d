#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bosonchain/model.hpp"

namespace bosonchain {

namespace detail {

// Wynn epsilon table over a window of partial sums; even columns are the
// accelerated estimates.  Returns the deepest even-column value and a
// crude error estimate from the last two column steps.
inline std::complex<double> wynn_epsilon(const std::vector<std::complex<double>>& partial,
                                         double& err) {
    const std::size_t n = partial.size();
    std::vector<std::complex<double>> prev(n + 1, 0.0);  // epsilon_{k-1}
    std::vector<std::complex<double>> cur(partial);      // epsilon_k, k = 0
    std::complex<double> best = cur.back();
    err = std::abs(best);
    std::complex<double> last_even = best;
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<std::complex<double>> next(n - k);
        for (std::size_t j = 0; j + k < n; ++j) {
            const std::complex<double> diff = cur[j + 1] - cur[j];
            if (std::abs(diff) < 1e-300) {
                // column converged exactly; its neighbor is the answer
                err = 0.0;
                return cur[j + 1];
            }
            next[j] = prev[j + 1] + 1.0 / diff;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0 && !cur.empty()) {
            best = cur.back();
            err = std::abs(best - last_even);
            last_even = best;
        }
    }
    return best;
}

}  // namespace detail

// Sum_{r>=1} z^r / r^alpha on the closed unit disk.  Direct summation with a
// monotone tail bound for |z| < 1; for |z| = 1 either direct summation under
// the integral tail bound (alpha > 1, when affordable) or epsilon-accelerated
// partial sums.  z = 1 with alpha <= 1 is the pole and is rejected.
inline std::complex<double> polylog(double alpha, std::complex<double> z, double tol = 1e-10) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("polylog: alpha must be > 0");
    if (!(tol >= 1e-13))
        throw std::invalid_argument("polylog: tol must be >= 1e-13");
    const double az = std::abs(z);
    if (az > 1.0 + 1e-12)
        throw std::invalid_argument("polylog: |z| must be <= 1");
    if (az == 0.0)
        return 0.0;

    const bool on_circle = az >= 1.0 - 1e-12;
    if (on_circle && std::abs(z - 1.0) < 1e-12) {
        if (alpha <= 1.0)
            throw std::invalid_argument("polylog: pole at z = 1 for alpha <= 1");
        // zeta(alpha) through the alternating series, which accelerates well
        const std::complex<double> eta = -polylog(alpha, -1.0, tol);
        return eta / (1.0 - std::pow(2.0, 1.0 - alpha));
    }

    if (!on_circle) {
        // |tail after R| <= |z|^{R+1} (R+1)^-alpha / (1 - |z|)
        std::complex<double> sum = 0.0;
        std::complex<double> zr = 1.0;
        const double guard = 1.0 - az;
        for (long r = 1; r <= 50000000L; ++r) {
            zr *= z;
            sum += zr / std::pow(static_cast<double>(r), alpha);
            const double bound = std::abs(zr) * az / (std::pow(static_cast<double>(r + 1), alpha) * guard);
            if (bound < tol)
                return sum;
        }
        throw std::runtime_error("polylog: direct sum did not converge (|z| too close to 1)");
    }

    // on the circle, z != 1
    if (alpha > 1.0) {
        const double r_needed = std::pow(tol * (alpha - 1.0), 1.0 / (1.0 - alpha));
        if (r_needed <= 3e6) {
            const long R = static_cast<long>(r_needed) + 1;
            std::complex<double> sum = 0.0;
            std::complex<double> zr = 1.0;
            for (long r = 1; r <= R; ++r) {
                zr *= z;
                sum += zr / std::pow(static_cast<double>(r), alpha);
            }
            return sum;
        }
    }

    // epsilon acceleration; the window must span several oscillation periods
    const double q = std::abs(std::arg(z));
    const double period = 2.0 * M_PI / std::max(q, 1e-6);
    const std::size_t window = static_cast<std::size_t>(
        std::min(8000.0, std::max(48.0, 6.0 * period)));
    std::vector<std::complex<double>> partial;
    partial.reserve(window);
    std::complex<double> sum = 0.0;
    std::complex<double> zr = 1.0;
    std::complex<double> prev_best = 0.0;
    bool have_prev = false;
    const long n_max = 400000;
    for (long r = 1; r <= n_max; ++r) {
        zr *= z;
        sum += zr / std::pow(static_cast<double>(r), alpha);
        partial.push_back(sum);
        if (partial.size() == window || r == n_max) {
            double err = 0.0;
            const std::complex<double> best = detail::wynn_epsilon(partial, err);
            if (have_prev)
                err = std::max(err, std::abs(best - prev_best)) * 0.5;
            if (err < tol)
                return best;
            prev_best = best;
            have_prev = true;
            // keep the tail half of the window and continue accumulating
            partial.erase(partial.begin(),
                          partial.begin() + static_cast<std::ptrdiff_t>(partial.size() / 2));
        }
    }
    throw std::runtime_error("polylog: accelerated sum did not converge");
}

// Analytic continuation of zeta through the alternating series,
// zeta(s) = -Li_s(-1) / (1 - 2^{1-s}); valid for s > 0, s != 1.
inline double zeta_continued(double alpha, double tol = 1e-12) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("zeta_continued: alpha must be > 0");
    if (std::abs(alpha - 1.0) < 1e-10)
        throw std::invalid_argument("zeta_continued: pole at alpha = 1");
    const std::complex<double> eta = -polylog(alpha, -1.0, tol);
    return eta.real() / (1.0 - std::pow(2.0, 1.0 - alpha));
}

// Lattice form factor of the power-law couplings,
//   h_alpha(q) = 2 zeta(alpha) - Li_alpha(e^{iq}) - Li_alpha(e^{-iq}),
// with h_alpha(0) = 0.  For alpha > 1 this is the convergent series
// sum_r (2/r^alpha)(1 - cos qr); for alpha < 1 it is the analytic
// continuation, which is negative for every q != 0.  alpha = 1 is a pole.
inline double dispersion_h(double alpha, double q, double tol = 1e-10) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("dispersion_h: alpha must be > 0");
    if (std::abs(alpha - 1.0) < 1e-10)
        throw std::invalid_argument("dispersion_h: pole at alpha = 1");
    const std::complex<double> z(std::cos(q), std::sin(q));
    if (std::abs(z - 1.0) < 1e-12)
        return 0.0;
    const double re_li = polylog(alpha, z, tol).real();
    return 2.0 * zeta_continued(alpha, std::min(tol, 1e-12)) - 2.0 * re_li;
}

enum class DispersionKind { Unitary, Local, Nonlocal };

// Continuum mode frequency; the branch with Im omega <= 0 is returned so
// that monitored modes decay.
inline std::complex<double> nh_dispersion(DispersionKind kind, double alpha, double q,
                                          double gamma, double omega = 1.0, double coupling = 1.0,
                                          double tol = 1e-10) {
    if (!(omega > 0.0) || coupling < 0.0 || gamma < 0.0)
        throw std::invalid_argument("nh_dispersion: bad parameters");
    std::complex<double> a = omega + coupling * dispersion_h(alpha, q, tol);
    switch (kind) {
        case DispersionKind::Unitary:
            break;
        case DispersionKind::Local:
            a -= std::complex<double>(0.0, 2.0 * gamma);
            break;
        case DispersionKind::Nonlocal: {
            if (alpha <= 1.0)
                throw std::invalid_argument("nh_dispersion: nonlocal kind needs alpha > 1");
            const double li1 = zeta_continued(alpha, std::min(tol, 1e-12));
            a -= std::complex<double>(0.0, 8.0 * gamma * li1);
            break;
        }
    }
    std::complex<double> w = std::sqrt(omega * a);
    if (w.imag() > 0.0)
        w = -w;
    return w;
}

// Finite-chain mode frequencies omega_k = sqrt(omega * a_k) with a_k the
// eigenvalues of A - 2i G, A the position coupling block and G the
// position-block measurement kernel; branch Im omega <= 0.  Sorted by
// ascending real part.
inline Eigen::VectorXcd nh_spectrum_finite(const ModelSpec& spec) {
    validate(spec);
    const Eigen::MatrixXd A = position_coupling(spec);
    Eigen::MatrixXcd Ac = A.cast<std::complex<double>>();
    if (spec.gamma > 0.0) {
        const Eigen::VectorXd g = jump_kernel_diagonal(spec);
        Ac.diagonal() -= std::complex<double>(0.0, 2.0) * g.cast<std::complex<double>>();
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Ac, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("nh_spectrum_finite: eigensolver failed");
    Eigen::VectorXcd w = es.eigenvalues();
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        std::complex<double> root = std::sqrt(spec.omega * w(k));
        if (root.imag() > 0.0)
            root = -root;
        w(k) = root;
    }
    std::sort(w.data(), w.data() + w.size(),
              [](const std::complex<double>& lhs, const std::complex<double>& rhs) {
                  return lhs.real() < rhs.real();
              });
    return w;
}

// Large-distance envelope of the steady position correlations,
//   f(d) = exp(-d/kappa) / sqrt(d/kappa),
// with kappa = K / sqrt(omega^2 + 4 gamma_eff^2); the nonlocal family
// renormalizes gamma_eff = 4 gamma, the unitary case has gamma_eff = 0.
inline double asymptotic_correlation(DispersionKind kind, double d, double gamma,
                                     double omega = 1.0, double coupling = 1.0) {
    if (!(d > 0.0) || !(omega > 0.0) || !(coupling > 0.0) || gamma < 0.0)
        throw std::invalid_argument("asymptotic_correlation: bad parameters");
    double gamma_eff = 0.0;
    if (kind == DispersionKind::Local)
        gamma_eff = gamma;
    else if (kind == DispersionKind::Nonlocal)
        gamma_eff = 4.0 * gamma;
    const double kappa = coupling / std::sqrt(omega * omega + 4.0 * gamma_eff * gamma_eff);
    const double x = d / kappa;
    return std::exp(-x) / std::sqrt(x);
}

// Stable integrator step from spectral bounds: the stiffest covariance mode
// rotates at 2 omega_max (Gershgorin bound on A) and the measurement
// backaction contracts at ~4 eta g_max; the step keeps |rate * dt| <= 2,
// inside the classical fourth-order stability region.
inline double suggested_timestep(const ModelSpec& spec) {
    validate(spec);
    const Eigen::MatrixXd A = position_coupling(spec);
    const double rho = A.cwiseAbs().rowwise().sum().maxCoeff();
    double gmax = 0.0;
    if (spec.gamma > 0.0)
        gmax = jump_kernel_diagonal(spec).maxCoeff();
    const double rate = 2.0 * std::sqrt(spec.omega * rho) + 4.0 * spec.eta * gmax + 1.0;
    return 2.0 / rate;
}

// Slowest covariance relaxation rate 2 min_k |Im omega_k| of the monitored
// chain; the transient toward the steady state decays at this rate when
// eta = 1 (slower for partial efficiency).
inline double relaxation_rate(const ModelSpec& spec) {
    const Eigen::VectorXcd w = nh_spectrum_finite(spec);
    double min_im = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < w.size(); ++k)
        min_im = std::min(min_im, -w(k).imag());
    return 2.0 * std::max(min_im, 0.0);
}

// Integration horizon that lets the transient decay below the residual
// target, with margin.  Requires a damped model (gamma > 0, eta > 0).
inline double suggested_t_max(const ModelSpec& spec, double steady_tol) {
    if (!(spec.gamma > 0.0) || !(spec.eta > 0.0))
        throw std::invalid_argument("suggested_t_max: undamped model has no relaxation scale");
    if (!(steady_tol > 0.0))
        throw std::invalid_argument("suggested_t_max: steady_tol must be positive");
    const double rate = relaxation_rate(spec) * std::max(spec.eta, 0.5);
    if (!(rate > 0.0))
        throw std::invalid_argument("suggested_t_max: spectrum has an undamped mode");
    return 2.5 * std::log(1.0 / steady_tol) / rate;
}

}  // namespace bosonchain
