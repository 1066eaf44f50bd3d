#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bosonchain {

struct FitResult {
    std::map<std::string, double> params;
    std::map<std::string, double> stderrs;
    double mse = std::numeric_limits<double>::quiet_NaN();  // mean squared residual, fitted scale
    int n_points = 0;
};

namespace detail {

struct LinFit {
    double slope, intercept, se_slope, se_intercept, sse;
    int n;
};

// Ordinary or inverse-variance weighted straight-line fit.  With known
// point errors the parameter covariance comes from the weights alone;
// otherwise it is scaled by the residual variance.
inline LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>* sigma = nullptr) {
    const int n = static_cast<int>(x.size());
    if (n < 2 || y.size() != x.size())
        throw std::invalid_argument("linear_fit: need two or more (x, y) pairs");
    if (sigma && sigma->size() != x.size())
        throw std::invalid_argument("linear_fit: sigma length mismatch");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (int i = 0; i < n; ++i) {
        double w = 1.0;
        if (sigma) {
            const double s = (*sigma)[static_cast<std::size_t>(i)];
            if (!(s > 0.0))
                throw std::invalid_argument("linear_fit: sigma values must be positive");
            w = 1.0 / (s * s);
        }
        sw += w;
        swx += w * x[static_cast<std::size_t>(i)];
        swy += w * y[static_cast<std::size_t>(i)];
        swxx += w * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        swxy += w * x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    }
    const double sxx = swxx - swx * swx / sw;
    const double sxy = swxy - swx * swy / sw;
    if (!(sxx > 1e-14 * std::max(1.0, swxx)))
        throw std::invalid_argument("linear_fit: abscissae are degenerate");
    LinFit f{};
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = (swy - f.slope * swx) / sw;
    f.sse = 0.0;
    for (int i = 0; i < n; ++i) {
        double w = 1.0;
        if (sigma) {
            const double s = (*sigma)[static_cast<std::size_t>(i)];
            w = 1.0 / (s * s);
        }
        const double r = y[static_cast<std::size_t>(i)] -
                         (f.intercept + f.slope * x[static_cast<std::size_t>(i)]);
        f.sse += w * r * r;
    }
    const double scale = sigma ? 1.0 : (n > 2 ? f.sse / (n - 2) : 0.0);
    f.se_slope = std::sqrt(scale / sxx);
    f.se_intercept = std::sqrt(scale * (1.0 / sw + (swx / sw) * (swx / sw) / sxx));
    return f;
}

inline double linear_interp(const std::vector<double>& xs, const std::vector<double>& ys,
                            double x) {
    if (xs.size() < 2)
        throw std::invalid_argument("linear_interp: need at least two nodes");
    if (x < xs.front() - 1e-12 || x > xs.back() + 1e-12)
        throw std::invalid_argument("linear_interp: abscissa outside the sampled range");
    const auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin())
        return ys.front();
    if (it == xs.end())
        return ys.back();
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// power-law and logarithmic scaling of a size-resolved observable

struct PowerLawFit {
    FitResult fit;      // S = a L^b, parameters "a", "b", fitted on log-log scale
    FitResult log_fit;  // S = c ln L + d, parameters "c", "d"
    bool log_consistent = false;  // |b| < 0.1 and the logarithmic model fits better
};

inline PowerLawFit fit_power_law(const std::vector<double>& sizes,
                                 const std::vector<double>& values,
                                 const std::vector<double>* value_stderr = nullptr) {
    if (sizes.size() < 3 || sizes.size() != values.size())
        throw std::invalid_argument("fit_power_law: need >= 3 (L, S) pairs");
    std::vector<double> lx(sizes.size()), ly(sizes.size());
    std::vector<double> lsig;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (!(sizes[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(values[i]))
            throw std::invalid_argument("fit_power_law: sizes and values must be positive");
        lx[i] = std::log(sizes[i]);
        ly[i] = std::log(values[i]);
    }
    if (value_stderr) {
        lsig.resize(sizes.size());
        for (std::size_t i = 0; i < sizes.size(); ++i)
            lsig[i] = (*value_stderr)[i] / values[i];
    }
    const auto f = detail::linear_fit(lx, ly, value_stderr ? &lsig : nullptr);
    PowerLawFit out;
    out.fit.params["a"] = std::exp(f.intercept);
    out.fit.params["b"] = f.slope;
    out.fit.stderrs["b"] = f.se_slope;
    out.fit.stderrs["ln_a"] = f.se_intercept;
    out.fit.mse = f.sse / f.n;
    out.fit.n_points = f.n;

    // alternative S = c ln L + d on the same data (linear scale in S)
    std::vector<double> s_lin(values.begin(), values.end());
    const auto g = detail::linear_fit(lx, s_lin, value_stderr);
    out.log_fit.params["c"] = g.slope;
    out.log_fit.params["d"] = g.intercept;
    out.log_fit.stderrs["c"] = g.se_slope;
    out.log_fit.stderrs["d"] = g.se_intercept;
    out.log_fit.n_points = g.n;
    // compare the two models on the common (linear) scale
    double sse_power = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double pred = out.fit.params["a"] * std::pow(sizes[i], f.slope);
        sse_power += (values[i] - pred) * (values[i] - pred);
    }
    out.log_fit.mse = g.sse / g.n;
    out.log_consistent = std::abs(f.slope) < 0.1 && g.sse / g.n < sse_power / f.n;
    return out;
}

// ---------------------------------------------------------------------------
// chord-length entropy profile, S(l) = (c/3) ln((L/pi) sin(pi l / L)) + s0

inline FitResult fit_central_charge(const std::vector<int>& cuts,
                                    const std::vector<double>& entropies, int L) {
    if (cuts.size() < 5 || cuts.size() != entropies.size())
        throw std::invalid_argument("fit_central_charge: need >= 5 cut positions");
    std::vector<double> x(cuts.size()), y(entropies.begin(), entropies.end());
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i] < 1 || cuts[i] >= L)
            throw std::invalid_argument("fit_central_charge: cuts must lie in [1, L-1]");
        x[i] = std::log((L / M_PI) * std::sin(M_PI * cuts[i] / L)) / 3.0;
    }
    detail::LinFit f{};
    try {
        f = detail::linear_fit(x, y);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("fit_central_charge: chord lengths are degenerate");
    }
    FitResult out;
    out.params["c"] = f.slope;
    out.params["s0"] = f.intercept;
    out.stderrs["c"] = f.se_slope;
    out.stderrs["s0"] = f.se_intercept;
    out.mse = f.sse / f.n;
    out.n_points = f.n;
    return out;
}

// ---------------------------------------------------------------------------
// algebraic vs exponential decay of a correlation element across sizes

enum class DecayClassification { PowerLaw, Exponential };

struct CorrelationFit {
    FitResult power;        // |corr| = A L^-p, parameters "A", "p"
    FitResult exponential;  // |corr| = B exp(-L/xi), parameters "B", "xi"
    DecayClassification classification = DecayClassification::PowerLaw;
};

inline CorrelationFit fit_correlation_exponent(const std::vector<double>& sizes,
                                               const std::vector<double>& corr) {
    if (sizes.size() < 4 || sizes.size() != corr.size())
        throw std::invalid_argument("fit_correlation_exponent: need >= 4 sizes");
    std::vector<double> lx(sizes.size()), xlin(sizes.size()), ly(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double m = std::abs(corr[i]);
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("fit_correlation_exponent: magnitudes must be finite and nonzero");
        lx[i] = std::log(sizes[i]);
        xlin[i] = sizes[i];
        ly[i] = std::log(m);
    }
    const auto fp = detail::linear_fit(lx, ly);
    const auto fe = detail::linear_fit(xlin, ly);
    CorrelationFit out;
    out.power.params["A"] = std::exp(fp.intercept);
    out.power.params["p"] = -fp.slope;
    out.power.stderrs["p"] = fp.se_slope;
    out.power.mse = fp.sse / fp.n;
    out.power.n_points = fp.n;
    out.exponential.params["B"] = std::exp(fe.intercept);
    out.exponential.params["xi"] = -1.0 / fe.slope;
    out.exponential.stderrs["inv_xi"] = fe.se_slope;
    out.exponential.mse = fe.sse / fe.n;
    out.exponential.n_points = fe.n;
    out.classification = (fp.sse <= fe.sse) ? DecayClassification::PowerLaw
                                            : DecayClassification::Exponential;
    return out;
}

// ---------------------------------------------------------------------------
// rational (Pade-form) extrapolation of S(L) to L -> infinity

struct PadeFit {
    int order = 1;
    Eigen::VectorXd num;  // a_0 .. a_n
    Eigen::VectorXd den;  // b_1 .. b_n, denominator is 1 + sum b_k x^k
    double asymptote = std::numeric_limits<double>::quiet_NaN();
    bool asymptote_finite = false;
    bool singular = false;  // real denominator root inside the data range
    double sse = 0.0;
    double reduced_mse = 0.0;  // sse / (n_points - n_parameters), the comparison metric
    int n_points = 0;
};

namespace detail {

inline double eval_rational(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double x) {
    double num = 0.0;
    for (Eigen::Index k = a.size() - 1; k >= 0; --k)
        num = num * x + a(k);
    double den = 0.0;
    for (Eigen::Index k = b.size() - 1; k >= 0; --k)
        den = den * x + b(k);
    return num / (1.0 + x * den);
}

// real roots of 1 + sum_{k>=1} b_k x^k via the companion matrix
inline std::vector<double> real_denominator_roots(const Eigen::VectorXd& b) {
    int deg = static_cast<int>(b.size());
    while (deg > 0 && std::abs(b(deg - 1)) < 1e-14)
        --deg;
    std::vector<double> roots;
    if (deg == 0)
        return roots;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i)
        comp(i, i - 1) = 1.0;
    // monic form x^deg + (b_{deg-1}/b_deg) x^{deg-1} + ... + (1/b_deg)
    for (int i = 0; i < deg; ++i) {
        const double c = (i == deg - 1) ? 1.0 : b(deg - 2 - i);
        comp(0, i) = -c / b(deg - 1);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const auto z = es.eigenvalues()(i);
        if (std::abs(z.imag()) < 1e-8 * std::max(1.0, std::abs(z.real())))
            roots.push_back(z.real());
    }
    return roots;
}

}  // namespace detail

inline PadeFit pade_fit(const std::vector<double>& xs, const std::vector<double>& ys, int order) {
    const int n = order;
    const int npts = static_cast<int>(xs.size());
    const int nparam = 2 * n + 1;
    if (n < 1)
        throw std::invalid_argument("pade_fit: order must be >= 1");
    if (npts < nparam + 1 || ys.size() != xs.size())
        throw std::invalid_argument("pade_fit: need at least 2n+2 points");
    const double scale = *std::max_element(xs.begin(), xs.end(),
                                           [](double u, double v) { return std::abs(u) < std::abs(v); });
    if (!(std::abs(scale) > 0.0))
        throw std::invalid_argument("pade_fit: abscissae are all zero");

    // linearized pass: a_0..a_n and b_1..b_n from
    //   sum_k a_k t^k - y * sum_k b_k t^k = y,   t = x / scale
    Eigen::MatrixXd design(npts, nparam);
    Eigen::VectorXd target(npts);
    for (int i = 0; i < npts; ++i) {
        const double t = xs[static_cast<std::size_t>(i)] / std::abs(scale);
        double tk = 1.0;
        for (int k = 0; k <= n; ++k) {
            design(i, k) = tk;
            tk *= t;
        }
        tk = t;
        for (int k = 1; k <= n; ++k) {
            design(i, n + k) = -ys[static_cast<std::size_t>(i)] * tk;
            tk *= t;
        }
        target(i) = ys[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd theta = design.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(target);

    auto unpack = [&](const Eigen::VectorXd& th, Eigen::VectorXd& a, Eigen::VectorXd& b) {
        a = th.head(n + 1);
        b = th.tail(n);
    };
    auto sse_of = [&](const Eigen::VectorXd& th) {
        Eigen::VectorXd a, b;
        unpack(th, a, b);
        double sse = 0.0;
        for (int i = 0; i < npts; ++i) {
            const double t = xs[static_cast<std::size_t>(i)] / std::abs(scale);
            const double r = ys[static_cast<std::size_t>(i)] - detail::eval_rational(a, b, t);
            if (!std::isfinite(r))
                return std::numeric_limits<double>::infinity();
            sse += r * r;
        }
        return sse;
    };

    // Levenberg-Marquardt polish of the true residuals
    double lambda = 1e-3;
    double best_sse = sse_of(theta);
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::VectorXd a, b;
        unpack(theta, a, b);
        Eigen::MatrixXd J(npts, nparam);
        Eigen::VectorXd r(npts);
        for (int i = 0; i < npts; ++i) {
            const double t = xs[static_cast<std::size_t>(i)] / std::abs(scale);
            double den = 1.0, tk = t;
            for (int k = 1; k <= n; ++k) {
                den += b(k - 1) * tk;
                tk *= t;
            }
            double num = 0.0;
            tk = 1.0;
            for (int k = 0; k <= n; ++k) {
                num += a(k) * tk;
                tk *= t;
            }
            r(i) = ys[static_cast<std::size_t>(i)] - num / den;
            tk = 1.0;
            for (int k = 0; k <= n; ++k) {
                J(i, k) = -tk / den;
                tk *= t;
            }
            tk = t;
            for (int k = 1; k <= n; ++k) {
                J(i, n + k) = num * tk / (den * den);
                tk *= t;
            }
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd Jtr = J.transpose() * r;
        Eigen::MatrixXd damped = JtJ;
        damped.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
        const Eigen::VectorXd delta = damped.ldlt().solve(-Jtr);
        const Eigen::VectorXd trial = theta + delta;
        const double trial_sse = sse_of(trial);
        if (trial_sse < best_sse) {
            theta = trial;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (best_sse - trial_sse < 1e-15 * (1.0 + best_sse)) {
                best_sse = trial_sse;
                break;
            }
            best_sse = trial_sse;
        } else {
            lambda *= 10.0;
            if (lambda > 1e10)
                break;
        }
    }

    PadeFit out;
    out.order = n;
    out.n_points = npts;
    Eigen::VectorXd a_s, b_s;
    unpack(theta, a_s, b_s);
    out.sse = best_sse;
    out.reduced_mse = best_sse / std::max(1, npts - nparam);

    // singularity: real denominator root inside the data range (scaled coords)
    double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
    for (double x : xs) {
        tmin = std::min(tmin, x / std::abs(scale));
        tmax = std::max(tmax, x / std::abs(scale));
    }
    for (double root : detail::real_denominator_roots(b_s))
        if (root >= tmin && root <= tmax)
            out.singular = true;

    // coefficients back in unscaled x units
    out.num.resize(n + 1);
    out.den.resize(n);
    for (int k = 0; k <= n; ++k)
        out.num(k) = a_s(k) / std::pow(std::abs(scale), k);
    for (int k = 1; k <= n; ++k)
        out.den(k - 1) = b_s(k - 1) / std::pow(std::abs(scale), k);

    // limit as x -> infinity from the highest surviving coefficient pair
    const double mag = std::max(a_s.cwiseAbs().maxCoeff(), std::max(1.0, b_s.cwiseAbs().maxCoeff()));
    const double eps = 1e-9 * mag;
    int k = n;
    for (; k >= 1; --k) {
        if (std::abs(b_s(k - 1)) > eps) {
            bool higher_num = false;
            for (int j = k + 1; j <= n; ++j)
                if (std::abs(a_s(j)) > eps)
                    higher_num = true;
            out.asymptote_finite = !higher_num;
            if (out.asymptote_finite)
                out.asymptote = a_s(k) / b_s(k - 1);
            break;
        }
    }
    if (k == 0) {
        bool poly = false;
        for (int j = 1; j <= n; ++j)
            if (std::abs(a_s(j)) > eps)
                poly = true;
        out.asymptote_finite = !poly;
        if (out.asymptote_finite)
            out.asymptote = a_s(0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// size-resolved curves, crossings, critical-column subtraction, collapse

struct SizedCurve {
    int size = 0;
    std::vector<double> control;  // ascending
    std::vector<double> value;
};

inline void validate_curve(const SizedCurve& c) {
    if (c.size < 1 || c.control.size() < 2 || c.control.size() != c.value.size())
        throw std::invalid_argument("SizedCurve: need >= 2 samples");
    for (std::size_t i = 1; i < c.control.size(); ++i)
        if (!(c.control[i] > c.control[i - 1]))
            throw std::invalid_argument("SizedCurve: control values must ascend");
}

struct CrossingResult {
    double mean = 0.0;
    double spread = 0.0;  // half of (max - min) over the pairwise crossings
    std::vector<double> pairwise;
};

// Pairwise crossings of consecutive sizes from linearly interpolated curves.
// Each consecutive pair must change sign somewhere in the overlap of its
// control windows; the median root is used when a pair crosses repeatedly.
inline CrossingResult crossing_point(std::vector<SizedCurve> curves) {
    if (curves.size() < 2)
        throw std::invalid_argument("crossing_point: need curves for >= 2 sizes");
    for (const auto& c : curves)
        validate_curve(c);
    std::sort(curves.begin(), curves.end(),
              [](const SizedCurve& a, const SizedCurve& b) { return a.size < b.size; });
    CrossingResult out;
    for (std::size_t p = 0; p + 1 < curves.size(); ++p) {
        const SizedCurve& lo = curves[p];
        const SizedCurve& hi = curves[p + 1];
        const double left = std::max(lo.control.front(), hi.control.front());
        const double right = std::min(lo.control.back(), hi.control.back());
        if (!(right > left))
            throw std::invalid_argument("crossing_point: control windows do not overlap");
        std::vector<double> grid;
        for (double c : lo.control)
            if (c >= left && c <= right)
                grid.push_back(c);
        for (double c : hi.control)
            if (c >= left && c <= right)
                grid.push_back(c);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                   grid.end());
        std::vector<double> roots;
        double prev_c = grid.front();
        double prev_d = detail::linear_interp(hi.control, hi.value, prev_c) -
                        detail::linear_interp(lo.control, lo.value, prev_c);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double c = grid[i];
            const double d = detail::linear_interp(hi.control, hi.value, c) -
                             detail::linear_interp(lo.control, lo.value, c);
            if (d == 0.0)
                roots.push_back(c);
            else if (prev_d == 0.0 && i == 1)
                roots.push_back(prev_c);
            else if (prev_d * d < 0.0)
                roots.push_back(prev_c + (c - prev_c) * prev_d / (prev_d - d));
            prev_c = c;
            prev_d = d;
        }
        if (roots.empty())
            throw std::invalid_argument(
                "crossing_point: no crossing in window for sizes " + std::to_string(lo.size) +
                " and " + std::to_string(hi.size));
        std::sort(roots.begin(), roots.end());
        out.pairwise.push_back(roots[roots.size() / 2]);
    }
    const auto [mn, mx] = std::minmax_element(out.pairwise.begin(), out.pairwise.end());
    out.mean = 0.0;
    for (double c : out.pairwise)
        out.mean += c;
    out.mean /= static_cast<double>(out.pairwise.size());
    out.spread = 0.5 * (*mx - *mn);
    return out;
}

// value -> value - S(critical) for each size, interpolated on its own grid.
inline std::vector<SizedCurve> subtract_critical_column(std::vector<SizedCurve> curves,
                                                        double critical) {
    for (auto& c : curves) {
        validate_curve(c);
        const double ref = detail::linear_interp(c.control, c.value, critical);
        for (double& v : c.value)
            v -= ref;
    }
    return curves;
}

enum class CollapseAnsatz { Algebraic, BKT };

struct CollapseOptions {
    CollapseAnsatz ansatz = CollapseAnsatz::Algebraic;
    int degree = 5;  // polynomial degree of the master curve
    double critical_min = 0.0;
    double critical_max = 0.0;
    int critical_steps = 41;
    double nu_min = 1.0;  // nu grid is log-spaced (Algebraic only)
    double nu_max = 100.0;
    int nu_steps = 61;
    double contour_factor = 4.0;  // uncertainty level: {E < factor * E_min}
};

struct CollapsePoint {
    double critical, nu, mse;
};

struct CollapseResult {
    double critical = 0.0;
    double nu = 0.0;  // NaN for the BKT ansatz
    double mse_min = 0.0;
    double critical_uncertainty = 0.0;
    double nu_uncertainty = 0.0;
    bool contour_touches_boundary = false;
    int reference_size = 0;
    std::vector<CollapsePoint> landscape;
};

// Scaling collapse y = S(c, L) - S(c*, L) against x = (c - c*) L^(1/nu)
// (Algebraic) or x = (c - c*) (ln L)^2 (BKT).  The master curve is a
// polynomial fitted to the reference (median) size; the score is the mean
// squared deviation of every other size from that curve.
inline CollapseResult data_collapse(std::vector<SizedCurve> curves, const CollapseOptions& opt) {
    if (curves.size() < 3)
        throw std::invalid_argument("data_collapse: need >= 3 sizes");
    for (const auto& c : curves)
        validate_curve(c);
    std::sort(curves.begin(), curves.end(),
              [](const SizedCurve& a, const SizedCurve& b) { return a.size < b.size; });
    const std::size_t ref_idx = (curves.size() - 1) / 2;  // lower median
    const SizedCurve& ref = curves[ref_idx];
    if (static_cast<int>(ref.control.size()) < opt.degree + 1)
        throw std::invalid_argument("data_collapse: reference curve has too few points for degree");
    if (!(opt.critical_max > opt.critical_min) || opt.critical_steps < 2)
        throw std::invalid_argument("data_collapse: bad critical grid");
    const bool algebraic = opt.ansatz == CollapseAnsatz::Algebraic;
    if (algebraic && (!(opt.nu_max > opt.nu_min) || !(opt.nu_min > 0.0) || opt.nu_steps < 2))
        throw std::invalid_argument("data_collapse: bad nu grid");

    auto scale_of = [&](int L, double nu) {
        return algebraic ? std::pow(static_cast<double>(L), 1.0 / nu)
                         : std::log(static_cast<double>(L)) * std::log(static_cast<double>(L));
    };

    CollapseResult out;
    out.reference_size = ref.size;
    out.mse_min = std::numeric_limits<double>::infinity();
    const int n_nu = algebraic ? opt.nu_steps : 1;

    for (int inu = 0; inu < n_nu; ++inu) {
        const double nu = algebraic
                              ? opt.nu_min * std::pow(opt.nu_max / opt.nu_min,
                                                      static_cast<double>(inu) / (opt.nu_steps - 1))
                              : std::numeric_limits<double>::quiet_NaN();
        for (int ic = 0; ic < opt.critical_steps; ++ic) {
            const double cc = opt.critical_min +
                              (opt.critical_max - opt.critical_min) * static_cast<double>(ic) /
                                  (opt.critical_steps - 1);
            bool in_range = true;
            for (const auto& c : curves)
                if (cc < c.control.front() || cc > c.control.back())
                    in_range = false;
            if (!in_range)
                continue;

            // master curve from the reference size
            const double sref = detail::linear_interp(ref.control, ref.value, cc);
            const double xscale_ref = scale_of(ref.size, nu);
            double xmax = 0.0;
            for (double c : ref.control)
                xmax = std::max(xmax, std::abs((c - cc) * xscale_ref));
            if (!(xmax > 0.0))
                continue;
            Eigen::MatrixXd V(ref.control.size(), opt.degree + 1);
            Eigen::VectorXd yv(ref.control.size());
            for (std::size_t i = 0; i < ref.control.size(); ++i) {
                const double x = (ref.control[i] - cc) * xscale_ref / xmax;
                double xk = 1.0;
                for (int k = 0; k <= opt.degree; ++k) {
                    V(static_cast<Eigen::Index>(i), k) = xk;
                    xk *= x;
                }
                yv(static_cast<Eigen::Index>(i)) = ref.value[i] - sref;
            }
            const Eigen::VectorXd coef = V.colPivHouseholderQr().solve(yv);

            double sum_sq = 0.0;
            int n_scored = 0;
            for (std::size_t s = 0; s < curves.size(); ++s) {
                if (s == ref_idx)
                    continue;
                const SizedCurve& c = curves[s];
                const double sc = detail::linear_interp(c.control, c.value, cc);
                const double xs = scale_of(c.size, nu);
                for (std::size_t i = 0; i < c.control.size(); ++i) {
                    const double x = (c.control[i] - cc) * xs / xmax;
                    double q = 0.0;
                    for (int k = opt.degree; k >= 0; --k)
                        q = q * x + coef(k);
                    const double dy = (c.value[i] - sc) - q;
                    sum_sq += dy * dy;
                    ++n_scored;
                }
            }
            if (n_scored == 0)
                continue;
            const double mse = sum_sq / n_scored;
            out.landscape.push_back({cc, nu, mse});
            if (mse < out.mse_min) {
                out.mse_min = mse;
                out.critical = cc;
                out.nu = nu;
            }
        }
    }
    if (out.landscape.empty())
        throw std::invalid_argument("data_collapse: no candidate point lies inside every curve window");

    // uncertainty: extent of the low-lying landscape region
    double cmin = out.critical, cmax = out.critical;
    double numin = out.nu, numax = out.nu;
    for (const auto& p : out.landscape) {
        if (p.mse <= opt.contour_factor * out.mse_min) {
            cmin = std::min(cmin, p.critical);
            cmax = std::max(cmax, p.critical);
            if (algebraic) {
                numin = std::min(numin, p.nu);
                numax = std::max(numax, p.nu);
            }
            if (p.critical <= opt.critical_min + 1e-12 || p.critical >= opt.critical_max - 1e-12)
                out.contour_touches_boundary = true;
            if (algebraic && (p.nu <= opt.nu_min * (1.0 + 1e-12) || p.nu >= opt.nu_max * (1.0 - 1e-12)))
                out.contour_touches_boundary = true;
        }
    }
    out.critical_uncertainty = 0.5 * (cmax - cmin);
    out.nu_uncertainty = algebraic ? 0.5 * (numax - numin) : 0.0;
    return out;
}

}  // namespace bosonchain
