#include "bosonchain/gaussian.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace bosonchain;

namespace {

// Two-mode squeezed state, squeeze parameter r, ordering (x1, x2, p1, p2).
Eigen::MatrixXd two_mode_squeezed(double r) {
    const double ch = std::cosh(2.0 * r);
    const double sh = std::sinh(2.0 * r);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
    g(0, 0) = g(1, 1) = g(2, 2) = g(3, 3) = 0.5 * ch;
    g(0, 1) = g(1, 0) = 0.5 * sh;
    g(2, 3) = g(3, 2) = -0.5 * sh;
    return g;
}

// Two-mode congruence built from per-mode squeezers and an orthogonal mixer,
// all of which preserve the symplectic form.
Eigen::MatrixXd random_symplectic_2mode(double s1, double s2, double theta) {
    Eigen::MatrixXd squeeze = Eigen::MatrixXd::Zero(4, 4);
    squeeze(0, 0) = std::exp(s1);
    squeeze(1, 1) = std::exp(s2);
    squeeze(2, 2) = std::exp(-s1);
    squeeze(3, 3) = std::exp(-s2);
    Eigen::Matrix2d rot;
    rot << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(4, 4);
    mix.block(0, 0, 2, 2) = rot;
    mix.block(2, 2, 2, 2) = rot;
    return mix * squeeze;
}

Eigen::MatrixXd williamson_oracle() {
    Eigen::MatrixXd g(4, 4);
    g << 0.52410927944585783, -0.47765840992597186, -1.35778256906923, 0.26922265151004865,
        -0.47765840992597186, 3.3622504679809664, 0.6331864901724864, -1.1646143852011515,
        -1.35778256906923, 0.63318649017248629, 5.7743835153783225, 0.27766707724971773,
        0.26922265151004865, -1.1646143852011515, 0.27766707724971773, 1.281786871449121;
    return g;
}

}  // namespace

TEST_CASE("vacuum state") {
    const CovarianceState v = vacuum_state(3);
    CHECK(v.modes() == 3);
    CHECK(v.time == 0.0);
    const Eigen::VectorXd kappa = symplectic_spectrum(v.gamma);
    for (int l = 0; l < 3; ++l)
        CHECK(kappa(l) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(entanglement_entropy(v.gamma) < 1e-12);
    CHECK(check_uncertainty(v.gamma));
    CHECK_THROWS_AS(vacuum_state(0), std::invalid_argument);
}

TEST_CASE("region helpers") {
    CHECK(contiguous_region(3, 5) == Region{3, 4, 5});
    CHECK(contiguous_region(7, 7) == Region{7});
    CHECK_THROWS_AS(contiguous_region(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(contiguous_region(5, 4), std::invalid_argument);

    CHECK(half_chain_region(10) == contiguous_region(1, 5));
    CHECK(half_chain_region(7) == contiguous_region(1, 3));
    CHECK_THROWS_AS(half_chain_region(1), std::invalid_argument);

    CHECK(inner_region_b(16) == contiguous_region(5, 6));
    CHECK(inner_region_c(16) == contiguous_region(11, 12));
    CHECK(inner_region_b(200) == contiguous_region(51, 75));
    CHECK(inner_region_c(200) == contiguous_region(126, 150));
    // non-integer bounds round to the nearest site
    CHECK(inner_region_b(100) == contiguous_region(26, 38));
    CHECK(inner_region_c(100) == contiguous_region(63, 75));
    CHECK(inner_region_b(52) == contiguous_region(14, 20));
    CHECK(inner_region_c(52) == contiguous_region(33, 39));
    for (int L : {16, 52, 100, 152, 200}) {
        const Region b = inner_region_b(L);
        const Region c = inner_region_c(L);
        CHECK(b.size() == c.size());
        CHECK(b.back() < c.front());
        // Mirror symmetry about the chain center.
        CHECK(c.back() == L + 1 - b.front());
        CHECK(c.front() == L + 1 - b.back());
    }
    CHECK_THROWS_AS(inner_region_b(15), std::invalid_argument);
    CHECK_THROWS_AS(inner_region_b(14), std::invalid_argument);
}

TEST_CASE("region validation and disjoint union") {
    CHECK_THROWS_AS(validate_region(Region{}, 4), std::invalid_argument);
    CHECK_THROWS_AS(validate_region(Region{2, 2}, 4), std::invalid_argument);
    CHECK_THROWS_AS(validate_region(Region{3, 1}, 4), std::invalid_argument);
    CHECK_THROWS_AS(validate_region(Region{1, 5}, 4), std::invalid_argument);
    CHECK_NOTHROW(validate_region(Region{1, 4}, 4));

    CHECK(region_union_disjoint(Region{1, 5}, Region{2, 3}) == Region{1, 2, 3, 5});
    CHECK_THROWS_AS(region_union_disjoint(Region{1, 3}, Region{3, 4}), std::invalid_argument);
}

TEST_CASE("reduce keeps both quadratures of the chosen sites") {
    Eigen::MatrixXd g(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            g(i, j) = 10.0 * i + j;
    const Eigen::MatrixXd r = reduce(g, Region{2});
    REQUIRE(r.rows() == 2);
    CHECK(r(0, 0) == g(1, 1));
    CHECK(r(0, 1) == g(1, 4));
    CHECK(r(1, 0) == g(4, 1));
    CHECK(r(1, 1) == g(4, 4));
    const Eigen::MatrixXd r2 = reduce(g, Region{1, 3});
    REQUIRE(r2.rows() == 4);
    CHECK(r2(1, 3) == g(2, 5));
}

TEST_CASE("symplectic spectrum against a frozen two-mode matrix") {
    const Eigen::MatrixXd g = williamson_oracle();
    const Eigen::VectorXd kappa = symplectic_spectrum(g);
    REQUIRE(kappa.size() == 2);
    CHECK(kappa(0) == Catch::Approx(1.7).epsilon(1e-12));
    CHECK(kappa(1) == Catch::Approx(0.8).epsilon(1e-12));
    CHECK(min_symplectic_eigenvalue(g) == Catch::Approx(0.8).epsilon(1e-12));
    CHECK(entanglement_entropy(g) == Catch::Approx(2.218085709754168).epsilon(1e-12));
}

TEST_CASE("symplectic spectrum rejects malformed input") {
    CHECK_THROWS_AS(symplectic_spectrum(Eigen::MatrixXd::Identity(3, 3)), std::invalid_argument);
    Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(4, 4);
    asym(0, 1) = 0.3;
    CHECK_THROWS_AS(symplectic_spectrum(asym), std::invalid_argument);
    CHECK_THROWS_AS(symplectic_spectrum(Eigen::MatrixXd::Zero(4, 4)), std::invalid_argument);
}

TEST_CASE("symplectic spectrum is a congruence invariant") {
    const Eigen::MatrixXd g = williamson_oracle();
    for (const auto& [s1, s2, th] :
         {std::tuple<double, double, double>{0.3, -0.6, 0.8}, {1.1, 0.2, -2.0}}) {
        const Eigen::MatrixXd S = random_symplectic_2mode(s1, s2, th);
        const Eigen::MatrixXd sigma = symplectic_form(2);
        REQUIRE((S * sigma * S.transpose() - sigma).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::MatrixXd gt = S * g * S.transpose();
        const Eigen::VectorXd kappa = symplectic_spectrum(0.5 * (gt + gt.transpose()));
        CHECK(kappa(0) == Catch::Approx(1.7).epsilon(1e-9));
        CHECK(kappa(1) == Catch::Approx(0.8).epsilon(1e-9));
    }
}

TEST_CASE("mode entropy values and clamping") {
    CHECK(mode_entropy(0.5) == 0.0);
    CHECK(mode_entropy(0.49) == 0.0);
    CHECK(mode_entropy(1.0) == Catch::Approx(0.95477125244221923).epsilon(1e-15));
    CHECK(mode_entropy(1.8810978455418157) == Catch::Approx(1.6198220928977023).epsilon(1e-15));
    CHECK(mode_entropy(0.5000001) == Catch::Approx(1.7118095700958318e-6).epsilon(1e-9));
}

TEST_CASE("uncertainty check") {
    CHECK(check_uncertainty(0.5 * Eigen::MatrixXd::Identity(4, 4)));
    CHECK_FALSE(check_uncertainty(0.4 * Eigen::MatrixXd::Identity(4, 4)));
    CHECK(check_uncertainty(0.4 * Eigen::MatrixXd::Identity(4, 4), 0.11));
}

TEST_CASE("two-mode squeezed state diagnostics") {
    const double r = 1.0;
    CovarianceState state{two_mode_squeezed(r), 0.0};

    // Pure state: both global symplectic eigenvalues sit at 1/2.
    const Eigen::VectorXd kappa = symplectic_spectrum(state.gamma);
    CHECK(kappa(0) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(kappa(1) == Catch::Approx(0.5).epsilon(1e-12));

    // Each half is thermal with kappa = cosh(2r)/2.
    const double s_one = entanglement_entropy(state, Region{1});
    CHECK(s_one == Catch::Approx(1.6198220928977023).epsilon(1e-12));
    CHECK(entanglement_entropy(state, Region{2}) == Catch::Approx(s_one).epsilon(1e-12));

    // Purity makes the mutual information twice the marginal entropy,
    // and the negativity of either half equals 2r.
    CHECK(mutual_information(state, Region{1}, Region{2}) ==
          Catch::Approx(2.0 * s_one).epsilon(1e-10));
    CHECK(log_negativity(state, Region{1}) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(log_negativity(state, Region{2}) == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("negativity vanishes on product states") {
    CovarianceState v = vacuum_state(4);
    CHECK(log_negativity(v, Region{1, 2}) == 0.0);
    v.gamma(0, 0) = 3.0;  // heat one x quadrature, still a product state
    v.gamma(4, 4) = 3.0;
    CHECK(log_negativity(v, Region{1, 2}) == 0.0);
}

TEST_CASE("entropy of a region grows with uniform thermal noise") {
    const Eigen::MatrixXd hot = 0.9 * Eigen::MatrixXd::Identity(8, 8);
    CovarianceState state{hot, 0.0};
    const double s2 = entanglement_entropy(state, contiguous_region(1, 2));
    const double s3 = entanglement_entropy(state, contiguous_region(1, 3));
    CHECK(s3 > s2);
    CHECK(s2 == Catch::Approx(2.0 * mode_entropy(0.9)).epsilon(1e-12));
}
