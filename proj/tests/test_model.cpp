#include "bosonchain/model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace bosonchain;

namespace {

double harmonic_number(int m, double alpha) {
    double h = 0.0;
    for (int r = 1; r <= m; ++r)
        h += std::pow(r, -alpha);
    return h;
}

ModelSpec local_spec(int L, double alpha, double gamma) {
    ModelSpec s;
    s.sites = L;
    s.alpha = alpha;
    s.measurement = Measurement::Local;
    s.gamma = gamma;
    return s;
}

ModelSpec nonlocal_spec(int L, double alpha, double gamma) {
    ModelSpec s = local_spec(L, alpha, gamma);
    s.measurement = Measurement::Nonlocal;
    return s;
}

}  // namespace

TEST_CASE("spec validation rejects bad parameters") {
    ModelSpec s;
    s.sites = 0;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s = ModelSpec{};
    s.alpha = 0.0;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s = ModelSpec{};
    s.gamma = -1.0;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s = ModelSpec{};
    s.eta = 1.5;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s = ModelSpec{};
    s.sites = 1;
    s.measurement = Measurement::Nonlocal;
    s.gamma = 0.1;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    CHECK_NOTHROW(validate(ModelSpec{}));
}

TEST_CASE("symplectic form basics") {
    const Eigen::MatrixXd s1 = symplectic_form(1);
    CHECK(s1(0, 1) == 1.0);
    CHECK(s1(1, 0) == -1.0);
    CHECK(s1(0, 0) == 0.0);
    for (int n : {1, 3, 7}) {
        const Eigen::MatrixXd s = symplectic_form(n);
        CHECK((s * s.transpose() - Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() ==
              0.0);
        CHECK((s * s + Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("position coupling entries for a small chain") {
    const Eigen::MatrixXd A = position_coupling(local_spec(3, 1.0, 0.0));
    CHECK(A(0, 1) == Catch::Approx(-1.0).epsilon(1e-15));
    CHECK(A(0, 2) == Catch::Approx(-0.5).epsilon(1e-15));
    CHECK(A(0, 0) == Catch::Approx(1.0 + 1.0 + 0.5).epsilon(1e-15));
    CHECK(A(1, 1) == Catch::Approx(1.0 + 1.0 + 1.0).epsilon(1e-15));
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("position coupling equals the pair-sum accumulation") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.2, 3.0);
    for (int trial = 0; trial < 4; ++trial) {
        const int L = 2 + static_cast<int>(rng() % 7);
        ModelSpec s = local_spec(L, unif(rng), 0.0);
        s.omega = unif(rng);
        s.coupling = unif(rng);
        Eigen::MatrixXd brute = s.omega * Eigen::MatrixXd::Identity(L, L);
        for (int j = 0; j < L; ++j)
            for (int k = j + 1; k < L; ++k) {
                const double w = s.coupling / std::pow(k - j, s.alpha);
                brute(j, j) += w;
                brute(k, k) += w;
                brute(j, k) -= w;
                brute(k, j) -= w;
            }
        CHECK((position_coupling(s) - brute).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("hamiltonian block structure") {
    ModelSpec s = local_spec(4, 0.7, 0.0);
    s.omega = 1.3;
    const Eigen::MatrixXd h = build_hamiltonian(s);
    REQUIRE(h.rows() == 8);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((h.block(4, 4, 4, 4) - 1.3 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(h.block(0, 4, 4, 4).cwiseAbs().maxCoeff() == 0.0);
    CHECK((h.block(0, 0, 4, 4) - position_coupling(s)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("large exponent approaches the nearest-neighbor coupling") {
    ModelSpec far = local_spec(50, 1e6, 0.0);
    ModelSpec nn = far;
    nn.range = Coupling::NearestNeighbor;
    const Eigen::MatrixXd a = position_coupling(far);
    const Eigen::MatrixXd b = position_coupling(nn);
    CHECK((a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff() < std::pow(2.0, -40));
}

TEST_CASE("local jumps") {
    const auto set = build_local_jumps(local_spec(3, 1.0, 0.25));
    REQUIRE(set.O.rows() == 3);
    REQUIRE(set.O.cols() == 6);
    for (int n = 0; n < 3; ++n) {
        CHECK(set.O(n, n) == Catch::Approx(0.5).epsilon(1e-15));
        CHECK(set.O.row(n).cwiseAbs().sum() == Catch::Approx(0.5).epsilon(1e-15));
    }
    const Eigen::MatrixXd oto = set.O.transpose() * set.O;
    CHECK((oto - set.OtO).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((set.OtO.block(0, 0, 3, 3) - 0.25 * Eigen::MatrixXd::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-15);
    CHECK(set.OtO.block(3, 3, 3, 3).cwiseAbs().maxCoeff() == 0.0);

    const auto zero = build_local_jumps(local_spec(1, 1.0, 0.0));
    CHECK(zero.O.rows() == 1);
    CHECK(zero.O.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nonlocal jumps: row count, diagonal kernel, cross-term cancellation") {
    const auto set = build_nonlocal_jumps(nonlocal_spec(3, 1.0, 0.5));
    REQUIRE(set.O.rows() == 6);  // L(L-1)
    const Eigen::MatrixXd oto = set.O.transpose() * set.O;
    CHECK((oto - set.OtO).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(set.OtO(0, 0) == Catch::Approx(1.5).epsilon(1e-14));
    CHECK(set.OtO(1, 1) == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(set.OtO(2, 2) == Catch::Approx(1.5).epsilon(1e-14));
    for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k)
            if (j != k)
                CHECK(std::abs(set.OtO(j, k)) < 1e-14);
}

TEST_CASE("nonlocal kernel diagonal matches harmonic-number form") {
    for (const auto& [L, alpha, gamma] : {std::tuple<int, double, double>{5, 0.5, 0.3},
                                          {8, 2.0, 1.0},
                                          {12, 0.3, 0.05}}) {
        const ModelSpec s = nonlocal_spec(L, alpha, gamma);
        const Eigen::VectorXd diag = jump_kernel_diagonal(s);
        const auto set = build_nonlocal_jumps(s);
        for (int j = 1; j <= L; ++j) {
            const double expected =
                2.0 * gamma * (harmonic_number(j - 1, alpha) + harmonic_number(L - j, alpha));
            CHECK(diag(j - 1) == Catch::Approx(expected).epsilon(1e-13));
            CHECK(set.OtO(j - 1, j - 1) == Catch::Approx(expected).epsilon(1e-13));
        }
    }
}

TEST_CASE("nonlocal kernel frozen values") {
    const Eigen::VectorXd diag = jump_kernel_diagonal(nonlocal_spec(5, 0.5, 0.3));
    const double expected[5] = {1.670674230225704, 1.970674230225704, 2.048528137423857,
                                1.970674230225704, 1.670674230225704};
    for (int j = 0; j < 5; ++j)
        CHECK(diag(j) == Catch::Approx(expected[j]).epsilon(1e-14));
    CHECK(harmonic_number(4, 0.5) == Catch::Approx(2.7844570503761733).epsilon(1e-15));
}

TEST_CASE("local kernel diagonal is the plain measurement strength") {
    const ModelSpec s = local_spec(7, 1.3, 0.8);
    const Eigen::VectorXd diag = jump_kernel_diagonal(s);
    for (int j = 0; j < 7; ++j)
        CHECK(diag(j) == 0.8);
    const auto set = build_local_jumps(s);
    CHECK((set.OtO.diagonal().head(7) - diag).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("bulk nonlocal kernel approaches its infinite-chain limit") {
    const int L = 4001;
    const ModelSpec s = nonlocal_spec(L, 2.0, 0.7);
    const Eigen::VectorXd diag = jump_kernel_diagonal(s);
    const double limit = 4.0 * 0.7 * (M_PI * M_PI / 6.0);
    CHECK(diag((L - 1) / 2) == Catch::Approx(limit).epsilon(1e-3));
}
