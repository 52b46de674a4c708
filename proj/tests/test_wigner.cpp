#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>

#include "fput/wigner.hpp"
#include "support/oracles.hpp"

using namespace fput;

TEST_CASE("spin-1/2 block matches the textbook rotation") {
    WignerBlock b = wigner_d_jacobi(1);
    const double r = std::sqrt(0.5);
    CHECK(b.at2(1, 1) == doctest::Approx(r).epsilon(1e-15));
    CHECK(b.at2(1, -1) == doctest::Approx(-r).epsilon(1e-15));
    CHECK(b.at2(-1, 1) == doctest::Approx(r).epsilon(1e-15));
    CHECK(b.at2(-1, -1) == doctest::Approx(r).epsilon(1e-15));
}

TEST_CASE("d^1_{00}(pi/2) vanishes") {
    WignerBlock b = wigner_d_jacobi(2);
    CHECK(std::abs(b.at2(0, 0)) < 1e-16);
}

TEST_CASE("both routes match the exact big-rational Wigner sum for j <= 20") {
    double worst_j = 0, worst_e = 0;
    for (int two_j = 0; two_j <= 40; ++two_j) {
        WignerBlock bj = wigner_d_jacobi(two_j);
        WignerBlock be = wigner_d_expm(two_j);
        for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
            for (int two_mp = -two_j; two_mp <= two_j; two_mp += 2) {
                double exact = oracle::wigner_d_exact(two_j, two_m, two_mp);
                worst_j = std::max(worst_j, std::abs(bj.at2(two_m, two_mp) - exact));
                worst_e = std::max(worst_e, std::abs(be.at2(two_m, two_mp) - exact));
            }
        }
    }
    CHECK(worst_j < 1e-13);
    CHECK(worst_e < 1e-13);
}

TEST_CASE("route cross-validation at j = 50") {
    WignerBlock a = wigner_d_jacobi(100);
    WignerBlock b = wigner_d_expm(100);
    CHECK((a.d - b.d).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("orthogonality defect stays below 1e-12 up to j = 200") {
    for (int two_j : {1, 2, 5, 31, 100, 400}) {
        WignerBlock b = wigner_d_jacobi(two_j);
        double defect = (b.d * b.d.transpose() -
                         Eigen::MatrixXd::Identity(b.dim(), b.dim()))
                            .cwiseAbs()
                            .maxCoeff();
        CAPTURE(two_j);
        CHECK(defect < 1e-12);
    }
    // matrix-exponential route, same gate
    for (int two_j : {2, 100, 400}) {
        WignerBlock b = wigner_d_expm(two_j);
        double defect = (b.d * b.d.transpose() -
                         Eigen::MatrixXd::Identity(b.dim(), b.dim()))
                            .cwiseAbs()
                            .maxCoeff();
        CAPTURE(two_j);
        CHECK(defect < 1e-12);
    }
}

TEST_CASE("circular-to-Cartesian coefficients") {
    SUBCASE("vacuum maps to vacuum") {
        CircularToCartesian o = circular_to_cartesian(0);
        CHECK(std::abs(o.at2(0, 0) - std::complex<double>(1, 0)) < 1e-15);
    }
    SUBCASE("|1,1> = (|10> + i|01>)/sqrt(2)") {
        CircularToCartesian o = circular_to_cartesian(1);
        const double r = std::sqrt(0.5);
        CHECK(std::abs(o.at2(1, 1) - std::complex<double>(r, 0)) < 1e-15);
        CHECK(std::abs(o.at2(1, -1) - std::complex<double>(0, r)) < 1e-15);
    }
    SUBCASE("row normalization of a unitary, j <= 100") {
        for (int two_j : {3, 40, 200}) {
            CircularToCartesian o = circular_to_cartesian(two_j);
            for (int r = 0; r < o.dim(); ++r)
                CHECK(o.O.row(r).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("binomial double-sum expansion equals the O coefficients for n <= 10") {
    double worst = 0;
    for (int n = 0; n <= 10; ++n) {
        CircularToCartesian o = circular_to_cartesian(n);
        for (int l = -n; l <= n; l += 2) {
            for (int n1 = 0; n1 <= n; ++n1) {
                int n2 = n - n1;
                std::complex<double> exact = oracle::omega_exact(n, l, n1, n2);
                std::complex<double> ours = o.at2(l, n1 - n2);
                worst = std::max(worst, std::abs(exact - ours));
            }
        }
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("transform round trip reproduces a random circular vector") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int two_j : {4, 17, 60}) {
        CircularToCartesian o = circular_to_cartesian(two_j);
        int d = o.dim();
        Eigen::VectorXcd w(d);
        for (int i = 0; i < d; ++i) w[i] = std::complex<double>(g(rng), g(rng));
        w.normalize();
        // x_{m'} = sum_m O_{m,m'} w_m ; back via the conjugate transpose
        Eigen::VectorXcd x = o.O.transpose() * w;
        Eigen::VectorXcd back = o.O.conjugate() * x;
        CHECK((back - w).cwiseAbs().maxCoeff() < 1e-12);
    }
}
