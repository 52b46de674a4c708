#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "fput/basis.hpp"
#include "fput/spectral.hpp"
#include "support/oracles.hpp"

using namespace fput;

namespace {

ModelParams params(int N, Sector s, double alpha = 1.0, double lambda = 0.0,
                   double hbar = 0.1) {
    ModelParams mp;
    mp.alpha = alpha;
    mp.lambda = lambda;
    mp.hbar = hbar;
    mp.cutoff_n = N;
    mp.sector = s;
    return mp;
}

/// gauged sector block of the ladder oracle: phi*_{l'} H phi_l restricted to
/// the sector, which must be real and equal the assembled matrix
Eigen::MatrixXd oracle_sector_matrix(const ModelParams& mp, const SectorBasis& basis) {
    oracle::LadderSpace space(mp.cutoff_n + 6);
    Eigen::MatrixXcd H = oracle::hamiltonian_ladder(space, mp);
    int d = basis.size();
    Eigen::MatrixXd out(d, d);
    for (int i = 0; i < d; ++i) {
        auto [ni, li] = basis.states[i];
        int ii = space.idx((ni + li) / 2, (ni - li) / 2);
        for (int j = 0; j < d; ++j) {
            auto [nj, lj] = basis.states[j];
            int jj = space.idx((nj + lj) / 2, (nj - lj) / 2);
            std::complex<double> v =
                std::conj(basis.gauge(i)) * H(ii, jj) * basis.gauge(j);
            REQUIRE(std::abs(v.imag()) < 1e-13);  // gauge must make it real
            out(i, j) = v.real();
        }
    }
    return out;
}

}  // namespace

TEST_CASE("sector enumeration") {
    SUBCASE("N=600 singlet has the published size") {
        SectorBasis b = enumerate_sector(params(600, Sector::Singlet));
        CHECK(b.size() == 60301);
    }
    SUBCASE("N=0 is the vacuum only") {
        SectorBasis b = enumerate_sector(params(0, Sector::Singlet));
        REQUIRE(b.size() == 1);
        CHECK(b.states[0] == std::pair<int, int>(0, 0));
    }
    SUBCASE("N=4 singlet is exactly {(0,0),(2,0),(3,-3),(3,3),(4,0)}") {
        SectorBasis b = enumerate_sector(params(4, Sector::Singlet));
        std::vector<std::pair<int, int>> want = {{0, 0}, {2, 0}, {3, -3}, {3, 3}, {4, 0}};
        CHECK(b.states == want);  // lexicographic and deterministic
    }
    SUBCASE("membership rules") {
        for (Sector s : {Sector::Singlet, Sector::DoubletB, Sector::DoubletC}) {
            SectorBasis b = enumerate_sector(params(25, s));
            for (auto [n, l] : b.states) {
                CHECK(n <= 25);
                CHECK((n - l) % 2 == 0);
                CHECK(((l % 3) + 3) % 3 == sector_residue(s));
                CHECK(std::abs(l) <= n);
            }
            // index map is consistent
            for (int i = 0; i < b.size(); ++i)
                CHECK(b.index_of(b.states[i].first, b.states[i].second) == i);
        }
    }
    SUBCASE("doublet sizes complement the singlet") {
        int N = 40;
        int total = (N + 1) * (N + 2) / 2;
        int sa = enumerate_sector(params(N, Sector::Singlet)).size();
        int sb = enumerate_sector(params(N, Sector::DoubletB)).size();
        int sc = enumerate_sector(params(N, Sector::DoubletC)).size();
        CHECK(sa + sb + sc == total);
        CHECK(sb == sc);
    }
}

TEST_CASE("cubic coefficients against closed forms and the ladder oracle") {
    SUBCASE("k_3^+(0,0) = sqrt(6)") {
        auto elems = cubic_elements(0, 0);
        bool found = false;
        for (auto& e : elems) {
            if (e.dn == 3 && e.dl == 3) {
                CHECK(e.coeff == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
                found = true;
            }
            CHECK(e.coeff != 0.0);
        }
        CHECK(found);
        // (0,0) with m = -1 is excluded by the zero (n-l) factor
        for (auto& e : elems) CHECK(e.dn != -1);
    }
    SUBCASE("all cubic elements for N <= 10 match the dense operator oracle") {
        const double hbar = 0.37;
        oracle::LadderSpace space(16);
        Eigen::MatrixXcd qp3 = oracle::qplus_cubed(space, hbar);
        double worst = 0;
        for (int n = 0; n <= 10; ++n) {
            for (int l = -n; l <= n; l += 2) {
                int col = space.idx((n + l) / 2, (n - l) / 2);
                for (auto& e : cubic_elements(n, l)) {
                    if (n + e.dn > 10) continue;
                    int row = space.idx((n + e.dn + l + e.dl) / 2, (n + e.dn - l - e.dl) / 2);
                    REQUIRE(row >= 0);
                    // q+^3 carries dl = +3; q-^3 elements are the dl = -3 set
                    std::complex<double> got =
                        e.dl == 3 ? qp3(row, col) : std::conj(qp3(col, row));
                    worst = std::max(worst,
                                     std::abs(got - std::pow(hbar, 1.5) * e.coeff));
                }
            }
        }
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("quartic coefficients") {
    SUBCASE("closed-form spot checks") {
        auto e00 = quartic_elements(0, 0);
        REQUIRE(!e00.empty());
        CHECK(e00[0].dn == 0);
        CHECK(e00[0].coeff == doctest::Approx(2.0).epsilon(1e-15));
        bool found = false;
        for (auto& e : quartic_elements(2, 0))
            if (e.dn == -2) {
                CHECK(e.coeff == doctest::Approx(4.0).epsilon(1e-15));
                found = true;
            }
        CHECK(found);
    }
    SUBCASE("all elements for N <= 10 match the dense (q+q-)^2 oracle") {
        const double hbar = 0.51;
        oracle::LadderSpace space(16);
        Eigen::MatrixXcd quart = oracle::quartic_op(space, hbar);
        double worst = 0;
        for (int n = 0; n <= 10; ++n) {
            for (int l = -n; l <= n; l += 2) {
                int col = space.idx((n + l) / 2, (n - l) / 2);
                for (auto& e : quartic_elements(n, l)) {
                    if (n + e.dn > 10 || n + e.dn < std::abs(l)) continue;
                    int row = space.idx((n + e.dn + l) / 2, (n + e.dn - l) / 2);
                    REQUIRE(row >= 0);
                    worst = std::max(
                        worst, std::abs(quart(row, col) - hbar * hbar * e.coeff));
                }
            }
        }
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("assembled Hamiltonian") {
    SUBCASE("harmonic limit is exactly diagonal hbar(n+1)") {
        ModelParams mp = params(8, Sector::Singlet, 0.0, 0.0, 0.25);
        SectorBasis b = enumerate_sector(mp);
        SparseHamiltonian H = assemble_hamiltonian(mp, b);
        Eigen::MatrixXd d(H.mat);
        for (int i = 0; i < H.dim; ++i)
            for (int j = 0; j < H.dim; ++j) {
                if (i == j)
                    CHECK(d(i, i) == 0.25 * (b.states[i].first + 1));
                else
                    CHECK(d(i, j) == 0.0);
            }
    }
    SUBCASE("N=6 singlet, alpha=1, hbar=0.1 equals the gauged dense oracle") {
        ModelParams mp = params(6, Sector::Singlet, 1.0, 0.0, 0.1);
        SectorBasis b = enumerate_sector(mp);
        SparseHamiltonian H = assemble_hamiltonian(mp, b);
        Eigen::MatrixXd oracle_m = oracle_sector_matrix(mp, b);
        CHECK((Eigen::MatrixXd(H.mat) - oracle_m).cwiseAbs().maxCoeff() < 1e-13);
    }
    SUBCASE("general case with quartic matches the oracle too") {
        ModelParams mp = params(7, Sector::DoubletB, 1.0, 1.0 / 16.0, 0.2);
        SectorBasis b = enumerate_sector(mp);
        SparseHamiltonian H = assemble_hamiltonian(mp, b);
        Eigen::MatrixXd oracle_m = oracle_sector_matrix(mp, b);
        CHECK((Eigen::MatrixXd(H.mat) - oracle_m).cwiseAbs().maxCoeff() < 1e-13);
    }
    SUBCASE("Hermiticity is exact by construction") {
        ModelParams mp = params(20, Sector::Singlet, 1.0, 0.05, 0.05);
        SectorBasis b = enumerate_sector(mp);
        SparseHamiltonian H = assemble_hamiltonian(mp, b);
        Eigen::MatrixXd d(H.mat);
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("off-diagonal selection rules") {
        ModelParams mp = params(15, Sector::Singlet, 1.0, 0.3, 0.1);
        SectorBasis b = enumerate_sector(mp);
        SparseHamiltonian H = assemble_hamiltonian(mp, b);
        for (int k = 0; k < H.mat.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(H.mat, k); it; ++it) {
                if (it.row() == it.col() || it.value() == 0.0) continue;
                auto [n1, l1] = b.states[it.row()];
                auto [n2, l2] = b.states[it.col()];
                int dn = std::abs(n1 - n2), dl = std::abs(l1 - l2);
                bool cubic = dl == 3 && (dn == 1 || dn == 3);
                bool quartic = dl == 0 && (dn == 2 || dn == 4);
                CHECK((cubic || quartic));
            }
        }
    }
    SUBCASE("cutoff overflow guard") {
        ModelParams mp = params(100001, Sector::Singlet);
        SectorBasis b;
        b.cutoff_n = mp.cutoff_n;
        CHECK_THROWS_AS(assemble_hamiltonian(mp, b), std::invalid_argument);
    }
}

TEST_CASE("sector decoupling of the full Hamiltonian (oracle level, N <= 20)") {
    ModelParams mp = params(14, Sector::Singlet, 1.0, 0.1, 0.15);
    oracle::LadderSpace space(20);
    Eigen::MatrixXcd H = oracle::hamiltonian_ladder(space, mp);
    for (int i = 0; i < space.dim(); ++i) {
        auto [npi, nmi] = space.states[i];
        if (npi + nmi > 14) continue;
        int ri = (((npi - nmi) % 3) + 3) % 3;
        for (int j = 0; j < space.dim(); ++j) {
            auto [npj, nmj] = space.states[j];
            if (npj + nmj > 14) continue;
            int rj = (((npj - nmj) % 3) + 3) % 3;
            if (ri != rj) CHECK(std::abs(H(i, j)) == 0.0);
        }
    }
}

TEST_CASE("doublet sectors share their spectrum to 1e-10 (N = 40)") {
    ModelParams mb = params(40, Sector::DoubletB, 1.0, 0.0, 0.02);
    ModelParams mc = params(40, Sector::DoubletC, 1.0, 0.0, 0.02);
    SectorBasis bb = enumerate_sector(mb), bc = enumerate_sector(mc);
    REQUIRE(bb.size() == bc.size());
    Eigen::MatrixXd Hb(assemble_hamiltonian(mb, bb).mat);
    Eigen::MatrixXd Hc(assemble_hamiltonian(mc, bc).mat);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(Hb), ec(Hc);
    double worst = 0;
    for (int i = 0; i < bb.size(); ++i)
        worst = std::max(worst, std::abs(eb.eigenvalues()[i] - ec.eigenvalues()[i]) /
                                    std::max(std::abs(eb.eigenvalues()[i]), 1e-30));
    CHECK(worst < 1e-10);
}
