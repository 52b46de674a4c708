#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fput/basis.hpp"
#include "fput/classical.hpp"
#include "fput/spectral.hpp"

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

}  // namespace

TEST_CASE("harmonic spectrum at N=4 is {h, 3h, 4h, 4h, 5h}") {
    ModelParams mp = params(4, Sector::Singlet, 0.0, 0.0, 0.3);
    SectorBasis b = enumerate_sector(mp);
    EigenWindow w = eig_dense(assemble_hamiltonian(mp, b), mp);
    REQUIRE(w.count() == 5);
    std::vector<double> want = {0.3, 0.9, 1.2, 1.2, 1.5};
    for (int i = 0; i < 5; ++i) CHECK(w.energies[i] == doctest::Approx(want[i]).epsilon(1e-14));
    for (double r : w.residual_norms) CHECK(r < 1e-10);
}

TEST_CASE("dense solver refuses above the dimension bound") {
    ModelParams mp = params(30, Sector::Singlet);
    SectorBasis b = enumerate_sector(mp);
    SparseHamiltonian H = assemble_hamiltonian(mp, b);
    EigOptions opts;
    opts.dense_bound = 10;
    CHECK_THROWS_AS(eig_dense(H, mp, opts), std::invalid_argument);
}

TEST_CASE("eig_window agrees with eig_dense on N=60, alpha=1, hbar=0.1") {
    ModelParams mp = params(60, Sector::Singlet, 1.0, 0.0, 0.1);
    SectorBasis b = enumerate_sector(mp);
    SparseHamiltonian H = assemble_hamiltonian(mp, b);
    EigenWindow dense = eig_dense(H, mp);
    // pick an interior window holding a couple dozen levels
    int mid = dense.count() / 2;
    double center = dense.energies[mid];
    double width = dense.energies[mid + 12] - dense.energies[mid - 12];
    WindowSpec spec{center, width, 0};
    EigenWindow win = eig_window(H, mp, spec);
    std::vector<double> expect;
    for (double e : dense.energies)
        if (e >= spec.center - width / 2 && e <= spec.center + width / 2) expect.push_back(e);
    REQUIRE(win.count() == static_cast<int>(expect.size()));
    for (int i = 0; i < win.count(); ++i) {
        CHECK(std::abs(win.energies[i] - expect[i]) < 1e-10);
        CHECK(win.residual_norms[i] < 1e-9 * std::max(std::abs(win.energies[i]), mp.hbar));
    }
}

TEST_CASE("empty window returns an empty result") {
    ModelParams mp = params(12, Sector::Singlet, 0.0, 0.0, 0.5);
    SectorBasis b = enumerate_sector(mp);
    SparseHamiltonian H = assemble_hamiltonian(mp, b);
    // harmonic levels are multiples of 0.5; a window between levels is empty
    EigenWindow w = eig_window(H, mp, WindowSpec{0.75, 0.2, 0});
    CHECK(w.count() == 0);
}

TEST_CASE("window completeness against the dense spectrum (hbar = 0.005)") {
    ModelParams mp = params(100, Sector::Singlet, 1.0, 0.0, 0.005);
    SectorBasis b = enumerate_sector(mp);
    SparseHamiltonian H = assemble_hamiltonian(mp, b);
    EigenWindow dense = eig_dense(H, mp);

    WindowSpec spec{0.12, 0.01, 0};
    EigenWindow win = eig_window(H, mp, spec);
    std::vector<double> expect;
    for (double e : dense.energies)
        if (e >= 0.115 && e <= 0.125) expect.push_back(e);
    REQUIRE(win.count() == static_cast<int>(expect.size()));
    for (int i = 0; i < win.count(); ++i)
        CHECK(std::abs(win.energies[i] - expect[i]) < 1e-10);

    SUBCASE("count matches the semiclassical estimate g dE / 3 within 15%") {
        // width 0.02: ~35 levels, so the O(1) level-clustering fluctuation
        // sits well inside the 15% gate
        EigenWindow wide = eig_window(H, mp, WindowSpec{0.12, 0.02, 0});
        double g = dos_thomas_fermi_alpha(0.12, 1.0, mp.hbar);
        double est = g * 0.02 / 3.0;
        CHECK(std::abs(wide.count() - est) / est < 0.15);
    }

    SUBCASE("union of adjacent windows tiles the spectrum with no gaps") {
        EigenWindow w1 = eig_window(H, mp, WindowSpec{0.1175, 0.005, 0});
        EigenWindow w2 = eig_window(H, mp, WindowSpec{0.1225, 0.005, 0});
        std::vector<double> merged = w1.energies;
        merged.insert(merged.end(), w2.energies.begin(), w2.energies.end());
        std::sort(merged.begin(), merged.end());
        REQUIRE(merged.size() == expect.size());
        for (size_t i = 0; i < merged.size(); ++i)
            CHECK(std::abs(merged[i] - expect[i]) < 1e-9);
    }
}

TEST_CASE("count-mode window returns the nearest eigenpairs") {
    ModelParams mp = params(40, Sector::DoubletB, 1.0, 0.0, 0.05);
    SectorBasis b = enumerate_sector(mp);
    SparseHamiltonian H = assemble_hamiltonian(mp, b);
    EigenWindow dense = eig_dense(H, mp);
    double center = dense.energies[dense.count() / 3];
    EigenWindow win = eig_window(H, mp, WindowSpec{center, 0, 8});
    REQUIRE(win.count() == 8);
    std::vector<double> dist;
    for (double e : dense.energies) dist.push_back(std::abs(e - center));
    std::sort(dist.begin(), dist.end());
    double worst_kept = 0;
    for (double e : win.energies) worst_kept = std::max(worst_kept, std::abs(e - center));
    CHECK(worst_kept <= dist[8] + 1e-12);
}

TEST_CASE("inertia counts match the dense spectrum") {
    ModelParams mp = params(30, Sector::Singlet, 1.0, 0.0, 0.05);
    SectorBasis b = enumerate_sector(mp);
    SparseHamiltonian H = assemble_hamiltonian(mp, b);
    EigenWindow dense = eig_dense(H, mp);
    for (double sigma : {0.03, 0.011, 0.3}) {
        long below = std::count_if(dense.energies.begin(), dense.energies.end(),
                                   [&](double e) { return e < sigma; });
        CHECK(eigenvalue_count_below(H, sigma) == below);
    }
}

// --------------------------------------------------------------------------
// density of states

TEST_CASE("Thomas-Fermi f(E) in the alpha -> 0 limit is 2 pi E within 0.1%") {
    double f = dos_scaled_f_alpha(0.1, 1e-4);
    CHECK(std::abs(f - 2 * M_PI * 0.1) / (2 * M_PI * 0.1) < 1e-3);
}

TEST_CASE("harmonic numeric DOS equals the disk area closed form") {
    ModelParams mp = params(0, Sector::Singlet, 0.0, 0.0, 0.05);
    double E = 0.123;
    double area = allowed_area_numeric(E, mp);
    CHECK(std::abs(area - 2 * M_PI * E) / (2 * M_PI * E) < 2e-3);
    CHECK(dos_numeric(E, mp) ==
          doctest::Approx(E / (mp.hbar * mp.hbar)).epsilon(2e-3));
}

TEST_CASE("analytic and numeric routes agree to 0.5% on the common domain") {
    ModelParams mp = params(0, Sector::Singlet, 1.0, 0.0, 0.01);
    for (double E : {0.05, 0.10, 0.14, 1.0 / 6.0}) {
        double fa = dos_scaled_f_alpha(E, 1.0);
        double fn = allowed_area_numeric(E, mp);
        CAPTURE(E);
        CHECK(std::abs(fa - fn) / fa < 5e-3);
    }
}

TEST_CASE("g(E) is finite at the saddle and monotone on (0, 1/6]") {
    double prev = 0;
    for (double E = 0.01; E <= 1.0 / 6.0 + 1e-12; E += 0.005) {
        double f = dos_scaled_f_alpha(std::min(E, 1.0 / 6.0), 1.0);
        CHECK(std::isfinite(f));
        CHECK(f > prev);
        prev = f;
    }
}

TEST_CASE("above-saddle alpha-FPUT numeric DOS is rejected") {
    ModelParams mp = params(0, Sector::Singlet, 1.0, 0.0, 0.01);
    CHECK_THROWS_AS(allowed_area_numeric(0.2, mp), std::domain_error);
    CHECK_THROWS_AS(dos_scaled_f_alpha(0.25, 1.0), std::domain_error);
}

TEST_CASE("general-case DOS at the saddle energy is finite") {
    ModelParams mp = params(0, Sector::Singlet, 1.0, 1.0 / 16.0, 0.005);
    double a3 = allowed_area_numeric(1.0 / 3.0, mp);
    CHECK(std::isfinite(a3));
    CHECK(a3 > 0);
    // kink: slope above the saddle grows (outer lobes open beyond it)
    double lo = allowed_area_numeric(1.0 / 3.0 - 0.02, mp);
    double hi = allowed_area_numeric(1.0 / 3.0 + 0.02, mp);
    CHECK(lo < a3);
    CHECK(a3 < hi);
}

TEST_CASE("heisenberg time") {
    SUBCASE("harmonic closed form t_H = 2 pi E / hbar") {
        ModelParams mp = params(0, Sector::Singlet, 0.0, 0.0, 0.02);
        double t = heisenberg_time(0.1, mp);
        CHECK(std::abs(t - 2 * M_PI * 0.1 / 0.02) / t < 2e-3);
    }
    SUBCASE("scaling: halving hbar doubles t_H at fixed E") {
        ModelParams mp = params(0, Sector::Singlet, 1.0, 0.0, 0.01);
        ModelParams mp2 = mp;
        mp2.hbar = 0.005;
        double t1 = heisenberg_time(0.14, mp);
        double t2 = heisenberg_time(0.14, mp2);
        CHECK(t2 / t1 == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("per-sector variant is a third of the total") {
        ModelParams mp = params(0, Sector::Singlet, 1.0, 0.0, 0.01);
        CHECK(heisenberg_time(0.14, mp, DosScope::PerSector) * 3 ==
              doctest::Approx(heisenberg_time(0.14, mp, DosScope::Total)).epsilon(1e-14));
    }
}

TEST_CASE("dos_curve tabulates both representations consistently") {
    ModelParams mp = params(0, Sector::Singlet, 1.0, 0.0, 0.02);
    DosCurve c = dos_curve({0.05, 0.1, 0.15}, mp);
    REQUIRE(c.energies.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(c.f[i] == doctest::Approx(dos_scaled_f_alpha(c.energies[i], 1.0)).epsilon(1e-10));
        CHECK(c.g[i] == doctest::Approx(c.f[i] / (2 * M_PI * 0.02 * 0.02)).epsilon(1e-14));
    }
    CHECK(c.per_sector_factor == doctest::Approx(1.0 / 3.0));
}
