#include "fput/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace fput {

namespace {

inline int imod3(int l) { return ((l % 3) + 3) % 3; }

inline double safe_sqrt8(double r) {
    // radicands of the k_m^± are products of even nonnegative integers by
    // construction on valid (n, l); a negative value signals a caller bug
    if (r < 0) throw std::logic_error("cubic coefficient radicand < 0");
    return std::sqrt(r / 8.0);
}

}  // namespace

SectorBasis enumerate_sector(const ModelParams& params) {
    params.validate();
    SectorBasis b;
    b.sector = params.sector;
    b.cutoff_n = params.cutoff_n;
    const int r = sector_residue(params.sector);
    for (int n = 0; n <= params.cutoff_n; ++n) {
        for (int l = -n; l <= n; l += 2) {
            if (imod3(l) != r) continue;
            int i = static_cast<int>(b.states.size());
            b.states.emplace_back(n, l);
            int t = ((l - r) / 3) % 4;
            b.gauge_pow.push_back(static_cast<uint8_t>((t + 4) % 4));
            b.index.emplace(SectorBasis::key(n, l), i);
        }
    }
    return b;
}

std::vector<CubicElement> cubic_elements(int n, int l) {
    auto kp = [](int m, int n_, int l_) -> double {
        // k_m^+ : <n+m, l+3 | q_+^3 | n, l> / hbar^{3/2}
        double nd = n_, ld = l_;
        switch (m) {
            case -1: return 3.0 * safe_sqrt8((nd - ld) * (nd - ld - 2) * (nd + ld + 2));
            case 1:  return 3.0 * safe_sqrt8((nd - ld) * (nd + ld + 2) * (nd + ld + 4));
            case -3: return safe_sqrt8((nd - ld) * (nd - ld - 2) * (nd - ld - 4));
            case 3:  return safe_sqrt8((nd + ld + 2) * (nd + ld + 4) * (nd + ld + 6));
        }
        return 0.0;
    };
    std::vector<CubicElement> out;
    out.reserve(8);
    for (int m : {-3, -1, 1, 3}) {
        if (n + m < 0) continue;
        double a = kp(m, n, l);                 // dl = +3
        double c = kp(m, n, -l);                // dl = -3 via k_m^-(n,l) = k_m^+(n,-l)
        if (a != 0.0 && std::abs(l + 3) <= n + m) out.push_back({m, 3, a});
        if (c != 0.0 && std::abs(l - 3) <= n + m) out.push_back({m, -3, c});
    }
    return out;
}

std::vector<QuarticElement> quartic_elements(int n, int l) {
    double nd = n, ld = l;
    auto rad = [](double x) {
        if (x < -1e-9) throw std::logic_error("quartic coefficient radicand < 0");
        return std::sqrt(std::max(x, 0.0));
    };
    // lowering coefficients vanish automatically when the target state would
    // be invalid (parity forces |l| = n there, zeroing a factor); k_{-4} uses
    // a single radicand of the product since the second factor alone can be
    // negative at |l| = n where the first is zero
    double k[5] = {
        1.5 * nd * nd - 0.5 * ld * ld + 3.0 * nd + 2.0,
        nd * rad(nd * nd - ld * ld),
        (nd + 2) * rad((nd + 2) * (nd + 2) - ld * ld),
        0.25 * rad((nd * nd - ld * ld) * ((nd - 2) * (nd - 2) - ld * ld)),
        0.25 * rad(((nd + 2) * (nd + 2) - ld * ld) * ((nd + 4) * (nd + 4) - ld * ld))};
    int dn[5] = {0, -2, 2, -4, 4};
    std::vector<QuarticElement> out;
    out.reserve(5);
    for (int m = 0; m < 5; ++m)
        if (k[m] != 0.0 && n + dn[m] >= 0) out.push_back({dn[m], k[m]});
    return out;
}

SparseHamiltonian assemble_hamiltonian(const ModelParams& params, const SectorBasis& basis) {
    params.validate();
    if (params.cutoff_n > 100000)
        throw std::invalid_argument(
            "cutoff_n > 1e5: coefficient radicands ~ (2n)^3 would consume the "
            "double mantissa");
    if (basis.cutoff_n != params.cutoff_n || basis.sector != params.sector)
        throw std::invalid_argument("basis was built from different params");

    const int dim = basis.size();
    const double c_cub = -params.alpha * std::pow(params.hbar, 1.5) / 6.0;
    const double c_qua = params.lambda * params.hbar * params.hbar;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(dim) * 14);

    for (int i = 0; i < dim; ++i) {
        auto [n, l] = basis.states[i];
        trip.emplace_back(i, i, params.hbar * (n + 1));

        if (c_qua != 0.0) {
            for (const auto& e : quartic_elements(n, l)) {
                if (e.dn < 0) continue;  // lower triangle comes from the mirror
                if (e.dn == 0) {
                    trip.emplace_back(i, i, c_qua * e.coeff);
                    continue;
                }
                int j = basis.index_of(n + e.dn, l);
                if (j < 0) continue;
                trip.emplace_back(j, i, c_qua * e.coeff);
                trip.emplace_back(i, j, c_qua * e.coeff);
            }
        }
        if (c_cub != 0.0) {
            // gauged elements are -(alpha hbar^{3/2}/6) k_m^± for both dl = ±3;
            // emitting raising-in-n entries plus mirrors covers the matrix once
            for (const auto& e : cubic_elements(n, l)) {
                if (e.dn < 0) continue;
                int j = basis.index_of(n + e.dn, l + e.dl);
                if (j < 0) continue;
                trip.emplace_back(j, i, c_cub * e.coeff);
                trip.emplace_back(i, j, c_cub * e.coeff);
            }
        }
    }

    SparseHamiltonian H;
    H.dim = dim;
    H.mat.resize(dim, dim);
    H.mat.setFromTriplets(trip.begin(), trip.end());  // duplicates summed here
    H.mat.makeCompressed();
    return H;
}

}  // namespace fput
