#pragma once

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "fput/params.hpp"

namespace fput {

/// Enumerated circular-basis states (n, l) of one C3v sector.
///
/// States are ordered lexicographically by (n, l) and the ordering is
/// deterministic. Valid states satisfy n <= cutoff, l = -n, -n+2, ..., n and
/// l ≡ sector residue (mod 3).
///
/// The stored Hamiltonian is made real symmetric by a diagonal gauge: basis
/// state |n,l> is multiplied by i^t with t = (l - r)/3, r the sector residue.
/// gauge_pow holds t mod 4; husimi evaluation must restore the phase when
/// reconstructing raw coefficients C_{nl} = i^t * C'_{nl}.
struct SectorBasis {
    Sector sector = Sector::Singlet;
    int cutoff_n = 0;
    std::vector<std::pair<int, int>> states;     // (n, l)
    std::vector<uint8_t> gauge_pow;              // i-exponent mod 4 per state
    std::unordered_map<uint64_t, int> index;

    static uint64_t key(int n, int l) {
        return (static_cast<uint64_t>(static_cast<uint32_t>(n)) << 32) |
               static_cast<uint32_t>(l + (1 << 30));
    }
    /// dense index of (n, l), or -1 when not in the sector
    int index_of(int n, int l) const {
        auto it = index.find(key(n, l));
        return it == index.end() ? -1 : it->second;
    }
    int size() const { return static_cast<int>(states.size()); }
    std::complex<double> gauge(int i) const {
        static const std::complex<double> tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return tab[gauge_pow[i]];
    }
};

SectorBasis enumerate_sector(const ModelParams& params);

/// One matrix element of q±^3 in the circular basis:
/// <n+dn, l+dl | q±^3 | n, l> = hbar^{3/2} * coeff, dl = ±3, dn in {±1, ±3}.
struct CubicElement {
    int dn;
    int dl;           // +3 or -3
    double coeff;     // k_m^± of Appendix-A form, no hbar factor
};

/// One matrix element of (q+q-)^2: <n+dn, l | (q+q-)^2 | n, l> = hbar^2 * coeff.
struct QuarticElement {
    int dn;
    double coeff;
};

/// Nonzero k_m^± coefficients out of state (n, l); k_m^+(n,l) = k_m^-(n,-l).
std::vector<CubicElement> cubic_elements(int n, int l);

/// Nonzero quartic coefficients k_m(n, l), m in {0, ±2, ±4}.
std::vector<QuarticElement> quartic_elements(int n, int l);

/// Sector Hamiltonian in the gauged (real symmetric) circular basis.
/// Both triangles are stored explicitly; assembly goes through a coordinate
/// list and duplicates are summed on conversion to compressed storage.
struct SparseHamiltonian {
    int dim = 0;
    Eigen::SparseMatrix<double> mat;   // compressed column storage, symmetric
};

/// H = hbar(n+1) on the diagonal - (alpha hbar^{3/2}/6)(cubic) + lambda hbar^2 (quartic).
/// Throws when cutoff_n exceeds 1e5 (radicands would lose float precision)
/// or when the basis does not match params.
SparseHamiltonian assemble_hamiltonian(const ModelParams& params, const SectorBasis& basis);

}  // namespace fput
