#pragma once

#include <complex>

#include <Eigen/Dense>

namespace fput {

/// Wigner d-matrix block at theta = pi/2. Half-integer spins are carried as
/// two_j = 2j to keep integer keys. Row index r maps to m = -j + r, column
/// index c to m' = -j + c (both in steps of 1, i.e. two_m = -two_j + 2r).
struct WignerBlock {
    int two_j = 0;
    Eigen::MatrixXd d;   // (2j+1) x (2j+1)

    int dim() const { return two_j + 1; }
    int row_of(int two_m) const { return (two_m + two_j) / 2; }
    /// d^j_{m,m'}(pi/2) addressed by doubled quantum numbers
    double at2(int two_m, int two_mp) const { return d(row_of(two_m), row_of(two_mp)); }
};

/// Jacobi-polynomial route: mu = |m-m'|, nu = |m+m'|, s = j-(mu+nu)/2,
/// P_s^{(mu,nu)}(0) by three-term recurrence with exponent-tracked scaling.
/// Stable for all tested j (spot checked against the exact Wigner sum).
WignerBlock wigner_d_jacobi(int two_j);

/// Matrix-exponential route: d = exp(-i pi J_y / 2) via scaling-and-squaring
/// on the tridiagonal generator. Throws if the imaginary residue of the
/// result exceeds 1e-9 (a generator construction bug); the residue is
/// discarded after the check.
WignerBlock wigner_d_expm(int two_j);

enum class DRoute { Jacobi, Expm };

/// Unitary map between circular |n,l> = |2j,2m> and Cartesian |n1,n2> bases:
/// O^j_{m,m'} = i^{m'-j} d^j_{m,m'}(pi/2), n1 = j+m', n2 = j-m'.
struct CircularToCartesian {
    int two_j = 0;
    Eigen::MatrixXcd O;  // same indexing as WignerBlock

    int dim() const { return two_j + 1; }
    std::complex<double> at2(int two_m, int two_mp) const {
        return O((two_m + two_j) / 2, (two_mp + two_j) / 2);
    }
};

CircularToCartesian circular_to_cartesian(int two_j, DRoute route = DRoute::Jacobi);

/// i^k for possibly negative integer k
std::complex<double> ipow(long k);

}  // namespace fput
