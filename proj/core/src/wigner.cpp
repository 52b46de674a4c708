#include "fput/wigner.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace fput {

std::complex<double> ipow(long k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

namespace {

/// P_s^{(mu,nu)}(0) as mantissa * 2^e2; the recurrence is scaled whenever the
/// mantissa leaves [2^-500, 2^500] so arbitrarily large blocks stay finite.
void jacobi_at_zero(int s, int mu, int nu, double& mant, long& e2) {
    double pm2 = 1.0, pm1 = 0.5 * (mu - nu);
    long em2 = 0, em1 = 0;
    if (s == 0) { mant = pm2; e2 = em2; return; }
    if (s == 1) { mant = pm1; e2 = em1; return; }
    for (int k = 2; k <= s; ++k) {
        double a = 2.0 * k * (k + mu + nu) * (2.0 * k + mu + nu - 2);
        double b = (2.0 * k + mu + nu - 1) * (double(mu) * mu - double(nu) * nu);
        double c = 2.0 * (k + mu - 1.0) * (k + nu - 1.0) * (2.0 * k + mu + nu);
        // bring both history terms to a common exponent before combining
        double pm2s = std::ldexp(pm2, static_cast<int>(em2 - em1));
        double p = (b * pm1 - c * pm2s) / a;
        pm2 = pm1; em2 = em1;
        pm1 = p;
        if (pm1 != 0.0) {
            int ex;
            std::frexp(pm1, &ex);
            if (ex > 500 || ex < -500) {
                pm1 = std::ldexp(pm1, -ex);
                pm2 = std::ldexp(pm2, -ex);
                em1 += ex;
                em2 += ex;
            }
        }
    }
    mant = pm1;
    e2 = em1;
}

}  // namespace

WignerBlock wigner_d_jacobi(int two_j) {
    if (two_j < 0) throw std::invalid_argument("two_j must be >= 0");
    WignerBlock blk;
    blk.two_j = two_j;
    const int n = two_j + 1;
    blk.d.resize(n, n);
    constexpr double ln2 = 0.6931471805599453094;
    for (int r = 0; r < n; ++r) {
        int two_m = -two_j + 2 * r;
        for (int c = 0; c < n; ++c) {
            int two_mp = -two_j + 2 * c;
            int mu = std::abs(two_m - two_mp) / 2;
            int nu = std::abs(two_m + two_mp) / 2;
            // mu + nu = max(|m|,|m'|) shares the parity of j, so s is integral
            int s = (two_j - mu - nu) / 2;
            double xi = (two_mp >= two_m) ? 1.0 : (((two_m - two_mp) / 2) % 2 ? -1.0 : 1.0);
            double logpref =
                0.5 * (std::lgamma(s + 1.0) + std::lgamma(s + mu + nu + 1.0) -
                       std::lgamma(s + mu + 1.0) - std::lgamma(s + nu + 1.0)) -
                0.5 * (mu + nu) * ln2;  // (sin pi/4)^mu (cos pi/4)^nu
            double mant;
            long e2;
            jacobi_at_zero(s, mu, nu, mant, e2);
            double val = 0.0;
            if (mant != 0.0) {
                double sign = mant > 0 ? 1.0 : -1.0;
                double lg = logpref + std::log(std::abs(mant)) + e2 * ln2;
                val = sign * std::exp(lg);
            }
            blk.d(r, c) = xi * val;
        }
    }
    return blk;
}

WignerBlock wigner_d_expm(int two_j) {
    if (two_j < 0) throw std::invalid_argument("two_j must be >= 0");
    const int n = two_j + 1;
    const double j = 0.5 * two_j;
    // J_y is imaginary antisymmetric tridiagonal in the |j m> basis
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    const std::complex<double> I(0, 1);
    for (int r = 0; r + 1 < n; ++r) {
        double m = -j + r;  // coupling |j m> -> |j m+1>
        double g = std::sqrt(j * (j + 1) - m * (m + 1));
        A(r + 1, r) += -I * (M_PI / 2.0) * (-I * 0.5 * g);  // -i theta (J_+ - J_-)/(2i)
        A(r, r + 1) += -I * (M_PI / 2.0) * (+I * 0.5 * g);
    }
    Eigen::MatrixXcd E = A.exp();
    double imres = E.imag().cwiseAbs().maxCoeff();
    if (imres > 1e-9)
        throw std::runtime_error("wigner_d_expm: imaginary residue " + std::to_string(imres));
    WignerBlock blk;
    blk.two_j = two_j;
    blk.d = E.real();
    return blk;
}

CircularToCartesian circular_to_cartesian(int two_j, DRoute route) {
    WignerBlock blk = route == DRoute::Jacobi ? wigner_d_jacobi(two_j) : wigner_d_expm(two_j);
    CircularToCartesian out;
    out.two_j = two_j;
    const int n = two_j + 1;
    out.O.resize(n, n);
    for (int c = 0; c < n; ++c) {
        int two_mp = -two_j + 2 * c;
        std::complex<double> ph = ipow((two_mp - two_j) / 2);  // i^{m'-j}
        for (int r = 0; r < n; ++r) out.O(r, c) = ph * blk.d(r, c);
    }
    return out;
}

}  // namespace fput
