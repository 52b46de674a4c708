#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "fput/basis.hpp"
#include "fput/classical.hpp"
#include "fput/gridfield.hpp"
#include "fput/wigner.hpp"

namespace fput {

/// Coherent-state parameters of a phase-space point: a_i = (q_i + i p_i)/sqrt(2 hbar)
/// and the rotated pair a_pm = (a_1 -/+ i a_2)/sqrt(2).
struct CoherentPoint {
    std::complex<double> a1, a2;

    static CoherentPoint from_qp(double q1, double p1, double q2, double p2, double hbar) {
        double s = 1.0 / std::sqrt(2.0 * hbar);
        return {{q1 * s, p1 * s}, {q2 * s, p2 * s}};
    }
    std::complex<double> a_plus() const {
        return (a1 - std::complex<double>(0, 1) * a2) / std::sqrt(2.0);
    }
    std::complex<double> a_minus() const {
        return (a1 + std::complex<double>(0, 1) * a2) / std::sqrt(2.0);
    }
};

/// ln|<alpha|n>| and arg<alpha|n> for <alpha|n> = e^{-|a|^2/2} (a*)^n / sqrt(n!),
/// evaluated in the log domain (never forms n! directly).
struct LogOverlap {
    double log_mag;
    double phase;
};
LogOverlap log_overlap(int n, std::complex<double> alpha);

/// Evaluates |<a1,a2|psi>|^2 through the circular route
///   <a+,a-|n,l> = (a+*)^{n+} (a-*)^{n-} / sqrt(n+! n-!) * e^{-(|a+|^2+|a-|^2)/2}.
/// Per grid point the two per-mode overlap vectors are formed once (the
/// exponential is folded per mode so every factor stays <= 1) and combined
/// with the coefficients through the (n+, n-) index map.
class HusimiEvaluator {
public:
    /// from a gauged sector eigenvector; gauge phases are restored internally.
    /// Coefficients with |c| <= prune are dropped (they are irrelevant far
    /// below the 1e-11 rendering floor; pass 0 to keep everything).
    HusimiEvaluator(const SectorBasis& basis, const Eigen::VectorXd& coeffs, double hbar,
                    double prune = 1e-15);

    /// from explicit complex coefficients over arbitrary (n, l) states
    HusimiEvaluator(const std::vector<std::pair<int, int>>& states,
                    const std::vector<std::complex<double>>& coeffs, double hbar,
                    double prune = 0.0);

    /// amplitude <a1,a2|psi>
    std::complex<double> amplitude(std::complex<double> a1, std::complex<double> a2) const;
    double value(const CoherentPoint& pt) const {
        return std::norm(amplitude(pt.a1, pt.a2));
    }
    double value_qp(double q1, double p1, double q2, double p2) const {
        return value(CoherentPoint::from_qp(q1, p1, q2, p2, hbar_));
    }
    double hbar() const { return hbar_; }

private:
    void finalize(std::vector<std::pair<int, int>> nl, std::vector<std::complex<double>> c,
                  double prune);

    double hbar_ = 1.0;
    int max_np_ = 0, max_nm_ = 0;
    std::vector<int> np_, nm_;
    std::vector<std::complex<double>> c_;
};

/// Husimi field plus its normalization record.
struct HusimiField {
    GridField field;
    double norm = 1.0;  // QSOS: A_k; projections: raw grid sum before any rescale
};

/// Husimi quantum surface of section on q1 = 0, p1 = p1+(E_k, q2, p2),
/// normalized so that (1/pi) sum Q * dq2 dp2 / (2 hbar) = 1.
HusimiField qsos(const HusimiEvaluator& state, double E_k, const GridSpec& grid,
                 const ModelParams& mp);

/// Cartesian-basis coefficients B^k_{n1 n2} = sum_l C_{nl} Omega^{nl}_{n1 n2}.
struct CartesianCoeffs {
    int cutoff_n = 0;
    double hbar = 1.0;
    Eigen::MatrixXcd B;  // (N+1) x (N+1), nonzero on n1 + n2 <= N
};
CartesianCoeffs cartesian_coefficients(const SectorBasis& basis,
                                       const Eigen::VectorXd& coeffs, double hbar,
                                       DRoute route = DRoute::Jacobi);
/// same for explicit complex circular coefficients (tests)
CartesianCoeffs cartesian_coefficients(const std::vector<std::pair<int, int>>& states,
                                       const std::vector<std::complex<double>>& coeffs,
                                       double hbar, DRoute route = DRoute::Jacobi);

/// Cartesian-route Husimi |sum B <a1|n1><a2|n2>|^2 (cross-validation of the
/// circular route, Appendix-C equivalence).
double husimi_cartesian(const CartesianCoeffs& B, const CoherentPoint& pt);

/// Completely projected Husimi P(a2) = (1/pi) int H d^2a1 = |B v(a2)|^2 summed
/// over n1. Unnormalized; field.norm records the grid sum.
HusimiField project_complete(const CartesianCoeffs& B, const GridSpec& grid);

/// Energy-shell projection in (q2, p2):
///   P~(q2,p2) = (1/hbar) int_{p1-}^{p1+} dp1 H(q1+, p1; q2, p2)/|dH/dq1|,
/// Chebyshev-Gauss quadrature absorbing the inverse-square-root fold
/// endpoints; q1+(p1) located by bracketed bisection + Newton polish.
HusimiField project_shell(const HusimiEvaluator& state, double E_k, const GridSpec& grid,
                          const ModelParams& mp, int nodes = 64);

/// single-point evaluations backing the field sweeps (NaN outside the shell)
double project_shell_point(const HusimiEvaluator& state, double E_k, double q2, double p2,
                           const ModelParams& mp, int nodes = 64);
double project_config_point(const HusimiEvaluator& state, double E_k, double q1, double q2,
                            const ModelParams& mp, int nodes = 64);

/// Energy-shell projection in configuration space:
///   P~(q1,q2) = (1/hbar) int dp2 H(q1, p1+; q2, p2)/p1+,
/// with the substitution p2 = p2+ cos(theta) making the weight exactly
/// Chebyshev-Gauss.
HusimiField project_config(const HusimiEvaluator& state, double E_k, const GridSpec& grid,
                           const ModelParams& mp, int nodes = 64);

/// psi(q1, q2) from Hermite-Gauss modes via the stable normalized recurrence
/// h_{n+1} = x sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1} (no factorials, so
/// large cutoffs stay finite).
std::complex<double> wavefunction(const CartesianCoeffs& B, double q1, double q2);

/// Normalized Hermite functions h_n(x) (including the Gaussian and pi^{-1/4})
/// for n = 0..nmax, returned as mantissa/exponent pairs combined on use.
void hermite_functions(int nmax, double x, std::vector<double>& mant, std::vector<int>& e2);

}  // namespace fput
