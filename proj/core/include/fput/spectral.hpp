#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fput/basis.hpp"
#include "fput/params.hpp"

namespace fput {

/// Eigenpairs restricted to an energy shell [window_lo, window_hi].
/// Coefficient columns are C^k_{nl} in the gauged (real) basis, unit norm.
struct EigenWindow {
    std::vector<double> energies;      // ascending
    Eigen::MatrixXd coefficients;      // dim x nstates
    double window_lo = 0, window_hi = 0;
    ModelParams params;
    std::vector<double> residual_norms;  // ||H v - E v|| per state

    int count() const { return static_cast<int>(energies.size()); }
};

struct EigOptions {
    double tol = 1e-9;        // residual tolerance, relative to max(|E|, hbar)
    int max_basis = 700;      // thick-restart cap on the Krylov basis
    int dense_bound = 20000;  // eig_dense refuses above this dimension
    uint64_t seed = 20240717; // start-vector seed (deterministic pipelines)
};

/// Full spectrum by dense diagonalization; errors when dim > opts.dense_bound.
EigenWindow eig_dense(const SparseHamiltonian& H, const ModelParams& params,
                      const EigOptions& opts = {});

/// Window request: all eigenpairs in [center-width/2, center+width/2] when
/// width > 0, otherwise the `count` eigenpairs closest to center.
struct WindowSpec {
    double center = 0;
    double width = 0;
    int count = 0;
};

/// Interior eigenpairs by shift-invert Lanczos (full reorthogonalization,
/// thick restart) on an LDLT factorization of H - sigma I. Completeness of a
/// width-window is certified by inertia counts at both edges; an incomplete
/// window throws (never silently truncated).
EigenWindow eig_window(const SparseHamiltonian& H, const ModelParams& params,
                       const WindowSpec& spec, const EigOptions& opts = {});

/// Number of eigenvalues of H strictly below sigma, from LDLT inertia.
int eigenvalue_count_below(const SparseHamiltonian& H, double sigma);

// ---- semiclassical density of states -------------------------------------

/// Scaled Thomas-Fermi DOS f(E) = 2 pi hbar^2 g(E) for the alpha-FPUT case
/// (hbar-free). Valid for 0 < E <= 1/(6 alpha^2); adaptive Gauss-Kronrod to
/// 1e-10 relative.
double dos_scaled_f_alpha(double E, double alpha);

/// Thomas-Fermi g(E) for alpha-FPUT (all sectors); domain as above.
double dos_thomas_fermi_alpha(double E, double alpha, double hbar);

/// g(E) from the numeric phase-space area of the bounded well: the connected
/// component of {V < E} containing the origin, by flood fill on a refined
/// indicator grid. Rejects the alpha-FPUT above-saddle regime (unbounded).
double dos_numeric(double E, const ModelParams& params);

/// Classically allowed configuration-space area backing dos_numeric
/// (equals f(E) in the scaled units).
double allowed_area_numeric(double E, const ModelParams& params);

enum class DosScope { Total, PerSector };

/// Heisenberg time t_H = 2 pi hbar g(E); PerSector divides g by 3.
double heisenberg_time(double E, const ModelParams& params,
                       DosScope scope = DosScope::Total);

struct DosCurve {
    std::vector<double> energies;
    std::vector<double> g;   // 1/energy
    std::vector<double> f;   // 2 pi hbar^2 g, dimensionless
    double per_sector_factor = 1.0 / 3.0;
};

/// Tabulate g and f on an energy grid (parallel over energies). Uses the
/// analytic route when available for alpha-FPUT, numeric area otherwise.
DosCurve dos_curve(const std::vector<double>& energies, const ModelParams& params);

}  // namespace fput
