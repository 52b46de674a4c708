#pragma once

#include <string>
#include <vector>

#include "fput/gridfield.hpp"
#include "fput/params.hpp"

namespace fput {

/// Per-eigenstate derived scalars as serialized by StatsFile.
struct StateStats {
    int k = 0;            // index within its ensemble
    double E = 0;
    double M = 0;         // overlap index in [-1, 1]
    double L1 = 0;        // alpha = 1 (Wehrl) ELM
    double L2 = 0;        // alpha = 2 (IPR) ELM
    Sector sector = Sector::Singlet;
    double hbar = 0;
};

/// Overlap index M = sum C_ij Q_ij / sum Q_ij over cells valid in both the
/// QSOS field and the classification map (identical geometry required).
double overlap_index(const GridField& qsos, const GridField& classification);

/// Fraction of states with M0 <= M <= M1 (closed window).
double mixed_fraction(const std::vector<StateStats>& stats, double M0, double M1);
double mixed_fraction(const std::vector<double>& M_values, double M0, double M1);

struct PowerLawFit {
    double xi = 0;         // chi ~ hbar^xi
    double se = 0;         // standard error of the slope
    double log_prefactor = 0;
    int n_used = 0;
    int n_excluded = 0;    // chi = 0 points dropped (with warning)
};

/// Least-squares slope of ln chi vs ln hbar.
PowerLawFit fit_power_law(const std::vector<double>& hbars,
                          const std::vector<double>& chis);

/// Renyi-Wehrl entropy localization measure of order alpha over the chaotic
/// region: cells where classification = +1 (all filled cells when
/// ergodic_all_cells). The field is rescaled internally to sum 1 over that
/// region; alpha = 1 is the Shannon/Wehrl limit.
double elm(const GridField& qsos, const GridField& classification, double alpha,
           bool ergodic_all_cells = false);

/// Chaotic-region cell count N_c backing the ELM normalization.
int chaotic_cell_count(const GridField& classification, bool ergodic_all_cells = false);

/// Random pure-state bound L^alpha = Gamma(1+alpha)^{1/(1-alpha)};
/// alpha -> 1 gives e^{gamma - 1}.
double random_state_bound(double alpha);

struct BetaFit {
    double beta_a = 0, beta_b = 0;  // P(L) ~ L^beta_a (L0 - L)^beta_b
    double L0 = 0;                  // support upper limit (profiled)
    double loglik = 0;
    double ks = 0;                  // Kolmogorov-Smirnov distance of the fit
    int n_samples = 0;
};

/// Maximum-likelihood beta fit of ELM samples with L0 profiled over a grid
/// from max(sample) to 1.2 max(sample).
BetaFit fit_beta(const std::vector<double>& samples);

/// Model variance of the fitted distribution,
/// Var = L0^2 (a b)/((a+b)^2 (a+b+1)) with a = beta_a + 1, b = beta_b + 1.
double beta_fit_variance(const BetaFit& fit);

/// CDF of the fitted distribution at x (for goodness-of-fit checks).
double beta_fit_cdf(const BetaFit& fit, double x);

/// States with M >= M_c (paper choice M_c = 0.8).
std::vector<StateStats> classify_chaotic(const std::vector<StateStats>& stats, double M_c);

}  // namespace fput
