#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "fput/gridfield.hpp"
#include "fput/params.hpp"
#include "fput/spectral.hpp"

namespace fput {

/// Canonical coordinates of the scaled two-degree-of-freedom Hamiltonian.
struct PhasePoint {
    double q1 = 0, q2 = 0, p1 = 0, p2 = 0;
};

double potential_v(double q1, double q2, const ModelParams& mp);
void potential_grad(double q1, double q2, const ModelParams& mp, double& v1, double& v2);
void potential_hess(double q1, double q2, const ModelParams& mp, double& h11, double& h12,
                    double& h22);
double hamiltonian(const PhasePoint& x, const ModelParams& mp);

/// p1^2 on the surface of section q1 = 0 at energy E; negative means the
/// cell lies outside the allowed region S.
double sos_p1_squared(double E, double q2, double p2, const ModelParams& mp);

/// q2 range of the SOS (roots of V(0, q2) = E on both sides of the origin).
std::array<double, 2> sos_q2_range(double E, const ModelParams& mp);

/// Bounding box of the allowed SOS region: [q2lo, q2hi] x [-sqrt(2E), sqrt(2E)].
GridSpec sos_grid_spec(double E, const ModelParams& mp, int nx = 200, int ny = 200);

/// Bounding box of the classically allowed configuration region {V < E}.
GridSpec config_grid_spec(double E, const ModelParams& mp, int nx = 200, int ny = 200);

struct TrajectoryOptions {
    double rel_tol = 1e-13;
    double abs_tol = 1e-14;
    double max_step = 0.0;       // cap on the internal step in scaled time; 0 = none
    bool detect_escape = true;   // only meaningful for lambda = 0 above-saddle runs
    double escape_r = 0.0;       // 0 -> auto (3/alpha for the cubic-only case)
};

struct EscapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrajectorySample {
    double t;       // periods of the linear oscillator (tau / 2 pi)
    PhasePoint x;
};

/// Integrate the flow for t_end periods, sampling every sample_dt periods
/// (adaptive RK8(9) Prince-Dormand underneath; relative energy drift is the
/// quality gate, see tests).
std::vector<TrajectorySample> integrate(const PhasePoint& ic, const ModelParams& mp,
                                        double t_end, double sample_dt,
                                        const TrajectoryOptions& opts = {});

/// Poincare section q1 = 0, p1 > 0: crossings located with Henon's trick
/// (one integration step in q1 as the independent variable), so the returned
/// points satisfy q1 = 0 exactly up to integrator tolerance.
std::vector<std::array<double, 2>> sos_section(const PhasePoint& ic, const ModelParams& mp,
                                               double t_end,
                                               const TrajectoryOptions& opts = {});

struct SaliSeries {
    std::vector<double> t;      // periods, log-spaced samples
    std::vector<double> sali;
    double final_sali = 0;      // value at t_end (or at early exit)
    double final_t = 0;
};

struct SaliOptions {
    TrajectoryOptions traj;
    double renorm_dtau = 0.5;   // deviation-vector renormalization step (scaled time)
    double early_exit = 1e-12;  // stop once SALI drops below (chaotic for sure)
    std::array<double, 4> dev1 = {1, 0, 0, 0};  // e_q1
    std::array<double, 4> dev2 = {0, 0, 0, 1};  // e_p2
};

/// SALI(t) = min(|v1+v2|, |v1-v2|) with unit-normalized deviation vectors
/// evolved under the tangent flow.
SaliSeries sali(const PhasePoint& ic, const ModelParams& mp, double t_end,
                const SaliOptions& opts = {});

struct SaliMapResult {
    GridField sali_map;        // SALI at t_end (empty cells NaN)
    GridField classification;  // +1 chaotic, -1 regular, NaN outside S
    double eta_c = 0;          // chaotic cells / allowed cells
    double threshold = 0;
    double t_end = 0;
};

/// Per-cell SALI on the SOS grid with initial conditions (q2, p2, q1=0,
/// p1 = p1+). C = +1 where SALI(t_end) <= threshold. Parallel over cells,
/// deterministic (fixed reduction order).
SaliMapResult sali_map(double E, const ModelParams& mp, const GridSpec& grid,
                       double t_end = 1000.0, double threshold = 1e-8,
                       const SaliOptions& opts = {});

struct TransportSpec {
    int n_ic = 4000;
    double q2_lo = -0.25, q2_hi = -0.15;
    double p2 = 0.0;
    double horizon = 400.0;     // periods
    double sample_dt = 0.5;     // periods
    double window = 30.0;       // sliding window for the temporal fluctuation
    double threshold = 0.02;    // fraction of peak mu_p^2
};

struct TransportResult {
    double t_T = 0;
    std::vector<double> times;         // sigma series sample times (periods)
    std::vector<double> sigma_series;  // ensemble variance of (p1, p2)
    std::vector<double> mu_times;
    std::vector<double> mu_series;     // variance of sigma over the sliding window
    double threshold_used = 0;
    double sat_value = 0;              // long-time average of sigma_p^2
};

/// Transport time from the temporal fluctuation of sigma_p^2(t): first time
/// after which mu_p^2 stays below threshold * peak until the horizon.
/// Throws when the fluctuation never settles within the horizon.
TransportResult transport_time(double E, const ModelParams& mp,
                               const TransportSpec& spec = {},
                               const TrajectoryOptions& opts = {});

/// Alternative estimator from |sigma^2(t) - sat| <= eps1 for all t >= t_T.
double transport_time_eps1(const TransportResult& r, double eps1);

/// Re-evaluate t_T from an already computed fluctuation series at a different
/// threshold (same horizon/never-settles semantics as transport_time).
double transport_time_at_threshold(const TransportResult& r, double threshold);

/// Localization control ratio alpha_L = f_scope(E) / (hbar t_T). The default
/// follows the per-sector level counting N ~ g dE / 3; Total uses the full g.
double alpha_ratio(double E, const ModelParams& mp, double t_T,
                   DosScope scope = DosScope::PerSector);

}  // namespace fput
