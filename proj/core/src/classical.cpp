#include "fput/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <gsl/gsl_odeiv2.h>

#include "fput/parallel.hpp"
#include "gsl_quiet.hpp"

namespace fput {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double potential_v(double q1, double q2, const ModelParams& mp) {
    double r2 = q1 * q1 + q2 * q2;
    return 0.5 * r2 + mp.alpha * (q1 * q1 * q2 - q2 * q2 * q2 / 3.0) +
           mp.lambda * r2 * r2;
}

void potential_grad(double q1, double q2, const ModelParams& mp, double& v1, double& v2) {
    double r2 = q1 * q1 + q2 * q2;
    v1 = q1 + 2.0 * mp.alpha * q1 * q2 + 4.0 * mp.lambda * r2 * q1;
    v2 = q2 + mp.alpha * (q1 * q1 - q2 * q2) + 4.0 * mp.lambda * r2 * q2;
}

void potential_hess(double q1, double q2, const ModelParams& mp, double& h11, double& h12,
                    double& h22) {
    h11 = 1.0 + 2.0 * mp.alpha * q2 + 4.0 * mp.lambda * (3 * q1 * q1 + q2 * q2);
    h12 = 2.0 * mp.alpha * q1 + 8.0 * mp.lambda * q1 * q2;
    h22 = 1.0 - 2.0 * mp.alpha * q2 + 4.0 * mp.lambda * (q1 * q1 + 3 * q2 * q2);
}

double hamiltonian(const PhasePoint& x, const ModelParams& mp) {
    return 0.5 * (x.p1 * x.p1 + x.p2 * x.p2) + potential_v(x.q1, x.q2, mp);
}

double sos_p1_squared(double E, double q2, double p2, const ModelParams& mp) {
    return 2.0 * E - p2 * p2 - 2.0 * potential_v(0.0, q2, mp);
}

std::array<double, 2> sos_q2_range(double E, const ModelParams& mp) {
    auto f = [&](double q2) { return potential_v(0.0, q2, mp) - E; };
    auto first_crossing = [&](double dir) {
        double a = 0.0, b = dir * 1e-3;
        while (f(b) < 0 && std::abs(b) < 1e4) {
            a = b;
            b *= 1.25;
        }
        if (f(b) < 0) throw std::runtime_error("sos_q2_range: boundary not found");
        for (int it = 0; it < 200; ++it) {
            double m = 0.5 * (a + b);
            (f(m) < 0 ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    return {first_crossing(-1.0), first_crossing(+1.0)};
}

GridSpec sos_grid_spec(double E, const ModelParams& mp, int nx, int ny) {
    auto [qlo, qhi] = sos_q2_range(E, mp);
    double pmax = std::sqrt(2.0 * E);
    return GridSpec{nx, ny, qlo, qhi, -pmax, pmax};
}

GridSpec config_grid_spec(double E, const ModelParams& mp, int nx, int ny) {
    // square box covering the origin component of {V < E}; the march is capped
    // past the saddle radius in the cubic-only case (grazing rays escape)
    double rcap = 1e3;
    if (mp.lambda == 0.0 && mp.alpha != 0.0) rcap = 1.2 / std::abs(mp.alpha);
    double R = std::sqrt(2.0 * E);
    for (int k = 0; k < 360; ++k) {
        double phi = kTwoPi * k / 360.0;
        double r = 0.25 * std::sqrt(2 * E), rp = 0;
        while (potential_v(r * std::cos(phi), r * std::sin(phi), mp) < E && r < rcap) {
            rp = r;
            r *= 1.01;
        }
        R = std::max(R, rp);
    }
    R *= 1.02;
    return GridSpec{nx, ny, -R, R, -R, R};
}

// ---------------------------------------------------------------------------
// ODE systems

namespace {

struct OdeCtx {
    ModelParams mp;
};

/// flow only: y = (q1, q2, p1, p2)
int rhs_flow(double, const double y[], double dy[], void* p) {
    const auto& mp = static_cast<OdeCtx*>(p)->mp;
    double v1, v2;
    potential_grad(y[0], y[1], mp, v1, v2);
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = -v1;
    dy[3] = -v2;
    return 0;
}

/// flow + two deviation vectors: y[4..7], y[8..11]
int rhs_variational(double, const double y[], double dy[], void* p) {
    const auto& mp = static_cast<OdeCtx*>(p)->mp;
    double v1, v2, h11, h12, h22;
    potential_grad(y[0], y[1], mp, v1, v2);
    potential_hess(y[0], y[1], mp, h11, h12, h22);
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = -v1;
    dy[3] = -v2;
    for (int k = 0; k < 2; ++k) {
        const double* d = y + 4 + 4 * k;
        double* dd = dy + 4 + 4 * k;
        dd[0] = d[2];
        dd[1] = d[3];
        dd[2] = -(h11 * d[0] + h12 * d[1]);
        dd[3] = -(h12 * d[0] + h22 * d[1]);
    }
    return 0;
}

/// Henon section step: q1 is the independent variable,
/// state = (tau, q2, p1, p2), valid while p1 != 0.
int rhs_henon(double q1, const double y[], double dy[], void* p) {
    const auto& mp = static_cast<OdeCtx*>(p)->mp;
    double v1, v2;
    potential_grad(q1, y[1], mp, v1, v2);
    double inv = 1.0 / y[2];
    dy[0] = inv;          // dtau/dq1
    dy[1] = y[3] * inv;   // dq2/dq1
    dy[2] = -v1 * inv;    // dp1/dq1
    dy[3] = -v2 * inv;    // dp2/dq1
    return 0;
}

struct Driver {
    OdeCtx ctx;
    gsl_odeiv2_system sys{};
    gsl_odeiv2_driver* d = nullptr;

    Driver(const ModelParams& mp, size_t dim, int (*rhs)(double, const double*, double*, void*),
           const TrajectoryOptions& opts, double hstart = 1e-4)
        : ctx{mp} {
        ensure_gsl_quiet();
        sys.function = rhs;
        sys.jacobian = nullptr;
        sys.dimension = dim;
        sys.params = &ctx;
        d = gsl_odeiv2_driver_alloc_y_new(&sys, gsl_odeiv2_step_rk8pd, hstart, opts.abs_tol,
                                          opts.rel_tol);
        if (opts.max_step > 0) gsl_odeiv2_driver_set_hmax(d, opts.max_step);
    }
    ~Driver() { gsl_odeiv2_driver_free(d); }
    Driver(const Driver&) = delete;
    Driver& operator=(const Driver&) = delete;

    void apply(double& tau, double tau_target, double* y) {
        int rc = gsl_odeiv2_driver_apply(d, &tau, tau_target, y);
        if (rc != 0)
            throw std::runtime_error("ode step failed, gsl code " + std::to_string(rc));
    }
};

double escape_radius(const ModelParams& mp, const TrajectoryOptions& opts) {
    if (opts.escape_r > 0) return opts.escape_r;
    if (mp.lambda == 0.0 && mp.alpha != 0.0) return 3.0 / std::abs(mp.alpha);
    return 1e6;  // quartic confinement, no escape
}

}  // namespace

std::vector<TrajectorySample> integrate(const PhasePoint& ic, const ModelParams& mp,
                                        double t_end, double sample_dt,
                                        const TrajectoryOptions& opts) {
    Driver drv(mp, 4, rhs_flow, opts);
    double y[4] = {ic.q1, ic.q2, ic.p1, ic.p2};
    double tau = 0;
    const double resc2 = escape_radius(mp, opts) * escape_radius(mp, opts);
    std::vector<TrajectorySample> out;
    long nsteps = std::lround(t_end / sample_dt);
    out.reserve(nsteps + 1);
    out.push_back({0.0, ic});
    for (long k = 1; k <= nsteps; ++k) {
        try {
            drv.apply(tau, kTwoPi * sample_dt * k, y);
        } catch (const std::exception&) {
            // a cubic-runaway orbit reaches infinity in finite time, killing
            // the step control; classify it rather than failing opaquely
            if (opts.detect_escape && y[0] * y[0] + y[1] * y[1] > 0.25 * resc2)
                throw EscapeError("trajectory escaped the well near t = " +
                                  std::to_string(tau / kTwoPi));
            throw;
        }
        out.push_back({sample_dt * k, PhasePoint{y[0], y[1], y[2], y[3]}});
        if (opts.detect_escape && y[0] * y[0] + y[1] * y[1] > resc2)
            throw EscapeError("trajectory escaped the well at t = " +
                              std::to_string(sample_dt * k));
    }
    return out;
}

std::vector<std::array<double, 2>> sos_section(const PhasePoint& ic, const ModelParams& mp,
                                               double t_end, const TrajectoryOptions& opts) {
    // natural adaptive steps via the evolve API so no crossing is skipped
    ensure_gsl_quiet();
    OdeCtx ctx{mp};
    gsl_odeiv2_system sys{rhs_flow, nullptr, 4, &ctx};
    gsl_odeiv2_step* st = gsl_odeiv2_step_alloc(gsl_odeiv2_step_rk8pd, 4);
    gsl_odeiv2_control* co = gsl_odeiv2_control_y_new(opts.abs_tol, opts.rel_tol);
    gsl_odeiv2_evolve* ev = gsl_odeiv2_evolve_alloc(4);

    double y[4] = {ic.q1, ic.q2, ic.p1, ic.p2};
    double tau = 0, h = 1e-4;
    const double tau_end = kTwoPi * t_end;
    const double resc2 = escape_radius(mp, opts) * escape_radius(mp, opts);
    std::vector<std::array<double, 2>> pts;

    TrajectoryOptions hopts = opts;
    while (tau < tau_end) {
        double yprev[4];
        std::memcpy(yprev, y, sizeof y);
        int rc = gsl_odeiv2_evolve_apply(ev, co, st, &sys, &tau, tau_end, &h, y);
        if (rc != 0) {
            gsl_odeiv2_evolve_free(ev);
            gsl_odeiv2_control_free(co);
            gsl_odeiv2_step_free(st);
            throw std::runtime_error("sos_section: ode step failed");
        }
        if (opts.detect_escape && y[0] * y[0] + y[1] * y[1] > resc2) break;
        if (yprev[0] < 0.0 && y[0] >= 0.0 && y[2] > 0.0) {
            if (y[0] < 1e-14) {  // landed on the section
                pts.push_back({y[1], y[3]});
                continue;
            }
            // Henon step back to q1 = 0 with q1 as the independent variable
            Driver hd(mp, 4, rhs_henon, hopts, -0.25 * y[0]);
            double z[4] = {tau, y[1], y[2], y[3]};
            double q1 = y[0];
            hd.apply(q1, 0.0, z);
            if (z[2] > 0.0) pts.push_back({z[1], z[3]});
        }
    }
    gsl_odeiv2_evolve_free(ev);
    gsl_odeiv2_control_free(co);
    gsl_odeiv2_step_free(st);
    return pts;
}

namespace {

inline double sali_of(const double* y) {
    double n1 = 0, n2 = 0;
    for (int i = 0; i < 4; ++i) {
        n1 += y[4 + i] * y[4 + i];
        n2 += y[8 + i] * y[8 + i];
    }
    n1 = std::sqrt(n1);
    n2 = std::sqrt(n2);
    if (n1 == 0 || n2 == 0) return 0.0;
    double sp = 0, sm = 0;
    for (int i = 0; i < 4; ++i) {
        double a = y[4 + i] / n1, b = y[8 + i] / n2;
        sp += (a + b) * (a + b);
        sm += (a - b) * (a - b);
    }
    return std::sqrt(std::min(sp, sm));
}

inline void renorm_devs(double* y) {
    for (int k = 0; k < 2; ++k) {
        double* d = y + 4 + 4 * k;
        double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
        if (n > 0)
            for (int i = 0; i < 4; ++i) d[i] /= n;
    }
}

}  // namespace

SaliSeries sali(const PhasePoint& ic, const ModelParams& mp, double t_end,
                const SaliOptions& opts) {
    Driver drv(mp, 12, rhs_variational, opts.traj);
    double y[12] = {ic.q1, ic.q2, ic.p1, ic.p2,
                    opts.dev1[0], opts.dev1[1], opts.dev1[2], opts.dev1[3],
                    opts.dev2[0], opts.dev2[1], opts.dev2[2], opts.dev2[3]};
    renorm_devs(y);
    const double tau_end = kTwoPi * t_end;
    double tau = 0;
    SaliSeries out;
    double next_sample = 0.05;  // log-spaced record times (periods)
    long nseg = std::lround(std::ceil(tau_end / opts.renorm_dtau));
    for (long k = 1; k <= nseg; ++k) {
        double target = std::min(tau_end, k * opts.renorm_dtau);
        drv.apply(tau, target, y);
        double s = sali_of(y);
        double t_per = tau / kTwoPi;
        if (t_per >= next_sample || k == nseg) {
            out.t.push_back(t_per);
            out.sali.push_back(s);
            while (next_sample <= t_per) next_sample *= 1.25;
        }
        out.final_sali = s;
        out.final_t = t_per;
        if (s < opts.early_exit) break;
        renorm_devs(y);
    }
    return out;
}

SaliMapResult sali_map(double E, const ModelParams& mp, const GridSpec& grid, double t_end,
                       double threshold, const SaliOptions& opts) {
    SaliMapResult res;
    res.sali_map = GridField(grid.nx, grid.ny, grid.xmin, grid.xmax, grid.ymin, grid.ymax,
                             FieldDomain::Sos);
    res.classification = res.sali_map;
    res.threshold = threshold;
    res.t_end = t_end;

    const long ncells = static_cast<long>(grid.nx) * grid.ny;
    parallel_for(ncells, [&](long c) {
        int ix = static_cast<int>(c % grid.nx);
        int iy = static_cast<int>(c / grid.nx);
        double q2 = res.sali_map.xc(ix);
        double p2 = res.sali_map.yc(iy);
        double p1sq = sos_p1_squared(E, q2, p2, mp);
        if (p1sq < 0) return;  // outside S
        PhasePoint ic{0.0, q2, std::sqrt(p1sq), p2};
        SaliOptions so = opts;
        so.traj.detect_escape = false;  // bounded regime guaranteed by p1sq >= 0
        SaliSeries s = sali(ic, mp, t_end, so);
        res.sali_map.at(ix, iy) = s.final_sali;
        res.classification.at(ix, iy) = (s.final_sali <= threshold) ? 1.0 : -1.0;
    });

    long chaotic = 0, allowed = 0;
    for (size_t i = 0; i < res.classification.v.size(); ++i) {
        double v = res.classification.v[i];
        if (std::isnan(v)) continue;
        ++allowed;
        if (v > 0) ++chaotic;
    }
    res.eta_c = allowed ? static_cast<double>(chaotic) / allowed : 0.0;
    return res;
}

TransportResult transport_time(double E, const ModelParams& mp, const TransportSpec& spec,
                               const TrajectoryOptions& opts) {
    const long nsamp = std::lround(spec.horizon / spec.sample_dt) + 1;
    const int nchunk = 64;  // fixed-order chunk reduction keeps sums deterministic
    const int n_ic = spec.n_ic;

    std::vector<double> sum_p1(nchunk * nsamp, 0.0), sum_p2(nchunk * nsamp, 0.0),
        sum_pp(nchunk * nsamp, 0.0);

    parallel_for(nchunk, [&](long chunk) {
        double* s1 = sum_p1.data() + chunk * nsamp;
        double* s2 = sum_p2.data() + chunk * nsamp;
        double* spp = sum_pp.data() + chunk * nsamp;
        for (int i = static_cast<int>(chunk); i < n_ic; i += nchunk) {
            double q2 = spec.q2_lo + (i + 0.5) * (spec.q2_hi - spec.q2_lo) / n_ic;
            double p1sq = sos_p1_squared(E, q2, spec.p2, mp);
            if (p1sq < 0)
                throw std::invalid_argument("transport_time: initial condition outside S");
            Driver drv(mp, 4, rhs_flow, opts);
            double y[4] = {0.0, q2, std::sqrt(p1sq), spec.p2};
            double tau = 0;
            s1[0] += y[2];
            s2[0] += y[3];
            spp[0] += y[2] * y[2] + y[3] * y[3];
            for (long k = 1; k < nsamp; ++k) {
                drv.apply(tau, kTwoPi * spec.sample_dt * k, y);
                s1[k] += y[2];
                s2[k] += y[3];
                spp[k] += y[2] * y[2] + y[3] * y[3];
            }
        }
    });

    TransportResult r;
    r.threshold_used = spec.threshold;
    r.times.resize(nsamp);
    r.sigma_series.resize(nsamp);
    for (long k = 0; k < nsamp; ++k) {
        double a1 = 0, a2 = 0, app = 0;
        for (int c = 0; c < nchunk; ++c) {
            a1 += sum_p1[c * nsamp + k];
            a2 += sum_p2[c * nsamp + k];
            app += sum_pp[c * nsamp + k];
        }
        a1 /= n_ic;
        a2 /= n_ic;
        app /= n_ic;
        r.times[k] = k * spec.sample_dt;
        r.sigma_series[k] = app - a1 * a1 - a2 * a2;
    }

    // long-time average over the second half
    double sat = 0;
    long half = nsamp / 2;
    for (long k = half; k < nsamp; ++k) sat += r.sigma_series[k];
    r.sat_value = sat / (nsamp - half);

    // temporal fluctuation over sliding windows [t - w/2, t + w/2]
    long wh = std::lround(spec.window / 2.0 / spec.sample_dt);
    for (long k = wh; k + wh < nsamp; ++k) {
        double m = 0, m2 = 0;
        long cnt = 2 * wh + 1;
        for (long j = k - wh; j <= k + wh; ++j) {
            m += r.sigma_series[j];
            m2 += r.sigma_series[j] * r.sigma_series[j];
        }
        m /= cnt;
        r.mu_times.push_back(r.times[k]);
        r.mu_series.push_back(std::max(0.0, m2 / cnt - m * m));
    }
    if (r.mu_series.empty()) throw std::runtime_error("transport_time: horizon too short");

    r.t_T = transport_time_at_threshold(r, spec.threshold);
    return r;
}

double transport_time_at_threshold(const TransportResult& r, double threshold) {
    if (r.mu_series.empty()) throw std::runtime_error("transport series empty");
    double peak = *std::max_element(r.mu_series.begin(), r.mu_series.end());
    if (peak <= 1e-12 * r.sat_value * r.sat_value + 1e-300)
        return 0.0;  // fluctuation at the integrator noise floor: no transport
    const double level = threshold * peak;
    long first_ok = -1;
    for (long k = static_cast<long>(r.mu_series.size()) - 1; k >= 0; --k) {
        if (r.mu_series[k] > level) {
            first_ok = k + 1;
            break;
        }
    }
    if (first_ok < 0) return r.mu_times.front();  // below threshold from the start
    if (first_ok >= static_cast<long>(r.mu_series.size()))
        throw std::runtime_error(
            "transport_time: fluctuation has not settled within the horizon");
    return r.mu_times[first_ok];
}

double transport_time_eps1(const TransportResult& r, double eps1) {
    long first_ok = -1;
    for (long k = static_cast<long>(r.sigma_series.size()) - 1; k >= 0; --k) {
        if (std::abs(r.sigma_series[k] - r.sat_value) > eps1) {
            first_ok = k + 1;
            break;
        }
    }
    if (first_ok < 0) return 0.0;
    if (first_ok >= static_cast<long>(r.sigma_series.size()))
        throw std::runtime_error("transport_time_eps1: never settles within horizon");
    return r.times[first_ok];
}

double alpha_ratio(double E, const ModelParams& mp, double t_T, DosScope scope) {
    if (!(t_T > 0)) throw std::invalid_argument("alpha_ratio: t_T must be positive");
    double f = (mp.lambda == 0.0 && mp.alpha != 0.0 &&
                E <= 1.0 / (6.0 * mp.alpha * mp.alpha))
                   ? dos_scaled_f_alpha(E, mp.alpha)
                   : allowed_area_numeric(E, mp);
    if (scope == DosScope::PerSector) f /= 3.0;
    return f / (mp.hbar * t_T);
}

}  // namespace fput
