#include "fput/husimi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fput/parallel.hpp"

namespace fput {

LogOverlap log_overlap(int n, std::complex<double> alpha) {
    if (n < 0) throw std::invalid_argument("log_overlap: n < 0");
    double a2 = std::norm(alpha);
    if (a2 == 0.0) return {n == 0 ? 0.0 : -std::numeric_limits<double>::infinity(), 0.0};
    double log_mag = 0.5 * n * std::log(a2) - 0.5 * std::lgamma(n + 1.0) - 0.5 * a2;
    double phase = -n * std::arg(alpha);  // (alpha*)^n
    return {log_mag, phase};
}

namespace {

/// Per-mode overlap vector u_k = <alpha|k> for k = 0..kmax. The Gaussian is
/// folded into every entry, so |u_k| <= 1 and the magnitude recurrence is
/// anchored at the dominant k ~ |alpha|^2 to avoid starting from an
/// underflowed u_0. Phases advance by complex rotation, re-anchored
/// periodically against sin/cos.
void overlap_vector(std::complex<double> alpha, int kmax, std::complex<double>* u) {
    double a2 = std::norm(alpha);
    if (a2 == 0.0) {
        u[0] = 1.0;
        for (int k = 1; k <= kmax; ++k) u[k] = 0.0;
        return;
    }
    double amag = std::sqrt(a2);
    double th = -std::arg(alpha);
    int k0 = std::clamp(static_cast<int>(a2), 0, kmax);
    double lm0 = 0.5 * k0 * std::log(a2) - 0.5 * std::lgamma(k0 + 1.0) - 0.5 * a2;
    std::vector<double> mag(kmax + 1);
    mag[k0] = std::exp(lm0);
    for (int k = k0; k < kmax; ++k) mag[k + 1] = mag[k] * amag / std::sqrt(k + 1.0);
    for (int k = k0; k > 0; --k) mag[k - 1] = mag[k] * std::sqrt(static_cast<double>(k)) / amag;

    const std::complex<double> rot(std::cos(th), std::sin(th));
    std::complex<double> ph(1.0, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        if ((k & 255) == 0) ph = {std::cos(k * th), std::sin(k * th)};
        u[k] = mag[k] * ph;
        ph *= rot;
    }
}

thread_local std::vector<std::complex<double>> tl_up, tl_um;

}  // namespace

void HusimiEvaluator::finalize(std::vector<std::pair<int, int>> nl,
                               std::vector<std::complex<double>> c, double prune) {
    for (size_t i = 0; i < nl.size(); ++i) {
        if (prune > 0 && std::abs(c[i]) <= prune) continue;
        int n = nl[i].first, l = nl[i].second;
        if ((n + l) % 2 != 0 || std::abs(l) > n)
            throw std::invalid_argument("HusimiEvaluator: invalid (n, l) state");
        np_.push_back((n + l) / 2);
        nm_.push_back((n - l) / 2);
        c_.push_back(c[i]);
        max_np_ = std::max(max_np_, np_.back());
        max_nm_ = std::max(max_nm_, nm_.back());
    }
    // (n+)-major ordering keeps the inner accumulation cache friendly
    std::vector<size_t> perm(c_.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](size_t a, size_t b) {
        return np_[a] != np_[b] ? np_[a] < np_[b] : nm_[a] < nm_[b];
    });
    std::vector<int> np2(perm.size()), nm2(perm.size());
    std::vector<std::complex<double>> c2(perm.size());
    for (size_t i = 0; i < perm.size(); ++i) {
        np2[i] = np_[perm[i]];
        nm2[i] = nm_[perm[i]];
        c2[i] = c_[perm[i]];
    }
    np_ = std::move(np2);
    nm_ = std::move(nm2);
    c_ = std::move(c2);
}

HusimiEvaluator::HusimiEvaluator(const SectorBasis& basis, const Eigen::VectorXd& coeffs,
                                 double hbar, double prune)
    : hbar_(hbar) {
    if (coeffs.size() != basis.size())
        throw std::invalid_argument("HusimiEvaluator: coefficient/basis size mismatch");
    std::vector<std::pair<int, int>> nl(basis.states.begin(), basis.states.end());
    std::vector<std::complex<double>> c(basis.size());
    for (int i = 0; i < basis.size(); ++i) c[i] = basis.gauge(i) * coeffs[i];  // un-gauge
    finalize(std::move(nl), std::move(c), prune);
}

HusimiEvaluator::HusimiEvaluator(const std::vector<std::pair<int, int>>& states,
                                 const std::vector<std::complex<double>>& coeffs,
                                 double hbar, double prune)
    : hbar_(hbar) {
    if (states.size() != coeffs.size())
        throw std::invalid_argument("HusimiEvaluator: size mismatch");
    finalize(states, coeffs, prune);
}

std::complex<double> HusimiEvaluator::amplitude(std::complex<double> a1,
                                                std::complex<double> a2) const {
    const std::complex<double> I(0, 1);
    std::complex<double> ap = (a1 - I * a2) / std::sqrt(2.0);
    std::complex<double> am = (a1 + I * a2) / std::sqrt(2.0);
    auto& up = tl_up;
    auto& um = tl_um;
    up.resize(max_np_ + 1);
    um.resize(max_nm_ + 1);
    overlap_vector(ap, max_np_, up.data());
    overlap_vector(am, max_nm_, um.data());
    std::complex<double> acc(0, 0);
    const size_t n = c_.size();
    for (size_t i = 0; i < n; ++i) acc += c_[i] * (up[np_[i]] * um[nm_[i]]);
    return acc;
}

// ---------------------------------------------------------------------------

HusimiField qsos(const HusimiEvaluator& state, double E_k, const GridSpec& grid,
                 const ModelParams& mp) {
    HusimiField out;
    out.field = GridField(grid.nx, grid.ny, grid.xmin, grid.xmax, grid.ymin, grid.ymax,
                          FieldDomain::Sos);
    GridField& f = out.field;
    parallel_for(static_cast<long>(grid.nx) * grid.ny, [&](long cidx) {
        int ix = static_cast<int>(cidx % grid.nx);
        int iy = static_cast<int>(cidx / grid.nx);
        double q2 = f.xc(ix), p2 = f.yc(iy);
        double p1sq = sos_p1_squared(E_k, q2, p2, mp);
        if (p1sq < 0) return;
        f.at(ix, iy) = state.value_qp(0.0, std::sqrt(p1sq), q2, p2);
    });
    // A_k with the measure fixed as d^2 a2 = dq2 dp2 / (2 hbar)
    double cell = f.dx() * f.dy() / (2.0 * state.hbar());
    double A = f.sum() * cell / M_PI;
    if (A > 0) f.scale(1.0 / A);
    out.norm = A;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void accumulate_cartesian(CartesianCoeffs& out, int n, int l, std::complex<double> c,
                          std::vector<CircularToCartesian>& cache, DRoute route) {
    if (static_cast<int>(cache.size()) <= n) cache.resize(n + 1);
    if (cache[n].two_j != n || cache[n].O.size() == 0)
        cache[n] = circular_to_cartesian(n, route);
    const CircularToCartesian& O = cache[n];
    for (int two_mp = -n; two_mp <= n; two_mp += 2) {
        int n1 = (n + two_mp) / 2, n2 = (n - two_mp) / 2;
        out.B(n1, n2) += c * O.at2(l, two_mp);
    }
}

}  // namespace

CartesianCoeffs cartesian_coefficients(const SectorBasis& basis,
                                       const Eigen::VectorXd& coeffs, double hbar,
                                       DRoute route) {
    if (coeffs.size() != basis.size())
        throw std::invalid_argument("cartesian_coefficients: size mismatch");
    CartesianCoeffs out;
    out.cutoff_n = basis.cutoff_n;
    out.hbar = hbar;
    out.B = Eigen::MatrixXcd::Zero(basis.cutoff_n + 1, basis.cutoff_n + 1);
    std::vector<CircularToCartesian> cache;
    for (int i = 0; i < basis.size(); ++i) {
        auto [n, l] = basis.states[i];
        std::complex<double> c = basis.gauge(i) * coeffs[i];
        if (c == std::complex<double>(0, 0)) continue;
        accumulate_cartesian(out, n, l, c, cache, route);
    }
    return out;
}

CartesianCoeffs cartesian_coefficients(const std::vector<std::pair<int, int>>& states,
                                       const std::vector<std::complex<double>>& coeffs,
                                       double hbar, DRoute route) {
    int N = 0;
    for (auto& [n, l] : states) N = std::max(N, n);
    CartesianCoeffs out;
    out.cutoff_n = N;
    out.hbar = hbar;
    out.B = Eigen::MatrixXcd::Zero(N + 1, N + 1);
    std::vector<CircularToCartesian> cache;
    for (size_t i = 0; i < states.size(); ++i) {
        if (coeffs[i] == std::complex<double>(0, 0)) continue;
        accumulate_cartesian(out, states[i].first, states[i].second, coeffs[i], cache, route);
    }
    return out;
}

double husimi_cartesian(const CartesianCoeffs& B, const CoherentPoint& pt) {
    int N = B.cutoff_n;
    std::vector<std::complex<double>> u1(N + 1), u2(N + 1);
    overlap_vector(pt.a1, N, u1.data());
    overlap_vector(pt.a2, N, u2.data());
    std::complex<double> acc(0, 0);
    for (int n1 = 0; n1 <= N; ++n1)
        for (int n2 = 0; n2 + n1 <= N; ++n2) acc += B.B(n1, n2) * u1[n1] * u2[n2];
    return std::norm(acc);
}

HusimiField project_complete(const CartesianCoeffs& B, const GridSpec& grid) {
    HusimiField out;
    out.field = GridField(grid.nx, grid.ny, grid.xmin, grid.xmax, grid.ymin, grid.ymax,
                          FieldDomain::Phase);
    GridField& f = out.field;
    const int N = B.cutoff_n;
    parallel_for(static_cast<long>(grid.nx) * grid.ny, [&](long cidx) {
        int ix = static_cast<int>(cidx % grid.nx);
        int iy = static_cast<int>(cidx / grid.nx);
        double q2 = f.xc(ix), p2 = f.yc(iy);
        std::complex<double> a2 =
            std::complex<double>(q2, p2) / std::sqrt(2.0 * B.hbar);
        std::vector<std::complex<double>> u2(N + 1);
        overlap_vector(a2, N, u2.data());
        // P = sum_n1 |sum_n2 B_{n1 n2} <a2|n2>|^2
        double P = 0;
        for (int n1 = 0; n1 <= N; ++n1) {
            std::complex<double> w(0, 0);
            for (int n2 = 0; n2 + n1 <= N; ++n2) w += B.B(n1, n2) * u2[n2];
            P += std::norm(w);
        }
        f.at(ix, iy) = P;
    });
    out.norm = f.sum();
    return out;
}

// ---------------------------------------------------------------------------
// energy-shell projections

namespace {

/// q1 minimizing V(., q2); with lambda > 0 the quartic can split the well.
double fold_q1(double q2, const ModelParams& mp) {
    double c2 = 0.5 + mp.alpha * q2 + 2.0 * mp.lambda * q2 * q2;
    if (mp.lambda > 0 && c2 < 0) return std::sqrt(-c2 / (2.0 * mp.lambda));
    return 0.0;
}

/// largest root of V(q1, q2) = W on the branch q1 >= q1min; bracketed
/// bisection then Newton polish. NaN when no bracket exists (the V(., q2)
/// slice opens downward and the point is effectively outside the shell).
double outer_root_q1(double W, double q2, double q1min, const ModelParams& mp) {
    double a = q1min, b = std::max(2.0 * q1min, 0.1);
    while (potential_v(b, q2, mp) < W && b < 1e4) {
        a = b;
        b *= 1.5;
    }
    if (potential_v(b, q2, mp) < W) return std::nan("");
    for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b);
        (potential_v(m, q2, mp) < W ? a : b) = m;
    }
    double r = 0.5 * (a + b);
    for (int it = 0; it < 3; ++it) {
        double v1, v2;
        potential_grad(r, q2, mp, v1, v2);
        if (std::abs(v1) < 1e-14) break;
        r -= (potential_v(r, q2, mp) - W) / v1;
    }
    return r;
}

}  // namespace

double project_shell_point(const HusimiEvaluator& state, double E_k, double q2, double p2,
                           const ModelParams& mp, int nodes) {
    double q1m = fold_q1(q2, mp);
    double vmin = potential_v(q1m, q2, mp);
    double p1sq = 2.0 * (E_k - 0.5 * p2 * p2 - vmin);
    if (p1sq <= 0) return std::nan("");  // outside the shell projection
    double p1max = std::sqrt(p1sq);
    double acc = 0;
    for (int i = 0; i < nodes; ++i) {
        double x = std::cos((2.0 * i + 1.0) * M_PI / (2.0 * nodes));
        double p1 = p1max * x;
        double W = E_k - 0.5 * p1 * p1 - 0.5 * p2 * p2;
        double q1 = outer_root_q1(W, q2, q1m, mp);
        if (std::isnan(q1)) return std::nan("");
        double v1, v2;
        potential_grad(q1, q2, mp, v1, v2);
        if (std::abs(v1) < 1e-300) continue;
        double H = state.value_qp(q1, p1, q2, p2);
        acc += H * std::sqrt(1.0 - x * x) / std::abs(v1);
    }
    return M_PI * p1max / (nodes * state.hbar()) * acc;
}

double project_config_point(const HusimiEvaluator& state, double E_k, double q1, double q2,
                            const ModelParams& mp, int nodes) {
    double V = potential_v(q1, q2, mp);
    if (V >= E_k) return std::nan("");  // vanishes outside {V < E_k}
    double p2max = std::sqrt(2.0 * (E_k - V));
    double acc = 0;
    for (int i = 0; i < nodes; ++i) {
        double th = (2.0 * i + 1.0) * M_PI / (2.0 * nodes);
        double p2 = p2max * std::cos(th);
        double p1 = p2max * std::sin(th);  // = sqrt(2(E-V) - p2^2)
        acc += state.value_qp(q1, p1, q2, p2);
    }
    return M_PI / (nodes * state.hbar()) * acc;
}

HusimiField project_shell(const HusimiEvaluator& state, double E_k, const GridSpec& grid,
                          const ModelParams& mp, int nodes) {
    HusimiField out;
    out.field = GridField(grid.nx, grid.ny, grid.xmin, grid.xmax, grid.ymin, grid.ymax,
                          FieldDomain::Sos);
    GridField& f = out.field;
    parallel_for(static_cast<long>(grid.nx) * grid.ny, [&](long cidx) {
        int ix = static_cast<int>(cidx % grid.nx);
        int iy = static_cast<int>(cidx / grid.nx);
        double v = project_shell_point(state, E_k, f.xc(ix), f.yc(iy), mp, nodes);
        if (!std::isnan(v)) f.at(ix, iy) = v;
    });
    out.norm = f.sum();
    return out;
}

HusimiField project_config(const HusimiEvaluator& state, double E_k, const GridSpec& grid,
                           const ModelParams& mp, int nodes) {
    HusimiField out;
    out.field = GridField(grid.nx, grid.ny, grid.xmin, grid.xmax, grid.ymin, grid.ymax,
                          FieldDomain::Config);
    GridField& f = out.field;
    parallel_for(static_cast<long>(grid.nx) * grid.ny, [&](long cidx) {
        int ix = static_cast<int>(cidx % grid.nx);
        int iy = static_cast<int>(cidx / grid.nx);
        double v = project_config_point(state, E_k, f.xc(ix), f.yc(iy), mp, nodes);
        if (!std::isnan(v)) f.at(ix, iy) = v;
    });
    out.norm = f.sum();
    return out;
}

// ---------------------------------------------------------------------------

void hermite_functions(int nmax, double x, std::vector<double>& mant, std::vector<int>& e2) {
    mant.assign(nmax + 1, 0.0);
    e2.assign(nmax + 1, 0);
    constexpr double ln2 = 0.6931471805599453094;
    // h_0 = pi^{-1/4} e^{-x^2/2}, carried as mantissa * 2^e to survive large x
    double l0 = (-0.5 * x * x - 0.25 * std::log(M_PI)) / ln2;
    int e = static_cast<int>(std::floor(l0));
    double a = std::exp2(l0 - e);  // in [1, 2)
    double b = std::sqrt(2.0) * x * a;
    mant[0] = a;
    e2[0] = e;
    if (nmax == 0) return;
    mant[1] = b;
    e2[1] = e;
    for (int n = 1; n < nmax; ++n) {
        double c = x * std::sqrt(2.0 / (n + 1.0)) * b -
                   std::sqrt(n / (n + 1.0)) * a;
        a = b;
        b = c;
        if (std::abs(b) > 1e300 || (std::abs(b) < 1e-300 && b != 0.0)) {
            int sh;
            std::frexp(b, &sh);
            a = std::ldexp(a, -sh);
            b = std::ldexp(b, -sh);
            e += sh;
        }
        mant[n + 1] = b;
        e2[n + 1] = e;
    }
}

std::complex<double> wavefunction(const CartesianCoeffs& B, double q1, double q2) {
    const int N = B.cutoff_n;
    const double s = 1.0 / std::sqrt(B.hbar);
    std::vector<double> m1, m2;
    std::vector<int> e1, e2v;
    hermite_functions(N, q1 * s, m1, e1);
    hermite_functions(N, q2 * s, m2, e2v);
    std::complex<double> acc(0, 0);
    for (int n1 = 0; n1 <= N; ++n1) {
        for (int n2 = 0; n2 + n1 <= N; ++n2) {
            std::complex<double> b = B.B(n1, n2);
            if (b == std::complex<double>(0, 0)) continue;
            double prod = std::ldexp(m1[n1] * m2[n2], e1[n1] + e2v[n2]);
            if (prod != 0.0) acc += b * prod;
        }
    }
    return acc * s;  // <q|n> = hbar^{-1/4} h_n(q/sqrt(hbar)) per mode
}

}  // namespace fput
