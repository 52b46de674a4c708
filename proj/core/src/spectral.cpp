#include "fput/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <gsl/gsl_integration.h>

#include "fput/classical.hpp"
#include "fput/parallel.hpp"
#include "gsl_quiet.hpp"

namespace fput {

// ---------------------------------------------------------------------------
// dense route

EigenWindow eig_dense(const SparseHamiltonian& H, const ModelParams& params,
                      const EigOptions& opts) {
    if (H.dim > opts.dense_bound)
        throw std::invalid_argument("eig_dense: dimension " + std::to_string(H.dim) +
                                    " exceeds bound " + std::to_string(opts.dense_bound));
    Eigen::MatrixXd dense = Eigen::MatrixXd(H.mat);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success) throw std::runtime_error("eig_dense: solver failed");

    EigenWindow w;
    w.params = params;
    w.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + H.dim);
    w.coefficients = es.eigenvectors();
    w.window_lo = w.energies.front();
    w.window_hi = w.energies.back();
    w.residual_norms.resize(H.dim);
    for (int k = 0; k < H.dim; ++k)
        w.residual_norms[k] =
            (H.mat * w.coefficients.col(k) - w.energies[k] * w.coefficients.col(k)).norm();
    return w;
}

// ---------------------------------------------------------------------------
// shift-invert Lanczos with thick restart and inertia certification

namespace {

using LdltSolver = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;

int inertia_below(const LdltSolver& ldlt) {
    int neg = 0;
    const auto& D = ldlt.vectorD();
    for (Eigen::Index i = 0; i < D.size(); ++i)
        if (D[i] < 0) ++neg;
    return neg;
}

/// Factorize H - sigma I; SimplicialLDLT does no 2x2 pivoting, so a small
/// pivot is handled by nudging sigma. Returns the sigma actually factored.
///
/// Inertia counts only need pivot signs (pivot_ratio ~ 1e-15, whisker-sized
/// nudges); the shift-invert operator needs a usable condition number or the
/// whole Krylov space degrades, hence a stronger floor and bolder retreats
/// when sigma lands on an eigenvalue.
double factor_shifted(const SparseHamiltonian& H, double sigma, double scale,
                      LdltSolver& ldlt, double pivot_ratio, double step0) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::SparseMatrix<double> A = H.mat;
        for (int i = 0; i < H.dim; ++i) A.coeffRef(i, i) -= sigma;
        ldlt.compute(A);
        bool bad = ldlt.info() != Eigen::Success;
        if (!bad) {
            double dmax = ldlt.vectorD().cwiseAbs().maxCoeff();
            double dmin = ldlt.vectorD().cwiseAbs().minCoeff();
            bad = !(std::isfinite(dmax) && dmin > dmax * pivot_ratio);
        }
        if (!bad) return sigma;
        sigma += scale * step0 * std::pow(10.0, attempt);
    }
    throw std::runtime_error("eig_window: shifted factorization failed repeatedly");
}

double diag_scale(const SparseHamiltonian& H) {
    double s = 0.0;
    for (int i = 0; i < H.dim; ++i) s = std::max(s, std::abs(H.mat.coeff(i, i)));
    return std::max(s, 1e-30);
}

}  // namespace

int eigenvalue_count_below(const SparseHamiltonian& H, double sigma) {
    LdltSolver ldlt;
    factor_shifted(H, sigma, diag_scale(H), ldlt, 1e-15, 1e-11);
    return inertia_below(ldlt);
}

EigenWindow eig_window(const SparseHamiltonian& H, const ModelParams& params,
                       const WindowSpec& spec, const EigOptions& opts) {
    const int n = H.dim;
    if (n == 0) throw std::invalid_argument("eig_window: empty Hamiltonian");
    const bool width_mode = spec.width > 0;
    if (!width_mode && spec.count <= 0)
        throw std::invalid_argument("eig_window: need width > 0 or count > 0");

    const double scale = diag_scale(H);
    const double lo = spec.center - spec.width / 2;
    const double hi = spec.center + spec.width / 2;

    int expected = -1;
    if (width_mode) {
        LdltSolver f_edge;
        factor_shifted(H, lo, scale, f_edge, 1e-15, 1e-11);
        int below_lo = inertia_below(f_edge);
        factor_shifted(H, hi, scale, f_edge, 1e-15, 1e-11);
        expected = inertia_below(f_edge) - below_lo;
    }
    EigenWindow w;
    w.params = params;
    w.window_lo = width_mode ? lo : 0;
    w.window_hi = width_mode ? hi : 0;
    if (width_mode && expected == 0) {
        w.coefficients.resize(n, 0);
        return w;
    }

    LdltSolver op;  // (H - sigma)^{-1}
    const double sigma = factor_shifted(H, spec.center, scale, op, 1e-8, 1e-8);

    const int want = width_mode ? expected : std::min(spec.count, n);
    int cap = std::min<long>(n, std::max(3L * want + 60L, 150L));
    cap = std::min<long>(cap, std::max<long>(opts.max_basis, want + 30L));
    const double opnorm_est = scale + std::abs(spec.center) + 1.0;

    Eigen::MatrixXd V(n, cap + 1);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(cap + 1, cap + 1);
    int m = 0;

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v0(n);
    for (int i = 0; i < n; ++i) v0[i] = gauss(rng);
    v0.normalize();
    V.col(0) = v0;

    const int max_restarts = 80;
    std::vector<double> out_vals;
    Eigen::MatrixXd out_vecs;
    bool have_result = false;

    for (int restart = 0; restart <= max_restarts && !have_result; ++restart) {
        // grow the basis with full two-pass reorthogonalization; T stays exact
        // for the arrowhead left by thick restarts because coefficients are
        // recomputed against the whole current basis
        double last_beta = 0.0;
        bool have_res = false;
        while (m < cap) {
            Eigen::VectorXd wk = op.solve(V.col(m));
            Eigen::VectorXd h = V.leftCols(m + 1).transpose() * wk;
            wk.noalias() -= V.leftCols(m + 1) * h;
            Eigen::VectorXd h2 = V.leftCols(m + 1).transpose() * wk;
            wk.noalias() -= V.leftCols(m + 1) * h2;
            h += h2;
            for (int i = 0; i <= m; ++i) {
                T(i, m) = h[i];
                T(m, i) = h[i];
            }
            double beta = wk.norm();
            ++m;
            if (beta < 1e-13 * opnorm_est) {
                cap = m;  // invariant subspace exhausted
                have_res = false;
                break;
            }
            V.col(m) = wk / beta;
            T(m, m - 1) = beta;
            T(m - 1, m) = beta;
            last_beta = beta;
            have_res = true;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T.topLeftCorner(m, m));
        const Eigen::VectorXd& theta = small.eigenvalues();
        const Eigen::MatrixXd& S = small.eigenvectors();
        const double beta_m = have_res ? last_beta : 0.0;

        std::vector<int> order(m);
        for (int i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double da = theta[a] == 0 ? 1e300 : std::abs(1.0 / theta[a]);
            double db = theta[b] == 0 ? 1e300 : std::abs(1.0 / theta[b]);
            return da < db;
        });

        auto lam_of = [&](int idx) { return sigma + 1.0 / theta[idx]; };
        auto in_window = [&](double lam) { return !width_mode || (lam >= lo && lam <= hi); };
        auto screened = [&](int idx) {
            if (theta[idx] == 0) return false;
            double est = std::abs(beta_m * S(m - 1, idx) / theta[idx]) * opnorm_est;
            return est < opts.tol * std::max(std::abs(lam_of(idx)), params.hbar);
        };

        std::vector<int> candidates;
        bool enough;
        if (width_mode) {
            for (int idx : order)
                if (screened(idx) && in_window(lam_of(idx))) candidates.push_back(idx);
            enough = static_cast<int>(candidates.size()) >= want;
        } else {
            // the `want` Ritz values closest to sigma must all have converged;
            // a converged-but-distant pair never substitutes for a near one
            enough = m >= want;
            for (int i = 0; i < want && i < m; ++i) {
                if (!screened(order[i])) enough = false;
                candidates.push_back(order[i]);
            }
        }
        if (enough) {
            // exact residual check before declaring the window complete
            Eigen::MatrixXd X = V.leftCols(m) * S(Eigen::all, candidates);
            std::vector<int> good;
            std::vector<double> vals;
            for (int c = 0; c < X.cols(); ++c) {
                X.col(c).normalize();
                Eigen::VectorXd Hv = H.mat * X.col(c);
                double lam = X.col(c).dot(Hv);
                double res = (Hv - lam * X.col(c)).norm();
                if (res <= opts.tol * std::max(std::abs(lam), params.hbar) &&
                    in_window(lam)) {
                    good.push_back(c);
                    vals.push_back(lam);
                }
            }
            if (static_cast<int>(good.size()) >= want) {
                std::vector<int> sel(good.size());
                for (size_t i = 0; i < sel.size(); ++i) sel[i] = static_cast<int>(i);
                if (!width_mode) {  // keep the `count` closest to center
                    std::sort(sel.begin(), sel.end(), [&](int a, int b) {
                        return std::abs(vals[a] - spec.center) <
                               std::abs(vals[b] - spec.center);
                    });
                    sel.resize(want);
                }
                std::sort(sel.begin(), sel.end(),
                          [&](int a, int b) { return vals[a] < vals[b]; });
                out_vals.resize(sel.size());
                out_vecs.resize(n, sel.size());
                for (size_t k = 0; k < sel.size(); ++k) {
                    out_vals[k] = vals[sel[k]];
                    out_vecs.col(k) = X.col(good[sel[k]]);
                }
                have_result = true;
            }
        }
        if (have_result) break;
        if (!have_res || m >= n) {
            // exhausted the full space without finding everything
            throw std::runtime_error("eig_window: window not fully converged (" +
                                     std::to_string(candidates.size()) + " of " +
                                     std::to_string(want) + ")");
        }
        if (restart == max_restarts)
            throw std::runtime_error("eig_window: restart limit reached with " +
                                     std::to_string(candidates.size()) + " of " +
                                     std::to_string(want) + " converged");

        // thick restart: keep the best `keep` Ritz directions plus the residual
        int keep = std::min(m - 1, want + 40);
        std::vector<int> kept(order.begin(), order.begin() + keep);
        Eigen::MatrixXd X = V.leftCols(m) * S(Eigen::all, kept);
        Eigen::VectorXd vres = V.col(m);
        V.leftCols(keep) = X;
        V.col(keep) = vres;
        T.setZero();
        for (int i = 0; i < keep; ++i) {
            T(i, i) = theta[kept[i]];
            double c = beta_m * S(m - 1, kept[i]);
            T(i, keep) = c;
            T(keep, i) = c;
        }
        m = keep;
    }

    if (!have_result) throw std::runtime_error("eig_window: failed");

    w.energies = std::move(out_vals);
    w.coefficients = std::move(out_vecs);
    w.residual_norms.resize(w.energies.size());
    for (size_t k = 0; k < w.energies.size(); ++k)
        w.residual_norms[k] = (H.mat * w.coefficients.col(k) -
                               w.energies[k] * w.coefficients.col(k))
                                  .norm();
    if (!width_mode && !w.energies.empty()) {
        w.window_lo = w.energies.front();
        w.window_hi = w.energies.back();
    }
    return w;
}

// ---------------------------------------------------------------------------
// Thomas-Fermi DOS

namespace {

/// Boundary radius of the alpha-FPUT well along sin(3 phi) = s:
/// r^2/2 + (alpha/3) r^3 s = E, trig closed form polished by Newton.
double well_radius_alpha(double E, double alpha, double s) {
    double r;
    if (std::abs(alpha * s) < 1e-14) {
        r = std::sqrt(2 * E);
    } else {
        double c = std::clamp(12.0 * E * alpha * alpha * s * s - 1.0, -1.0, 1.0);
        double th = std::acos(c);
        r = (s > 0) ? (std::cos(th / 3.0) - 0.5) / (alpha * s)
                    : -(std::cos((th + M_PI) / 3.0) + 0.5) / (alpha * s);
    }
    for (int it = 0; it < 2; ++it) {  // kills the trig cancellation near s -> 0
        double f = 0.5 * r * r + alpha / 3.0 * r * r * r * s - E;
        double fp = r + alpha * r * r * s;
        if (std::abs(fp) < 1e-14) break;
        r -= f / fp;
    }
    return r;
}

struct QagParams {
    double E, alpha;
};

double rsq_integrand(double phi, void* p) {
    auto* q = static_cast<QagParams*>(p);
    double s = std::sin(3 * phi);
    double r = well_radius_alpha(q->E, q->alpha, s);
    return r * r;
}

double qag(double a, double b, QagParams& p) {
    ensure_gsl_quiet();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(512);
    gsl_function F;
    F.function = &rsq_integrand;
    F.params = &p;
    double result = 0, abserr = 0;
    int rc = gsl_integration_qag(&F, a, b, 1e-14, 1e-11, 512, GSL_INTEG_GAUSS31, ws,
                                 &result, &abserr);
    gsl_integration_workspace_free(ws);
    if (rc != 0 && rc != GSL_EROUND)
        throw std::runtime_error("dos quadrature failed, gsl code " + std::to_string(rc));
    return result;
}

}  // namespace

double dos_scaled_f_alpha(double E, double alpha) {
    if (!(E > 0) || !(E <= 1.0 / (6.0 * alpha * alpha) * (1 + 1e-12)))
        throw std::domain_error("dos_scaled_f_alpha: need 0 < E <= 1/(6 alpha^2)");
    QagParams p{E, alpha};
    double I1 = qag(0.0, M_PI / 3.0, p);
    double I2 = qag(M_PI / 3.0, 2.0 * M_PI / 3.0, p);
    return 1.5 * (I1 + I2);
}

double dos_thomas_fermi_alpha(double E, double alpha, double hbar) {
    return dos_scaled_f_alpha(E, alpha) / (2.0 * M_PI * hbar * hbar);
}

// ---------------------------------------------------------------------------
// numeric phase-space area (flood fill + boundary refinement)

namespace {

double refine_cell(double x0, double y0, double h, int depth, double E,
                   const ModelParams& mp) {
    auto inside = [&](double x, double y) { return potential_v(x, y, mp) < E; };
    int c = 0;
    c += inside(x0 + 0.25 * h, y0 + 0.25 * h);
    c += inside(x0 + 0.75 * h, y0 + 0.25 * h);
    c += inside(x0 + 0.25 * h, y0 + 0.75 * h);
    c += inside(x0 + 0.75 * h, y0 + 0.75 * h);
    if (depth == 0) return 0.25 * h * h * c;
    if (c == 4 && inside(x0, y0) && inside(x0 + h, y0) && inside(x0, y0 + h) &&
        inside(x0 + h, y0 + h))
        return h * h;
    if (c == 0 && !inside(x0, y0) && !inside(x0 + h, y0) && !inside(x0, y0 + h) &&
        !inside(x0 + h, y0 + h))
        return 0.0;
    double hh = 0.5 * h;
    return refine_cell(x0, y0, hh, depth - 1, E, mp) +
           refine_cell(x0 + hh, y0, hh, depth - 1, E, mp) +
           refine_cell(x0, y0 + hh, hh, depth - 1, E, mp) +
           refine_cell(x0 + hh, y0 + hh, hh, depth - 1, E, mp);
}

}  // namespace

double allowed_area_numeric(double E, const ModelParams& params) {
    if (!(E > 0)) throw std::domain_error("allowed_area_numeric: E must be positive");
    if (params.lambda == 0.0 && params.alpha != 0.0 &&
        E > 1.0 / (6.0 * params.alpha * params.alpha) * (1 + 1e-12))
        throw std::domain_error(
            "allowed_area_numeric: alpha-FPUT above the saddle has no bounded well");

    // bounding box by ray marching from the origin to the first V = E crossing;
    // for the cubic-only case the march is capped just past the saddle radius
    // 1/alpha, where rays grazing V = E would otherwise run off to infinity
    double rcap = 1e3;
    if (params.lambda == 0.0 && params.alpha != 0.0) rcap = 1.2 / std::abs(params.alpha);
    double R = std::sqrt(2 * E);
    for (int k = 0; k < 720; ++k) {
        double phi = 2 * M_PI * k / 720.0;
        double r = std::sqrt(2 * E) * 0.25, rp = 0.0;
        while (potential_v(r * std::cos(phi), r * std::sin(phi), params) < E && r < rcap) {
            rp = r;
            r *= 1.02;
        }
        R = std::max(R, rp);
    }
    R *= 1.05;

    const int n0 = 512;
    const double h = 2 * R / n0;
    std::vector<uint8_t> inside(static_cast<size_t>(n0) * n0);
    auto coord = [&](int i) { return -R + (i + 0.5) * h; };
    parallel_for(n0, [&](long iy) {
        for (int ix = 0; ix < n0; ++ix)
            inside[iy * n0 + ix] =
                potential_v(coord(ix), coord(static_cast<int>(iy)), params) < E;
    });

    std::vector<uint8_t> filled(inside.size(), 0);
    std::queue<int> q;
    int start = (n0 / 2) * n0 + n0 / 2;
    if (!inside[start])
        throw std::runtime_error("allowed_area_numeric: origin cell not inside {V<E}");
    filled[start] = 1;
    q.push(start);
    while (!q.empty()) {
        int c = q.front();
        q.pop();
        int ix = c % n0, iy = c / n0;
        const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : nb) {
            int jx = ix + d[0], jy = iy + d[1];
            if (jx < 0 || jy < 0 || jx >= n0 || jy >= n0) continue;
            int cc = jy * n0 + jx;
            if (inside[cc] && !filled[cc]) {
                filled[cc] = 1;
                q.push(cc);
            }
        }
    }

    std::vector<int> boundary;
    double area = 0.0;
    for (int iy = 0; iy < n0; ++iy) {
        for (int ix = 0; ix < n0; ++ix) {
            int c = iy * n0 + ix;
            if (!filled[c]) continue;
            bool edge = false;
            const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (auto& d : nb) {
                int jx = ix + d[0], jy = iy + d[1];
                if (jx < 0 || jy < 0 || jx >= n0 || jy >= n0 || !filled[jy * n0 + jx]) {
                    edge = true;
                    break;
                }
            }
            if (edge)
                boundary.push_back(c);
            else
                area += h * h;
        }
    }
    std::vector<double> parts(boundary.size());
    parallel_for(static_cast<long>(boundary.size()), [&](long b) {
        int c = boundary[b];
        int ix = c % n0, iy = c / n0;
        parts[b] = refine_cell(-R + ix * h, -R + iy * h, h, 5, E, params);
    });
    for (double a : parts) area += a;  // fixed order, deterministic
    return area;
}

double dos_numeric(double E, const ModelParams& params) {
    return allowed_area_numeric(E, params) / (2.0 * M_PI * params.hbar * params.hbar);
}

double heisenberg_time(double E, const ModelParams& params, DosScope scope) {
    double g;
    if (params.lambda == 0.0 && params.alpha != 0.0 &&
        E <= 1.0 / (6.0 * params.alpha * params.alpha))
        g = dos_thomas_fermi_alpha(E, params.alpha, params.hbar);
    else
        g = dos_numeric(E, params);
    if (scope == DosScope::PerSector) g /= 3.0;
    return 2.0 * M_PI * params.hbar * g;
}

DosCurve dos_curve(const std::vector<double>& energies, const ModelParams& params) {
    DosCurve c;
    c.energies = energies;
    c.g.resize(energies.size());
    c.f.resize(energies.size());
    const bool analytic = params.lambda == 0.0 && params.alpha != 0.0;
    const double esaddle = analytic ? 1.0 / (6.0 * params.alpha * params.alpha) : 0.0;
    parallel_for(static_cast<long>(energies.size()), [&](long i) {
        double E = energies[i];
        double f = (analytic && E <= esaddle) ? dos_scaled_f_alpha(E, params.alpha)
                                              : allowed_area_numeric(E, params);
        c.f[i] = f;
        c.g[i] = f / (2.0 * M_PI * params.hbar * params.hbar);
    });
    return c;
}

}  // namespace fput
