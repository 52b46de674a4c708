#include "fput/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_math.h>
#include <gsl/gsl_sf_psi.h>

#include "gsl_quiet.hpp"

namespace fput {

double overlap_index(const GridField& qsos, const GridField& classification) {
    if (!qsos.same_geometry(classification))
        throw std::invalid_argument("overlap_index: grid geometry mismatch");
    double num = 0, den = 0;
    for (size_t i = 0; i < qsos.v.size(); ++i) {
        double q = qsos.v[i], c = classification.v[i];
        if (std::isnan(q) || std::isnan(c)) continue;  // excluded from both sums
        num += c * q;
        den += q;
    }
    if (den == 0) throw std::invalid_argument("overlap_index: field has no mass on the map");
    return num / den;
}

double mixed_fraction(const std::vector<double>& M_values, double M0, double M1) {
    if (M_values.empty()) throw std::invalid_argument("mixed_fraction: empty ensemble");
    long n = 0;
    for (double m : M_values)
        if (m >= M0 && m <= M1) ++n;
    return static_cast<double>(n) / M_values.size();
}

double mixed_fraction(const std::vector<StateStats>& stats, double M0, double M1) {
    std::vector<double> m(stats.size());
    for (size_t i = 0; i < stats.size(); ++i) m[i] = stats[i].M;
    return mixed_fraction(m, M0, M1);
}

PowerLawFit fit_power_law(const std::vector<double>& hbars, const std::vector<double>& chis) {
    if (hbars.size() != chis.size())
        throw std::invalid_argument("fit_power_law: size mismatch");
    std::vector<double> x, y;
    PowerLawFit fit;
    for (size_t i = 0; i < hbars.size(); ++i) {
        if (chis[i] > 0) {
            x.push_back(std::log(hbars[i]));
            y.push_back(std::log(chis[i]));
        } else {
            ++fit.n_excluded;
        }
    }
    size_t n = x.size();
    if (n < 3) throw std::invalid_argument("fit_power_law: need >= 3 positive points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    fit.xi = (n * sxy - sx * sy) / den;
    fit.log_prefactor = (sy - fit.xi * sx) / n;
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - (fit.log_prefactor + fit.xi * x[i]);
        ss += r * r;
    }
    fit.se = n > 2 ? std::sqrt(ss / (n - 2) * n / den) : 0.0;
    fit.n_used = static_cast<int>(n);
    return fit;
}

int chaotic_cell_count(const GridField& classification, bool ergodic_all_cells) {
    int nc = 0;
    for (double c : classification.v) {
        if (std::isnan(c)) continue;
        if (ergodic_all_cells || c > 0) ++nc;
    }
    return nc;
}

double elm(const GridField& qsos, const GridField& classification, double alpha,
           bool ergodic_all_cells) {
    if (!qsos.same_geometry(classification))
        throw std::invalid_argument("elm: grid geometry mismatch");
    if (!(alpha > 0)) throw std::invalid_argument("elm: alpha must be positive");
    double tot = 0;
    long nc = 0;
    for (size_t i = 0; i < qsos.v.size(); ++i) {
        double q = qsos.v[i], c = classification.v[i];
        if (std::isnan(q) || std::isnan(c)) continue;
        if (!ergodic_all_cells && c <= 0) continue;
        tot += q;
        ++nc;
    }
    if (nc == 0) throw std::invalid_argument("elm: no chaotic cells (N_c = 0)");
    if (tot <= 0) throw std::invalid_argument("elm: field carries no mass on S_c");
    double H;
    if (std::abs(alpha - 1.0) < 1e-12) {
        double s = 0;
        for (size_t i = 0; i < qsos.v.size(); ++i) {
            double q = qsos.v[i], c = classification.v[i];
            if (std::isnan(q) || std::isnan(c)) continue;
            if (!ergodic_all_cells && c <= 0) continue;
            double p = q / tot;
            if (p > 0) s -= p * std::log(p);
        }
        H = s;
    } else {
        double s = 0;
        for (size_t i = 0; i < qsos.v.size(); ++i) {
            double q = qsos.v[i], c = classification.v[i];
            if (std::isnan(q) || std::isnan(c)) continue;
            if (!ergodic_all_cells && c <= 0) continue;
            double p = q / tot;
            if (p > 0) s += std::pow(p, alpha);
        }
        H = std::log(s) / (1.0 - alpha);
    }
    return std::exp(H) / static_cast<double>(nc);
}

double random_state_bound(double alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("random_state_bound: alpha > 0 required");
    if (std::abs(alpha - 1.0) < 1e-9) return std::exp(M_EULER - 1.0);
    return std::pow(std::tgamma(1.0 + alpha), 1.0 / (1.0 - alpha));
}

// ---------------------------------------------------------------------------
// beta distribution MLE with profiled upper limit

namespace {

/// MLE of Beta(a, b) on x in (0,1) given sufficient statistics
/// t1 = mean ln x, t2 = mean ln(1-x); Newton on the digamma system from a
/// method-of-moments start.
void beta_mle(double t1, double t2, double mean, double var, double& a, double& b) {
    ensure_gsl_quiet();
    double c = mean * (1 - mean) / std::max(var, 1e-12) - 1.0;
    a = std::max(mean * c, 0.1);
    b = std::max((1 - mean) * c, 0.1);
    for (int it = 0; it < 200; ++it) {
        double psum = gsl_sf_psi(a + b);
        double f1 = gsl_sf_psi(a) - psum - t1;
        double f2 = gsl_sf_psi(b) - psum - t2;
        double ta = gsl_sf_psi_1(a), tb = gsl_sf_psi_1(b), ts = gsl_sf_psi_1(a + b);
        double j11 = ta - ts, j12 = -ts, j22 = tb - ts;
        double det = j11 * j22 - j12 * j12;
        if (det == 0) break;
        double da = (f1 * j22 - f2 * j12) / det;
        double db = (f2 * j11 - f1 * j12) / det;
        double step = 1.0;
        while ((a - step * da <= 0 || b - step * db <= 0) && step > 1e-6) step *= 0.5;
        a -= step * da;
        b -= step * db;
        if (std::abs(da) + std::abs(db) < 1e-12 * (a + b)) break;
    }
}

double beta_loglik(const std::vector<double>& x, double a, double b) {
    double s = 0;
    for (double v : x) s += (a - 1) * std::log(v) + (b - 1) * std::log1p(-v);
    return s - x.size() * (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace

BetaFit fit_beta(const std::vector<double>& samples) {
    if (samples.size() < 50)
        throw std::invalid_argument("fit_beta: need at least 50 samples");
    double lo = *std::min_element(samples.begin(), samples.end());
    double hi = *std::max_element(samples.begin(), samples.end());
    if (!(lo > 0)) throw std::invalid_argument("fit_beta: samples must be positive");
    if (hi <= lo) throw std::invalid_argument("fit_beta: degenerate samples");

    BetaFit best;
    best.loglik = -std::numeric_limits<double>::infinity();
    const int ngrid = 64;
    for (int g = 0; g < ngrid; ++g) {
        // L0 grid from just above max(sample) to 1.2 max(sample)
        double L0 = hi * (1.0 + 1e-6 + 0.2 * g / (ngrid - 1.0));
        double t1 = 0, t2 = 0, m = 0, m2 = 0;
        for (double v : samples) {
            double x = v / L0;
            t1 += std::log(x);
            t2 += std::log1p(-x);
            m += x;
            m2 += x * x;
        }
        t1 /= samples.size();
        t2 /= samples.size();
        m /= samples.size();
        m2 = m2 / samples.size() - m * m;
        double a, b;
        beta_mle(t1, t2, m, m2, a, b);
        std::vector<double> x(samples.size());
        for (size_t i = 0; i < x.size(); ++i) x[i] = samples[i] / L0;
        double ll = beta_loglik(x, a, b) - samples.size() * std::log(L0);
        if (ll > best.loglik) {
            best.loglik = ll;
            best.L0 = L0;
            best.beta_a = a - 1;
            best.beta_b = b - 1;
        }
    }
    best.n_samples = static_cast<int>(samples.size());

    // KS distance against the fitted CDF
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0;
    for (size_t i = 0; i < sorted.size(); ++i) {
        double F = beta_fit_cdf(best, sorted[i]);
        double e_hi = static_cast<double>(i + 1) / sorted.size();
        double e_lo = static_cast<double>(i) / sorted.size();
        ks = std::max({ks, std::abs(F - e_hi), std::abs(F - e_lo)});
    }
    best.ks = ks;
    return best;
}

double beta_fit_variance(const BetaFit& fit) {
    double a = fit.beta_a + 1, b = fit.beta_b + 1;
    return fit.L0 * fit.L0 * a * b / ((a + b) * (a + b) * (a + b + 1));
}

double beta_fit_cdf(const BetaFit& fit, double x) {
    ensure_gsl_quiet();
    double t = std::clamp(x / fit.L0, 0.0, 1.0);
    return gsl_cdf_beta_P(t, fit.beta_a + 1, fit.beta_b + 1);
}

std::vector<StateStats> classify_chaotic(const std::vector<StateStats>& stats, double M_c) {
    std::vector<StateStats> out;
    for (const auto& s : stats)
        if (s.M >= M_c) out.push_back(s);
    return out;
}

}  // namespace fput
