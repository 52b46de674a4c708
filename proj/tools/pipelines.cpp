#include "pipelines.hpp"

#include <cstring>
#include <filesystem>
#include <map>
#include <sstream>

#include "fput/basis.hpp"
#include "fput/classical.hpp"
#include "fput/husimi.hpp"
#include "fput/io.hpp"
#include "fput/spectral.hpp"
#include "fput/stats.hpp"
#include "fput/svg.hpp"

namespace fs = std::filesystem;

namespace fput::cli {

namespace {

std::string outdir_of(const Config& cfg) {
    std::string d = cfg.get_or("io", "outdir", "out");
    fs::create_directories(d);
    return d;
}

CacheStore cache_of(const Config& cfg) {
    std::string dflt = outdir_of(cfg) + "/.cache";
    return CacheStore::from_env_or(cfg.get_or("io", "cache_dir", dflt));
}

void finish(const Config& cfg, const std::string& outdir,
            const std::vector<std::string>& artifacts,
            const std::map<std::string, std::string>& scalars) {
    std::vector<ManifestEntry> entries;
    for (const auto& a : artifacts) entries.push_back({a, file_checksum(a)});
    Config snap = cfg;
    snap.set("io", "tool_version", kToolVersion);
    write_manifest(outdir + "/manifest.txt", snap, entries, scalars);
}

std::string params_tag(const ModelParams& mp) {
    std::ostringstream s;
    s << "alpha=" << format_full(mp.alpha) << ";lambda=" << format_full(mp.lambda)
      << ";hbar=" << format_full(mp.hbar) << ";N=" << mp.cutoff_n
      << ";sector=" << to_string(mp.sector);
    return s.str();
}

// ---- eigenwindow (de)serialization for the content-addressed cache --------

std::vector<uint8_t> window_to_bytes(const EigenWindow& w) {
    std::vector<uint8_t> out;
    auto put = [&](const void* p, size_t n) {
        const auto* b = static_cast<const uint8_t*>(p);
        out.insert(out.end(), b, b + n);
    };
    uint32_t magic = 0x4e495745, ver = 1;  // "EWIN"
    put(&magic, 4);
    put(&ver, 4);
    put(&w.window_lo, 8);
    put(&w.window_hi, 8);
    uint32_t dim = static_cast<uint32_t>(w.coefficients.rows());
    uint32_t k = static_cast<uint32_t>(w.count());
    put(&dim, 4);
    put(&k, 4);
    put(w.energies.data(), 8 * k);
    put(w.residual_norms.data(), 8 * k);
    put(w.coefficients.data(), 8 * static_cast<size_t>(dim) * k);
    return out;
}

bool window_from_bytes(const std::vector<uint8_t>& b, EigenWindow& w) {
    size_t off = 0;
    auto take = [&](void* p, size_t n) {
        if (off + n > b.size()) return false;
        std::memcpy(p, b.data() + off, n);
        off += n;
        return true;
    };
    uint32_t magic = 0, ver = 0, dim = 0, k = 0;
    if (!take(&magic, 4) || magic != 0x4e495745) return false;
    if (!take(&ver, 4) || ver != 1) return false;
    if (!take(&w.window_lo, 8) || !take(&w.window_hi, 8)) return false;
    if (!take(&dim, 4) || !take(&k, 4)) return false;
    w.energies.resize(k);
    w.residual_norms.resize(k);
    w.coefficients.resize(dim, k);
    return take(w.energies.data(), 8 * k) && take(w.residual_norms.data(), 8 * k) &&
           take(w.coefficients.data(), 8 * static_cast<size_t>(dim) * k) &&
           off == b.size();
}

}  // namespace

EigenWindow cached_window(const ModelParams& mp, const WindowSpec& spec,
                          const EigOptions& opts, const CacheStore& cache, bool dense) {
    std::ostringstream tag;
    tag << params_tag(mp) << ";mode=" << (dense ? "dense" : "window")
        << ";center=" << format_full(spec.center) << ";width=" << format_full(spec.width)
        << ";count=" << spec.count << ";tol=" << format_full(opts.tol)
        << ";seed=" << opts.seed;
    std::string key = CacheStore::make_key("eigwin", kCacheVersion, tag.str());
    if (auto hit = cache.get(key)) {
        EigenWindow w;
        if (window_from_bytes(*hit, w)) {
            w.params = mp;
            return w;
        }
    }
    SectorBasis basis = enumerate_sector(mp);
    SparseHamiltonian H = assemble_hamiltonian(mp, basis);

    // cutoff adequacy: truncated dimension should be >= 10x the semiclassical
    // count up to the highest analyzed energy
    double etop = spec.width > 0 ? spec.center + spec.width / 2 : spec.center;
    if (etop > 0) {
        try {
            double ne = 0, de = etop / 64;
            for (int i = 0; i < 64; ++i) {
                double e = (i + 0.5) * de;
                double f = (mp.lambda == 0 && mp.alpha != 0 &&
                            e <= 1.0 / (6 * mp.alpha * mp.alpha))
                               ? dos_scaled_f_alpha(e, mp.alpha)
                               : allowed_area_numeric(e, mp);
                ne += f * de;
            }
            ne /= 2 * M_PI * mp.hbar * mp.hbar;
            double total_dim = (mp.cutoff_n + 1.0) * (mp.cutoff_n + 2.0) / 2.0;
            if (total_dim < 10.0 * ne)
                std::fprintf(stderr,
                             "warning: cutoff_n = %d gives dimension %.0f < 10 x "
                             "semiclassical count %.0f; spectra may be unconverged\n",
                             mp.cutoff_n, total_dim, ne);
        } catch (const std::exception&) {
            // adequacy estimate is advisory only
        }
    }

    EigenWindow w = dense ? eig_dense(H, mp, opts) : eig_window(H, mp, spec, opts);
    cache.put(key, window_to_bytes(w));
    return w;
}

SaliMapResult cached_sali_map(const ModelParams& mp, double E, const GridSpec& g,
                              double t_end, double thr, const CacheStore& cache) {
    std::ostringstream tag;
    tag << params_tag(mp) << ";E=" << format_full(E) << ";nx=" << g.nx << ";ny=" << g.ny
        << ";x0=" << format_full(g.xmin) << ";x1=" << format_full(g.xmax)
        << ";y0=" << format_full(g.ymin) << ";y1=" << format_full(g.ymax)
        << ";t=" << format_full(t_end) << ";thr=" << format_full(thr);
    std::string key_s = CacheStore::make_key("sali", kCacheVersion, tag.str() + ";sali");
    std::string key_c = CacheStore::make_key("sali", kCacheVersion, tag.str() + ";class");
    auto hs = cache.get(key_s);
    auto hc = cache.get(key_c);
    if (hs && hc) {
        SaliMapResult r;
        r.sali_map = field_from_bytes(*hs);
        r.classification = field_from_bytes(*hc);
        r.threshold = thr;
        r.t_end = t_end;
        long chaotic = 0, allowed = 0;
        for (double v : r.classification.v) {
            if (std::isnan(v)) continue;
            ++allowed;
            if (v > 0) ++chaotic;
        }
        r.eta_c = allowed ? static_cast<double>(chaotic) / allowed : 0.0;
        return r;
    }
    SaliMapResult r = sali_map(E, mp, g, t_end, thr);
    cache.put(key_s, field_to_bytes(r.sali_map));
    cache.put(key_c, field_to_bytes(r.classification));
    return r;
}

namespace {

/// Window request taken from [eigs]; cache-aware.
EigenWindow obtain_window(const Config& cfg, const ModelParams& mp, const CacheStore& cache) {
    bool dense = cfg.get_or("eigs", "mode", "window") == "dense";
    EigOptions opts;
    opts.tol = cfg.get_double_or("eigs", "tol", 1e-9);
    opts.seed = static_cast<uint64_t>(cfg.get_int_or("io", "seed", 1));
    WindowSpec spec;
    spec.center = cfg.get_double_or("eigs", "center", 0.0);
    spec.width = cfg.get_double_or("eigs", "width", 0.0);
    spec.count = static_cast<int>(cfg.get_int_or("eigs", "count", 0));
    return cached_window(mp, spec, opts, cache, dense);
}

GridSpec grid_from_config(const Config& cfg, const GridSpec& dflt) {
    GridSpec g = dflt;
    g.nx = static_cast<int>(cfg.get_int_or("grid", "nx", dflt.nx));
    g.ny = static_cast<int>(cfg.get_int_or("grid", "ny", dflt.ny));
    g.xmin = cfg.get_double_or("grid", "xmin", dflt.xmin);
    g.xmax = cfg.get_double_or("grid", "xmax", dflt.xmax);
    g.ymin = cfg.get_double_or("grid", "ymin", dflt.ymin);
    g.ymax = cfg.get_double_or("grid", "ymax", dflt.ymax);
    return g;
}

/// SALI map for (E, grid) through the cache, with [sali] options.
SaliMapResult obtain_sali_map(const Config& cfg, const ModelParams& mp, double E,
                              const GridSpec& g, const CacheStore& cache) {
    double t_end = cfg.get_double_or("sali", "t_end", 1000.0);
    double thr = cfg.get_double_or("sali", "threshold", 1e-8);
    return cached_sali_map(mp, E, g, t_end, thr, cache);
}

}  // namespace

// ---------------------------------------------------------------------------

void run_classical_sos(const Config& cfg) {
    ModelParams mp = model_params_from_config(cfg);
    std::string outdir = outdir_of(cfg);
    double E = cfg.get_double("sos", "E");
    double q2 = cfg.get_double_or("sos", "q2", -0.1);
    double p2 = cfg.get_double_or("sos", "p2", 0.0);
    double t_end = cfg.get_double_or("sos", "t_end", 500.0);
    double p1sq = sos_p1_squared(E, q2, p2, mp);
    if (p1sq < 0) throw std::invalid_argument("sos: initial condition outside S");
    PhasePoint ic{0.0, q2, std::sqrt(p1sq), p2};
    auto pts = sos_section(ic, mp, t_end);
    std::ostringstream out;
    out << "q2,p2\n";
    for (auto& p : pts) out << format_full(p[0]) << ',' << format_full(p[1]) << '\n';
    std::string path = outdir + "/sos.csv";
    write_text_file(path, out.str());
    finish(cfg, outdir, {path},
           {{"crossings", std::to_string(pts.size())}, {"E", format_full(E)}});
}

void run_sali_map(const Config& cfg) {
    ModelParams mp = model_params_from_config(cfg);
    std::string outdir = outdir_of(cfg);
    CacheStore cache = cache_of(cfg);
    double E = cfg.get_double("sali", "E");
    GridSpec g = grid_from_config(
        cfg, sos_grid_spec(E, mp, static_cast<int>(cfg.get_int_or("sali", "nx", 200)),
                           static_cast<int>(cfg.get_int_or("sali", "ny", 200))));
    SaliMapResult r = obtain_sali_map(cfg, mp, E, g, cache);
    std::string fs_path = outdir + "/sali.husf";
    std::string fc_path = outdir + "/sali_class.husf";
    write_field(fs_path, r.sali_map);
    write_field(fc_path, r.classification);
    finish(cfg, outdir, {fs_path, fc_path},
           {{"eta_c", format_full(r.eta_c)},
            {"E", format_full(E)},
            {"t_end", format_full(r.t_end)},
            {"threshold", format_full(r.threshold)}});
}

void run_transport(const Config& cfg) {
    ModelParams mp = model_params_from_config(cfg);
    std::string outdir = outdir_of(cfg);
    double E = cfg.get_double("transport", "E");
    TransportSpec spec;
    spec.n_ic = static_cast<int>(cfg.get_int_or("transport", "n_ic", 4000));
    spec.q2_lo = cfg.get_double_or("transport", "q2_lo", -0.25);
    spec.q2_hi = cfg.get_double_or("transport", "q2_hi", -0.15);
    spec.p2 = cfg.get_double_or("transport", "p2", 0.0);
    spec.horizon = cfg.get_double_or("transport", "horizon", 400.0);
    spec.window = cfg.get_double_or("transport", "window", 30.0);
    spec.threshold = cfg.get_double_or("transport", "threshold", 0.02);
    spec.sample_dt = cfg.get_double_or("transport", "sample_dt", 0.5);
    TransportResult r = transport_time(E, mp, spec);

    std::ostringstream s1;
    s1 << "t,sigma_p2\n";
    for (size_t i = 0; i < r.times.size(); ++i)
        s1 << format_full(r.times[i]) << ',' << format_full(r.sigma_series[i]) << '\n';
    std::string sig_path = outdir + "/transport_sigma.csv";
    write_text_file(sig_path, s1.str());
    std::ostringstream s2;
    s2 << "t,mu_p2\n";
    for (size_t i = 0; i < r.mu_times.size(); ++i)
        s2 << format_full(r.mu_times[i]) << ',' << format_full(r.mu_series[i]) << '\n';
    std::string mu_path = outdir + "/transport_mu.csv";
    write_text_file(mu_path, s2.str());

    std::map<std::string, std::string> scal = {
        {"t_T", format_full(r.t_T)},
        {"sat_value", format_full(r.sat_value)},
        {"threshold", format_full(r.threshold_used)},
        {"E", format_full(E)}};
    if (r.t_T > 0) {
        scal["alpha_L_per_sector"] = format_full(alpha_ratio(E, mp, r.t_T));
        scal["alpha_L_total"] = format_full(alpha_ratio(E, mp, r.t_T, DosScope::Total));
    }
    finish(cfg, outdir, {sig_path, mu_path}, scal);
}

void run_quantum_eigs(const Config& cfg) {
    ModelParams mp = model_params_from_config(cfg);
    std::string outdir = outdir_of(cfg);
    CacheStore cache = cache_of(cfg);
    EigenWindow w = obtain_window(cfg, mp, cache);
    std::ostringstream out;
    out << "k,E,residual\n";
    for (int k = 0; k < w.count(); ++k)
        out << k << ',' << format_full(w.energies[k]) << ','
            << format_full(w.residual_norms[k]) << '\n';
    std::string path = outdir + "/eigs.csv";
    write_text_file(path, out.str());
    finish(cfg, outdir, {path},
           {{"count", std::to_string(w.count())},
            {"window_lo", format_full(w.window_lo)},
            {"window_hi", format_full(w.window_hi)}});
}

void run_quantum_dos(const Config& cfg) {
    ModelParams mp = model_params_from_config(cfg);
    std::string outdir = outdir_of(cfg);
    double e0 = cfg.get_double("dos", "e_min");
    double e1 = cfg.get_double("dos", "e_max");
    int n = static_cast<int>(cfg.get_int_or("dos", "n", 64));
    std::vector<double> es(n);
    for (int i = 0; i < n; ++i) es[i] = e0 + (e1 - e0) * i / (n - 1.0);
    DosCurve c = dos_curve(es, mp);
    std::ostringstream out;
    out << "E,g,f\n";
    for (int i = 0; i < n; ++i)
        out << format_full(c.energies[i]) << ',' << format_full(c.g[i]) << ','
            << format_full(c.f[i]) << '\n';
    std::string path = outdir + "/dos.csv";
    write_text_file(path, out.str());
    finish(cfg, outdir, {path}, {{"per_sector_factor", format_full(c.per_sector_factor)}});
}

namespace {

std::vector<int> selected_states(const Config& cfg, int count) {
    std::string sel = cfg.get_or("husimi", "states", "all");
    std::vector<int> out;
    if (sel == "all") {
        for (int i = 0; i < count; ++i) out.push_back(i);
        return out;
    }
    std::istringstream in(sel);
    std::string item;
    while (std::getline(in, item, ',')) {
        int k = std::stoi(item);
        if (k < 0 || k >= count)
            throw std::invalid_argument("husimi: state index out of range: " + item);
        out.push_back(k);
    }
    return out;
}

}  // namespace

void run_husimi(const Config& cfg, const std::string& kind) {
    ModelParams mp = model_params_from_config(cfg);
    std::string outdir = outdir_of(cfg);
    CacheStore cache = cache_of(cfg);
    EigenWindow w = obtain_window(cfg, mp, cache);
    if (w.count() == 0) throw std::runtime_error("husimi: the window holds no states");
    SectorBasis basis = enumerate_sector(mp);
    int nodes = static_cast<int>(cfg.get_int_or("husimi", "nodes", 64));
    double prune = cfg.get_double_or("husimi", "prune", 1e-15);
    std::vector<int> picks = selected_states(cfg, w.count());

    std::vector<std::string> artifacts;
    std::map<std::string, std::string> scal;
    for (int k : picks) {
        double Ek = w.energies[k];
        std::string path = outdir + "/" + kind + "_k" + std::to_string(k) + ".husf";
        if (kind == "project-complete") {
            CartesianCoeffs B = cartesian_coefficients(basis, w.coefficients.col(k), mp.hbar);
            double R = std::sqrt(2.0 * mp.hbar * (mp.cutoff_n + 6.0));
            GridSpec g = grid_from_config(cfg, GridSpec{200, 200, -R, R, -R, R});
            HusimiField f = project_complete(B, g);
            write_field(path, f.field);
            scal["norm_k" + std::to_string(k)] = format_full(f.norm);
        } else {
            HusimiEvaluator st(basis, w.coefficients.col(k), mp.hbar, prune);
            HusimiField f;
            if (kind == "qsos") {
                GridSpec g = grid_from_config(cfg, sos_grid_spec(Ek, mp));
                f = qsos(st, Ek, g, mp);
            } else if (kind == "project-shell") {
                GridSpec g = grid_from_config(cfg, sos_grid_spec(Ek, mp));
                f = project_shell(st, Ek, g, mp, nodes);
            } else if (kind == "project-config") {
                GridSpec g = grid_from_config(cfg, config_grid_spec(Ek, mp));
                f = project_config(st, Ek, g, mp, nodes);
            } else {
                throw std::invalid_argument("husimi: unknown kind " + kind);
            }
            write_field(path, f.field);
            scal["norm_k" + std::to_string(k)] = format_full(f.norm);
        }
        artifacts.push_back(path);
        scal["E_k" + std::to_string(k)] = format_full(Ek);
    }
    finish(cfg, outdir, artifacts, scal);
}

void run_stats_mindex(const Config& cfg, bool ergodic) {
    ModelParams mp0 = model_params_from_config(cfg);
    std::string outdir = outdir_of(cfg);
    CacheStore cache = cache_of(cfg);

    // classification map: explicit field file, or "auto" to compute from [sali]
    GridField cmap;
    double E_map = cfg.get_double_or("sali", "E", 0.0);
    std::string cmap_src = cfg.get_or("stats", "cmap", "auto");
    if (cmap_src != "auto") {
        cmap = read_field(cmap_src);
    } else {
        if (!(E_map > 0))
            throw std::invalid_argument("stats: cmap = auto requires [sali] E");
        GridSpec g = grid_from_config(
            cfg, sos_grid_spec(E_map, mp0, static_cast<int>(cfg.get_int_or("sali", "nx", 200)),
                               static_cast<int>(cfg.get_int_or("sali", "ny", 200))));
        if (ergodic) {
            // fully chaotic runs need no SALI sweep: every allowed cell is S_c
            cmap = GridField(g.nx, g.ny, g.xmin, g.xmax, g.ymin, g.ymax, FieldDomain::Sos);
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix)
                    if (sos_p1_squared(E_map, cmap.xc(ix), cmap.yc(iy), mp0) >= 0)
                        cmap.at(ix, iy) = 1.0;
        } else {
            cmap = obtain_sali_map(cfg, mp0, E_map, g, cache).classification;
        }
    }

    std::vector<double> hbars = cfg.get_doubles_or("ensemble", "hbars", {mp0.hbar});
    double prune = cfg.get_double_or("husimi", "prune", 1e-15);
    GridSpec g{cmap.nx, cmap.ny, cmap.xmin, cmap.xmax, cmap.ymin, cmap.ymax};

    std::vector<StateStats> stats;
    for (double hb : hbars) {
        ModelParams mp = mp0;
        mp.hbar = hb;
        Config sub = cfg;
        sub.set("model", "hbar", format_full(hb));
        EigenWindow w = obtain_window(sub, mp, cache);
        SectorBasis basis = enumerate_sector(mp);
        for (int k = 0; k < w.count(); ++k) {
            HusimiEvaluator st(basis, w.coefficients.col(k), mp.hbar, prune);
            HusimiField f = qsos(st, w.energies[k], g, mp);
            StateStats s;
            s.k = static_cast<int>(stats.size());
            s.E = w.energies[k];
            s.M = ergodic ? 1.0 : overlap_index(f.field, cmap);
            s.L1 = elm(f.field, cmap, 1.0, ergodic);
            s.L2 = elm(f.field, cmap, 2.0, ergodic);
            s.sector = mp.sector;
            s.hbar = mp.hbar;
            stats.push_back(s);
        }
    }
    std::string path = outdir + "/stats.csv";
    write_stats(path, stats);
    finish(cfg, outdir, {path},
           {{"n_states", std::to_string(stats.size())},
            {"n_chaotic_cells",
             std::to_string(chaotic_cell_count(cmap, ergodic))}});
}

void run_beta_fit(const Config& cfg) {
    std::string outdir = outdir_of(cfg);
    std::string src = cfg.get("stats", "input");
    double mc = cfg.get_double_or("stats", "mc", 0.8);
    std::string column = cfg.get_or("stats", "column", "L1");
    auto all = read_stats(src);
    auto chaotic = classify_chaotic(all, mc);
    std::vector<double> samples;
    for (const auto& s : chaotic) samples.push_back(column == "L2" ? s.L2 : s.L1);
    BetaFit f = fit_beta(samples);
    std::ostringstream out;
    out << "beta_a,beta_b,L0,ks,n\n"
        << format_full(f.beta_a) << ',' << format_full(f.beta_b) << ','
        << format_full(f.L0) << ',' << format_full(f.ks) << ',' << f.n_samples << '\n';
    std::string path = outdir + "/beta_fit.csv";
    write_text_file(path, out.str());
    finish(cfg, outdir, {path},
           {{"beta_a", format_full(f.beta_a)},
            {"beta_b", format_full(f.beta_b)},
            {"L0", format_full(f.L0)},
            {"ks", format_full(f.ks)},
            {"variance_model", format_full(beta_fit_variance(f))},
            {"n", std::to_string(f.n_samples)}});
}

void run_mixed_fraction(const Config& cfg) {
    std::string outdir = outdir_of(cfg);
    std::string inputs = cfg.get("stats", "inputs");  // comma list of stats.csv
    double m0 = cfg.get_double_or("stats", "m0", -0.8);
    double m1 = cfg.get_double_or("stats", "m1", 0.8);
    std::map<double, std::vector<double>> by_hbar;
    std::istringstream in(inputs);
    std::string item;
    while (std::getline(in, item, ',')) {
        // tolerate whitespace around paths
        size_t a = item.find_first_not_of(" \t");
        size_t b = item.find_last_not_of(" \t");
        if (a == std::string::npos) continue;
        for (const auto& s : read_stats(item.substr(a, b - a + 1)))
            by_hbar[s.hbar].push_back(s.M);
    }
    if (by_hbar.empty()) throw std::invalid_argument("mixed-fraction: no input rows");
    std::vector<double> hbars, chis;
    std::ostringstream out;
    out << "hbar,chi,n\n";
    for (auto it = by_hbar.rbegin(); it != by_hbar.rend(); ++it) {
        double chi = mixed_fraction(it->second, m0, m1);
        hbars.push_back(it->first);
        chis.push_back(chi);
        out << format_full(it->first) << ',' << format_full(chi) << ','
            << it->second.size() << '\n';
    }
    std::string path = outdir + "/mixed_fraction.csv";
    write_text_file(path, out.str());
    std::map<std::string, std::string> scal = {{"m0", format_full(m0)},
                                               {"m1", format_full(m1)}};
    if (hbars.size() >= 3) {
        try {
            PowerLawFit f = fit_power_law(hbars, chis);
            scal["xi"] = format_full(f.xi);
            scal["xi_se"] = format_full(f.se);
        } catch (const std::exception& e) {
            scal["xi_error"] = e.what();
        }
    }
    finish(cfg, outdir, {path}, scal);
}

void run_render(const std::string& input, const std::string& output,
                const std::string& scale, double floor, int cell_px) {
    GridField f = read_field(input);
    SvgOptions opts;
    opts.scale = scale == "log" ? SvgScale::Log : SvgScale::Linear;
    opts.log_floor = floor;
    opts.cell_px = cell_px;
    write_text_file(output, render_svg(f, opts));
}

}  // namespace fput::cli
