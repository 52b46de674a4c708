// fput: analysis pipelines for the three-particle FPUT model.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical/runtime failure.

#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fput/io.hpp"
#include "pipelines.hpp"

namespace {

fput::Config load_config(const std::string& path, const std::vector<std::string>& sets) {
    fput::Config cfg = path.empty() ? fput::Config() : fput::Config::parse_file(path);
    for (const auto& s : sets) {
        // --set section.key=value
        size_t dot = s.find('.');
        size_t eq = s.find('=');
        if (dot == std::string::npos || eq == std::string::npos || eq < dot)
            throw std::invalid_argument("--set expects section.key=value, got: " + s);
        cfg.set(s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"three-particle FPUT quantum/classical analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    app.add_option("-c,--config", config_path, "configuration file (key = value sections)");
    app.add_option("--set", sets, "override config entries: section.key=value");

    auto* classical = app.add_subcommand("classical", "classical dynamics pipelines");
    classical->require_subcommand(1);
    auto* c_sos = classical->add_subcommand("sos", "Poincare surface of section of one orbit");
    auto* c_map = classical->add_subcommand("sali-map", "SALI chaos map on the SOS grid");
    auto* c_tra = classical->add_subcommand("transport", "ensemble transport time");

    auto* quantum = app.add_subcommand("quantum", "spectral pipelines");
    quantum->require_subcommand(1);
    auto* q_eig = quantum->add_subcommand("eigs", "diagonalize the sector Hamiltonian");
    auto* q_dos = quantum->add_subcommand("dos", "semiclassical density of states curve");

    auto* husimi = app.add_subcommand("husimi", "Husimi fields of eigenstates");
    husimi->require_subcommand(1);
    auto* h_qsos = husimi->add_subcommand("qsos", "Husimi quantum surface of section");
    auto* h_shell = husimi->add_subcommand("project-shell", "energy-shell projection (q2,p2)");
    auto* h_conf = husimi->add_subcommand("project-config", "energy-shell projection (q1,q2)");
    auto* h_comp = husimi->add_subcommand("project-complete", "completely projected Husimi");

    auto* stats = app.add_subcommand("stats", "eigenstate statistics");
    stats->require_subcommand(1);
    auto* s_m = stats->add_subcommand("m-index", "overlap index + ELMs per state");
    auto* s_elm = stats->add_subcommand("elm", "ELMs over all allowed cells (ergodic)");
    auto* s_beta = stats->add_subcommand("beta-fit", "beta fit of an ELM sample");
    auto* s_mix = stats->add_subcommand("mixed-fraction", "chi_M across hbar with power law");

    auto* render = app.add_subcommand("render", "rendering");
    auto* r_svg = render->add_subcommand("field-to-svg", "FieldFile to SVG heatmap");
    std::string rin, rout, rscale = "linear";
    double rfloor = 1e-11;
    int rcell = 4;
    r_svg->add_option("-i,--input", rin, "input .husf")->required();
    r_svg->add_option("-o,--output", rout, "output .svg")->required();
    r_svg->add_option("--scale", rscale, "linear|log");
    r_svg->add_option("--floor", rfloor, "log-scale clamp floor");
    r_svg->add_option("--cell-px", rcell, "pixels per cell");

    // allow -c / --set after the subcommand words
    std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
        a->fallthrough();
        for (auto* s : a->get_subcommands([](const CLI::App*) { return true; }))
            enable_fallthrough(s);
    };
    enable_fallthrough(&app);

    CLI11_PARSE(app, argc, argv);

    try {
        fput::Config cfg;
        try {
            cfg = load_config(config_path, sets);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: kind=config message=%s\n", e.what());
            return 2;
        }
        using namespace fput::cli;
        if (c_sos->parsed()) run_classical_sos(cfg);
        else if (c_map->parsed()) run_sali_map(cfg);
        else if (c_tra->parsed()) run_transport(cfg);
        else if (q_eig->parsed()) run_quantum_eigs(cfg);
        else if (q_dos->parsed()) run_quantum_dos(cfg);
        else if (h_qsos->parsed()) run_husimi(cfg, "qsos");
        else if (h_shell->parsed()) run_husimi(cfg, "project-shell");
        else if (h_conf->parsed()) run_husimi(cfg, "project-config");
        else if (h_comp->parsed()) run_husimi(cfg, "project-complete");
        else if (s_m->parsed()) run_stats_mindex(cfg, false);
        else if (s_elm->parsed()) run_stats_mindex(cfg, true);
        else if (s_beta->parsed()) run_beta_fit(cfg);
        else if (s_mix->parsed()) run_mixed_fraction(cfg);
        else if (r_svg->parsed()) run_render(rin, rout, rscale, rfloor, rcell);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: kind=config message=%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: kind=numeric message=%s\n", e.what());
        return 3;
    }
    return 0;
}
