#pragma once

#include <string>

#include "fput/classical.hpp"
#include "fput/io.hpp"
#include "fput/spectral.hpp"

namespace fput::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kCacheVersion = 1;

/// Cache-aware building blocks shared by the CLI pipelines and the acceptance
/// suite (same keys, so artifacts computed once are reused everywhere).
EigenWindow cached_window(const ModelParams& mp, const WindowSpec& spec,
                          const EigOptions& opts, const CacheStore& cache,
                          bool dense = false);
SaliMapResult cached_sali_map(const ModelParams& mp, double E, const GridSpec& grid,
                              double t_end, double threshold, const CacheStore& cache);

/// Each pipeline consumes a parsed config, writes its declared artifacts plus
/// manifest.txt under [io] outdir, and returns the manifest scalars.
void run_classical_sos(const Config& cfg);
void run_sali_map(const Config& cfg);
void run_transport(const Config& cfg);
void run_quantum_eigs(const Config& cfg);
void run_quantum_dos(const Config& cfg);
void run_husimi(const Config& cfg, const std::string& kind);  // qsos | project-*
void run_stats_mindex(const Config& cfg, bool ergodic);       // m-index / elm
void run_beta_fit(const Config& cfg);
void run_mixed_fraction(const Config& cfg);
void run_render(const std::string& input, const std::string& output,
                const std::string& scale, double floor, int cell_px);

}  // namespace fput::cli
