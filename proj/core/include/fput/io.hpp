#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fput/gridfield.hpp"
#include "fput/params.hpp"
#include "fput/stats.hpp"

namespace fput {

// ---- config ----------------------------------------------------------------

/// Line-based `key = value` configuration with [section] headers, UTF-8,
/// '#' comments, arrays as comma lists.
class Config {
public:
    Config() = default;
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& dflt) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double dflt) const;
    long get_int(const std::string& section, const std::string& key) const;
    long get_int_or(const std::string& section, const std::string& key, long dflt) const;
    std::vector<double> get_doubles_or(const std::string& section, const std::string& key,
                                       const std::vector<double>& dflt) const;
    void set(const std::string& section, const std::string& key, const std::string& value);

    /// canonical text (sorted sections/keys) used for manifests and cache keys
    std::string canonical() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

ModelParams model_params_from_config(const Config& cfg);

// ---- hashing / checksums ----------------------------------------------------

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 1469598103934665603ull);
uint64_t fnv1a64(const std::string& s);
std::string hex64(uint64_t h);

// ---- FieldFile ---------------------------------------------------------------

/// Binary field container: magic "HUSF", u32 version = 1, u32 nx, u32 ny,
/// f64 xmin, xmax, ymin, ymax, u8 domain tag, then nx*ny little-endian f64
/// row-major; empty cells are NaN. Round-trips bit-exactly.
void write_field(const std::string& path, const GridField& f);
GridField read_field(const std::string& path);
std::vector<uint8_t> field_to_bytes(const GridField& f);
GridField field_from_bytes(const std::vector<uint8_t>& bytes);

// ---- StatsFile ----------------------------------------------------------------

/// CSV with header k,E,M,L1,L2,sector,hbar; full-precision doubles (%.17g).
void write_stats(const std::string& path, const std::vector<StateStats>& stats);
std::vector<StateStats> read_stats(const std::string& path);
std::string stats_to_string(const std::vector<StateStats>& stats);

// ---- cache --------------------------------------------------------------------

/// Content-addressed store; keys hash (producer tag + version + params).
/// Entries carry a checksum; corruption is detected and treated as a miss.
/// An unwritable directory degrades to a transparent bypass with a warning
/// on stderr.
class CacheStore {
public:
    explicit CacheStore(std::string dir);
    static CacheStore from_env_or(const std::string& fallback_dir);

    static std::string make_key(const std::string& producer, int version,
                                const std::string& param_string);
    std::optional<std::vector<uint8_t>> get(const std::string& key) const;
    void put(const std::string& key, const std::vector<uint8_t>& payload) const;
    bool enabled() const { return enabled_; }
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    bool enabled_ = false;
};

// ---- manifest -------------------------------------------------------------------

struct ManifestEntry {
    std::string path;
    uint64_t checksum;
};

/// Run manifest: tool version, canonical config snapshot, seed, scalar
/// results, and per-artifact checksums.
void write_manifest(const std::string& path, const Config& cfg,
                    const std::vector<ManifestEntry>& artifacts,
                    const std::map<std::string, std::string>& scalars);

uint64_t file_checksum(const std::string& path);

// small helpers shared by the CLI
std::string format_full(double v);           // %.17g
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace fput
