#include "fput/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace fput {

// ---------------------------------------------------------------------------
// config

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        cfg.sections_[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    return parse_string(read_text_file(path));
}

bool Config::has(const std::string& s, const std::string& k) const {
    auto it = sections_.find(s);
    return it != sections_.end() && it->second.count(k) > 0;
}

std::string Config::get(const std::string& s, const std::string& k) const {
    auto it = sections_.find(s);
    if (it == sections_.end() || !it->second.count(k))
        throw std::invalid_argument("config: missing [" + s + "] " + k);
    return it->second.at(k);
}

std::string Config::get_or(const std::string& s, const std::string& k,
                           const std::string& d) const {
    return has(s, k) ? get(s, k) : d;
}

double Config::get_double(const std::string& s, const std::string& k) const {
    const std::string v = get(s, k);
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("config: [" + s + "] " + k + " is not a number: " + v);
    return x;
}

double Config::get_double_or(const std::string& s, const std::string& k, double d) const {
    return has(s, k) ? get_double(s, k) : d;
}

long Config::get_int(const std::string& s, const std::string& k) const {
    const std::string v = get(s, k);
    size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("config: [" + s + "] " + k + " is not an integer: " + v);
    return x;
}

long Config::get_int_or(const std::string& s, const std::string& k, long d) const {
    return has(s, k) ? get_int(s, k) : d;
}

std::vector<double> Config::get_doubles_or(const std::string& s, const std::string& k,
                                           const std::vector<double>& d) const {
    if (!has(s, k)) return d;
    std::vector<double> out;
    std::istringstream in(get(s, k));
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stod(trim(item)));
    return out;
}

void Config::set(const std::string& s, const std::string& k, const std::string& v) {
    sections_[s][k] = v;
}

std::string Config::canonical() const {
    std::ostringstream out;
    for (const auto& [sec, kv] : sections_) {
        out << '[' << sec << "]\n";
        for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
    }
    return out.str();
}

ModelParams model_params_from_config(const Config& cfg) {
    ModelParams mp;
    mp.alpha = cfg.get_double_or("model", "alpha", 1.0);
    mp.lambda = cfg.get_double_or("model", "lambda", 0.0);
    mp.hbar = cfg.get_double_or("model", "hbar", 1e-3);
    mp.cutoff_n = static_cast<int>(cfg.get_int_or("model", "cutoff_n", 0));
    mp.sector = sector_from_string(cfg.get_or("model", "sector", "singlet"));
    mp.validate();
    return mp;
}

// ---------------------------------------------------------------------------
// hashing

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed) {
    const auto* p = static_cast<const uint8_t*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

// ---------------------------------------------------------------------------
// FieldFile

namespace {

template <typename T>
void put(std::vector<uint8_t>& out, T v) {
    uint8_t b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.insert(out.end(), b, b + sizeof(T));  // little-endian host assumed
}

template <typename T>
T take(const std::vector<uint8_t>& in, size_t& off) {
    if (off + sizeof(T) > in.size()) throw std::runtime_error("FieldFile: truncated");
    T v;
    std::memcpy(&v, in.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

}  // namespace

std::vector<uint8_t> field_to_bytes(const GridField& f) {
    std::vector<uint8_t> out;
    out.reserve(49 + 8 * f.v.size());
    out.insert(out.end(), {'H', 'U', 'S', 'F'});
    put<uint32_t>(out, 1u);
    put<uint32_t>(out, static_cast<uint32_t>(f.nx));
    put<uint32_t>(out, static_cast<uint32_t>(f.ny));
    put<double>(out, f.xmin);
    put<double>(out, f.xmax);
    put<double>(out, f.ymin);
    put<double>(out, f.ymax);
    put<uint8_t>(out, static_cast<uint8_t>(f.domain));
    for (double v : f.v) put<double>(out, v);
    return out;
}

GridField field_from_bytes(const std::vector<uint8_t>& b) {
    size_t off = 0;
    if (b.size() < 4 || std::memcmp(b.data(), "HUSF", 4) != 0)
        throw std::runtime_error("FieldFile: bad magic");
    off = 4;
    uint32_t version = take<uint32_t>(b, off);
    if (version != 1) throw std::runtime_error("FieldFile: unsupported version");
    GridField f;
    f.nx = static_cast<int>(take<uint32_t>(b, off));
    f.ny = static_cast<int>(take<uint32_t>(b, off));
    f.xmin = take<double>(b, off);
    f.xmax = take<double>(b, off);
    f.ymin = take<double>(b, off);
    f.ymax = take<double>(b, off);
    f.domain = static_cast<FieldDomain>(take<uint8_t>(b, off));
    size_t n = static_cast<size_t>(f.nx) * f.ny;
    if (b.size() != off + 8 * n)
        throw std::runtime_error("FieldFile: payload length mismatch");
    f.v.resize(n);
    std::memcpy(f.v.data(), b.data() + off, 8 * n);
    return f;
}

void write_field(const std::string& path, const GridField& f) {
    auto bytes = field_to_bytes(f);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    if (!out) throw std::runtime_error("write failed: " + path);
}

GridField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return field_from_bytes(bytes);
}

// ---------------------------------------------------------------------------
// StatsFile

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string stats_to_string(const std::vector<StateStats>& stats) {
    std::ostringstream out;
    out << "k,E,M,L1,L2,sector,hbar\n";
    for (const auto& s : stats)
        out << s.k << ',' << format_full(s.E) << ',' << format_full(s.M) << ','
            << format_full(s.L1) << ',' << format_full(s.L2) << ',' << to_string(s.sector)
            << ',' << format_full(s.hbar) << '\n';
    return out.str();
}

void write_stats(const std::string& path, const std::vector<StateStats>& stats) {
    write_text_file(path, stats_to_string(stats));
}

std::vector<StateStats> read_stats(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "k,E,M,L1,L2,sector,hbar")
        throw std::runtime_error("StatsFile: bad header in " + path);
    std::vector<StateStats> out;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream row(line);
        std::string c[7];
        for (int i = 0; i < 7; ++i)
            if (!std::getline(row, c[i], ',')) throw std::runtime_error("StatsFile: short row");
        StateStats s;
        s.k = std::stoi(c[0]);
        s.E = std::stod(c[1]);
        s.M = std::stod(c[2]);
        s.L1 = std::stod(c[3]);
        s.L2 = std::stod(c[4]);
        s.sector = sector_from_string(c[5]);
        s.hbar = std::stod(c[6]);
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// cache

CacheStore::CacheStore(std::string dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    // probe writability
    std::string probe = dir_ + "/.probe";
    std::ofstream p(probe, std::ios::trunc);
    if (p) {
        p << "ok";
        p.close();
        fs::remove(probe, ec);
        enabled_ = true;
    } else {
        std::fprintf(stderr, "warning: cache dir '%s' not writable, caching bypassed\n",
                     dir_.c_str());
    }
}

CacheStore CacheStore::from_env_or(const std::string& fallback_dir) {
    if (const char* env = std::getenv("FPUT_CACHE_DIR")) return CacheStore(env);
    return CacheStore(fallback_dir);
}

std::string CacheStore::make_key(const std::string& producer, int version,
                                 const std::string& params) {
    std::string s = producer + "/v" + std::to_string(version) + "/" + params;
    return producer + "-" + hex64(fnv1a64(s));
}

std::optional<std::vector<uint8_t>> CacheStore::get(const std::string& key) const {
    if (!enabled_) return std::nullopt;
    std::string path = dir_ + "/" + key + ".bin";
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
    if (raw.size() < 8) return std::nullopt;
    uint64_t want;
    std::memcpy(&want, raw.data(), 8);
    std::vector<uint8_t> payload(raw.begin() + 8, raw.end());
    if (fnv1a64(payload.data(), payload.size()) != want) {
        std::fprintf(stderr, "warning: cache entry %s corrupt, recomputing\n", key.c_str());
        return std::nullopt;
    }
    return payload;
}

void CacheStore::put(const std::string& key, const std::vector<uint8_t>& payload) const {
    if (!enabled_) return;
    std::string tmp = dir_ + "/" + key + ".tmp";
    std::string path = dir_ + "/" + key + ".bin";
    uint64_t sum = fnv1a64(payload.data(), payload.size());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return;
        out.write(reinterpret_cast<const char*>(&sum), 8);
        out.write(reinterpret_cast<const char*>(payload.data()), payload.size());
        if (!out) return;
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);  // atomic publication
}

// ---------------------------------------------------------------------------
// manifest and file helpers

uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    uint64_t h = 1469598103934665603ull;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof buf);
        h = fnv1a64(buf, static_cast<size_t>(in.gcount()), h);
    }
    return h;
}

void write_manifest(const std::string& path, const Config& cfg,
                    const std::vector<ManifestEntry>& artifacts,
                    const std::map<std::string, std::string>& scalars) {
    std::ostringstream out;
    out << "# fput run manifest\n";
    out << "[config]\n" << cfg.canonical();
    out << "[results]\n";
    for (const auto& [k, v] : scalars) out << k << " = " << v << '\n';
    out << "[artifacts]\n";
    for (const auto& a : artifacts) out << a.path << " = " << hex64(a.checksum) << '\n';
    write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fput
