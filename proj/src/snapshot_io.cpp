#include "pfro/snapshot_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace pfro {

namespace {

constexpr char kMagic[4] = {'P', 'F', 'R', 'O'};
constexpr uint32_t kSchemaVersion = 1;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Explicit little-endian packing: identical bytes on any host.
void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}
void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

struct Reader {
    const char* p;
    const char* end;
    void need(size_t n) const {
        if (static_cast<size_t>(end - p) < n) throw FormatError("snapshot truncated");
    }
    uint16_t u16() {
        need(2);
        uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<uint16_t>(static_cast<uint8_t>(p[i])) << (8 * i);
        p += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(p[i])) << (8 * i);
        p += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(p[i])) << (8 * i);
        p += 8;
        return v;
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(*p++);
    }
    double f64() {
        const uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

std::string serialize_config(const ProcessConfig& cfg) {
    std::string out;
    put_u32(out, cfg.dimension);
    out.push_back(static_cast<char>(cfg.model));
    out.push_back(static_cast<char>(cfg.time_mode));
    put_u16(out, 0); // pad
    put_u64(out, cfg.n_points.value_or(0));
    put_f64(out, cfg.t_max.value_or(kNaN));
    put_u64(out, cfg.rng_seed);
    for (double v : cfg.seed_red) put_f64(out, v);
    for (double v : cfg.seed_blue) put_f64(out, v);
    return out;
}

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

uint64_t config_hash(const ProcessConfig& cfg) {
    return fnv1a64(serialize_config(cfg));
}

void write_snapshot(const Snapshot& snap, std::ostream& out) {
    const uint32_t d = snap.config.dimension;
    std::string buf;
    buf.reserve(64 + snap.site_count() * (33 + 8 * d) + snap.segment_count() * (9 + 16 * d));
    buf.append(kMagic, 4);
    put_u32(buf, kSchemaVersion);

    const std::string cfg_block = serialize_config(snap.config);
    buf += cfg_block;

    put_u32(buf, static_cast<uint32_t>(snap.checkpoints.size()));
    for (uint64_t c : snap.checkpoints) put_u64(buf, c);
    put_u64(buf, fnv1a64(cfg_block));

    put_u64(buf, snap.site_count());
    for (uint64_t i = 0; i < snap.site_count(); ++i) {
        put_u64(buf, i);                     // id
        put_u64(buf, i < 2 ? 0 : i - 1);     // arrival index
        buf.push_back(static_cast<char>(snap.colors[i]));
        const double* pos = snap.position(i);
        for (uint32_t a = 0; a < d; ++a) put_f64(buf, pos[a]);
        put_f64(buf, snap.arrival_times.empty() ? kNaN : snap.arrival_times[i]);
        put_u64(buf, snap.parents[i] == kNoParent ? UINT64_MAX : snap.parents[i]);
    }

    put_u64(buf, snap.segment_count());
    for (uint64_t j = 0; j < snap.segment_count(); ++j) {
        put_u64(buf, snap.seg_owner[j]);
        buf.push_back(static_cast<char>(snap.seg_color[j]));
        for (uint32_t a = 0; a < d; ++a) put_f64(buf, snap.seg_a[j * d + a]);
        for (uint32_t a = 0; a < d; ++a) put_f64(buf, snap.seg_b[j * d + a]);
    }

    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("snapshot write failed");
}

void write_snapshot_file(const Snapshot& snap, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open for writing: " + path);
    write_snapshot(snap, f);
}

Snapshot read_snapshot(std::istream& in) {
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r{bytes.data(), bytes.data() + bytes.size()};

    r.need(4);
    if (std::memcmp(r.p, kMagic, 4) != 0) throw FormatError("bad magic: not a snapshot file");
    r.p += 4;
    const uint32_t version = r.u32();
    if (version != kSchemaVersion) throw FormatError("unsupported snapshot schema version");

    Snapshot s;
    const char* cfg_begin = r.p;
    s.config.dimension = r.u32();
    const uint8_t model = r.u8();
    const uint8_t time_mode = r.u8();
    if (model > 1 || time_mode > 1) throw FormatError("bad model/time_mode byte");
    s.config.model = static_cast<Model>(model);
    s.config.time_mode = static_cast<TimeMode>(time_mode);
    r.u16(); // pad
    const uint64_t n_points = r.u64();
    const double t_max = r.f64();
    s.config.rng_seed = r.u64();
    const uint32_t d = s.config.dimension;
    if (d < 1 || d > 1u << 20) throw FormatError("implausible dimension");
    s.config.seed_red.resize(d);
    s.config.seed_blue.resize(d);
    for (uint32_t a = 0; a < d; ++a) s.config.seed_red[a] = r.f64();
    for (uint32_t a = 0; a < d; ++a) s.config.seed_blue[a] = r.f64();
    if (s.config.time_mode == TimeMode::Discrete) {
        s.config.n_points = n_points;
    } else {
        if (std::isnan(t_max)) throw FormatError("poisson snapshot without t_max");
        s.config.t_max = t_max;
    }
    const std::string cfg_block(cfg_begin, r.p);

    const uint32_t n_checkpoints = r.u32();
    for (uint32_t i = 0; i < n_checkpoints; ++i) s.checkpoints.push_back(r.u64());
    const uint64_t stored_hash = r.u64();
    if (stored_hash != fnv1a64(cfg_block))
        throw FormatError("config hash mismatch: file corrupted or tampered");

    const uint64_t n_sites = r.u64();
    if (n_sites < 2) throw FormatError("snapshot must contain the two seeds");
    s.positions.resize(n_sites * d);
    s.colors.resize(n_sites);
    s.parents.resize(n_sites);
    bool any_time = false;
    std::vector<double> times(n_sites, kNaN);
    for (uint64_t i = 0; i < n_sites; ++i) {
        const uint64_t id = r.u64();
        if (id != i) throw FormatError("site ids must be dense and ordered");
        const uint64_t arrival = r.u64();
        if (arrival != (i < 2 ? 0 : i - 1)) throw FormatError("arrival index out of order");
        const uint8_t color = r.u8();
        if (color > 1) throw FormatError("bad color byte");
        s.colors[i] = color;
        for (uint32_t a = 0; a < d; ++a) s.positions[i * d + a] = r.f64();
        times[i] = r.f64();
        if (!std::isnan(times[i])) any_time = true;
        const uint64_t parent = r.u64();
        if (i < 2) {
            if (parent != UINT64_MAX) throw FormatError("seed with a parent");
            s.parents[i] = kNoParent;
        } else {
            if (parent >= i) throw FormatError("parent must precede its site");
            s.parents[i] = static_cast<uint32_t>(parent);
        }
    }
    if (any_time) s.arrival_times = std::move(times);
    if (s.config.time_mode == TimeMode::Poisson && !any_time && n_sites > 2)
        throw FormatError("poisson snapshot without arrival times");

    const uint64_t n_segments = r.u64();
    if (s.config.model == Model::Point && n_segments != 0)
        throw FormatError("point-model snapshot with segments");
    s.seg_a.resize(n_segments * d);
    s.seg_b.resize(n_segments * d);
    s.seg_owner.resize(n_segments);
    s.seg_color.resize(n_segments);
    for (uint64_t j = 0; j < n_segments; ++j) {
        const uint64_t owner = r.u64();
        if (owner >= n_sites) throw FormatError("segment owner out of range");
        s.seg_owner[j] = static_cast<uint32_t>(owner);
        const uint8_t color = r.u8();
        if (color > 1) throw FormatError("bad segment color byte");
        s.seg_color[j] = color;
        for (uint32_t a = 0; a < d; ++a) s.seg_a[j * d + a] = r.f64();
        for (uint32_t a = 0; a < d; ++a) s.seg_b[j * d + a] = r.f64();
    }
    if (r.p != r.end) throw FormatError("trailing bytes after snapshot");

    s.stats.arrivals = n_sites - 2;
    // The format carries no stats block; the Poisson clock is recoverable as
    // the last recorded arrival time (the clock stops at the last arrival).
    if (!s.arrival_times.empty()) s.stats.final_clock = s.arrival_times.back();
    return s;
}

Snapshot read_snapshot_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open: " + path);
    return read_snapshot(f);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_sites_csv(const Snapshot& snap, std::ostream& out) {
    const uint32_t d = snap.config.dimension;
    out << "id,arrival_index,color";
    for (uint32_t a = 0; a < d; ++a) out << ",x" << a;
    out << ",arrival_time,parent_id\n";
    for (uint64_t i = 0; i < snap.site_count(); ++i) {
        out << i << ',' << (i < 2 ? 0 : i - 1) << ','
            << color_name(static_cast<Color>(snap.colors[i]));
        const double* pos = snap.position(i);
        for (uint32_t a = 0; a < d; ++a) out << ',' << format_double(pos[a]);
        out << ',';
        if (!snap.arrival_times.empty() && !std::isnan(snap.arrival_times[i]))
            out << format_double(snap.arrival_times[i]);
        out << ',';
        if (snap.parents[i] != kNoParent) out << snap.parents[i];
        out << '\n';
    }
    if (!out) throw FormatError("csv write failed");
}

} // namespace pfro
