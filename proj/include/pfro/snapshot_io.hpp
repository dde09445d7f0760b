#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "pfro/model.hpp"

namespace pfro {

// Snapshot container format (little-endian, fixed field order):
//
//   magic "PFRO" | u32 schema_version (= 1)
//   config block:
//     u32 dimension | u8 model | u8 time_mode | u16 zero pad
//     u64 n_points (0 when unset) | f64 t_max (NaN when unset)
//     u64 rng_seed | f64[dim] seed_red | f64[dim] seed_blue
//   u32 checkpoint_count | u64[] checkpoints
//   u64 config_hash   (FNV-1a 64 over the serialized config block bytes)
//   u64 site_count
//     per site: u64 id | u64 arrival_index | u8 color | f64[dim] position
//               | f64 arrival_time (NaN in discrete mode) | u64 parent_id
//               (UINT64_MAX for seeds)
//   u64 segment_count
//     per segment: u64 owner_site | u8 color | f64[dim] a | f64[dim] b
//
// Writing is bit-deterministic: the same snapshot always produces the same
// bytes. read_snapshot validates magic, version, and structural consistency
// and throws FormatError on any mismatch.

void write_snapshot(const Snapshot& snap, std::ostream& out);
void write_snapshot_file(const Snapshot& snap, const std::string& path);
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot_file(const std::string& path);

// FNV-1a 64 over the serialized config block; stamped into snapshots and
// experiment reports so analyses can be matched to the exact configuration
// that produced them.
uint64_t config_hash(const ProcessConfig& cfg);

// Sites as CSV: id,arrival_index,color,x0..x{d-1},arrival_time,parent_id
// (arrival_time empty in discrete mode, parent_id empty for seeds). Doubles
// are printed with %.17g so the text round-trips exactly.
void write_sites_csv(const Snapshot& snap, std::ostream& out);

std::string format_double(double v); // %.17g, shared by every CSV/JSON writer

} // namespace pfro
