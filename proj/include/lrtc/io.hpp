#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrtc/eval.hpp"
#include "lrtc/tensor.hpp"

namespace lrtc {

/// Binary tensor format: magic "TSR3", u32 little-endian version = 1,
/// three u64 little-endian extents, then row-major IEEE-754 doubles in
/// little-endian byte order. Masks use magic "MSK3" and one byte per
/// entry, each 0 or 1. Round trips are bit-exact.
void write_tensor(const std::string& path, const Tensor3& t);
Tensor3 read_tensor(const std::string& path);
void write_mask(const std::string& path, const MaskTensor& m);
MaskTensor read_mask(const std::string& path);

/// Long-format CSV ingestion. The file starts with an
/// `interval,location,day,value` header (comment lines beginning with `#`
/// may precede it); each data row holds zero-based indices and a value,
/// where an empty value field means natively missing. Dims come from the
/// argument or from a `# dims=n1,n2,n3` comment; absent cells yield mask 0
/// and tensor entry 0. Out-of-range indices, duplicate keys, and
/// unparseable fields are rejected with the offending line number.
std::pair<Tensor3, MaskTensor> ingest_csv(const std::string& path,
                                          std::optional<Dims> dims = std::nullopt);

/// Serializes a report as a key=value text record, one field per line,
/// with wall_time_seconds on its own line so determinism checks can drop
/// it. A path ending in ".json" switches to the structured JSON variant
/// carrying the same fields.
void write_report(const std::string& path, const ImputationReport& rep);

/// Reduced report for standalone scoring: just the accuracy fields plus
/// the wall time, in the same key=value (or .json) encoding.
void write_score_report(const std::string& path, const ScoreStats& stats,
                        double wall_time_seconds);

/// A sweep configuration file: flat key=value lines (comments start with
/// `#`). `data` and optional `native_mask` name the input files; list
/// values are comma-separated.
struct SweepFileConfig {
    std::string data_path;
    std::string native_mask_path;  // empty means fully observed
    SweepGrid grid;
};

SweepFileConfig parse_sweep_config(const std::string& path);

/// Writes sweep rows as CSV with a fixed header. Failed rows keep their
/// coordinates and carry the error text in the last column.
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace lrtc
