#pragma once

#include <string>
#include <vector>

#include "runbisect/harness.hpp"

namespace runbisect {

enum class RenderFormat { Csv, Table };

// Column order is part of the interface; downstream scripts key on it.
inline constexpr const char* kCsvHeader =
    "function,taylor_terms,interval_a,interval_b,iterations,threads,spawn_mode,"
    "reps,median_ns,normalized_latency,speedup,root,final_a,final_b";

// 17 significant digits: enough for strtod to recover the exact double.
std::string format_real(double v);

std::string spawn_mode_name(SpawnMode mode);
SpawnMode parse_spawn_mode(const std::string& name);  // throws InputDomainError

// CSV: header plus one line per record, in record order.
// Table: the same columns, space-aligned.
std::string render(const std::vector<SweepRecord>& records, RenderFormat format);

// Writes to `path`, or to stdout when path is empty. Throws IoError with the
// path in the message on failure.
void write_text(const std::string& text, const std::string& path);

}  // namespace runbisect
