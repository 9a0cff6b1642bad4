#include "runbisect/render.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "runbisect/errors.hpp"

namespace runbisect {

namespace {

constexpr std::size_t kColumns = 14;

std::vector<std::string> record_fields(const SweepRecord& r) {
  return {function_name(r.fn),
          std::to_string(r.fn.taylor.terms),
          format_real(r.interval.a()),
          format_real(r.interval.b()),
          std::to_string(r.iterations),
          std::to_string(r.threads),
          spawn_mode_name(r.spawn_mode),
          std::to_string(r.measurement.repetitions),
          format_real(r.measurement.median_ns),
          format_real(r.normalized_latency),
          format_real(r.speedup),
          format_real(r.digest.root),
          format_real(r.digest.final_a),
          format_real(r.digest.final_b)};
}

std::vector<std::string> header_fields() {
  std::vector<std::string> out;
  std::string field;
  for (const char* p = kCsvHeader; *p != '\0'; ++p) {
    if (*p == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(*p);
    }
  }
  out.push_back(field);
  return out;
}

std::string join(const std::vector<std::string>& fields, char sep) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line.push_back(sep);
    line += fields[i];
  }
  return line;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string spawn_mode_name(SpawnMode mode) {
  return mode == SpawnMode::PersistentPool ? "persistent" : "per-round";
}

SpawnMode parse_spawn_mode(const std::string& name) {
  if (name == "persistent") return SpawnMode::PersistentPool;
  if (name == "per-round") return SpawnMode::SpawnPerRound;
  throw InputDomainError("unknown spawn mode '" + name +
                         "'; expected 'persistent' or 'per-round'");
}

std::string render(const std::vector<SweepRecord>& records, RenderFormat format) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size() + 1);
  rows.push_back(header_fields());
  for (const SweepRecord& r : records) rows.push_back(record_fields(r));
  for (const auto& row : rows) {
    if (row.size() != kColumns) {
      throw InvariantViolation("render row has " + std::to_string(row.size()) +
                               " fields, expected " + std::to_string(kColumns));
    }
  }

  std::string out;
  if (format == RenderFormat::Csv) {
    for (const auto& row : rows) {
      out += join(row, ',');
      out.push_back('\n');
    }
    return out;
  }

  std::vector<std::size_t> width(kColumns, 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < kColumns; ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < kColumns; ++c) {
      if (c > 0) line += "  ";
      line += row[c];
      if (c + 1 < kColumns) {
        line.append(width[c] - row[c].size(), ' ');
      }
    }
    out += line;
    out.push_back('\n');
  }
  return out;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  file.flush();
  if (!file) throw IoError("failed writing to '" + path + "'");
}

}  // namespace runbisect
