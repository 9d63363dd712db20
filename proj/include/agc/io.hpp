#pragma once

#include <nlohmann/json.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "agc/convolve.hpp"
#include "agc/driver.hpp"
#include "agc/error.hpp"
#include "agc/graph.hpp"
#include "agc/partition.hpp"

namespace agc {

namespace detail {

/// Shortest decimal form that round-trips the double.
inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

}  // namespace detail

/// Feature format: CSV, n rows x d columns of decimal floats, no header.
inline void write_features_csv(std::ostream& out, const FeatureMatrix& x) {
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out << ',';
      out << detail::format_double(x(i, j));
    }
    out << '\n';
  }
}

inline FeatureMatrix read_features_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string tok = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      std::size_t consumed = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &consumed);
      } catch (const std::exception&) {
        throw ParseError("bad number \"" + tok + "\"", lineno);
      }
      if (consumed != tok.size())
        throw ParseError("bad number \"" + tok + "\"", lineno);
      if (!std::isfinite(v))
        throw ParseError("non-finite feature value", lineno);
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("inconsistent column count", lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("feature file is empty");
  FeatureMatrix x(static_cast<Index>(rows.size()),
                  static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return x;
}

/// Label format: one integer per line, n lines.
inline void write_labels(std::ostream& out, const std::vector<int>& labels) {
  for (int l : labels) out << l << '\n';
}

inline std::vector<int> read_labels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t consumed = 0;
    int v = 0;
    try {
      v = std::stoi(line, &consumed);
    } catch (const std::exception&) {
      throw ParseError("bad label \"" + line + "\"", lineno);
    }
    if (consumed != line.size())
      throw ParseError("bad label \"" + line + "\"", lineno);
    labels.push_back(v);
  }
  if (labels.empty()) throw ValidationError("label file is empty");
  return labels;
}

/// Sweep table: TSV with header k, intra, d_intra, acc, nmi, f1. External
/// metric cells are empty when no ground truth was available.
inline void write_sweep_tsv(std::ostream& out,
                            const std::vector<SweepRow>& rows) {
  out << "k\tintra\td_intra\tacc\tnmi\tf1\n";
  for (const auto& r : rows) {
    out << r.k << '\t' << detail::format_double(r.intra) << '\t'
        << detail::format_double(r.d_intra);
    for (const auto& v : {r.acc, r.nmi, r.f1}) {
      out << '\t';
      if (v) out << detail::format_double(*v);
    }
    out << '\n';
  }
}

/// Driver trace as JSON lines, one record per iteration plus a final summary
/// record. Non-finite d_intra (the t = 1 sentinel) serializes as null.
inline void write_trace_jsonl(std::ostream& out, const AgcTrace& trace) {
  char digest[17];
  for (const auto& it : trace.iterations) {
    nlohmann::json j;
    j["t"] = it.t;
    j["k"] = it.t;
    j["intra"] = it.intra;
    if (std::isfinite(it.d_intra))
      j["d_intra"] = it.d_intra;
    else
      j["d_intra"] = nullptr;
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(it.partition_digest));
    j["partition_digest"] = digest;
    out << j.dump() << '\n';
  }
  nlohmann::json summary;
  summary["selected_k"] = trace.selected_k;
  summary["stop_reason"] = to_string(trace.stop_reason);
  out << summary.dump() << '\n';
}

/// Frequency-response samples for plotting: lambda grid over [0, 2], one
/// row per grid point, TSV "lambda p".
inline void write_response_table(std::ostream& out, int k, int samples = 101) {
  if (samples < 2) throw ValidationError("need at least 2 sample points");
  out << "lambda\tp\n";
  for (int i = 0; i < samples; ++i) {
    const double lambda = 2.0 * static_cast<double>(i) / (samples - 1);
    out << detail::format_double(lambda) << '\t'
        << detail::format_double(frequency_response(lambda, k)) << '\n';
  }
}

/// Writes through a temp file and renames into place, so a failed run never
/// leaves a partial output behind.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::function<void(std::ostream&)>& fill) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp." +
                       std::to_string(static_cast<unsigned long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open for writing: " + tmp.string());
    try {
      fill(out);
      out.flush();
    } catch (...) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failed: " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("rename failed: " + path.string());
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open: " + path.string());
  return in;
}

}  // namespace agc
