#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "jmlab/jm_metric.hpp"
#include "jmlab/types.hpp"

namespace jmlab {

// Shortest string that round-trips the double exactly, capped at 17
// significant digits. All CSV numbers go through this, which is what makes
// rerun outputs byte-identical.
std::string g17(double v);

// CSV with header "param,q0,q1,...", one row per sample.
void write_path_csv(const SampledPath& path, std::ostream& os);
std::string path_csv(const SampledPath& path);
SampledPath read_path_csv(std::istream& is, ParamKind kind);

// JSON summary: sample count, dimension, parameterization kind, energy h0
// and metric length under the given metric.
std::string path_summary_json(const SampledPath& path, const JmMetric& metric);

// Write-to-temporary-then-rename, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& target, const std::string& content);

} // namespace jmlab
