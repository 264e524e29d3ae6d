#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "okm/benchmark.hpp"
#include "okm/core.hpp"
#include "okm/eval.hpp"
#include "okm/kernels.hpp"
#include "okm/projection.hpp"

namespace okm {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

struct LoadedCsv {
  DataMatrix features;
  std::optional<LabelSets> labels;
  std::vector<std::string> label_names;  // id -> original token
  bool header_skipped = false;
};

/// Comma-separated numeric features, '.' decimal point, optional
/// ';'-separated multi-label last column. A non-numeric first row is treated
/// as a header and skipped (header_skipped reports it). Errors carry the
/// offending row/column.
LoadedCsv load_csv(const std::filesystem::path& path, bool last_column_labels);

/// Counterpart of load_csv; loading what this writes reproduces the features
/// bit-exactly.
void write_csv(const std::filesystem::path& path, const DataMatrix& X,
               const LabelSets* labels = nullptr,
               const std::vector<std::string>* label_names = nullptr);

/// Dense symmetric CSV with a "# gram N=<n>" header line.
void write_gram(const std::filesystem::path& path, const GramMatrix& K);
GramMatrix read_gram(const std::filesystem::path& path);

/// Structured-text (JSON) result file with fields {config, seed,
/// memberships as per-object cluster-id lists, objective_trace,
/// iterations_run, converged_by, metrics, psd_warning}. Byte-identical
/// across identical runs when with_timestamp is false.
void write_result(const std::filesystem::path& path, const ClusteringResult& result,
                  const std::string& engine,
                  const std::optional<PrecisionRecallF>& metrics = std::nullopt,
                  bool with_timestamp = true);

void write_report(const std::filesystem::path& path, const RunReport& report,
                  bool with_timestamp = true);

void write_embedding(const std::filesystem::path& path, const Embedding2D& embedding,
                     bool with_timestamp = true);
Embedding2D read_embedding(const std::filesystem::path& path);

}  // namespace okm
