#include "okm/io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

namespace okm {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, begin);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(begin));
      return cells;
    }
    cells.push_back(line.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + temp.string() + " for writing");
    out << content;
    if (!out.good()) throw std::runtime_error("write failed for " + temp.string());
  }
  fs::rename(temp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string_view> non_blank_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  while (begin <= content.size()) {
    std::size_t end = content.find('\n', begin);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) lines.push_back(line);
    if (end == content.size()) break;
    begin = end + 1;
  }
  return lines;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::array<char, 32> buffer{};
  std::strftime(buffer.data(), buffer.size(), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer.data();
}

const char* engine_name(Engine engine) {
  return engine == Engine::Kernelized ? "okmk" : "okm";
}

ordered_json kernel_json(const KernelSpec& kernel) {
  ordered_json j;
  switch (kernel.kind) {
    case KernelKind::Linear:
      j["kind"] = "linear";
      break;
    case KernelKind::Polynomial:
      j["kind"] = "poly";
      j["degree"] = kernel.degree;
      j["offset"] = kernel.offset;
      break;
    case KernelKind::RBF:
      j["kind"] = "rbf";
      j["sigma"] = kernel.sigma;
      break;
  }
  return j;
}

ordered_json config_json(const SolverConfig& config, const std::string& engine) {
  ordered_json j;
  j["engine"] = engine;
  j["k"] = config.k;
  if (engine == "okmk") j["kernel"] = kernel_json(config.kernel);
  j["max_iter"] = config.max_iter;
  j["min_improvement"] = config.min_improvement;
  j["seed"] = config.seed;
  j["init"] = config.init == InitPolicy::RandomSingleton ? "random_singleton" : "provided";
  if (config.max_memberships > 0) j["max_memberships"] = config.max_memberships;
  return j;
}

ordered_json metrics_json(const PrecisionRecallF& metrics) {
  ordered_json j;
  j["precision"] = metrics.precision;
  j["recall"] = metrics.recall;
  j["f"] = metrics.f;
  return j;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buffer.data(), ptr);
}

LoadedCsv load_csv(const fs::path& path, bool last_column_labels) {
  const std::string content = read_file(path);
  std::vector<std::string_view> lines = non_blank_lines(content);
  if (lines.empty()) throw std::runtime_error(path.string() + ": empty file");

  const auto feature_count = [&](const std::vector<std::string_view>& cells) {
    return static_cast<Index>(cells.size()) - (last_column_labels ? 1 : 0);
  };

  // Header probe: a first row with any non-numeric feature cell is skipped.
  bool header_skipped = false;
  {
    const std::vector<std::string_view> cells = split(lines.front(), ',');
    const Index features = feature_count(cells);
    bool numeric = features >= 1;
    for (Index c = 0; c < features && numeric; ++c) {
      double ignored;
      numeric = parse_double(trim(cells[static_cast<std::size_t>(c)]), ignored);
    }
    if (!numeric) {
      header_skipped = true;
      lines.erase(lines.begin());
      if (lines.empty()) throw std::runtime_error(path.string() + ": no data rows");
    }
  }

  const Index d = feature_count(split(lines.front(), ','));
  if (d < 1) throw std::runtime_error(path.string() + ": no feature columns");
  const Index n = static_cast<Index>(lines.size());

  Matrix values(n, d);
  std::vector<std::vector<int>> label_sets;
  std::vector<std::string> label_names;
  std::unordered_map<std::string, int> label_ids;

  for (Index i = 0; i < n; ++i) {
    const std::vector<std::string_view> cells = split(lines[static_cast<std::size_t>(i)], ',');
    if (feature_count(cells) != d) {
      throw std::runtime_error(path.string() + ": ragged row " + std::to_string(i + 1));
    }
    for (Index c = 0; c < d; ++c) {
      double value;
      if (!parse_double(trim(cells[static_cast<std::size_t>(c)]), value)) {
        throw std::runtime_error(path.string() + ": non-numeric cell at row " +
                                 std::to_string(i + 1) + ", column " + std::to_string(c + 1));
      }
      values(i, c) = value;
    }
    if (last_column_labels) {
      std::vector<int> ids;
      for (const std::string_view token : split(cells.back(), ';')) {
        const std::string_view name = trim(token);
        if (name.empty()) continue;
        const auto [it, inserted] =
            label_ids.try_emplace(std::string(name), static_cast<int>(label_names.size()));
        if (inserted) label_names.emplace_back(name);
        ids.push_back(it->second);
      }
      if (ids.empty()) {
        throw std::runtime_error(path.string() + ": empty label set at row " +
                                 std::to_string(i + 1));
      }
      label_sets.push_back(std::move(ids));
    }
  }

  LoadedCsv loaded{DataMatrix(std::move(values)),
                   last_column_labels ? std::optional<LabelSets>(LabelSets(std::move(label_sets)))
                                      : std::nullopt,
                   std::move(label_names), header_skipped};
  return loaded;
}

void write_csv(const fs::path& path, const DataMatrix& X, const LabelSets* labels,
               const std::vector<std::string>* label_names) {
  std::ostringstream out;
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index c = 0; c < X.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(X.values()(i, c));
    }
    if (labels != nullptr) {
      out << ',';
      const std::vector<int>& ids = labels->labels_of(i);
      for (std::size_t t = 0; t < ids.size(); ++t) {
        if (t > 0) out << ';';
        const int id = ids[t];
        if (label_names != nullptr && id >= 0 &&
            static_cast<std::size_t>(id) < label_names->size()) {
          out << (*label_names)[static_cast<std::size_t>(id)];
        } else {
          out << id;
        }
      }
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

void write_gram(const fs::path& path, const GramMatrix& K) {
  std::ostringstream out;
  out << "# gram N=" << K.size() << '\n';
  for (Index i = 0; i < K.size(); ++i) {
    for (Index j = 0; j < K.size(); ++j) {
      if (j > 0) out << ',';
      out << format_double(K(i, j));
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

GramMatrix read_gram(const fs::path& path) {
  const std::string content = read_file(path);
  const std::vector<std::string_view> lines = non_blank_lines(content);
  if (lines.empty()) throw std::runtime_error(path.string() + ": empty gram file");

  constexpr std::string_view kPrefix = "# gram N=";
  const std::string_view header = trim(lines.front());
  if (header.substr(0, kPrefix.size()) != kPrefix) {
    throw std::runtime_error(path.string() + ": missing '# gram N=<n>' header");
  }
  Index n = 0;
  {
    const std::string_view count = header.substr(kPrefix.size());
    const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
    if (ec != std::errc() || ptr != count.data() + count.size() || n < 1) {
      throw std::runtime_error(path.string() + ": bad gram size in header");
    }
  }
  if (static_cast<Index>(lines.size()) != n + 1) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(n) + " gram rows");
  }

  Matrix values(n, n);
  for (Index i = 0; i < n; ++i) {
    const std::vector<std::string_view> cells =
        split(lines[static_cast<std::size_t>(i) + 1], ',');
    if (static_cast<Index>(cells.size()) != n) {
      throw std::runtime_error(path.string() + ": ragged gram row " + std::to_string(i + 1));
    }
    for (Index j = 0; j < n; ++j) {
      double value;
      if (!parse_double(trim(cells[static_cast<std::size_t>(j)]), value)) {
        throw std::runtime_error(path.string() + ": non-numeric gram cell at row " +
                                 std::to_string(i + 1) + ", column " + std::to_string(j + 1));
      }
      values(i, j) = value;
    }
  }
  return GramMatrix::from_symmetric(std::move(values));
}

void write_result(const fs::path& path, const ClusteringResult& result,
                  const std::string& engine, const std::optional<PrecisionRecallF>& metrics,
                  bool with_timestamp) {
  ordered_json j;
  j["config"] = config_json(result.config, engine);
  j["seed"] = result.config.seed;
  ordered_json memberships = ordered_json::array();
  for (Index i = 0; i < result.memberships.rows(); ++i) {
    memberships.push_back(result.memberships.clusters_of(i));
  }
  j["memberships"] = std::move(memberships);
  j["objective_trace"] = result.objective_trace;
  j["iterations_run"] = result.iterations_run;
  j["converged_by"] = result.converged_by == StopReason::MaxIter ? "max_iter"
                                                                 : "improvement_threshold";
  if (metrics.has_value()) j["metrics"] = metrics_json(*metrics);
  j["psd_warning"] = result.gram_psd.has_value() && !*result.gram_psd;
  if (with_timestamp) j["timestamp"] = timestamp_utc();
  atomic_write(path, j.dump(2) + "\n");
}

void write_report(const fs::path& path, const RunReport& report, bool with_timestamp) {
  ordered_json j;
  ordered_json protocol;
  protocol["runs"] = report.runs;
  protocol["base_seed"] = report.base_seed;
  protocol["seeds"] = report.seeds;
  protocol["init_digests"] = report.init_digests;
  protocol["k"] = report.k;
  protocol["dataset"] = report.dataset;
  j["protocol"] = std::move(protocol);

  ordered_json methods = ordered_json::array();
  for (const MethodReport& method : report.methods) {
    ordered_json entry;
    entry["name"] = method.name;
    entry["engine"] = engine_name(method.engine);
    if (method.engine == Engine::Kernelized) entry["kernel"] = kernel_json(method.kernel);
    ordered_json per_run;
    per_run["precision"] = ordered_json::array();
    per_run["recall"] = ordered_json::array();
    per_run["f"] = ordered_json::array();
    for (const PrecisionRecallF& run : method.per_run) {
      per_run["precision"].push_back(run.precision);
      per_run["recall"].push_back(run.recall);
      per_run["f"].push_back(run.f);
    }
    entry["per_run"] = std::move(per_run);
    entry["mean"] = metrics_json(method.mean);
    entry["std"] = metrics_json(method.stddev);
    entry["psd_warning"] = method.psd_warning;
    methods.push_back(std::move(entry));
  }
  j["methods"] = std::move(methods);
  if (with_timestamp) j["timestamp"] = timestamp_utc();
  atomic_write(path, j.dump(2) + "\n");
}

void write_embedding(const fs::path& path, const Embedding2D& embedding, bool with_timestamp) {
  ordered_json j;
  ordered_json coords = ordered_json::array();
  for (Index i = 0; i < embedding.coords.rows(); ++i) {
    coords.push_back({embedding.coords(i, 0), embedding.coords(i, 1)});
  }
  j["coords"] = std::move(coords);
  j["explained"] = {embedding.explained(0), embedding.explained(1)};
  j["degenerate"] = embedding.degenerate;
  if (with_timestamp) j["timestamp"] = timestamp_utc();
  atomic_write(path, j.dump(2) + "\n");
}

Embedding2D read_embedding(const fs::path& path) {
  const ordered_json j = ordered_json::parse(read_file(path));
  const auto& coords = j.at("coords");
  Embedding2D embedding;
  embedding.coords = Matrix::Zero(static_cast<Index>(coords.size()), 2);
  for (Index i = 0; i < embedding.coords.rows(); ++i) {
    embedding.coords(i, 0) = coords[static_cast<std::size_t>(i)].at(0).get<double>();
    embedding.coords(i, 1) = coords[static_cast<std::size_t>(i)].at(1).get<double>();
  }
  embedding.explained(0) = j.at("explained").at(0).get<double>();
  embedding.explained(1) = j.at("explained").at(1).get<double>();
  embedding.degenerate = j.at("degenerate").get<bool>();
  return embedding;
}

}  // namespace okm
