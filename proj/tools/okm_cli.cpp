// Command-line front end: fit / bench / project / gen.
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "okm/benchmark.hpp"
#include "okm/core.hpp"
#include "okm/eval.hpp"
#include "okm/io.hpp"
#include "okm/kernel_solver.hpp"
#include "okm/kernels.hpp"
#include "okm/okm_solver.hpp"
#include "okm/projection.hpp"
#include "okm/synthetic.hpp"

namespace {

using okm::Index;

okm::KernelSpec kernel_from_flags(const std::string& kind, double sigma, double degree,
                                  double offset) {
  if (kind == "linear") return okm::KernelSpec::linear();
  if (kind == "poly") return okm::KernelSpec::polynomial(degree, offset);
  if (kind == "rbf") return okm::KernelSpec::rbf(sigma);
  throw std::invalid_argument("unknown kernel '" + kind + "'");
}

// One line per object, ';'-separated 0-based cluster ids.
okm::MembershipMatrix read_membership_file(const std::string& path, Index n, Index k) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  okm::MembershipMatrix P(n, k);
  std::string line;
  Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (row >= n) throw std::runtime_error(path + ": more rows than objects");
    std::istringstream cells(line);
    std::string token;
    while (std::getline(cells, token, ';')) {
      const long c = std::stol(token);
      if (c < 0 || c >= k) throw std::runtime_error(path + ": cluster id out of range");
      P.set(row, c, true);
    }
    ++row;
  }
  if (row != n) throw std::runtime_error(path + ": expected one row per object");
  return P;
}

std::vector<okm::BenchMethod> read_methods_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const nlohmann::json spec = nlohmann::json::parse(in);
  if (!spec.is_array() || spec.empty()) {
    throw std::invalid_argument(path + ": expected a nonempty JSON array of methods");
  }
  std::vector<okm::BenchMethod> methods;
  for (const auto& entry : spec) {
    okm::BenchMethod method;
    method.name = entry.at("name").get<std::string>();
    const std::string engine = entry.at("engine").get<std::string>();
    if (engine == "okm") {
      method.engine = okm::Engine::InputSpace;
    } else if (engine == "okmk") {
      method.engine = okm::Engine::Kernelized;
    } else {
      throw std::invalid_argument(path + ": engine must be 'okm' or 'okmk'");
    }
    method.config.k = entry.at("k").get<int>();
    if (entry.contains("max_iter")) method.config.max_iter = entry["max_iter"].get<int>();
    if (entry.contains("min_improvement")) {
      method.config.min_improvement = entry["min_improvement"].get<double>();
    }
    if (entry.contains("max_memberships")) {
      method.config.max_memberships = entry["max_memberships"].get<int>();
    }
    if (entry.contains("kernel")) {
      const auto& kernel = entry["kernel"];
      method.config.kernel = kernel_from_flags(
          kernel.at("kind").get<std::string>(),
          kernel.value("sigma", 1.0), kernel.value("degree", 1.0), kernel.value("offset", 1.0));
    }
    methods.push_back(std::move(method));
  }
  return methods;
}

void print_report(const okm::RunReport& report) {
  std::cout << "dataset: " << report.dataset << "\n"
            << "runs: " << report.runs << " (base seed " << report.base_seed << ")\n";
  for (const auto& method : report.methods) {
    std::cout << "  " << method.name << ": precision " << method.mean.precision << " (+-"
              << method.stddev.precision << "), recall " << method.mean.recall << " (+-"
              << method.stddev.recall << "), f " << method.mean.f << " (+-" << method.stddev.f
              << ")";
    if (method.psd_warning) std::cout << "  [psd warning]";
    std::cout << "\n";
  }
}

struct FitOptions {
  std::string input;
  std::string gram_path;
  bool labels = false;
  int k = 2;
  std::string kernel_kind;
  double sigma = 2.0;
  double degree = 0.25;
  double offset = 1.0;
  int max_iter = 100;
  double epsilon = 1e-6;
  std::uint64_t seed = 0;
  std::string init = "random";
  int max_memberships = 0;
  std::string output;
  bool no_timestamp = false;
};

int run_fit(const FitOptions& opt) {
  okm::SolverConfig config;
  config.k = opt.k;
  config.max_iter = opt.max_iter;
  config.min_improvement = opt.epsilon;
  config.seed = opt.seed;
  config.max_memberships = opt.max_memberships;

  std::optional<okm::LoadedCsv> loaded;
  std::optional<okm::GramMatrix> gram_matrix;
  Index n = 0;
  if (opt.input.empty() && opt.gram_path.empty()) {
    throw std::invalid_argument("fit needs --input or --gram");
  }
  if (!opt.gram_path.empty()) {
    gram_matrix = okm::read_gram(opt.gram_path);
    n = gram_matrix->size();
  } else {
    loaded = okm::load_csv(opt.input, opt.labels);
    if (loaded->header_skipped) {
      std::cerr << "notice: skipped non-numeric header row in " << opt.input << "\n";
    }
    n = loaded->features.rows();
  }

  std::optional<okm::MembershipMatrix> init;
  if (opt.init != "random") {
    config.init = okm::InitPolicy::ProvidedMembership;
    init = read_membership_file(opt.init, n, config.k);
  }

  std::string engine;
  okm::ClusteringResult result;
  if (gram_matrix.has_value()) {
    engine = "okmk";
    result = okm::solve_kernel(*gram_matrix, config, init);
  } else if (!opt.kernel_kind.empty()) {
    engine = "okmk";
    config.kernel = kernel_from_flags(opt.kernel_kind, opt.sigma, opt.degree, opt.offset);
    result = okm::solve_kernel(loaded->features, config, init);
  } else {
    engine = "okm";
    result = okm::solve(loaded->features, config, init);
  }

  std::optional<okm::PrecisionRecallF> metrics;
  if (loaded.has_value() && loaded->labels.has_value()) {
    metrics = okm::precision_recall_f(okm::pair_confusion(result.memberships, *loaded->labels));
  }
  if (result.gram_psd.has_value() && !*result.gram_psd) {
    std::cerr << "warning: gram matrix failed psd_check; distances may go negative\n";
  }

  okm::write_result(opt.output, result, engine, metrics, !opt.no_timestamp);

  std::cout << engine << ": " << result.iterations_run << " iteration(s), objective "
            << (result.objective_trace.empty() ? 0.0 : result.objective_trace.back())
            << ", stopped by "
            << (result.converged_by == okm::StopReason::MaxIter ? "max_iter"
                                                                : "improvement_threshold")
            << ", " << result.wall_clock_seconds << " s\n";
  if (metrics.has_value()) {
    std::cout << "precision " << metrics->precision << ", recall " << metrics->recall << ", f "
              << metrics->f << "\n";
  }
  std::cout << "wrote " << opt.output << "\n";
  return 0;
}

struct BenchOptions {
  std::string preset;
  std::string input;
  std::string methods_path;
  int runs = 10;
  std::uint64_t base_seed = 0;
  std::string output;
  bool no_timestamp = false;
};

int run_bench(const BenchOptions& opt) {
  std::optional<okm::DataMatrix> X;
  std::optional<okm::LabelSets> truth;
  std::vector<okm::BenchMethod> methods;
  std::string desc;

  if (!opt.preset.empty()) {
    okm::BenchPreset preset;
    if (opt.preset == "eachmovie-analog") {
      preset = okm::eachmovie_analog_preset();
    } else if (opt.preset == "rings") {
      preset = okm::rings_preset();
    } else {
      throw std::invalid_argument("unknown preset '" + opt.preset + "'");
    }
    auto [data, labels] = okm::gen_synthetic(preset.data);
    X.emplace(std::move(data));
    truth.emplace(std::move(labels));
    methods = preset.methods;
    std::ostringstream out;
    out << preset.name << "(sizes=";
    for (std::size_t i = 0; i < preset.data.class_sizes.size(); ++i) {
      out << (i > 0 ? "," : "") << preset.data.class_sizes[i];
    }
    out << ";overlap=" << preset.data.overlap << ";dim=" << preset.data.dim
        << ";noise=" << preset.data.noise << ";seed=" << preset.data.seed << ")";
    desc = out.str();
  } else {
    if (opt.input.empty() || opt.methods_path.empty()) {
      throw std::invalid_argument("bench needs --preset, or --input plus --methods");
    }
    okm::LoadedCsv loaded = okm::load_csv(opt.input, true);
    X.emplace(std::move(loaded.features));
    truth.emplace(std::move(*loaded.labels));
    methods = read_methods_file(opt.methods_path);
    desc = "csv:" + opt.input;
  }

  const okm::RunReport report =
      okm::run_benchmark(*X, *truth, methods, opt.runs, opt.base_seed, desc);
  okm::write_report(opt.output, report, !opt.no_timestamp);
  print_report(report);
  std::cout << "wrote " << opt.output << "\n";
  return 0;
}

struct ProjectOptions {
  std::string input;
  std::string gram_path;
  bool labels = false;
  std::string method = "pca";
  std::string kernel_kind = "linear";
  double sigma = 2.0;
  double degree = 0.25;
  double offset = 1.0;
  std::string output;
  bool no_timestamp = false;
};

int run_project(const ProjectOptions& opt) {
  okm::Embedding2D embedding;
  if (opt.method == "pca") {
    if (opt.input.empty()) throw std::invalid_argument("pca needs --input");
    embedding = okm::pca_2d(okm::load_csv(opt.input, opt.labels).features);
  } else if (opt.method == "kpca") {
    if (!opt.gram_path.empty()) {
      embedding = okm::kpca_2d(okm::read_gram(opt.gram_path));
    } else if (!opt.input.empty()) {
      const okm::KernelSpec kernel =
          kernel_from_flags(opt.kernel_kind, opt.sigma, opt.degree, opt.offset);
      embedding = okm::kpca_2d(okm::gram(kernel, okm::load_csv(opt.input, opt.labels).features));
    } else {
      throw std::invalid_argument("kpca needs --input or --gram");
    }
  } else {
    throw std::invalid_argument("method must be pca or kpca");
  }
  if (embedding.degenerate) {
    std::cerr << "warning: degenerate embedding (leading eigenvalue is zero)\n";
  }
  okm::write_embedding(opt.output, embedding, !opt.no_timestamp);
  std::cout << "explained: " << embedding.explained(0) << ", " << embedding.explained(1) << "\n"
            << "wrote " << opt.output << "\n";
  return 0;
}

struct GenOptions {
  std::string mode = "blobs";
  std::vector<int> sizes;
  int overlap = 0;
  int dim = 2;
  double noise = 0.5;
  std::uint64_t seed = 0;
  std::string output;
};

int run_gen(const GenOptions& opt) {
  okm::SyntheticSpec spec;
  if (opt.mode == "blobs") {
    spec.mode = okm::SyntheticMode::GaussianBlobs;
  } else if (opt.mode == "rings") {
    spec.mode = okm::SyntheticMode::ConcentricRings;
  } else {
    throw std::invalid_argument("mode must be blobs or rings");
  }
  spec.class_sizes = opt.sizes;
  spec.overlap = opt.overlap;
  spec.dim = opt.dim;
  spec.noise = opt.noise;
  spec.seed = opt.seed;

  const auto [X, labels] = okm::gen_synthetic(spec);
  okm::write_csv(opt.output, X, &labels);
  std::cout << "generated " << X.rows() << " objects in " << X.cols() << " dimensions ("
            << opt.overlap << " dual-labeled)\n"
            << "wrote " << opt.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlapping k-means (OKM) and its kernelized variant (OKM-K)"};
  app.require_subcommand(1);

  FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Cluster a dataset");
  auto* fit_input = fit_cmd->add_option("--input", fit.input, "feature CSV");
  auto* fit_gram = fit_cmd->add_option("--gram", fit.gram_path, "precomputed gram CSV");
  fit_input->excludes(fit_gram);
  fit_gram->excludes(fit_input);
  fit_cmd->add_flag("--labels", fit.labels, "last CSV column holds ';'-separated labels");
  fit_cmd->add_option("--k", fit.k, "cluster count")->required();
  fit_cmd->add_option("--kernel", fit.kernel_kind, "linear|poly|rbf (omit for plain OKM)")
      ->check(CLI::IsMember({"linear", "poly", "rbf"}));
  fit_cmd->add_option("--sigma", fit.sigma, "rbf width");
  fit_cmd->add_option("--degree", fit.degree, "polynomial degree");
  fit_cmd->add_option("--offset", fit.offset, "polynomial offset");
  fit_cmd->add_option("--max-iter", fit.max_iter, "iteration cap");
  fit_cmd->add_option("--epsilon", fit.epsilon, "relative improvement threshold");
  fit_cmd->add_option("--seed", fit.seed, "RNG seed");
  fit_cmd->add_option("--init", fit.init, "'random' or a membership file");
  fit_cmd->add_option("--max-memberships", fit.max_memberships,
                      "cap on clusters per object (0 = unlimited)");
  fit_cmd->add_option("--output", fit.output, "result JSON path")->required();
  fit_cmd->add_flag("--no-timestamp", fit.no_timestamp, "omit the timestamp field");

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Multi-run method comparison");
  bench_cmd->add_option("--preset", bench.preset, "eachmovie-analog|rings");
  bench_cmd->add_option("--input", bench.input, "labeled feature CSV");
  bench_cmd->add_option("--methods", bench.methods_path, "methods JSON file");
  bench_cmd->add_option("--runs", bench.runs, "runs per method");
  bench_cmd->add_option("--base-seed", bench.base_seed, "seed of run 0");
  bench_cmd->add_option("--output", bench.output, "report JSON path")->required();
  bench_cmd->add_flag("--no-timestamp", bench.no_timestamp, "omit the timestamp field");

  ProjectOptions project;
  CLI::App* project_cmd = app.add_subcommand("project", "2-D PCA / kernel-PCA view");
  project_cmd->add_option("--input", project.input, "feature CSV");
  project_cmd->add_option("--gram", project.gram_path, "precomputed gram CSV");
  project_cmd->add_flag("--labels", project.labels,
                        "last CSV column holds labels (dropped before projecting)");
  project_cmd->add_option("--method", project.method, "pca|kpca")
      ->check(CLI::IsMember({"pca", "kpca"}));
  project_cmd->add_option("--kernel", project.kernel_kind, "kernel for kpca from --input")
      ->check(CLI::IsMember({"linear", "poly", "rbf"}));
  project_cmd->add_option("--sigma", project.sigma, "rbf width");
  project_cmd->add_option("--degree", project.degree, "polynomial degree");
  project_cmd->add_option("--offset", project.offset, "polynomial offset");
  project_cmd->add_option("--output", project.output, "embedding JSON path")->required();
  project_cmd->add_flag("--no-timestamp", project.no_timestamp, "omit the timestamp field");

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate overlapping synthetic data");
  gen_cmd->add_option("--mode", gen.mode, "blobs|rings")
      ->check(CLI::IsMember({"blobs", "rings"}));
  gen_cmd->add_option("--sizes", gen.sizes, "per-class core sizes, e.g. 21,26,17")
      ->required()
      ->delimiter(',');
  gen_cmd->add_option("--overlap", gen.overlap, "dual-labeled object count");
  gen_cmd->add_option("--dim", gen.dim, "feature dimension");
  gen_cmd->add_option("--noise", gen.noise, "noise scale");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--output", gen.output, "dataset CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(fit_cmd)) return run_fit(fit);
    if (app.got_subcommand(bench_cmd)) return run_bench(bench);
    if (app.got_subcommand(project_cmd)) return run_project(project);
    if (app.got_subcommand(gen_cmd)) return run_gen(gen);
  } catch (const okm::EmptyClusterError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
