#include "okm/benchmark.hpp"

#include <cmath>
#include <sstream>

#include "okm/detail/parallel.hpp"
#include "okm/kernel_solver.hpp"
#include "okm/kernels.hpp"
#include "okm/okm_solver.hpp"

namespace okm {

namespace {

PrecisionRecallF mean_of(const std::vector<PrecisionRecallF>& values) {
  PrecisionRecallF mean;
  for (const auto& v : values) {
    mean.precision += v.precision;
    mean.recall += v.recall;
    mean.f += v.f;
  }
  const double n = static_cast<double>(values.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f /= n;
  return mean;
}

PrecisionRecallF stddev_of(const std::vector<PrecisionRecallF>& values,
                           const PrecisionRecallF& mean) {
  PrecisionRecallF acc;
  for (const auto& v : values) {
    acc.precision += (v.precision - mean.precision) * (v.precision - mean.precision);
    acc.recall += (v.recall - mean.recall) * (v.recall - mean.recall);
    acc.f += (v.f - mean.f) * (v.f - mean.f);
  }
  const double n = static_cast<double>(values.size());
  return {std::sqrt(acc.precision / n), std::sqrt(acc.recall / n), std::sqrt(acc.f / n)};
}

}  // namespace

RunReport run_benchmark(const DataMatrix& X, const LabelSets& truth,
                        const std::vector<BenchMethod>& methods, int runs,
                        std::uint64_t base_seed, const std::string& dataset_desc) {
  if (methods.empty()) throw std::invalid_argument("no methods to benchmark");
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (truth.size() != X.rows()) {
    throw std::invalid_argument("truth and data differ in object count");
  }
  const int k = methods.front().config.k;
  for (const auto& method : methods) {
    if (method.config.k != k) {
      throw std::invalid_argument("all benchmarked methods must share k");
    }
    method.config.validate();
  }

  RunReport report;
  report.runs = runs;
  report.base_seed = base_seed;
  report.k = k;
  report.dataset = dataset_desc;

  // Shared-initialization protocol: one init per run, given to every method.
  std::vector<MembershipMatrix> inits;
  inits.reserve(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(r);
    report.seeds.push_back(seed);
    try {
      inits.push_back(random_singleton_init(X.rows(), k, seed));
    } catch (const EmptyClusterError& err) {
      throw EmptyClusterError(err.cluster(), "drawing the shared init for run " +
                                                 std::to_string(r));
    }
    report.init_digests.push_back(inits.back().digest());
  }

  // Grams are shared across a method's runs.
  std::vector<std::optional<GramMatrix>> grams(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    if (methods[m].engine == Engine::Kernelized) {
      try {
        grams[m].emplace(gram(methods[m].config.kernel, X));
      } catch (const std::domain_error& err) {
        throw std::domain_error(std::string(err.what()) + " (method '" + methods[m].name +
                                "')");
      }
    }
  }

  report.methods.resize(methods.size());
  const std::size_t cells = methods.size() * static_cast<std::size_t>(runs);
  std::vector<PrecisionRecallF> metrics(cells);
  std::vector<std::uint8_t> cell_psd_warning(cells, 0);

  detail::parallel_for(cells, [&](std::size_t cell) {
    const std::size_t m = cell / static_cast<std::size_t>(runs);
    const int r = static_cast<int>(cell % static_cast<std::size_t>(runs));
    const std::string context = "method '" + methods[m].name + "', run " + std::to_string(r);
    try {
      SolverConfig config = methods[m].config;
      config.seed = report.seeds[static_cast<std::size_t>(r)];
      config.init = InitPolicy::ProvidedMembership;
      const std::optional<MembershipMatrix> init = inits[static_cast<std::size_t>(r)];
      const ClusteringResult result = methods[m].engine == Engine::Kernelized
                                          ? solve_kernel(*grams[m], config, init)
                                          : solve(X, config, init);
      metrics[cell] = precision_recall_f(pair_confusion(result.memberships, truth));
      cell_psd_warning[cell] = result.gram_psd.has_value() && !*result.gram_psd ? 1 : 0;
    } catch (const EmptyClusterError& err) {
      throw EmptyClusterError(err.cluster(), context);
    } catch (const std::domain_error& err) {
      throw std::domain_error(std::string(err.what()) + " (" + context + ")");
    } catch (const std::exception& err) {
      throw std::runtime_error(std::string(err.what()) + " (" + context + ")");
    }
  });

  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodReport& entry = report.methods[m];
    entry.name = methods[m].name;
    entry.engine = methods[m].engine;
    entry.kernel = methods[m].config.kernel;
    entry.per_run.assign(metrics.begin() + static_cast<std::ptrdiff_t>(m * runs),
                         metrics.begin() + static_cast<std::ptrdiff_t>((m + 1) * runs));
    entry.mean = mean_of(entry.per_run);
    entry.stddev = stddev_of(entry.per_run, entry.mean);
    for (int r = 0; r < runs; ++r) {
      if (cell_psd_warning[m * static_cast<std::size_t>(runs) + static_cast<std::size_t>(r)]) {
        entry.psd_warning = true;
      }
    }
  }
  return report;
}

BenchPreset eachmovie_analog_preset() {
  BenchPreset preset;
  preset.name = "eachmovie-analog";
  preset.data.mode = SyntheticMode::GaussianBlobs;
  preset.data.class_sizes = {21, 26, 17};
  preset.data.overlap = 11;
  preset.data.dim = 3;
  preset.data.noise = 1.6;
  preset.data.seed = 7;

  SolverConfig base;
  base.k = 3;

  BenchMethod okm{"okm-euclidean", Engine::InputSpace, base};
  BenchMethod linear{"okmk-linear", Engine::Kernelized, base};
  linear.config.kernel = KernelSpec::linear();
  BenchMethod poly{"okmk-poly-0.25", Engine::Kernelized, base};
  poly.config.kernel = KernelSpec::polynomial(0.25);
  BenchMethod rbf{"okmk-rbf-2", Engine::Kernelized, base};
  rbf.config.kernel = KernelSpec::rbf(2.0);

  preset.methods = {okm, linear, poly, rbf};
  return preset;
}

BenchPreset rings_preset() {
  BenchPreset preset;
  preset.name = "rings";
  preset.data.mode = SyntheticMode::ConcentricRings;
  preset.data.class_sizes = {30, 30};
  preset.data.overlap = 10;
  preset.data.dim = 2;
  preset.data.noise = 0.18;
  preset.data.seed = 42;

  SolverConfig base;
  base.k = 2;

  preset.methods.push_back({"okm-euclidean", Engine::InputSpace, base});
  for (const double sigma : {0.5, 1.0, 2.0, 4.0}) {
    std::ostringstream name;
    name << "okmk-rbf-" << sigma;
    BenchMethod method{name.str(), Engine::Kernelized, base};
    method.config.kernel = KernelSpec::rbf(sigma);
    preset.methods.push_back(std::move(method));
  }
  return preset;
}

}  // namespace okm
