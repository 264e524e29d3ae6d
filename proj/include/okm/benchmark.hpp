#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "okm/core.hpp"
#include "okm/eval.hpp"
#include "okm/synthetic.hpp"

namespace okm {

enum class Engine { InputSpace, Kernelized };

struct BenchMethod {
  std::string name;
  Engine engine = Engine::InputSpace;
  SolverConfig config;
};

struct MethodReport {
  std::string name;
  Engine engine = Engine::InputSpace;
  KernelSpec kernel;
  std::vector<PrecisionRecallF> per_run;
  PrecisionRecallF mean;
  PrecisionRecallF stddev;  // population convention
  bool psd_warning = false;
};

/// Table-style comparison: `runs` executions per method, where run r draws
/// one initialization from base_seed + r and hands it to every method.
struct RunReport {
  int runs = 0;
  std::uint64_t base_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> init_digests;
  int k = 0;
  std::string dataset;
  std::vector<MethodReport> methods;
};

RunReport run_benchmark(const DataMatrix& X, const LabelSets& truth,
                        const std::vector<BenchMethod>& methods, int runs,
                        std::uint64_t base_seed, const std::string& dataset_desc = "");

/// A ready-to-run bundle: generator spec plus method list.
struct BenchPreset {
  std::string name;
  SyntheticSpec data;
  std::vector<BenchMethod> methods;
  int default_runs = 10;
};

/// Three overlapping Gaussian classes (21/26/17 + 11 dual-labeled) compared
/// across OKM, OKM-K linear, OKM-K poly(0.25), OKM-K rbf(2).
BenchPreset eachmovie_analog_preset();

/// Two concentric rings with a dual-labeled band; OKM vs OKM-K rbf over a
/// small sigma grid.
BenchPreset rings_preset();

}  // namespace okm
