#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ikpca/dataset.hpp"
#include "ikpca/ikpca.hpp"
#include "ikpca/nystrom.hpp"
#include "ikpca/table.hpp"
#include "ikpca/types.hpp"

namespace ikpca {

enum class ExperimentMode { DriftZeroMean, DriftCentered, Nystrom };

struct ExperimentConfig {
  std::string dataset_path;
  DatasetKind kind = DatasetKind::GenericCsv;
  ExperimentMode mode = ExperimentMode::DriftZeroMean;
  Index max_points = 0;  // cap on dataset points used; 0 keeps everything
  int runs = 1;
  std::uint64_t seed = 0;
  double sigma_override = 0;    // > 0 fixes the bandwidth, else median heuristic
  Index heuristic_sample = 1000;  // points fed to the median heuristic
  Index bootstrap = 20;           // batch-decomposed before streaming starts
  std::string output_path;        // empty = don't write a file
};

// Insertion order for one run: 0..n-1 shuffled by a generator seeded with
// seed + run, so every run is reproducible in isolation.
std::vector<Index> shuffled_order(std::uint64_t seed, int run, Index n);

// Bandwidth used by an experiment: the override when positive, otherwise the
// median heuristic over the first min(n, heuristic_sample) points in dataset
// order (before any shuffling).
double resolve_bandwidth(const ExperimentConfig& cfg,
                         const std::vector<Vector<double>>& points);

using DriftObserver =
    std::function<void(int run, const IkpcaState<double>& state)>;
using NystromObserver =
    std::function<void(int run, const NystromState<double>& state)>;

// Streaming drift experiment (zero-mean or centered per cfg.mode).  Each run
// reshuffles the points, batch-decomposes the first cfg.bootstrap of them and
// streams the rest one at a time; a row is recorded after the bootstrap and
// after every accepted point:
//   run,m,frobenius,spectral,trace,orthogonality,excluded
// with the three norms taken of (exact batch matrix - tracked reconstruction)
// and excluded the rejected-point count so far.  After all runs, one mean row
// per m (runs accumulated in ascending run order, divided by the number of
// contributing runs) is appended with run = -1.  The observer, when set, fires
// after every recorded row.
Table run_drift_experiment(const ExperimentConfig& cfg,
                           const std::vector<Vector<double>>& points,
                           const DriftObserver& observer = {});

// Landmark-growth experiment: the base set is the first
// min(n, max_points > 0 ? max_points : 1000) points, each run reshuffles the
// landmark insertion order, seeds with cfg.bootstrap landmarks and grows one
// landmark at a time until every point is a landmark.  Rows
//   run,m,frobenius,spectral,trace
// hold the norms of (full kernel matrix - landmark approximation); mean rows
// with run = -1 are appended as in the drift experiment.
Table run_nystrom_experiment(const ExperimentConfig& cfg,
                             const std::vector<Vector<double>>& points,
                             const NystromObserver& observer = {});

// Load the dataset, dispatch on cfg.mode, and (if output_path is set) write
// the CSV.  Returns the result table.
Table run_experiment(const ExperimentConfig& cfg);

}  // namespace ikpca
