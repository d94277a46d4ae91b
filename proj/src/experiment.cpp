#include "ikpca/experiment.hpp"

#include <map>
#include <stdexcept>

#include "ikpca/kernels.hpp"
#include "ikpca/metrics.hpp"
#include "ikpca/rng.hpp"

namespace ikpca {
namespace {

void check_common(const ExperimentConfig& cfg, Index available) {
  if (cfg.runs < 1)
    throw std::invalid_argument("experiment: runs must be at least 1");
  if (cfg.bootstrap < 2)
    throw std::invalid_argument("experiment: bootstrap must be at least 2");
  if (cfg.max_points < 0)
    throw std::invalid_argument("experiment: max_points must be non-negative");
  if (cfg.heuristic_sample < 2)
    throw std::invalid_argument(
        "experiment: heuristic_sample must be at least 2");
  if (available < cfg.bootstrap)
    throw std::invalid_argument(
        "experiment: dataset smaller than the bootstrap size");
}

std::vector<Vector<double>> take_front(const std::vector<Vector<double>>& points,
                                       Index count) {
  return std::vector<Vector<double>>(points.begin(),
                                     points.begin() + static_cast<std::ptrdiff_t>(count));
}

// One mean row per m, run = -1.  Accumulation walks the stored rows in order
// (run-major, so per m the terms arrive in ascending run order) making the
// result reproducible bit for bit from the per-run rows.
void append_mean_rows(Table& table) {
  struct Accum {
    std::vector<double> sums;
    double count = 0;
  };
  std::map<double, Accum> by_m;
  for (const std::vector<double>& row : table.rows) {
    Accum& acc = by_m[row[1]];
    if (acc.sums.empty()) acc.sums.assign(row.size() - 2, 0.0);
    for (std::size_t c = 2; c < row.size(); ++c) acc.sums[c - 2] += row[c];
    acc.count += 1;
  }
  for (const auto& [m, acc] : by_m) {
    std::vector<double> row;
    row.reserve(acc.sums.size() + 2);
    row.push_back(-1.0);
    row.push_back(m);
    for (double sum : acc.sums) row.push_back(sum / acc.count);
    table.rows.push_back(std::move(row));
  }
}

}  // namespace

std::vector<Index> shuffled_order(std::uint64_t seed, int run, Index n) {
  if (n < 0) throw std::invalid_argument("shuffled_order: negative size");
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Xoshiro256StarStar rng(seed + static_cast<std::uint64_t>(run));
  shuffle(order, rng);
  return order;
}

double resolve_bandwidth(const ExperimentConfig& cfg,
                         const std::vector<Vector<double>>& points) {
  if (cfg.sigma_override > 0) return cfg.sigma_override;
  const Index n = static_cast<Index>(points.size());
  const Index sample = std::min(n, cfg.heuristic_sample);
  return median_bandwidth(take_front(points, sample));
}

Table run_drift_experiment(const ExperimentConfig& cfg,
                           const std::vector<Vector<double>>& points,
                           const DriftObserver& observer) {
  const Index available = static_cast<Index>(points.size());
  check_common(cfg, available);
  const Index n =
      cfg.max_points > 0 ? std::min(cfg.max_points, available) : available;
  if (n < cfg.bootstrap)
    throw std::invalid_argument(
        "experiment: max_points smaller than the bootstrap size");
  const std::vector<Vector<double>> base = take_front(points, n);
  const KernelConfig<double> kernel{KernelFamily::Rbf,
                                    resolve_bandwidth(cfg, base)};

  Table table;
  table.header = {"run",   "m",             "frobenius", "spectral",
                  "trace", "orthogonality", "excluded"};

  const bool centered = cfg.mode == ExperimentMode::DriftCentered;
  if (cfg.mode == ExperimentMode::Nystrom)
    throw std::invalid_argument(
        "run_drift_experiment: config selects the landmark experiment");

  for (int run = 0; run < cfg.runs; ++run) {
    const std::vector<Index> order = shuffled_order(cfg.seed, run, n);
    std::vector<Vector<double>> stream;
    stream.reserve(static_cast<std::size_t>(n));
    for (Index idx : order)
      stream.push_back(base[static_cast<std::size_t>(idx)]);

    std::vector<Vector<double>> boot(
        stream.begin(), stream.begin() + static_cast<std::ptrdiff_t>(cfg.bootstrap));
    IkpcaState<double> state = centered ? init_centered(kernel, boot)
                                        : init_zero_mean(kernel, boot);

    const auto record = [&]() {
      const NormTriple<double> drift = drift_report(state, kernel);
      table.rows.push_back({static_cast<double>(run),
                            static_cast<double>(state.size()), drift.frobenius,
                            drift.spectral, drift.trace,
                            orthogonality_error(state),
                            static_cast<double>(state.excluded.size())});
      if (observer) observer(run, state);
    };
    record();
    for (Index i = cfg.bootstrap; i < n; ++i) {
      if (add_point(state, stream[static_cast<std::size_t>(i)])) record();
    }
  }
  append_mean_rows(table);
  return table;
}

Table run_nystrom_experiment(const ExperimentConfig& cfg,
                             const std::vector<Vector<double>>& points,
                             const NystromObserver& observer) {
  const Index available = static_cast<Index>(points.size());
  check_common(cfg, available);
  const Index cap = cfg.max_points > 0 ? cfg.max_points : Index(1000);
  const Index n = std::min(cap, available);
  if (n < cfg.bootstrap)
    throw std::invalid_argument(
        "experiment: max_points smaller than the bootstrap size");
  const std::vector<Vector<double>> base = take_front(points, n);
  const KernelConfig<double> kernel{KernelFamily::Rbf,
                                    resolve_bandwidth(cfg, base)};
  const Matrix<double> K_full = kernel_matrix(kernel, base);

  Table table;
  table.header = {"run", "m", "frobenius", "spectral", "trace"};

  for (int run = 0; run < cfg.runs; ++run) {
    const std::vector<Index> order = shuffled_order(cfg.seed, run, n);
    std::vector<Index> seed_indices(
        order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.bootstrap));
    NystromState<double> state = nystrom_init(kernel, base, seed_indices);

    const auto record = [&]() {
      const NormTriple<double> err = nystrom_error(state, K_full);
      table.rows.push_back({static_cast<double>(run),
                            static_cast<double>(state.m()), err.frobenius,
                            err.spectral, err.trace});
      if (observer) observer(run, state);
    };
    record();
    for (Index i = cfg.bootstrap; i < n; ++i) {
      if (add_landmark(state, order[static_cast<std::size_t>(i)])) record();
    }
  }
  append_mean_rows(table);
  return table;
}

Table run_experiment(const ExperimentConfig& cfg) {
  const std::vector<Vector<double>> points =
      load_dataset(cfg.dataset_path, cfg.kind);
  Table table = cfg.mode == ExperimentMode::Nystrom
                    ? run_nystrom_experiment(cfg, points)
                    : run_drift_experiment(cfg, points);
  if (!cfg.output_path.empty()) write_csv(table, cfg.output_path);
  return table;
}

}  // namespace ikpca
