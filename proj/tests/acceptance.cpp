// End-to-end acceptance gate.  Each numbered check prints one PASS/FAIL line;
// the exit status is the number of failures.  argv[1] names the CLI binary,
// argv[2] a scratch directory this program may create and fill.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ikpca/batch_reference.hpp"
#include "ikpca/dataset.hpp"
#include "ikpca/eigen_update.hpp"
#include "ikpca/errors.hpp"
#include "ikpca/ikpca.hpp"
#include "ikpca/kernels.hpp"
#include "ikpca/metrics.hpp"
#include "ikpca/nystrom.hpp"
#include "ikpca/rng.hpp"
#include "ikpca/table.hpp"

using namespace ikpca;

namespace {

std::string g_cli_path;
std::filesystem::path g_work_dir;

double unit_double(Xoshiro256StarStar& rng) {
  return double(rng() >> 11) / double(1ull << 53);
}

Matrix<double> random_symmetric(Xoshiro256StarStar& rng, Index n) {
  Matrix<double> A(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = unit_double(rng) * 2.0 - 1.0;
  return (A + A.transpose()) / 2.0;
}

std::vector<Vector<double>> random_points(Xoshiro256StarStar& rng, Index n,
                                          Index dim) {
  std::vector<Vector<double>> pts;
  for (Index i = 0; i < n; ++i) {
    Vector<double> x(dim);
    for (Index j = 0; j < dim; ++j) x[j] = unit_double(rng) * 2.0 - 1.0;
    pts.push_back(x);
  }
  return pts;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes a plain numeric CSV dataset and returns its points.
std::vector<Vector<double>> write_csv_dataset(const std::filesystem::path& path,
                                              Index n, Index dim,
                                              std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  auto pts = random_points(rng, n, dim);
  std::ofstream out(path, std::ios::binary);
  for (const auto& x : pts) {
    for (Index j = 0; j < dim; ++j)
      out << format_double(x[j]) << (j + 1 < dim ? "," : "\n");
  }
  return pts;
}

// Writes a whitespace-separated file shaped like protein-localization data:
// a name token, eight fractional features, a class label.
void write_yeast_style_dataset(const std::filesystem::path& path, Index n,
                               std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  const char* classes[4] = {"MIT", "NUC", "CYT", "ME3"};
  std::ofstream out(path, std::ios::binary);
  for (Index i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "SYN%04ld_ACC", long(i));
    out << name;
    for (int j = 0; j < 8; ++j) {
      char cell[16];
      std::snprintf(cell, sizeof(cell), "%.2f", unit_double(rng));
      out << "  " << cell;
    }
    out << "  " << classes[i % 4] << "\n";
  }
}

struct StreamOutcome {
  IkpcaState<double> state;
  double worst_drift_rel = 0;      // max over steps of |K - R|_F / |K|_F
  double worst_row_sum_rel = 0;    // centered only: max of |R 1| / |K|_F
  bool completed = false;
};

// Bootstrap the first `bootstrap` points, stream the rest, and compare the
// tracked reconstruction against the exact batch matrix at every step.
StreamOutcome stream_and_measure(const std::vector<Vector<double>>& pts,
                                 CenteringMode mode, Index bootstrap) {
  StreamOutcome out;
  KernelConfig<double> cfg{KernelFamily::Rbf, median_bandwidth(pts)};
  std::vector<Vector<double>> boot(pts.begin(), pts.begin() + bootstrap);
  out.state = mode == CenteringMode::ZeroMean ? init_zero_mean(cfg, boot)
                                              : init_centered(cfg, boot);
  for (std::size_t i = std::size_t(bootstrap); i < pts.size(); ++i) {
    if (!add_point(out.state, pts[i])) continue;
    Matrix<double> K = kernel_matrix(cfg, out.state.points);
    if (mode == CenteringMode::Centered) K = center_kernel_matrix(K);
    const Matrix<double> R = reconstruct(out.state);
    const double scale = std::max(1e-300, K.norm());
    out.worst_drift_rel = std::max(out.worst_drift_rel, (K - R).norm() / scale);
    if (mode == CenteringMode::Centered) {
      const double row_sum =
          (R * Vector<double>::Ones(R.rows())).norm() / scale;
      out.worst_row_sum_rel = std::max(out.worst_row_sum_rel, row_sum);
    }
  }
  out.completed = true;
  return out;
}

int run_cli(const std::string& args) {
  const std::string command = "'" + g_cli_path + "' " + args + " > /dev/null";
  return std::system(command.c_str());
}

// ---------------------------------------------------------------------------

using CheckBody = std::function<std::string()>;  // "" = pass, else detail

int g_failures = 0;

void run_check(int number, const std::string& label, const CheckBody& body) {
  std::string detail;
  try {
    detail = body();
  } catch (const std::exception& err) {
    detail = std::string("exception: ") + err.what();
  }
  if (detail.empty()) {
    std::cout << "PASS criterion " << number << ": " << label << "\n";
  } else {
    std::cout << "FAIL criterion " << number << ": " << label << " — "
              << detail << "\n";
    ++g_failures;
  }
  std::cout.flush();
}

std::string fmt(double v) { return format_double(v); }

// Shared across checks 1 and 2: the trial loop solves each system once.
struct UpdateTrials {
  double worst_reconstruction_rel = 0;
  double worst_bracket_excess = 0;  // positive = a root escaped its bracket
  double elapsed_seconds = 0;
  bool ran = false;
};

UpdateTrials g_trials;

void run_update_trials() {
  const auto start = std::chrono::steady_clock::now();
  Xoshiro256StarStar rng(20260822);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + Index(uniform_below(rng, 49));  // 2..50
    const Matrix<double> A = random_symmetric(rng, n);
    const EigenDecomposition<double> d = batch_eig(A);
    double sigma = 0;
    while (sigma == 0) sigma = unit_double(rng) * 4.0 - 2.0;
    Vector<double> v(n);
    for (Index i = 0; i < n; ++i) v[i] = unit_double(rng) * 2.0 - 1.0;

    const auto updated = rank_one_update(d, RankOnePerturbation<double>{sigma, v});
    const Matrix<double> B = A + sigma * v * v.transpose();
    const double rel =
        (reconstruct_dense(updated) - B).norm() / std::max(1.0, B.norm());
    g_trials.worst_reconstruction_rel =
        std::max(g_trials.worst_reconstruction_rel, rel);

    // root-by-root bracket containment on the deflated subsystem
    const Vector<double> z = project_update(d, v);
    const DeflationSplit split = deflate(z, kDeflationTolRel);
    const Index p = Index(split.active.size());
    if (p == 0) continue;
    Vector<double> da(p), za(p);
    for (Index r = 0; r < p; ++r) {
      da[r] = d.values[split.active[std::size_t(r)]];
      za[r] = z[split.active[std::size_t(r)]];
    }
    const Vector<double> roots = secular_roots(da, sigma, za);
    const double zTz = za.squaredNorm();
    for (Index r = 0; r < p; ++r) {
      const auto [lo, hi] = root_bracket(r, da, sigma, zTz);
      const double slack =
          1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
      const double excess =
          std::max(lo - roots[r], roots[r] - hi) - slack;
      g_trials.worst_bracket_excess =
          std::max(g_trials.worst_bracket_excess, excess);
    }
  }
  g_trials.elapsed_seconds = seconds_since(start);
  g_trials.ran = true;
}

std::string check_1_reconstruction() {
  if (!g_trials.ran) run_update_trials();
  if (g_trials.worst_reconstruction_rel > 1e-8)
    return "worst relative reconstruction error " +
           fmt(g_trials.worst_reconstruction_rel) + " exceeds 1e-8";
  if (g_trials.elapsed_seconds >= 10.0)
    return "trial loop took " + fmt(g_trials.elapsed_seconds) + "s (limit 10s)";
  return "";
}

std::string check_2_brackets() {
  if (!g_trials.ran) run_update_trials();
  if (g_trials.worst_bracket_excess > 0)
    return "a root escaped its bracket by " +
           fmt(g_trials.worst_bracket_excess);
  return "";
}

// Streams shared by checks 3-6.
StreamOutcome g_zero_csv, g_zero_yeast, g_centered_csv, g_centered_yeast;
std::vector<Vector<double>> g_csv_points, g_yeast_points;
double g_stream_seconds_zero = 0, g_stream_seconds_centered = 0;
bool g_streams_ran = false;

void run_streams() {
  const auto csv_path = g_work_dir / "stream_points.csv";
  g_csv_points = write_csv_dataset(csv_path, 300, 5, 424242);
  {
    auto loaded = load_dataset(csv_path.string(), DatasetKind::GenericCsv);
    if (loaded.size() != g_csv_points.size())
      throw std::runtime_error("csv dataset did not load back");
    g_csv_points = loaded;  // exactly what the file-driven path would see
  }
  const auto yeast_path = g_work_dir / "stream_points.yeast";
  write_yeast_style_dataset(yeast_path, 300, 777);
  g_yeast_points = load_dataset(yeast_path.string(), DatasetKind::Yeast);

  auto start = std::chrono::steady_clock::now();
  g_zero_csv = stream_and_measure(g_csv_points, CenteringMode::ZeroMean, 20);
  g_zero_yeast = stream_and_measure(g_yeast_points, CenteringMode::ZeroMean, 20);
  g_stream_seconds_zero = seconds_since(start);

  start = std::chrono::steady_clock::now();
  g_centered_csv = stream_and_measure(g_csv_points, CenteringMode::Centered, 20);
  g_centered_yeast =
      stream_and_measure(g_yeast_points, CenteringMode::Centered, 20);
  g_stream_seconds_centered = seconds_since(start);
  g_streams_ran = true;
}

std::string check_3_zero_mean_streams() {
  if (!g_streams_ran) run_streams();
  const double worst =
      std::max(g_zero_csv.worst_drift_rel, g_zero_yeast.worst_drift_rel);
  if (worst > 1e-7)
    return "worst per-step relative drift " + fmt(worst) + " exceeds 1e-7";
  if (g_stream_seconds_zero >= 60.0)
    return "zero-mean streams took " + fmt(g_stream_seconds_zero) +
           "s (limit 60s)";
  return "";
}

std::string check_4_centered_streams() {
  if (!g_streams_ran) run_streams();
  const double worst = std::max(g_centered_csv.worst_drift_rel,
                                g_centered_yeast.worst_drift_rel);
  if (worst > 1e-6)
    return "worst per-step relative drift " + fmt(worst) + " exceeds 1e-6";
  const double worst_rows = std::max(g_centered_csv.worst_row_sum_rel,
                                     g_centered_yeast.worst_row_sum_rel);
  if (worst_rows > 1e-7)
    return "worst relative row-sum residual " + fmt(worst_rows) +
           " exceeds 1e-7";
  return "";
}

std::string check_5_update_counting() {
  if (!g_streams_ran) run_streams();
  for (const auto* outcome : {&g_zero_csv, &g_zero_yeast}) {
    const auto& s = outcome->state;
    const long accepted = s.size() - s.bootstrap_size;
    if (s.update_count != 2 * accepted)
      return "zero-mean counter " + std::to_string(s.update_count) +
             " != 2 * " + std::to_string(accepted);
  }
  for (const auto* outcome : {&g_centered_csv, &g_centered_yeast}) {
    const auto& s = outcome->state;
    const long accepted = s.size() - s.bootstrap_size;
    if (s.update_count != 4 * accepted)
      return "centered counter " + std::to_string(s.update_count) +
             " != 4 * " + std::to_string(accepted);
  }
  return "";
}

std::string check_6_orthogonality() {
  if (!g_streams_ran) run_streams();
  const double worst = std::max(orthogonality_error(g_centered_csv.state),
                                orthogonality_error(g_centered_yeast.state));
  if (worst > 1e-5)
    return "basis orthogonality error " + fmt(worst) + " exceeds 1e-5";
  return "";
}

// Landmark growth shared by checks 7 and 8.
struct LandmarkOutcome {
  double worst_rel_gap = 0;   // incremental vs from-scratch, every size
  double err_at_seed = 0;     // |K - approx|_F at 20 landmarks
  double err_at_full = 0;     // ... at 200 landmarks
  double full_matrix_norm = 0;
  double elapsed_seconds = 0;
  bool ran = false;
};

LandmarkOutcome g_landmarks;

void run_landmark_growth() {
  const auto start = std::chrono::steady_clock::now();
  Xoshiro256StarStar rng(909090);
  auto pts = random_points(rng, 200, 4);
  KernelConfig<double> cfg{KernelFamily::Rbf, median_bandwidth(pts)};
  const Matrix<double> K = kernel_matrix(cfg, pts);
  g_landmarks.full_matrix_norm = K.norm();

  std::vector<Index> order(200);
  for (Index i = 0; i < 200; ++i) order[std::size_t(i)] = i;
  shuffle(order, rng);

  std::vector<Index> chosen(order.begin(), order.begin() + 20);
  auto state = nystrom_init(cfg, pts, chosen);
  g_landmarks.err_at_seed = (K - approx_kernel(state)).norm();

  for (Index next = 20; next < 200; ++next) {
    if (!add_landmark(state, order[std::size_t(next)]))
      throw std::runtime_error("landmark rejected unexpectedly");
    chosen.push_back(order[std::size_t(next)]);
    const Matrix<double> incremental = approx_kernel(state);
    const Matrix<double> reference = batch_nystrom(cfg, pts, chosen);
    const double rel = (incremental - reference).norm() /
                       std::max(1.0, reference.norm());
    g_landmarks.worst_rel_gap = std::max(g_landmarks.worst_rel_gap, rel);
  }
  g_landmarks.err_at_full = (K - approx_kernel(state)).norm();
  g_landmarks.elapsed_seconds = seconds_since(start);
  g_landmarks.ran = true;
}

std::string check_7_incremental_vs_batch_landmarks() {
  if (!g_landmarks.ran) run_landmark_growth();
  if (g_landmarks.worst_rel_gap > 1e-7)
    return "worst relative gap " + fmt(g_landmarks.worst_rel_gap) +
           " exceeds 1e-7";
  if (g_landmarks.elapsed_seconds >= 120.0)
    return "growth loop took " + fmt(g_landmarks.elapsed_seconds) +
           "s (limit 120s)";
  return "";
}

std::string check_8_full_landmark_recovery() {
  if (!g_landmarks.ran) run_landmark_growth();
  const double rel =
      g_landmarks.err_at_full / std::max(1.0, g_landmarks.full_matrix_norm);
  if (rel > 1e-8)
    return "all-landmark approximation off by " + fmt(rel) + " (limit 1e-8)";
  if (!(g_landmarks.err_at_seed > g_landmarks.err_at_full))
    return "20-landmark error " + fmt(g_landmarks.err_at_seed) +
           " not above the all-landmark error " +
           fmt(g_landmarks.err_at_full);
  return "";
}

std::string check_9_batch_eigensolver() {
  Xoshiro256StarStar rng(515151);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + Index(uniform_below(rng, 99));  // 2..100
    const Matrix<double> A = random_symmetric(rng, n);
    const EigenDecomposition<double> d = batch_eig(A);
    const double recon_rel =
        (reconstruct_dense(d) - A).norm() / std::max(1.0, A.norm());
    if (recon_rel > 1e-10)
      return "trial " + std::to_string(trial) + ": reconstruction off by " +
             fmt(recon_rel);
    const double orth = (d.vectors.transpose() * d.vectors -
                         Matrix<double>::Identity(n, n))
                            .norm();
    if (orth > 1e-10)
      return "trial " + std::to_string(trial) + ": orthogonality off by " +
             fmt(orth);
    for (Index i = 0; i + 1 < n; ++i)
      if (d.values[i] > d.values[i + 1])
        return "trial " + std::to_string(trial) + ": values not ascending";
  }
  return "";
}

std::string check_10_cli_round_trip() {
  const auto data_path = g_work_dir / "cli_points.csv";
  write_csv_dataset(data_path, 40, 3, 121212);
  const auto out1 = g_work_dir / "cli_run1.csv";
  const auto out2 = g_work_dir / "cli_run2.csv";
  const std::string base_args = "--dataset '" + data_path.string() +
                                "' --kind csv --mode drift-centered "
                                "--max-points 30 --runs 2 --seed 5 --out '";
  if (run_cli(base_args + out1.string() + "'") != 0)
    return "first CLI invocation failed";
  if (run_cli(base_args + out2.string() + "'") != 0)
    return "second CLI invocation failed";
  const std::string bytes1 = read_file(out1);
  if (bytes1.empty()) return "CLI produced an empty table";
  if (bytes1 != read_file(out2))
    return "two identically seeded runs produced different bytes";

  const Table parsed = read_csv(out1.string());
  const auto rewritten = g_work_dir / "cli_rewritten.csv";
  write_csv(parsed, rewritten.string());
  if (bytes1 != read_file(rewritten))
    return "CSV did not round-trip byte for byte";

  const Vector<double> magic = parse_magic_row(
      "28.7967,16.0021,2.6449,0.047,0.2256,0.1825,27.7004,22.011,-8.2027,"
      "40.092,g",
      1);
  if (magic.size() != 10)
    return "magic sample row parsed to " + std::to_string(magic.size()) +
           " features";
  const Vector<double> yeast = parse_yeast_row(
      "ADT1_YEAST  0.58  0.61  0.47  0.13  0.50  0.00  0.48  0.22  MIT", 1);
  if (yeast.size() != 8)
    return "yeast sample row parsed to " + std::to_string(yeast.size()) +
           " features";
  return "";
}

std::string check_11_duplicate_streams() {
  Xoshiro256StarStar rng(606060);
  auto base = random_points(rng, 20, 3);
  std::vector<Vector<double>> pts;
  for (int copy = 0; copy < 3; ++copy)
    for (const auto& x : base) pts.push_back(x);
  shuffle(pts, rng);

  for (CenteringMode mode : {CenteringMode::ZeroMean, CenteringMode::Centered}) {
    KernelConfig<double> cfg{KernelFamily::Rbf, median_bandwidth(pts)};
    IkpcaState<double> state;
    std::size_t streamed_from = 0;
    if (mode == CenteringMode::ZeroMean) {
      state = init_zero_mean(cfg, pts[0]);
      streamed_from = 1;
    } else {
      std::vector<Vector<double>> boot(pts.begin(), pts.begin() + 5);
      state = init_centered(cfg, boot);
      streamed_from = 5;
    }
    for (std::size_t i = streamed_from; i < pts.size(); ++i)
      add_point(state, pts[i]);  // exclusions allowed, throwing is not

    if (state.next_stream_index != long(pts.size()))
      return "stream did not run to completion";
    Matrix<double> K = kernel_matrix(cfg, state.points);
    if (mode == CenteringMode::Centered) K = center_kernel_matrix(K);
    const double rel =
        (K - reconstruct(state)).norm() / std::max(1.0, K.norm());
    if (rel > 1e-6)
      return std::string(mode == CenteringMode::ZeroMean ? "zero-mean"
                                                         : "centered") +
             " duplicate stream drifted by " + fmt(rel);
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cli-binary> <work-dir>\n";
    return 2;
  }
  g_cli_path = argv[1];
  g_work_dir = argv[2];
  std::filesystem::create_directories(g_work_dir);

  run_check(1, "rank-one updates reconstruct 200 random systems to 1e-8",
            check_1_reconstruction);
  run_check(2, "every secular root stays inside its closed bracket",
            check_2_brackets);
  run_check(3, "zero-mean streams track the batch matrix to 1e-7 per step",
            check_3_zero_mean_streams);
  run_check(4, "centered streams track the centered matrix to 1e-6 per step",
            check_4_centered_streams);
  run_check(5, "accepted points cost exactly two / four updates",
            check_5_update_counting);
  run_check(6, "centered basis stays orthogonal to 1e-5 over 300 points",
            check_6_orthogonality);
  run_check(7, "incremental landmark growth matches from-scratch builds",
            check_7_incremental_vs_batch_landmarks);
  run_check(8, "all-landmark approximation recovers the kernel matrix",
            check_8_full_landmark_recovery);
  run_check(9, "batch eigensolver self-test on 100 random matrices",
            check_9_batch_eigensolver);
  run_check(10, "CLI runs are byte-deterministic and tables round-trip",
            check_10_cli_round_trip);
  run_check(11, "duplicate-heavy streams finish and stay accurate",
            check_11_duplicate_streams);

  if (g_failures == 0) {
    std::cout << "all criteria passed\n";
  } else {
    std::cout << g_failures << " criteria failed\n";
  }
  return g_failures;
}
