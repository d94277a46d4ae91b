#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "ikpca/errors.hpp"
#include "ikpca/experiment.hpp"

namespace {

// 0 success; 1 bad configuration, unreadable input, or write failure;
// 2 numerical breakdown inside the solver.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming kernel PCA drift and landmark-approximation runner"};

  ikpca::ExperimentConfig cfg;
  long long max_points = 0;
  long long heuristic_sample = 1000;
  std::uint64_t seed = 0;
  double sigma = 0;

  const std::map<std::string, ikpca::DatasetKind> kinds{
      {"magic", ikpca::DatasetKind::Magic},
      {"yeast", ikpca::DatasetKind::Yeast},
      {"csv", ikpca::DatasetKind::GenericCsv}};
  const std::map<std::string, ikpca::ExperimentMode> modes{
      {"drift-zero", ikpca::ExperimentMode::DriftZeroMean},
      {"drift-centered", ikpca::ExperimentMode::DriftCentered},
      {"nystrom", ikpca::ExperimentMode::Nystrom}};

  app.add_option("--dataset", cfg.dataset_path, "Input dataset file")
      ->required();
  app.add_option("--kind", cfg.kind, "Dataset layout: magic, yeast, or csv")
      ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
  app.add_option("--mode", cfg.mode,
                 "Experiment: drift-zero, drift-centered, or nystrom")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  app.add_option("--max-points", max_points,
                 "Cap on dataset points used (0 keeps everything)");
  app.add_option("--runs", cfg.runs, "Independent shuffled runs");
  app.add_option("--seed", seed, "Base seed; run r uses seed + r");
  app.add_option("--sigma", sigma,
                 "RBF bandwidth; <= 0 selects the median heuristic");
  app.add_option("--heuristic-sample", heuristic_sample,
                 "Points fed to the median heuristic");
  app.add_option("--out", cfg.output_path, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  cfg.max_points = static_cast<ikpca::Index>(max_points);
  cfg.heuristic_sample = static_cast<ikpca::Index>(heuristic_sample);
  cfg.seed = seed;
  cfg.sigma_override = sigma;

  try {
    const ikpca::Table table = ikpca::run_experiment(cfg);
    std::cout << "rows: " << table.rows.size();
    if (!cfg.output_path.empty()) std::cout << "  -> " << cfg.output_path;
    std::cout << '\n';
    return kExitOk;
  } catch (const ikpca::NumericalError& err) {
    std::cerr << "numerical error: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const ikpca::ParseError& err) {
    std::cerr << "parse error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  }
}
