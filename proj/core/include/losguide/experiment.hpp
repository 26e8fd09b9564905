#pragma once

#include "losguide/engagement.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace losguide {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of one trial. Depends on the master seed, UAV speed, path, target
/// fraction and trial index; the guidance method is deliberately excluded so
/// that every method meets the same target geometries.
std::uint64_t trial_seed(std::uint64_t master, const ExperimentConfig& cfg, int trial_index);

struct AggregateRow {
  GuidanceMethod method = GuidanceMethod::Tpn;
  PathKind path = PathKind::Straight;
  double uav_speed = 0.0;
  double target_fraction = 0.0;
  int trials = 0;
  int hits = 0;
  int completed = 0;  ///< trials that ended without a simulator crash
  double hit_rate = 0.0;
  std::optional<double> mean_duration;  ///< over hits only
  double completion_rate = 0.0;
  bool unstable = false;
};

AggregateRow aggregate(const ExperimentConfig& cfg, const std::vector<TrialResult>& results);

struct MatrixAxes {
  std::vector<GuidanceMethod> methods{GuidanceMethod::Tpn, GuidanceMethod::PnHeading, GuidanceMethod::Hybrid,
                                      GuidanceMethod::LosTrajectory, GuidanceMethod::ForecastTrajectory};
  std::vector<double> uav_speeds{2.0, 3.0, 4.0, 5.0};
  std::vector<PathKind> paths{PathKind::Straight, PathKind::Figure8, PathKind::Knot};
  std::vector<double> target_fractions{0.25, 0.50, 0.75, 1.00};
};

/// Cartesian product ordered method, path, fraction, speed.
std::vector<ExperimentConfig> build_matrix(const MatrixAxes& axes, const ExperimentConfig& base);

struct MatrixResult {
  std::vector<ExperimentConfig> configs;
  std::vector<std::vector<TrialResult>> trials;  ///< per config, by trial index
  std::vector<AggregateRow> rows;
};

/// Runs every trial of every config on `parallelism` threads. The result does
/// not depend on the thread count.
MatrixResult run_matrix(const std::vector<ExperimentConfig>& configs, int parallelism);

void write_trials_csv(const MatrixResult& r, std::ostream& os);
void write_aggregate_csv(const MatrixResult& r, std::ostream& os);
/// Hit-rate grid for one method and path: rows are target fractions, columns
/// UAV speeds. Cells for configs that were not run stay empty.
void write_heatmap_csv(const MatrixResult& r, GuidanceMethod method, PathKind path, std::ostream& os);
/// Same grid with mean pursuit duration; empty when there were no hits.
void write_duration_csv(const MatrixResult& r, GuidanceMethod method, PathKind path, std::ostream& os);

/// Writes trials.csv, aggregate.csv and the per (method, path) grids into `dir`.
std::vector<std::string> write_matrix_outputs(const MatrixResult& r, const std::string& dir);

}  // namespace losguide
