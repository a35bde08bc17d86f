#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xorcop/datasets.hpp"
#include "xorcop/network.hpp"

namespace xorcop {

/// Two-input scalar function, e.g. a baseline or a trained network.
using Predictor = std::function<double(double, double)>;

/// Sum over samples of (predict(x) - target)^2 for target column `target`.
double sse(const Predictor& predict, const Dataset& data, std::size_t target = 0);
double sse(const Network& net, const Dataset& data, std::size_t target = 0);

enum class TrainMode { PerSample, FullBatch };

std::string to_string(TrainMode mode);
/// Accepts "per-sample"/"per_sample" and "full-batch"/"full_batch".
TrainMode parse_train_mode(const std::string& text);

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t max_iters = 10000;
  double tol = 0.001;
  TrainMode mode = TrainMode::PerSample;
  std::uint64_t seed = 0;
  double init_range = 1.0;
  bool record_trajectory = false;

  /// Throws DomainError when a field is out of range.
  void validate() const;
};

/// SSE above this aborts a run.
inline constexpr double kDivergenceThreshold = 1e6;

struct TrainResult {
  Network final_net;
  /// Completed epochs. One epoch visits every sample once.
  std::size_t iterations = 0;
  double final_sse = 0.0;
  bool converged = false;
  /// SSE after each epoch, when requested.
  std::optional<std::vector<double>> trajectory;
};

/// Gradient descent from uniform random weights drawn with cfg.seed.
/// Per-sample mode reshuffles the visiting order every epoch.
/// Stops once SSE < tol or after max_iters epochs. Throws ShapeError on an
/// arity mismatch and DivergenceError on non-finite weights or SSE > 1e6.
TrainResult train(const Topology& topology, const Dataset& data, const TrainConfig& cfg);

/// Same loop from a caller-supplied starting network. The seed still drives
/// the sample order.
TrainResult train_from(Network start, const Dataset& data, const TrainConfig& cfg);

enum class LabelKind { F0, F1, Finf, Fs, StepAbs, ConstHalf, Unclassified };

struct FunctionLabel {
  LabelKind kind = LabelKind::Unclassified;
  double max_deviation = 0.0;
  /// Fitted parameter for Fs.
  std::optional<double> s;

  /// "F0", "Finf", "Fs(0.193)", ...
  std::string to_string() const;
  /// Histogram key: the label without the fitted parameter.
  std::string kind_name() const;
};

std::string to_string(LabelKind kind);

/// u(|x1 - x2|) in the limit form: 0 at (0,0) and (1,1), 1 elsewhere.
double step_abs(double x1, double x2) noexcept;

inline constexpr double kClassifyTolerance = 0.05;
inline constexpr std::size_t kClassifyGrid = 21;

/// Compares `predict` with F0, F1, Finf, ConstHalf and StepAbs on a
/// grid x grid lattice and returns the closest within `tol`; otherwise fits
/// F_s by a search over ln s; otherwise Unclassified. StepAbs is compared on
/// the open interior only, skipping points within 1/(grid-1) of the two zero
/// corners.
FunctionLabel classify(const Predictor& predict, double tol = kClassifyTolerance,
                       std::size_t grid = kClassifyGrid);

/// Throws ShapeError unless the net maps 2 inputs to 1 output.
FunctionLabel classify(const Network& net, double tol = kClassifyTolerance,
                       std::size_t grid = kClassifyGrid);

/// True when F0 - tol <= out <= Finf + tol on every lattice point.
bool within_copula_envelope(const Predictor& predict, double tol = kClassifyTolerance,
                            std::size_t grid = kClassifyGrid);

struct SweepRun {
  std::uint64_t seed = 0;
  std::optional<TrainResult> result;
  FunctionLabel label;
  bool diverged = false;
  std::string error;
  /// Converged run outside the F0..Finf envelope. Flag only.
  bool envelope_flag = false;
};

struct SweepReport {
  std::vector<SweepRun> runs;
  /// Label counts over converged runs, keyed by kind_name().
  std::map<std::string, std::size_t> histogram;
  std::size_t converged = 0;
  std::size_t diverged = 0;
};

struct SweepOptions {
  double classify_tol = kClassifyTolerance;
  std::size_t classify_grid = kClassifyGrid;
  /// 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

/// Trains with seeds cfg.seed .. cfg.seed + restarts - 1. Runs may execute
/// concurrently; the report is ordered by seed. Diverged runs are recorded.
SweepReport sweep(const Topology& topology, const Dataset& data, const TrainConfig& cfg,
                  std::size_t restarts, const SweepOptions& options = {});

}  // namespace xorcop
