#include "xorcop/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "xorcop/copula.hpp"
#include "xorcop/error.hpp"

namespace xorcop {

double sse(const Predictor& predict, const Dataset& data, std::size_t target) {
  if (data.input_arity() != 2) {
    throw ShapeError("two-input predictor applied to '" + data.name() + "' with " +
                     std::to_string(data.input_arity()) + " inputs");
  }
  if (target >= data.target_count()) throw ShapeError("target column out of range");
  double total = 0.0;
  for (const Sample& s : data.samples()) {
    const double e = predict(s.inputs[0], s.inputs[1]) - s.targets[target];
    total += e * e;
  }
  return total;
}

double sse(const Network& net, const Dataset& data, std::size_t target) {
  if (target >= data.target_count()) throw ShapeError("target column out of range");
  double total = 0.0;
  for (const Sample& s : data.samples()) {
    const double e = predict(net, s.inputs) - s.targets[target];
    total += e * e;
  }
  return total;
}

std::string to_string(TrainMode mode) {
  return mode == TrainMode::PerSample ? "per-sample" : "full-batch";
}

TrainMode parse_train_mode(const std::string& text) {
  if (text == "per-sample" || text == "per_sample") return TrainMode::PerSample;
  if (text == "full-batch" || text == "full_batch") return TrainMode::FullBatch;
  throw LookupError("unknown training mode '" + text + "' (known: per-sample, full-batch)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning rate must be positive");
  }
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (max_iters < 1) throw DomainError("max_iters must be at least 1");
  if (!(init_range >= 0.0) || !std::isfinite(init_range)) {
    throw DomainError("init_range must be a finite non-negative bound");
  }
}

namespace {

void apply_step(std::vector<double>& flat, const std::vector<Matrix>& grads, double lr) {
  std::size_t k = 0;
  for (const Matrix& g : grads) {
    for (double v : g.data()) flat[k++] -= lr * v;
  }
}

}  // namespace

TrainResult train(const Topology& topology, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  Network start = Network::random(topology, rng, cfg.init_range);
  return train_from(std::move(start), data, cfg);
}

TrainResult train_from(Network start, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  const Topology& topo = start.topology();
  if (data.input_arity() != topo.input_size()) {
    throw ShapeError("dataset '" + data.name() + "' has " + std::to_string(data.input_arity()) +
                     " inputs but " + topo.to_string() + " expects " +
                     std::to_string(topo.input_size()));
  }
  if (data.target_count() != 1 || topo.output_size() != 1) {
    throw ShapeError("training needs a single target column and a single output; select a "
                     "target of '" + data.name() + "' first");
  }

  // The order stream is separate from the init stream so train_from with a
  // given start is reproducible on its own.
  std::mt19937_64 order_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{start, 0, sse(start, data), false, std::nullopt};
  if (cfg.record_trajectory) result.trajectory.emplace();
  Network net = std::move(start);
  std::vector<double> flat = net.flat_weights();

  if (result.final_sse < cfg.tol) {
    result.converged = true;
    return result;
  }

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    if (cfg.mode == TrainMode::PerSample) {
      std::shuffle(order.begin(), order.end(), order_rng);
      for (std::size_t idx : order) {
        const Sample& s = data.samples()[idx];
        apply_step(flat, gradient(net, s.inputs, s.targets[0]), cfg.learning_rate);
        net = net.with_flat_weights(flat);
      }
    } else {
      std::vector<double> total(flat.size(), 0.0);
      for (const Sample& s : data.samples()) {
        std::size_t k = 0;
        for (const Matrix& g : gradient(net, s.inputs, s.targets[0])) {
          for (double v : g.data()) total[k++] += v;
        }
      }
      for (std::size_t k = 0; k < flat.size(); ++k) flat[k] -= cfg.learning_rate * total[k];
      net = net.with_flat_weights(flat);
    }

    if (!std::all_of(flat.begin(), flat.end(), [](double w) { return std::isfinite(w); })) {
      throw DivergenceError("non-finite weight after epoch " + std::to_string(it), it);
    }
    const double err = sse(net, data);
    if (!std::isfinite(err) || err > kDivergenceThreshold) {
      throw DivergenceError("SSE " + std::to_string(err) + " after epoch " + std::to_string(it) +
                                " exceeds the divergence cap",
                            it);
    }
    if (result.trajectory) result.trajectory->push_back(err);
    result.iterations = it;
    result.final_sse = err;
    if (err < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.final_net = std::move(net);
  return result;
}

std::string to_string(LabelKind kind) {
  switch (kind) {
    case LabelKind::F0:
      return "F0";
    case LabelKind::F1:
      return "F1";
    case LabelKind::Finf:
      return "Finf";
    case LabelKind::Fs:
      return "Fs";
    case LabelKind::StepAbs:
      return "StepAbs";
    case LabelKind::ConstHalf:
      return "ConstHalf";
    case LabelKind::Unclassified:
      return "Unclassified";
  }
  return "Unclassified";
}

std::string FunctionLabel::kind_name() const { return xorcop::to_string(kind); }

std::string FunctionLabel::to_string() const {
  if (kind == LabelKind::Fs && s) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "Fs(%.6g)", *s);
    return buf;
  }
  return kind_name();
}

double step_abs(double x1, double x2) noexcept {
  if ((x1 == 0.0 && x2 == 0.0) || (x1 == 1.0 && x2 == 1.0)) return 0.0;
  return 1.0;
}

namespace {

struct Lattice {
  std::vector<double> axis;
  std::vector<double> values;  // row-major, x1-major
  std::size_t n;

  Lattice(const Predictor& predict, std::size_t grid) : n(grid) {
    if (grid < 2) throw ShapeError("classification grid needs at least 2 points per axis");
    for (std::size_t i = 0; i < grid; ++i) {
      axis.push_back(static_cast<double>(i) / static_cast<double>(grid - 1));
    }
    values.reserve(grid * grid);
    for (double x : axis) {
      for (double y : axis) values.push_back(predict(x, y));
    }
  }

  template <class F>
  double max_deviation(F&& f) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = std::abs(values[i * n + j] - f(axis[i], axis[j]));
        if (!(d <= worst)) worst = d;  // NaN propagates as the worst case
      }
    }
    return worst;
  }

  double step_abs_deviation() const {
    const double h = 1.0 / static_cast<double>(n - 1);
    double worst = 0.0;
    std::size_t compared = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      for (std::size_t j = 1; j + 1 < n; ++j) {
        const double x = axis[i];
        const double y = axis[j];
        const double near_low = std::max(x, y);
        const double near_high = std::max(1.0 - x, 1.0 - y);
        if (near_low <= h + 1e-12 || near_high <= h + 1e-12) continue;
        const double d = std::abs(values[i * n + j] - step_abs(x, y));
        if (!(d <= worst)) worst = d;
        ++compared;
      }
    }
    // Too coarse a lattice leaves nothing to compare against.
    return compared ? worst : std::numeric_limits<double>::infinity();
  }
};

double xor_at(CopulaParam s, double x, double y) {
  return xor_f(s, UnitValue(x), UnitValue(y)).value();
}

}  // namespace

FunctionLabel classify(const Predictor& predict, double tol, std::size_t grid) {
  const Lattice lattice(predict, grid);

  struct Candidate {
    LabelKind kind;
    double deviation;
  };
  const Candidate candidates[] = {
      {LabelKind::F0,
       lattice.max_deviation([](double x, double y) { return xor_at(CopulaParam::zero(), x, y); })},
      {LabelKind::F1,
       lattice.max_deviation([](double x, double y) { return xor_at(CopulaParam::one(), x, y); })},
      {LabelKind::Finf, lattice.max_deviation(
                            [](double x, double y) { return xor_at(CopulaParam::infinity(), x, y); })},
      {LabelKind::ConstHalf, lattice.max_deviation([](double, double) { return 0.5; })},
      {LabelKind::StepAbs, lattice.step_abs_deviation()},
  };
  const Candidate* best = &candidates[0];
  for (const Candidate& c : candidates) {
    if (c.deviation < best->deviation) best = &c;
  }
  if (best->deviation <= tol) return {best->kind, best->deviation, std::nullopt};

  // Max deviation against F_s is not guaranteed unimodal in ln s, so scan
  // coarsely and refine around the best sample by golden-section search.
  auto dev_at = [&](double log_s) {
    const CopulaParam s = CopulaParam::from_value(std::exp(log_s));
    return lattice.max_deviation([&](double x, double y) { return xor_at(s, x, y); });
  };
  const double lo = std::log(CopulaParam::kZeroCutoff);
  const double hi = std::log(CopulaParam::kInfinityCutoff);
  constexpr int kScan = 74;
  const double step = (hi - lo) / kScan;
  double best_log = lo;
  double best_dev = dev_at(lo);
  for (int k = 1; k <= kScan; ++k) {
    const double t = lo + step * k;
    const double d = dev_at(t);
    if (d < best_dev) {
      best_dev = d;
      best_log = t;
    }
  }
  double a = std::max(lo, best_log - step);
  double b = std::min(hi, best_log + step);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = dev_at(c);
  double fd = dev_at(d);
  for (int k = 0; k < 60; ++k) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = dev_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = dev_at(d);
    }
  }
  const double refined = fc < fd ? c : d;
  const double refined_dev = std::min(fc, fd);
  if (refined_dev < best_dev) {
    best_dev = refined_dev;
    best_log = refined;
  }
  if (best_dev <= tol) return {LabelKind::Fs, best_dev, std::exp(best_log)};
  return {LabelKind::Unclassified, std::min(best_dev, best->deviation), std::nullopt};
}

FunctionLabel classify(const Network& net, double tol, std::size_t grid) {
  const Topology& topo = net.topology();
  if (topo.input_size() != 2 || topo.output_size() != 1) {
    throw ShapeError("classify needs a 2-input, 1-output network, got " + topo.to_string());
  }
  return classify([&net](double x, double y) { return predict(net, x, y); }, tol, grid);
}

bool within_copula_envelope(const Predictor& predict, double tol, std::size_t grid) {
  const Lattice lattice(predict, grid);
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const double x = lattice.axis[i];
      const double y = lattice.axis[j];
      const double v = lattice.values[i * grid + j];
      if (!(v >= xor_at(CopulaParam::zero(), x, y) - tol &&
            v <= xor_at(CopulaParam::infinity(), x, y) + tol)) {
        return false;
      }
    }
  }
  return true;
}

SweepReport sweep(const Topology& topology, const Dataset& data, const TrainConfig& cfg,
                  std::size_t restarts, const SweepOptions& options) {
  if (restarts < 1) throw DomainError("a sweep needs at least one restart");
  cfg.validate();

  SweepReport report;
  report.runs.resize(restarts);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(restarts);

  auto worker = [&] {
    for (std::size_t i = next++; i < restarts; i = next++) {
      SweepRun& run = report.runs[i];
      TrainConfig run_cfg = cfg;
      run_cfg.seed = cfg.seed + i;
      run.seed = run_cfg.seed;
      try {
        run.result = train(topology, data, run_cfg);
        if (topology.input_size() == 2 && topology.output_size() == 1) {
          const Network& net = run.result->final_net;
          const Predictor f = [&net](double x, double y) { return predict(net, x, y); };
          run.label = classify(f, options.classify_tol, options.classify_grid);
          if (run.result->converged) {
            run.envelope_flag = !within_copula_envelope(f, options.classify_tol,
                                                        options.classify_grid);
          }
        }
      } catch (const DivergenceError& e) {
        run.diverged = true;
        run.error = e.what();
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  std::size_t threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, restarts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  for (const SweepRun& run : report.runs) {
    if (run.diverged) {
      ++report.diverged;
    } else if (run.result && run.result->converged) {
      ++report.converged;
      ++report.histogram[run.label.kind_name()];
    }
  }
  return report;
}

}  // namespace xorcop
