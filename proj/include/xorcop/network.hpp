#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "xorcop/linalg.hpp"

namespace xorcop {

enum class Activation { Id, Tanh, Sigmoid, Relu };

double activate(Activation f, double t) noexcept;
/// Derivative with respect to the pre-activation. Relu'(0) is 0, matching
/// the step convention u(0) = 0.
double activate_derivative(Activation f, double t) noexcept;

/// Lower-case tag: "id", "tanh", "sigmoid", "relu".
std::string to_string(Activation f);
/// Case-insensitive inverse of to_string; throws LookupError.
Activation parse_activation(const std::string& name);

/// Layer sizes (input first) and one activation per non-input layer.
/// Renders as "2-2-1/inp-tanh-tanh".
class Topology {
public:
  Topology(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  const std::vector<Activation>& activations() const noexcept { return activations_; }

  std::size_t input_size() const noexcept { return sizes_.front(); }
  std::size_t output_size() const noexcept { return sizes_.back(); }
  /// Number of weight layers (sizes - 1).
  std::size_t depth() const noexcept { return activations_.size(); }

  bool all_identity() const noexcept;

  std::string to_string() const;

  friend bool operator==(const Topology&, const Topology&) = default;

private:
  std::vector<std::size_t> sizes_;
  std::vector<Activation> activations_;
};

/// Parses "2-2-1/inp-tanh-tanh". A bare "2-2-1" (no activation part) is
/// accepted by count-only callers through parse_sizes().
/// Throws ParseError for malformed text and ShapeError when the number of
/// activations does not match the number of layers.
Topology parse_spec(const std::string& text);

/// Parses just the "2-4-4-1" size list.
std::vector<std::size_t> parse_sizes(const std::string& text);

/// Weights including biases: sum over layers of n_{l+1} * (n_l + 1).
std::size_t count_weights(const std::vector<std::size_t>& layer_sizes);
std::size_t count_weights(const Topology& topology);

/// Per-layer values retained by a forward pass: pre[l] = W_l [a_{l-1}; 1]
/// and post[l] = f_l(pre[l]), for l = 0 .. depth-1. `input` is a_{-1}.
struct ForwardTrace {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;

  const std::vector<double>& outputs() const { return post.back(); }
  double output() const { return post.back().front(); }
};

/// Feedforward network. weights()[l] has shape
/// layer_sizes[l+1] x (layer_sizes[l] + 1) with the bias in the last column.
class Network {
public:
  Network(Topology topology, std::vector<Matrix> weights);

  /// All-zero weights.
  static Network zeros(const Topology& topology);
  /// Weights drawn uniformly from [-range, range].
  static Network random(const Topology& topology, std::mt19937_64& rng, double range);

  const Topology& topology() const noexcept { return topology_; }
  const std::vector<Matrix>& weights() const noexcept { return weights_; }

  std::size_t weight_count() const noexcept;

  /// Copy with a single weight replaced.
  Network with_weight(std::size_t layer, std::size_t row, std::size_t col, double value) const;

  /// Flattened weights, layer-major then row-major.
  std::vector<double> flat_weights() const;
  /// Copy with all weights replaced from a flat vector (same order).
  Network with_flat_weights(std::span<const double> flat) const;

  friend bool operator==(const Network&, const Network&) = default;

private:
  Topology topology_;
  std::vector<Matrix> weights_;
};

/// Evaluates every layer as f_l(W_l [prev; 1]). Throws ShapeError if the
/// input length differs from the input layer size.
ForwardTrace forward(const Network& net, std::span<const double> input);

/// Single-output convenience wrapper.
double predict(const Network& net, std::span<const double> input);
double predict(const Network& net, double x1, double x2);

/// Partials of (out - target)^2 for every weight, shaped like the weights.
/// Uses reverse accumulation through a stored forward trace.
std::vector<Matrix> gradient(const Network& net, std::span<const double> input, double target);

/// Same, reusing a trace already computed for this input.
std::vector<Matrix> gradient(const Network& net, const ForwardTrace& trace, double target);

/// Folds an all-identity network into the equivalent single layer:
/// A <- A_l A, b <- A_l b + b_l. Throws NotLinearError otherwise.
Network collapse_linear(const Network& net);

/// Model document: {"spec", "seed", "weights": [{"rows","cols","data"}]}.
struct ModelFile {
  Network network;
  std::optional<std::uint64_t> seed;
};

std::string model_to_json(const Network& net, std::optional<std::uint64_t> seed = std::nullopt);
ModelFile model_from_json(const std::string& text);
void save_model(const std::string& path, const Network& net,
                std::optional<std::uint64_t> seed = std::nullopt);
ModelFile load_model(const std::string& path);

}  // namespace xorcop
