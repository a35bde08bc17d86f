#include "xorcop/network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "xorcop/error.hpp"

namespace xorcop {

double activate(Activation f, double t) noexcept {
  switch (f) {
    case Activation::Id:
      return t;
    case Activation::Tanh:
      return std::tanh(t);
    case Activation::Sigmoid:
      return 1.0 / (1.0 + std::exp(-t));
    case Activation::Relu:
      return t > 0.0 ? t : 0.0;
  }
  return t;
}

double activate_derivative(Activation f, double t) noexcept {
  switch (f) {
    case Activation::Id:
      return 1.0;
    case Activation::Tanh: {
      const double th = std::tanh(t);
      return 1.0 - th * th;
    }
    case Activation::Sigmoid: {
      const double sg = 1.0 / (1.0 + std::exp(-t));
      return sg * (1.0 - sg);
    }
    case Activation::Relu:
      return t > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

std::string to_string(Activation f) {
  switch (f) {
    case Activation::Id:
      return "id";
    case Activation::Tanh:
      return "tanh";
    case Activation::Sigmoid:
      return "sigmoid";
    case Activation::Relu:
      return "relu";
  }
  return "id";
}

Activation parse_activation(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "id") return Activation::Id;
  if (lower == "tanh") return Activation::Tanh;
  if (lower == "sigmoid") return Activation::Sigmoid;
  if (lower == "relu") return Activation::Relu;
  throw LookupError("unknown activation '" + name + "' (known: id, tanh, sigmoid, relu)");
}

Topology::Topology(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations)
    : sizes_(std::move(layer_sizes)), activations_(std::move(activations)) {
  if (sizes_.size() < 2) throw ShapeError("a topology needs at least an input and an output layer");
  for (std::size_t n : sizes_) {
    if (n == 0) throw ShapeError("layer sizes must be positive");
  }
  if (activations_.size() != sizes_.size() - 1) {
    throw ShapeError("topology with " + std::to_string(sizes_.size()) + " layers needs " +
                     std::to_string(sizes_.size() - 1) + " activations, got " +
                     std::to_string(activations_.size()));
  }
}

bool Topology::all_identity() const noexcept {
  return std::all_of(activations_.begin(), activations_.end(),
                     [](Activation a) { return a == Activation::Id; });
}

std::string Topology::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(sizes_[i]);
  }
  out += "/inp";
  for (Activation a : activations_) out += "-" + xorcop::to_string(a);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = text.find(sep, start);
    parts.push_back(text.substr(start, at == std::string::npos ? std::string::npos : at - start));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  return parts;
}

}  // namespace

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::size_t offset = 0;
  for (const std::string& part : split(text, '-')) {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), n);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || n == 0) {
      throw ParseError("malformed layer size '" + part + "' at offset " + std::to_string(offset) +
                           " in '" + text + "'",
                       offset, {"positive integer"});
    }
    sizes.push_back(n);
    offset += part.size() + 1;
  }
  if (sizes.size() < 2) {
    throw ParseError("topology '" + text + "' needs at least two layer sizes", text.size(), {"-"});
  }
  return sizes;
}

Topology parse_spec(const std::string& text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string::npos) {
    throw ParseError("topology spec '" + text + "' is missing the '/inp-...' activation part",
                     text.size(), {"/"});
  }
  std::vector<std::size_t> sizes = parse_sizes(text.substr(0, slash));
  const std::vector<std::string> tags = split(text.substr(slash + 1), '-');
  std::string head = tags.front();
  std::transform(head.begin(), head.end(), head.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (head != "inp") {
    throw ParseError("activation part must start with 'inp', got '" + tags.front() + "'", slash + 1,
                     {"inp"});
  }
  std::vector<Activation> acts;
  std::size_t offset = slash + 1 + tags.front().size() + 1;
  for (std::size_t i = 1; i < tags.size(); ++i) {
    try {
      acts.push_back(parse_activation(tags[i]));
    } catch (const LookupError&) {
      throw ParseError("unknown activation '" + tags[i] + "' at offset " + std::to_string(offset),
                       offset, {"id", "tanh", "sigmoid", "relu"});
    }
    offset += tags[i].size() + 1;
  }
  return Topology(std::move(sizes), std::move(acts));
}

std::size_t count_weights(const std::vector<std::size_t>& layer_sizes) {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    total += layer_sizes[l + 1] * (layer_sizes[l] + 1);
  }
  return total;
}

std::size_t count_weights(const Topology& topology) { return count_weights(topology.layer_sizes()); }

Network::Network(Topology topology, std::vector<Matrix> weights)
    : topology_(std::move(topology)), weights_(std::move(weights)) {
  const auto& sizes = topology_.layer_sizes();
  if (weights_.size() != topology_.depth()) {
    throw ShapeError("topology " + topology_.to_string() + " needs " +
                     std::to_string(topology_.depth()) + " weight matrices, got " +
                     std::to_string(weights_.size()));
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l].rows() != sizes[l + 1] || weights_[l].cols() != sizes[l] + 1) {
      throw ShapeError("layer " + std::to_string(l + 1) + " weights must be " +
                       std::to_string(sizes[l + 1]) + "x" + std::to_string(sizes[l] + 1) +
                       ", got " + weights_[l].shape_string());
    }
  }
}

Network Network::zeros(const Topology& topology) {
  std::vector<Matrix> w;
  const auto& sizes = topology.layer_sizes();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) w.emplace_back(sizes[l + 1], sizes[l] + 1);
  return Network(topology, std::move(w));
}

Network Network::random(const Topology& topology, std::mt19937_64& rng, double range) {
  Network net = zeros(topology);
  std::uniform_real_distribution<double> dist(-range, range);
  for (Matrix& m : net.weights_) {
    for (double& v : m.data()) v = dist(rng);
  }
  return net;
}

std::size_t Network::weight_count() const noexcept {
  std::size_t n = 0;
  for (const Matrix& m : weights_) n += m.data().size();
  return n;
}

Network Network::with_weight(std::size_t layer, std::size_t row, std::size_t col, double value) const {
  if (layer >= weights_.size() || row >= weights_[layer].rows() || col >= weights_[layer].cols()) {
    throw ShapeError("weight (" + std::to_string(layer) + "," + std::to_string(row) + "," +
                     std::to_string(col) + ") is out of range for " + topology_.to_string());
  }
  Network copy = *this;
  copy.weights_[layer](row, col) = value;
  return copy;
}

std::vector<double> Network::flat_weights() const {
  std::vector<double> flat;
  flat.reserve(weight_count());
  for (const Matrix& m : weights_) flat.insert(flat.end(), m.data().begin(), m.data().end());
  return flat;
}

Network Network::with_flat_weights(std::span<const double> flat) const {
  if (flat.size() != weight_count()) {
    throw ShapeError("expected " + std::to_string(weight_count()) + " weights, got " +
                     std::to_string(flat.size()));
  }
  Network copy = *this;
  std::size_t k = 0;
  for (Matrix& m : copy.weights_) {
    for (double& v : m.data()) v = flat[k++];
  }
  return copy;
}

ForwardTrace forward(const Network& net, std::span<const double> input) {
  const Topology& topo = net.topology();
  if (input.size() != topo.input_size()) {
    throw ShapeError("network " + topo.to_string() + " expects " +
                     std::to_string(topo.input_size()) + " inputs, got " +
                     std::to_string(input.size()));
  }
  ForwardTrace trace;
  trace.input.assign(input.begin(), input.end());
  trace.pre.resize(topo.depth());
  trace.post.resize(topo.depth());
  const std::vector<double>* prev = &trace.input;
  for (std::size_t l = 0; l < topo.depth(); ++l) {
    const Matrix& w = net.weights()[l];
    const std::size_t n_in = prev->size();
    auto& z = trace.pre[l];
    auto& a = trace.post[l];
    z.resize(w.rows());
    a.resize(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n_in; ++j) acc += w(i, j) * (*prev)[j];
      acc += w(i, n_in);
      z[i] = acc;
      a[i] = activate(topo.activations()[l], acc);
    }
    prev = &a;
  }
  return trace;
}

double predict(const Network& net, std::span<const double> input) {
  return forward(net, input).output();
}

double predict(const Network& net, double x1, double x2) {
  const double in[2] = {x1, x2};
  return predict(net, std::span<const double>(in, 2));
}

std::vector<Matrix> gradient(const Network& net, std::span<const double> input, double target) {
  return gradient(net, forward(net, input), target);
}

std::vector<Matrix> gradient(const Network& net, const ForwardTrace& trace, double target) {
  const Topology& topo = net.topology();
  if (topo.output_size() != 1) {
    throw ShapeError("gradient needs a single-output network, got " + topo.to_string());
  }
  const std::size_t depth = topo.depth();
  std::vector<Matrix> grads;
  grads.reserve(depth);
  for (const Matrix& w : net.weights()) grads.emplace_back(w.rows(), w.cols());

  // delta = d(loss)/d(pre-activation) of the current layer.
  std::vector<double> delta{2.0 * (trace.output() - target) *
                            activate_derivative(topo.activations()[depth - 1], trace.pre[depth - 1][0])};
  for (std::size_t l = depth; l-- > 0;) {
    const std::vector<double>& below = l == 0 ? trace.input : trace.post[l - 1];
    const Matrix& w = net.weights()[l];
    Matrix& g = grads[l];
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < below.size(); ++j) g(i, j) = delta[i] * below[j];
      g(i, below.size()) = delta[i];
    }
    if (l == 0) break;
    std::vector<double> next(below.size(), 0.0);
    for (std::size_t j = 0; j < below.size(); ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < w.rows(); ++i) acc += w(i, j) * delta[i];
      next[j] = acc * activate_derivative(topo.activations()[l - 1], trace.pre[l - 1][j]);
    }
    delta = std::move(next);
  }
  return grads;
}

Network collapse_linear(const Network& net) {
  const Topology& topo = net.topology();
  if (!topo.all_identity()) {
    throw NotLinearError("cannot collapse " + topo.to_string() + ": every activation must be id");
  }
  // Split the first layer into A (n1 x n0) and b (n1 x 1).
  const std::size_t n0 = topo.input_size();
  auto split_layer = [](const Matrix& w) {
    const std::size_t in = w.cols() - 1;
    Matrix a(w.rows(), in);
    Matrix b(w.rows(), 1);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < in; ++j) a(i, j) = w(i, j);
      b(i, 0) = w(i, in);
    }
    return std::pair{a, b};
  };
  auto [a, b] = split_layer(net.weights()[0]);
  for (std::size_t l = 1; l < topo.depth(); ++l) {
    auto [al, bl] = split_layer(net.weights()[l]);
    b = mat_add(mat_mul(al, b), bl);
    a = mat_mul(al, a);
  }
  Matrix w(a.rows(), n0 + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < n0; ++j) w(i, j) = a(i, j);
    w(i, n0) = b(i, 0);
  }
  return Network(Topology({n0, topo.output_size()}, {Activation::Id}), {std::move(w)});
}

}  // namespace xorcop
