#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xorcop/error.hpp"
#include "xorcop/network.hpp"

namespace xorcop {

using nlohmann::json;

std::string model_to_json(const Network& net, std::optional<std::uint64_t> seed) {
  json doc;
  doc["spec"] = net.topology().to_string();
  doc["seed"] = seed ? json(*seed) : json(nullptr);
  json layers = json::array();
  for (const Matrix& m : net.weights()) {
    layers.push_back({{"rows", m.rows()},
                      {"cols", m.cols()},
                      {"data", std::vector<double>(m.data().begin(), m.data().end())}});
  }
  doc["weights"] = std::move(layers);
  return doc.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(), e.byte);
  }
  try {
    Topology topo = parse_spec(doc.at("spec").get<std::string>());
    std::vector<Matrix> weights;
    for (const json& layer : doc.at("weights")) {
      const auto rows = layer.at("rows").get<std::size_t>();
      const auto cols = layer.at("cols").get<std::size_t>();
      weights.emplace_back(rows, cols, layer.at("data").get<std::vector<double>>());
    }
    std::optional<std::uint64_t> seed;
    if (doc.contains("seed") && !doc["seed"].is_null()) seed = doc["seed"].get<std::uint64_t>();
    return ModelFile{Network(std::move(topo), std::move(weights)), seed};
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what(), 0,
                     {"spec", "seed", "weights"});
  }
}

void save_model(const std::string& path, const Network& net, std::optional<std::uint64_t> seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << model_to_json(net, seed);
  if (!out) throw Error("failed writing '" + path + "'");
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace xorcop
