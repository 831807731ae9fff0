#include "psi/constitutive.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "psi/errors.hpp"

namespace psi {

using nlohmann::json;

double MaterialLaw::curvature(double strain) const {
  const double h = fd_step(strain);
  return (tangent(strain + h) - tangent(strain - h)) / (2.0 * h);
}

LinearLaw::LinearLaw(double modulus) : modulus_(modulus) {
  if (!(modulus > 0.0) || !std::isfinite(modulus)) throw ValidationError("linear law: modulus must be positive");
}

PowerLaw::PowerLaw(double y0, double p) : y0_(y0), p_(p) {
  if (!(y0 > 0.0) || !std::isfinite(y0)) throw ValidationError("power law: Y0 must be positive");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("power law: p must lie in (0, 1)");
  c_ = std::pow(p, 1.0 / (1.0 - p));
  c_pow_p_ = std::pow(c_, p);
}

double PowerLaw::eval(double strain) const {
  const double a = std::abs(strain);
  // (a + c)^p - c^p = c^p (exp(p log1p(a / c)) - 1), without cancellation
  const double v = c_pow_p_ * std::expm1(p_ * std::log1p(a / c_));
  return strain < 0.0 ? -y0_ * v : y0_ * v;
}

double PowerLaw::tangent(double strain) const {
  return y0_ * p_ * std::pow(std::abs(strain) + c_, p_ - 1.0);
}

double PowerLaw::curvature(double strain) const {
  if (strain == 0.0) return 0.0;
  const double v = -y0_ * p_ * (1.0 - p_) * std::pow(std::abs(strain) + c_, p_ - 2.0);
  return strain > 0.0 ? v : -v;
}

QuadraticPerturbedLaw::QuadraticPerturbedLaw(double modulus, double k) : modulus_(modulus), k_(k) {
  if (!(modulus > 0.0) || !std::isfinite(modulus)) throw ValidationError("quadratic law: modulus must be positive");
  if (!(k >= 0.0) || !std::isfinite(k)) throw ValidationError("quadratic law: k must be >= 0");
}

// ---------------------------------------------------------------------------
// network

std::size_t NeuralNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

void NeuralNetwork::validate() const {
  if (layers.empty()) throw ValidationError("layers: at least one layer required");
  std::size_t width = 1;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string where = "layers[" + std::to_string(i) + "]";
    if (l.inputs != width)
      throw ValidationError(where + ": expects " + std::to_string(l.inputs) + " inputs but previous width is " +
                            std::to_string(width));
    if (l.outputs == 0) throw ValidationError(where + ": zero outputs");
    if (l.weights.size() != l.inputs * l.outputs)
      throw ValidationError(where + ".w: " + std::to_string(l.weights.size()) + " entries, expected " +
                            std::to_string(l.inputs * l.outputs));
    if (l.bias.size() != l.outputs)
      throw ValidationError(where + ".b: " + std::to_string(l.bias.size()) + " entries, expected " +
                            std::to_string(l.outputs));
    for (double v : l.weights)
      if (!std::isfinite(v)) throw ValidationError(where + ".w: non-finite weight");
    for (double v : l.bias)
      if (!std::isfinite(v)) throw ValidationError(where + ".b: non-finite bias");
    width = l.outputs;
  }
  if (width != 1) throw ValidationError("layers: final output width is " + std::to_string(width) + ", expected 1");
  if (!(eps_max > eps_min)) throw ValidationError("eps_max must exceed eps_min");
  if (!(sig_max > sig_min)) throw ValidationError("sig_max must exceed sig_min");
}

double NeuralNetwork::forward_normalized(double x) const {
  std::vector<double> in{x};
  std::vector<double> out;
  for (const auto& l : layers) {
    out.assign(l.bias.begin(), l.bias.end());
    const double* w = l.weights.data();
    for (std::size_t r = 0; r < l.outputs; ++r, w += l.inputs) {
      double s = 0.0;
      for (std::size_t c = 0; c < l.inputs; ++c) s += w[c] * in[c];
      out[r] += s;
    }
    if (l.activation == Activation::Relu)
      for (double& v : out) v = v > 0.0 ? v : 0.0;
    in.swap(out);
  }
  return in[0];
}

double mlp_forward(const NeuralNetwork& net, double strain) {
  return net.denormalize_stress(net.forward_normalized(net.normalize_strain(strain)));
}

namespace {

double number_at(const json& j, const char* key, bool required, double fallback = 0.0) {
  const auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw ValidationError(std::string(key) + ": missing");
    return fallback;
  }
  if (!it->is_number()) throw ValidationError(std::string(key) + ": expected a number");
  return it->get<double>();
}

DenseLayer parse_layer(const json& j, std::size_t index) {
  const std::string where = "layers[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  DenseLayer layer;
  const auto w = j.find("w");
  const auto b = j.find("b");
  if (w == j.end() || !w->is_array() || w->empty()) throw ValidationError(where + ".w: expected a non-empty matrix");
  if (b == j.end() || !b->is_array()) throw ValidationError(where + ".b: expected an array");
  layer.outputs = w->size();
  for (std::size_t r = 0; r < w->size(); ++r) {
    const auto& row = (*w)[r];
    if (!row.is_array()) throw ValidationError(where + ".w[" + std::to_string(r) + "]: expected an array");
    if (r == 0) layer.inputs = row.size();
    if (row.size() != layer.inputs)
      throw ValidationError(where + ".w[" + std::to_string(r) + "]: row has " + std::to_string(row.size()) +
                            " entries, expected " + std::to_string(layer.inputs));
    for (const auto& v : row) {
      if (!v.is_number()) throw ValidationError(where + ".w[" + std::to_string(r) + "]: non-numeric entry");
      layer.weights.push_back(v.get<double>());
    }
  }
  for (const auto& v : *b) {
    if (!v.is_number()) throw ValidationError(where + ".b: non-numeric entry");
    layer.bias.push_back(v.get<double>());
  }
  const std::string act = j.value("act", std::string("linear"));
  if (act == "relu")
    layer.activation = Activation::Relu;
  else if (act == "linear")
    layer.activation = Activation::Linear;
  else
    throw ValidationError(where + ".act: unknown activation '" + act + "'");
  return layer;
}

}  // namespace

NeuralNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open weight file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    if (!j.is_object()) throw ValidationError("top level: expected an object");
    NeuralNetwork net;
    const auto layers = j.find("layers");
    if (layers == j.end() || !layers->is_array()) throw ValidationError("layers: expected an array");
    for (std::size_t i = 0; i < layers->size(); ++i) net.layers.push_back(parse_layer((*layers)[i], i));
    net.eps_min = number_at(j, "eps_min", true);
    net.eps_max = number_at(j, "eps_max", true);
    net.sig_min = number_at(j, "sig_min", true);
    net.sig_max = number_at(j, "sig_max", true);
    net.zero_tolerance = number_at(j, "zero_tolerance", false);
    net.y0 = number_at(j, "y0", false);
    if (const auto ref = j.find("reference"); ref != j.end()) {
      if (!ref->is_array()) throw ValidationError("reference: expected an array of pairs");
      for (std::size_t i = 0; i < ref->size(); ++i) {
        const auto& pair = (*ref)[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
          throw ValidationError("reference[" + std::to_string(i) + "]: expected [strain, stress]");
        net.reference.emplace_back(pair[0].get<double>(), pair[1].get<double>());
      }
    }
    net.validate();
    return net;
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_network(const std::filesystem::path& path, const NeuralNetwork& net) {
  json j;
  j["layers"] = json::array();
  for (const auto& l : net.layers) {
    json w = json::array();
    for (std::size_t r = 0; r < l.outputs; ++r)
      w.push_back(std::vector<double>(l.weights.begin() + static_cast<long>(r * l.inputs),
                                      l.weights.begin() + static_cast<long>((r + 1) * l.inputs)));
    j["layers"].push_back({{"w", w}, {"b", l.bias}, {"act", l.activation == Activation::Relu ? "relu" : "linear"}});
  }
  j["eps_min"] = net.eps_min;
  j["eps_max"] = net.eps_max;
  j["sig_min"] = net.sig_min;
  j["sig_max"] = net.sig_max;
  if (net.zero_tolerance > 0.0) j["zero_tolerance"] = net.zero_tolerance;
  if (net.y0 > 0.0) j["y0"] = net.y0;
  json ref = json::array();
  for (const auto& [e, s] : net.reference) ref.push_back({e, s});
  j["reference"] = ref;
  std::ofstream out(path);
  if (!out) throw ValidationError(path.string() + ": cannot write weight file");
  out << j.dump() << '\n';
}

NeuralLaw::NeuralLaw(NeuralNetwork network) : net_(std::move(network)) {
  net_.validate();
  if (net_.y0 > 0.0) {
    y0_ = net_.y0;
  } else {
    // slope through the origin over a small fraction of the training range
    const double h = 1e-3 * (net_.eps_max - net_.eps_min);
    y0_ = (mlp_forward(net_, h) - mlp_forward(net_, -h)) / (2.0 * h);
  }
  if (!(y0_ > 0.0) || !std::isfinite(y0_))
    throw ValidationError("neural law: zero-strain modulus is not positive; declare \"y0\" in the weight file");
}

double NeuralLaw::eval(double strain) const { return mlp_forward(net_, strain); }

double NeuralLaw::tangent(double strain) const {
  const double h = fd_step(strain);
  return (eval(strain + h) - eval(strain - h)) / (2.0 * h);
}

double NeuralLaw::curvature(double strain) const {
  const double h = 1e-4 * (net_.eps_max - net_.eps_min);
  return (eval(strain + h) - 2.0 * eval(strain) + eval(strain - h)) / (h * h);
}

std::shared_ptr<const MaterialLaw> make_law(const MaterialSpec& spec, const std::filesystem::path& base_dir) {
  switch (spec.type) {
    case LawType::Linear: return std::make_shared<LinearLaw>(spec.y0);
    case LawType::Power: return std::make_shared<PowerLaw>(spec.y0, spec.p);
    case LawType::Quadratic: return std::make_shared<QuadraticPerturbedLaw>(spec.y0, spec.k);
    case LawType::Neural: {
      if (spec.weights_path.empty()) throw ValidationError("material.weights_path: required for neural law");
      std::filesystem::path p(spec.weights_path);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      return std::make_shared<NeuralLaw>(load_network(p));
    }
  }
  throw ValidationError("material.type: unsupported");
}

}  // namespace psi
