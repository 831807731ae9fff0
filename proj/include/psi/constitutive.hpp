#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "psi/mesh.hpp"

namespace psi {

/// Scalar constitutive law sigma = m(eps). Implementations are immutable and
/// safe to evaluate concurrently.
class MaterialLaw {
 public:
  virtual ~MaterialLaw() = default;

  virtual double eval(double strain) const = 0;
  /// dm/deps
  virtual double tangent(double strain) const = 0;
  /// d^2m/deps^2; central difference of tangent() unless overridden.
  virtual double curvature(double strain) const;
  /// dm/deps at eps = 0.
  virtual double zero_strain_modulus() const = 0;
  /// False for piecewise-linear laws whose derivatives are unreliable.
  virtual bool smooth() const { return true; }
  virtual std::string name() const = 0;
};

class LinearLaw final : public MaterialLaw {
 public:
  explicit LinearLaw(double modulus);

  double eval(double strain) const override { return modulus_ * strain; }
  double tangent(double) const override { return modulus_; }
  double curvature(double) const override { return 0.0; }
  double zero_strain_modulus() const override { return modulus_; }
  std::string name() const override { return "linear"; }

 private:
  double modulus_;
};

/// Y0 [(|eps| + c)^p - c^p] sign(eps), with c = p^(1/(1-p)) so that the
/// tangent at the origin is exactly Y0.
class PowerLaw final : public MaterialLaw {
 public:
  PowerLaw(double y0, double p);

  double eval(double strain) const override;
  double tangent(double strain) const override;
  double curvature(double strain) const override;
  double zero_strain_modulus() const override { return y0_; }
  std::string name() const override { return "power"; }

  double offset() const noexcept { return c_; }
  double exponent() const noexcept { return p_; }

 private:
  double y0_;
  double p_;
  double c_;
  double c_pow_p_;
};

/// Y (eps - k eps^2): a linear law under a small quadratic perturbation.
class QuadraticPerturbedLaw final : public MaterialLaw {
 public:
  QuadraticPerturbedLaw(double modulus, double k);

  double eval(double strain) const override { return modulus_ * (strain - k_ * strain * strain); }
  double tangent(double strain) const override { return modulus_ * (1.0 - 2.0 * k_ * strain); }
  double curvature(double) const override { return -2.0 * modulus_ * k_; }
  double zero_strain_modulus() const override { return modulus_; }
  std::string name() const override { return "quadratic"; }

  double modulus() const noexcept { return modulus_; }
  double k() const noexcept { return k_; }

 private:
  double modulus_;
  double k_;
};

enum class Activation { Relu, Linear };

/// Dense layer y = act(W x + b), W stored row-major with one row per output.
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::Linear;
};

/// Exported MLP plus the min/max normalisation used during training.
struct NeuralNetwork {
  std::vector<DenseLayer> layers;
  double eps_min = 0.0;
  double eps_max = 1.0;
  double sig_min = 0.0;
  double sig_max = 1.0;
  /// Reference (eps, sigma) pairs emitted by the trainer.
  std::vector<std::pair<double, double>> reference;
  /// Declared bound on |m(0)| [Pa]; 0 if absent.
  double zero_tolerance = 0.0;
  /// Declared zero-strain modulus [Pa]; 0 if absent.
  double y0 = 0.0;

  std::size_t parameter_count() const;
  /// Throws ValidationError if the layer dimensions do not chain from a
  /// width-1 input to a width-1 output, or normalisation ranges are empty.
  void validate() const;
  /// Network output in normalised units for a normalised input.
  double forward_normalized(double x) const;
  double normalize_strain(double strain) const { return (strain - eps_min) / (eps_max - eps_min); }
  double normalize_stress(double stress) const { return (stress - sig_min) / (sig_max - sig_min); }
  double denormalize_stress(double y) const { return sig_min + y * (sig_max - sig_min); }
};

/// Parse a weight file. Throws ValidationError with the offending JSON path.
NeuralNetwork load_network(const std::filesystem::path& path);
void save_network(const std::filesystem::path& path, const NeuralNetwork& net);

/// Strain in, stress out, through a NeuralNetwork. The tangent is a central
/// difference of the forward pass.
class NeuralLaw final : public MaterialLaw {
 public:
  explicit NeuralLaw(NeuralNetwork network);

  double eval(double strain) const override;
  double tangent(double strain) const override;
  double curvature(double strain) const override;
  double zero_strain_modulus() const override { return y0_; }
  bool smooth() const override { return false; }
  std::string name() const override { return "neural"; }

  const NeuralNetwork& network() const noexcept { return net_; }

 private:
  NeuralNetwork net_;
  double y0_;
};

/// eval(eps) through mlp forward pass with normalisation.
double mlp_forward(const NeuralNetwork& net, double strain);

std::shared_ptr<const MaterialLaw> make_law(const MaterialSpec& spec,
                                            const std::filesystem::path& base_dir = {});

/// Central-difference step used for finite-difference tangents.
inline double fd_step(double strain) { return 1e-7 * std::max(1.0, std::abs(strain)); }

}  // namespace psi
