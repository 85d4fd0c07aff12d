#pragma once

// Minimal fully-connected network with manual backprop. Parameters live in one
// flat buffer so optimiser steps and target-network averaging are single
// kernel calls.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace cfj::nn {

/// Activations recorded by a forward pass, consumed by backward().
struct Tape {
  std::size_t batch = 0;
  std::vector<std::vector<double>> acts;  // acts[0] = input, acts[l+1] = output of layer l
};

/// ReLU hidden layers, linear output layer. Weights are [in × out] so a layer
/// computes Y = X·W + b on a row-major batch.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<std::size_t> sizes, std::mt19937_64& rng);
  /// Rebuild from stored parameters (checkpoint load).
  Mlp(std::vector<std::size_t> sizes, std::vector<double> params);

  std::size_t input_dim() const noexcept { return sizes_.front(); }
  std::size_t output_dim() const noexcept { return sizes_.back(); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  std::span<const double> params() const noexcept { return params_; }
  std::span<double> params() noexcept { return params_; }

  /// x is [batch × input_dim]. Returns a view into the tape's last activation.
  std::span<const double> forward(std::span<const double> x, std::size_t batch, Tape& tape) const;

  /// Accumulates parameter gradients into `grads` (same layout as params()).
  /// When grad_input is non-empty it receives dL/dx ([batch × input_dim]).
  void backward(const Tape& tape, std::span<const double> grad_output, std::span<double> grads,
                std::span<double> grad_input = {}) const;

  /// target <- (1 - tau)·target + tau·source, elementwise over parameters.
  void soft_update_from(const Mlp& source, double tau);

 private:
  std::size_t weight_offset(std::size_t layer) const noexcept { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const noexcept {
    return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
  }
  void build_offsets();

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n_params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grads);
  std::size_t steps() const noexcept { return t_; }

 private:
  double lr_ = 0.0;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::size_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace cfj::nn
