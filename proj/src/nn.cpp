#include "cfj/nn.hpp"

#include <cmath>

#include "cfj/error.hpp"
#include "cfj/kernels.hpp"

namespace cfj::nn {

void Mlp::build_offsets() {
  if (sizes_.size() < 2) throw Error(ErrorCategory::dimension, "an MLP needs at least two sizes");
  offsets_.clear();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(off);
    off += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  offsets_.push_back(off);
}

Mlp::Mlp(std::vector<std::size_t> sizes, std::mt19937_64& rng) : sizes_(std::move(sizes)) {
  build_offsets();
  params_.assign(offsets_.back(), 0.0);
  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t i = offsets_[l]; i < offsets_[l + 1]; ++i) params_[i] = u(rng);
  }
}

Mlp::Mlp(std::vector<std::size_t> sizes, std::vector<double> params)
    : sizes_(std::move(sizes)), params_(std::move(params)) {
  build_offsets();
  if (params_.size() != offsets_.back()) {
    throw Error(ErrorCategory::dimension, "parameter count " + std::to_string(params_.size()) +
                                              " does not match layer sizes (" +
                                              std::to_string(offsets_.back()) + ")");
  }
}

std::span<const double> Mlp::forward(std::span<const double> x, std::size_t batch,
                                     Tape& tape) const {
  const std::size_t n_layers = sizes_.size() - 1;
  if (x.size() != batch * sizes_.front()) {
    throw Error(ErrorCategory::dimension, "MLP input has " + std::to_string(x.size()) +
                                              " values, expected " +
                                              std::to_string(batch * sizes_.front()));
  }
  tape.batch = batch;
  tape.acts.resize(n_layers + 1);
  tape.acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = sizes_[l];
    const std::size_t out = sizes_[l + 1];
    auto& y = tape.acts[l + 1];
    y.resize(batch * out);
    std::span<const double> w(params_.data() + weight_offset(l), in * out);
    const double* b = params_.data() + bias_offset(l);
    kernels::matmul(tape.acts[l], w, y, batch, in, out);
    const bool hidden = l + 1 < n_layers;
    for (std::size_t r = 0; r < batch; ++r) {
      double* row = y.data() + r * out;
      for (std::size_t j = 0; j < out; ++j) {
        const double z = row[j] + b[j];
        row[j] = hidden && z < 0.0 ? 0.0 : z;
      }
    }
  }
  return tape.acts.back();
}

void Mlp::backward(const Tape& tape, std::span<const double> grad_output,
                   std::span<double> grads, std::span<double> grad_input) const {
  const std::size_t n_layers = sizes_.size() - 1;
  const std::size_t batch = tape.batch;
  if (grads.size() != params_.size() || grad_output.size() != batch * sizes_.back()) {
    throw Error(ErrorCategory::dimension, "MLP backward shape mismatch");
  }
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  std::vector<double> prev;
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t in = sizes_[l];
    const std::size_t out = sizes_[l + 1];
    if (l + 1 < n_layers) {
      const auto& y = tape.acts[l + 1];
      for (std::size_t i = 0; i < delta.size(); ++i) {
        if (y[i] <= 0.0) delta[i] = 0.0;
      }
    }
    kernels::matmul_at_b(tape.acts[l], delta, grads.subspan(weight_offset(l), in * out), batch,
                         in, out, /*accumulate=*/true);
    double* gb = grads.data() + bias_offset(l);
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t j = 0; j < out; ++j) gb[j] += delta[r * out + j];
    }
    if (l == 0 && grad_input.empty()) break;
    prev.resize(batch * in);
    std::span<const double> w(params_.data() + weight_offset(l), in * out);
    kernels::matmul_a_bt(delta, w, prev, batch, out, in);
    delta.swap(prev);
  }
  if (!grad_input.empty()) {
    if (grad_input.size() != delta.size()) {
      throw Error(ErrorCategory::dimension, "MLP grad_input shape mismatch");
    }
    std::copy(delta.begin(), delta.end(), grad_input.begin());
  }
}

void Mlp::soft_update_from(const Mlp& source, double tau) {
  if (source.params_.size() != params_.size()) {
    throw Error(ErrorCategory::dimension, "soft update between differently shaped networks");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_[i] = (1.0 - tau) * params_[i] + tau * source.params_[i];
  }
}

Adam::Adam(std::size_t n_params, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n_params, 0.0), v_(n_params, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  ++t_;
  const kernels::AdamCoeffs co{
      lr_,
      beta1_,
      beta2_,
      eps_,
      1.0 - std::pow(beta1_, static_cast<double>(t_)),
      1.0 - std::pow(beta2_, static_cast<double>(t_)),
  };
  kernels::adam_step(params, grads, m_, v_, co);
}

}  // namespace cfj::nn
