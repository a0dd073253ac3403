#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dwrl/rng.hpp"
#include "dwrl/tensor.hpp"

namespace dwrl {

// Output head of a network. kLinear yields raw outputs (used for value nets
// and the Gaussian mean), kSoftmax normalizes to an action distribution,
// kGaussian pairs the linear mean output with a state-independent learnable
// log-std vector.
enum class Head { kLinear, kSoftmax, kGaussian };

std::string head_name(Head h);
Head head_from_name(const std::string& name);

struct DenseLayer {
  Tensor w;  // [in, out]
  Tensor b;  // [out]
};

// Log-std entries are clamped to this range when the Gaussian head is
// evaluated, to keep the sampling distribution sane.
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

struct MlpParams {
  std::vector<DenseLayer> layers;
  Head head = Head::kLinear;
  Tensor log_std;  // only for Head::kGaussian, shape [action_dim]

  std::int64_t input_dim() const { return layers.empty() ? 0 : layers.front().w.shape[0]; }
  std::int64_t output_dim() const { return layers.empty() ? 0 : layers.back().w.shape[1]; }

  // Stable names for every parameter tensor, used by checkpoints and
  // diagnostics: layer0/w, layer0/b, ..., log_std.
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;
  std::vector<std::pair<std::string, Tensor*>> named_tensors();
};

// Same layer structure as the owning MlpParams; one gradient per parameter.
struct Gradients {
  std::vector<DenseLayer> layers;
  Tensor log_std;

  static Gradients zeros_like(const MlpParams& p);
  void add_scaled(const Gradients& other, double scale);
  void scale(double s);
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;
  std::vector<std::pair<std::string, Tensor*>> named_tensors();
};

// Activations cached by a forward pass, consumed by mlp_backward.
// acts[k] is the input to linear layer k; output is the raw head input
// (logits, Gaussian mean, or value column).
struct ForwardTrace {
  std::vector<Tensor> acts;
  Tensor output;
  std::int64_t batch = 0;

  bool valid() const { return batch > 0; }
};

// Forward pass returning the raw last-layer output ([batch, out_dim]).
Tensor mlp_forward_raw(const MlpParams& p, const Tensor& input, int threads = 0);

// Forward pass with the head applied: kSoftmax returns per-row probability
// vectors, kLinear/kGaussian return the raw output (mean for Gaussian).
Tensor mlp_forward(const MlpParams& p, const Tensor& input, int threads = 0);

ForwardTrace mlp_forward_trace(const MlpParams& p, const Tensor& input, int threads = 0);

// Exact analytic gradients of a scalar loss given d(loss)/d(raw output).
// Gaussian log-std gradients are produced by the loss code, not here.
Gradients mlp_backward(const MlpParams& p, const ForwardTrace& trace, const Tensor& dout,
                       int threads = 0);

// Value-net convenience: forward and flatten the single output column.
std::vector<double> value_forward(const MlpParams& value_net, const Tensor& states,
                                  int threads = 0);

double clamped_log_std(double raw);

// Adam optimizer state, owned by the caller.
struct AdamState {
  std::int64_t step = 0;
  std::vector<DenseLayer> m, v;
  Tensor m_log_std, v_log_std;

  static AdamState zeros_like(const MlpParams& p);
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One Adam step. Deterministic given (params, grads, state). Throws
// NumericError naming the offending tensor if a gradient entry is non-finite.
void adam_step(MlpParams& params, const Gradients& grads, AdamState& state, double learning_rate,
               const AdamConfig& cfg = {});

// Scaled-uniform (Glorot-style) initialization. `final_layer_scale` shrinks
// the last layer's weights; small values give a near-uniform initial policy.
MlpParams make_mlp(std::int64_t input_dim, const std::vector<int>& hidden, std::int64_t output_dim,
                   Head head, RngStream& rng, double final_layer_scale = 1.0);

}  // namespace dwrl
