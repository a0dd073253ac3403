#include "dwrl/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "dwrl/error.hpp"
#include "dwrl/kernels.hpp"

namespace dwrl {

std::string head_name(Head h) {
  switch (h) {
    case Head::kLinear: return "linear";
    case Head::kSoftmax: return "softmax";
    case Head::kGaussian: return "gaussian";
  }
  return "?";
}

Head head_from_name(const std::string& name) {
  if (name == "linear") return Head::kLinear;
  if (name == "softmax") return Head::kSoftmax;
  if (name == "gaussian") return Head::kGaussian;
  throw ParseError("unknown head kind: " + name);
}

namespace {

template <typename Params, typename TensorPtr>
std::vector<std::pair<std::string, TensorPtr>> collect_named(Params& p) {
  std::vector<std::pair<std::string, TensorPtr>> out;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    out.emplace_back("layer" + std::to_string(k) + "/w", &p.layers[k].w);
    out.emplace_back("layer" + std::to_string(k) + "/b", &p.layers[k].b);
  }
  if (!p.log_std.empty()) out.emplace_back("log_std", &p.log_std);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, const Tensor*>> MlpParams::named_tensors() const {
  return collect_named<const MlpParams, const Tensor*>(*this);
}
std::vector<std::pair<std::string, Tensor*>> MlpParams::named_tensors() {
  return collect_named<MlpParams, Tensor*>(*this);
}
std::vector<std::pair<std::string, const Tensor*>> Gradients::named_tensors() const {
  return collect_named<const Gradients, const Tensor*>(*this);
}
std::vector<std::pair<std::string, Tensor*>> Gradients::named_tensors() {
  return collect_named<Gradients, Tensor*>(*this);
}

Gradients Gradients::zeros_like(const MlpParams& p) {
  Gradients g;
  g.layers.reserve(p.layers.size());
  for (const auto& layer : p.layers) {
    g.layers.push_back({Tensor::zeros(layer.w.shape), Tensor::zeros(layer.b.shape)});
  }
  if (!p.log_std.empty()) g.log_std = Tensor::zeros(p.log_std.shape);
  return g;
}

void Gradients::add_scaled(const Gradients& other, double scale) {
  if (other.layers.size() != layers.size()) {
    throw DimensionError("Gradients::add_scaled: layer count mismatch");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    require_same_shape(layers[k].w, other.layers[k].w, "add_scaled w");
    require_same_shape(layers[k].b, other.layers[k].b, "add_scaled b");
    for (std::size_t i = 0; i < layers[k].w.size(); ++i)
      layers[k].w[i] += scale * other.layers[k].w[i];
    for (std::size_t i = 0; i < layers[k].b.size(); ++i)
      layers[k].b[i] += scale * other.layers[k].b[i];
  }
  for (std::size_t i = 0; i < log_std.size(); ++i) log_std[i] += scale * other.log_std[i];
}

void Gradients::scale(double s) {
  for (auto& layer : layers) {
    for (auto& v : layer.w.data) v *= s;
    for (auto& v : layer.b.data) v *= s;
  }
  for (auto& v : log_std.data) v *= s;
}

namespace {

void check_input(const MlpParams& p, const Tensor& input) {
  if (p.layers.empty()) throw StateError("mlp_forward: network has no layers");
  if (input.shape.size() != 2) {
    throw DimensionError("mlp_forward: input must be 2-D [batch, features], got " +
                         input.shape_str());
  }
  if (input.cols() != p.input_dim()) {
    throw DimensionError("mlp_forward: input width " + input.shape_str() +
                         " does not match first-layer input width [" +
                         std::to_string(p.input_dim()) + "]");
  }
}

}  // namespace

ForwardTrace mlp_forward_trace(const MlpParams& p, const Tensor& input, int threads) {
  check_input(p, input);
  const std::int64_t batch = input.rows();
  ForwardTrace trace;
  trace.batch = batch;
  trace.acts.reserve(p.layers.size());
  trace.acts.push_back(input);
  Tensor cur = input;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const auto& layer = p.layers[k];
    const std::int64_t in_dim = layer.w.shape[0];
    const std::int64_t out_dim = layer.w.shape[1];
    Tensor z({batch, out_dim});
    kernels::linear_forward(cur.data.data(), batch, in_dim, layer.w.data.data(), out_dim,
                            layer.b.data.data(), z.data.data(), threads);
    if (k + 1 < p.layers.size()) {
      kernels::tanh_forward(z.data.data(), static_cast<std::int64_t>(z.size()), z.data.data(),
                            threads);
      trace.acts.push_back(z);
      cur = std::move(z);
    } else {
      trace.output = std::move(z);
    }
  }
  return trace;
}

Tensor mlp_forward_raw(const MlpParams& p, const Tensor& input, int threads) {
  check_input(p, input);
  const std::int64_t batch = input.rows();
  Tensor cur = input;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const auto& layer = p.layers[k];
    const std::int64_t in_dim = layer.w.shape[0];
    const std::int64_t out_dim = layer.w.shape[1];
    Tensor z({batch, out_dim});
    kernels::linear_forward(cur.data.data(), batch, in_dim, layer.w.data.data(), out_dim,
                            layer.b.data.data(), z.data.data(), threads);
    if (k + 1 < p.layers.size()) {
      kernels::tanh_forward(z.data.data(), static_cast<std::int64_t>(z.size()), z.data.data(),
                            threads);
    }
    cur = std::move(z);
  }
  return cur;
}

Tensor mlp_forward(const MlpParams& p, const Tensor& input, int threads) {
  Tensor out = mlp_forward_raw(p, input, threads);
  if (p.head == Head::kSoftmax) {
    Tensor probs(out.shape);
    kernels::softmax_rows(out.data.data(), out.rows(), out.cols(), probs.data.data(), threads);
    return probs;
  }
  return out;
}

Gradients mlp_backward(const MlpParams& p, const ForwardTrace& trace, const Tensor& dout,
                       int threads) {
  if (!trace.valid()) {
    throw StateError("mlp_backward: no forward trace for this input (run mlp_forward_trace first)");
  }
  if (trace.acts.size() != p.layers.size()) {
    throw StateError("mlp_backward: trace does not match network depth");
  }
  if (dout.rows() != trace.batch || dout.cols() != p.output_dim()) {
    throw DimensionError("mlp_backward: upstream gradient shape " + dout.shape_str() +
                         " does not match output [" + std::to_string(trace.batch) + "x" +
                         std::to_string(p.output_dim()) + "]");
  }
  Gradients g = Gradients::zeros_like(p);
  const std::int64_t batch = trace.batch;
  Tensor dz = dout;
  for (std::size_t idx = p.layers.size(); idx-- > 0;) {
    const auto& layer = p.layers[idx];
    const std::int64_t in_dim = layer.w.shape[0];
    const std::int64_t out_dim = layer.w.shape[1];
    const Tensor& x = trace.acts[idx];
    kernels::grad_weights(x.data.data(), batch, in_dim, dz.data.data(), out_dim,
                          g.layers[idx].w.data.data(), threads);
    kernels::col_sum(dz.data.data(), batch, out_dim, g.layers[idx].b.data.data(), threads);
    if (idx > 0) {
      Tensor dx({batch, in_dim});
      kernels::grad_input(dz.data.data(), batch, out_dim, layer.w.data.data(), in_dim,
                          dx.data.data(), threads);
      // x is the tanh output of the previous layer
      kernels::tanh_backward(dx.data.data(), x.data.data(), static_cast<std::int64_t>(dx.size()),
                             dx.data.data(), threads);
      dz = std::move(dx);
    }
  }
  return g;
}

std::vector<double> value_forward(const MlpParams& value_net, const Tensor& states, int threads) {
  Tensor out = mlp_forward_raw(value_net, states, threads);
  if (out.cols() != 1) {
    throw DimensionError("value_forward: value net output width must be 1, got " +
                         out.shape_str());
  }
  return out.data;
}

double clamped_log_std(double raw) { return std::clamp(raw, kLogStdMin, kLogStdMax); }

AdamState AdamState::zeros_like(const MlpParams& p) {
  AdamState s;
  for (const auto& layer : p.layers) {
    s.m.push_back({Tensor::zeros(layer.w.shape), Tensor::zeros(layer.b.shape)});
    s.v.push_back({Tensor::zeros(layer.w.shape), Tensor::zeros(layer.b.shape)});
  }
  if (!p.log_std.empty()) {
    s.m_log_std = Tensor::zeros(p.log_std.shape);
    s.v_log_std = Tensor::zeros(p.log_std.shape);
  }
  return s;
}

namespace {

void adam_update_tensor(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v, double lr,
                        const AdamConfig& cfg, double bc1, double bc2, const std::string& name) {
  require_same_shape(param, grad, "adam_step " + name);
  for (std::size_t i = 0; i < param.size(); ++i) {
    double gi = grad[i];
    if (!std::isfinite(gi)) {
      throw NumericError("adam_step: non-finite gradient entry in tensor '" + name + "'");
    }
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
    double mhat = m[i] / bc1;
    double vhat = v[i] / bc2;
    param[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace

void adam_step(MlpParams& params, const Gradients& grads, AdamState& state, double learning_rate,
               const AdamConfig& cfg) {
  if (learning_rate <= 0.0) throw DomainError("adam_step: learning_rate must be > 0");
  if (grads.layers.size() != params.layers.size()) {
    throw DimensionError("adam_step: gradient layer count mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    const std::string prefix = "layer" + std::to_string(k);
    adam_update_tensor(params.layers[k].w, grads.layers[k].w, state.m[k].w, state.v[k].w,
                       learning_rate, cfg, bc1, bc2, prefix + "/w");
    adam_update_tensor(params.layers[k].b, grads.layers[k].b, state.m[k].b, state.v[k].b,
                       learning_rate, cfg, bc1, bc2, prefix + "/b");
  }
  if (!params.log_std.empty()) {
    adam_update_tensor(params.log_std, grads.log_std, state.m_log_std, state.v_log_std,
                       learning_rate, cfg, bc1, bc2, "log_std");
  }
}

MlpParams make_mlp(std::int64_t input_dim, const std::vector<int>& hidden, std::int64_t output_dim,
                   Head head, RngStream& rng, double final_layer_scale) {
  if (input_dim <= 0 || output_dim <= 0) throw DomainError("make_mlp: dims must be positive");
  std::vector<std::int64_t> sizes;
  sizes.push_back(input_dim);
  for (int h : hidden) sizes.push_back(h);
  sizes.push_back(output_dim);

  MlpParams p;
  p.head = head;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    const std::int64_t fan_in = sizes[k];
    const std::int64_t fan_out = sizes[k + 1];
    DenseLayer layer{Tensor({fan_in, fan_out}), Tensor({fan_out})};
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    if (k + 2 == sizes.size()) bound *= final_layer_scale;
    for (auto& w : layer.w.data) w = rng.uniform(-bound, bound);
    p.layers.push_back(std::move(layer));
  }
  if (head == Head::kGaussian) {
    p.log_std = Tensor::full({output_dim}, -0.5);
  }
  return p;
}

}  // namespace dwrl
