/* Copyright 2026 The SceneLay Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SCENELAY_NNCORE_HPP_
#define SCENELAY_NNCORE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scenelay/rng.hpp"
#include "scenelay/tensor.hpp"

namespace scenelay {

// y = W x + b with W of shape out x in.
struct DenseParams {
  Tensor2 W;
  Vec b;

  DenseParams() = default;
  DenseParams(std::size_t out, std::size_t in) : W(out, in), b(out, 0.0) {}

  std::size_t in() const { return W.cols; }
  std::size_t out() const { return W.rows; }
};

Vec dense(const DenseParams& p, std::span<const double> x);

// Accumulates dW += dy x^T and db += dy into `grad`, returns dx = W^T dy.
Vec dense_backward(const DenseParams& p, std::span<const double> x,
                   std::span<const double> dy, DenseParams& grad);

Vec relu(std::span<const double> x);
// dx = dy where x > 0, else 0 (the subgradient at 0 is taken as 0).
Vec relu_backward(std::span<const double> x, std::span<const double> dy);

// Standard LSTM cell. Gate rows of W and b are stacked in the order
// input, forget, candidate, output; W acts on [x; h_prev].
struct LstmParams {
  std::size_t input = 0;
  std::size_t hidden = 0;
  Tensor2 W;
  Vec b;

  LstmParams() = default;
  LstmParams(std::size_t in, std::size_t hid)
      : input(in), hidden(hid), W(4 * hid, in + hid), b(4 * hid, 0.0) {}
};

// Activations kept for the backward pass of one step.
struct LstmStepTape {
  Vec xh;  // [x; h_prev]
  Vec c_prev;
  Vec i, f, g, o;
  Vec c;
  Vec tanh_c;
  Vec h;
};

struct LstmState {
  Vec h;
  Vec c;
};

LstmState lstm_step(const LstmParams& p, std::span<const double> x,
                    std::span<const double> h_prev,
                    std::span<const double> c_prev,
                    LstmStepTape* tape = nullptr);

struct LstmTape {
  std::vector<LstmStepTape> steps;
};

// Runs the cell over `inputs` from a zero state; returns the final hidden
// state and records every step into `tape`.
Vec lstm_forward(const LstmParams& p, std::span<const Vec> inputs,
                 LstmTape* tape = nullptr);

// Backpropagates a gradient on the final hidden state through the whole
// sequence. Accumulates parameter gradients into `grad` and returns the
// gradient for each input vector.
std::vector<Vec> lstm_backward(const LstmParams& p, const LstmTape& tape,
                               std::span<const double> dh_final,
                               LstmParams& grad);

// Per-example loss: plain squared L2 norm of pred - target.
double squared_error(std::span<const double> pred,
                     std::span<const double> target);

// Mean over the batch of per-example squared errors.
double mse(std::span<const Vec> preds, std::span<const Vec> targets);

// d mse / d pred_k = 2 (pred_k - target_k) / batch.
Vec mse_grad(std::span<const double> pred, std::span<const double> target,
             std::size_t batch);

// A named view onto one trainable array.
struct ParamView {
  std::string name;
  std::span<double> values;
};

struct RmsPropConfig {
  double lr = 1e-4;
  double rho = 0.9;
  double eps = 1e-8;
};

// acc <- rho acc + (1 - rho) g^2;  theta <- theta - lr g / (sqrt(acc) + eps)
class RmsProp {
 public:
  explicit RmsProp(RmsPropConfig cfg = {}) : cfg_(cfg) {}

  const RmsPropConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

  // `params` and `grads` must list the same arrays in the same order on every
  // call. Throws Error naming the parameter on a non-finite gradient, before
  // any parameter is touched.
  void step(std::span<const ParamView> params, std::span<const ParamView> grads);

  const std::vector<Vec>& accumulators() const { return acc_; }

 private:
  RmsPropConfig cfg_;
  std::vector<Vec> acc_;
};

// Glorot-uniform weights, bound sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Tensor2& w, Rng& rng);
void init_dense(DenseParams& p, Rng& rng);
// Glorot weights, zero biases except forget-gate biases set to 1.
void init_lstm(LstmParams& p, Rng& rng);

// Rescales all gradients so their global L2 norm is at most `max_norm`.
void clip_global_norm(std::span<const ParamView> grads, double max_norm);

}  // namespace scenelay

#endif  // SCENELAY_NNCORE_HPP_
