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

#include "scenelay/nncore.hpp"

#include <cmath>

#include "scenelay/error.hpp"

namespace scenelay {

namespace {

void require(bool ok, const char* op, std::size_t got, std::size_t want) {
  if (!ok) {
    throw ShapeError(std::string(op) + ": got length " + std::to_string(got) +
                     ", expected " + std::to_string(want));
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Vec dense(const DenseParams& p, std::span<const double> x) {
  require(x.size() == p.in(), "dense", x.size(), p.in());
  Vec y(p.b);
  for (std::size_t r = 0; r < p.out(); ++r) {
    const double* w = p.W.data.data() + r * p.W.cols;
    double s = 0.0;
    for (std::size_t c = 0; c < p.W.cols; ++c) s += w[c] * x[c];
    y[r] += s;
  }
  return y;
}

Vec dense_backward(const DenseParams& p, std::span<const double> x,
                   std::span<const double> dy, DenseParams& grad) {
  require(x.size() == p.in(), "dense_backward", x.size(), p.in());
  require(dy.size() == p.out(), "dense_backward", dy.size(), p.out());
  require(grad.W.same_shape(p.W), "dense_backward", grad.W.size(), p.W.size());
  Vec dx(p.in(), 0.0);
  const std::size_t cols = p.W.cols;
  for (std::size_t r = 0; r < p.out(); ++r) {
    const double g = dy[r];
    if (g == 0.0) continue;
    grad.b[r] += g;
    double* gw = grad.W.data.data() + r * cols;
    const double* w = p.W.data.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      gw[c] += g * x[c];
      dx[c] += w[c] * g;
    }
  }
  return dx;
}

Vec relu(std::span<const double> x) {
  Vec y(x.begin(), x.end());
  for (double& v : y) v = v > 0.0 ? v : 0.0;
  return y;
}

Vec relu_backward(std::span<const double> x, std::span<const double> dy) {
  require(x.size() == dy.size(), "relu_backward", dy.size(), x.size());
  Vec dx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
  return dx;
}

LstmState lstm_step(const LstmParams& p, std::span<const double> x,
                    std::span<const double> h_prev,
                    std::span<const double> c_prev, LstmStepTape* tape) {
  const std::size_t H = p.hidden;
  require(x.size() == p.input, "lstm_step x", x.size(), p.input);
  require(h_prev.size() == H, "lstm_step h_prev", h_prev.size(), H);
  require(c_prev.size() == H, "lstm_step c_prev", c_prev.size(), H);

  Vec xh = concat({x, h_prev});
  const std::size_t cols = p.W.cols;
  Vec z(p.b);
  for (std::size_t r = 0; r < 4 * H; ++r) {
    const double* w = p.W.data.data() + r * cols;
    double s = 0.0;
    for (std::size_t k = 0; k < cols; ++k) s += w[k] * xh[k];
    z[r] += s;
  }
  Vec i(H), f(H), g(H), o(H), c(H), tc(H), h(H);
  for (std::size_t k = 0; k < H; ++k) {
    i[k] = sigmoid(z[k]);
    f[k] = sigmoid(z[H + k]);
    g[k] = std::tanh(z[2 * H + k]);
    o[k] = sigmoid(z[3 * H + k]);
    c[k] = f[k] * c_prev[k] + i[k] * g[k];
    tc[k] = std::tanh(c[k]);
    h[k] = o[k] * tc[k];
  }
  LstmState state{h, c};
  if (tape) {
    tape->xh = std::move(xh);
    tape->c_prev.assign(c_prev.begin(), c_prev.end());
    tape->i = std::move(i);
    tape->f = std::move(f);
    tape->g = std::move(g);
    tape->o = std::move(o);
    tape->c = std::move(c);
    tape->tanh_c = std::move(tc);
    tape->h = std::move(h);
  }
  return state;
}

Vec lstm_forward(const LstmParams& p, std::span<const Vec> inputs,
                 LstmTape* tape) {
  Vec h(p.hidden, 0.0), c(p.hidden, 0.0);
  if (tape) tape->steps.assign(inputs.size(), {});
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    LstmState s = lstm_step(p, inputs[t], h, c, tape ? &tape->steps[t] : nullptr);
    h = std::move(s.h);
    c = std::move(s.c);
  }
  return h;
}

std::vector<Vec> lstm_backward(const LstmParams& p, const LstmTape& tape,
                               std::span<const double> dh_final,
                               LstmParams& grad) {
  const std::size_t H = p.hidden;
  const std::size_t I = p.input;
  const std::size_t cols = I + H;
  require(dh_final.size() == H, "lstm_backward", dh_final.size(), H);
  require(grad.W.same_shape(p.W), "lstm_backward grad", grad.W.size(), p.W.size());

  std::vector<Vec> dx(tape.steps.size(), Vec(I, 0.0));
  Vec dh(dh_final.begin(), dh_final.end());
  Vec dc(H, 0.0);
  Vec dz(4 * H);
  for (std::size_t t = tape.steps.size(); t-- > 0;) {
    const LstmStepTape& s = tape.steps[t];
    for (std::size_t k = 0; k < H; ++k) {
      const double d_o = dh[k] * s.tanh_c[k];
      const double dct = dc[k] + dh[k] * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
      const double di = dct * s.g[k];
      const double dg = dct * s.i[k];
      const double df = dct * s.c_prev[k];
      dc[k] = dct * s.f[k];
      dz[k] = di * s.i[k] * (1.0 - s.i[k]);
      dz[H + k] = df * s.f[k] * (1.0 - s.f[k]);
      dz[2 * H + k] = dg * (1.0 - s.g[k] * s.g[k]);
      dz[3 * H + k] = d_o * s.o[k] * (1.0 - s.o[k]);
    }
    Vec dxh(cols, 0.0);
    for (std::size_t r = 0; r < 4 * H; ++r) {
      const double g = dz[r];
      grad.b[r] += g;
      if (g == 0.0) continue;
      double* gw = grad.W.data.data() + r * cols;
      const double* w = p.W.data.data() + r * cols;
      for (std::size_t k = 0; k < cols; ++k) {
        gw[k] += g * s.xh[k];
        dxh[k] += w[k] * g;
      }
    }
    std::copy(dxh.begin(), dxh.begin() + I, dx[t].begin());
    std::copy(dxh.begin() + I, dxh.end(), dh.begin());
  }
  return dx;
}

double squared_error(std::span<const double> pred,
                     std::span<const double> target) {
  require(pred.size() == target.size(), "squared_error", pred.size(), target.size());
  double s = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = pred[k] - target[k];
    s += d * d;
  }
  return s;
}

double mse(std::span<const Vec> preds, std::span<const Vec> targets) {
  require(preds.size() == targets.size(), "mse batch", preds.size(), targets.size());
  if (preds.empty()) throw Error("mse: empty batch");
  double s = 0.0;
  for (std::size_t b = 0; b < preds.size(); ++b) s += squared_error(preds[b], targets[b]);
  return s / static_cast<double>(preds.size());
}

Vec mse_grad(std::span<const double> pred, std::span<const double> target,
             std::size_t batch) {
  require(pred.size() == target.size(), "mse_grad", pred.size(), target.size());
  Vec d(pred.size());
  const double scale = 2.0 / static_cast<double>(batch);
  for (std::size_t k = 0; k < pred.size(); ++k) d[k] = scale * (pred[k] - target[k]);
  return d;
}

void RmsProp::step(std::span<const ParamView> params,
                   std::span<const ParamView> grads) {
  require(params.size() == grads.size(), "rmsprop", grads.size(), params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i].values.size() == grads[i].values.size(), "rmsprop",
            grads[i].values.size(), params[i].values.size());
    if (!all_finite(grads[i].values)) {
      throw Error("non-finite gradient in " + params[i].name);
    }
  }
  if (acc_.empty()) {
    acc_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      acc_[i].assign(params[i].values.size(), 0.0);
    }
  }
  require(acc_.size() == params.size(), "rmsprop state", params.size(), acc_.size());
  const double rho = cfg_.rho, lr = cfg_.lr, eps = cfg_.eps;
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::span<double> theta = params[i].values;
    std::span<const double> g = grads[i].values;
    Vec& acc = acc_[i];
    for (std::size_t k = 0; k < theta.size(); ++k) {
      acc[k] = rho * acc[k] + (1.0 - rho) * g[k] * g[k];
      theta[k] -= lr * g[k] / (std::sqrt(acc[k]) + eps);
    }
  }
}

void glorot_uniform(Tensor2& w, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
  for (double& v : w.data) v = rng.uniform(-bound, bound);
}

void init_dense(DenseParams& p, Rng& rng) {
  glorot_uniform(p.W, rng);
  std::fill(p.b.begin(), p.b.end(), 0.0);
}

void init_lstm(LstmParams& p, Rng& rng) {
  glorot_uniform(p.W, rng);
  std::fill(p.b.begin(), p.b.end(), 0.0);
  for (std::size_t k = 0; k < p.hidden; ++k) p.b[p.hidden + k] = 1.0;
}

void clip_global_norm(std::span<const ParamView> grads, double max_norm) {
  if (!(max_norm > 0.0)) return;
  double sq = 0.0;
  for (const auto& g : grads) {
    for (double v : g.values) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (const auto& g : grads) {
    for (double& v : g.values) v *= scale;
  }
}

}  // namespace scenelay
