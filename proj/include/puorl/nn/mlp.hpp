#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "puorl/errors.hpp"
#include "puorl/rng.hpp"

namespace puorl::nn {

enum class Activation { ReLU, Tanh, Identity };
enum class OutputActivation { Identity, Tanh, Sigmoid };

template <typename S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using MatF = MatT<float>;
using VecF = VecT<float>;

// Dense feedforward network. Weights are [in x out]; a batch is one sample
// per row, so forward is Y = act(X * W + b) layer by layer. Hidden layers all
// use `activation`; the last affine layer is followed by `output_activation`.
//
// The scalar type is a template parameter so tests can run the identical
// arithmetic in double precision; production code uses the float alias.
template <typename S>
struct MlpT {
  using Mat = MatT<S>;
  using Vec = VecT<S>;

  std::vector<int> layer_dims;
  std::vector<Mat> weights;  // weights[l]: layer_dims[l] x layer_dims[l+1]
  std::vector<Vec> biases;   // biases[l]: layer_dims[l+1]
  Activation activation = Activation::ReLU;
  OutputActivation output_activation = OutputActivation::Identity;

  struct Grads {
    std::vector<Mat> w;
    std::vector<Vec> b;
    void add(const Grads& o) {
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += o.w[i];
      for (std::size_t i = 0; i < b.size(); ++i) b[i] += o.b[i];
    }
    void scale(S c) {
      for (auto& m : w) m *= c;
      for (auto& v : b) v *= c;
    }
  };

  // Post-activation values per layer; act[0] aliases nothing (input is passed
  // separately to backward). Reused across steps to avoid reallocation.
  struct Workspace {
    std::vector<Mat> act;
  };

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t layer_count() const { return weights.size(); }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      n += static_cast<std::size_t>(weights[l].size()) +
           static_cast<std::size_t>(biases[l].size());
    }
    return n;
  }

  // Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) for weights and biases.
  static MlpT init(std::vector<int> dims, Activation act, OutputActivation out,
                   Rng& rng) {
    if (dims.size() < 2) throw ConfigError("mlp: need at least 2 layer dims");
    for (int d : dims) {
      if (d <= 0) throw ConfigError("mlp: layer dims must be positive");
    }
    MlpT net;
    net.layer_dims = std::move(dims);
    net.activation = act;
    net.output_activation = out;
    net.weights.reserve(net.layer_dims.size() - 1);
    net.biases.reserve(net.layer_dims.size() - 1);
    for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
      const int in = net.layer_dims[l];
      const int out_d = net.layer_dims[l + 1];
      const float bound = 1.0f / std::sqrt(static_cast<float>(in));
      Mat w(in, out_d);
      for (int i = 0; i < in; ++i) {
        for (int j = 0; j < out_d; ++j) {
          w(i, j) = static_cast<S>(rng.uniform_in(-bound, bound));
        }
      }
      Vec b(out_d);
      for (int j = 0; j < out_d; ++j) {
        b(j) = static_cast<S>(rng.uniform_in(-bound, bound));
      }
      net.weights.push_back(std::move(w));
      net.biases.push_back(std::move(b));
    }
    return net;
  }

  static MlpT zeros(std::vector<int> dims, Activation act,
                    OutputActivation out) {
    MlpT net;
    net.layer_dims = std::move(dims);
    net.activation = act;
    net.output_activation = out;
    for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
      net.weights.push_back(
          Mat::Zero(net.layer_dims[l], net.layer_dims[l + 1]));
      net.biases.push_back(Vec::Zero(net.layer_dims[l + 1]));
    }
    return net;
  }

  Grads zero_grads() const {
    Grads g;
    g.w.reserve(weights.size());
    g.b.reserve(biases.size());
    for (std::size_t l = 0; l < weights.size(); ++l) {
      g.w.push_back(Mat::Zero(weights[l].rows(), weights[l].cols()));
      g.b.push_back(Vec::Zero(biases[l].size()));
    }
    return g;
  }

  const Mat& forward(const Mat& batch, Workspace& ws) const {
    if (batch.cols() != input_dim()) {
      throw ShapeError("mlp forward: batch has " +
                       std::to_string(batch.cols()) + " columns, expected " +
                       std::to_string(input_dim()));
    }
    const std::size_t L = weights.size();
    ws.act.resize(L);
    const Mat* prev = &batch;
    for (std::size_t l = 0; l < L; ++l) {
      Mat& a = ws.act[l];
      a.noalias() = (*prev) * weights[l];
      a.rowwise() += biases[l].transpose();
      if (l + 1 < L) {
        apply_hidden(a);
      } else {
        apply_output(a);
      }
      prev = &a;
    }
    return ws.act.back();
  }

  Mat forward(const Mat& batch) const {
    Workspace ws;
    return forward(batch, ws);
  }

  // Gradient of sum(upstream .* forward(batch)) w.r.t. every parameter,
  // using activations cached by a preceding forward(batch, ws) call.
  // If input_grad is non-null it receives the gradient w.r.t. the batch.
  void backward(const Mat& batch, const Workspace& ws, const Mat& upstream,
                Grads& out, Mat* input_grad = nullptr) const {
    const std::size_t L = weights.size();
    if (upstream.rows() != batch.rows() || upstream.cols() != output_dim()) {
      throw ShapeError("mlp backward: upstream is " +
                       std::to_string(upstream.rows()) + "x" +
                       std::to_string(upstream.cols()) + ", expected " +
                       std::to_string(batch.rows()) + "x" +
                       std::to_string(output_dim()));
    }
    Mat g = upstream;
    mul_output_deriv(g, ws.act[L - 1]);
    for (std::size_t l = L; l-- > 0;) {
      const Mat& a_prev = (l == 0) ? batch : ws.act[l - 1];
      out.w[l].noalias() = a_prev.transpose() * g;
      out.b[l] = g.colwise().sum().transpose();
      if (l > 0) {
        Mat gp;
        gp.noalias() = g * weights[l].transpose();
        mul_hidden_deriv(gp, ws.act[l - 1]);
        g.swap(gp);
      } else if (input_grad != nullptr) {
        input_grad->noalias() = g * weights[0].transpose();
      }
    }
  }

  Grads backward(const Mat& batch, const Mat& upstream,
                 Mat* input_grad = nullptr) const {
    Workspace ws;
    forward(batch, ws);
    Grads g = zero_grads();
    backward(batch, ws, upstream, g, input_grad);
    return g;
  }

  // Gradient w.r.t. the input only; skips the parameter-gradient GEMMs.
  void input_gradient(const Mat& batch, const Workspace& ws,
                      const Mat& upstream, Mat& input_grad) const {
    const std::size_t L = weights.size();
    Mat g = upstream;
    mul_output_deriv(g, ws.act[L - 1]);
    for (std::size_t l = L; l-- > 1;) {
      Mat gp;
      gp.noalias() = g * weights[l].transpose();
      mul_hidden_deriv(gp, ws.act[l - 1]);
      g.swap(gp);
    }
    input_grad.noalias() = g * weights[0].transpose();
  }

  template <typename T>
  MlpT<T> cast() const {
    MlpT<T> o;
    o.layer_dims = layer_dims;
    o.activation = activation;
    o.output_activation = output_activation;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      o.weights.push_back(weights[l].template cast<T>());
      o.biases.push_back(biases[l].template cast<T>());
    }
    return o;
  }

 private:
  void apply_hidden(Mat& a) const {
    switch (activation) {
      case Activation::ReLU:
        a = a.cwiseMax(S(0));
        break;
      case Activation::Tanh:
        a = a.array().tanh().matrix();
        break;
      case Activation::Identity:
        break;
    }
  }

  void apply_output(Mat& a) const {
    switch (output_activation) {
      case OutputActivation::Identity:
        break;
      case OutputActivation::Tanh:
        a = a.array().tanh().matrix();
        break;
      case OutputActivation::Sigmoid:
        a = ((a.array() * S(-1)).exp() + S(1)).inverse().matrix();
        break;
    }
  }

  // Derivatives are recoverable from post-activation values for every
  // activation in the enum, so the workspace stores activations only.
  void mul_hidden_deriv(Mat& g, const Mat& a) const {
    switch (activation) {
      case Activation::ReLU:
        g.array() *= (a.array() > S(0)).template cast<S>();
        break;
      case Activation::Tanh:
        g.array() *= (S(1) - a.array().square());
        break;
      case Activation::Identity:
        break;
    }
  }

  void mul_output_deriv(Mat& g, const Mat& a) const {
    switch (output_activation) {
      case OutputActivation::Identity:
        break;
      case OutputActivation::Tanh:
        g.array() *= (S(1) - a.array().square());
        break;
      case OutputActivation::Sigmoid:
        g.array() *= a.array() * (S(1) - a.array());
        break;
    }
  }
};

using Mlp = MlpT<float>;

}  // namespace puorl::nn
