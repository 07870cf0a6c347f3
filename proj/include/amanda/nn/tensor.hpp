// Copyright 2026 The Amanda Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense reverse-mode autodiff over Eigen matrices. Every tensor is rank <= 2
// and stored as a rows x cols matrix; a scalar is 1x1 and a vector is 1xn.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "amanda/error.hpp"

namespace amanda::nn {

using Index = Eigen::Index;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct Node {
  Mat<Scalar> value;
  Mat<Scalar> grad;  // empty until the first backward pass reaches the node
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Pushes this node's grad into the grads of its parents.
  std::function<void(Node&)> propagate;

  bool is_leaf() const { return parents.empty(); }
};

template <typename Scalar>
class BasicTensor {
 public:
  using NodeType = Node<Scalar>;
  using Matrix = Mat<Scalar>;

  BasicTensor() : node_(std::make_shared<NodeType>()) {}

  explicit BasicTensor(Matrix value, bool requires_grad = false)
      : node_(std::make_shared<NodeType>()) {
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
  }

  static BasicTensor scalar(Scalar v, bool requires_grad = false) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return BasicTensor(std::move(m), requires_grad);
  }

  static BasicTensor zeros(Index rows, Index cols, bool requires_grad = false) {
    return BasicTensor(Matrix::Zero(rows, cols), requires_grad);
  }

  static BasicTensor row(std::initializer_list<Scalar> values, bool requires_grad = false) {
    Matrix m(1, static_cast<Index>(values.size()));
    Index i = 0;
    for (Scalar v : values) m(0, i++) = v;
    return BasicTensor(std::move(m), requires_grad);
  }

  static BasicTensor from_node(std::shared_ptr<NodeType> node) {
    BasicTensor t;
    t.node_ = std::move(node);
    return t;
  }

  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  const Matrix& grad() const { return node_->grad; }
  Matrix& mutable_grad() { return node_->grad; }
  bool has_grad() const { return node_->grad.size() == node_->value.size() && node_->grad.size() > 0; }
  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }

  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  Index size() const { return node_->value.size(); }
  std::array<Index, 2> shape() const { return {rows(), cols()}; }
  Scalar item() const {
    if (size() != 1) throw DimensionError("item: tensor is not a scalar");
    return node_->value(0, 0);
  }

  void zero_grad() {
    if (node_->grad.size() > 0) node_->grad.setZero();
  }

  const std::shared_ptr<NodeType>& node() const { return node_; }

 private:
  std::shared_ptr<NodeType> node_;
};

using Tensor = BasicTensor<double>;

// Graph recording switch, per thread. Inference paths disable it so ops
// skip parents and closures entirely.
inline bool& grad_mode() {
  thread_local bool enabled = true;
  return enabled;
}

class NoGradGuard {
 public:
  NoGradGuard() : previous_(grad_mode()) { grad_mode() = false; }
  ~NoGradGuard() { grad_mode() = previous_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

namespace detail {

template <typename Scalar>
void accumulate(Node<Scalar>& n, const Mat<Scalar>& g) {
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

// Builds the result node. Parents and the backward closure are only kept
// when at least one input needs a gradient.
template <typename Scalar>
BasicTensor<Scalar> make_result(Mat<Scalar> value,
                                std::vector<std::shared_ptr<Node<Scalar>>> parents,
                                std::function<void(Node<Scalar>&)> propagate) {
  auto node = std::make_shared<Node<Scalar>>();
  node->value = std::move(value);
  bool needs = grad_mode() && std::any_of(parents.begin(), parents.end(),
                                          [](const auto& p) { return p->requires_grad; });
  if (needs) {
    node->requires_grad = true;
    node->parents = std::move(parents);
    node->propagate = std::move(propagate);
  }
  return BasicTensor<Scalar>::from_node(std::move(node));
}

inline std::string shape_str(Index r, Index c) {
  return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
}

template <typename Scalar>
[[noreturn]] void mismatch(const char* op, const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_str(a.rows(), a.cols()) +
                       " and " + shape_str(b.rows(), b.cols()));
}

}  // namespace detail

template <typename Scalar>
BasicTensor<Scalar> matmul(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  if (a.cols() != b.rows()) detail::mismatch("matmul", a, b);
  return detail::make_result<Scalar>(
      a.value() * b.value(), {a.node(), b.node()}, [](Node<Scalar>& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        if (pa.requires_grad) detail::accumulate<Scalar>(pa, self.grad * pb.value.transpose());
        if (pb.requires_grad) detail::accumulate<Scalar>(pb, pa.value.transpose() * self.grad);
      });
}

// Elementwise sum. `b` may also be a 1xC row broadcast over the rows of `a`,
// or a 1x1 scalar broadcast everywhere.
template <typename Scalar>
BasicTensor<Scalar> add(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  using M = Mat<Scalar>;
  if (a.shape() == b.shape()) {
    return detail::make_result<Scalar>(a.value() + b.value(), {a.node(), b.node()},
                                       [](Node<Scalar>& self) {
                                         detail::accumulate<Scalar>(*self.parents[0], self.grad);
                                         detail::accumulate<Scalar>(*self.parents[1], self.grad);
                                       });
  }
  if (b.rows() == 1 && b.cols() == a.cols()) {
    M out = a.value().rowwise() + b.value().row(0);
    return detail::make_result<Scalar>(std::move(out), {a.node(), b.node()}, [](Node<Scalar>& self) {
      detail::accumulate<Scalar>(*self.parents[0], self.grad);
      if (self.parents[1]->requires_grad) {
        M g = self.grad.colwise().sum();
        detail::accumulate<Scalar>(*self.parents[1], g);
      }
    });
  }
  if (b.size() == 1) {
    M out = a.value().array() + b.value()(0, 0);
    return detail::make_result<Scalar>(std::move(out), {a.node(), b.node()}, [](Node<Scalar>& self) {
      detail::accumulate<Scalar>(*self.parents[0], self.grad);
      if (self.parents[1]->requires_grad) {
        M g(1, 1);
        g(0, 0) = self.grad.sum();
        detail::accumulate<Scalar>(*self.parents[1], g);
      }
    });
  }
  detail::mismatch("add", a, b);
}

template <typename Scalar>
BasicTensor<Scalar> sub(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  if (a.shape() != b.shape()) detail::mismatch("sub", a, b);
  return detail::make_result<Scalar>(a.value() - b.value(), {a.node(), b.node()},
                                     [](Node<Scalar>& self) {
                                       detail::accumulate<Scalar>(*self.parents[0], self.grad);
                                       if (self.parents[1]->requires_grad)
                                         detail::accumulate<Scalar>(*self.parents[1], Mat<Scalar>(-self.grad));
                                     });
}

// Elementwise (Hadamard) product.
template <typename Scalar>
BasicTensor<Scalar> mul(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  if (a.shape() != b.shape()) detail::mismatch("mul", a, b);
  Mat<Scalar> out = a.value().cwiseProduct(b.value());
  return detail::make_result<Scalar>(std::move(out), {a.node(), b.node()}, [](Node<Scalar>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (pa.requires_grad) detail::accumulate<Scalar>(pa, self.grad.cwiseProduct(pb.value));
    if (pb.requires_grad) detail::accumulate<Scalar>(pb, self.grad.cwiseProduct(pa.value));
  });
}

template <typename Scalar>
BasicTensor<Scalar> scale(const BasicTensor<Scalar>& a, Scalar s) {
  return detail::make_result<Scalar>(a.value() * s, {a.node()}, [s](Node<Scalar>& self) {
    detail::accumulate<Scalar>(*self.parents[0], Mat<Scalar>(self.grad * s));
  });
}

// 1 - a, used by gated cells.
template <typename Scalar>
BasicTensor<Scalar> one_minus(const BasicTensor<Scalar>& a) {
  Mat<Scalar> out = (Scalar(1) - a.value().array()).matrix();
  return detail::make_result<Scalar>(std::move(out), {a.node()}, [](Node<Scalar>& self) {
    detail::accumulate<Scalar>(*self.parents[0], Mat<Scalar>(-self.grad));
  });
}

template <typename Scalar>
BasicTensor<Scalar> transpose(const BasicTensor<Scalar>& a) {
  return detail::make_result<Scalar>(a.value().transpose(), {a.node()}, [](Node<Scalar>& self) {
    detail::accumulate<Scalar>(*self.parents[0], Mat<Scalar>(self.grad.transpose()));
  });
}

// Concatenates along axis 0 (rows) or 1 (columns).
template <typename Scalar>
BasicTensor<Scalar> concat(const std::vector<BasicTensor<Scalar>>& parts, int axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  if (axis != 0 && axis != 1) throw DimensionError("concat: axis must be 0 or 1");
  Index rows = 0, cols = 0;
  for (const auto& p : parts) {
    if (axis == 0) {
      if (p.cols() != parts[0].cols()) detail::mismatch("concat", parts[0], p);
      rows += p.rows();
      cols = p.cols();
    } else {
      if (p.rows() != parts[0].rows()) detail::mismatch("concat", parts[0], p);
      cols += p.cols();
      rows = p.rows();
    }
  }
  Mat<Scalar> out(rows, cols);
  std::vector<std::shared_ptr<Node<Scalar>>> nodes;
  std::vector<Index> offsets;
  Index off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    if (axis == 0) {
      out.middleRows(off, p.rows()) = p.value();
      off += p.rows();
    } else {
      out.middleCols(off, p.cols()) = p.value();
      off += p.cols();
    }
    nodes.push_back(p.node());
  }
  return detail::make_result<Scalar>(std::move(out), std::move(nodes),
                                     [axis, offsets](Node<Scalar>& self) {
                                       for (std::size_t i = 0; i < self.parents.size(); ++i) {
                                         auto& p = *self.parents[i];
                                         if (!p.requires_grad) continue;
                                         if (axis == 0) {
                                           detail::accumulate<Scalar>(
                                               p, Mat<Scalar>(self.grad.middleRows(offsets[i], p.value.rows())));
                                         } else {
                                           detail::accumulate<Scalar>(
                                               p, Mat<Scalar>(self.grad.middleCols(offsets[i], p.value.cols())));
                                         }
                                       }
                                     });
}

template <typename Scalar>
BasicTensor<Scalar> concat(std::initializer_list<BasicTensor<Scalar>> parts, int axis) {
  return concat(std::vector<BasicTensor<Scalar>>(parts), axis);
}

// Rows [begin, begin + count) when axis = 0, columns when axis = 1.
template <typename Scalar>
BasicTensor<Scalar> slice(const BasicTensor<Scalar>& a, int axis, Index begin, Index count) {
  Index extent = axis == 0 ? a.rows() : a.cols();
  if (axis != 0 && axis != 1) throw DimensionError("slice: axis must be 0 or 1");
  if (begin < 0 || count < 0 || begin + count > extent)
    throw DimensionError("slice: range [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") outside extent " + std::to_string(extent));
  Mat<Scalar> out = axis == 0 ? Mat<Scalar>(a.value().middleRows(begin, count))
                              : Mat<Scalar>(a.value().middleCols(begin, count));
  return detail::make_result<Scalar>(std::move(out), {a.node()}, [axis, begin, count](Node<Scalar>& self) {
    auto& p = *self.parents[0];
    Mat<Scalar> g = Mat<Scalar>::Zero(p.value.rows(), p.value.cols());
    if (axis == 0) {
      g.middleRows(begin, count) = self.grad;
    } else {
      g.middleCols(begin, count) = self.grad;
    }
    detail::accumulate<Scalar>(p, g);
  });
}

// Row lookup: out.row(i) = table.row(indices[i]). Repeated indices accumulate.
template <typename Scalar>
BasicTensor<Scalar> gather_rows(const BasicTensor<Scalar>& table, std::vector<Index> indices) {
  Mat<Scalar> out(static_cast<Index>(indices.size()), table.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= table.rows())
      throw DimensionError("gather_rows: index " + std::to_string(indices[i]) + " outside " +
                           std::to_string(table.rows()) + " rows");
    out.row(static_cast<Index>(i)) = table.value().row(indices[i]);
  }
  return detail::make_result<Scalar>(std::move(out), {table.node()},
                                     [indices = std::move(indices)](Node<Scalar>& self) {
                                       auto& p = *self.parents[0];
                                       if (!p.requires_grad) return;
                                       if (p.grad.size() == 0) p.grad = Mat<Scalar>::Zero(p.value.rows(), p.value.cols());
                                       for (std::size_t i = 0; i < indices.size(); ++i)
                                         p.grad.row(indices[i]) += self.grad.row(static_cast<Index>(i));
                                     });
}

template <typename Scalar>
BasicTensor<Scalar> tanh(const BasicTensor<Scalar>& a) {
  Mat<Scalar> out = a.value().array().tanh().matrix();
  return detail::make_result<Scalar>(out, {a.node()}, [out](Node<Scalar>& self) {
    Mat<Scalar> g = (self.grad.array() * (Scalar(1) - out.array().square())).matrix();
    detail::accumulate<Scalar>(*self.parents[0], g);
  });
}

template <typename Scalar>
BasicTensor<Scalar> sigmoid(const BasicTensor<Scalar>& a) {
  Mat<Scalar> out = a.value().unaryExpr([](Scalar x) {
    return x >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-x)) : std::exp(x) / (Scalar(1) + std::exp(x));
  });
  return detail::make_result<Scalar>(out, {a.node()}, [out](Node<Scalar>& self) {
    Mat<Scalar> g = (self.grad.array() * out.array() * (Scalar(1) - out.array())).matrix();
    detail::accumulate<Scalar>(*self.parents[0], g);
  });
}

template <typename Scalar>
BasicTensor<Scalar> relu(const BasicTensor<Scalar>& a) {
  Mat<Scalar> out = a.value().cwiseMax(Scalar(0));
  return detail::make_result<Scalar>(out, {a.node()}, [](Node<Scalar>& self) {
    auto& p = *self.parents[0];
    Mat<Scalar> g = (p.value.array() > Scalar(0)).select(self.grad, Scalar(0));
    detail::accumulate<Scalar>(p, g);
  });
}

// Elementwise |a|; the subgradient at 0 is taken as 0.
template <typename Scalar>
BasicTensor<Scalar> abs(const BasicTensor<Scalar>& a) {
  Mat<Scalar> out = a.value().cwiseAbs();
  return detail::make_result<Scalar>(std::move(out), {a.node()}, [](Node<Scalar>& self) {
    auto& p = *self.parents[0];
    Mat<Scalar> g = self.grad.cwiseProduct(Mat<Scalar>(p.value.unaryExpr([](Scalar v) {
      return v > 0 ? Scalar(1) : (v < 0 ? Scalar(-1) : Scalar(0));
    })));
    detail::accumulate<Scalar>(p, g);
  });
}

namespace detail {

template <typename Scalar>
Mat<Scalar> softmax_rows(const Mat<Scalar>& x) {
  Mat<Scalar> out(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    Scalar mx = x.row(r).maxCoeff();
    auto e = (x.row(r).array() - mx).exp();
    out.row(r) = (e / e.sum()).matrix();
  }
  return out;
}

}  // namespace detail

// Softmax along `axis` (1 normalises each row, 0 each column).
template <typename Scalar>
BasicTensor<Scalar> softmax(const BasicTensor<Scalar>& a, int axis = 1) {
  if (axis != 0 && axis != 1) throw DimensionError("softmax: axis must be 0 or 1");
  Mat<Scalar> out = axis == 1 ? detail::softmax_rows<Scalar>(a.value())
                              : Mat<Scalar>(detail::softmax_rows<Scalar>(a.value().transpose()).transpose());
  return detail::make_result<Scalar>(out, {a.node()}, [out, axis](Node<Scalar>& self) {
    // dx = y * (dy - <dy, y>) along the normalised axis
    Mat<Scalar> g;
    if (axis == 1) {
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dots = self.grad.cwiseProduct(out).rowwise().sum();
      g = (out.array() * (self.grad.colwise() - dots).array()).matrix();
    } else {
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic> dots = self.grad.cwiseProduct(out).colwise().sum();
      g = (out.array() * (self.grad.rowwise() - dots).array()).matrix();
    }
    detail::accumulate<Scalar>(*self.parents[0], g);
  });
}

template <typename Scalar>
BasicTensor<Scalar> sum(const BasicTensor<Scalar>& a) {
  Mat<Scalar> out(1, 1);
  out(0, 0) = a.value().sum();
  return detail::make_result<Scalar>(std::move(out), {a.node()}, [](Node<Scalar>& self) {
    auto& p = *self.parents[0];
    detail::accumulate<Scalar>(p, Mat<Scalar>::Constant(p.value.rows(), p.value.cols(), self.grad(0, 0)));
  });
}

template <typename Scalar>
BasicTensor<Scalar> mean(const BasicTensor<Scalar>& a) {
  if (a.size() == 0) throw DimensionError("mean: empty tensor");
  return scale(sum(a), Scalar(1) / static_cast<Scalar>(a.size()));
}

// Mean over all elements of the squared difference.
template <typename Scalar>
BasicTensor<Scalar> mse(const BasicTensor<Scalar>& prediction, const BasicTensor<Scalar>& target) {
  if (prediction.shape() != target.shape()) detail::mismatch("mse", prediction, target);
  auto d = sub(prediction, target);
  return mean(mul(d, d));
}

// Sum of squares of all elements.
template <typename Scalar>
BasicTensor<Scalar> sum_squares(const BasicTensor<Scalar>& a) {
  return sum(mul(a, a));
}

// Mean binary cross-entropy between sigmoid(logits) and targets in [0, 1].
template <typename Scalar>
BasicTensor<Scalar> bce_with_logits(const BasicTensor<Scalar>& logits, const BasicTensor<Scalar>& targets) {
  if (logits.shape() != targets.shape()) detail::mismatch("bce_with_logits", logits, targets);
  const auto& x = logits.value().array();
  const auto& z = targets.value().array();
  // max(x, 0) - x z + log(1 + exp(-|x|))
  Scalar total = (x.max(Scalar(0)) - x * z + (Scalar(1) + (-x.abs()).exp()).log()).sum();
  Mat<Scalar> out(1, 1);
  out(0, 0) = total / static_cast<Scalar>(logits.size());
  return detail::make_result<Scalar>(std::move(out), {logits.node(), targets.node()}, [](Node<Scalar>& self) {
    auto& pl = *self.parents[0];
    auto& pt = *self.parents[1];
    Scalar n = static_cast<Scalar>(pl.value.size());
    Scalar g = self.grad(0, 0) / n;
    if (pl.requires_grad) {
      Mat<Scalar> s = pl.value.unaryExpr([](Scalar v) {
        return v >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-v)) : std::exp(v) / (Scalar(1) + std::exp(v));
      });
      detail::accumulate<Scalar>(pl, Mat<Scalar>((s - pt.value) * g));
    }
    if (pt.requires_grad) detail::accumulate<Scalar>(pt, Mat<Scalar>(-pl.value * g));
  });
}

// Mean over rows of -sum_j t_j log softmax(x)_j.
template <typename Scalar>
BasicTensor<Scalar> softmax_cross_entropy(const BasicTensor<Scalar>& logits, const BasicTensor<Scalar>& targets) {
  if (logits.shape() != targets.shape()) detail::mismatch("softmax_cross_entropy", logits, targets);
  const Mat<Scalar>& x = logits.value();
  Mat<Scalar> log_p = x.colwise() - x.rowwise().maxCoeff();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lse = log_p.array().exp().rowwise().sum().log().matrix();
  log_p.colwise() -= lse;
  Mat<Scalar> out(1, 1);
  out(0, 0) = -(targets.value().array() * log_p.array()).sum() / static_cast<Scalar>(x.rows());
  return detail::make_result<Scalar>(
      std::move(out), {logits.node(), targets.node()}, [log_p = std::move(log_p)](Node<Scalar>& self) {
        auto& pl = *self.parents[0];
        auto& pt = *self.parents[1];
        Scalar g = self.grad(0, 0) / static_cast<Scalar>(pl.value.rows());
        if (pl.requires_grad) {
          Mat<Scalar> p = log_p.array().exp().matrix();
          Mat<Scalar> d = (p.array().colwise() * pt.value.rowwise().sum().array()).matrix() - pt.value;
          detail::accumulate<Scalar>(pl, Mat<Scalar>(d * g));
        }
        if (pt.requires_grad) detail::accumulate<Scalar>(pt, Mat<Scalar>(-log_p * g));
      });
}

template <typename Scalar>
BasicTensor<Scalar> operator+(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  return add(a, b);
}

template <typename Scalar>
BasicTensor<Scalar> operator-(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  return sub(a, b);
}

// Reverse-mode sweep from a scalar loss. Leaves accumulate into their grad
// across calls; interior nodes are reset on every call.
template <typename Scalar>
void backward(const BasicTensor<Scalar>& loss) {
  if (loss.size() != 1) throw DimensionError("backward: loss must be a scalar, got " +
                                             detail::shape_str(loss.rows(), loss.cols()));
  using NodePtr = Node<Scalar>*;
  std::vector<NodePtr> order;
  std::unordered_set<NodePtr> seen;
  std::vector<std::pair<NodePtr, std::size_t>> stack;
  NodePtr root = loss.node().get();
  if (!root->requires_grad) return;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      NodePtr p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  for (NodePtr n : order) {
    if (!n->is_leaf()) n->grad = Mat<Scalar>::Zero(n->value.rows(), n->value.cols());
  }
  Mat<Scalar> seed = Mat<Scalar>::Ones(1, 1);
  detail::accumulate<Scalar>(*root, seed);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodePtr n = *it;
    if (n->propagate) n->propagate(*n);
  }
}

}  // namespace amanda::nn
