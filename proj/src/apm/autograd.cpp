// Copyright 2026 The apm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "apm/autograd.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "apm/errors.hpp"

namespace apm {
namespace {

Var MakeNode(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backward) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  bool any = false;
  for (const auto& p : parents) any = any || p->requires_grad;
  n->requires_grad = any;
  if (any) {
    n->parents = std::move(parents);
    n->backward = std::move(backward);
  }
  return n;
}

template <typename F>
Var Unary(const Var& x, F fwd, std::function<void(Node&)> bwd) {
  Tensor out(x->value.rows(), x->value.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(x->value[i]);
  return MakeNode(std::move(out), {x}, std::move(bwd));
}

void CheckLabels(std::span<const int> labels, const Tensor& t, const char* op) {
  if (labels.size() != t.rows()) {
    Fail(ErrorKind::kDimension, std::string(op) + ": " + std::to_string(labels.size()) +
                                    " labels for " + t.ShapeString() + " input");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= t.cols()) {
      Fail(ErrorKind::kInput, std::string(op) + ": label " + std::to_string(y) +
                                  " outside [0, " + std::to_string(t.cols()) + ")");
    }
  }
}

}  // namespace

void TokenBatch::Append(std::span<const std::int32_t> seq) {
  if (offsets.empty()) offsets.push_back(0);
  ids.insert(ids.end(), seq.begin(), seq.end());
  offsets.push_back(ids.size());
}

Var Leaf(Parameter& p) {
  auto n = std::make_shared<Node>();
  n->value = p.value;
  n->param = &p;
  n->requires_grad = p.trainable;
  return n;
}

Var Constant(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  return n;
}

Var Detach(const Var& x) { return Constant(x->value); }

Var Affine(const Var& x, const Var& w, const Var& b) {
  const Tensor& xv = x->value;
  const Tensor& wv = w->value;
  const Tensor& bv = b->value;
  CheckShapes(xv.cols() == wv.rows(), "affine(x, W)", xv, wv);
  CheckShapes(bv.rows() == 1 && bv.cols() == wv.cols(), "affine(W, b)", wv, bv);
  Tensor out = MatMul(xv, wv);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += bv[j];
  }
  return MakeNode(std::move(out), {x, w, b}, [](Node& n) {
    Node& x = *n.parents[0];
    Node& w = *n.parents[1];
    Node& b = *n.parents[2];
    if (x.requires_grad) MatMulTransBAccumulate(n.grad, w.value, x.grad);
    if (w.requires_grad) MatMulTransAAccumulate(x.value, n.grad, w.grad);
    if (b.requires_grad) {
      for (std::size_t i = 0; i < n.grad.rows(); ++i) {
        for (std::size_t j = 0; j < n.grad.cols(); ++j) b.grad[j] += n.grad(i, j);
      }
    }
  });
}

Var MatMulOp(const Var& a, const Var& b) {
  return MakeNode(MatMul(a->value, b->value), {a, b}, [](Node& n) {
    Node& a = *n.parents[0];
    Node& b = *n.parents[1];
    if (a.requires_grad) MatMulTransBAccumulate(n.grad, b.value, a.grad);
    if (b.requires_grad) MatMulTransAAccumulate(a.value, n.grad, b.grad);
  });
}

Var Add(const Var& a, const Var& b) {
  CheckShapes(a->value.SameShape(b->value), "add", a->value, b->value);
  Tensor out = a->value;
  out += b->value;
  return MakeNode(std::move(out), {a, b}, [](Node& n) {
    for (int k = 0; k < 2; ++k) {
      if (n.parents[k]->requires_grad) n.parents[k]->grad += n.grad;
    }
  });
}

Var Sub(const Var& a, const Var& b) {
  CheckShapes(a->value.SameShape(b->value), "sub", a->value, b->value);
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b->value[i];
  return MakeNode(std::move(out), {a, b}, [](Node& n) {
    Node& a = *n.parents[0];
    Node& b = *n.parents[1];
    if (a.requires_grad) a.grad += n.grad;
    if (b.requires_grad) {
      for (std::size_t i = 0; i < n.grad.size(); ++i) b.grad[i] -= n.grad[i];
    }
  });
}

Var Mul(const Var& a, const Var& b) {
  CheckShapes(a->value.SameShape(b->value), "mul", a->value, b->value);
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b->value[i];
  return MakeNode(std::move(out), {a, b}, [](Node& n) {
    Node& a = *n.parents[0];
    Node& b = *n.parents[1];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      if (a.requires_grad) a.grad[i] += n.grad[i] * b.value[i];
      if (b.requires_grad) b.grad[i] += n.grad[i] * a.value[i];
    }
  });
}

Var Scale(const Var& x, double c) {
  return Unary(x, [c](double v) { return c * v; }, [c](Node& n) {
    Node& x = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) x.grad[i] += c * n.grad[i];
  });
}

Var Abs(const Var& x) {
  return Unary(x, [](double v) { return std::fabs(v); }, [](Node& n) {
    Node& x = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      const double v = x.value[i];
      const double s = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      x.grad[i] += s * n.grad[i];
    }
  });
}

Var Tanh(const Var& x) {
  return Unary(x, [](double v) { return std::tanh(v); }, [](Node& n) {
    Node& x = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      const double y = n.value[i];
      x.grad[i] += (1.0 - y * y) * n.grad[i];
    }
  });
}

Var Sigmoid(const Var& x) {
  auto fwd = [](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  };
  return Unary(x, fwd, [](Node& n) {
    Node& x = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      const double y = n.value[i];
      x.grad[i] += y * (1.0 - y) * n.grad[i];
    }
  });
}

Var Exp(const Var& x) {
  return Unary(x, [](double v) { return std::exp(v); }, [](Node& n) {
    Node& x = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) x.grad[i] += n.value[i] * n.grad[i];
  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) Fail(ErrorKind::kDimension, "concat of zero tensors");
  const std::size_t rows = parts[0]->value.rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    CheckShapes(p->value.rows() == rows, "concat", parts[0]->value, p->value);
    cols += p->value.cols();
  }
  Tensor out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const Tensor& v = p->value;
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < v.cols(); ++j) out(i, off + j) = v(i, j);
    }
    off += v.cols();
  }
  return MakeNode(std::move(out), parts, [](Node& n) {
    std::size_t off = 0;
    for (auto& pp : n.parents) {
      Node& p = *pp;
      const std::size_t c = p.value.cols();
      if (p.requires_grad) {
        for (std::size_t i = 0; i < n.grad.rows(); ++i) {
          for (std::size_t j = 0; j < c; ++j) p.grad(i, j) += n.grad(i, off + j);
        }
      }
      off += c;
    }
  });
}

Var SliceCols(const Var& x, std::size_t begin, std::size_t end) {
  const Tensor& v = x->value;
  if (begin > end || end > v.cols()) {
    Fail(ErrorKind::kDimension, "slice [" + std::to_string(begin) + ", " +
                                    std::to_string(end) + ") of " + v.ShapeString());
  }
  Tensor out(v.rows(), end - begin);
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = begin; j < end; ++j) out(i, j - begin) = v(i, j);
  }
  return MakeNode(std::move(out), {x}, [begin](Node& n) {
    Node& x = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.rows(); ++i) {
      for (std::size_t j = 0; j < n.grad.cols(); ++j) x.grad(i, begin + j) += n.grad(i, j);
    }
  });
}

Var EmbedMean(const Var& table, const TokenBatch& tokens) {
  const Tensor& t = table->value;
  const std::size_t rows = tokens.rows();
  const std::size_t dim = t.cols();
  Tensor out(rows, dim);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t lo = tokens.offsets[r], hi = tokens.offsets[r + 1];
    if (hi == lo) Fail(ErrorKind::kInput, "empty token sequence in row " + std::to_string(r));
    const double inv = 1.0 / static_cast<double>(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const std::int32_t id = tokens.ids[k];
      if (id < 0 || static_cast<std::size_t>(id) >= t.rows()) {
        Fail(ErrorKind::kInput, "token id " + std::to_string(id) + " outside vocabulary of " +
                                    std::to_string(t.rows()));
      }
      for (std::size_t j = 0; j < dim; ++j) out(r, j) += inv * t(id, j);
    }
  }
  return MakeNode(std::move(out), {table}, [tokens](Node& n) {
    Node& t = *n.parents[0];
    for (std::size_t r = 0; r < tokens.rows(); ++r) {
      const std::size_t lo = tokens.offsets[r], hi = tokens.offsets[r + 1];
      const double inv = 1.0 / static_cast<double>(hi - lo);
      for (std::size_t k = lo; k < hi; ++k) {
        double* g = &t.grad(tokens.ids[k], 0);
        for (std::size_t j = 0; j < n.grad.cols(); ++j) g[j] += inv * n.grad(r, j);
      }
    }
  });
}

Var Softmax(const Var& logits) {
  const Tensor& z = logits->value;
  Tensor out(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    double mx = z(i, 0);
    for (std::size_t j = 1; j < z.cols(); ++j) mx = std::max(mx, z(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < z.cols(); ++j) {
      out(i, j) = std::exp(z(i, j) - mx);
      sum += out(i, j);
    }
    for (std::size_t j = 0; j < z.cols(); ++j) out(i, j) /= sum;
  }
  return MakeNode(std::move(out), {logits}, [](Node& n) {
    Node& z = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n.grad.cols(); ++j) dot += n.grad(i, j) * n.value(i, j);
      for (std::size_t j = 0; j < n.grad.cols(); ++j) {
        z.grad(i, j) += n.value(i, j) * (n.grad(i, j) - dot);
      }
    }
  });
}

Var SoftmaxCrossEntropy(const Var& logits, std::span<const int> labels) {
  const Tensor& z = logits->value;
  if (z.cols() < 2) Fail(ErrorKind::kInput, "cross-entropy needs at least 2 classes");
  CheckLabels(labels, z, "softmax_cross_entropy");
  Tensor probs(z.rows(), z.cols());
  double loss = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    double mx = z(i, 0);
    for (std::size_t j = 1; j < z.cols(); ++j) mx = std::max(mx, z(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < z.cols(); ++j) sum += std::exp(z(i, j) - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t j = 0; j < z.cols(); ++j) probs(i, j) = std::exp(z(i, j) - lse);
    loss += lse - z(i, labels[i]);
  }
  const double rows = static_cast<double>(z.rows());
  std::vector<int> ys(labels.begin(), labels.end());
  return MakeNode(Tensor::Scalar(loss / rows), {logits},
                  [probs = std::move(probs), ys = std::move(ys), rows](Node& n) {
                    Node& z = *n.parents[0];
                    const double g = n.grad[0] / rows;
                    for (std::size_t i = 0; i < probs.rows(); ++i) {
                      for (std::size_t j = 0; j < probs.cols(); ++j) {
                        const double onehot = static_cast<int>(j) == ys[i] ? 1.0 : 0.0;
                        z.grad(i, j) += g * (probs(i, j) - onehot);
                      }
                    }
                  });
}

Var NllFromProbs(const Var& probs, std::span<const int> labels) {
  const Tensor& p = probs->value;
  CheckLabels(labels, p, "nll");
  double loss = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) loss -= std::log(p(i, labels[i]));
  const double rows = static_cast<double>(p.rows());
  std::vector<int> ys(labels.begin(), labels.end());
  return MakeNode(Tensor::Scalar(loss / rows), {probs}, [ys = std::move(ys), rows](Node& n) {
    Node& p = *n.parents[0];
    const double g = n.grad[0] / rows;
    for (std::size_t i = 0; i < ys.size(); ++i) p.grad(i, ys[i]) -= g / p.value(i, ys[i]);
  });
}

Var Mse(const Var& a, const Var& b) {
  CheckShapes(a->value.SameShape(b->value), "mse", a->value, b->value);
  const std::size_t n = a->value.size();
  if (n == 0) Fail(ErrorKind::kDimension, "mse of empty tensors");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a->value[i] - b->value[i];
    acc += d * d;
  }
  const double count = static_cast<double>(n);
  return MakeNode(Tensor::Scalar(acc / count), {a, b}, [count](Node& n) {
    Node& a = *n.parents[0];
    Node& b = *n.parents[1];
    const double g = 2.0 * n.grad[0] / count;
    for (std::size_t i = 0; i < a.value.size(); ++i) {
      const double d = g * (a.value[i] - b.value[i]);
      if (a.requires_grad) a.grad[i] += d;
      if (b.requires_grad) b.grad[i] -= d;
    }
  });
}

Var KlStandardNormal(const Var& mu, const Var& logvar) {
  CheckShapes(mu->value.SameShape(logvar->value), "kl", mu->value, logvar->value);
  const Tensor& m = mu->value;
  const Tensor& lv = logvar->value;
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    acc += m[i] * m[i] + std::exp(lv[i]) - 1.0 - lv[i];
  }
  const double rows = static_cast<double>(m.rows());
  return MakeNode(Tensor::Scalar(0.5 * acc / rows), {mu, logvar}, [rows](Node& n) {
    Node& m = *n.parents[0];
    Node& lv = *n.parents[1];
    const double g = n.grad[0] / rows;
    for (std::size_t i = 0; i < m.value.size(); ++i) {
      if (m.requires_grad) m.grad[i] += g * m.value[i];
      if (lv.requires_grad) lv.grad[i] += g * 0.5 * (std::exp(lv.value[i]) - 1.0);
    }
  });
}

void Backward(const Var& root, GroupSet allowed, double seed) {
  if (!root->requires_grad) return;
  CheckShapes(root->value.size() == 1, "backward root", root->value, root->value);

  // Iterative post-order DFS over nodes that require grad.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) n->grad = Tensor(n->value.rows(), n->value.cols());
  root->grad[0] = seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward) n->backward(*n);
  }
  for (Node* n : order) {
    if (n->param != nullptr && n->param->trainable && allowed.Contains(n->param->group)) {
      n->param->grad += n->grad;
    }
  }
}

}  // namespace apm
