// Copyright 2026 The UNIN Authors. All Rights Reserved.
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

#include "unin/numerics/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unin/errors.hpp"
#include "unin/numerics/params.hpp"

namespace unin::numerics {

const Tensor& Var::value() const {
  if (tape_ == nullptr) throw ContractError("use of an unbound Var");
  return tape_->value(id_);
}

bool Var::requires_grad() const { return tape_ != nullptr && tape_->requires_grad(id_); }

Var Tape::constant(Tensor value) { return record("constant", std::move(value), {}, nullptr); }

Var Tape::parameter(const std::string& name, Tensor value) {
  if (params_.count(name) > 0) throw ContractError("parameter '" + name + "' bound twice");
  Var v = record("parameter", std::move(value), {}, nullptr);
  nodes_[v.id()].requires_grad = true;
  params_[name] = v.id();
  return v;
}

std::map<std::string, Var> Tape::bind(const ParamSet& params) {
  std::map<std::string, Var> out;
  for (const auto& [name, value] : params.tensors()) out.emplace(name, parameter(name, value));
  return out;
}

Var Tape::record(const char* op, Tensor value, const std::vector<Var>& parents, BackwardFn fn) {
  if (!value.all_finite()) {
    throw NumericError(std::string("primitive '") + op + "' produced a non-finite value");
  }
  bool needs_grad = false;
  for (const Var& p : parents) {
    if (p.tape() != this) throw ContractError(std::string("primitive '") + op + "' mixes tapes");
    needs_grad = needs_grad || nodes_[p.id()].requires_grad;
  }
  Node node;
  node.op = op;
  node.value = std::move(value);
  node.requires_grad = needs_grad;
  if (needs_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(std::size_t id, const Tensor& grad) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (grad.numel() != node.value.numel()) {
    throw ShapeError(std::string("gradient for '") + node.op + "' has shape " +
                     to_string(grad.shape()) + ", value has " + to_string(node.value.shape()));
  }
  if (node.grad.empty()) {
    node.grad = Tensor(node.value.shape(), grad.values());
    return;
  }
  for (std::size_t i = 0; i < grad.numel(); ++i) node.grad[i] += grad[i];
}

GradMap Tape::backward(Var output) {
  if (output.tape() != this) throw ContractError("backward on a Var from another tape");
  if (output.value().numel() != 1) {
    throw ContractError("backward requires a scalar output, got shape " +
                        to_string(output.shape()));
  }
  for (Node& n : nodes_) n.grad = Tensor();
  accumulate(output.id(), Tensor::scalar(1.0));
  for (std::size_t i = output.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || node.grad.empty() || !node.backward) continue;
    if (!node.grad.all_finite()) {
      throw NumericError(std::string("non-finite gradient at primitive '") + node.op + "'");
    }
    const Tensor grad = node.grad;
    node.backward(*this, grad);
  }
  GradMap grads;
  for (const auto& [name, id] : params_) {
    const Node& node = nodes_[id];
    grads[name] = node.grad.empty() ? Tensor::zeros_like(node.value) : node.grad;
    if (!grads[name].all_finite()) {
      throw NumericError("non-finite gradient for parameter '" + name + "'");
    }
  }
  return grads;
}

namespace {

Tape& tape_of(Var v) {
  if (!v.valid()) throw ContractError("use of an unbound Var");
  return *v.tape();
}

[[noreturn]] void shape_mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                   to_string(b.shape()));
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_mismatch(op, a, b);
}

// Number of slices and slice length for a reduction along `axis`, plus the
// strides to walk them.
struct AxisView {
  std::size_t slices;
  std::size_t length;
  std::size_t slice_stride;
  std::size_t elem_stride;
  Shape reduced_shape;

  std::size_t index(std::size_t s, std::size_t k) const {
    return s * slice_stride + k * elem_stride;
  }
};

AxisView axis_view(const char* op, const Tensor& x, std::size_t axis) {
  if (x.rank() == 1) {
    if (axis != 0) throw ShapeError(std::string(op) + ": axis out of range for rank-1 tensor");
    return {1, x.numel(), 0, 1, {1}};
  }
  if (axis == 1) return {x.rows(), x.cols(), x.cols(), 1, {x.rows(), 1}};
  if (axis == 0) return {x.cols(), x.rows(), 1, x.cols(), {1, x.cols()}};
  throw ShapeError(std::string(op) + ": axis must be 0 or 1");
}

template <typename Fwd, typename Deriv>
Var unary(const char* op, Var x, Fwd fwd, Deriv deriv) {
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.numel(); ++i) out[i] = fwd(xv[i]);
  const std::size_t xid = x.id();
  return tape_of(x).record(op, std::move(out), {x},
                           [xid, deriv](Tape& t, const Tensor& g) {
                             const Tensor& in = t.value(xid);
                             Tensor dx(in.shape());
                             for (std::size_t i = 0; i < in.numel(); ++i) {
                               dx[i] = g[i] * deriv(in[i]);
                             }
                             t.accumulate(xid, dx);
                           });
}

Tensor matmul_values(const Tensor& a, const Tensor& b, bool ta, bool tb) {
  const std::size_t ar = ta ? a.cols() : a.rows();
  const std::size_t ac = ta ? a.rows() : a.cols();
  const std::size_t br = tb ? b.cols() : b.rows();
  const std::size_t bc = tb ? b.rows() : b.cols();
  if (ac != br) shape_mismatch("matmul", a, b);
  Tensor out({ar, bc});
  for (std::size_t i = 0; i < ar; ++i) {
    for (std::size_t k = 0; k < ac; ++k) {
      const double aik = ta ? a(k, i) : a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < bc; ++j) out(i, j) += aik * (tb ? b(j, k) : b(k, j));
    }
  }
  return out;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tensor out = matmul_values(a.value(), b.value(), false, false);
  const std::size_t aid = a.id(), bid = b.id();
  return tape_of(a).record("matmul", std::move(out), {a, b}, [aid, bid](Tape& t, const Tensor& g) {
    const Tensor& av = t.value(aid);
    const Tensor& bv = t.value(bid);
    if (t.requires_grad(aid)) t.accumulate(aid, matmul_values(g, bv, false, true));
    if (t.requires_grad(bid)) t.accumulate(bid, matmul_values(av, g, true, false));
  });
}

Var transpose(Var a) {
  const Tensor& av = a.value();
  Tensor out({av.cols(), av.rows()});
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = 0; j < av.cols(); ++j) out(j, i) = av(i, j);
  const std::size_t aid = a.id();
  return tape_of(a).record("transpose", std::move(out), {a}, [aid](Tape& t, const Tensor& g) {
    Tensor dx({g.cols(), g.rows()});
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) dx(j, i) = g(i, j);
    t.accumulate(aid, dx);
  });
}

Var concat(const std::vector<Var>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  if (axis > 1) throw ShapeError("concat: axis must be 0 or 1");
  const Tensor& first = parts.front().value();
  std::size_t total = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    if (axis == 0 && v.cols() != first.cols()) shape_mismatch("concat", first, v);
    if (axis == 1 && v.rows() != first.rows()) shape_mismatch("concat", first, v);
    total += axis == 0 ? v.rows() : v.cols();
  }
  Tensor out(axis == 0 ? Shape{total, first.cols()} : Shape{first.rows(), total});
  std::vector<std::size_t> ids, offsets;
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t i = 0; i < v.rows(); ++i)
      for (std::size_t j = 0; j < v.cols(); ++j) {
        if (axis == 0) out(off + i, j) = v(i, j);
        else out(i, off + j) = v(i, j);
      }
    ids.push_back(p.id());
    offsets.push_back(off);
    off += axis == 0 ? v.rows() : v.cols();
  }
  return tape_of(parts.front())
      .record("concat", std::move(out), parts, [ids, offsets, axis](Tape& t, const Tensor& g) {
        for (std::size_t n = 0; n < ids.size(); ++n) {
          if (!t.requires_grad(ids[n])) continue;
          const Tensor& v = t.value(ids[n]);
          Tensor dx(v.shape());
          for (std::size_t i = 0; i < v.rows(); ++i)
            for (std::size_t j = 0; j < v.cols(); ++j)
              dx(i, j) = axis == 0 ? g(offsets[n] + i, j) : g(i, offsets[n] + j);
          t.accumulate(ids[n], dx);
        }
      });
}

Var reshape(Var a, Shape shape) {
  Tensor out = a.value().reshaped(std::move(shape));
  const std::size_t aid = a.id();
  return tape_of(a).record("reshape", std::move(out), {a},
                           [aid](Tape& t, const Tensor& g) { t.accumulate(aid, g); });
}

Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  const std::size_t extent = av.rank() == 1 ? av.numel() : (axis == 0 ? av.rows() : av.cols());
  if (axis > 1 || (av.rank() == 1 && axis != 0) || begin >= end || end > extent) {
    throw ShapeError("slice [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") on axis " + std::to_string(axis) + " of shape " + to_string(av.shape()));
  }
  const bool by_col = av.rank() == 1 || axis == 1;
  const std::size_t len = end - begin;
  Shape shape = av.rank() == 1 ? Shape{len} : (by_col ? Shape{av.rows(), len} : Shape{len, av.cols()});
  Tensor out(shape);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = by_col ? av(i, begin + j) : av(begin + i, j);
  const std::size_t aid = a.id();
  return tape_of(a).record("slice", std::move(out), {a}, [aid, by_col, begin](Tape& t, const Tensor& g) {
    Tensor dx = Tensor::zeros_like(t.value(aid));
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) {
        if (by_col) dx(i, begin + j) = g(i, j);
        else dx(begin + i, j) = g(i, j);
      }
    t.accumulate(aid, dx);
  });
}

Var add(Var a, Var b) {
  require_same_shape("add", a.value(), b.value());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] += b.value()[i];
  const std::size_t aid = a.id(), bid = b.id();
  return tape_of(a).record("add", std::move(out), {a, b}, [aid, bid](Tape& t, const Tensor& g) {
    t.accumulate(aid, g);
    t.accumulate(bid, g);
  });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a.value(), b.value());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= b.value()[i];
  const std::size_t aid = a.id(), bid = b.id();
  return tape_of(a).record("sub", std::move(out), {a, b}, [aid, bid](Tape& t, const Tensor& g) {
    t.accumulate(aid, g);
    Tensor neg = g;
    for (double& v : neg.data()) v = -v;
    t.accumulate(bid, neg);
  });
}

Var mul(Var a, Var b) {
  require_same_shape("mul", a.value(), b.value());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= b.value()[i];
  const std::size_t aid = a.id(), bid = b.id();
  return tape_of(a).record("mul", std::move(out), {a, b}, [aid, bid](Tape& t, const Tensor& g) {
    const Tensor& av = t.value(aid);
    const Tensor& bv = t.value(bid);
    if (t.requires_grad(aid)) {
      Tensor da(av.shape());
      for (std::size_t i = 0; i < g.numel(); ++i) da[i] = g[i] * bv[i];
      t.accumulate(aid, da);
    }
    if (t.requires_grad(bid)) {
      Tensor db(bv.shape());
      for (std::size_t i = 0; i < g.numel(); ++i) db[i] = g[i] * av[i];
      t.accumulate(bid, db);
    }
  });
}

Var div(Var a, Var b) {
  require_same_shape("div", a.value(), b.value());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] /= b.value()[i];
  const std::size_t aid = a.id(), bid = b.id();
  return tape_of(a).record("div", std::move(out), {a, b}, [aid, bid](Tape& t, const Tensor& g) {
    const Tensor& av = t.value(aid);
    const Tensor& bv = t.value(bid);
    if (t.requires_grad(aid)) {
      Tensor da(av.shape());
      for (std::size_t i = 0; i < g.numel(); ++i) da[i] = g[i] / bv[i];
      t.accumulate(aid, da);
    }
    if (t.requires_grad(bid)) {
      Tensor db(bv.shape());
      for (std::size_t i = 0; i < g.numel(); ++i) db[i] = -g[i] * av[i] / (bv[i] * bv[i]);
      t.accumulate(bid, db);
    }
  });
}

Var add_row(Var a, Var bias) {
  const Tensor& av = a.value();
  const Tensor& bv = bias.value();
  if (bv.numel() != av.cols()) shape_mismatch("add_row", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = 0; j < av.cols(); ++j) out(i, j) += bv[j];
  const std::size_t aid = a.id(), bid = bias.id();
  return tape_of(a).record("add_row", std::move(out), {a, bias}, [aid, bid](Tape& t, const Tensor& g) {
    t.accumulate(aid, g);
    if (t.requires_grad(bid)) {
      Tensor db = Tensor::zeros_like(t.value(bid));
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) db[j] += g(i, j);
      t.accumulate(bid, db);
    }
  });
}

Var scale(Var a, double factor) {
  return unary("scale", a, [factor](double v) { return factor * v; },
               [factor](double) { return factor; });
}

Var add_scalar(Var a, double offset) {
  return unary("add_scalar", a, [offset](double v) { return v + offset; },
               [](double) { return 1.0; });
}

Var relu(Var x) {
  return unary("relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(Var x, double slope) {
  return unary("leaky_relu", x, [slope](double v) { return v > 0.0 ? v : slope * v; },
               [slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

Var exp(Var x) {
  return unary("exp", x, [](double v) { return std::exp(v); },
               [](double v) { return std::exp(v); });
}

Var log(Var x) {
  return unary("log", x, [](double v) { return std::log(v); }, [](double v) { return 1.0 / v; });
}

Var tanh(Var x) {
  return unary("tanh", x, [](double v) { return std::tanh(v); },
               [](double v) {
                 const double th = std::tanh(v);
                 return 1.0 - th * th;
               });
}

Var square(Var x) {
  return unary("square", x, [](double v) { return v * v; }, [](double v) { return 2.0 * v; });
}

Var softmax(Var x, std::size_t axis, const std::vector<bool>* mask) {
  const Tensor& xv = x.value();
  const AxisView view = axis_view("softmax", xv, axis);
  if (mask != nullptr && mask->size() != view.length) {
    throw ShapeError("softmax: mask length " + std::to_string(mask->size()) +
                     " does not match axis length " + std::to_string(view.length));
  }
  auto on = [mask](std::size_t k) { return mask == nullptr || (*mask)[k]; };
  Tensor out(xv.shape());
  for (std::size_t s = 0; s < view.slices; ++s) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < view.length; ++k)
      if (on(k)) hi = std::max(hi, xv[view.index(s, k)]);
    if (!std::isfinite(hi)) throw ContractError("softmax: degenerate mask, every entry masked");
    double z = 0.0;
    for (std::size_t k = 0; k < view.length; ++k)
      if (on(k)) z += std::exp(xv[view.index(s, k)] - hi);
    for (std::size_t k = 0; k < view.length; ++k)
      out[view.index(s, k)] = on(k) ? std::exp(xv[view.index(s, k)] - hi) / z : 0.0;
  }
  const std::size_t xid = x.id();
  Tensor y = out;
  return tape_of(x).record("softmax", std::move(out), {x}, [xid, view, y](Tape& t, const Tensor& g) {
    Tensor dx(y.shape());
    for (std::size_t s = 0; s < view.slices; ++s) {
      double dot = 0.0;
      for (std::size_t k = 0; k < view.length; ++k) dot += y[view.index(s, k)] * g[view.index(s, k)];
      for (std::size_t k = 0; k < view.length; ++k) {
        const std::size_t i = view.index(s, k);
        dx[i] = y[i] * (g[i] - dot);
      }
    }
    t.accumulate(xid, dx);
  });
}

Var logsumexp(Var x, std::size_t axis) {
  const Tensor& xv = x.value();
  const AxisView view = axis_view("logsumexp", xv, axis);
  Tensor out(view.reduced_shape);
  Tensor weights(xv.shape());
  for (std::size_t s = 0; s < view.slices; ++s) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < view.length; ++k) hi = std::max(hi, xv[view.index(s, k)]);
    double z = 0.0;
    for (std::size_t k = 0; k < view.length; ++k) z += std::exp(xv[view.index(s, k)] - hi);
    out[s] = hi + std::log(z);
    for (std::size_t k = 0; k < view.length; ++k)
      weights[view.index(s, k)] = std::exp(xv[view.index(s, k)] - out[s]);
  }
  const std::size_t xid = x.id();
  return tape_of(x).record("logsumexp", std::move(out), {x},
                           [xid, view, weights](Tape& t, const Tensor& g) {
                             Tensor dx(weights.shape());
                             for (std::size_t s = 0; s < view.slices; ++s)
                               for (std::size_t k = 0; k < view.length; ++k) {
                                 const std::size_t i = view.index(s, k);
                                 dx[i] = g[s] * weights[i];
                               }
                             t.accumulate(xid, dx);
                           });
}

Var max_reduce(Var x, std::size_t axis) {
  const Tensor& xv = x.value();
  const AxisView view = axis_view("max_reduce", xv, axis);
  Tensor out(view.reduced_shape);
  std::vector<std::size_t> argmax(view.slices);
  for (std::size_t s = 0; s < view.slices; ++s) {
    std::size_t best = view.index(s, 0);
    for (std::size_t k = 1; k < view.length; ++k)
      if (xv[view.index(s, k)] > xv[best]) best = view.index(s, k);
    argmax[s] = best;
    out[s] = xv[best];
  }
  const std::size_t xid = x.id();
  return tape_of(x).record("max_reduce", std::move(out), {x}, [xid, argmax](Tape& t, const Tensor& g) {
    Tensor dx = Tensor::zeros_like(t.value(xid));
    for (std::size_t s = 0; s < argmax.size(); ++s) dx[argmax[s]] += g[s];
    t.accumulate(xid, dx);
  });
}

Var sum(Var x) {
  double total = 0.0;
  for (double v : x.value().data()) total += v;
  const std::size_t xid = x.id();
  return tape_of(x).record("sum", Tensor::scalar(total), {x}, [xid](Tape& t, const Tensor& g) {
    t.accumulate(xid, Tensor(t.value(xid).shape(), g.item()));
  });
}

Var conv1d_same(Var x, Var kernel, std::optional<Var> bias) {
  const Tensor& xv = x.value();
  const Tensor& kv = kernel.value();
  if (kv.rows() != 1) throw ShapeError("conv1d_same: kernel must be a single row, got " + to_string(kv.shape()));
  if (bias && bias->value().numel() != 1) {
    throw ShapeError("conv1d_same: bias must be a scalar, got " + to_string(bias->shape()));
  }
  const std::size_t k = kv.numel();
  const std::size_t len = xv.cols();
  const std::size_t left = conv_left_pad(k);
  const double b = bias ? bias->item() : 0.0;
  Tensor out(xv.shape());
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t j = 0; j < len; ++j) {
      double acc = b;
      for (std::size_t tau = 0; tau < k; ++tau) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(j + tau) - static_cast<std::ptrdiff_t>(left);
        if (src >= 0 && src < static_cast<std::ptrdiff_t>(len)) acc += kv[tau] * xv(r, src);
      }
      out(r, j) = acc;
    }
  const std::size_t xid = x.id(), kid = kernel.id();
  const std::optional<std::size_t> bid = bias ? std::optional<std::size_t>(bias->id()) : std::nullopt;
  std::vector<Var> parents{x, kernel};
  if (bias) parents.push_back(*bias);
  return tape_of(x).record("conv1d_same", std::move(out), parents,
                           [xid, kid, bid, k, left](Tape& t, const Tensor& g) {
                             const Tensor& in = t.value(xid);
                             const Tensor& ker = t.value(kid);
                             const std::size_t n = in.cols();
                             Tensor dx = Tensor::zeros_like(in);
                             Tensor dk = Tensor::zeros_like(ker);
                             double db = 0.0;
                             for (std::size_t r = 0; r < in.rows(); ++r)
                               for (std::size_t j = 0; j < n; ++j) {
                                 const double gj = g(r, j);
                                 db += gj;
                                 for (std::size_t tau = 0; tau < k; ++tau) {
                                   const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(j + tau) -
                                                              static_cast<std::ptrdiff_t>(left);
                                   if (src < 0 || src >= static_cast<std::ptrdiff_t>(n)) continue;
                                   dx(r, src) += ker[tau] * gj;
                                   dk[tau] += in(r, src) * gj;
                                 }
                               }
                             t.accumulate(xid, dx);
                             t.accumulate(kid, dk);
                             if (bid) t.accumulate(*bid, Tensor::scalar(db));
                           });
}

namespace eval {

Tensor softmax(const Tensor& x, std::size_t axis, const std::vector<bool>* mask) {
  Tape tape;
  return numerics::softmax(tape.constant(x), axis, mask).value();
}

Tensor max_reduce(const Tensor& x, std::size_t axis) {
  Tape tape;
  return numerics::max_reduce(tape.constant(x), axis).value();
}

Tensor conv1d_same(const Tensor& x, const Tensor& kernel, double bias) {
  Tape tape;
  return numerics::conv1d_same(tape.constant(x), tape.constant(kernel),
                               tape.constant(Tensor::scalar(bias)))
      .value();
}

Tensor matmul(const Tensor& a, const Tensor& b) { return matmul_values(a, b, false, false); }

}  // namespace eval

}  // namespace unin::numerics
