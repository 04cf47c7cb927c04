// Copyright 2026 The horizonseg Authors. All Rights Reserved.
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

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <string>

#include "hseg/error.hpp"
#include "hseg/ndarray.hpp"

namespace hseg::nn {

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Records operations in execution order. backward() walks them in reverse,
/// which is a reverse topological order because every node only refers to
/// earlier nodes. A tape supports exactly one backward pass.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&)>;

  Var leaf(NdArray<T> value, bool requires_grad = false) {
    nodes_.push_back({std::move(value), {}, requires_grad, {}});
    return {nodes_.size() - 1};
  }

  /// Appends an op result. The node tracks gradients when any parent does;
  /// `backward` reads grad(result) and accumulates into tracked parents.
  Var record(NdArray<T> value, std::initializer_list<Var> parents, BackwardFn backward) {
    bool tracked = false;
    for (Var p : parents) tracked = tracked || node(p).requires_grad;
    nodes_.push_back({std::move(value), {}, tracked, tracked ? std::move(backward) : BackwardFn{}});
    return {nodes_.size() - 1};
  }

  const NdArray<T>& value(Var v) const { return node(v).value; }
  bool requires_grad(Var v) const { return node(v).requires_grad; }

  /// Gradient accumulator; allocated (zero) on first access.
  NdArray<T>& grad(Var v) {
    Node& n = node(v);
    if (n.grad.shape() != n.value.shape()) n.grad = NdArray<T>(n.value.shape(), T{0});
    return n.grad;
  }

  void backward(Var loss) {
    if (consumed_) {
      throw Error("tape: backward already ran; record a fresh forward pass first");
    }
    consumed_ = true;
    if (value(loss).size() != 1) throw Error("tape: backward needs a scalar output");
    if (!requires_grad(loss)) return;
    grad(loss)[0] = T{1};
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.requires_grad && n.backward) n.backward(*this);
    }
  }

  bool consumed() const { return consumed_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    NdArray<T> value;
    NdArray<T> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Node& node(Var v) {
    if (v.id >= nodes_.size()) throw Error("tape: unknown variable " + std::to_string(v.id));
    return nodes_[v.id];
  }
  const Node& node(Var v) const {
    if (v.id >= nodes_.size()) throw Error("tape: unknown variable " + std::to_string(v.id));
    return nodes_[v.id];
  }

  std::deque<Node> nodes_;
  bool consumed_ = false;
};

}  // namespace hseg::nn
