// Copyright 2026 The FSHNN Authors
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
#include <vector>

#include "fshnn/numerics/tensor.hpp"

namespace fshnn {

// Activity over a T-step window, one frame per timestep. Encoders and
// spiking layers produce {0,1} frames; the constant-current input path and
// non-spiking pooling layers carry analog frames through the same type.
class SpikeTrain {
 public:
  SpikeTrain() = default;
  SpikeTrain(Shape frame_shape, std::size_t steps);

  std::size_t steps() const { return frames_.size(); }
  const Shape& frame_shape() const { return frame_shape_; }
  std::size_t neurons() const { return shape_size(frame_shape_); }

  Tensor& frame(std::size_t t) { return frames_.at(t); }
  const Tensor& frame(std::size_t t) const { return frames_.at(t); }
  void set_frame(std::size_t t, Tensor frame);

  // Per-neuron totals over the window.
  Tensor counts() const;
  double total() const;
  bool is_binary() const;

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;

 private:
  Shape frame_shape_;
  std::vector<Tensor> frames_;
};

}  // namespace fshnn
