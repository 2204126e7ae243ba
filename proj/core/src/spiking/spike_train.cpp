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

#include "fshnn/spiking/spike_train.hpp"

#include <utility>

namespace fshnn {

SpikeTrain::SpikeTrain(Shape frame_shape, std::size_t steps)
    : frame_shape_(std::move(frame_shape)) {
  frames_.assign(steps, Tensor(frame_shape_));
}

void SpikeTrain::set_frame(std::size_t t, Tensor frame) {
  require_same_shape(frame.shape(), frame_shape_, "SpikeTrain::set_frame");
  frames_.at(t) = std::move(frame);
}

Tensor SpikeTrain::counts() const {
  Tensor totals(frame_shape_);
  for (const auto& f : frames_) {
    for (std::size_t i = 0; i < f.size(); ++i) totals[i] += f[i];
  }
  return totals;
}

double SpikeTrain::total() const {
  double sum = 0.0;
  for (const auto& f : frames_) {
    for (auto v : f.data()) sum += v;
  }
  return sum;
}

bool SpikeTrain::is_binary() const {
  for (const auto& f : frames_) {
    for (auto v : f.data()) {
      if (v != 0.0f && v != 1.0f) return false;
    }
  }
  return true;
}

}  // namespace fshnn
