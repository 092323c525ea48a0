// Copyright 2026 The ocm Authors
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

#include <complex>
#include <cstddef>
#include <span>

namespace ocm::fft {

enum class Direction { forward, backward };

/// Unnormalized in-place DFT over a row-major tensor with `rank` axes of
/// length `extent` each. forward uses exp(-2 pi i j l / n).
void transform(std::span<std::complex<double>> data, std::size_t extent, std::size_t rank,
               Direction dir);

/// Unnormalized in-place 1-D DFT.
inline void transform(std::span<std::complex<double>> data, Direction dir) {
    transform(data, data.size(), 1, dir);
}

}  // namespace ocm::fft
