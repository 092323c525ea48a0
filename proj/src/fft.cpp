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

#include "ocm/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace ocm::fft {
namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

void transform(std::span<std::complex<double>> data, std::size_t extent, std::size_t rank,
               Direction dir) {
    if (data.empty() || rank == 0) return;
    std::vector<int> dims(rank, static_cast<int>(extent));
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        // FFTW_ESTIMATE leaves the array untouched and picks the same plan
        // every time, which keeps results bit-reproducible.
        plan = fftw_plan_dft(static_cast<int>(rank), dims.data(), ptr, ptr, sign,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace ocm::fft
