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

// Little-endian binary container for WaveTensor and ProductSum.
//
//   offset size  field
//   0      4     magic "OCMW" (dense) or "OCMP" (product sum)
//   4      4     u32 version (= 1)
//   8      8     u64 M
//   16     4     u32 N
//   20     4     u32 basis (0 position, 1 momentum)
//   24     8     f64 dx
//   32     8     f64 k0
//   40     ...   payload
//
// Dense payload: M^N complex amplitudes as (re, im) f64 pairs, row-major
// with the photon-1 index slowest.
// Product-sum payload: u64 R, then per term the coefficient (re, im)
// followed by N factors of M (re, im) pairs each.

#include <filesystem>
#include <variant>

#include "ocm/lattice.hpp"

namespace ocm {

inline constexpr std::uint32_t kContainerVersion = 1;

void save(const std::filesystem::path& path, const WaveTensor& w);
void save(const std::filesystem::path& path, const ProductSum& p);

/// Loads either kind; throws InvalidArgument on malformed files.
std::variant<WaveTensor, ProductSum> load(const std::filesystem::path& path,
                                          std::size_t cap = kDefaultDenseCap);

}  // namespace ocm
