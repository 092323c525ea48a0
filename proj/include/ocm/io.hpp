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

// Result files. Every floating-point value in CSV output is printed with 17
// significant digits so a file round-trips exactly; CSV files open with
// '#'-prefixed metadata lines (key=value) naming the state hash and grid.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ocm/loss.hpp"
#include "ocm/measurement.hpp"
#include "ocm/sampler.hpp"
#include "ocm/states.hpp"

namespace ocm::io {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// "%.17g".
std::string format_double(double v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Hash of grid, photon number, basis, and every amplitude bit pattern.
std::uint64_t state_hash(const State& s);
std::uint64_t state_hash(const PhotonSuperposition& s);
std::string hex(std::uint64_t v);

/// Standard metadata block for a grid and state hash.
Metadata grid_metadata(const Grid& g, std::uint64_t hash);

/// Columns X,p; metadata also records offset, spacing, period, count.
void write_distribution_csv(const std::filesystem::path& path, const Distribution& d, const Metadata& meta);
/// {"support": {offset, spacing, count, period}, "p": [...], "metadata": {...}}.
void write_distribution_json(const std::filesystem::path& path, const Distribution& d, const Metadata& meta);
/// Reads a file written by write_distribution_csv. Lattice parameters come
/// from the metadata when present, otherwise from the X column.
Distribution read_distribution_csv(const std::filesystem::path& path);

/// Columns freq,power.
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s, const Metadata& meta);

/// Pooled histogram, columns X_bin,count (exact centroid values).
void write_histogram_csv(const std::filesystem::path& path, const CentroidHistogram& h, const Metadata& meta);
/// Per detected-count histograms, columns m,X_bin,count (nonzero bins only).
void write_strata_csv(const std::filesystem::path& path, const CentroidHistogram& h, const Metadata& meta);

/// One JSON object per line: trial, m, hits [[pixel, count], ...], X or "discarded".
void write_events_ndjson(const std::filesystem::path& path, std::span<const EventLogEntry> events);

/// Columns eta,alpha_z,p,N_z,measured_var,ci_lo,ci_hi,eq19_var,rel_dev.
void write_loss_sweep_csv(const std::filesystem::path& path, std::span<const LossSweepRow> rows,
                          const Metadata& meta);
/// Columns eta,alpha_z,m,count,mean,variance.
void write_loss_strata_csv(const std::filesystem::path& path, std::span<const LossSweepRow> rows,
                           const Metadata& meta);

/// Writes text, replacing any existing file; throws std::runtime_error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ocm::io
