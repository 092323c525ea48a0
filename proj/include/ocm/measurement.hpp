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

// Exact (non-sampled) centroid and absorption distributions.
//
// Centroid distributions live on the lattice {(sum_n x_n)/N}, which for
// grid points x_j = (j - M/2) dx is itself a lattice of spacing dx/N with
// N(M-1)+1 points starting at -L/2. No binning error is introduced.

#include <cstddef>
#include <vector>

#include "ocm/lattice.hpp"
#include "ocm/states.hpp"

namespace ocm {

/// Probability vector on the lattice offset + i * spacing.
struct Distribution {
    double offset = 0;
    double spacing = 1;
    std::vector<double> p;
    /// Number of bins after which the generating grid repeats (M for every
    /// state-derived distribution); 0 means "not periodic". Spectral
    /// analysis folds the distribution onto this period.
    std::size_t period = 0;

    std::size_t size() const { return p.size(); }
    double position(std::size_t i) const { return offset + static_cast<double>(i) * spacing; }
    double mean() const;
    double variance() const;
    double total() const;
};

enum class CentroidLattice {
    open,      ///< N(M-1)+1 bins covering [-L/2, L/2)
    periodic,  ///< M bins, centroid folded modulo L/N onto [-L/(2N), L/(2N))
};

/// p_c(x) proportional to |psi(x, ..., x)|^2 on the original grid.
/// Throws PhysicsError when every diagonal amplitude vanishes.
Distribution conditional_centroid(const WaveTensor& state);
Distribution conditional_centroid(const ProductSum& state, std::size_t cap = kDefaultDenseCap);

/// Marginal centroid distribution: |psi|^2 dx^N accumulated into bins of
/// X = (sum x_n)/N. The dense path enumerates all M^N configurations,
/// partitioned by leading index and reduced in index order, so `threads`
/// never changes the result.
Distribution marginal_centroid(const WaveTensor& state, CentroidLattice lattice = CentroidLattice::open,
                               std::size_t threads = 1);
/// Low-rank path: sum_{r,s} c_r c_s^* conv_n (u_{r,n} u_{s,n}^*) computed in
/// the characteristic-function domain.
Distribution marginal_centroid(const ProductSum& state, CentroidLattice lattice = CentroidLattice::open);
Distribution marginal_centroid(const State& state, CentroidLattice lattice = CentroidLattice::open,
                               std::size_t threads = 1);
/// Post-selected mixture sum_{N>=1} |C_N|^2 p_m^(N) / (1 - |C_0|^2) on the
/// common lattice of spacing dx / lcm(N). Throws PhysicsError for a pure
/// vacuum. Only the open lattice is supported when photon numbers differ.
Distribution marginal_centroid(const PhotonSuperposition& state,
                               CentroidLattice lattice = CentroidLattice::open, std::size_t threads = 1);

/// M-photon absorption pattern
/// sum_{N>=M} C(N,M) |C_N|^2 sum_{x_{M+1..N}} |psi_N(x,..,x,x_{M+1..N})|^2 dx^{N-M}.
Distribution mphoton_absorption(const PhotonSuperposition& state, std::size_t order,
                                std::size_t cap = kDefaultDenseCap);

/// Single-photon intensity (one-photon marginal of |psi|^2).
Distribution one_photon_marginal(const State& state, std::size_t cap = kDefaultDenseCap);

/// Discrete power spectrum of a distribution after folding onto its
/// period. Entry q holds |sum_i p_i exp(-2 pi i q i / P)|^2 at angular
/// frequency freq[q] (inverse length), for q in [-P/2, P/2).
struct Spectrum {
    std::vector<double> freq;
    std::vector<double> power;
    double resolution = 0;  ///< spacing of freq
};
Spectrum power_spectrum(const Distribution& d);

/// Largest |frequency| whose spectral power exceeds rel_tol * total power.
/// For a state-derived p_m this is bounded by 2 N k0; the bound does not
/// apply to arbitrary input vectors.
double spectral_support(const Distribution& d, double rel_tol);

/// Fraction of spectral power at |frequency| > cutoff.
double spectral_power_beyond(const Distribution& d, double cutoff);

struct FringeMetrics {
    double period = 0;
    double visibility = 0;
};

/// Period from the dominant non-DC spectral peak (refined on a zero-padded
/// spectrum by quadratic interpolation) and visibility (max-min)/(max+min)
/// over the central half of the support. Throws PhysicsError("no fringe
/// detected") when no peak exceeds 5x the median spectral floor.
FringeMetrics fringe_metrics(const Distribution& d);

/// 1/2 sum |a - b| on identical lattices.
double total_variation(const Distribution& a, const Distribution& b);
double max_abs_deviation(const Distribution& a, const Distribution& b);

/// Samples `fine` at the points of a coarser lattice whose spacing is an
/// integer multiple of fine.spacing and whose points coincide with fine
/// bins, then renormalizes. Throws InvalidArgument for incompatible lattices.
Distribution resample(const Distribution& fine, double offset, double spacing, std::size_t count);

/// Brings two distributions onto a common lattice (the coarser one),
/// resampling the finer when its spacing divides the coarser's.
std::pair<Distribution, Distribution> align(const Distribution& a, const Distribution& b);

}  // namespace ocm
