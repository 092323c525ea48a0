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

// Constructors for the named state families: NOON states, quantum Gaussian
// beams, momentum-correlated biphotons, classical product beams, and
// photon-number superpositions.

#include <limits>
#include <variant>
#include <vector>

#include "ocm/lattice.hpp"

namespace ocm {

/// Either storage form of a definite-photon-number state.
using State = std::variant<WaveTensor, ProductSum>;

std::size_t photons(const State& s);
const Grid& grid_of(const State& s);

/// Quantum Gaussian beam parameters. The beam is parametrized by the
/// pairwise momentum correlation rho; R0 = 1 / (1 + (N0 - 1) rho) runs from
/// 1 (standard quantum limit, rho = 0) to 1/N0 (Heisenberg limit, rho = 1).
struct GaussianBeamSpec {
    std::size_t N0 = 1;
    double delta_k = 0;  ///< per-photon rms momentum bandwidth
    double rho = 0;

    double R0() const { return 1.0 / (1.0 + (static_cast<double>(N0) - 1.0) * rho); }
};

/// Largest correlation used when building a dense Gaussian beam; rho = 1
/// has a singular covariance.
inline constexpr double kMaxRho = 1.0 - 1e-6;

struct NoonOptions {
    /// rms width of each branch's Gaussian momentum envelope; 0 selects
    /// dk/8, the narrow-envelope limit (one lattice mode per branch).
    double sigma_env = 0;
    /// Branch momentum; NaN selects the band edge k0.
    double carrier = std::numeric_limits<double>::quiet_NaN();
};

/// Largest band-projection loss a constructor accepts.
inline constexpr double kMaxDiscardedPower = 1e-4;

/// (prod_n g_+(k_n) + prod_n g_-(k_n)) / sqrt 2 with Gaussian envelopes at
/// +-carrier, band-projected. Throws PhysicsError when the envelope does not
/// fit in the band (sigma_env > k0/4, or projection discards more than
/// kMaxDiscardedPower).
Projected<ProductSum> noon_state(std::size_t N, const Grid& grid, const NoonOptions& opts = {});

/// Jointly Gaussian momentum wavefunction exp(-k^T Sigma^{-1} k / 4) with
/// Sigma_nn = delta_k^2 and Sigma_nm = rho delta_k^2, returned in the
/// position basis. rho is clamped to kMaxRho.
Projected<WaveTensor> gaussian_beam(const GaussianBeamSpec& spec, const Grid& grid,
                                    std::size_t cap = kDefaultDenseCap);

/// phi(k1, k2) proportional to G(k1 + k2) H(k1 - k2), Gaussian amplitudes
/// exp(-K^2 / (4 sigma_K^2)) and exp(-kappa^2 / (4 sigma_kappa^2)).
Projected<WaveTensor> correlated_biphoton(const Grid& grid, double sigma_K, double sigma_kappa);

/// Normalized momentum-basis Gaussian profile exp(-k^2/(4 dk^2) - i k x_c),
/// i.e. a position-space Gaussian of rms width 1/(2 dk) centered at x_c.
std::vector<Complex> gaussian_profile(const Grid& grid, double delta_k, double center = 0);

/// gaussian_profile with out-of-band amplitudes removed and the rest
/// renormalized. Throws PhysicsError when more than kMaxDiscardedPower
/// falls outside the band.
Projected<std::vector<Complex>> bandlimited_gaussian_profile(const Grid& grid, double delta_k, double center = 0);

/// One-term product of N identical copies of `profile` (given in `basis`).
/// No dense cap applies. Throws PhysicsError for a profile with power
/// outside the band.
ProductSum classical_product(std::size_t N, const Grid& grid, std::span<const Complex> profile,
                             Basis basis = Basis::momentum);

struct PhotonComponent {
    Complex amplitude;
    State state;
};

/// sum_N C_N |N> with an optional vacuum amplitude. Only |C_N|^2 ever
/// enters the centroid and absorption statistics.
class PhotonSuperposition {
   public:
    PhotonSuperposition(Complex vacuum, std::vector<PhotonComponent> components);

    Complex vacuum() const { return vacuum_; }
    const std::vector<PhotonComponent>& components() const { return components_; }
    const Grid& grid() const;
    std::size_t max_photons() const;

   private:
    Complex vacuum_{};
    std::vector<PhotonComponent> components_;
};

/// Validates sum |C|^2 = 1 (within 1e-9), unique photon numbers, matching
/// grids, and normalized component states.
PhotonSuperposition superpose_photon_numbers(Complex vacuum, std::vector<PhotonComponent> components);

/// A bare Fock state as a superposition with C_N = 1.
PhotonSuperposition as_superposition(State s);

}  // namespace ocm
