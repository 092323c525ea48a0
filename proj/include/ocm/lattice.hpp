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

// Discretized transverse axis and N-photon wavefunction storage.
//
// Units: lengths are in wavelengths (lambda = 1), momenta in inverse
// wavelengths. Both the position and the momentum lattices are centered:
// x_j = (j - M/2) dx and k_l = (l - M/2) dk with dk = 2 pi / (M dx).
// The position <-> momentum map is the unitary DFT matching
// psi(x) = (2 pi)^{-1/2} sum_k dk phi(k) exp(i k x).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace ocm {

using Complex = std::complex<double>;

/// Default cap on dense tensor size (complex amplitudes); 64^4 fits exactly.
inline constexpr std::size_t kDefaultDenseCap = std::size_t{1} << 24;

enum class Basis : std::uint8_t { position = 0, momentum = 1 };

const char* to_string(Basis b);

struct Grid {
    std::size_t M = 0;  ///< point count, a power of two >= 4
    double dx = 0;      ///< position spacing
    double k0 = 0;      ///< bandwidth limit 2 pi sin(theta)

    double extent() const { return static_cast<double>(M) * dx; }
    double dk() const { return 2 * std::numbers::pi / extent(); }
    double sin_theta() const { return k0 / (2 * std::numbers::pi); }
    double x(std::size_t j) const { return (static_cast<double>(j) - static_cast<double>(M / 2)) * dx; }
    double k(std::size_t l) const { return (static_cast<double>(l) - static_cast<double>(M / 2)) * dk(); }
    /// Measure of one lattice cell in the given basis.
    double spacing(Basis b) const { return b == Basis::position ? dx : dk(); }
    /// True when |k_l| <= k0 (with a relative tolerance so an on-lattice k0 counts).
    bool in_band(std::size_t l) const;

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Builds a grid with k0 = 2 pi sin_theta. Throws PhysicsError when the band
/// does not fit under the lattice Nyquist limit pi/dx.
Grid make_grid(std::size_t M, double dx, double sin_theta);

/// M^N with overflow and cap checking; throws ResourceError naming the cap.
std::size_t dense_size(std::size_t M, std::size_t N, std::size_t cap = kDefaultDenseCap);

/// Dense amplitude tensor of shape M^N, row-major with photon 1 slowest.
class WaveTensor {
   public:
    WaveTensor() = default;
    /// Zero tensor.
    WaveTensor(const Grid& grid, std::size_t N, Basis basis, std::size_t cap = kDefaultDenseCap);
    WaveTensor(const Grid& grid, std::size_t N, Basis basis, std::vector<Complex> amp);

    const Grid& grid() const { return grid_; }
    std::size_t photons() const { return N_; }
    Basis basis() const { return basis_; }
    std::size_t size() const { return amp_.size(); }

    std::span<Complex> amp() { return amp_; }
    std::span<const Complex> amp() const { return amp_; }
    Complex& operator[](std::size_t i) { return amp_[i]; }
    const Complex& operator[](std::size_t i) const { return amp_[i]; }

    /// Flat index of a multi-index (photon 1 first).
    std::size_t flat(std::span<const std::uint32_t> idx) const;
    /// Multi-index of a flat index.
    void unflat(std::size_t flat, std::span<std::uint32_t> idx) const;

    /// Measure of one tensor cell: spacing^N.
    double cell() const;

   private:
    Grid grid_{};
    std::size_t N_ = 0;
    Basis basis_ = Basis::position;
    std::vector<Complex> amp_;
};

/// One product term c * prod_n u_n(x_n).
struct ProductTerm {
    Complex coeff{1.0, 0.0};
    std::vector<std::vector<Complex>> factors;  ///< N vectors of length M
};

/// Low-rank state sum_r c_r prod_n u_{r,n}. The sum as a whole is expected
/// to be exchange-symmetric; constructors in states.hpp guarantee it.
class ProductSum {
   public:
    ProductSum() = default;
    ProductSum(const Grid& grid, std::size_t N, Basis basis, std::vector<ProductTerm> terms);

    const Grid& grid() const { return grid_; }
    std::size_t photons() const { return N_; }
    Basis basis() const { return basis_; }
    std::size_t rank() const { return terms_.size(); }
    const std::vector<ProductTerm>& terms() const { return terms_; }
    std::vector<ProductTerm>& terms() { return terms_; }

   private:
    Grid grid_{};
    std::size_t N_ = 0;
    Basis basis_ = Basis::position;
    std::vector<ProductTerm> terms_;
};

/// Position <-> momentum, N-dimensional unitary DFT.
WaveTensor change_basis(const WaveTensor& w);
ProductSum change_basis(const ProductSum& p);
/// change_basis when needed; a copy otherwise.
WaveTensor to_basis(const WaveTensor& w, Basis b);
ProductSum to_basis(const ProductSum& p, Basis b);

/// Single-photon vector transforms (same convention as change_basis).
std::vector<Complex> to_momentum(const Grid& grid, std::span<const Complex> psi);
std::vector<Complex> to_position(const Grid& grid, std::span<const Complex> phi);

double norm_squared(const WaveTensor& w);
double norm_squared(const ProductSum& p);
WaveTensor normalize(const WaveTensor& w);
ProductSum normalize(const ProductSum& p);

/// <a|b> with the spacing^N measure; bases are reconciled if they differ.
Complex overlap(const WaveTensor& a, const WaveTensor& b);
Complex overlap(const ProductSum& a, const ProductSum& b);

/// Projection onto the exchange-symmetric subspace, then normalization.
WaveTensor symmetrize(const WaveTensor& w);

template <class State>
struct Projected {
    State state;
    double discarded = 0;  ///< fraction of the input norm removed by the band limit
};

/// Zeroes momentum components with |k_n| > k0 and renormalizes. The result
/// is returned in the input's basis.
Projected<WaveTensor> bandlimit_project(const WaveTensor& w);
Projected<ProductSum> bandlimit_project(const ProductSum& p);

/// Shifts every photon coordinate by d (momentum phase exp(-i k d) per
/// photon). Periodic: anything pushed across the box edge re-enters on the
/// other side, so states should keep a margin of several widths.
WaveTensor translate(const WaveTensor& w, double d);
ProductSum translate(const ProductSum& p, double d);

/// Exact expansion of a low-rank state; throws ResourceError above cap.
WaveTensor densify(const ProductSum& p, std::size_t cap = kDefaultDenseCap);

}  // namespace ocm
