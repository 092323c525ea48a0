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

// Photon loss: Bernoulli thinning, an exact partial-trace oracle for small
// N, and the analytic Gaussian-beam loss formulas.
//
// The analytic formulas are mean-field (large-N, Gaussian) results. The
// Monte Carlo sweep reports pooled (all m >= 1) and per-m statistics side by
// side, since E[1/m] differs from 1/E[m] at finite N.

#include <cstdint>
#include <span>
#include <vector>

#include "ocm/lattice.hpp"
#include "ocm/measurement.hpp"
#include "ocm/rng.hpp"
#include "ocm/sampler.hpp"
#include "ocm/states.hpp"

namespace ocm {

struct LossParams {
    double eta_det = 1.0;  ///< detector efficiency in (0, 1]
    double alpha_z = 0.0;  ///< propagation loss exponent alpha z >= 0

    double channel() const;   ///< exp(-alpha z)
    double survival() const;  ///< eta_det exp(-alpha z)
    double reduced_photons(double N0) const { return N0 * channel(); }
    void validate() const;
};

/// Keeps each position independently with probability p.
std::vector<std::uint32_t> thin_positions(std::span<const std::uint32_t> positions, double p, Rng& rng);

/// Joint position distribution of m photons on the grid (shape M^m, row-major).
struct JointDistribution {
    Grid grid;
    std::size_t photons = 0;
    std::vector<double> p;
};

/// Diagonal of the partial trace of |psi><psi| over N - m coordinates.
/// Exchange symmetry makes the choice of traced coordinates irrelevant.
JointDistribution reduced_state(const WaveTensor& state, std::size_t m, std::size_t cap = kDefaultDenseCap);

/// Full reduced density matrix rho(x, x') of m photons, M^m x M^m row-major
/// in the position basis. Used to check coherence removal by loss.
std::vector<Complex> reduced_density_matrix(const WaveTensor& state, std::size_t m,
                                            std::size_t cap = kDefaultDenseCap);

/// Centroid marginal of a joint distribution (dx/m lattice, open).
Distribution centroid_marginal(const JointDistribution& joint);

struct MixtureComponent {
    double weight = 0;  ///< C(N, m) p^m (1-p)^(N-m)
    std::size_t survivors = 0;
    JointDistribution joint;  ///< empty for m = 0
};

/// Brute-force loss channel: binomial mixture over survivor counts.
std::vector<MixtureComponent> density_mixture(const WaveTensor& state, double p,
                                              std::size_t cap = kDefaultDenseCap);

/// Centroid variance after loss:
/// var0 + dx2 / (eta N_z) (1 - eta exp(-alpha z)), N_z = N0 exp(-alpha z).
double eq19_variance(const GaussianBeamSpec& spec, const LossParams& lp, double var0, double dx2);

/// Classical beam width squared
/// (1 / (4 dk^2)) [R0/N0 + (1 - 1/N0)^2 / (1 - 1/(N0 R0))].
/// Throws PhysicsError when N0 R0 <= 1, where the formula is singular.
double eq20_width(const GaussianBeamSpec& spec);

struct StratumStats {
    std::size_t survivors = 0;
    std::uint64_t count = 0;
    double mean = 0;
    double variance = 0;
};

struct LossSweepRow {
    LossParams params;
    double survival = 0;
    double reduced_photons = 0;
    double measured_var = 0;
    double ci_lo = 0;
    double ci_hi = 0;
    double eq19_var = 0;
    double rel_dev = 0;  ///< (measured - eq19) / eq19
    std::uint64_t retained = 0;
    std::vector<StratumStats> strata;
};

struct LossSweepInputs {
    GaussianBeamSpec spec;  ///< N0 and R0 feeding the analytic prediction
    double var0 = 0;        ///< lossless centroid variance
    double dx2 = 0;         ///< classical beam width squared
};

/// Exact inputs for the analytic prediction, measured from the state: the
/// lossless marginal centroid variance and the one-photon variance.
LossSweepInputs loss_inputs(const State& state, double rho);

/// For each loss setting: channel thinning exp(-alpha z), detector thinning
/// eta_det, centroid of the survivors (m >= 1), bootstrap CI, and the
/// analytic prediction. Trial t of setting i uses stream seed + i.
std::vector<LossSweepRow> loss_sweep(const State& state, const LossSweepInputs& inputs,
                                     std::span<const LossParams> grid, std::uint64_t trials,
                                     std::uint64_t seed, std::size_t threads = 1);

}  // namespace ocm
