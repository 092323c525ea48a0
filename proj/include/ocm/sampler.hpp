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

// Monte Carlo simulation of the detector-array measurement: sample photon
// positions from |psi|^2, thin by detector efficiency, bin into pixels,
// compute the intensity centroid, discard empty frames, and histogram
// repeated trials.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <span>
#include <variant>
#include <vector>

#include "ocm/lattice.hpp"
#include "ocm/measurement.hpp"
#include "ocm/rng.hpp"
#include "ocm/states.hpp"

namespace ocm {

/// Conditional pmf of coordinate j = prefix.size() given the earlier
/// coordinates, for a low-rank state (unnormalized: its sum is the joint
/// probability of the prefix). Cost O(R^2 M) plus Gram products.
std::vector<double> conditional_pmf(const ProductSum& state, std::span<const std::uint32_t> prefix);

/// Draws exact samples of photon grid indices from |psi|^2. Dense states
/// materialize the joint pmf once; low-rank states use chain-rule
/// sampling; superpositions first draw the photon number from |C_N|^2.
class PositionSampler {
   public:
    explicit PositionSampler(const WaveTensor& state);
    explicit PositionSampler(const ProductSum& state);
    explicit PositionSampler(const State& state);
    explicit PositionSampler(const PhotonSuperposition& state);
    ~PositionSampler();
    PositionSampler(PositionSampler&&) noexcept;
    PositionSampler& operator=(PositionSampler&&) noexcept;

    const Grid& grid() const;
    std::size_t max_photons() const;

    /// Grid indices of one shot; empty for a vacuum draw.
    std::vector<std::uint32_t> sample(Rng& rng) const;

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Spatially resolving photon-counting array.
struct DetectorModel {
    std::size_t pixel_factor = 1;  ///< q: each pixel spans q grid points (a = q dx)
    double eta = 1.0;              ///< per-photon detection efficiency
    bool number_resolving = true;  ///< false: a pixel reports at most one count
    bool discard_saturated = false;  ///< drop events flagged as saturated
    double dark_rate = 0.0;        ///< mean dark counts per pixel per frame

    double pixel_size(const Grid& g) const { return static_cast<double>(pixel_factor) * g.dx; }
    std::size_t pixels(const Grid& g) const { return g.M / pixel_factor; }
    /// Center of pixel p.
    double pixel_center(const Grid& g, std::size_t p) const;
    /// Non-fatal warnings (pixel too coarse for the band).
    std::vector<std::string> warnings(const Grid& g) const;
    void validate(const Grid& g) const;
};

struct EventRecord {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> hits;  ///< (pixel, count), pixel ascending
    bool saturated = false;

    std::uint64_t detected() const;
};

/// Independent Bernoulli(eta) retention per photon, then pixel binning.
EventRecord detect(std::span<const std::uint32_t> positions, const DetectorModel& det, const Grid& grid,
                   Rng& rng);

/// Intensity centroid using pixel centers; nullopt when no photon was
/// detected (the frame is discarded).
std::optional<double> centroid_of_event(const EventRecord& e, const DetectorModel& det, const Grid& grid);

/// Exact centroid value sum(count * pixel) / m, kept as a reduced fraction
/// of pixel-index units so histograms never rebin.
struct CentroidKey {
    std::int64_t num = 0;
    std::int64_t den = 1;
    friend bool operator<(const CentroidKey& a, const CentroidKey& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator==(const CentroidKey&, const CentroidKey&) = default;
};

struct CentroidHistogram {
    double origin = 0;      ///< center of pixel 0
    double pixel_size = 0;  ///< a
    std::map<CentroidKey, std::uint64_t> pooled;
    /// Per detected-count histograms: by_count[m][s] counts events whose
    /// pixel-index sum is s (centroid origin + a s / m).
    std::map<std::size_t, std::vector<std::uint64_t>> by_count;
    std::uint64_t trials = 0;
    std::uint64_t discarded = 0;  ///< empty frames plus discarded saturated frames
    std::uint64_t saturated = 0;  ///< frames flagged saturated (kept or not)
    /// Retained centroids in trial order.
    std::vector<double> samples;

    double position(const CentroidKey& k) const {
        return origin + pixel_size * static_cast<double>(k.num) / static_cast<double>(k.den);
    }
    std::uint64_t retained() const { return trials - discarded; }
    /// Pooled counts on the lattice origin + i a / N (N(P-1)+1 bins),
    /// normalized. Throws InvalidArgument if some centroid is off-lattice.
    Distribution to_distribution(std::size_t N, std::size_t pixels) const;
};

struct EventLogEntry {
    std::uint64_t trial = 0;
    EventRecord event;
    std::optional<double> centroid;
};

struct RunOptions {
    std::size_t threads = 1;
    bool keep_events = false;
};

struct RunResult {
    CentroidHistogram histogram;
    std::vector<EventLogEntry> events;  ///< filled when keep_events
};

/// `trials` independent frames; frame t uses Rng::stream(seed, t), and the
/// merged result is identical for any thread count.
RunResult run_histogram(const PositionSampler& sampler, const DetectorModel& det, std::uint64_t trials,
                        std::uint64_t seed, const RunOptions& opts = {});

struct VarianceEstimate {
    std::size_t n = 0;
    double mean = 0;
    double variance = 0;  ///< unbiased
    double ci_lo = 0;     ///< percentile bootstrap bounds on the variance
    double ci_hi = 0;
};

inline constexpr std::size_t kBootstrapResamples = 2000;

/// Mean, unbiased variance, and a seeded percentile-bootstrap CI.
/// Throws PhysicsError with fewer than two samples.
VarianceEstimate variance_with_ci(std::span<const double> samples, std::uint64_t seed,
                                  std::size_t resamples = kBootstrapResamples, double level = 0.95,
                                  std::size_t threads = 1);
VarianceEstimate variance_with_ci(const CentroidHistogram& h, std::uint64_t seed,
                                  std::size_t resamples = kBootstrapResamples, double level = 0.95,
                                  std::size_t threads = 1);

struct ShiftResult {
    double d_hat = 0;                ///< mean centroid
    double estimator_variance = 0;   ///< per-trial centroid variance
    VarianceEstimate estimate;
    CentroidHistogram histogram;
};

/// Translates the state by d, runs the measurement, and reports the mean
/// centroid as an estimator of d.
ShiftResult shift_experiment(const State& state, double d, const DetectorModel& det, std::uint64_t trials,
                             std::uint64_t seed, std::size_t threads = 1);

}  // namespace ocm
