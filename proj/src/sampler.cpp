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

#include "ocm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ocm/errors.hpp"
#include "ocm/parallel.hpp"

namespace ocm {
namespace {

std::size_t draw(std::span<const double> cdf, double u) {
    const double target = u * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const auto i = static_cast<std::size_t>(it - cdf.begin());
    return std::min(i, cdf.size() - 1);
}

std::vector<double> cumulative(std::span<const double> w) {
    std::vector<double> c(w.size());
    std::partial_sum(w.begin(), w.end(), c.begin());
    return c;
}

// Low-rank state in the position basis with precomputed Gram suffix
// products, shared by conditional_pmf and the chain-rule sampler.
class LowRankModel {
   public:
    explicit LowRankModel(const ProductSum& state) : grid_(state.grid()), N_(state.photons()) {
        const ProductSum pos = to_basis(state, Basis::position);
        for (const auto& t : pos.terms()) {
            coeff_.push_back(t.coeff);
            factors_.push_back(t.factors);
        }
        R_ = coeff_.size();
        // suffix_[j][r*R+s] = prod_{n>j} <u_{s,n}|u_{r,n}> dx
        suffix_.assign(N_, std::vector<Complex>(R_ * R_, Complex{1.0, 0.0}));
        for (std::size_t j = N_ - 1; j-- > 0;) {
            const std::size_t n = j + 1;
            for (std::size_t r = 0; r < R_; ++r)
                for (std::size_t s = 0; s < R_; ++s) {
                    Complex g{};
                    for (std::size_t x = 0; x < grid_.M; ++x) g += factors_[r][n][x] * std::conj(factors_[s][n][x]);
                    suffix_[j][r * R_ + s] = suffix_[j + 1][r * R_ + s] * g * grid_.dx;
                }
        }
        if (R_ == 1) {
            for (std::size_t n = 0; n < N_; ++n) {
                if (n > 0 && factors_[0][n] == factors_[0][n - 1]) {
                    single_cdf_.push_back(single_cdf_.back());
                    continue;
                }
                std::vector<double> w(grid_.M);
                for (std::size_t x = 0; x < grid_.M; ++x) w[x] = std::norm(factors_[0][n][x]);
                single_cdf_.push_back(cumulative(w));
            }
        }
    }

    std::size_t photons() const { return N_; }
    const Grid& grid() const { return grid_; }

    std::vector<Complex> initial_weights() const {
        std::vector<Complex> a(R_ * R_);
        for (std::size_t r = 0; r < R_; ++r)
            for (std::size_t s = 0; s < R_; ++s) a[r * R_ + s] = coeff_[r] * std::conj(coeff_[s]);
        return a;
    }

    void advance(std::vector<Complex>& a, std::size_t j, std::uint32_t x) const {
        for (std::size_t r = 0; r < R_; ++r)
            for (std::size_t s = 0; s < R_; ++s)
                a[r * R_ + s] *= factors_[r][j][x] * std::conj(factors_[s][j][x]) * grid_.dx;
    }

    std::vector<double> conditional(const std::vector<Complex>& a, std::size_t j) const {
        std::vector<double> w(grid_.M, 0.0);
        double scale = 0;
        for (std::size_t x = 0; x < grid_.M; ++x) {
            Complex v{};
            for (std::size_t r = 0; r < R_; ++r)
                for (std::size_t s = 0; s < R_; ++s)
                    v += a[r * R_ + s] * suffix_[j][r * R_ + s] * factors_[r][j][x] * std::conj(factors_[s][j][x]);
            w[x] = v.real() * grid_.dx;
            scale += std::abs(w[x]);
        }
        for (auto& v : w) {
            if (v < 0) {
                if (v < -1e-12 * scale) {
                    std::ostringstream os;
                    os << "chain-rule sampler: negative conditional mass " << v << " at coordinate " << j
                       << " (relative " << v / scale << ")";
                    throw PhysicsError(os.str());
                }
                v = 0;
            }
        }
        return w;
    }

    void sample(Rng& rng, std::vector<std::uint32_t>& out) const {
        out.resize(N_);
        if (R_ == 1) {
            for (std::size_t n = 0; n < N_; ++n)
                out[n] = static_cast<std::uint32_t>(draw(single_cdf_[n], rng.uniform()));
            return;
        }
        auto a = initial_weights();
        for (std::size_t j = 0; j < N_; ++j) {
            const auto w = conditional(a, j);
            const auto c = cumulative(w);
            if (!(c.back() > 0)) throw PhysicsError("chain-rule sampler: prefix has zero probability");
            out[j] = static_cast<std::uint32_t>(draw(c, rng.uniform()));
            advance(a, j, out[j]);
        }
    }

   private:
    Grid grid_;
    std::size_t N_ = 0, R_ = 0;
    std::vector<Complex> coeff_;
    std::vector<std::vector<std::vector<Complex>>> factors_;
    std::vector<std::vector<Complex>> suffix_;
    std::vector<std::vector<double>> single_cdf_;
};

struct DenseModel {
    Grid grid;
    std::size_t N = 0;
    std::vector<double> cdf;

    explicit DenseModel(const WaveTensor& state) : grid(state.grid()), N(state.photons()) {
        const WaveTensor pos = to_basis(state, Basis::position);
        cdf.resize(pos.size());
        double acc = 0;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            acc += std::norm(pos[i]);
            cdf[i] = acc;
        }
        if (!(acc > 0)) throw InvalidArgument("cannot sample a zero-norm state");
    }

    void sample(Rng& rng, std::vector<std::uint32_t>& out) const {
        std::size_t f = draw(cdf, rng.uniform());
        out.resize(N);
        for (std::size_t n = N; n-- > 0;) {
            out[n] = static_cast<std::uint32_t>(f % grid.M);
            f /= grid.M;
        }
    }
};

std::uint32_t poisson(Rng& rng, double mean) {
    const double limit = std::exp(-mean);
    double prod = rng.uniform();
    std::uint32_t k = 0;
    while (prod > limit) {
        ++k;
        prod *= rng.uniform();
    }
    return k;
}

}  // namespace

struct PositionSampler::Impl {
    struct Mixture {
        std::vector<double> cdf;                // entry 0 is the vacuum
        std::vector<PositionSampler> parts;     // parts[i] pairs with cdf[i + 1]
    };
    std::variant<DenseModel, LowRankModel, Mixture> model;
    Grid grid;
    std::size_t max_photons = 0;
};

PositionSampler::PositionSampler(const WaveTensor& state)
    : impl_(new Impl{DenseModel(state), state.grid(), state.photons()}) {}

PositionSampler::PositionSampler(const ProductSum& state)
    : impl_(new Impl{LowRankModel(state), state.grid(), state.photons()}) {}

PositionSampler::PositionSampler(const State& state)
    : PositionSampler(std::holds_alternative<WaveTensor>(state) ? PositionSampler(std::get<WaveTensor>(state))
                                                                 : PositionSampler(std::get<ProductSum>(state))) {}

PositionSampler::PositionSampler(const PhotonSuperposition& state) {
    Impl::Mixture mix;
    double acc = std::norm(state.vacuum());
    mix.cdf.push_back(acc);
    for (const auto& c : state.components()) {
        acc += std::norm(c.amplitude);
        mix.cdf.push_back(acc);
        mix.parts.emplace_back(c.state);
    }
    impl_.reset(new Impl{std::move(mix), state.grid(), state.max_photons()});
}

PositionSampler::~PositionSampler() = default;
PositionSampler::PositionSampler(PositionSampler&&) noexcept = default;
PositionSampler& PositionSampler::operator=(PositionSampler&&) noexcept = default;

const Grid& PositionSampler::grid() const { return impl_->grid; }
std::size_t PositionSampler::max_photons() const { return impl_->max_photons; }

std::vector<std::uint32_t> PositionSampler::sample(Rng& rng) const {
    std::vector<std::uint32_t> out;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Impl::Mixture>) {
                const std::size_t i = draw(m.cdf, rng.uniform());
                if (i > 0) out = m.parts[i - 1].sample(rng);
            } else {
                m.sample(rng, out);
            }
        },
        impl_->model);
    return out;
}

std::vector<double> conditional_pmf(const ProductSum& state, std::span<const std::uint32_t> prefix) {
    if (prefix.size() >= state.photons()) throw InvalidArgument("prefix must be shorter than N");
    const LowRankModel model(state);
    auto a = model.initial_weights();
    for (std::size_t j = 0; j < prefix.size(); ++j) model.advance(a, j, prefix[j]);
    return model.conditional(a, prefix.size());
}

double DetectorModel::pixel_center(const Grid& g, std::size_t p) const {
    return g.x(p * pixel_factor) + 0.5 * static_cast<double>(pixel_factor - 1) * g.dx;
}

std::vector<std::string> DetectorModel::warnings(const Grid& g) const {
    std::vector<std::string> w;
    const double limit = 0.25 / (2 * g.sin_theta());
    if (pixel_size(g) > limit) {
        std::ostringstream os;
        os << "pixel size " << pixel_size(g) << " exceeds 0.25 lambda/(2 sin theta) = " << limit;
        w.push_back(os.str());
    }
    return w;
}

void DetectorModel::validate(const Grid& g) const {
    if (pixel_factor == 0 || g.M % pixel_factor != 0)
        throw InvalidArgument("pixel_factor must be >= 1 and divide M");
    if (!(eta > 0) || eta > 1) throw InvalidArgument("detector efficiency eta must lie in (0, 1]");
    if (!(dark_rate >= 0)) throw InvalidArgument("dark_rate must be >= 0");
}

std::uint64_t EventRecord::detected() const {
    std::uint64_t m = 0;
    for (const auto& h : hits) m += h.second;
    return m;
}

EventRecord detect(std::span<const std::uint32_t> positions, const DetectorModel& det, const Grid& grid,
                   Rng& rng) {
    std::vector<std::uint32_t> pix;
    pix.reserve(positions.size());
    for (auto x : positions) {
        if (det.eta < 1 && !rng.bernoulli(det.eta)) continue;
        pix.push_back(static_cast<std::uint32_t>(x / det.pixel_factor));
    }
    if (det.dark_rate > 0) {
        const std::size_t P = det.pixels(grid);
        for (std::size_t p = 0; p < P; ++p)
            for (std::uint32_t k = poisson(rng, det.dark_rate); k > 0; --k) pix.push_back(static_cast<std::uint32_t>(p));
    }
    std::sort(pix.begin(), pix.end());
    EventRecord e;
    for (std::size_t i = 0; i < pix.size();) {
        std::size_t j = i;
        while (j < pix.size() && pix[j] == pix[i]) ++j;
        auto count = static_cast<std::uint32_t>(j - i);
        if (!det.number_resolving && count > 1) {
            count = 1;
            e.saturated = true;
        }
        e.hits.emplace_back(pix[i], count);
        i = j;
    }
    return e;
}

std::optional<double> centroid_of_event(const EventRecord& e, const DetectorModel& det, const Grid& grid) {
    const std::uint64_t m = e.detected();
    if (m == 0) return std::nullopt;
    double s = 0;
    for (const auto& [p, c] : e.hits) s += static_cast<double>(c) * static_cast<double>(p);
    return det.pixel_center(grid, 0) + det.pixel_size(grid) * s / static_cast<double>(m);
}

Distribution CentroidHistogram::to_distribution(std::size_t N, std::size_t pixels) const {
    Distribution d;
    d.offset = origin;
    d.spacing = pixel_size / static_cast<double>(N);
    d.p.assign(N * (pixels - 1) + 1, 0.0);
    d.period = pixels;
    const double total = static_cast<double>(retained());
    if (!(total > 0)) throw PhysicsError("histogram has no retained events");
    for (const auto& [k, c] : pooled) {
        const auto scaled = static_cast<__int128>(k.num) * static_cast<__int128>(N);
        if (scaled % k.den != 0) throw InvalidArgument("centroid off the a/N lattice; use the stratified histograms");
        d.p[static_cast<std::size_t>(scaled / k.den)] += static_cast<double>(c) / total;
    }
    return d;
}

RunResult run_histogram(const PositionSampler& sampler, const DetectorModel& det, std::uint64_t trials,
                        std::uint64_t seed, const RunOptions& opts) {
    const Grid& grid = sampler.grid();
    det.validate(grid);
    if (trials == 0) throw InvalidArgument("trials must be >= 1");

    struct Partial {
        std::map<CentroidKey, std::uint64_t> pooled;
        std::map<std::size_t, std::vector<std::uint64_t>> by_count;
        std::uint64_t discarded = 0, saturated = 0;
    };
    const std::size_t workers = std::max<std::size_t>(1, opts.threads);
    std::vector<Partial> partial(workers);
    std::vector<double> centroids(trials, std::numeric_limits<double>::quiet_NaN());
    std::vector<EventLogEntry> events(opts.keep_events ? trials : 0);
    const std::size_t P = det.pixels(grid);

    parallel_chunks(trials, workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
        auto& part = partial[w];
        for (std::size_t t = begin; t < end; ++t) {
            Rng rng = Rng::stream(seed, t);
            const auto positions = sampler.sample(rng);
            EventRecord e = detect(positions, det, grid, rng);
            const std::uint64_t m = e.detected();
            if (e.saturated) ++part.saturated;
            const bool keep = m > 0 && !(e.saturated && det.discard_saturated);
            if (keep) {
                std::int64_t s = 0;
                for (const auto& [p, c] : e.hits) s += static_cast<std::int64_t>(p) * c;
                const auto g = std::gcd(s, static_cast<std::int64_t>(m));
                ++part.pooled[CentroidKey{s / g, static_cast<std::int64_t>(m) / g}];
                auto& strat = part.by_count[m];
                if (strat.empty()) strat.assign(m * (P - 1) + 1, 0);
                ++strat[static_cast<std::size_t>(s)];
                centroids[t] = det.pixel_center(grid, 0) +
                               det.pixel_size(grid) * static_cast<double>(s) / static_cast<double>(m);
            } else {
                ++part.discarded;
            }
            if (opts.keep_events) {
                events[t].trial = t;
                events[t].centroid = keep ? std::optional<double>(centroids[t]) : std::nullopt;
                events[t].event = std::move(e);
            }
        }
    });

    RunResult out;
    auto& h = out.histogram;
    h.origin = det.pixel_center(grid, 0);
    h.pixel_size = det.pixel_size(grid);
    h.trials = trials;
    for (auto& part : partial) {
        for (const auto& [k, c] : part.pooled) h.pooled[k] += c;
        for (auto& [m, v] : part.by_count) {
            auto& dst = h.by_count[m];
            if (dst.empty()) dst.assign(v.size(), 0);
            for (std::size_t i = 0; i < v.size(); ++i) dst[i] += v[i];
        }
        h.discarded += part.discarded;
        h.saturated += part.saturated;
    }
    h.samples.reserve(h.retained());
    for (double x : centroids)
        if (!std::isnan(x)) h.samples.push_back(x);
    out.events = std::move(events);
    return out;
}

VarianceEstimate variance_with_ci(std::span<const double> samples, std::uint64_t seed, std::size_t resamples,
                                  double level, std::size_t threads) {
    const std::size_t n = samples.size();
    if (n < 2) throw PhysicsError("variance needs at least two retained samples (all trials discarded?)");
    VarianceEstimate est;
    est.n = n;
    est.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    double ss = 0;
    for (double x : samples) ss += (x - est.mean) * (x - est.mean);
    est.variance = ss / static_cast<double>(n - 1);
    if (resamples == 0) {
        est.ci_lo = est.ci_hi = est.variance;
        return est;
    }

    std::vector<double> boot(resamples);
    parallel_chunks(resamples, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b) {
            Rng rng = Rng::stream(seed, b);
            double s1 = 0, s2 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = samples[rng.below(n)] - est.mean;
                s1 += d;
                s2 += d * d;
            }
            boot[b] = (s2 - s1 * s1 / static_cast<double>(n)) / static_cast<double>(n - 1);
        }
    });
    std::sort(boot.begin(), boot.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(resamples - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, resamples - 1);
        const double frac = pos - static_cast<double>(lo);
        return boot[lo] + frac * (boot[hi] - boot[lo]);
    };
    est.ci_lo = std::max(0.0, quantile((1 - level) / 2));
    est.ci_hi = std::max(0.0, quantile(1 - (1 - level) / 2));
    return est;
}

VarianceEstimate variance_with_ci(const CentroidHistogram& h, std::uint64_t seed, std::size_t resamples,
                                  double level, std::size_t threads) {
    return variance_with_ci(h.samples, seed, resamples, level, threads);
}

ShiftResult shift_experiment(const State& state, double d, const DetectorModel& det, std::uint64_t trials,
                             std::uint64_t seed, std::size_t threads) {
    const State moved = std::visit([d](const auto& s) -> State { return translate(s, d); }, state);
    const PositionSampler sampler(moved);
    RunOptions opts;
    opts.threads = threads;
    auto run = run_histogram(sampler, det, trials, seed, opts);
    ShiftResult r;
    r.estimate = variance_with_ci(run.histogram, seed ^ 0x5eedb007ULL, kBootstrapResamples, 0.95, threads);
    r.d_hat = r.estimate.mean;
    r.estimator_variance = r.estimate.variance;
    r.histogram = std::move(run.histogram);
    return r;
}

}  // namespace ocm
