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

#include "ocm/loss.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "ocm/errors.hpp"
#include "ocm/parallel.hpp"

namespace ocm {
namespace {

double binomial_pmf(std::size_t n, std::size_t k, double p) {
    double c = 1;
    for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c * std::pow(p, static_cast<double>(k)) * std::pow(1 - p, static_cast<double>(n - k));
}

std::size_t power(std::size_t base, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

double LossParams::channel() const { return std::exp(-alpha_z); }
double LossParams::survival() const { return eta_det * channel(); }

void LossParams::validate() const {
    if (!(eta_det > 0) || eta_det > 1) throw InvalidArgument("eta_det must lie in (0, 1]");
    if (!(alpha_z >= 0) || !std::isfinite(alpha_z)) throw InvalidArgument("alpha_z must be finite and >= 0");
    if (!(survival() > 0)) throw PhysicsError("survival probability underflows to zero");
}

std::vector<std::uint32_t> thin_positions(std::span<const std::uint32_t> positions, double p, Rng& rng) {
    if (!(p > 0) || p > 1) throw InvalidArgument("survival probability must lie in (0, 1]");
    std::vector<std::uint32_t> out;
    out.reserve(positions.size());
    for (auto x : positions)
        if (p >= 1 || rng.bernoulli(p)) out.push_back(x);
    return out;
}

JointDistribution reduced_state(const WaveTensor& state, std::size_t m, std::size_t cap) {
    const std::size_t N = state.photons();
    if (m == 0 || m > N) throw InvalidArgument("survivor count must lie in [1, N]");
    const WaveTensor pos = to_basis(state, Basis::position);
    const Grid& g = pos.grid();
    JointDistribution j{g, m, std::vector<double>(dense_size(g.M, m, cap), 0.0)};
    const std::size_t tail = power(g.M, N - m);
    const double cell = pos.cell();
    for (std::size_t a = 0; a < j.p.size(); ++a) {
        double s = 0;
        for (std::size_t r = 0; r < tail; ++r) s += std::norm(pos[a * tail + r]);
        j.p[a] = s * cell;
    }
    return j;
}

std::vector<Complex> reduced_density_matrix(const WaveTensor& state, std::size_t m, std::size_t cap) {
    const std::size_t N = state.photons();
    if (m == 0 || m > N) throw InvalidArgument("survivor count must lie in [1, N]");
    const WaveTensor pos = to_basis(state, Basis::position);
    const Grid& g = pos.grid();
    const std::size_t dim = dense_size(g.M, m, cap);
    std::vector<Complex> rho(dense_size(dim, 2, cap));
    const std::size_t tail = power(g.M, N - m);
    const double cell = pos.cell();
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) {
            Complex s{};
            for (std::size_t r = 0; r < tail; ++r) s += pos[a * tail + r] * std::conj(pos[b * tail + r]);
            rho[a * dim + b] = s * cell;
        }
    return rho;
}

Distribution centroid_marginal(const JointDistribution& joint) {
    const Grid& g = joint.grid;
    const std::size_t m = joint.photons;
    Distribution d;
    d.offset = g.x(0);
    d.spacing = g.dx / static_cast<double>(m);
    d.period = g.M;
    d.p.assign(m * (g.M - 1) + 1, 0.0);
    for (std::size_t f = 0; f < joint.p.size(); ++f) {
        std::size_t rest = f, sum = 0;
        for (std::size_t n = 0; n < m; ++n) {
            sum += rest % g.M;
            rest /= g.M;
        }
        d.p[sum] += joint.p[f];
    }
    const double t = d.total();
    for (auto& v : d.p) v /= t;
    return d;
}

std::vector<MixtureComponent> density_mixture(const WaveTensor& state, double p, std::size_t cap) {
    if (!(p > 0) || p > 1) throw InvalidArgument("survival probability must lie in (0, 1]");
    const std::size_t N = state.photons();
    std::vector<MixtureComponent> out;
    for (std::size_t m = 0; m <= N; ++m) {
        MixtureComponent c;
        c.weight = binomial_pmf(N, m, p);
        c.survivors = m;
        if (m > 0) c.joint = reduced_state(state, m, cap);
        out.push_back(std::move(c));
    }
    return out;
}

double eq19_variance(const GaussianBeamSpec& spec, const LossParams& lp, double var0, double dx2) {
    lp.validate();
    const double Nz = lp.reduced_photons(static_cast<double>(spec.N0));
    if (!(Nz > 0)) throw PhysicsError("reduced photon number must be > 0");
    return var0 + dx2 / (lp.eta_det * Nz) * (1 - lp.survival());
}

double eq20_width(const GaussianBeamSpec& spec) {
    const double N0 = static_cast<double>(spec.N0);
    const double R0 = spec.R0();
    if (!(spec.delta_k > 0)) throw InvalidArgument("delta_k must be > 0");
    if (N0 * R0 <= 1 + 1e-12) {
        std::ostringstream os;
        os << "beam width formula singular at/below the Heisenberg limit (N0 R0 = " << N0 * R0 << " <= 1)";
        throw PhysicsError(os.str());
    }
    const double a = 1 - 1 / N0;
    return (R0 / N0 + a * a / (1 - 1 / (N0 * R0))) / (4 * spec.delta_k * spec.delta_k);
}

LossSweepInputs loss_inputs(const State& state, double rho) {
    LossSweepInputs in;
    in.var0 = marginal_centroid(state).variance();
    in.dx2 = one_photon_marginal(state).variance();
    in.spec.N0 = photons(state);
    in.spec.rho = rho;
    in.spec.delta_k = 0.5 / std::sqrt(in.dx2);
    return in;
}

std::vector<LossSweepRow> loss_sweep(const State& state, const LossSweepInputs& inputs,
                                     std::span<const LossParams> settings, std::uint64_t trials,
                                     std::uint64_t seed, std::size_t threads) {
    if (trials < 2) throw InvalidArgument("loss sweep needs at least two trials");
    const PositionSampler sampler(state);
    const Grid& g = sampler.grid();
    std::vector<LossSweepRow> rows;
    for (std::size_t i = 0; i < settings.size(); ++i) {
        const LossParams& lp = settings[i];
        lp.validate();
        std::uint64_t mix = seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
        const std::uint64_t stream_seed = splitmix64(mix);
        DetectorModel det;
        det.eta = lp.eta_det;

        std::vector<double> centroid(trials, std::numeric_limits<double>::quiet_NaN());
        std::vector<std::uint32_t> count(trials, 0);
        parallel_chunks(trials, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end; ++t) {
                Rng rng = Rng::stream(stream_seed, t);
                const auto positions = sampler.sample(rng);
                const auto survivors = thin_positions(positions, lp.channel(), rng);
                const auto e = detect(survivors, det, g, rng);
                count[t] = static_cast<std::uint32_t>(e.detected());
                if (auto x = centroid_of_event(e, det, g)) centroid[t] = *x;
            }
        });

        std::vector<double> kept;
        std::map<std::size_t, std::vector<double>> by_m;
        for (std::size_t t = 0; t < trials; ++t) {
            if (std::isnan(centroid[t])) continue;
            kept.push_back(centroid[t]);
            by_m[count[t]].push_back(centroid[t]);
        }
        const auto est = variance_with_ci(kept, stream_seed ^ 0xb0075ULL, kBootstrapResamples, 0.95, threads);
        LossSweepRow row;
        row.params = lp;
        row.survival = lp.survival();
        row.reduced_photons = lp.reduced_photons(static_cast<double>(inputs.spec.N0));
        row.measured_var = est.variance;
        row.ci_lo = est.ci_lo;
        row.ci_hi = est.ci_hi;
        row.eq19_var = eq19_variance(inputs.spec, lp, inputs.var0, inputs.dx2);
        row.rel_dev = (row.measured_var - row.eq19_var) / row.eq19_var;
        row.retained = kept.size();
        for (const auto& [m, xs] : by_m) {
            StratumStats s;
            s.survivors = m;
            s.count = xs.size();
            s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
            double ss = 0;
            for (double x : xs) ss += (x - s.mean) * (x - s.mean);
            s.variance = xs.size() > 1 ? ss / static_cast<double>(xs.size() - 1) : 0.0;
            row.strata.push_back(s);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ocm
