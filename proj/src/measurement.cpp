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

#include "ocm/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ocm/errors.hpp"
#include "ocm/fft.hpp"
#include "ocm/parallel.hpp"

namespace ocm {
namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::size_t open_bins(std::size_t M, std::size_t N) { return N * (M - 1) + 1; }

Distribution open_lattice(const Grid& g, std::size_t N) {
    Distribution d;
    d.offset = g.x(0);
    d.spacing = g.dx / static_cast<double>(N);
    d.p.assign(open_bins(g.M, N), 0.0);
    d.period = g.M;
    return d;
}

void normalize_in_place(Distribution& d, const char* what) {
    const double t = d.total();
    if (!(t > 0) || !std::isfinite(t)) throw PhysicsError(std::string(what) + ": distribution identically zero");
    for (auto& v : d.p) v /= t;
}

// Clears roundoff negatives from FFT-based accumulation.
void clip_roundoff(std::vector<double>& p) {
    double peak = 0;
    for (double v : p) peak = std::max(peak, std::abs(v));
    for (auto& v : p) {
        if (v < 0) {
            if (v < -1e-9 * peak) throw std::logic_error("negative probability mass beyond roundoff");
            v = 0;
        }
    }
}

Distribution fold(const Distribution& open, std::size_t M, std::size_t N) {
    Distribution d;
    d.spacing = open.spacing;
    d.offset = -static_cast<double>(M / 2) * open.spacing;
    d.p.assign(M, 0.0);
    d.period = M;
    const std::size_t shift = ((N - 1) * (M / 2)) % M;
    for (std::size_t b = 0; b < open.size(); ++b) d.p[(b + M - shift) % M] += open.p[b];
    return d;
}

std::vector<std::vector<Complex>> position_factors(const ProductTerm& t, const Grid& g, Basis basis) {
    if (basis == Basis::position) return t.factors;
    std::vector<std::vector<Complex>> out;
    out.reserve(t.factors.size());
    for (const auto& f : t.factors) out.push_back(to_position(g, f));
    return out;
}

struct PositionTerms {
    std::vector<Complex> coeff;
    std::vector<std::vector<std::vector<Complex>>> factors;  // [r][n][x]
};

PositionTerms position_terms(const ProductSum& p) {
    PositionTerms pt;
    for (const auto& t : p.terms()) {
        pt.coeff.push_back(t.coeff);
        pt.factors.push_back(position_factors(t, p.grid(), p.basis()));
    }
    return pt;
}

double binomial(std::size_t n, std::size_t k) {
    double r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// Unnormalized M-photon pattern of one Fock component (the integral in the
// absorption formula, before the binomial and |C_N|^2 weights).
std::vector<double> absorption_pattern(const WaveTensor& w, std::size_t order) {
    const WaveTensor pos = to_basis(w, Basis::position);
    const Grid& g = pos.grid();
    const std::size_t N = pos.photons();
    const std::size_t M = g.M;
    std::size_t tail = 1;
    for (std::size_t i = order; i < N; ++i) tail *= M;
    std::size_t diag = 0;
    for (std::size_t i = 0; i < order; ++i) diag = diag * M + 1;
    const double measure = std::pow(g.dx, static_cast<double>(N - order));
    std::vector<double> out(M, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        const std::size_t base = j * diag * tail;
        double s = 0;
        for (std::size_t r = 0; r < tail; ++r) s += std::norm(pos[base + r]);
        out[j] = s * measure;
    }
    return out;
}

std::vector<double> absorption_pattern(const ProductSum& p, std::size_t order) {
    const Grid& g = p.grid();
    const std::size_t N = p.photons();
    const auto pt = position_terms(p);
    const std::size_t R = pt.coeff.size();
    std::vector<double> out(g.M, 0.0);
    for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t s = 0; s < R; ++s) {
            Complex weight = pt.coeff[r] * std::conj(pt.coeff[s]);
            for (std::size_t n = order; n < N; ++n) {
                Complex gram{};
                for (std::size_t x = 0; x < g.M; ++x)
                    gram += pt.factors[r][n][x] * std::conj(pt.factors[s][n][x]);
                weight *= gram * g.dx;
            }
            for (std::size_t x = 0; x < g.M; ++x) {
                Complex prod = weight;
                for (std::size_t n = 0; n < order; ++n)
                    prod *= pt.factors[r][n][x] * std::conj(pt.factors[s][n][x]);
                out[x] += prod.real();
            }
        }
    }
    clip_roundoff(out);
    return out;
}

bool same_lattice(const Distribution& a, const Distribution& b) {
    const double tol = 1e-9 * std::max(a.spacing, b.spacing);
    return a.size() == b.size() && std::abs(a.offset - b.offset) <= tol &&
           std::abs(a.spacing - b.spacing) <= tol;
}

}  // namespace

double Distribution::total() const { return std::accumulate(p.begin(), p.end(), 0.0); }

double Distribution::mean() const {
    double m = 0;
    for (std::size_t i = 0; i < p.size(); ++i) m += p[i] * position(i);
    return m / total();
}

double Distribution::variance() const {
    const double m = mean();
    double v = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = position(i) - m;
        v += p[i] * d * d;
    }
    return v / total();
}

Distribution conditional_centroid(const WaveTensor& state) {
    const WaveTensor pos = to_basis(state, Basis::position);
    const Grid& g = pos.grid();
    std::size_t stride = 0;
    for (std::size_t i = 0; i < pos.photons(); ++i) stride = stride * g.M + 1;
    Distribution d;
    d.offset = g.x(0);
    d.spacing = g.dx;
    d.period = g.M;
    d.p.resize(g.M);
    for (std::size_t j = 0; j < g.M; ++j) d.p[j] = std::norm(pos[j * stride]);
    const double peak = *std::max_element(d.p.begin(), d.p.end());
    double full = 0;
    for (const auto& a : pos.amp()) full = std::max(full, std::norm(a));
    if (!(peak > 1e-28 * full)) throw PhysicsError("conditional distribution undefined: zero diagonal");
    normalize_in_place(d, "conditional centroid");
    return d;
}

Distribution conditional_centroid(const ProductSum& state, std::size_t) {
    const Grid& g = state.grid();
    const auto pt = position_terms(state);
    Distribution d;
    d.offset = g.x(0);
    d.spacing = g.dx;
    d.period = g.M;
    d.p.resize(g.M);
    double peak = 0;
    for (std::size_t x = 0; x < g.M; ++x) {
        Complex amp{};
        for (std::size_t r = 0; r < pt.coeff.size(); ++r) {
            Complex prod = pt.coeff[r];
            for (const auto& f : pt.factors[r]) prod *= f[x];
            amp += prod;
        }
        d.p[x] = std::norm(amp);
        peak = std::max(peak, d.p[x]);
    }
    if (!(peak > 0)) throw PhysicsError("conditional distribution undefined: zero diagonal");
    normalize_in_place(d, "conditional centroid");
    return d;
}

Distribution marginal_centroid(const WaveTensor& state, CentroidLattice lattice, std::size_t threads) {
    const WaveTensor pos = to_basis(state, Basis::position);
    const Grid& g = pos.grid();
    const std::size_t M = g.M;
    const std::size_t N = pos.photons();
    const std::size_t block = pos.size() / M;
    const std::size_t bins = open_bins(M, N);
    std::vector<std::vector<double>> partial(M);
    parallel_chunks(M, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> digits(N);
        for (std::size_t lead = begin; lead < end; ++lead) {
            auto& acc = partial[lead];
            acc.assign(bins, 0.0);
            std::fill(digits.begin(), digits.end(), 0);
            std::size_t sum = lead;
            const std::size_t base = lead * block;
            for (std::size_t r = 0; r < block; ++r) {
                acc[sum] += std::norm(pos[base + r]);
                // Odometer over the trailing N-1 digits, tracking their sum.
                for (std::size_t n = N; n-- > 1;) {
                    if (++digits[n] < M) {
                        ++sum;
                        break;
                    }
                    digits[n] = 0;
                    sum -= M - 1;
                }
            }
        }
    });
    Distribution d = open_lattice(g, N);
    for (std::size_t lead = 0; lead < M; ++lead)
        for (std::size_t b = 0; b < bins; ++b) d.p[b] += partial[lead][b];
    normalize_in_place(d, "marginal centroid");
    return lattice == CentroidLattice::open ? d : fold(d, M, N);
}

Distribution marginal_centroid(const ProductSum& state, CentroidLattice lattice) {
    const Grid& g = state.grid();
    const std::size_t M = g.M;
    const std::size_t N = state.photons();
    const std::size_t bins = open_bins(M, N);
    const std::size_t P = next_pow2(bins);
    const auto pt = position_terms(state);
    const std::size_t R = pt.coeff.size();

    std::vector<Complex> acc(P, Complex{}), spec(P), buf(P);
    for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t s = 0; s < R; ++s) {
            std::fill(spec.begin(), spec.end(), pt.coeff[r] * std::conj(pt.coeff[s]));
            for (std::size_t n = 0; n < N; ++n) {
                const auto& ur = pt.factors[r][n];
                const auto& us = pt.factors[s][n];
                const bool repeat = n > 0 && ur == pt.factors[r][n - 1] && us == pt.factors[s][n - 1];
                if (!repeat) {
                    std::fill(buf.begin(), buf.end(), Complex{});
                    for (std::size_t x = 0; x < M; ++x) buf[x] = ur[x] * std::conj(us[x]) * g.dx;
                    fft::transform(buf, fft::Direction::forward);
                }
                for (std::size_t q = 0; q < P; ++q) spec[q] *= buf[q];
            }
            for (std::size_t q = 0; q < P; ++q) acc[q] += spec[q];
        }
    }
    fft::transform(acc, fft::Direction::backward);
    Distribution d = open_lattice(g, N);
    for (std::size_t b = 0; b < bins; ++b) d.p[b] = acc[b].real() / static_cast<double>(P);
    clip_roundoff(d.p);
    normalize_in_place(d, "marginal centroid");
    return lattice == CentroidLattice::open ? d : fold(d, M, N);
}

Distribution marginal_centroid(const State& state, CentroidLattice lattice, std::size_t threads) {
    if (const auto* w = std::get_if<WaveTensor>(&state)) return marginal_centroid(*w, lattice, threads);
    return marginal_centroid(std::get<ProductSum>(state), lattice);
}

Distribution marginal_centroid(const PhotonSuperposition& state, CentroidLattice lattice, std::size_t threads) {
    double weight_total = 0;
    std::size_t lcm = 1;
    for (const auto& c : state.components()) {
        if (std::norm(c.amplitude) > 0) {
            weight_total += std::norm(c.amplitude);
            lcm = std::lcm(lcm, photons(c.state));
        }
    }
    if (!(weight_total > 0)) throw PhysicsError("nothing to post-select: the state is pure vacuum");
    const Grid& g = state.grid();
    const std::size_t M = g.M;

    std::vector<std::pair<double, Distribution>> parts;
    for (const auto& c : state.components())
        if (std::norm(c.amplitude) > 0) parts.emplace_back(std::norm(c.amplitude), marginal_centroid(c.state, lattice, threads));

    if (parts.size() == 1) return parts.front().second;
    if (lattice == CentroidLattice::periodic) {
        for (const auto& [w, d] : parts)
            if (std::abs(d.spacing - parts.front().second.spacing) > 1e-12 * d.spacing)
                throw InvalidArgument("periodic centroid lattice requires a single photon number");
    }

    Distribution out;
    if (lattice == CentroidLattice::open) {
        out = open_lattice(g, lcm);
        std::size_t period = 1;
        for (const auto& [w, d] : parts) {
            const std::size_t N = static_cast<std::size_t>(std::llround(g.dx / d.spacing));
            const std::size_t step = lcm / N;
            for (std::size_t b = 0; b < d.size(); ++b) out.p[b * step] += w * d.p[b];
            period = std::lcm(period, M * step);
        }
        out.period = period;
    } else {
        out = parts.front().second;
        std::fill(out.p.begin(), out.p.end(), 0.0);
        for (const auto& [w, d] : parts)
            for (std::size_t b = 0; b < d.size(); ++b) out.p[b] += w * d.p[b];
    }
    for (auto& v : out.p) v /= weight_total;
    return out;
}

Distribution mphoton_absorption(const PhotonSuperposition& state, std::size_t order, std::size_t) {
    if (order == 0) throw InvalidArgument("absorption order must be >= 1");
    const Grid& g = state.grid();
    Distribution d;
    d.offset = g.x(0);
    d.spacing = g.dx;
    d.period = g.M;
    d.p.assign(g.M, 0.0);
    bool any = false;
    for (const auto& c : state.components()) {
        const std::size_t N = photons(c.state);
        if (N < order || std::norm(c.amplitude) == 0) continue;
        any = true;
        std::vector<double> pattern;
        if (const auto* w = std::get_if<WaveTensor>(&c.state)) {
            pattern = absorption_pattern(*w, order);
        } else {
            const auto& ps = std::get<ProductSum>(c.state);
            pattern = absorption_pattern(ps, order);
        }
        const double weight = binomial(N, order) * std::norm(c.amplitude);
        for (std::size_t x = 0; x < g.M; ++x) d.p[x] += weight * pattern[x];
    }
    if (!any) throw PhysicsError("M-photon absorption: distribution identically zero (order exceeds every photon number)");
    normalize_in_place(d, "M-photon absorption");
    return d;
}

Distribution one_photon_marginal(const State& state, std::size_t cap) {
    return mphoton_absorption(as_superposition(state), 1, cap);
}

Spectrum power_spectrum(const Distribution& d) {
    const std::size_t P = d.period > 0 ? d.period : d.size();
    std::vector<Complex> buf(P, Complex{});
    for (std::size_t i = 0; i < d.size(); ++i) buf[i % P] += d.p[i];
    fft::transform(buf, fft::Direction::forward);
    Spectrum s;
    s.resolution = 2 * std::numbers::pi / (static_cast<double>(P) * d.spacing);
    s.freq.resize(P);
    s.power.resize(P);
    const auto half = static_cast<std::ptrdiff_t>(P / 2);
    for (std::size_t i = 0; i < P; ++i) {
        // Entry i holds q = i - P/2, stored from buf[(q mod P)].
        const std::ptrdiff_t q = static_cast<std::ptrdiff_t>(i) - half;
        const std::size_t src = static_cast<std::size_t>((q + static_cast<std::ptrdiff_t>(P)) % static_cast<std::ptrdiff_t>(P));
        s.freq[i] = static_cast<double>(q) * s.resolution;
        s.power[i] = std::norm(buf[src]);
    }
    return s;
}

double spectral_support(const Distribution& d, double rel_tol) {
    const Spectrum s = power_spectrum(d);
    const double total = std::accumulate(s.power.begin(), s.power.end(), 0.0);
    double support = 0;
    for (std::size_t i = 0; i < s.power.size(); ++i)
        if (s.power[i] > rel_tol * total) support = std::max(support, std::abs(s.freq[i]));
    return support;
}

double spectral_power_beyond(const Distribution& d, double cutoff) {
    const Spectrum s = power_spectrum(d);
    double total = 0, beyond = 0;
    for (std::size_t i = 0; i < s.power.size(); ++i) {
        total += s.power[i];
        if (std::abs(s.freq[i]) > cutoff * (1 + 1e-12)) beyond += s.power[i];
    }
    return beyond / total;
}

FringeMetrics fringe_metrics(const Distribution& d) {
    const std::size_t L = d.size();
    if (L < 8) throw PhysicsError("no fringe detected: distribution too short");
    std::vector<Complex> buf(d.p.begin(), d.p.end());
    fft::transform(buf, fft::Direction::forward);
    const std::size_t half = L / 2;
    std::vector<double> power(half + 1);
    for (std::size_t q = 0; q <= half; ++q) power[q] = std::norm(buf[q]);

    // Skip the DC lobe: walk down from q = 1 to the first local minimum.
    std::size_t start = 1;
    while (start < half && power[start + 1] < power[start]) ++start;
    std::size_t peak = start;
    for (std::size_t q = start; q <= half; ++q)
        if (power[q] > power[peak]) peak = q;
    std::vector<double> floor(power.begin() + 1, power.end());
    std::nth_element(floor.begin(), floor.begin() + floor.size() / 2, floor.end());
    const double median = floor[floor.size() / 2];
    if (!(power[peak] > 5 * median) || !(power[peak] > 1e-12 * power[0]) || peak == start)
        throw PhysicsError("no fringe detected");

    // Refine on a zero-padded spectrum.
    const std::size_t pad = next_pow2(16 * L);
    std::vector<Complex> fine(pad, Complex{});
    std::copy(d.p.begin(), d.p.end(), fine.begin());
    fft::transform(fine, fft::Direction::forward);
    const double ratio = static_cast<double>(pad) / static_cast<double>(L);
    const auto centre = static_cast<std::size_t>(std::llround(static_cast<double>(peak) * ratio));
    const auto reach = static_cast<std::size_t>(std::ceil(ratio));
    std::size_t best = centre;
    for (std::size_t q = centre > reach ? centre - reach : 1; q <= std::min(pad / 2 - 1, centre + reach); ++q)
        if (std::norm(fine[q]) > std::norm(fine[best])) best = q;
    const double a = std::norm(fine[best - 1]);
    const double b = std::norm(fine[best]);
    const double c = std::norm(fine[best + 1]);
    const double denom = a - 2 * b + c;
    const double delta = denom != 0 ? 0.5 * (a - c) / denom : 0.0;
    const double cycles = static_cast<double>(best) + delta;  // per pad samples

    FringeMetrics m;
    m.period = static_cast<double>(pad) * d.spacing / cycles;
    const auto lo = d.p.begin() + static_cast<std::ptrdiff_t>(L / 4);
    const auto hi = d.p.begin() + static_cast<std::ptrdiff_t>(3 * L / 4 + 1);
    const auto [mn, mx] = std::minmax_element(lo, hi);
    m.visibility = (*mx + *mn) > 0 ? (*mx - *mn) / (*mx + *mn) : 0.0;
    return m;
}

double total_variation(const Distribution& a, const Distribution& b) {
    if (!same_lattice(a, b)) throw InvalidArgument("total variation needs identical support lattices");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
    return 0.5 * s;
}

double max_abs_deviation(const Distribution& a, const Distribution& b) {
    if (!same_lattice(a, b)) throw InvalidArgument("deviation needs identical support lattices");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a.p[i] - b.p[i]));
    return s;
}

Distribution resample(const Distribution& fine, double offset, double spacing, std::size_t count) {
    const double ratio = spacing / fine.spacing;
    const auto step = static_cast<std::size_t>(std::llround(ratio));
    if (step == 0 || std::abs(ratio - static_cast<double>(step)) > 1e-9 * ratio)
        throw InvalidArgument("incompatible supports: spacing ratio is not an integer");
    const double start_f = (offset - fine.offset) / fine.spacing;
    const auto start = static_cast<long long>(std::llround(start_f));
    if (std::abs(start_f - static_cast<double>(start)) > 1e-6 || start < 0 ||
        static_cast<std::size_t>(start) + (count - 1) * step >= fine.size())
        throw InvalidArgument("incompatible supports: coarse lattice points are not fine lattice points");
    Distribution out;
    out.offset = offset;
    out.spacing = spacing;
    out.period = fine.period % step == 0 ? fine.period / step : 0;
    out.p.resize(count);
    for (std::size_t i = 0; i < count; ++i) out.p[i] = fine.p[static_cast<std::size_t>(start) + i * step];
    normalize_in_place(out, "resample");
    return out;
}

std::pair<Distribution, Distribution> align(const Distribution& a, const Distribution& b) {
    if (same_lattice(a, b)) return {a, b};
    if (a.spacing < b.spacing) return {resample(a, b.offset, b.spacing, b.size()), b};
    return {a, resample(b, a.offset, a.spacing, a.size())};
}

}  // namespace ocm
