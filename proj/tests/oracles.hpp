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

// Brute-force reference computations for the tests. Everything here is
// written from the definitions (explicit sums, explicit enumeration) and
// shares no code with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "ocm/lattice.hpp"
#include "ocm/measurement.hpp"

namespace oracle {

using ocm::Complex;
using ocm::Grid;

inline std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    while (e--) r *= b;
    return r;
}

/// phi(k_l) = dx / sqrt(2 pi) sum_j psi(x_j) exp(-i k_l x_j).
inline std::vector<Complex> dft_to_momentum(const Grid& g, const std::vector<Complex>& psi) {
    std::vector<Complex> phi(g.M);
    for (std::size_t l = 0; l < g.M; ++l) {
        Complex s{};
        for (std::size_t j = 0; j < g.M; ++j) s += psi[j] * std::polar(1.0, -g.k(l) * g.x(j));
        phi[l] = s * g.dx / std::sqrt(2 * std::numbers::pi);
    }
    return phi;
}

/// psi(x_j) = dk / sqrt(2 pi) sum_l phi(k_l) exp(i k_l x_j).
inline std::vector<Complex> dft_to_position(const Grid& g, const std::vector<Complex>& phi) {
    std::vector<Complex> psi(g.M);
    for (std::size_t j = 0; j < g.M; ++j) {
        Complex s{};
        for (std::size_t l = 0; l < g.M; ++l) s += phi[l] * std::polar(1.0, g.k(l) * g.x(j));
        psi[j] = s * g.dk() / std::sqrt(2 * std::numbers::pi);
    }
    return psi;
}

/// Applies a 1-D map along every axis of a row-major M^N tensor.
inline std::vector<Complex> along_axes(const std::vector<Complex>& t, std::size_t M, std::size_t N,
                                       const std::function<std::vector<Complex>(const std::vector<Complex>&)>& f) {
    std::vector<Complex> cur = t;
    for (std::size_t axis = 0; axis < N; ++axis) {
        const std::size_t stride = ipow(M, N - 1 - axis);
        std::vector<Complex> next(cur.size());
        for (std::size_t base = 0; base < cur.size(); ++base) {
            if ((base / stride) % M != 0) continue;
            std::vector<Complex> line(M);
            for (std::size_t i = 0; i < M; ++i) line[i] = cur[base + i * stride];
            const auto out = f(line);
            for (std::size_t i = 0; i < M; ++i) next[base + i * stride] = out[i];
        }
        cur = std::move(next);
    }
    return cur;
}

/// Direct sum_r c_r prod_n u_{r,n}.
inline std::vector<Complex> expand(const ocm::ProductSum& p) {
    const std::size_t M = p.grid().M, N = p.photons();
    std::vector<Complex> out(ipow(M, N));
    std::vector<std::size_t> idx(N);
    for (std::size_t f = 0; f < out.size(); ++f) {
        std::size_t rest = f;
        for (std::size_t n = N; n-- > 0;) idx[n] = rest % M, rest /= M;
        for (const auto& t : p.terms()) {
            Complex v = t.coeff;
            for (std::size_t n = 0; n < N; ++n) v *= t.factors[n][idx[n]];
            out[f] += v;
        }
    }
    return out;
}

/// Position-basis amplitudes of any WaveTensor via the naive DFT.
inline std::vector<Complex> position_amplitudes(const ocm::WaveTensor& w) {
    std::vector<Complex> a(w.amp().begin(), w.amp().end());
    if (w.basis() == ocm::Basis::position) return a;
    const Grid g = w.grid();
    return along_axes(a, g.M, w.photons(), [&](const std::vector<Complex>& v) { return dft_to_position(g, v); });
}

/// Centroid marginal by enumeration: each configuration's centroid value
/// is located on the dx/N lattice by rounding.
inline ocm::Distribution marginal(const std::vector<Complex>& psi, const Grid& g, std::size_t N) {
    ocm::Distribution d;
    d.offset = g.x(0);
    d.spacing = g.dx / static_cast<double>(N);
    d.period = g.M;
    d.p.assign(N * (g.M - 1) + 1, 0.0);
    std::vector<std::size_t> idx(N);
    for (std::size_t f = 0; f < psi.size(); ++f) {
        std::size_t rest = f;
        double X = 0;
        for (std::size_t n = N; n-- > 0;) idx[n] = rest % g.M, rest /= g.M;
        for (auto i : idx) X += g.x(i);
        X /= static_cast<double>(N);
        const auto b = static_cast<std::size_t>(std::llround((X - d.offset) / d.spacing));
        d.p[b] += std::norm(psi[f]);
    }
    double t = 0;
    for (double v : d.p) t += v;
    for (double& v : d.p) v /= t;
    return d;
}

/// |psi(x, ..., x)|^2, normalized.
inline ocm::Distribution conditional(const std::vector<Complex>& psi, const Grid& g, std::size_t N) {
    ocm::Distribution d;
    d.offset = g.x(0);
    d.spacing = g.dx;
    d.period = g.M;
    d.p.assign(g.M, 0.0);
    for (std::size_t j = 0; j < g.M; ++j) {
        std::size_t f = 0;
        for (std::size_t n = 0; n < N; ++n) f = f * g.M + j;
        d.p[j] = std::norm(psi[f]);
    }
    double t = 0;
    for (double v : d.p) t += v;
    for (double& v : d.p) v /= t;
    return d;
}

/// Unnormalized sum over the last N - order coordinates of |psi(x,..,x, rest)|^2 dx^(N-order).
inline std::vector<double> absorption(const std::vector<Complex>& psi, const Grid& g, std::size_t N,
                                      std::size_t order) {
    std::vector<double> out(g.M, 0.0);
    const std::size_t tail = ipow(g.M, N - order);
    for (std::size_t x = 0; x < g.M; ++x) {
        std::size_t head = 0;
        for (std::size_t n = 0; n < order; ++n) head = head * g.M + x;
        double s = 0;
        for (std::size_t r = 0; r < tail; ++r) s += std::norm(psi[head * tail + r]);
        out[x] = s * std::pow(g.dx, static_cast<double>(N - order));
    }
    return out;
}

inline double tv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

inline double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double m = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Random exchange-symmetric, band-limited state: i.i.d. complex Gaussian
/// momentum amplitudes inside the band, averaged over permutations.
inline ocm::WaveTensor random_symmetric(const Grid& g, std::size_t N, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    const std::size_t S = ipow(g.M, N);
    std::vector<Complex> a(S);
    std::vector<std::size_t> idx(N);
    for (std::size_t f = 0; f < S; ++f) {
        std::size_t rest = f;
        bool in = true;
        for (std::size_t n = N; n-- > 0;) {
            idx[n] = rest % g.M;
            rest /= g.M;
            in = in && std::abs(g.k(idx[n])) <= g.k0;
        }
        const Complex z{nd(gen), nd(gen)};
        if (in) a[f] = z;
    }
    std::vector<Complex> sym(S);
    std::vector<std::size_t> perm(N);
    for (std::size_t f = 0; f < S; ++f) {
        std::size_t rest = f;
        for (std::size_t n = N; n-- > 0;) idx[n] = rest % g.M, rest /= g.M;
        for (std::size_t n = 0; n < N; ++n) perm[n] = n;
        std::size_t count = 0;
        do {
            std::size_t h = 0;
            for (std::size_t n = 0; n < N; ++n) h = h * g.M + idx[perm[n]];
            sym[f] += a[h];
            ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
        sym[f] /= static_cast<double>(count);
    }
    double norm = 0;
    for (const auto& z : sym) norm += std::norm(z);
    norm *= std::pow(g.dk(), static_cast<double>(N));
    for (auto& z : sym) z /= std::sqrt(norm);
    return ocm::WaveTensor(g, N, ocm::Basis::momentum, std::move(sym));
}

}  // namespace oracle
