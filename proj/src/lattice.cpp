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

#include "ocm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ocm/errors.hpp"
#include "ocm/fft.hpp"

namespace ocm {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same(const Grid& a, const Grid& b, std::size_t na, std::size_t nb) {
    if (!(a == b)) throw InvalidArgument("grid mismatch between operands");
    if (na != nb) throw InvalidArgument("photon number mismatch between operands");
}

// Parity of the sum of digits of a flat index in base M (M a power of two).
bool odd_digit_sum(std::size_t flat, std::size_t M, std::size_t N) {
    std::size_t s = 0;
    for (std::size_t n = 0; n < N; ++n) {
        s += flat % M;
        flat /= M;
    }
    return (s & 1U) != 0;
}

// Centered unitary DFT. For M a power of two >= 4,
// exp(-i k_l x_j) = (-1)^(j+l) exp(-2 pi i j l / M), so the centered
// transform is a plain FFT sandwiched between checkerboard sign flips.
void centered_dft(std::span<Complex> data, const Grid& grid, std::size_t N, Basis from) {
    const std::size_t M = grid.M;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (odd_digit_sum(i, M, N)) data[i] = -data[i];
    const auto dir = from == Basis::position ? fft::Direction::forward : fft::Direction::backward;
    fft::transform(data, M, N, dir);
    const double unit = grid.spacing(from) / std::sqrt(2 * std::numbers::pi);
    const double scale = std::pow(unit, static_cast<double>(N));
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] *= odd_digit_sum(i, M, N) ? -scale : scale;
}

Basis other(Basis b) { return b == Basis::position ? Basis::momentum : Basis::position; }

double vec_norm2(std::span<const Complex> v) {
    double s = 0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

Complex vec_dot(std::span<const Complex> a, std::span<const Complex> b) {
    Complex s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

}  // namespace

const char* to_string(Basis b) { return b == Basis::position ? "position" : "momentum"; }

bool Grid::in_band(std::size_t l) const { return std::abs(k(l)) <= k0 * (1 + 1e-12); }

Grid make_grid(std::size_t M, double dx, double sin_theta) {
    if (!is_power_of_two(M) || M < 4)
        throw InvalidArgument("grid point count must be a power of two >= 4");
    if (!(dx > 0) || !std::isfinite(dx)) throw InvalidArgument("grid spacing dx must be > 0");
    if (!(sin_theta > 0) || sin_theta > 1)
        throw InvalidArgument("sin_theta must lie in (0, 1]");
    Grid g{M, dx, 2 * std::numbers::pi * sin_theta};
    const double nyquist = std::numbers::pi / dx;
    if (g.k0 > nyquist * (1 + 1e-12)) {
        std::ostringstream os;
        os << "Nyquist violation: band limit k0 = " << g.k0 << " exceeds pi/dx = " << nyquist
           << "; reduce dx below " << 0.5 / sin_theta << " or lower sin_theta";
        throw PhysicsError(os.str());
    }
    return g;
}

std::size_t dense_size(std::size_t M, std::size_t N, std::size_t cap) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < N; ++i) {
        if (n > cap / M) {
            std::ostringstream os;
            os << "dense tensor " << M << "^" << N << " exceeds the memory cap of " << cap
               << " complex amplitudes";
            throw ResourceError(os.str());
        }
        n *= M;
    }
    return n;
}

WaveTensor::WaveTensor(const Grid& grid, std::size_t N, Basis basis, std::size_t cap)
    : grid_(grid), N_(N), basis_(basis) {
    if (N == 0) throw InvalidArgument("photon number must be >= 1");
    amp_.assign(dense_size(grid.M, N, cap), Complex{});
}

WaveTensor::WaveTensor(const Grid& grid, std::size_t N, Basis basis, std::vector<Complex> amp)
    : grid_(grid), N_(N), basis_(basis), amp_(std::move(amp)) {
    if (N == 0) throw InvalidArgument("photon number must be >= 1");
    if (amp_.size() != dense_size(grid.M, N, std::numeric_limits<std::size_t>::max()))
        throw InvalidArgument("amplitude count does not match M^N");
}

std::size_t WaveTensor::flat(std::span<const std::uint32_t> idx) const {
    std::size_t f = 0;
    for (std::size_t n = 0; n < N_; ++n) f = f * grid_.M + idx[n];
    return f;
}

void WaveTensor::unflat(std::size_t flat, std::span<std::uint32_t> idx) const {
    for (std::size_t n = N_; n-- > 0;) {
        idx[n] = static_cast<std::uint32_t>(flat % grid_.M);
        flat /= grid_.M;
    }
}

double WaveTensor::cell() const {
    return std::pow(grid_.spacing(basis_), static_cast<double>(N_));
}

ProductSum::ProductSum(const Grid& grid, std::size_t N, Basis basis, std::vector<ProductTerm> terms)
    : grid_(grid), N_(N), basis_(basis), terms_(std::move(terms)) {
    if (N == 0) throw InvalidArgument("photon number must be >= 1");
    for (const auto& t : terms_) {
        if (t.factors.size() != N) throw InvalidArgument("product term needs one factor per photon");
        for (const auto& f : t.factors)
            if (f.size() != grid.M) throw InvalidArgument("factor length must equal M");
    }
}

WaveTensor change_basis(const WaveTensor& w) {
    std::vector<Complex> amp(w.amp().begin(), w.amp().end());
    centered_dft(amp, w.grid(), w.photons(), w.basis());
    return WaveTensor(w.grid(), w.photons(), other(w.basis()), std::move(amp));
}

std::vector<Complex> to_momentum(const Grid& grid, std::span<const Complex> psi) {
    std::vector<Complex> v(psi.begin(), psi.end());
    centered_dft(v, grid, 1, Basis::position);
    return v;
}

std::vector<Complex> to_position(const Grid& grid, std::span<const Complex> phi) {
    std::vector<Complex> v(phi.begin(), phi.end());
    centered_dft(v, grid, 1, Basis::momentum);
    return v;
}

ProductSum change_basis(const ProductSum& p) {
    std::vector<ProductTerm> terms = p.terms();
    for (auto& t : terms)
        for (auto& f : t.factors) centered_dft(f, p.grid(), 1, p.basis());
    return ProductSum(p.grid(), p.photons(), other(p.basis()), std::move(terms));
}

WaveTensor to_basis(const WaveTensor& w, Basis b) { return w.basis() == b ? w : change_basis(w); }
ProductSum to_basis(const ProductSum& p, Basis b) { return p.basis() == b ? p : change_basis(p); }

double norm_squared(const WaveTensor& w) { return vec_norm2(w.amp()) * w.cell(); }

double norm_squared(const ProductSum& p) { return std::real(overlap(p, p)); }

WaveTensor normalize(const WaveTensor& w) {
    const double n2 = norm_squared(w);
    if (!(n2 > 0) || !std::isfinite(n2)) throw InvalidArgument("cannot normalize a zero-norm state");
    WaveTensor out = w;
    const double s = 1 / std::sqrt(n2);
    for (auto& a : out.amp()) a *= s;
    return out;
}

ProductSum normalize(const ProductSum& p) {
    const double n2 = norm_squared(p);
    if (!(n2 > 0) || !std::isfinite(n2)) throw InvalidArgument("cannot normalize a zero-norm state");
    ProductSum out = p;
    const double s = 1 / std::sqrt(n2);
    for (auto& t : out.terms()) t.coeff *= s;
    return out;
}

Complex overlap(const WaveTensor& a, const WaveTensor& b) {
    require_same(a.grid(), b.grid(), a.photons(), b.photons());
    const WaveTensor bb = to_basis(b, a.basis());
    return vec_dot(a.amp(), bb.amp()) * a.cell();
}

Complex overlap(const ProductSum& a, const ProductSum& b) {
    require_same(a.grid(), b.grid(), a.photons(), b.photons());
    const ProductSum bb = to_basis(b, a.basis());
    const double h = a.grid().spacing(a.basis());
    Complex total{};
    for (const auto& ta : a.terms()) {
        for (const auto& tb : bb.terms()) {
            Complex prod = std::conj(ta.coeff) * tb.coeff;
            for (std::size_t n = 0; n < a.photons(); ++n) prod *= vec_dot(ta.factors[n], tb.factors[n]) * h;
            total += prod;
        }
    }
    return total;
}

WaveTensor symmetrize(const WaveTensor& w) {
    const std::size_t N = w.photons();
    if (N == 1) return normalize(w);
    std::vector<std::size_t> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Complex> acc(w.size(), Complex{});
    std::vector<std::uint32_t> idx(N), pidx(N);
    std::size_t count = 0;
    do {
        ++count;
        for (std::size_t f = 0; f < w.size(); ++f) {
            w.unflat(f, idx);
            for (std::size_t n = 0; n < N; ++n) pidx[n] = idx[perm[n]];
            acc[f] += w[w.flat(pidx)];
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (auto& a : acc) a /= static_cast<double>(count);
    return normalize(WaveTensor(w.grid(), N, w.basis(), std::move(acc)));
}

Projected<WaveTensor> bandlimit_project(const WaveTensor& w) {
    WaveTensor mom = to_basis(w, Basis::momentum);
    const double before = norm_squared(mom);
    if (!(before > 0)) throw InvalidArgument("cannot band-limit a zero-norm state");
    const Grid& g = w.grid();
    std::vector<char> keep(g.M);
    for (std::size_t l = 0; l < g.M; ++l) keep[l] = g.in_band(l);
    std::vector<std::uint32_t> idx(w.photons());
    for (std::size_t f = 0; f < mom.size(); ++f) {
        mom.unflat(f, idx);
        for (auto l : idx)
            if (!keep[l]) {
                mom[f] = 0;
                break;
            }
    }
    const double after = norm_squared(mom);
    if (!(after > 0)) throw PhysicsError("state has no support inside the band |k| <= k0");
    return {to_basis(normalize(mom), w.basis()), 1 - after / before};
}

Projected<ProductSum> bandlimit_project(const ProductSum& p) {
    ProductSum mom = to_basis(p, Basis::momentum);
    const double before = norm_squared(mom);
    if (!(before > 0)) throw InvalidArgument("cannot band-limit a zero-norm state");
    const Grid& g = p.grid();
    for (auto& t : mom.terms())
        for (auto& f : t.factors)
            for (std::size_t l = 0; l < g.M; ++l)
                if (!g.in_band(l)) f[l] = 0;
    const double after = norm_squared(mom);
    if (!(after > 0)) throw PhysicsError("state has no support inside the band |k| <= k0");
    return {to_basis(normalize(mom), p.basis()), 1 - after / before};
}

WaveTensor translate(const WaveTensor& w, double d) {
    WaveTensor mom = to_basis(w, Basis::momentum);
    const Grid& g = w.grid();
    std::vector<Complex> phase(g.M);
    for (std::size_t l = 0; l < g.M; ++l) phase[l] = std::polar(1.0, -g.k(l) * d);
    std::vector<std::uint32_t> idx(w.photons());
    for (std::size_t f = 0; f < mom.size(); ++f) {
        mom.unflat(f, idx);
        Complex ph{1.0, 0.0};
        for (auto l : idx) ph *= phase[l];
        mom[f] *= ph;
    }
    return to_basis(mom, w.basis());
}

ProductSum translate(const ProductSum& p, double d) {
    ProductSum mom = to_basis(p, Basis::momentum);
    const Grid& g = p.grid();
    for (auto& t : mom.terms())
        for (auto& f : t.factors)
            for (std::size_t l = 0; l < g.M; ++l) f[l] *= std::polar(1.0, -g.k(l) * d);
    return to_basis(mom, p.basis());
}

WaveTensor densify(const ProductSum& p, std::size_t cap) {
    WaveTensor out(p.grid(), p.photons(), p.basis(), cap);
    const std::size_t M = p.grid().M;
    const std::size_t N = p.photons();
    // Build each term by repeated outer products, photon 1 slowest.
    std::vector<Complex> cur, next;
    for (const auto& t : p.terms()) {
        cur.assign(1, t.coeff);
        for (std::size_t n = 0; n < N; ++n) {
            next.resize(cur.size() * M);
            const auto& u = t.factors[n];
            for (std::size_t i = 0; i < cur.size(); ++i)
                for (std::size_t j = 0; j < M; ++j) next[i * M + j] = cur[i] * u[j];
            cur.swap(next);
        }
        for (std::size_t i = 0; i < cur.size(); ++i) out[i] += cur[i];
    }
    return out;
}

}  // namespace ocm
