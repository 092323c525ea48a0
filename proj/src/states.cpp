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

#include "ocm/states.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ocm/errors.hpp"

namespace ocm {
namespace {

std::vector<Complex> gaussian_envelope(const Grid& g, double center, double sigma) {
    std::vector<Complex> v(g.M);
    for (std::size_t l = 0; l < g.M; ++l) {
        const double d = g.k(l) - center;
        v[l] = std::exp(-d * d / (4 * sigma * sigma));
    }
    return v;
}

void require_discard_ok(double discarded, const char* what) {
    if (discarded > kMaxDiscardedPower) {
        std::ostringstream os;
        os << what << ": envelope does not fit the band (band projection discards " << discarded
           << " of the norm, limit " << kMaxDiscardedPower
           << "); narrow the envelope, or for a NOON state put k0 on the momentum lattice"
              " (sin_theta * M * dx an integer)";
        throw PhysicsError(os.str());
    }
}

}  // namespace

std::size_t photons(const State& s) {
    return std::visit([](const auto& v) { return v.photons(); }, s);
}

const Grid& grid_of(const State& s) {
    return std::visit([](const auto& v) -> const Grid& { return v.grid(); }, s);
}

Projected<ProductSum> noon_state(std::size_t N, const Grid& grid, const NoonOptions& opts) {
    if (N == 0) throw InvalidArgument("NOON state needs N >= 1");
    const double sigma = opts.sigma_env > 0 ? opts.sigma_env : grid.dk() / 8;
    const double carrier = std::isnan(opts.carrier) ? grid.k0 : opts.carrier;
    if (sigma > grid.k0 / 4) throw PhysicsError("NOON state: envelope too wide for band (sigma_env > k0/4)");
    if (!(carrier > 0) || carrier > grid.k0 * (1 + 1e-12))
        throw PhysicsError("NOON state: carrier must lie in (0, k0]");

    const auto plus = gaussian_envelope(grid, carrier, sigma);
    const auto minus = gaussian_envelope(grid, -carrier, sigma);
    std::vector<ProductTerm> terms(2);
    terms[0].coeff = terms[1].coeff = 1 / std::sqrt(2.0);
    terms[0].factors.assign(N, plus);
    terms[1].factors.assign(N, minus);
    // Normalize each branch factor so the coefficients carry the weights.
    for (auto& t : terms) {
        double n2 = 0;
        for (const auto& a : t.factors[0]) n2 += std::norm(a);
        n2 *= grid.dk();
        for (auto& f : t.factors)
            for (auto& a : f) a /= std::sqrt(n2);
    }
    auto projected = bandlimit_project(normalize(ProductSum(grid, N, Basis::momentum, std::move(terms))));
    require_discard_ok(projected.discarded, "NOON state");
    return projected;
}

Projected<WaveTensor> gaussian_beam(const GaussianBeamSpec& spec, const Grid& grid, std::size_t cap) {
    const std::size_t N = spec.N0;
    if (N == 0) throw InvalidArgument("Gaussian beam needs N0 >= 1");
    if (!(spec.delta_k > 0)) throw InvalidArgument("Gaussian beam needs delta_k > 0");
    if (spec.rho < 0 || spec.rho > 1) throw InvalidArgument("Gaussian beam rho must lie in [0, 1]");
    if (spec.delta_k > grid.k0 / 3 * (1 + 1e-12))
        throw PhysicsError("Gaussian beam: delta_k exceeds k0/3; envelope too wide for band");
    const double rho = std::min(spec.rho, kMaxRho);
    const double dk2 = spec.delta_k * spec.delta_k;
    // Sigma = dk2 ((1 - rho) I + rho 1 1^T), so
    // k^T Sigma^{-1} k = (sum k^2 - b (sum k)^2) / (dk2 (1 - rho)).
    const double a = 1 / (dk2 * (1 - rho));
    const double b = rho / (1 + (static_cast<double>(N) - 1) * rho);

    WaveTensor mom(grid, N, Basis::momentum, cap);
    std::vector<std::uint32_t> idx(N);
    for (std::size_t f = 0; f < mom.size(); ++f) {
        mom.unflat(f, idx);
        double s1 = 0, s2 = 0;
        for (auto l : idx) {
            const double k = grid.k(l);
            s1 += k;
            s2 += k * k;
        }
        mom[f] = std::exp(-0.25 * a * (s2 - b * s1 * s1));
    }
    auto projected = bandlimit_project(normalize(mom));
    return {change_basis(projected.state), projected.discarded};
}

Projected<WaveTensor> correlated_biphoton(const Grid& grid, double sigma_K, double sigma_kappa) {
    if (!(sigma_K > 0) || !(sigma_kappa > 0)) throw InvalidArgument("biphoton widths must be > 0");
    if (sigma_kappa > sigma_K) throw InvalidArgument("biphoton needs sigma_kappa <= sigma_K");
    if (sigma_K > 2 * grid.k0 / 3 * (1 + 1e-12))
        throw PhysicsError("correlated biphoton: sigma_K exceeds 2 k0/3; widths violate the band");
    WaveTensor mom(grid, 2, Basis::momentum);
    for (std::size_t i = 0; i < grid.M; ++i) {
        for (std::size_t j = 0; j < grid.M; ++j) {
            const double K = grid.k(i) + grid.k(j);
            const double kappa = grid.k(i) - grid.k(j);
            mom[i * grid.M + j] =
                std::exp(-K * K / (4 * sigma_K * sigma_K) - kappa * kappa / (4 * sigma_kappa * sigma_kappa));
        }
    }
    auto projected = bandlimit_project(normalize(mom));
    return {change_basis(projected.state), projected.discarded};
}

std::vector<Complex> gaussian_profile(const Grid& grid, double delta_k, double center) {
    if (!(delta_k > 0)) throw InvalidArgument("profile width must be > 0");
    std::vector<Complex> v(grid.M);
    double n2 = 0;
    for (std::size_t l = 0; l < grid.M; ++l) {
        const double k = grid.k(l);
        v[l] = std::exp(-k * k / (4 * delta_k * delta_k)) * std::polar(1.0, -k * center);
        n2 += std::norm(v[l]);
    }
    n2 *= grid.dk();
    for (auto& a : v) a /= std::sqrt(n2);
    return v;
}

Projected<std::vector<Complex>> bandlimited_gaussian_profile(const Grid& grid, double delta_k, double center) {
    auto v = gaussian_profile(grid, delta_k, center);
    double outside = 0;
    for (std::size_t l = 0; l < grid.M; ++l)
        if (!grid.in_band(l)) outside += std::norm(v[l]) * grid.dk(), v[l] = 0;
    require_discard_ok(outside, "Gaussian profile");
    const double s = 1 / std::sqrt(1 - outside);
    for (auto& a : v) a *= s;
    return {std::move(v), outside};
}

ProductSum classical_product(std::size_t N, const Grid& grid, std::span<const Complex> profile,
                             Basis basis) {
    if (N == 0) throw InvalidArgument("classical product needs N >= 1");
    if (profile.size() != grid.M) throw InvalidArgument("profile length must equal M");
    std::vector<Complex> mom = basis == Basis::momentum
                                   ? std::vector<Complex>(profile.begin(), profile.end())
                                   : to_momentum(grid, profile);
    double total = 0, outside = 0;
    for (std::size_t l = 0; l < grid.M; ++l) {
        total += std::norm(mom[l]);
        if (!grid.in_band(l)) outside += std::norm(mom[l]);
    }
    if (!(total > 0)) throw InvalidArgument("profile has zero norm");
    if (outside > 1e-12 * total)
        throw PhysicsError("classical product: profile is not band-limited (|k| > k0 power fraction " +
                           std::to_string(outside / total) + ")");
    for (std::size_t l = 0; l < grid.M; ++l)
        if (!grid.in_band(l)) mom[l] = 0;
    const double s = 1 / std::sqrt((total - outside) * grid.dk());
    for (auto& a : mom) a *= s;
    std::vector<ProductTerm> terms(1);
    terms[0].factors.assign(N, mom);
    return ProductSum(grid, N, Basis::momentum, std::move(terms));
}

PhotonSuperposition::PhotonSuperposition(Complex vacuum, std::vector<PhotonComponent> components)
    : vacuum_(vacuum), components_(std::move(components)) {}

const Grid& PhotonSuperposition::grid() const {
    if (components_.empty()) throw InvalidArgument("superposition has no photon-bearing component");
    return grid_of(components_.front().state);
}

std::size_t PhotonSuperposition::max_photons() const {
    std::size_t n = 0;
    for (const auto& c : components_) n = std::max(n, photons(c.state));
    return n;
}

PhotonSuperposition superpose_photon_numbers(Complex vacuum, std::vector<PhotonComponent> components) {
    double total = std::norm(vacuum);
    std::set<std::size_t> seen;
    for (const auto& c : components) {
        const std::size_t n = photons(c.state);
        if (!seen.insert(n).second)
            throw InvalidArgument("duplicate photon number " + std::to_string(n) + " in superposition");
        if (!(grid_of(c.state) == grid_of(components.front().state)))
            throw InvalidArgument("superposition components live on different grids");
        const double n2 = std::visit([](const auto& v) { return norm_squared(v); }, c.state);
        if (std::abs(n2 - 1) > 1e-9) throw InvalidArgument("superposition component state is not normalized");
        total += std::norm(c.amplitude);
    }
    if (std::abs(total - 1) > 1e-9)
        throw InvalidArgument("superposition amplitudes are not normalized (sum |C_N|^2 = " +
                              std::to_string(total) + ")");
    return PhotonSuperposition(vacuum, std::move(components));
}

PhotonSuperposition as_superposition(State s) {
    std::vector<PhotonComponent> c;
    c.push_back({Complex{1.0, 0.0}, std::move(s)});
    return PhotonSuperposition(Complex{}, std::move(c));
}

}  // namespace ocm
