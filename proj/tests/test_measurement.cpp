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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ocm/errors.hpp"
#include "ocm/measurement.hpp"
#include "ocm/states.hpp"
#include "oracles.hpp"

using namespace ocm;

namespace {

Grid noon_grid() { return make_grid(64, 1.0, 13.0 / 64); }

ProductSum random_product_sum(const Grid& g, std::size_t N, std::size_t R, std::uint64_t seed) {
    // Each term is u^{(x)N}, so the sum is exchange-symmetric; factors are
    // band-limited so every state-level invariant applies.
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<ProductTerm> terms(R);
    for (auto& t : terms) {
        t.coeff = {nd(gen), nd(gen)};
        std::vector<Complex> u(g.M);
        for (std::size_t l = 0; l < g.M; ++l)
            if (g.in_band(l)) u[l] = {nd(gen), nd(gen)};
        t.factors.assign(N, u);
    }
    return normalize(ProductSum(g, N, Basis::momentum, std::move(terms)));
}

Distribution analytic_fringe(double k, double spacing, std::size_t n) {
    Distribution d;
    d.offset = -spacing * static_cast<double>(n / 2);
    d.spacing = spacing;
    d.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.p[i] = 1 + std::cos(k * d.position(i));
    const double t = d.total();
    for (auto& v : d.p) v /= t;
    return d;
}

}  // namespace

TEST(Conditional, SinglePhotonIsIntensity) {
    const Grid g = make_grid(32, 1.0, 0.25);
    const WaveTensor w = oracle::random_symmetric(g, 1, 3);
    const auto psi = oracle::position_amplitudes(w);
    const Distribution d = conditional_centroid(w);
    const Distribution m = marginal_centroid(w);
    for (std::size_t j = 0; j < g.M; ++j) {
        EXPECT_NEAR(d.p[j], std::norm(psi[j]) * g.dx, 1e-14);
        EXPECT_NEAR(m.p[j], d.p[j], 1e-14);
    }
}

TEST(Conditional, TwoPhotonNoonFringes) {
    // dx = 0.25 resolves the 4 k0 fringe on the original grid.
    const Grid g = make_grid(256, 0.25, 13.0 / 64);
    const ProductSum p = noon_state(2, g).state;
    const Distribution d = conditional_centroid(p);
    const auto f = fringe_metrics(d);
    EXPECT_GE(f.visibility, 0.98);
    EXPECT_NEAR(f.period / (std::numbers::pi / (2 * g.k0)), 1.0, 0.005);
    const auto ref = oracle::conditional(oracle::position_amplitudes(densify(p)), g, 2);
    EXPECT_LT(oracle::max_abs(d.p, ref.p), 1e-12);
}

TEST(Conditional, ZeroDiagonalIsRejected) {
    const Grid g = make_grid(16, 1.0, 0.25);
    WaveTensor w(g, 2, Basis::position);
    w[1 * 16 + 2] = w[2 * 16 + 1] = 1.0;
    try {
        conditional_centroid(normalize(w));
        FAIL() << "expected PhysicsError";
    } catch (const PhysicsError& e) {
        EXPECT_NE(std::string(e.what()).find("zero diagonal"), std::string::npos);
    }
}

TEST(Marginal, DenseMatchesEnumeration) {
    const Grid g = make_grid(16, 1.0, 0.25);
    for (std::size_t N = 1; N <= 3; ++N) {
        const WaveTensor w = oracle::random_symmetric(g, N, 20 + N);
        const Distribution ref = oracle::marginal(oracle::position_amplitudes(w), g, N);
        const Distribution got = marginal_centroid(w);
        ASSERT_EQ(got.size(), N * 15 + 1);
        EXPECT_DOUBLE_EQ(got.offset, g.x(0));
        EXPECT_LT(oracle::max_abs(got.p, ref.p), 1e-13) << "N=" << N;
        EXPECT_NEAR(got.total(), 1.0, 1e-12);
    }
}

TEST(Marginal, LowRankMatchesDense) {
    for (std::size_t M : {16u, 32u})
        for (std::size_t N = 1; N <= 3; ++N)
            for (std::size_t R : {1u, 3u}) {
                const Grid g = make_grid(M, 1.0, 0.25);
                const ProductSum p = random_product_sum(g, N, R, 100 * M + 10 * N + R);
                const Distribution a = marginal_centroid(p);
                const Distribution b = marginal_centroid(densify(p));
                EXPECT_LT(max_abs_deviation(a, b), 1e-10) << M << " " << N << " " << R;
                for (double v : a.p) EXPECT_GE(v, 0.0);
            }
}

TEST(Marginal, ThreadCountDoesNotChangeBits) {
    const Grid g = make_grid(32, 1.0, 0.25);
    const WaveTensor w = oracle::random_symmetric(g, 3, 5);
    const Distribution a = marginal_centroid(w, CentroidLattice::open, 1);
    const Distribution b = marginal_centroid(w, CentroidLattice::open, 3);
    EXPECT_EQ(a.p, b.p);
}

TEST(Marginal, PeriodicFoldAgreesForLocalizedStates) {
    const Grid g = make_grid(128, 1.0, 0.2);
    const auto prof = bandlimited_gaussian_profile(g, g.k0 / 10).state;
    const ProductSum p = classical_product(2, g, prof);
    const Distribution open = marginal_centroid(p);
    const Distribution fold = marginal_centroid(p, CentroidLattice::periodic);
    ASSERT_EQ(fold.size(), g.M);
    EXPECT_NEAR(fold.variance(), open.variance(), 1e-10);
    EXPECT_NEAR(fold.mean(), open.mean(), 1e-10);
}

TEST(Marginal, ClassicalThreePhotonVariance) {
    const Grid g = make_grid(64, 1.0, 0.2);
    const auto prof = bandlimited_gaussian_profile(g, g.k0 / 5).state;
    const WaveTensor w = densify(classical_product(3, g, prof));
    const double dx2 = one_photon_marginal(w).variance();
    EXPECT_NEAR(marginal_centroid(w).variance(), dx2 / 3, 1e-10);
}

TEST(Marginal, NonSeparableStateSplitsConditionalFromMarginal) {
    // Two displaced photons of unequal widths, symmetrized. Equal widths
    // would still factor in (X, xi); unequal ones couple them.
    const Grid g = make_grid(64, 1.0, 0.2);
    const auto a = to_position(g, bandlimited_gaussian_profile(g, g.k0 / 4, -4.0).state);
    const auto b = to_position(g, bandlimited_gaussian_profile(g, g.k0 / 12, 4.0).state);
    WaveTensor w(g, 2, Basis::position);
    for (std::size_t i = 0; i < g.M; ++i)
        for (std::size_t j = 0; j < g.M; ++j) w[i * g.M + j] = a[i] * b[j] + b[i] * a[j];
    w = normalize(w);
    const auto [x, y] = align(conditional_centroid(w), marginal_centroid(w));
    EXPECT_GT(total_variation(x, y), 0.1);
}

TEST(Absorption, FullOrderEqualsConditional) {
    const Grid g = make_grid(16, 1.0, 0.25);
    for (std::size_t N = 1; N <= 3; ++N) {
        const WaveTensor w = oracle::random_symmetric(g, N, 40 + N);
        const Distribution a = mphoton_absorption(as_superposition(w), N);
        const Distribution c = conditional_centroid(w);
        EXPECT_LT(max_abs_deviation(a, c), 1e-12);
    }
    const ProductSum p = noon_state(3, make_grid(16, 1.0, 3.0 / 16)).state;
    EXPECT_LT(max_abs_deviation(mphoton_absorption(as_superposition(p), 3), conditional_centroid(p)), 1e-12);
}

TEST(Absorption, SuperpositionMatchesDirectSum) {
    const Grid g = make_grid(16, 1.0, 0.25);
    const WaveTensor w2 = oracle::random_symmetric(g, 2, 50);
    const WaveTensor w3 = oracle::random_symmetric(g, 3, 51);
    const Complex c2{0.6, 0.0}, c3{0.0, 0.8};
    const auto sup = superpose_photon_numbers(0, {{c2, w2}, {c3, w3}});
    const Distribution d = mphoton_absorption(sup, 2);
    const auto a2 = oracle::absorption(oracle::position_amplitudes(w2), g, 2, 2);
    const auto a3 = oracle::absorption(oracle::position_amplitudes(w3), g, 3, 2);
    std::vector<double> ref(g.M);
    double t = 0;
    for (std::size_t x = 0; x < g.M; ++x) t += ref[x] = 1 * std::norm(c2) * a2[x] + 3 * std::norm(c3) * a3[x];
    for (auto& v : ref) v /= t;
    EXPECT_LT(oracle::max_abs(d.p, ref), 1e-10);
    // The low-rank route agrees with the dense one.
    const ProductSum p3 = random_product_sum(g, 3, 2, 52);
    const auto lr = superpose_photon_numbers(0, {{c2, w2}, {c3, p3}});
    const auto dn = superpose_photon_numbers(0, {{c2, w2}, {c3, densify(p3)}});
    EXPECT_LT(max_abs_deviation(mphoton_absorption(lr, 2), mphoton_absorption(dn, 2)), 1e-12);
}

TEST(Absorption, SinglePhotonMarginalOfNoonIsFringeless) {
    const Grid g = make_grid(256, 0.25, 13.0 / 64);
    const Distribution d = one_photon_marginal(noon_state(2, g).state);
    const double mx = *std::max_element(d.p.begin(), d.p.end());
    const double mn = *std::min_element(d.p.begin(), d.p.end());
    EXPECT_LT((mx - mn) / (mx + mn), 1e-6);
    EXPECT_THROW(mphoton_absorption(as_superposition(noon_state(2, g).state), 3), PhysicsError);
}

TEST(Spectrum, NoonSupportSitsAtFourK0) {
    const Grid g = noon_grid();
    const double s = spectral_support(marginal_centroid(noon_state(2, g).state), 1e-10);
    EXPECT_NEAR(s, 4 * g.k0, g.dk() / 2);
}

TEST(Spectrum, GaussianSupportIsFarInsideBound) {
    const Grid g = make_grid(64, 1.0, 0.2);
    const auto prof = bandlimited_gaussian_profile(g, g.k0 / 10).state;
    const double s = spectral_support(marginal_centroid(classical_product(2, g, prof)), 1e-10);
    EXPECT_LT(s, 4 * g.k0 * 0.75);
}

TEST(Spectrum, WhiteNoiseReachesNyquist) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    Distribution d;
    d.spacing = 0.5;
    d.offset = -16;
    d.p.resize(64);
    for (auto& v : d.p) v = u(gen);
    const double nyq = std::numbers::pi / d.spacing;
    EXPECT_GT(spectral_support(d, 1e-10), 0.9 * nyq);
}

TEST(Spectrum, BandBoundHoldsForRandomStates) {
    const Grid g = make_grid(32, 1.0, 0.2);
    for (std::size_t N = 1; N <= 3; ++N)
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const WaveTensor w = oracle::random_symmetric(g, N, 1000 * N + seed);
            const double cut = 2 * static_cast<double>(N) * g.k0 + g.dk();
            EXPECT_LE(spectral_power_beyond(marginal_centroid(w), cut), 1e-10);
            EXPECT_LE(spectral_support(marginal_centroid(w), 1e-10), cut);
            EXPECT_LE(spectral_support(conditional_centroid(w), 1e-10), cut);
        }
}

TEST(Fringe, AnalyticCosine) {
    const double k = 3.0;
    const auto d = analytic_fringe(2 * k, 0.05, 2048);
    const auto f = fringe_metrics(d);
    EXPECT_NEAR(f.period / (std::numbers::pi / k), 1.0, 0.005);
    EXPECT_NEAR(f.visibility, 1.0, 0.01);
}

TEST(Fringe, FlatHasNoFringe) {
    Distribution d;
    d.spacing = 0.5;
    d.p.assign(128, 1.0 / 128);
    try {
        fringe_metrics(d);
        FAIL() << "expected PhysicsError";
    } catch (const PhysicsError& e) {
        EXPECT_NE(std::string(e.what()).find("no fringe detected"), std::string::npos);
    }
}

TEST(Fringe, FourPhotonNoonPeriod) {
    const Grid g = noon_grid();
    const auto f = fringe_metrics(marginal_centroid(noon_state(4, g).state));
    EXPECT_NEAR(f.period / (std::numbers::pi / (4 * g.k0)), 1.0, 0.01);
    EXPECT_GE(f.visibility, 0.95);
}

TEST(Compare, LatticeRules) {
    Distribution a, b;
    a.spacing = 0.5, a.p = {0.5, 0.5};
    b.spacing = 0.25, b.p = {0.25, 0.25, 0.25, 0.25};
    EXPECT_THROW(total_variation(a, b), InvalidArgument);
    Distribution fine;
    fine.offset = 0, fine.spacing = 0.5, fine.p = {0.1, 0.2, 0.3, 0.2, 0.2};
    const Distribution coarse = resample(fine, 0, 1.0, 3);
    EXPECT_NEAR(coarse.p[0], 0.1 / 0.6, 1e-15);
    EXPECT_NEAR(coarse.p[1], 0.3 / 0.6, 1e-15);
    EXPECT_THROW(resample(fine, 0.25, 1.0, 2), InvalidArgument);
    EXPECT_THROW(resample(fine, 0, 0.75, 2), InvalidArgument);
}
