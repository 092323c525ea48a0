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

#include "ocm/container.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "ocm/errors.hpp"

namespace ocm {
namespace {

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    } else {
        return v;
    }
}

class Writer {
   public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw InvalidArgument("cannot open for writing: " + path.string());
    }
    template <class T>
    void put(T v) {
        v = to_little(v);
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put(Complex c) {
        put(c.real());
        put(c.imag());
    }
    void magic(const char (&m)[5]) { out_.write(m, 4); }
    void finish() {
        out_.flush();
        if (!out_) throw InvalidArgument("write failed");
    }

   private:
    std::ofstream out_;
};

class Reader {
   public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw InvalidArgument("cannot open for reading: " + path.string());
    }
    template <class T>
    T get() {
        T v;
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!in_) throw InvalidArgument("truncated state container");
        return to_little(v);
    }
    Complex get_complex() {
        const double re = get<double>();
        const double im = get<double>();
        return {re, im};
    }
    std::string magic() {
        char m[4];
        in_.read(m, 4);
        if (!in_) throw InvalidArgument("truncated state container");
        return std::string(m, 4);
    }
    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

   private:
    std::ifstream in_;
};

void put_header(Writer& w, const Grid& g, std::size_t N, Basis b) {
    w.put<std::uint32_t>(kContainerVersion);
    w.put<std::uint64_t>(g.M);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(N));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(b));
    w.put<double>(g.dx);
    w.put<double>(g.k0);
}

}  // namespace

void save(const std::filesystem::path& path, const WaveTensor& t) {
    Writer w(path);
    w.magic("OCMW");
    put_header(w, t.grid(), t.photons(), t.basis());
    for (const auto& a : t.amp()) w.put(a);
    w.finish();
}

void save(const std::filesystem::path& path, const ProductSum& p) {
    Writer w(path);
    w.magic("OCMP");
    put_header(w, p.grid(), p.photons(), p.basis());
    w.put<std::uint64_t>(p.rank());
    for (const auto& t : p.terms()) {
        w.put(t.coeff);
        for (const auto& f : t.factors)
            for (const auto& a : f) w.put(a);
    }
    w.finish();
}

std::variant<WaveTensor, ProductSum> load(const std::filesystem::path& path, std::size_t cap) {
    Reader r(path);
    const std::string magic = r.magic();
    if (magic != "OCMW" && magic != "OCMP") throw InvalidArgument("not a state container: " + path.string());
    const auto version = r.get<std::uint32_t>();
    if (version != kContainerVersion) throw InvalidArgument("unsupported container version");
    Grid g;
    g.M = r.get<std::uint64_t>();
    const std::size_t N = r.get<std::uint32_t>();
    const auto basis_code = r.get<std::uint32_t>();
    if (basis_code > 1) throw InvalidArgument("bad basis code in container");
    const auto basis = static_cast<Basis>(basis_code);
    g.dx = r.get<double>();
    g.k0 = r.get<double>();
    if (g.M < 4 || (g.M & (g.M - 1)) != 0 || N == 0) throw InvalidArgument("bad container header");

    if (magic == "OCMW") {
        std::vector<Complex> amp(dense_size(g.M, N, cap));
        for (auto& a : amp) a = r.get_complex();
        if (!r.at_end()) throw InvalidArgument("trailing bytes in state container");
        return WaveTensor(g, N, basis, std::move(amp));
    }
    const auto R = r.get<std::uint64_t>();
    if (R == 0 || R > (std::uint64_t{1} << 20)) throw InvalidArgument("bad product-sum rank in container");
    std::vector<ProductTerm> terms(R);
    for (auto& t : terms) {
        t.coeff = r.get_complex();
        t.factors.assign(N, std::vector<Complex>(g.M));
        for (auto& f : t.factors)
            for (auto& a : f) a = r.get_complex();
    }
    if (!r.at_end()) throw InvalidArgument("trailing bytes in state container");
    return ProductSum(g, N, basis, std::move(terms));
}

}  // namespace ocm
