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

#include "ocm/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "ocm/errors.hpp"

namespace ocm::io {
namespace {

class Hasher {
   public:
    template <class T>
    void add(const T& v) {
        unsigned char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        h_ = fnv1a(buf, h_);
    }
    void add(std::span<const Complex> amps) {
        for (const auto& a : amps) {
            add(a.real());
            add(a.imag());
        }
    }
    void add_grid(const Grid& g, std::size_t N, Basis b) {
        add(static_cast<std::uint64_t>(g.M));
        add(g.dx);
        add(g.k0);
        add(static_cast<std::uint64_t>(N));
        add(static_cast<std::uint32_t>(b));
    }
    std::uint64_t value() const { return h_; }

   private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

void header(std::ostream& os, const Metadata& meta) {
    for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t state_hash(const State& s) {
    Hasher h;
    if (const auto* w = std::get_if<WaveTensor>(&s)) {
        h.add(std::uint8_t{'W'});
        h.add_grid(w->grid(), w->photons(), w->basis());
        h.add(w->amp());
    } else {
        const auto& p = std::get<ProductSum>(s);
        h.add(std::uint8_t{'P'});
        h.add_grid(p.grid(), p.photons(), p.basis());
        h.add(static_cast<std::uint64_t>(p.rank()));
        for (const auto& t : p.terms()) {
            h.add(t.coeff.real());
            h.add(t.coeff.imag());
            for (const auto& f : t.factors) h.add(std::span<const Complex>(f));
        }
    }
    return h.value();
}

std::uint64_t state_hash(const PhotonSuperposition& s) {
    Hasher h;
    h.add(std::uint8_t{'S'});
    h.add(s.vacuum().real());
    h.add(s.vacuum().imag());
    for (const auto& c : s.components()) {
        h.add(c.amplitude.real());
        h.add(c.amplitude.imag());
        h.add(state_hash(c.state));
    }
    return h.value();
}

std::string hex(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

Metadata grid_metadata(const Grid& g, std::uint64_t hash) {
    return {{"state_hash", hex(hash)},
            {"M", std::to_string(g.M)},
            {"dx", format_double(g.dx)},
            {"k0", format_double(g.k0)}};
}

void write_distribution_csv(const std::filesystem::path& path, const Distribution& d, const Metadata& meta) {
    auto os = open_out(path);
    header(os, meta);
    os << "# offset=" << format_double(d.offset) << '\n'
       << "# spacing=" << format_double(d.spacing) << '\n'
       << "# period=" << d.period << '\n'
       << "# count=" << d.size() << '\n'
       << "X,p\n";
    for (std::size_t i = 0; i < d.size(); ++i) os << format_double(d.position(i)) << ',' << format_double(d.p[i]) << '\n';
    finish(os, path);
}

void write_distribution_json(const std::filesystem::path& path, const Distribution& d, const Metadata& meta) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : meta) j["metadata"][k] = v;
    j["support"] = {{"offset", d.offset}, {"spacing", d.spacing}, {"count", d.size()}, {"period", d.period}};
    j["p"] = d.p;
    write_text(path, j.dump(1) + "\n");
}

Distribution read_distribution_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open " + path.string());
    Distribution d;
    bool have_offset = false, have_spacing = false;
    std::vector<double> xs;
    std::string line;
    bool seen_header = false;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "offset") d.offset = std::stod(val), have_offset = true;
            else if (key == "spacing") d.spacing = std::stod(val), have_spacing = true;
            else if (key == "period") d.period = std::stoull(val);
            continue;
        }
        if (!seen_header) {
            if (line != "X,p") throw InvalidArgument(path.string() + ": expected column header X,p");
            seen_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        xs.push_back(std::stod(line.substr(0, comma)));
        d.p.push_back(std::stod(line.substr(comma + 1)));
    }
    if (d.p.empty()) throw InvalidArgument(path.string() + ": no data rows");
    if (!have_offset) d.offset = xs.front();
    if (!have_spacing) {
        if (xs.size() < 2) throw InvalidArgument(path.string() + ": cannot infer lattice spacing");
        d.spacing = xs[1] - xs[0];
    }
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - d.position(i)) > 1e-9 * std::max(1.0, std::abs(xs[i])))
            throw InvalidArgument(path.string() + ": X column is not a uniform lattice");
    return d;
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s, const Metadata& meta) {
    auto os = open_out(path);
    header(os, meta);
    os << "freq,power\n";
    for (std::size_t i = 0; i < s.freq.size(); ++i)
        os << format_double(s.freq[i]) << ',' << format_double(s.power[i]) << '\n';
    finish(os, path);
}

void write_histogram_csv(const std::filesystem::path& path, const CentroidHistogram& h, const Metadata& meta) {
    auto os = open_out(path);
    header(os, meta);
    os << "X_bin,count\n";
    for (const auto& [key, n] : h.pooled) os << format_double(h.position(key)) << ',' << n << '\n';
    finish(os, path);
}

void write_strata_csv(const std::filesystem::path& path, const CentroidHistogram& h, const Metadata& meta) {
    auto os = open_out(path);
    header(os, meta);
    os << "m,X_bin,count\n";
    for (const auto& [m, counts] : h.by_count)
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (counts[s] == 0) continue;
            const double x = h.origin + h.pixel_size * static_cast<double>(s) / static_cast<double>(m);
            os << m << ',' << format_double(x) << ',' << counts[s] << '\n';
        }
    finish(os, path);
}

void write_events_ndjson(const std::filesystem::path& path, std::span<const EventLogEntry> events) {
    auto os = open_out(path);
    for (const auto& e : events) {
        os << "{\"trial\":" << e.trial << ",\"m\":" << e.event.detected() << ",\"hits\":[";
        for (std::size_t i = 0; i < e.event.hits.size(); ++i)
            os << (i ? "," : "") << '[' << e.event.hits[i].first << ',' << e.event.hits[i].second << ']';
        os << "],\"saturated\":" << (e.event.saturated ? "true" : "false") << ",\"X\":";
        if (e.centroid) os << format_double(*e.centroid);
        else os << "\"discarded\"";
        os << "}\n";
    }
    finish(os, path);
}

void write_loss_sweep_csv(const std::filesystem::path& path, std::span<const LossSweepRow> rows,
                          const Metadata& meta) {
    auto os = open_out(path);
    header(os, meta);
    os << "eta,alpha_z,p,N_z,measured_var,ci_lo,ci_hi,eq19_var,rel_dev\n";
    for (const auto& r : rows)
        os << format_double(r.params.eta_det) << ',' << format_double(r.params.alpha_z) << ','
           << format_double(r.survival) << ',' << format_double(r.reduced_photons) << ','
           << format_double(r.measured_var) << ',' << format_double(r.ci_lo) << ',' << format_double(r.ci_hi)
           << ',' << format_double(r.eq19_var) << ',' << format_double(r.rel_dev) << '\n';
    finish(os, path);
}

void write_loss_strata_csv(const std::filesystem::path& path, std::span<const LossSweepRow> rows,
                           const Metadata& meta) {
    auto os = open_out(path);
    header(os, meta);
    os << "eta,alpha_z,m,count,mean,variance\n";
    for (const auto& r : rows)
        for (const auto& s : r.strata)
            os << format_double(r.params.eta_det) << ',' << format_double(r.params.alpha_z) << ',' << s.survivors
               << ',' << s.count << ',' << format_double(s.mean) << ',' << format_double(s.variance) << '\n';
    finish(os, path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto os = open_out(path);
    os << text;
    finish(os, path);
}

}  // namespace ocm::io
