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

#include "ocm/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <new>
#include <numeric>
#include <set>
#include <stdexcept>
#include <variant>

#include "ocm/container.hpp"
#include "ocm/errors.hpp"
#include "ocm/io.hpp"
#include "ocm/lattice.hpp"
#include "ocm/loss.hpp"
#include "ocm/measurement.hpp"
#include "ocm/sampler.hpp"
#include "ocm/states.hpp"

namespace ocm::experiment {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

/// A config object with a fixed key set. Reads record the value actually
/// used (defaults included) into resolved().
class Block {
   public:
    Block(const json& j, std::string path, const std::vector<std::string>& allowed) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw InvalidArgument(path_ + ": expected an object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!ok.count(it.key())) throw InvalidArgument(where(it.key()) + ": unknown key");
        resolved_ = ojson::object();
    }

    bool has(const std::string& k) const { return j_.contains(k); }
    std::string where(const std::string& k) const { return path_ + "." + k; }

    double number(const std::string& k) {
        const json& v = need(k);
        if (!v.is_number()) throw InvalidArgument(where(k) + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw InvalidArgument(where(k) + ": expected a finite number");
        resolved_[k] = d;
        return d;
    }
    double number(const std::string& k, double def) {
        if (!has(k)) return resolved_[k] = def, def;
        return number(k);
    }
    std::uint64_t integer(const std::string& k) {
        const json& v = need(k);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw InvalidArgument(where(k) + ": expected a non-negative integer");
        const auto u = v.get<std::uint64_t>();
        resolved_[k] = u;
        return u;
    }
    std::uint64_t integer(const std::string& k, std::uint64_t def) {
        if (!has(k)) return resolved_[k] = def, def;
        return integer(k);
    }
    bool flag(const std::string& k, bool def) {
        if (!has(k)) return resolved_[k] = def, def;
        if (!j_[k].is_boolean()) throw InvalidArgument(where(k) + ": expected true or false");
        return resolved_[k] = j_[k].get<bool>(), j_[k].get<bool>();
    }
    std::string text(const std::string& k) {
        const json& v = need(k);
        if (!v.is_string()) throw InvalidArgument(where(k) + ": expected a string");
        resolved_[k] = v.get<std::string>();
        return v.get<std::string>();
    }
    std::string text(const std::string& k, const std::string& def) {
        if (!has(k)) return resolved_[k] = def, def;
        return text(k);
    }
    const json& raw(const std::string& k) const { return need(k); }
    void put(const std::string& k, ojson v) { resolved_[k] = std::move(v); }
    const ojson& resolved() const { return resolved_; }

   private:
    const json& need(const std::string& k) const {
        if (!has(k)) throw InvalidArgument(where(k) + ": required key missing");
        return j_[k];
    }
    const json& j_;
    std::string path_;
    ojson resolved_;
};

Complex amplitude(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw InvalidArgument(where + ": expected a number or [re, im]");
}

ojson amplitude_json(Complex c) { return ojson::array({c.real(), c.imag()}); }

/// Reads `key` either directly or as `key_over_k0` (a multiple of k0).
double wavenumber(Block& b, const std::string& key, const Grid& g) {
    const std::string ratio = key + "_over_k0";
    if (b.has(key) && b.has(ratio)) throw InvalidArgument(b.where(key) + ": give either " + key + " or " + ratio);
    if (b.has(ratio)) return b.number(ratio) * g.k0;
    return b.number(key);
}

std::size_t photon_count(Block& b, const std::string& k) {
    const auto n = b.integer(k);
    if (n < 1 || n > 4096) throw InvalidArgument(b.where(k) + ": photon number must lie in [1, 4096]");
    return static_cast<std::size_t>(n);
}

struct Built {
    std::variant<State, PhotonSuperposition> state;
    double discarded = 0;
    std::optional<double> rho;
    std::optional<double> delta_k;  ///< beam bandwidth, for the width formula
};

Built build_state(const json& j, const std::string& path, const Grid& g, const fs::path& base, ojson& resolved);

Built build_single(const json& j, const std::string& path, const Grid& g, const fs::path& base, ojson& resolved) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw InvalidArgument(path + ".type: required string missing");
    const std::string type = j["type"].get<std::string>();
    Built out;
    if (type == "noon") {
        Block b(j, path, {"type", "N", "sigma_env", "sigma_env_over_k0", "carrier", "carrier_over_k0"});
        b.text("type");
        const std::size_t N = photon_count(b, "N");
        NoonOptions o;
        if (b.has("sigma_env") || b.has("sigma_env_over_k0")) o.sigma_env = wavenumber(b, "sigma_env", g);
        else b.put("sigma_env", o.sigma_env = g.dk() / 8);
        if (b.has("carrier") || b.has("carrier_over_k0")) o.carrier = wavenumber(b, "carrier", g);
        else b.put("carrier", o.carrier = g.k0);
        auto p = noon_state(N, g, o);
        out.state = State{std::move(p.state)};
        out.discarded = p.discarded;
        resolved = b.resolved();
    } else if (type == "gaussian_beam") {
        Block b(j, path, {"type", "N0", "delta_k", "delta_k_over_k0", "rho"});
        b.text("type");
        GaussianBeamSpec s;
        s.N0 = photon_count(b, "N0");
        s.delta_k = wavenumber(b, "delta_k", g);
        s.rho = b.number("rho", 0.0);
        auto p = gaussian_beam(s, g);
        out.state = State{std::move(p.state)};
        out.discarded = p.discarded;
        out.rho = s.rho;
        out.delta_k = s.delta_k;
        resolved = b.resolved();
    } else if (type == "correlated_biphoton") {
        Block b(j, path, {"type", "sigma_K", "sigma_K_over_k0", "sigma_kappa", "sigma_kappa_over_k0"});
        b.text("type");
        const double sK = wavenumber(b, "sigma_K", g);
        const double sk = wavenumber(b, "sigma_kappa", g);
        auto p = correlated_biphoton(g, sK, sk);
        out.state = State{std::move(p.state)};
        out.discarded = p.discarded;
        resolved = b.resolved();
    } else if (type == "classical_product") {
        Block b(j, path, {"type", "N", "delta_k", "delta_k_over_k0", "center"});
        b.text("type");
        const std::size_t N = photon_count(b, "N");
        const double dk = wavenumber(b, "delta_k", g);
        const double c = b.number("center", 0.0);
        auto prof = bandlimited_gaussian_profile(g, dk, c);
        out.state = State{classical_product(N, g, prof.state)};
        out.discarded = prof.discarded;
        out.rho = 0.0;
        out.delta_k = dk;
        resolved = b.resolved();
    } else if (type == "file") {
        Block b(j, path, {"type", "path"});
        b.text("type");
        fs::path p = b.text("path");
        if (p.is_relative()) p = base / p;
        auto loaded = load(p);
        const Grid& lg = std::visit([](const auto& s) -> const Grid& { return s.grid(); }, loaded);
        if (!(lg == g)) throw InvalidArgument(b.where("path") + ": state grid differs from the grid block");
        std::visit([&](auto& s) { out.state = State{std::move(s)}; }, loaded);
        resolved = b.resolved();
    } else if (type == "superposition") {
        Block b(j, path, {"type", "vacuum", "components"});
        b.text("type");
        const Complex vac = b.has("vacuum") ? amplitude(b.raw("vacuum"), b.where("vacuum")) : Complex{};
        b.put("vacuum", amplitude_json(vac));
        const json& comps = b.raw("components");
        if (!comps.is_array() || comps.empty())
            throw InvalidArgument(b.where("components") + ": expected a non-empty array");
        std::vector<PhotonComponent> parts;
        ojson rcomps = ojson::array();
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::string cp = b.where("components") + "[" + std::to_string(i) + "]";
            Block cb(comps[i], cp, {"amplitude", "state"});
            const Complex a = amplitude(cb.raw("amplitude"), cb.where("amplitude"));
            cb.put("amplitude", amplitude_json(a));
            ojson rs;
            Built inner = build_state(cb.raw("state"), cb.where("state"), g, base, rs);
            if (!std::holds_alternative<State>(inner.state))
                throw InvalidArgument(cb.where("state") + ": superpositions cannot nest");
            cb.put("state", rs);
            out.discarded = std::max(out.discarded, inner.discarded);
            parts.push_back({a, std::get<State>(std::move(inner.state))});
            rcomps.push_back(cb.resolved());
        }
        b.put("components", rcomps);
        out.state = superpose_photon_numbers(vac, std::move(parts));
        resolved = b.resolved();
    } else {
        throw InvalidArgument(path + ".type: unknown state type '" + type + "'");
    }
    return out;
}

Built build_state(const json& j, const std::string& path, const Grid& g, const fs::path& base, ojson& resolved) {
    return build_single(j, path, g, base, resolved);
}

const State& need_state(const Built& b, const char* experiment) {
    if (const auto* s = std::get_if<State>(&b.state)) return *s;
    throw InvalidArgument(std::string("experiment '") + experiment + "' needs a fixed photon number state");
}

PhotonSuperposition as_super(const Built& b) {
    if (const auto* s = std::get_if<State>(&b.state)) return as_superposition(*s);
    return std::get<PhotonSuperposition>(b.state);
}

std::uint64_t hash_of(const Built& b) {
    return std::visit([](const auto& s) { return io::state_hash(s); }, b.state);
}

std::size_t max_photons(const Built& b) {
    if (const auto* s = std::get_if<State>(&b.state)) return photons(*s);
    return std::get<PhotonSuperposition>(b.state).max_photons();
}

Distribution exact_marginal(const Built& b, CentroidLattice lat, std::size_t threads) {
    if (const auto* s = std::get_if<State>(&b.state)) return marginal_centroid(*s, lat, threads);
    return marginal_centroid(std::get<PhotonSuperposition>(b.state), lat, threads);
}

PositionSampler make_sampler(const Built& b) {
    if (const auto* s = std::get_if<State>(&b.state)) return PositionSampler(*s);
    return PositionSampler(std::get<PhotonSuperposition>(b.state));
}

DetectorModel parse_detector(const json* j, const std::string& path, ojson& resolved) {
    static const json empty = json::object();
    Block b(j ? *j : empty, path, {"pixel_factor", "eta", "number_resolving", "discard_saturated", "dark_rate"});
    DetectorModel d;
    d.pixel_factor = static_cast<std::size_t>(b.integer("pixel_factor", 1));
    d.eta = b.number("eta", 1.0);
    d.number_resolving = b.flag("number_resolving", true);
    d.discard_saturated = b.flag("discard_saturated", false);
    d.dark_rate = b.number("dark_rate", 0.0);
    resolved = b.resolved();
    return d;
}

ojson estimate_json(const VarianceEstimate& e) {
    return {{"n", e.n}, {"mean", e.mean}, {"variance", e.variance}, {"ci_lo", e.ci_lo}, {"ci_hi", e.ci_hi}};
}

ojson fringe_json(const Distribution& d) {
    try {
        const auto f = fringe_metrics(d);
        return {{"period", f.period}, {"visibility", f.visibility}};
    } catch (const PhysicsError&) {
        return nullptr;
    }
}

constexpr std::size_t kMaxSampledRefinement = 1 << 12;

class Writer {
   public:
    Writer(fs::path dir, io::Metadata meta, std::set<std::string> formats)
        : dir_(std::move(dir)), meta_(std::move(meta)), formats_(std::move(formats)) {}

    void distribution(const std::string& stem, const Distribution& d) {
        if (formats_.count("csv")) io::write_distribution_csv(add(stem + ".csv"), d, meta_);
        if (formats_.count("json")) io::write_distribution_json(add(stem + ".json"), d, meta_);
    }
    fs::path add(const std::string& name) {
        files_.push_back(name);
        return dir_ / name;
    }
    const io::Metadata& meta() const { return meta_; }
    std::vector<std::string> files() const { return files_; }

   private:
    fs::path dir_;
    io::Metadata meta_;
    std::set<std::string> formats_;
    std::vector<std::string> files_;
};

}  // namespace

RunOutcome run(const json& config, const Overrides& ov, const fs::path& base_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    Block top(config, "config", {"grid", "state", "experiment", "output"});
    RunOutcome out;
    const std::size_t threads = std::max<std::size_t>(1, ov.threads);

    Block gb(top.raw("grid"), "grid", {"M", "dx", "sin_theta"});
    const auto M = gb.integer("M");
    const double dx = gb.number("dx");
    const double st = gb.number("sin_theta");
    const Grid g = make_grid(static_cast<std::size_t>(M), dx, st);
    top.put("grid", gb.resolved());

    const json& ej = top.raw("experiment");
    if (!ej.is_object() || !ej.contains("type") || !ej["type"].is_string())
        throw InvalidArgument("experiment.type: required string missing");
    const std::string type = ej["type"].get<std::string>();

    static const json no_output = json::object();
    Block ob(top.has("output") ? top.raw("output") : no_output, "output", {"directory", "formats"});
    const std::string dir_text = ob.text("directory", "out");
    std::set<std::string> formats;
    if (ob.has("formats")) {
        const json& f = ob.raw("formats");
        if (!f.is_array() || f.empty()) throw InvalidArgument("output.formats: expected a non-empty array");
        for (const auto& v : f) {
            if (!v.is_string() || (v != "csv" && v != "json"))
                throw InvalidArgument("output.formats: entries must be \"csv\" or \"json\"");
            formats.insert(v.get<std::string>());
        }
    } else {
        formats.insert("csv");
    }
    ob.put("formats", ojson(std::vector<std::string>(formats.begin(), formats.end())));

    // Validate the experiment block before any expensive state work.
    std::vector<std::string> keys;
    if (type == "exact-conditional") keys = {"type", "seed"};
    else if (type == "exact-marginal") keys = {"type", "seed", "lattice", "fringes"};
    else if (type == "mphoton") keys = {"type", "seed", "order"};
    else if (type == "sample") keys = {"type", "seed", "trials", "detector", "keep_events", "compare_exact"};
    else if (type == "shift") keys = {"type", "seed", "trials", "d", "detector"};
    else if (type == "loss-sweep") keys = {"type", "seed", "trials", "rho", "width", "settings"};
    else if (type == "spectral-check") keys = {"type", "seed", "rel_tol"};
    else throw InvalidArgument("experiment.type: unknown experiment '" + type + "'");
    Block eb(ej, "experiment", keys);
    eb.text("type");
    std::uint64_t seed = eb.integer("seed", 1);
    if (ov.seed) {
        seed = *ov.seed;
        eb.put("seed", seed);
    }

    ojson rstate;
    const Built st_built = build_state(top.raw("state"), "state", g, base_dir, rstate);
    top.put("state", rstate);

    out.out_dir = ov.out_dir ? *ov.out_dir : fs::path(dir_text);
    fs::create_directories(out.out_dir);
    io::Metadata meta = io::grid_metadata(g, hash_of(st_built));
    meta.emplace_back("experiment", type);
    meta.emplace_back("seed", std::to_string(seed));
    Writer w(out.out_dir, meta, formats);

    ojson& s = out.summary;
    s["experiment"] = type;
    s["photons"] = max_photons(st_built);
    s["discarded_power"] = st_built.discarded;

    if (type == "exact-conditional") {
        const Distribution d = std::visit([](const auto& x) { return conditional_centroid(x); },
                                          need_state(st_built, "exact-conditional"));
        w.distribution("p_c", d);
        s["mean"] = d.mean();
        s["variance"] = d.variance();
    } else if (type == "exact-marginal") {
        const std::string lat = eb.text("lattice", "open");
        if (lat != "open" && lat != "periodic")
            throw InvalidArgument("experiment.lattice: expected \"open\" or \"periodic\"");
        const bool fringes = eb.flag("fringes", false);
        const Distribution d =
            exact_marginal(st_built, lat == "open" ? CentroidLattice::open : CentroidLattice::periodic, threads);
        w.distribution("p_m", d);
        s["lattice"] = lat;
        s["mean"] = d.mean();
        s["variance"] = d.variance();
        if (fringes) {
            s["fringe"] = fringe_json(d);
            s["expected_period"] = std::numbers::pi / (static_cast<double>(max_photons(st_built)) * g.k0);
        }
    } else if (type == "mphoton") {
        const auto order = eb.integer("order");
        if (order < 1) throw InvalidArgument("experiment.order: must be >= 1");
        const Distribution d = mphoton_absorption(as_super(st_built), static_cast<std::size_t>(order));
        w.distribution("absorption", d);
        s["order"] = order;
        s["mean"] = d.mean();
        s["variance"] = d.variance();
    } else if (type == "sample") {
        const auto trials = eb.integer("trials");
        if (trials < 1) throw InvalidArgument("experiment.trials: must be >= 1");
        ojson rdet;
        const DetectorModel det = parse_detector(eb.has("detector") ? &eb.raw("detector") : nullptr,
                                                 "experiment.detector", rdet);
        eb.put("detector", rdet);
        det.validate(g);
        const bool keep = eb.flag("keep_events", false);
        const bool cmp = eb.flag("compare_exact", false);
        const PositionSampler sampler = make_sampler(st_built);
        const RunResult r = run_histogram(sampler, det, trials, seed, {threads, keep});
        const CentroidHistogram& h = r.histogram;
        io::write_histogram_csv(w.add("histogram.csv"), h, w.meta());
        io::write_strata_csv(w.add("strata.csv"), h, w.meta());
        if (keep) io::write_events_ndjson(w.add("events.ndjson"), r.events);
        // The pooled histogram lives on the lattice a / lcm(detected counts).
        std::size_t L = 1;
        for (const auto& [m, counts] : h.by_count) {
            L = std::lcm(L, m);
            if (L > kMaxSampledRefinement) break;
        }
        std::optional<Distribution> sampled;
        if (L <= kMaxSampledRefinement && h.retained() > 0) sampled = h.to_distribution(L, det.pixels(g));
        if (sampled) w.distribution("p_sampled", *sampled);
        else s["p_sampled"] = "omitted: detected counts have no small common lattice";
        s["trials"] = h.trials;
        s["retained"] = h.retained();
        s["discarded"] = h.discarded;
        s["discarded_fraction"] = static_cast<double>(h.discarded) / static_cast<double>(h.trials);
        s["saturated"] = h.saturated;
        if (h.retained() >= 2) s["centroid"] = estimate_json(variance_with_ci(h, seed ^ 0x5eedb007ULL, kBootstrapResamples, 0.95, threads));
        s["warnings"] = det.warnings(g);
        if (cmp) {
            if (!sampled) throw PhysicsError("compare_exact: sampled histogram has no common lattice with p_m");
            const Distribution exact = exact_marginal(st_built, CentroidLattice::open, threads);
            const auto [a, b] = align(exact, *sampled);
            s["tv_vs_exact"] = total_variation(a, b);
            s["max_abs_vs_exact"] = max_abs_deviation(a, b);
            if (det.eta < 1 || det.dark_rate > 0 || !det.number_resolving)
                s["compare_note"] = "reference is the ideal-detector p_m; lost, dark or merged counts are not modeled in it";
        }
    } else if (type == "shift") {
        const auto trials = eb.integer("trials");
        if (trials < 2) throw InvalidArgument("experiment.trials: must be >= 2");
        const double d = eb.number("d");
        ojson rdet;
        const DetectorModel det = parse_detector(eb.has("detector") ? &eb.raw("detector") : nullptr,
                                                 "experiment.detector", rdet);
        eb.put("detector", rdet);
        det.validate(g);
        const State& st = need_state(st_built, "shift");
        const ShiftResult r = shift_experiment(st, d, det, trials, seed, threads);
        io::write_histogram_csv(w.add("histogram.csv"), r.histogram, w.meta());
        const double N = static_cast<double>(photons(st));
        const double dx2 = one_photon_marginal(st).variance();
        s["d"] = d;
        s["d_hat"] = r.d_hat;
        s["bias"] = r.d_hat - d;
        s["estimator_variance"] = r.estimator_variance;
        s["centroid"] = estimate_json(r.estimate);
        s["one_photon_variance"] = dx2;
        s["sql_variance"] = dx2 / N;
        s["heisenberg_variance"] = dx2 / (N * N);
    } else if (type == "loss-sweep") {
        const auto trials = eb.integer("trials");
        if (trials < 2) throw InvalidArgument("experiment.trials: must be >= 2");
        const double rho = eb.number("rho", st_built.rho.value_or(0.0));
        const json& sj = eb.raw("settings");
        if (!sj.is_array() || sj.empty()) throw InvalidArgument("experiment.settings: expected a non-empty array");
        std::vector<LossParams> settings;
        ojson rset = ojson::array();
        for (std::size_t i = 0; i < sj.size(); ++i) {
            Block b(sj[i], "experiment.settings[" + std::to_string(i) + "]", {"eta_det", "alpha_z"});
            LossParams lp;
            lp.eta_det = b.number("eta_det", 1.0);
            lp.alpha_z = b.number("alpha_z", 0.0);
            lp.validate();
            settings.push_back(lp);
            rset.push_back(b.resolved());
        }
        eb.put("settings", rset);
        const State& st = need_state(st_built, "loss-sweep");
        LossSweepInputs in = loss_inputs(st, rho);
        const std::string width = eb.text("width", "measured");
        if (width == "formula") {
            if (!st_built.delta_k)
                throw InvalidArgument("experiment.width: \"formula\" needs a gaussian_beam or classical_product state");
            in.spec.delta_k = *st_built.delta_k;
            in.dx2 = eq20_width(in.spec);
        } else if (width != "measured") {
            throw InvalidArgument("experiment.width: expected \"measured\" or \"formula\"");
        }
        const auto rows = loss_sweep(st, in, settings, trials, seed, threads);
        io::write_loss_sweep_csv(w.add("loss_sweep.csv"), rows, w.meta());
        io::write_loss_strata_csv(w.add("loss_strata.csv"), rows, w.meta());
        s["var0"] = in.var0;
        s["one_photon_variance"] = in.dx2;
        s["R0"] = in.spec.R0();
        double worst = 0;
        for (const auto& r : rows) worst = std::max(worst, std::abs(r.rel_dev));
        s["max_abs_rel_dev"] = worst;
    } else if (type == "spectral-check") {
        const double tol = eb.number("rel_tol", 1e-10);
        const Distribution d = exact_marginal(st_built, CentroidLattice::open, threads);
        const Spectrum sp = power_spectrum(d);
        io::write_spectrum_csv(w.add("spectrum.csv"), sp, w.meta());
        const double bound = 2.0 * static_cast<double>(max_photons(st_built)) * g.k0;
        const double support = spectral_support(d, tol);
        s["support"] = support;
        s["bound"] = bound;
        s["power_beyond_bound"] = spectral_power_beyond(d, bound + g.dk());
        s["within_bound"] = support <= bound + g.dk() * (1 + 1e-9);
    }

    top.put("experiment", eb.resolved());
    top.put("output", ob.resolved());
    out.resolved = top.resolved();

    io::write_text(out.out_dir / "summary.json", s.dump(1) + "\n");
    out.files = w.files();
    out.files.push_back("summary.json");

    ojson manifest;
    manifest["artifact"] = "ocm";
    manifest["version"] = kVersion;
    manifest["seed"] = seed;
    manifest["config"] = out.resolved;
    manifest["files"] = out.files;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    io::write_text(out.out_dir / "manifest.json", manifest.dump(1) + "\n");
    return out;
}

RunOutcome run_file(const fs::path& config_path, const Overrides& ov) {
    std::ifstream is(config_path);
    if (!is) throw InvalidArgument("cannot read config " + config_path.string());
    json cfg;
    try {
        cfg = json::parse(is);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(config_path.string() + ": " + e.what());
    }
    return run(cfg, ov, config_path.parent_path());
}

ojson compare(const fs::path& a, const fs::path& b) {
    const Distribution da = io::read_distribution_csv(a);
    const Distribution db = io::read_distribution_csv(b);
    const auto [x, y] = align(da, db);
    ojson r;
    r["a"] = a.string();
    r["b"] = b.string();
    r["bins"] = x.size();
    r["spacing"] = x.spacing;
    r["total_variation"] = total_variation(x, y);
    r["max_abs_deviation"] = max_abs_deviation(x, y);
    const ojson fa = fringe_json(da), fb = fringe_json(db);
    r["fringe_a"] = fa;
    r["fringe_b"] = fb;
    if (!fa.is_null() && !fb.is_null()) {
        r["fringe_delta"] = {{"period", fb["period"].get<double>() - fa["period"].get<double>()},
                             {"visibility", fb["visibility"].get<double>() - fa["visibility"].get<double>()}};
    } else {
        r["fringe_delta"] = nullptr;
    }
    return r;
}

int exit_code(const std::exception& e) {
    if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
    if (dynamic_cast<const std::domain_error*>(&e)) return 3;
    if (dynamic_cast<const std::length_error*>(&e) || dynamic_cast<const std::bad_alloc*>(&e)) return 4;
    return 1;
}

ojson error_report(const std::exception& e) {
    const int code = exit_code(e);
    const char* kind = code == 2 ? "schema" : code == 3 ? "physics" : code == 4 ? "resource" : "runtime";
    ojson r;
    r["error"] = {{"kind", kind}, {"exit_code", code}, {"message", e.what()}};
    return r;
}

}  // namespace ocm::experiment
