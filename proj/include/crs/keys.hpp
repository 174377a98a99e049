#pragma once

// The secret-common-key bundle shared by the concealing and the restoring
// side, its generator, and the `crskeys v1` text format.
//
// A bundle never materializes its noise or key streams. Streams are derived
// lazily from (master_seed, v_seed) with crs::derive_seed, so one bundle
// serves messages of any length and each trial of the statistical harness
// can re-nonce the key stream without touching the rest of the bundle.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "crs/bitcodec.hpp"
#include "crs/errors.hpp"
#include "crs/nonlinear.hpp"
#include "crs/rng.hpp"

namespace crs {

/// Parameters of a normal distribution N(mean, std_dev^2).
struct NoiseSpec {
    double mean = 0.0;
    double std_dev = 1.0;
};

inline void validate_spec(const NoiseSpec& spec) {
    if (!std::isfinite(spec.mean) || !std::isfinite(spec.std_dev))
        throw std::invalid_argument("noise spec parameters must be finite");
    if (spec.std_dev < 0.0)
        throw std::invalid_argument("noise spec std_dev must be >= 0");
}

/// Per-level secrets of the cascade.
struct LevelKeys {
    double a = 0.1;              // drift parameter of the level map
    double b = 1.0;              // key-stream gain (non-zero)
    double b_u = 1.0;            // concealed-data gain (non-zero)
    NoiseSpec w1{0.0, 0.01};     // drive noise added to the concealed data
    NoiseSpec w2{0.0, 1.0};      // noise coupling this level to the next
    double sigma_v = 1.0;        // std of the key-stream source noise
};

/// The full secret-common-key set.
struct KeyBundle {
    std::vector<LevelKeys> levels;
    std::string nonlinear_id;        // empty = linear concealment
    LogicLevels logic{0.5, 0.5};     // decode threshold for restored words
    std::uint64_t master_seed = 0;   // root seed for the noise tapes
    std::uint64_t v_seed = 0;        // root seed for the key streams

    // Harness/testing hook: when non-empty, level i's key stream is read
    // from v_override[i] instead of being derived from v_seed. Never
    // serialized.
    std::vector<std::vector<double>> v_override;

    int n_levels() const { return static_cast<int>(levels.size()); }
};

inline void validate_bundle(const KeyBundle& bundle) {
    if (bundle.levels.empty()) throw std::invalid_argument("key bundle has no levels");
    for (const auto& lv : bundle.levels) {
        if (lv.b == 0.0) throw std::invalid_argument("level gain b must be non-zero");
        if (lv.b_u == 0.0) throw std::invalid_argument("level gain b_u must be non-zero");
        if (!std::isfinite(lv.a) || !std::isfinite(lv.b) || !std::isfinite(lv.b_u))
            throw std::invalid_argument("level parameters must be finite");
        if (!std::isfinite(lv.sigma_v) || lv.sigma_v < 0.0)
            throw std::invalid_argument("sigma_v must be finite and >= 0");
        validate_spec(lv.w1);
        validate_spec(lv.w2);
    }
    if (!bundle.nonlinear_id.empty() && find_bijection(bundle.nonlinear_id) == nullptr)
        throw std::invalid_argument("nonlinear_id names no registered bijection: " +
                                    bundle.nonlinear_id);
}

/// Fresh bundle with the recommended operating point: a = 0.1,
/// b = b_u = 1, sigma_1 = 0.01, sigma_2 = sigma_v = 1, threshold 0.5.
inline KeyBundle keygen(int n_levels, std::uint64_t seed,
                        const std::string& nonlinear_id = "",
                        const LevelKeys& level_template = LevelKeys{},
                        double v_thd = 0.5) {
    if (n_levels < 1) throw std::invalid_argument("keygen: n_levels must be >= 1");
    KeyBundle bundle;
    bundle.levels.assign(static_cast<std::size_t>(n_levels), level_template);
    bundle.nonlinear_id = nonlinear_id == "none" ? "" : nonlinear_id;
    bundle.logic = LogicLevels{v_thd, v_thd};
    bundle.master_seed = seed;
    bundle.v_seed = derive_seed(seed, 0, StreamKind::key_stream, 0);
    validate_bundle(bundle);
    return bundle;
}

/// ADE of seeded normal draws: bit k is 1 iff the k-th N(mean, std^2)
/// sample is >= threshold. Reproducible for identical arguments.
inline std::vector<std::uint8_t> generate_key_stream(const NoiseSpec& spec,
                                                     std::size_t length,
                                                     std::uint64_t seed,
                                                     double threshold) {
    validate_spec(spec);
    if (length < 1) throw std::invalid_argument("key stream length must be >= 1");
    GaussianSampler gauss(seed);
    std::vector<std::uint8_t> bits(length);
    for (auto& bit : bits)
        bit = (spec.mean + spec.std_dev * gauss.next()) >= threshold ? 1 : 0;
    return bits;
}

/// The level's key stream as used by the cascade: raw N(0, sigma_v^2)
/// samples derived from v_seed, or the override when one is installed.
inline std::vector<double> key_stream_values(const KeyBundle& bundle, int level,
                                             std::size_t length) {
    if (level < 0 || level >= bundle.n_levels())
        throw std::invalid_argument("key stream level out of range");
    if (!bundle.v_override.empty()) {
        const auto& v = bundle.v_override.at(static_cast<std::size_t>(level));
        if (v.size() < length)
            throw std::invalid_argument("key stream override shorter than message");
        return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(length)};
    }
    const double sigma = bundle.levels[static_cast<std::size_t>(level)].sigma_v;
    GaussianSampler gauss(
        derive_seed(bundle.v_seed, static_cast<std::uint64_t>(level) + 1,
                    StreamKind::key_stream, 0));
    std::vector<double> values(length);
    for (auto& v : values) v = sigma * gauss.next();
    return values;
}

/// Bundle view whose key streams are re-nonced for one harness trial.
inline KeyBundle with_trial_key_stream(const KeyBundle& bundle, std::uint64_t trial) {
    KeyBundle out = bundle;
    out.v_seed = derive_seed(bundle.v_seed, 0, StreamKind::key_stream, trial);
    return out;
}

/// One realization of every per-level noise stream.
struct NoiseTape {
    std::vector<std::vector<double>> w1;  // drive noise, one stream per level
    std::vector<std::vector<double>> w2;  // coupling noise, one stream per level

    std::size_t length() const { return w1.empty() ? 0 : w1.front().size(); }
};

inline NoiseTape generate_noise_tape(const KeyBundle& bundle, std::size_t length,
                                     std::uint64_t trial_seed) {
    if (length < 1) throw std::invalid_argument("noise tape length must be >= 1");
    validate_bundle(bundle);
    NoiseTape tape;
    const auto n = static_cast<std::size_t>(bundle.n_levels());
    tape.w1.resize(n);
    tape.w2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& lv = bundle.levels[i];
        GaussianSampler g1(derive_seed(bundle.master_seed, i + 1,
                                       StreamKind::process_noise, trial_seed));
        GaussianSampler g2(derive_seed(bundle.master_seed, i + 1,
                                       StreamKind::observation_noise, trial_seed));
        tape.w1[i].resize(length);
        tape.w2[i].resize(length);
        for (auto& w : tape.w1[i]) w = lv.w1.mean + lv.w1.std_dev * g1.next();
        for (auto& w : tape.w2[i]) w = lv.w2.mean + lv.w2.std_dev * g2.next();
    }
    return tape;
}

// --------------------------------------------------------------------------
// crskeys v1 text format
// --------------------------------------------------------------------------

namespace detail {

inline std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

inline double parse_real(std::string_view text, const std::string& field) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw format_error("crskeys: malformed real for " + field);
    return value;
}

inline std::uint64_t parse_u64(std::string_view text, const std::string& field) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw format_error("crskeys: malformed integer for " + field);
    return value;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace detail

inline std::string serialize_keys(const KeyBundle& bundle) {
    validate_bundle(bundle);
    std::ostringstream out;
    out << "crskeys v1\n";
    out << "n_levels = " << bundle.n_levels() << "\n";
    out << "v_thd = " << detail::format_real(bundle.logic.threshold()) << "\n";
    out << "nonlinear_id = "
        << (bundle.nonlinear_id.empty() ? "none" : bundle.nonlinear_id) << "\n";
    out << "master_seed = " << bundle.master_seed << "\n";
    out << "v_seed = " << bundle.v_seed << "\n";
    for (int i = 0; i < bundle.n_levels(); ++i) {
        const auto& lv = bundle.levels[static_cast<std::size_t>(i)];
        const std::string sfx = "." + std::to_string(i + 1);
        out << "a" << sfx << " = " << detail::format_real(lv.a) << "\n";
        out << "b" << sfx << " = " << detail::format_real(lv.b) << "\n";
        out << "bu" << sfx << " = " << detail::format_real(lv.b_u) << "\n";
        out << "m1" << sfx << " = " << detail::format_real(lv.w1.mean) << "\n";
        out << "s1" << sfx << " = " << detail::format_real(lv.w1.std_dev) << "\n";
        out << "m2" << sfx << " = " << detail::format_real(lv.w2.mean) << "\n";
        out << "s2" << sfx << " = " << detail::format_real(lv.w2.std_dev) << "\n";
        out << "sv" << sfx << " = " << detail::format_real(lv.sigma_v) << "\n";
    }
    if (!bundle.nonlinear_id.empty() && bundle.nonlinear_id != "g_s" &&
        bundle.nonlinear_id != "g_c" && bundle.nonlinear_id != "g_ss") {
        const auto* f = find_bijection(bundle.nonlinear_id);
        for (const auto& p : f->pieces())
            out << "nl_piece = " << detail::format_real(p.lo) << " "
                << detail::format_real(p.hi) << " " << detail::format_real(p.offset)
                << "\n";
    }
    return out.str();
}

inline KeyBundle deserialize_keys(std::string_view text) {
    std::map<std::string, std::string> fields;
    std::vector<BijectionPiece> custom_pieces;

    std::size_t pos = 0;
    bool saw_header = false;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (!saw_header) {
            if (line != "crskeys v1")
                throw format_error("crskeys: bad or missing header line");
            saw_header = true;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw format_error("crskeys: expected 'key = value' line");
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string value{detail::trim(line.substr(eq + 1))};
        if (key == "nl_piece") {
            std::istringstream ps(value);
            std::string lo, hi, off;
            if (!(ps >> lo >> hi >> off))
                throw format_error("crskeys: nl_piece needs 'lo hi offset'");
            custom_pieces.push_back({detail::parse_real(lo, "nl_piece"),
                                     detail::parse_real(hi, "nl_piece"),
                                     detail::parse_real(off, "nl_piece")});
            continue;
        }
        if (!fields.emplace(key, value).second)
            throw format_error("crskeys: duplicate field " + key);
    }
    if (!saw_header) throw format_error("crskeys: bad or missing header line");

    auto take = [&fields](const std::string& key) {
        auto it = fields.find(key);
        if (it == fields.end()) throw format_error("crskeys: missing field " + key);
        std::string value = it->second;
        fields.erase(it);
        return value;
    };

    KeyBundle bundle;
    const auto n_levels = detail::parse_u64(take("n_levels"), "n_levels");
    if (n_levels < 1 || n_levels > 1024)
        throw format_error("crskeys: n_levels out of range");
    const double v_thd = detail::parse_real(take("v_thd"), "v_thd");
    bundle.logic = LogicLevels{v_thd, v_thd};
    std::string nl = take("nonlinear_id");
    bundle.nonlinear_id = nl == "none" ? "" : nl;
    bundle.master_seed = detail::parse_u64(take("master_seed"), "master_seed");
    bundle.v_seed = detail::parse_u64(take("v_seed"), "v_seed");

    for (std::uint64_t i = 1; i <= n_levels; ++i) {
        const std::string sfx = "." + std::to_string(i);
        LevelKeys lv;
        lv.a = detail::parse_real(take("a" + sfx), "a" + sfx);
        lv.b = detail::parse_real(take("b" + sfx), "b" + sfx);
        lv.b_u = detail::parse_real(take("bu" + sfx), "bu" + sfx);
        lv.w1.mean = detail::parse_real(take("m1" + sfx), "m1" + sfx);
        lv.w1.std_dev = detail::parse_real(take("s1" + sfx), "s1" + sfx);
        lv.w2.mean = detail::parse_real(take("m2" + sfx), "m2" + sfx);
        lv.w2.std_dev = detail::parse_real(take("s2" + sfx), "s2" + sfx);
        lv.sigma_v = detail::parse_real(take("sv" + sfx), "sv" + sfx);
        if (lv.b == 0.0) throw format_error("crskeys: b" + sfx + " must be non-zero");
        if (lv.b_u == 0.0) throw format_error("crskeys: bu" + sfx + " must be non-zero");
        bundle.levels.push_back(lv);
    }
    if (!fields.empty())
        throw format_error("crskeys: unknown field " + fields.begin()->first);

    if (!custom_pieces.empty()) {
        if (bundle.nonlinear_id.empty())
            throw format_error("crskeys: nl_piece lines without a nonlinear_id");
        if (find_bijection(bundle.nonlinear_id) != nullptr &&
            (bundle.nonlinear_id == "g_s" || bundle.nonlinear_id == "g_c" ||
             bundle.nonlinear_id == "g_ss"))
            throw format_error("crskeys: nl_piece lines with a built-in nonlinear_id");
        try {
            register_bijection(PiecewiseBijection(bundle.nonlinear_id, custom_pieces));
        } catch (const std::invalid_argument& e) {
            throw format_error(std::string("crskeys: invalid custom bijection: ") + e.what());
        }
    }
    if (!bundle.nonlinear_id.empty() && find_bijection(bundle.nonlinear_id) == nullptr)
        throw format_error("crskeys: nonlinear_id names no known bijection: " +
                           bundle.nonlinear_id);

    try {
        validate_bundle(bundle);
    } catch (const std::invalid_argument& e) {
        throw format_error(std::string("crskeys: ") + e.what());
    }
    return bundle;
}

}  // namespace crs
