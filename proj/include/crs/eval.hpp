#pragma once

// Statistical harness: bit-error norms, multi-trial experiments, parameter
// sweeps, attacker scenarios, and CSV emitters for all of them.
//
// Norm conventions (payload positions k = 1..K, ancilla excluded):
//   word max norm    max_k |a_k - r_k|          1 iff any bit flipped
//   word mean norm   (1/K) sum_k |a_k - r_k|    fraction of flipped bits
//   position max     max_tau |a_k - r_k(tau)|   per k, over trials
//   position mean    avg_tau |a_k - r_k(tau)|   per-k flip probability
//
// Trial protocol: trial tau draws a fresh payload word (ancilla fixed to 0),
// a fresh noise tape, and a fresh key-stream nonce, all derived from
// (base_seed, tau), so a report is a pure function of its inputs. Sweeps
// instead draw the whole word uniformly, ancilla included.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crs/bitcodec.hpp"
#include "crs/conceal.hpp"
#include "crs/errors.hpp"
#include "crs/keys.hpp"
#include "crs/restore.hpp"
#include "crs/rng.hpp"

namespace crs {

struct WordNorms {
    int max_norm = 0;
    double mean_norm = 0.0;
};

inline WordNorms word_norms(const std::vector<std::uint8_t>& original,
                            const std::vector<std::uint8_t>& restored) {
    if (original.size() != restored.size())
        throw std::invalid_argument("word_norms: length mismatch");
    if (original.empty()) throw std::invalid_argument("word_norms: empty payload");
    WordNorms out;
    std::size_t flips = 0;
    for (std::size_t k = 0; k < original.size(); ++k)
        flips += original[k] != restored[k];
    out.max_norm = flips > 0 ? 1 : 0;
    out.mean_norm = static_cast<double>(flips) / static_cast<double>(original.size());
    return out;
}

/// Per-position norms across trials. Entries of max_norm are 0/1 (0/0.5/1 in
/// forbidden-zone mode), mean_norm holds the per-position average deviation.
struct PositionNorms {
    std::vector<double> max_norm;
    std::vector<double> mean_norm;
    int trials = 0;
};

inline PositionNorms position_norms(const std::vector<std::uint8_t>& original,
                                    const std::vector<std::vector<std::uint8_t>>& restored) {
    if (restored.empty()) throw std::invalid_argument("position_norms: no trials");
    const std::size_t len = original.size();
    if (len == 0) throw std::invalid_argument("position_norms: empty payload");
    PositionNorms out;
    out.trials = static_cast<int>(restored.size());
    out.max_norm.assign(len, 0.0);
    out.mean_norm.assign(len, 0.0);
    for (const auto& word : restored) {
        if (word.size() != len) throw std::invalid_argument("position_norms: ragged input");
        for (std::size_t k = 0; k < len; ++k) {
            const double diff = original[k] != word[k] ? 1.0 : 0.0;
            out.max_norm[k] = std::max(out.max_norm[k], diff);
            out.mean_norm[k] += diff;
        }
    }
    for (auto& m : out.mean_norm) m /= static_cast<double>(out.trials);
    return out;
}

/// Per-position maximum of |X_k - Xhat_k(tau)| across trials.
struct SignalNorm {
    std::vector<double> max_dev;
};

inline SignalNorm signal_max_norm(const Signal& original, const std::vector<Signal>& restored) {
    if (restored.empty()) throw std::invalid_argument("signal_max_norm: no trials");
    SignalNorm out;
    out.max_dev.assign(original.size(), 0.0);
    for (const auto& sig : restored) {
        if (sig.size() != original.size())
            throw std::invalid_argument("signal_max_norm: ragged input");
        for (std::size_t k = 0; k < original.size(); ++k)
            out.max_dev[k] = std::max(out.max_dev[k], std::abs(original[k] - sig[k]));
    }
    return out;
}

namespace detail {

inline double tri_decode(double sample, const LogicLevels& levels) {
    if (sample >= levels.v_lhr) return 1.0;
    if (sample <= levels.v_llr) return 0.0;
    return 0.5;  // forbidden zone
}

}  // namespace detail

/// Per-position norms with the three-valued decode: a restored sample in the
/// forbidden zone counts as 0.5, so twice the mean norm is the occupancy
/// probability of the zone wherever the max norm is 0.5.
inline PositionNorms fz_occupancy(const std::vector<std::uint8_t>& payload,
                                  const std::vector<Signal>& restored,
                                  const LogicLevels& levels) {
    if (!(0.0 < levels.v_llr && levels.v_llr < levels.v_lhr && levels.v_lhr < 1.0))
        throw std::invalid_argument("fz_occupancy: requires 0 < v_llr < v_lhr < 1");
    if (restored.empty()) throw std::invalid_argument("fz_occupancy: no trials");
    const std::size_t len = payload.size();
    PositionNorms out;
    out.trials = static_cast<int>(restored.size());
    out.max_norm.assign(len, 0.0);
    out.mean_norm.assign(len, 0.0);
    for (const auto& sig : restored) {
        if (sig.size() != len + 1) throw std::invalid_argument("fz_occupancy: ragged input");
        for (std::size_t k = 0; k < len; ++k) {
            const double diff =
                std::abs(static_cast<double>(payload[k]) - detail::tri_decode(sig[k + 1], levels));
            out.max_norm[k] = std::max(out.max_norm[k], diff);
            out.mean_norm[k] += diff;
        }
    }
    for (auto& m : out.mean_norm) m /= static_cast<double>(out.trials);
    return out;
}

// --------------------------------------------------------------------------
// Attacker scenarios
// --------------------------------------------------------------------------

enum class AttackKind { wrong_b, wrong_bu, guessed_v, no_nonlinearity, external_noise };

struct AttackScenario {
    AttackKind kind = AttackKind::wrong_b;
    double eve_b = 0.0;      // wrong_b: the attacker's key-stream gain
    double eve_bu = 0.0;     // wrong_bu: the attacker's data gain
    double sigma_eve = 0.0;  // guessed_v: std of the attacker's guessing noise
    double sigma_ext = 0.0;  // external_noise: std of the injected channel noise
};

/// Apply a scenario to one concealed bundle. Returns the (possibly tampered)
/// data and the key view the restorer will run with. Draws are seeded, so
/// the transform is a pure function of its arguments.
inline std::pair<ConcealedBundle, KeyBundle> attack_transform(const AttackScenario& scenario,
                                                              ConcealedBundle data,
                                                              const KeyBundle& honest_keys,
                                                              std::uint64_t seed) {
    KeyBundle view = honest_keys;
    switch (scenario.kind) {
        case AttackKind::wrong_b:
            if (!std::isfinite(scenario.eve_b) || scenario.eve_b == 0.0)
                throw std::invalid_argument("wrong_b: eve_b must be finite and non-zero");
            for (auto& lv : view.levels) lv.b = scenario.eve_b;
            break;
        case AttackKind::wrong_bu:
            if (!std::isfinite(scenario.eve_bu) || scenario.eve_bu == 0.0)
                throw std::invalid_argument("wrong_bu: eve_bu must be finite and non-zero");
            for (auto& lv : view.levels) lv.b_u = scenario.eve_bu;
            break;
        case AttackKind::guessed_v: {
            if (!std::isfinite(scenario.sigma_eve) || scenario.sigma_eve < 0.0)
                throw std::invalid_argument("guessed_v: sigma_eve must be >= 0");
            view.v_override.clear();
            const std::size_t len = data.length();
            for (int i = 0; i < view.n_levels(); ++i) {
                const auto bits = generate_key_stream(
                    NoiseSpec{0.0, scenario.sigma_eve}, len,
                    derive_seed(seed, static_cast<std::uint64_t>(i) + 1, StreamKind::attack, 0),
                    0.5);
                view.v_override.emplace_back(bits.begin(), bits.end());
            }
            break;
        }
        case AttackKind::no_nonlinearity:
            view.nonlinear_id.clear();
            break;
        case AttackKind::external_noise: {
            if (!std::isfinite(scenario.sigma_ext) || scenario.sigma_ext < 0.0)
                throw std::invalid_argument("external_noise: sigma_ext must be >= 0");
            for (std::size_t i = 0; i < data.u.size(); ++i) {
                GaussianSampler gauss(
                    derive_seed(seed, i + 1, StreamKind::attack, 1));
                for (auto& s : data.u[i]) s += scenario.sigma_ext * gauss.next();
            }
            break;
        }
    }
    return {std::move(data), std::move(view)};
}

// --------------------------------------------------------------------------
// Trial harness
// --------------------------------------------------------------------------

struct TrialConfig {
    int trials = 1;
    int word_len = 1;  // payload length K; concealed words carry K+1 bits
    std::uint64_t base_seed = 0;
};

struct TrialReport {
    PositionNorms norms;             // index 0 is payload position k = 1
    std::vector<double> signal_max;  // per-position max |X_k - Xhat_k|, k = 1..K
};

inline TrialReport run_trials(const KeyBundle& bundle,
                              const std::optional<AttackScenario>& attack,
                              const TrialConfig& cfg,
                              const std::optional<LogicLevels>& fz = {}) {
    if (cfg.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    if (cfg.word_len < 1) throw std::invalid_argument("run_trials: word_len must be >= 1");
    validate_bundle(bundle);
    if (fz && !(0.0 < fz->v_llr && fz->v_llr < fz->v_lhr && fz->v_lhr < 1.0))
        throw std::invalid_argument("run_trials: forbidden-zone levels out of range");

    const std::size_t K = static_cast<std::size_t>(cfg.word_len);
    TrialReport report;
    report.norms.trials = cfg.trials;
    report.norms.max_norm.assign(K, 0.0);
    report.norms.mean_norm.assign(K, 0.0);
    report.signal_max.assign(K, 0.0);

    BitWord word;
    word.bits.assign(K + 1, 0);
    for (std::uint64_t tau = 0; tau < static_cast<std::uint64_t>(cfg.trials); ++tau) {
        Xoshiro256pp word_rng(derive_seed(cfg.base_seed, 0, StreamKind::word, tau));
        word.bits[0] = 0;  // ancilla carries no payload and decodes to 0 anyway
        for (std::size_t k = 1; k <= K; ++k)
            word.bits[k] = static_cast<std::uint8_t>(word_rng.next() & 1);

        const Signal pulse = dae(word);
        KeyBundle trial_keys = with_trial_key_stream(
            bundle, derive_seed(cfg.base_seed, 0, StreamKind::key_stream, tau));
        const NoiseTape tape = generate_noise_tape(
            trial_keys, K + 1, derive_seed(cfg.base_seed, 0, StreamKind::process_noise, tau));

        ConcealedBundle data = conceal(pulse, trial_keys, tape);
        KeyBundle view = trial_keys;
        if (attack) {
            auto transformed =
                attack_transform(*attack, std::move(data), trial_keys,
                                 derive_seed(cfg.base_seed, 0, StreamKind::attack, tau));
            data = std::move(transformed.first);
            view = std::move(transformed.second);
        }
        const Restoration rest = restore(data, view);

        for (std::size_t k = 1; k <= K; ++k) {
            double diff;
            if (fz)
                diff = std::abs(static_cast<double>(word.bits[k]) -
                                detail::tri_decode(rest.signal[k], *fz));
            else
                diff = word.bits[k] != rest.word.bits[k] ? 1.0 : 0.0;
            report.norms.max_norm[k - 1] = std::max(report.norms.max_norm[k - 1], diff);
            report.norms.mean_norm[k - 1] += diff;
            report.signal_max[k - 1] =
                std::max(report.signal_max[k - 1], std::abs(pulse[k] - rest.signal[k]));
        }
    }
    for (auto& m : report.norms.mean_norm) m /= static_cast<double>(cfg.trials);
    return report;
}

// --------------------------------------------------------------------------
// Parameter sweeps
// --------------------------------------------------------------------------

enum class SweepParam { a, b, b_u };

struct SweepRow {
    double value = 0.0;
    double max_norm = 0.0;
    double mean_norm = 0.0;
    std::string status = "ok";
};

/// One conceal+restore per grid value on a fresh random word (all K+1 bits
/// uniform, ancilla included). Grid entries that would zero a gain are kept
/// as error rows instead of aborting the sweep.
inline std::vector<SweepRow> sweep(SweepParam param, const std::vector<double>& grid,
                                   const KeyBundle& fixed, int word_len, std::uint64_t seed) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    if (word_len < 1) throw std::invalid_argument("sweep: word_len must be >= 1");
    validate_bundle(fixed);

    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    const std::size_t K = static_cast<std::size_t>(word_len);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double value = grid[j];
        SweepRow row;
        row.value = value;
        const bool zero_gain =
            (param == SweepParam::b_u || param == SweepParam::b) && value == 0.0;
        if (!std::isfinite(value) || zero_gain) {
            row.max_norm = std::nan("");
            row.mean_norm = std::nan("");
            row.status = "error";
            rows.push_back(std::move(row));
            continue;
        }

        KeyBundle kb = fixed;
        for (auto& lv : kb.levels) {
            if (param == SweepParam::a) lv.a = value;
            if (param == SweepParam::b) lv.b = value;
            if (param == SweepParam::b_u) lv.b_u = value;
        }
        kb = with_trial_key_stream(kb, derive_seed(seed, 0, StreamKind::key_stream, j));

        BitWord word;
        word.bits.resize(K + 1);
        Xoshiro256pp word_rng(derive_seed(seed, 0, StreamKind::word, j));
        for (auto& bit : word.bits) bit = static_cast<std::uint8_t>(word_rng.next() & 1);

        const Signal pulse = dae(word);
        const NoiseTape tape = generate_noise_tape(
            kb, K + 1, derive_seed(seed, 0, StreamKind::process_noise, j));
        const Restoration rest = restore(conceal(pulse, kb, tape), kb);
        const WordNorms norms = word_norms(strip_ancilla(word), strip_ancilla(rest.word));
        row.max_norm = norms.max_norm;
        row.mean_norm = norms.mean_norm;
        rows.push_back(std::move(row));
    }
    return rows;
}

// --------------------------------------------------------------------------
// CSV emitters
// --------------------------------------------------------------------------

namespace detail {

inline void append_real(std::string& out, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out += buf;
}

}  // namespace detail

inline std::string position_norms_csv(const PositionNorms& norms) {
    std::string out = "k,max_norm,mean_norm\n";
    for (std::size_t k = 0; k < norms.max_norm.size(); ++k) {
        out += std::to_string(k + 1);
        out += ',';
        detail::append_real(out, norms.max_norm[k]);
        out += ',';
        detail::append_real(out, norms.mean_norm[k]);
        out += '\n';
    }
    return out;
}

inline std::string signal_norms_csv(const std::vector<double>& max_dev) {
    std::string out = "k,max_abs_dev\n";
    for (std::size_t k = 0; k < max_dev.size(); ++k) {
        out += std::to_string(k + 1);
        out += ',';
        detail::append_real(out, max_dev[k]);
        out += '\n';
    }
    return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "param_value,max_norm,mean_norm,status\n";
    for (const auto& row : rows) {
        detail::append_real(out, row.value);
        out += ',';
        detail::append_real(out, row.max_norm);
        out += ',';
        detail::append_real(out, row.mean_norm);
        out += ',';
        out += row.status;
        out += '\n';
    }
    return out;
}

}  // namespace crs
