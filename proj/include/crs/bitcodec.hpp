#pragma once

// Conversions between bit words and logic-level signals: digital-to-analog
// encoding of a word as a unit-step binary pulse, analog-to-digital decoding
// by threshold or by a logic-low/logic-high range pair with a forbidden zone
// in between, and the ancilla-bit convention used by the conceal/restore
// pipeline (index 0 of every word is sacrificial; restorations always start
// at 0).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace crs {

using Signal = std::vector<double>;

/// A word of bits a_0 ... a_K. Index 0 is the ancilla position.
struct BitWord {
    std::vector<std::uint8_t> bits;

    BitWord() = default;
    explicit BitWord(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

    std::size_t size() const { return bits.size(); }
    bool operator==(const BitWord&) const = default;

    static BitWord from_string(const std::string& s) {
        BitWord w;
        w.bits.reserve(s.size());
        for (char c : s) {
            if (c == '0')
                w.bits.push_back(0);
            else if (c == '1')
                w.bits.push_back(1);
            else
                throw std::invalid_argument("bit word: invalid character");
        }
        return w;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) s.push_back(b ? '1' : '0');
        return s;
    }
};

inline void validate_word(const BitWord& word) {
    if (word.size() < 2)
        throw std::invalid_argument("bit word must have at least 2 bits");
    for (auto b : word.bits)
        if (b != 0 && b != 1)
            throw std::invalid_argument("bit word element out of {0,1}");
}

/// Logic-level pair. v_llr is the top of the logic-low range, v_lhr the
/// bottom of the logic-high range. Equal values mean plain threshold mode;
/// the open interval between them is the forbidden zone.
struct LogicLevels {
    double v_llr = 0.5;
    double v_lhr = 0.5;

    bool threshold_mode() const { return v_llr == v_lhr; }
    double threshold() const { return v_lhr; }
};

enum class TriChar : std::uint8_t { zero = 0, one = 1, forbidden = 2 };

/// Encode a bit word as its binary pulse, one sample per bit on unit steps.
inline Signal dae(const BitWord& word) {
    validate_word(word);
    Signal out;
    out.reserve(word.size());
    for (auto b : word.bits) out.push_back(b ? 1.0 : 0.0);
    return out;
}

/// Piecewise-linear continuation of a signal with `resolution` subsamples
/// per unit interval. Endpoints coincide with the integer samples exactly.
/// Rendering/export helper only; the pipeline itself works on integer
/// samples.
inline std::vector<double> dae_continuation(const Signal& sig, int resolution) {
    if (sig.empty()) throw std::invalid_argument("continuation of empty signal");
    if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
    std::vector<double> out;
    out.reserve((sig.size() - 1) * static_cast<std::size_t>(resolution) + 1);
    for (std::size_t i = 0; i + 1 < sig.size(); ++i) {
        out.push_back(sig[i]);
        for (int r = 1; r < resolution; ++r) {
            const double t = static_cast<double>(r) / resolution;
            out.push_back((sig[i + 1] - sig[i]) * t + sig[i]);
        }
    }
    out.push_back(sig.back());
    return out;
}

/// Threshold decode: bit i is 1 iff sample i >= threshold. Requires
/// threshold-mode levels; use ade_trilevel when a forbidden zone is set.
inline BitWord ade(const Signal& sig, const LogicLevels& levels) {
    if (!levels.threshold_mode())
        throw std::invalid_argument("ade: levels define a forbidden zone, use ade_trilevel");
    BitWord w;
    w.bits.reserve(sig.size());
    for (double s : sig) w.bits.push_back(s >= levels.threshold() ? 1 : 0);
    return w;
}

/// Range decode with forbidden zone: 1 at or above v_lhr, 0 at or below
/// v_llr, forbidden marker strictly in between.
inline std::vector<TriChar> ade_trilevel(const Signal& sig, const LogicLevels& levels) {
    if (!(0.0 < levels.v_llr && levels.v_llr < levels.v_lhr && levels.v_lhr < 1.0))
        throw std::invalid_argument("ade_trilevel: requires 0 < v_llr < v_lhr < 1");
    std::vector<TriChar> out;
    out.reserve(sig.size());
    for (double s : sig) {
        if (s >= levels.v_lhr)
            out.push_back(TriChar::one);
        else if (s <= levels.v_llr)
            out.push_back(TriChar::zero);
        else
            out.push_back(TriChar::forbidden);
    }
    return out;
}

/// Drop forbidden-zone markers, keeping the 0/1 characters in order.
inline BitWord collapse_trichars(const std::vector<TriChar>& chars) {
    BitWord w;
    for (TriChar c : chars) {
        if (c == TriChar::forbidden) continue;
        w.bits.push_back(c == TriChar::one ? 1 : 0);
    }
    return w;
}

/// Payload of a word: everything after the ancilla bit.
inline std::vector<std::uint8_t> strip_ancilla(const BitWord& word) {
    if (word.size() < 2)
        throw std::invalid_argument("strip_ancilla: word shorter than 2 bits");
    return {word.bits.begin() + 1, word.bits.end()};
}

}  // namespace crs
