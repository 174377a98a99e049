#pragma once

// The concealing side of the pipeline. A binary pulse X is pushed through a
// cascade of N first-order difference maps driven by the key streams and the
// noise tape; each level emits one concealed signal and hands a
// noise-perturbed copy of its input to the next level. Level N+1 emits the
// final copy itself. Optionally every emitted signal is passed through the
// bundle's secret bijection (extended to all reals), which the restorer
// undoes exactly.
//
// Level i emits, for k = 0..n-1,
//     U_k = (X_{k+1} - a * X_k - b * v_k) / b_u + W1_k
// and at the boundary k = n the cascade holds the last sample
// (X_{n+1} := X_n), so every concealed signal has the full length n+1.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "crs/bitcodec.hpp"
#include "crs/errors.hpp"
#include "crs/keys.hpp"
#include "crs/nonlinear.hpp"

namespace crs {

/// The N+1 concealed signals standing in for one original signal.
struct ConcealedBundle {
    std::vector<Signal> u;
    int n_levels = 0;             // N; u has N+1 entries
    bool nonlinearized = false;
    std::string nonlinear_id;     // set when nonlinearized

    std::size_t length() const { return u.empty() ? 0 : u.front().size(); }
};

namespace detail {

inline void check_conceal_inputs(const Signal& pulse, const KeyBundle& bundle,
                                 const NoiseTape& tape) {
    validate_bundle(bundle);
    if (pulse.size() < 2) throw std::invalid_argument("conceal: pulse needs >= 2 samples");
    for (double s : pulse)
        if (!std::isfinite(s)) throw std::invalid_argument("conceal: non-finite pulse sample");
    const auto n = static_cast<std::size_t>(bundle.n_levels());
    if (tape.w1.size() != n || tape.w2.size() != n)
        throw std::invalid_argument("conceal: tape level count differs from key bundle");
    for (std::size_t i = 0; i < n; ++i)
        if (tape.w1[i].size() != pulse.size() || tape.w2[i].size() != pulse.size())
            throw std::invalid_argument("conceal: tape length differs from pulse length");
}

inline ConcealedBundle run_cascade(const Signal& pulse, const KeyBundle& bundle,
                                   const NoiseTape& tape, const PiecewiseBijection* nl) {
    check_conceal_inputs(pulse, bundle, tape);
    const std::size_t len = pulse.size();
    const std::size_t n_levels = static_cast<std::size_t>(bundle.n_levels());

    ConcealedBundle out;
    out.n_levels = bundle.n_levels();
    out.nonlinearized = nl != nullptr;
    out.nonlinear_id = nl ? nl->id() : "";
    out.u.resize(n_levels + 1);

    Signal x = pulse;
    for (std::size_t i = 0; i < n_levels; ++i) {
        const auto& lv = bundle.levels[i];
        const auto v = key_stream_values(bundle, static_cast<int>(i), len);
        Signal& u = out.u[i];
        u.resize(len);
        for (std::size_t k = 0; k < len; ++k) {
            const double x_next = (k + 1 < len) ? x[k + 1] : x[k];
            u[k] = (x_next - lv.a * x[k] - lv.b * v[k]) / lv.b_u + tape.w1[i][k];
            if (nl) u[k] = apply_extended(*nl, u[k]);
            x[k] += tape.w2[i][k];  // feed the next level after emitting u_k
        }
    }
    Signal& top = out.u[n_levels];
    top.resize(len);
    for (std::size_t k = 0; k < len; ++k)
        top[k] = nl ? apply_extended(*nl, x[k]) : x[k];
    return out;
}

}  // namespace detail

inline ConcealedBundle conceal_linear(const Signal& pulse, const KeyBundle& bundle,
                                      const NoiseTape& tape) {
    return detail::run_cascade(pulse, bundle, tape, nullptr);
}

inline ConcealedBundle conceal_nonlinear(const Signal& pulse, const KeyBundle& bundle,
                                         const NoiseTape& tape) {
    if (bundle.nonlinear_id.empty())
        throw std::invalid_argument("conceal_nonlinear: key bundle has no nonlinear_id");
    const auto* nl = find_bijection(bundle.nonlinear_id);
    if (!nl)
        throw std::invalid_argument("conceal_nonlinear: unregistered bijection " +
                                    bundle.nonlinear_id);
    return detail::run_cascade(pulse, bundle, tape, nl);
}

/// Conceal with the mode the bundle declares.
inline ConcealedBundle conceal(const Signal& pulse, const KeyBundle& bundle,
                               const NoiseTape& tape) {
    return bundle.nonlinear_id.empty() ? conceal_linear(pulse, bundle, tape)
                                       : conceal_nonlinear(pulse, bundle, tape);
}

// --------------------------------------------------------------------------
// crsdata v1 text format
// --------------------------------------------------------------------------

inline std::string write_concealed(const ConcealedBundle& data) {
    if (data.u.size() != static_cast<std::size_t>(data.n_levels) + 1 || data.u.empty())
        throw std::invalid_argument("write_concealed: inconsistent bundle");
    std::ostringstream out;
    out << "crsdata v1 N=" << data.n_levels << " nl="
        << (data.nonlinearized ? data.nonlinear_id : std::string("none"))
        << " len=" << data.length() << "\n";
    char buf[64];
    for (std::size_t i = 0; i < data.u.size(); ++i) {
        if (i > 0) out << "\n";
        if (data.u[i].size() != data.length())
            throw std::invalid_argument("write_concealed: ragged bundle");
        for (double s : data.u[i]) {
            std::snprintf(buf, sizeof(buf), "%.17g", s);
            out << buf << "\n";
        }
    }
    return out.str();
}

inline ConcealedBundle read_concealed(std::string_view text) {
    const std::size_t eol = text.find('\n');
    if (eol == std::string_view::npos) throw format_error("crsdata: missing header line");
    std::istringstream header{std::string(text.substr(0, eol))};
    std::string magic, version, n_tok, nl_tok, len_tok;
    header >> magic >> version >> n_tok >> nl_tok >> len_tok;
    if (magic != "crsdata" || version != "v1" || n_tok.rfind("N=", 0) != 0 ||
        nl_tok.rfind("nl=", 0) != 0 || len_tok.rfind("len=", 0) != 0)
        throw format_error("crsdata: bad header line");

    ConcealedBundle data;
    data.n_levels = static_cast<int>(detail::parse_u64(n_tok.substr(2), "N"));
    if (data.n_levels < 1 || data.n_levels > 1024)
        throw format_error("crsdata: N out of range");
    const std::string nl = nl_tok.substr(3);
    data.nonlinearized = nl != "none";
    data.nonlinear_id = data.nonlinearized ? nl : "";
    const auto len = detail::parse_u64(len_tok.substr(4), "len");
    if (len < 2) throw format_error("crsdata: len out of range");

    std::vector<Signal> blocks(1);
    std::size_t pos = eol + 1;
    while (pos <= text.size()) {
        const std::size_t e = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, e == std::string_view::npos ? text.size() - pos : e - pos);
        pos = e == std::string_view::npos ? text.size() + 1 : e + 1;
        line = detail::trim(line);
        if (line.empty()) {
            if (!blocks.back().empty()) blocks.emplace_back();  // blank line separates blocks
            continue;
        }
        blocks.back().push_back(detail::parse_real(line, "sample"));
    }
    if (blocks.back().empty()) blocks.pop_back();
    if (blocks.size() != static_cast<std::size_t>(data.n_levels) + 1)
        throw format_error("crsdata: block count differs from header N");
    for (const auto& sig : blocks)
        if (sig.size() != len) throw format_error("crsdata: block length differs from header");
    data.u = std::move(blocks);
    return data;
}

}  // namespace crs
