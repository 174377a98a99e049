#pragma once

// The restoring side: a cascade of scalar Kalman filters running from the
// top concealed signal down to the reconstruction of the original pulse.
// The estimate produced at level i+1 serves as the observation sequence for
// level i; the concealed signal of level i drives the prediction. When the
// key bundle names a bijection, every concealed signal is mapped back
// through the inverse first, after which the linear filter applies
// unchanged.
//
// Per level, for k = 1..n:
//   predict:  x_prior = a * x_post[k-1] + b_u * u[k-1] + b * v[k-1]
//             p_prior = a^2 * p_post[k-1] + (s1 * b_u)^2
//   update:   gain    = p_prior / (p_prior + s2^2)     (0 when 0/0)
//             x_post  = x_prior + gain * (obs[k] - x_prior)
//             p_post  = (1 - gain) * p_prior
// with x_post[0] = 0 and p_post[0] = 1 at every level. The restored signal
// always starts at 0; its first bit carries no payload.

#include <cmath>
#include <utility>
#include <vector>

#include "crs/bitcodec.hpp"
#include "crs/conceal.hpp"
#include "crs/errors.hpp"
#include "crs/keys.hpp"
#include "crs/nonlinear.hpp"

namespace crs {

struct KalmanState {
    double x_prior = 0.0;
    double p_prior = 0.0;
    double gain = 0.0;
    double x_post = 0.0;
    double p_post = 1.0;
};

inline std::pair<double, double> kalman_predict(const KalmanState& prev, double u_prev,
                                                double v_prev, const LevelKeys& keys) {
    const double x_prior = keys.a * prev.x_post + keys.b_u * u_prev + keys.b * v_prev;
    const double p_prior =
        keys.a * keys.a * prev.p_post + keys.w1.std_dev * keys.w1.std_dev * keys.b_u * keys.b_u;
    return {x_prior, p_prior};
}

inline KalmanState kalman_update(double x_prior, double p_prior, double observation,
                                 const LevelKeys& keys) {
    const double s2sq = keys.w2.std_dev * keys.w2.std_dev;
    const double denom = p_prior + s2sq;
    const double gain = denom == 0.0 ? 0.0 : p_prior / denom;
    KalmanState st;
    st.x_prior = x_prior;
    st.p_prior = p_prior;
    st.gain = gain;
    st.x_post = x_prior + gain * (observation - x_prior);
    st.p_post = (1.0 - gain) * p_prior;
    return st;
}

struct Restoration {
    Signal signal;  // starts at exactly 0
    BitWord word;   // threshold decode of the signal; bit 0 is sacrificial
};

inline Restoration restore(const ConcealedBundle& data, const KeyBundle& keys) {
    validate_bundle(keys);
    if (data.n_levels != keys.n_levels())
        throw mismatch_error("restore: concealed data has " + std::to_string(data.n_levels) +
                             " levels, key bundle has " + std::to_string(keys.n_levels()));
    if (data.u.size() != static_cast<std::size_t>(data.n_levels) + 1)
        throw std::invalid_argument("restore: inconsistent concealed bundle");
    const std::size_t len = data.length();
    if (len < 2) throw std::invalid_argument("restore: data needs >= 2 samples");
    for (const auto& sig : data.u)
        if (sig.size() != len) throw std::invalid_argument("restore: ragged concealed bundle");

    std::vector<Signal> u = data.u;
    if (!keys.nonlinear_id.empty()) {
        const auto* nl = find_bijection(keys.nonlinear_id);
        if (!nl)
            throw std::invalid_argument("restore: unregistered bijection " + keys.nonlinear_id);
        const PiecewiseBijection inv = nl->inverse();
        for (auto& sig : u)
            for (auto& s : sig) s = apply_extended(inv, s);
    }

    Signal estimate = u.back();
    for (int i = keys.n_levels() - 1; i >= 0; --i) {
        const auto& lv = keys.levels[static_cast<std::size_t>(i)];
        const auto v = key_stream_values(keys, i, len);
        const Signal& ui = u[static_cast<std::size_t>(i)];
        Signal next(len, 0.0);
        KalmanState st;  // x_post = 0, p_post = 1
        for (std::size_t k = 1; k < len; ++k) {
            const auto [x_prior, p_prior] = kalman_predict(st, ui[k - 1], v[k - 1], lv);
            st = kalman_update(x_prior, p_prior, estimate[k], lv);
            next[k] = st.x_post;
        }
        estimate = std::move(next);
    }

    Restoration out;
    estimate[0] = 0.0;
    out.word = ade(estimate, keys.logic);
    out.signal = std::move(estimate);
    return out;
}

}  // namespace crs
