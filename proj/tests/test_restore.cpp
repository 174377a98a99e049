#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "crs/conceal.hpp"
#include "crs/keys.hpp"
#include "crs/restore.hpp"
#include "crs/rng.hpp"

using namespace crs;

namespace {

KeyBundle quiet_bundle(int n_levels, double a, std::uint64_t seed = 99) {
    LevelKeys lv;
    lv.a = a;
    lv.w1.std_dev = 0.0;
    lv.w2.std_dev = 0.0;
    lv.sigma_v = 0.0;
    return keygen(n_levels, seed, "", lv);
}

BitWord random_word(std::size_t len, std::uint64_t seed) {
    BitWord w;
    w.bits.resize(len);
    Xoshiro256pp rng(seed);
    for (auto& b : w.bits) b = static_cast<std::uint8_t>(rng.next() & 1);
    return w;
}

}  // namespace

TEST_CASE("prediction stage") {
    LevelKeys feedthrough;
    feedthrough.a = 0.0;
    feedthrough.b = 0.0;
    feedthrough.b_u = 1.0;
    KalmanState prev;
    prev.x_post = 0.77;
    prev.p_post = 0.3;
    auto [xp, pp] = kalman_predict(prev, 2.5, 1.0, feedthrough);
    CHECK(xp == 2.5);  // pure observation feed-through
    CHECK(pp == feedthrough.w1.std_dev * feedthrough.w1.std_dev);

    LevelKeys recommended;  // a = 0.1, b = b_u = 1
    KalmanState zero;
    zero.x_post = 0.0;
    zero.p_post = 1.0;
    auto [xp2, pp2] = kalman_predict(zero, 2.186, 1.0, recommended);
    CHECK(xp2 == Catch::Approx(3.186).margin(1e-15));
    CHECK(pp2 == Catch::Approx(0.01 * 1.0 + 0.0001).margin(1e-18));

    LevelKeys noiseless = recommended;
    noiseless.w1.std_dev = 0.0;
    KalmanState settled;
    settled.x_post = 1.0;
    settled.p_post = 0.0;
    CHECK(kalman_predict(settled, 0.5, 0.0, noiseless).second == 0.0);
}

TEST_CASE("filtering stage") {
    LevelKeys keys;  // sigma_2 = 1

    const KalmanState trusted_prediction = kalman_update(0.4, 0.0, 9.9, keys);
    CHECK(trusted_prediction.gain == 0.0);
    CHECK(trusted_prediction.x_post == 0.4);

    LevelKeys exact_obs = keys;
    exact_obs.w2.std_dev = 0.0;
    const KalmanState trusted_observation = kalman_update(0.4, 0.5, 9.9, exact_obs);
    CHECK(trusted_observation.gain == 1.0);
    CHECK(trusted_observation.x_post == 9.9);
    CHECK(trusted_observation.p_post == 0.0);

    const KalmanState balanced = kalman_update(0.3, 1.0, 0.7, keys);  // p_prior = sigma_2^2
    CHECK(balanced.gain == 0.5);
    CHECK(balanced.x_post == Catch::Approx(0.5).margin(1e-15));

    const KalmanState degenerate = kalman_update(0.25, 0.0, 1.0, exact_obs);  // 0/0
    CHECK(degenerate.gain == 0.0);
    CHECK(degenerate.x_post == 0.25);
}

TEST_CASE("gain and variance bounds hold along random recursions") {
    Xoshiro256pp rng(5150);
    for (int rep = 0; rep < 200; ++rep) {
        LevelKeys keys;
        keys.a = 3.0 * rng.next_unit() - 1.5;
        keys.b = 2.0 * rng.next_unit() - 1.0;
        keys.b_u = 0.1 + rng.next_unit();
        keys.w1.std_dev = rng.next_unit() < 0.2 ? 0.0 : rng.next_unit();
        keys.w2.std_dev = rng.next_unit() < 0.2 ? 0.0 : rng.next_unit();
        KalmanState st;
        for (int k = 0; k < 50; ++k) {
            auto [xp, pp] = kalman_predict(st, rng.next_unit(), rng.next_unit(), keys);
            st = kalman_update(xp, pp, rng.next_unit(), keys);
            REQUIRE(st.p_prior >= 0.0);
            REQUIRE(st.gain >= 0.0);
            REQUIRE(st.gain <= 1.0);
            REQUIRE(st.p_post >= 0.0);
            REQUIRE(st.p_post <= st.p_prior);
        }
    }
}

TEST_CASE("hand-traced noise-free filter on a 4-bit word") {
    // word 0110, one level, a = 0.1, all noise off. The trace below follows
    // the prediction/update formulas literally and is the oracle for
    // restore() on the same input.
    const KeyBundle kb = quiet_bundle(1, 0.1);
    const Signal pulse = {0.0, 1.0, 1.0, 0.0};
    const NoiseTape tape = generate_noise_tape(kb, 4, 0);
    const ConcealedBundle data = conceal_linear(pulse, kb, tape);

    const Signal expected_u = {1.0, 1.0 - 0.1, 0.0 - 0.1, 0.0};
    CHECK(data.u[0] == expected_u);
    CHECK(data.u[1] == pulse);

    // k = 1: prior = 0.1*0 + u_0 = 1, prior variance 0.01, gain 1 -> posterior = obs = 1
    // k = 2: prior = 0.1*1 + 0.9 = 1, prior variance 0, gain 0 -> posterior = 1
    // k = 3: prior = 0.1*1 - 0.1 = 0, gain 0 -> posterior = 0
    const LevelKeys& lv = kb.levels[0];
    KalmanState st;
    auto [xp1, pp1] = kalman_predict(st, expected_u[0], 0.0, lv);
    CHECK(xp1 == 1.0);
    CHECK(pp1 == 0.1 * 0.1);
    st = kalman_update(xp1, pp1, pulse[1], lv);
    CHECK(st.gain == 1.0);
    CHECK(st.x_post == 1.0);
    CHECK(st.p_post == 0.0);

    auto [xp2, pp2] = kalman_predict(st, expected_u[1], 0.0, lv);
    CHECK(xp2 == 1.0);
    CHECK(pp2 == 0.0);
    st = kalman_update(xp2, pp2, pulse[2], lv);
    CHECK(st.gain == 0.0);
    CHECK(st.x_post == 1.0);

    auto [xp3, pp3] = kalman_predict(st, expected_u[2], 0.0, lv);
    CHECK(xp3 == 0.0);
    st = kalman_update(xp3, pp3, pulse[3], lv);
    CHECK(st.x_post == 0.0);

    const Restoration rest = restore(data, kb);
    CHECK(rest.signal == Signal{0.0, 1.0, 1.0, 0.0});
    CHECK(rest.word.to_string() == "0110");
}

TEST_CASE("noise-free restoration reproduces the pulse") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        for (int levels : {1, 2, 3}) {
            const KeyBundle kb = quiet_bundle(levels, 0.1, 100 + seed);
            BitWord word = random_word(12, seed);
            const Signal pulse = dae(word);
            const NoiseTape tape = generate_noise_tape(kb, pulse.size(), seed);
            const Restoration rest = restore(conceal_linear(pulse, kb, tape), kb);
            CHECK(rest.signal[0] == 0.0);
            for (std::size_t k = 1; k < pulse.size(); ++k)
                CHECK(rest.signal[k] == Catch::Approx(pulse[k]).margin(1e-9));
        }
    }
}

TEST_CASE("prior variance settles to the fixed point") {
    const LevelKeys lv;  // a = 0.1, b_u = 1, s1 = 0.01, s2 = 1
    const double s2sq = lv.w2.std_dev * lv.w2.std_dev;
    const double c = lv.w1.std_dev * lv.w1.std_dev * lv.b_u * lv.b_u;
    const double asq = lv.a * lv.a;
    // positive root of p = a^2 * p * s2^2 / (p + s2^2) + c
    const double q = s2sq * (1.0 - asq) - c;
    const double fixed_point = (-q + std::sqrt(q * q + 4.0 * c * s2sq)) / 2.0;

    double p_post = 1.0;
    double p_prior = 0.0;
    double prev_prior = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10'000; ++k) {
        p_prior = asq * p_post + c;
        CHECK(p_prior <= prev_prior);  // settles from above, monotonically
        prev_prior = p_prior;
        const double gain = p_prior / (p_prior + s2sq);
        p_post = (1.0 - gain) * p_prior;
    }
    CHECK(std::abs(p_prior - fixed_point) < 1e-10);
}

TEST_CASE("worked 21-bit word restores exactly with matching keys") {
    const BitWord word = BitWord::from_string("101111001000011110111");
    const auto payload = strip_ancilla(word);
    const Signal pulse = dae(word);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (const char* nl : {"", "g_c"}) {
            const KeyBundle kb = keygen(2, 2000 + seed, nl);
            const NoiseTape tape = generate_noise_tape(kb, pulse.size(), seed);
            const Restoration rest = restore(conceal(pulse, kb, tape), kb);
            CHECK(rest.signal[0] == 0.0);
            CHECK(rest.word.bits[0] == 0);  // ancilla always decodes to 0
            CHECK(strip_ancilla(rest.word) == payload);
        }
    }
}

TEST_CASE("nonlinear restoration reduces to the linear one") {
    for (const char* id : {"g_s", "g_c", "g_ss"}) {
        const KeyBundle kb_nl = keygen(2, 404, id);
        KeyBundle kb_lin = kb_nl;
        kb_lin.nonlinear_id.clear();
        const Signal pulse = dae(random_word(30, 77));
        const NoiseTape tape = generate_noise_tape(kb_nl, pulse.size(), 9);
        const Restoration nl = restore(conceal_nonlinear(pulse, kb_nl, tape), kb_nl);
        const Restoration lin = restore(conceal_linear(pulse, kb_lin, tape), kb_lin);
        CHECK(nl.word == lin.word);
        for (std::size_t k = 0; k < pulse.size(); ++k)
            CHECK(nl.signal[k] == Catch::Approx(lin.signal[k]).margin(1e-9));
    }
}

TEST_CASE("level-count mismatch is rejected, missing bijection is not") {
    const KeyBundle kb2 = keygen(2, 1);
    const KeyBundle kb3 = keygen(3, 1);
    const Signal pulse = dae(random_word(10, 1));
    const NoiseTape tape = generate_noise_tape(kb2, pulse.size(), 0);
    const ConcealedBundle data = conceal_linear(pulse, kb2, tape);
    CHECK_THROWS_AS(restore(data, kb3), mismatch_error);

    // restoring nonlinear data with a linear key view is the attacker's
    // path: structurally valid, statistically garbled
    const KeyBundle kb_nl = keygen(2, 1, "g_c");
    const ConcealedBundle nl_data = conceal_nonlinear(pulse, kb_nl, tape);
    KeyBundle blind = kb_nl;
    blind.nonlinear_id.clear();
    CHECK_NOTHROW(restore(nl_data, blind));
}

TEST_CASE("restoration always starts at zero") {
    const KeyBundle kb = keygen(2, 6);
    BitWord word = random_word(16, 2);
    word.bits[0] = 1;
    const Signal pulse = dae(word);
    const NoiseTape tape = generate_noise_tape(kb, pulse.size(), 0);
    const Restoration rest = restore(conceal_linear(pulse, kb, tape), kb);
    CHECK(rest.signal[0] == 0.0);
    CHECK(rest.word.bits[0] == 0);
}
