#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "crs/nonlinear.hpp"

using namespace crs;

namespace {

// Dyadic grid over [0,1): shift-only maps with dyadic offsets are exact in
// floating point on these points.
constexpr int kGridSize = 1 << 14;

double grid_point(int i) { return static_cast<double>(i) / kGridSize; }

}  // namespace

TEST_CASE("g_s piece values") {
    CHECK(g_s()(0.0) == 0.75);
    CHECK(g_s()(0.5) == 0.25);
    CHECK(g_s()(1.0) == 0.25);
    CHECK(g_s().inverse()(g_s()(0.3)) == Catch::Approx(0.3).margin(1e-15));
}

TEST_CASE("g_c piece values") {
    CHECK(g_c()(0.0) == 0.5);
    CHECK(g_c()(0.4) == 0.4);
    CHECK(g_c()(1.0) == 0.75);
}

TEST_CASE("g_ss piece values") {
    CHECK(g_ss()(0.25) == 0.75);
    CHECK(g_ss()(0.75) == 0.25);
    CHECK(g_ss()(0.5) == 0.0);
}

TEST_CASE("g_ss is an involution on the grid") {
    for (int i = 0; i < kGridSize; ++i) {
        const double x = grid_point(i);
        CHECK(g_ss()(g_ss()(x)) == x);
    }
}

TEST_CASE("inverse round trip is exact on the dyadic grid") {
    for (const auto* f : {&g_s(), &g_c(), &g_ss()}) {
        const PiecewiseBijection inv = f->inverse();
        for (int i = 0; i < kGridSize; ++i) {
            const double x = grid_point(i);
            REQUIRE(inv((*f)(x)) == x);
        }
    }
}

TEST_CASE("inverse examples") {
    CHECK(g_s().inverse()(0.75) == 0.0);

    const PiecewiseBijection identity("ident", {{0.0, 1.0, 0.0}});
    const PiecewiseBijection inv = identity.inverse();
    REQUIRE(inv.pieces().size() == 1);
    CHECK(inv.pieces()[0] == BijectionPiece{0.0, 1.0, 0.0});

    // double inverse restores the original pieces
    for (const auto* f : {&g_s(), &g_c(), &g_ss()})
        CHECK(f->inverse().inverse().pieces() == f->pieces());
}

TEST_CASE("image tiling is validated at construction") {
    // two pieces mapped onto the same image interval
    CHECK_THROWS_AS(PiecewiseBijection("bad", {{0.0, 0.5, 0.5}, {0.5, 1.0, 0.0}}),
                    std::invalid_argument);
    // domain not covering [0,1]
    CHECK_THROWS_AS(PiecewiseBijection("bad", {{0.0, 0.5, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseBijection("bad", {{0.1, 1.0, 0.0}}), std::invalid_argument);
    // overlapping domain pieces
    CHECK_THROWS_AS(PiecewiseBijection("bad", {{0.0, 0.6, 0.25}, {0.5, 1.0, -0.5}}),
                    std::invalid_argument);
    // image escaping [0,1]
    CHECK_THROWS_AS(PiecewiseBijection("bad", {{0.0, 0.5, 0.75}, {0.5, 1.0, -0.5}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseBijection("bad", {}), std::invalid_argument);
}

TEST_CASE("registry serves built-ins and registered customs") {
    REQUIRE(find_bijection("g_s") != nullptr);
    REQUIRE(find_bijection("g_c") != nullptr);
    REQUIRE(find_bijection("g_ss") != nullptr);
    CHECK(find_bijection("nope") == nullptr);

    const PiecewiseBijection quarter("quarter_swap",
                                     {{0.0, 0.25, 0.25}, {0.25, 0.5, -0.25},
                                      {0.5, 0.75, 0.25}, {0.75, 1.0, -0.25}});
    register_bijection(quarter);
    const auto* found = find_bijection("quarter_swap");
    REQUIRE(found != nullptr);
    CHECK(found->pieces() == quarter.pieces());
}

TEST_CASE("apply_extended keeps the integer part") {
    CHECK(apply_extended(g_c(), 2.186) == Catch::Approx(2.936).margin(1e-12));
    for (double x : {-3.0, -1.0, 0.0, 2.0, 5.0}) {
        CHECK(apply_extended(g_s(), x) == x + g_s()(0.0));
        CHECK(apply_extended(g_c(), x) == x + g_c()(0.0));
    }
    CHECK_THROWS_AS(apply_extended(g_s(), std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(apply_extended(g_s(), INFINITY), std::invalid_argument);
}

TEST_CASE("extended inverse round trip over [-5,5]") {
    for (const auto* f : {&g_s(), &g_c(), &g_ss()}) {
        const PiecewiseBijection inv = f->inverse();
        for (int i = -5 * 64; i <= 5 * 64; ++i) {
            const double x = static_cast<double>(i) / 64.0;
            REQUIRE(apply_extended(inv, apply_extended(*f, x)) == x);
        }
    }
}

TEST_CASE("apply_extended preserves order within a unit cell") {
    for (const auto* f : {&g_s(), &g_c(), &g_ss()}) {
        for (const auto& piece : f->pieces()) {
            const double lo = piece.lo + 3.0;
            const double hi = piece.hi + 3.0;
            double prev = apply_extended(*f, lo);
            for (int j = 1; j < 16; ++j) {
                const double x = lo + (hi - lo) * j / 16.0;
                const double y = apply_extended(*f, x);
                CHECK(y > prev);
                prev = y;
            }
        }
    }
}
