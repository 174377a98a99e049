#pragma once

// Registry of bijective piecewise-shift maps on [0,1] and their extension to
// the whole real line. Every piece has slope one, so a map is fully
// described by its breakpoints and per-piece offsets, and its inverse is
// again a map of the same family. Pieces are half-open [lo, hi); the piece
// ending at 1 also covers the point 1 itself.
//
// Concealed samples routinely leave [0,1], so the pipeline applies these
// maps through apply_extended, which acts on the fractional part and keeps
// the integer part: extended(x) = floor(x) + f(x - floor(x)). That is the
// unique extension that preserves the shift structure per unit cell and it
// is bijective on all of R.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace crs {

struct BijectionPiece {
    double lo = 0.0;
    double hi = 1.0;
    double offset = 0.0;

    bool operator==(const BijectionPiece&) const = default;
};

class PiecewiseBijection {
  public:
    PiecewiseBijection() = default;

    PiecewiseBijection(std::string id, std::vector<BijectionPiece> pieces)
        : id_(std::move(id)), pieces_(std::move(pieces)) {
        std::sort(pieces_.begin(), pieces_.end(),
                  [](const BijectionPiece& a, const BijectionPiece& b) { return a.lo < b.lo; });
        validate();
    }

    const std::string& id() const { return id_; }
    const std::vector<BijectionPiece>& pieces() const { return pieces_; }

    /// Evaluate on [0,1]. The point 1 belongs to the last piece.
    double operator()(double x) const {
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("bijection argument outside [0,1]");
        return x + piece_for(x).offset;
    }

    PiecewiseBijection inverse() const {
        std::vector<BijectionPiece> inv;
        inv.reserve(pieces_.size());
        for (const auto& p : pieces_)
            inv.push_back({p.lo + p.offset, p.hi + p.offset, -p.offset});
        return PiecewiseBijection(id_.empty() ? "" : id_ + "_inv", std::move(inv));
    }

  private:
    const BijectionPiece& piece_for(double x) const {
        if (x == 1.0) return pieces_.back();
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                                   [](double v, const BijectionPiece& p) { return v < p.lo; });
        return *(it - 1);
    }

    void validate() const {
        if (pieces_.empty()) throw std::invalid_argument("bijection has no pieces");
        if (pieces_.front().lo != 0.0)
            throw std::invalid_argument("bijection pieces must start at 0");
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            if (!(pieces_[i].lo < pieces_[i].hi))
                throw std::invalid_argument("bijection piece is empty or reversed");
            if (i + 1 < pieces_.size() && pieces_[i].hi != pieces_[i + 1].lo)
                throw std::invalid_argument("bijection pieces leave a gap or overlap");
        }
        if (pieces_.back().hi != 1.0)
            throw std::invalid_argument("bijection pieces must end at 1");

        // The images of the pieces must tile [0,1] as well, otherwise the
        // map is not invertible.
        std::vector<BijectionPiece> image;
        image.reserve(pieces_.size());
        for (const auto& p : pieces_)
            image.push_back({p.lo + p.offset, p.hi + p.offset, 0.0});
        std::sort(image.begin(), image.end(),
                  [](const BijectionPiece& a, const BijectionPiece& b) { return a.lo < b.lo; });
        if (image.front().lo != 0.0 || image.back().hi != 1.0)
            throw std::invalid_argument("bijection image does not cover [0,1]");
        for (std::size_t i = 0; i + 1 < image.size(); ++i)
            if (image[i].hi != image[i + 1].lo)
                throw std::invalid_argument("bijection image has a gap or overlap");
    }

    std::string id_;
    std::vector<BijectionPiece> pieces_;
};

/// Extension to all reals: acts on the fractional part, keeps the integer
/// part. Restricts to f on [0,1) and is globally bijective.
inline double apply_extended(const PiecewiseBijection& f, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("apply_extended: non-finite input");
    double base = std::floor(x);
    double frac = x - base;
    if (frac >= 1.0) {  // rounding can push x - floor(x) up to 1.0
        base += 1.0;
        frac = 0.0;
    }
    return base + f(frac);
}

/// Four-piece quarter-shift map.
inline const PiecewiseBijection& g_s() {
    static const PiecewiseBijection f("g_s", {{0.0, 0.25, 0.75},
                                              {0.25, 0.5, 0.25},
                                              {0.5, 0.75, -0.25},
                                              {0.75, 1.0, -0.75}});
    return f;
}

/// Eight-piece map with mixed shifts.
inline const PiecewiseBijection& g_c() {
    static const PiecewiseBijection f("g_c", {{0.0, 0.125, 0.5},
                                              {0.125, 0.25, 0.75},
                                              {0.25, 0.375, -0.125},
                                              {0.375, 0.5, 0.0},
                                              {0.5, 0.625, -0.5},
                                              {0.625, 0.75, 0.125},
                                              {0.75, 0.875, -0.5},
                                              {0.875, 1.0, -0.25}});
    return f;
}

/// Half-swap map; its own inverse.
inline const PiecewiseBijection& g_ss() {
    static const PiecewiseBijection f("g_ss", {{0.0, 0.5, 0.5}, {0.5, 1.0, -0.5}});
    return f;
}

namespace detail {
inline std::map<std::string, PiecewiseBijection>& bijection_registry() {
    static std::map<std::string, PiecewiseBijection> registry = {
        {"g_s", g_s()}, {"g_c", g_c()}, {"g_ss", g_ss()}};
    return registry;
}
}  // namespace detail

/// Register a custom bijection; validation happens in the constructor, so
/// anything that reaches the registry is invertible. Returns the id.
inline const std::string& register_bijection(const PiecewiseBijection& f) {
    if (f.id().empty()) throw std::invalid_argument("bijection id must be non-empty");
    auto [it, _] = detail::bijection_registry().insert_or_assign(f.id(), f);
    return it->first;
}

inline const PiecewiseBijection* find_bijection(const std::string& id) {
    auto& reg = detail::bijection_registry();
    auto it = reg.find(id);
    return it == reg.end() ? nullptr : &it->second;
}

}  // namespace crs
