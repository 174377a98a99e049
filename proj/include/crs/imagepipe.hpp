#pragma once

// 8-bit grayscale images as bit words and back, plus binary PGM (P5,
// maxval 255) reading and writing. A pixel contributes 8 bits,
// most-significant bit first, pixels in row-major order; bit 0 of the word
// is the ancilla and is fixed to 0.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crs/bitcodec.hpp"
#include "crs/errors.hpp"

namespace crs {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, one byte per pixel

    bool operator==(const GrayImage&) const = default;
};

inline void validate_image(const GrayImage& img) {
    if (img.width < 1 || img.height < 1)
        throw std::invalid_argument("image dimensions must be positive");
    if (img.pixels.size() !=
        static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
        throw std::invalid_argument("image pixel count differs from dimensions");
}

inline BitWord image_to_word(const GrayImage& img) {
    validate_image(img);
    BitWord word;
    word.bits.reserve(img.pixels.size() * 8 + 1);
    word.bits.push_back(0);  // ancilla
    for (std::uint8_t px : img.pixels)
        for (int bit = 7; bit >= 0; --bit)
            word.bits.push_back(static_cast<std::uint8_t>((px >> bit) & 1));
    return word;
}

inline GrayImage word_to_image(const BitWord& word, int width, int height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("image dimensions must be positive");
    const std::size_t pixel_count =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (word.size() != pixel_count * 8 + 1)
        throw std::invalid_argument("word length does not fit 8 bits per pixel plus ancilla");
    GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(pixel_count);
    for (std::size_t p = 0; p < pixel_count; ++p) {
        std::uint8_t px = 0;
        for (int bit = 0; bit < 8; ++bit)
            px = static_cast<std::uint8_t>((px << 1) | (word.bits[1 + p * 8 + bit] & 1));
        img.pixels[p] = px;
    }
    return img;
}

namespace detail {

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
inline unsigned pgm_token(std::string_view bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        const char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9')
        throw format_error("pgm: expected a decimal token");
    unsigned value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
        value = value * 10 + static_cast<unsigned>(bytes[pos] - '0');
        if (value > 1000000000u) throw format_error("pgm: token out of range");
        ++pos;
    }
    return value;
}

}  // namespace detail

inline GrayImage read_pgm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw format_error("pgm: not a binary PGM (P5) file");
    std::size_t pos = 2;
    GrayImage img;
    img.width = static_cast<int>(detail::pgm_token(bytes, pos));
    img.height = static_cast<int>(detail::pgm_token(bytes, pos));
    const unsigned maxval = detail::pgm_token(bytes, pos);
    if (maxval != 255) throw format_error("pgm: only maxval 255 is supported");
    if (pos >= bytes.size()) throw format_error("pgm: truncated header");
    ++pos;  // single whitespace byte after maxval
    if (img.width < 1 || img.height < 1) throw format_error("pgm: bad dimensions");
    const std::size_t count =
        static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    if (bytes.size() - pos < count) throw format_error("pgm: truncated pixel data");
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                      bytes.begin() + static_cast<std::ptrdiff_t>(pos + count));
    return img;
}

inline std::string write_pgm(const GrayImage& img) {
    validate_image(img);
    std::string out = "P5\n";
    out += std::to_string(img.width);
    out += ' ';
    out += std::to_string(img.height);
    out += "\n255\n";
    out.append(img.pixels.begin(), img.pixels.end());
    return out;
}

}  // namespace crs
