// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/image_io.hpp"

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

#include <png.h>

namespace motionwarp {

namespace {

struct WriteState {
    std::vector<std::uint8_t>* out;
};

void png_write_cb(png_structp png, png_bytep data, png_size_t length) {
    auto* state = static_cast<WriteState*>(png_get_io_ptr(png));
    state->out->insert(state->out->end(), data, data + length);
}

void png_flush_cb(png_structp) {}

struct ReadState {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

void png_read_cb(png_structp png, png_bytep data, png_size_t length) {
    auto* state = static_cast<ReadState*>(png_get_io_ptr(png));
    if (state->pos + length > state->bytes.size()) {
        png_error(png, "truncated PNG");
    }
    std::memcpy(data, state->bytes.data() + state->pos, length);
    state->pos += length;
}

void png_error_cb(png_structp png, png_const_charp) { std::longjmp(png_jmpbuf(png), 1); }
void png_warning_cb(png_structp, png_const_charp) {}

std::vector<std::uint8_t> encode_rows(int width, int height, int bit_depth, int color_type,
                                      const std::vector<std::vector<std::uint8_t>>& rows) {
    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_cb, png_warning_cb);
    if (png == nullptr) {
        throw Error(ErrorKind::State, "png_create_write_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::State, "PNG encode failed");
    }
    WriteState state{&out};
    png_set_write_fn(png, &state, png_write_cb, png_flush_cb);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (const auto& row : rows) {
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

struct DecodedRgba {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgba;
};

DecodedRgba decode_rgba(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw ParseError(0, "not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_cb, png_warning_cb);
    if (png == nullptr) {
        throw Error(ErrorKind::State, "png_create_read_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    DecodedRgba result;
    std::vector<png_bytep> row_ptrs;
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError(0, "corrupt PNG");
    }
    ReadState state{bytes, 0};
    png_set_read_fn(png, &state, png_read_cb);
    png_read_info(png, info);

    const auto color_type = png_get_color_type(png, info);
    const auto bit_depth = png_get_bit_depth(png, info);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (!(color_type & PNG_COLOR_MASK_ALPHA)) png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
    png_read_update_info(png, info);

    result.width = static_cast<int>(png_get_image_width(png, info));
    result.height = static_cast<int>(png_get_image_height(png, info));
    result.rgba.resize(static_cast<std::size_t>(result.width) * result.height * 4);
    row_ptrs.resize(static_cast<std::size_t>(result.height));
    for (int y = 0; y < result.height; ++y) {
        row_ptrs[static_cast<std::size_t>(y)] = result.rgba.data() + static_cast<std::size_t>(y) * result.width * 4;
    }
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return result;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const FrameImage& image) {
    std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(image.height));
    const auto stride = static_cast<std::size_t>(image.width) * 3;
    for (int y = 0; y < image.height; ++y) {
        const auto* begin = image.rgb.data() + static_cast<std::size_t>(y) * stride;
        rows[static_cast<std::size_t>(y)].assign(begin, begin + stride);
    }
    return encode_rows(image.width, image.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

std::vector<std::uint8_t> encode_png(const Mask& mask) {
    const auto stride = static_cast<std::size_t>((mask.width() + 7) / 8);
    std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(mask.height()),
                                                std::vector<std::uint8_t>(stride, 0));
    for (int y = 0; y < mask.height(); ++y) {
        auto& row = rows[static_cast<std::size_t>(y)];
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                row[static_cast<std::size_t>(x / 8)] |= static_cast<std::uint8_t>(0x80U >> (x % 8));
            }
        }
    }
    return encode_rows(mask.width(), mask.height(), 1, PNG_COLOR_TYPE_GRAY, rows);
}

FrameImage decode_png_image(std::span<const std::uint8_t> bytes) {
    const auto rgba = decode_rgba(bytes);
    FrameImage image(rgba.width, rgba.height);
    for (std::size_t i = 0, n = static_cast<std::size_t>(rgba.width) * rgba.height; i < n; ++i) {
        image.rgb[i * 3 + 0] = rgba.rgba[i * 4 + 0];
        image.rgb[i * 3 + 1] = rgba.rgba[i * 4 + 1];
        image.rgb[i * 3 + 2] = rgba.rgba[i * 4 + 2];
    }
    return image;
}

Mask decode_png_mask(std::span<const std::uint8_t> bytes, Resolution resolution) {
    const auto rgba = decode_rgba(bytes);
    Mask mask(rgba.width, rgba.height, resolution);
    for (int y = 0; y < rgba.height; ++y) {
        for (int x = 0; x < rgba.width; ++x) {
            const auto* p = rgba.rgba.data() + (static_cast<std::size_t>(y) * rgba.width + x) * 4;
            const int luminance = (299 * p[0] + 587 * p[1] + 114 * p[2]) / 1000;
            mask.set(x, y, luminance >= 128);
        }
    }
    return mask;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::State, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::State, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return {bytes.begin(), bytes.end()};
}

}  // namespace motionwarp
