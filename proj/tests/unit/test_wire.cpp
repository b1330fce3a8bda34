// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "motionwarp/image_io.hpp"
#include "motionwarp/wire.hpp"

using namespace motionwarp;

TEST_CASE("base64 test vectors") {
    auto enc = [](std::string_view s) {
        return wire::base64_encode({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
    };
    CHECK(enc("") == "");
    CHECK(enc("f") == "Zg==");
    CHECK(enc("fo") == "Zm8=");
    CHECK(enc("foo") == "Zm9v");
    CHECK(enc("foobar") == "Zm9vYmFy");
    const auto dec = wire::base64_decode("Zm9vYmE=");
    CHECK(std::string(dec.begin(), dec.end()) == "fooba");
    CHECK_THROWS_AS(wire::base64_decode("Zm9v!"), Error);
}

TEST_CASE("latent blob layout") {
    LatentGrid g(1, 1, 2);
    g.at(0, 0, 0) = 1.0f;
    g.at(0, 0, 1) = -2.5f;
    const auto blob = wire::encode_latent(g);
    const std::string header = R"({"dtype":"float32","shape":[1,1,2]})";
    REQUIRE(blob.size() == 4 + header.size() + 8);
    CHECK(blob[0] == header.size());
    CHECK(blob[1] == 0);
    CHECK(std::string(blob.begin() + 4, blob.begin() + 4 + static_cast<long>(header.size())) == header);
    // 1.0f = 0x3f800000 little endian
    CHECK(blob[4 + header.size() + 3] == 0x3f);
    CHECK(blob[4 + header.size() + 2] == 0x80);
    CHECK(wire::decode_latent(blob) == g);

    auto truncated = blob;
    truncated.pop_back();
    CHECK_THROWS_AS(wire::decode_latent(truncated), Error);
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(wire::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(wire::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(wire::fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(wire::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("png round trips") {
    FrameImage img(5, 3);
    for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = static_cast<std::uint8_t>(i * 17);
    CHECK(decode_png_image(encode_png(img)) == img);

    Mask m(9, 4, Resolution::Image);
    m.set(0, 0, true);
    m.set(8, 3, true);
    m.set(4, 2, true);
    const auto bytes = encode_png(m);
    CHECK(decode_png_mask(bytes, Resolution::Image) == m);
    // 1-bit grayscale: IHDR bit depth byte at offset 24, colour type at 25.
    CHECK(bytes[24] == 1);
    CHECK(bytes[25] == 0);
    CHECK_THROWS_AS(decode_png_image(std::vector<std::uint8_t>{1, 2, 3}), Error);

    const auto path = std::filesystem::temp_directory_path() / "motionwarp_wire_test.png";
    write_file(path, bytes);
    CHECK(read_file(path) == bytes);
    std::filesystem::remove(path);
}
