#pragma once

// Minimal byte-level PNG writer/reader (8-bit grey or RGB, no interlace) on top of zlib.

#include <zlib.h>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pngref {

struct Raw {
    int width = 0, height = 0, channels = 0;
    std::vector<std::uint8_t> bytes; // row-major, interleaved
};

inline void put32(std::vector<std::uint8_t>& v, std::uint32_t x)
{
    for (int s = 24; s >= 0; s -= 8)
        v.push_back(static_cast<std::uint8_t>(x >> s));
}

inline std::uint32_t get32(const std::uint8_t* p)
{
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | p[3];
}

inline void chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data)
{
    put32(out, static_cast<std::uint32_t>(data.size()));
    std::vector<std::uint8_t> body(type, type + 4);
    body.insert(body.end(), data.begin(), data.end());
    out.insert(out.end(), body.begin(), body.end());
    put32(out, static_cast<std::uint32_t>(crc32(0, body.data(), static_cast<uInt>(body.size()))));
}

inline void write(const std::string& path, const Raw& img)
{
    std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    put32(ihdr, static_cast<std::uint32_t>(img.width));
    put32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.insert(ihdr.end(), {8, static_cast<std::uint8_t>(img.channels == 3 ? 2 : 0), 0, 0, 0});
    chunk(out, "IHDR", ihdr);

    std::vector<std::uint8_t> filtered;
    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    for (int r = 0; r < img.height; ++r) {
        filtered.push_back(0);
        filtered.insert(filtered.end(), img.bytes.begin() + r * stride, img.bytes.begin() + (r + 1) * stride);
    }
    uLongf len = compressBound(static_cast<uLong>(filtered.size()));
    std::vector<std::uint8_t> z(len);
    if (compress(z.data(), &len, filtered.data(), static_cast<uLong>(filtered.size())) != Z_OK)
        throw std::runtime_error("compress failed");
    z.resize(len);
    chunk(out, "IDAT", z);
    chunk(out, "IEND", {});
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

inline std::uint8_t paeth(int a, int b, int c)
{
    const int p = a + b - c, pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc)
        return static_cast<std::uint8_t>(a);
    return static_cast<std::uint8_t>(pb <= pc ? b : c);
}

inline Raw read(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::vector<std::uint8_t> d((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (d.size() < 8)
        throw std::runtime_error("short file");
    Raw img;
    int depth = 0, color = 0;
    std::vector<std::uint8_t> z;
    for (std::size_t pos = 8; pos + 12 <= d.size();) {
        const std::uint32_t n = get32(&d[pos]);
        const std::string type(reinterpret_cast<const char*>(&d[pos + 4]), 4);
        const std::uint8_t* body = &d[pos + 8];
        if (type == "IHDR") {
            img.width = static_cast<int>(get32(body));
            img.height = static_cast<int>(get32(body + 4));
            depth = body[8];
            color = body[9];
        } else if (type == "IDAT") {
            z.insert(z.end(), body, body + n);
        }
        pos += 12 + n;
    }
    if (depth != 8 || (color != 0 && color != 2))
        throw std::runtime_error("unsupported reference format");
    img.channels = color == 2 ? 3 : 1;
    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    std::vector<std::uint8_t> raw((stride + 1) * img.height);
    uLongf len = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &len, z.data(), static_cast<uLong>(z.size())) != Z_OK || len != raw.size())
        throw std::runtime_error("inflate failed");
    img.bytes.assign(stride * img.height, 0);
    const int bpp = img.channels;
    for (int r = 0; r < img.height; ++r) {
        const std::uint8_t ft = raw[r * (stride + 1)];
        const std::uint8_t* src = &raw[r * (stride + 1) + 1];
        std::uint8_t* cur = &img.bytes[r * stride];
        const std::uint8_t* up = r > 0 ? &img.bytes[(r - 1) * stride] : nullptr;
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
            const int b = up ? up[i] : 0;
            const int c = (up && i >= static_cast<std::size_t>(bpp)) ? up[i - bpp] : 0;
            int v = src[i];
            switch (ft) {
            case 0: break;
            case 1: v += a; break;
            case 2: v += b; break;
            case 3: v += (a + b) / 2; break;
            case 4: v += paeth(a, b, c); break;
            default: throw std::runtime_error("bad filter");
            }
            cur[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

} // namespace pngref
