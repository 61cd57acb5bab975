#include "cnsdeblur/fixtures.hpp"
#include "cnsdeblur/conv_ops.hpp"
#include "cnsdeblur/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

namespace cnsdeblur {

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        parts.push_back(item);
    return parts;
}

double number(const std::string& s, const std::string& context)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size())
            return v;
    } catch (const std::exception&) {
    }
    throw InputError("bad number '" + s + "' in '" + context + "'");
}

// Length of [a, b] inside the unit cell centered on c.
double overlap(double a, double b, double c)
{
    return std::max(0.0, std::min(b, c + 0.5) - std::max(a, c - 0.5));
}

void normalize_range(ImagePlane& img)
{
    const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
    const double a = *lo, span = *hi - *lo;
    for (double& v : img.data())
        v = span > 0.0 ? (v - a) / span : 0.5;
}

} // namespace

PsfSpec PsfSpec::parse(const std::string& text)
{
    const auto parts = split(text, ':');
    if (parts.size() == 2 && parts[0] == "gaussian")
        return gaussian(number(parts[1], text));
    if (parts.size() == 2 && parts[0] == "motion_h")
        return motion_h(number(parts[1], text));
    if (parts.size() == 3 && parts[0] == "motion_diag")
        return motion_diag(number(parts[1], text), number(parts[2], text));
    throw InputError("bad PSF spec '" + text + "' (gaussian:S, motion_h:LEN or motion_diag:LEN:ANGLE)");
}

NoiseSpec NoiseSpec::parse(const std::string& text)
{
    if (text == "none")
        return {};
    const auto parts = split(text, ':');
    if (parts.size() == 2 && parts[0] == "gaussian")
        return {Kind::Gaussian, number(parts[1], text)};
    if (parts.size() == 2 && parts[0] == "impulsive")
        return {Kind::Impulsive, number(parts[1], text)};
    throw InputError("bad noise spec '" + text + "' (none, gaussian:SIGMA or impulsive:FRACTION)");
}

Kernel make_psf(const PsfSpec& spec, int l, int m)
{
    Kernel k(l, m);
    const int cr = k.center_row(), cc = k.center_col();
    switch (spec.kind) {
    case PsfSpec::Kind::Gaussian:
        if (!(spec.sigma > 0.0))
            throw InputError("Gaussian sigma must be positive");
        for (int r = 0; r < l; ++r)
            for (int c = 0; c < m; ++c) {
                const double dr = r - cr, dc = c - cc;
                k(r, c) = std::exp(-(dr * dr + dc * dc) / (2.0 * spec.sigma * spec.sigma));
            }
        break;
    case PsfSpec::Kind::MotionH:
        if (!(spec.length > 0.0) || spec.length > m)
            throw InputError("motion length must be in (0, M]");
        for (int c = 0; c < m; ++c)
            k(cr, c) = overlap(-0.5 * spec.length, 0.5 * spec.length, c - cc);
        break;
    case PsfSpec::Kind::MotionDiag: {
        if (!(spec.length > 0.0))
            throw InputError("motion length must be positive");
        const double a = spec.angle_deg * std::numbers::pi / 180.0;
        const int samples = std::max(2, static_cast<int>(std::ceil(spec.length * 64.0)));
        for (int s = 0; s < samples; ++s) {
            const double t = spec.length * ((s + 0.5) / samples - 0.5);
            const double y = cr - t * std::sin(a);
            const double x = cc + t * std::cos(a);
            const int r0 = static_cast<int>(std::floor(y)), c0 = static_cast<int>(std::floor(x));
            const double fy = y - r0, fx = x - c0;
            const std::array<std::array<double, 3>, 4> taps{{{0, 0, (1 - fy) * (1 - fx)},
                                                             {0, 1, (1 - fy) * fx},
                                                             {1, 0, fy * (1 - fx)},
                                                             {1, 1, fy * fx}}};
            for (const auto& tap : taps) {
                const int r = r0 + static_cast<int>(tap[0]), c = c0 + static_cast<int>(tap[1]);
                if (r < 0 || r >= l || c < 0 || c >= m)
                    throw InputError("motion PSF does not fit the kernel support");
                k(r, c) += tap[2];
            }
        }
        break;
    }
    }
    return k.normalized();
}

SyntheticFixture make_fixture(const MultiChannelImage& clean, const PsfSpec& psf, int l, int m,
                              const NoiseSpec& noise, std::uint64_t seed)
{
    SyntheticFixture f;
    f.clean = clean;
    f.true_psf = make_psf(psf, l, m);
    f.noise = noise;
    f.seed = seed;
    std::mt19937_64 rng(seed);
    std::vector<ImagePlane> planes;
    for (const ImagePlane& c : clean.channels()) {
        ImagePlane b = conv_same(c, f.true_psf, BoundaryMode::NeumannReplicate);
        if (noise.kind == NoiseSpec::Kind::Gaussian) {
            std::normal_distribution<double> n(0.0, noise.level);
            for (double& v : b.data())
                v += n(rng);
        } else if (noise.kind == NoiseSpec::Kind::Impulsive) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (double& v : b.data())
                if (u(rng) < noise.level)
                    v = u(rng) < 0.5 ? 0.0 : 1.0;
        }
        planes.push_back(std::move(b));
    }
    f.blurred = MultiChannelImage(std::move(planes));
    return f;
}

ImagePlane make_texture(const std::string& kind, int size, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi - 1)(rng); };
    const double scale = (size / 256.0) * (size / 256.0);
    ImagePlane img(size, size, 0.5);

    if (kind == "mosaic") {
        const int count = static_cast<int>(200 * scale);
        for (int n = 0; n < count; ++n) {
            const int r0 = pick(0, size), c0 = pick(0, size);
            const int h = pick(5, 60), w = pick(5, 60);
            const double v = unit(rng);
            for (int r = r0; r < std::min(size, r0 + h); ++r)
                for (int c = c0; c < std::min(size, c0 + w); ++c)
                    img(r, c) = v;
        }
    } else if (kind == "disks") {
        const int count = static_cast<int>(300 * scale);
        for (int n = 0; n < count; ++n) {
            const int cr = pick(0, size), cc = pick(0, size), rad = pick(3, 25);
            const double v = unit(rng);
            for (int r = std::max(0, cr - rad); r < std::min(size, cr + rad + 1); ++r)
                for (int c = std::max(0, cc - rad); c < std::min(size, cc + rad + 1); ++c)
                    if ((r - cr) * (r - cr) + (c - cc) * (c - cc) < rad * rad)
                        img(r, c) = v;
        }
    } else if (kind == "shards") {
        const int count = static_cast<int>(300 * scale);
        for (int n = 0; n < count; ++n) {
            const double cx = unit(rng) * size, cy = unit(rng) * size;
            const double rad = 5.0 + 35.0 * unit(rng);
            const double a = 2.0 * std::numbers::pi * unit(rng);
            std::array<double, 3> px{}, py{};
            for (int v = 0; v < 3; ++v) {
                px[v] = cx + rad * std::cos(a + v * 2.0 * std::numbers::pi / 3.0);
                py[v] = cy + rad * std::sin(a + v * 2.0 * std::numbers::pi / 3.0);
            }
            const double val = unit(rng);
            auto side = [&](int i, int j, double x, double y) {
                return (px[j] - px[i]) * (y - py[i]) - (py[j] - py[i]) * (x - px[i]);
            };
            const int r0 = std::max(0, static_cast<int>(cy - rad) - 1), r1 = std::min(size, static_cast<int>(cy + rad) + 2);
            const int c0 = std::max(0, static_cast<int>(cx - rad) - 1), c1 = std::min(size, static_cast<int>(cx + rad) + 2);
            for (int r = r0; r < r1; ++r)
                for (int c = c0; c < c1; ++c) {
                    const double s1 = side(0, 1, c, r), s2 = side(1, 2, c, r), s3 = side(2, 0, c, r);
                    if ((s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0))
                        img(r, c) = val;
                }
        }
    } else {
        throw InputError("unknown texture '" + kind + "' (mosaic, disks or shards)");
    }
    normalize_range(img);
    return img;
}

} // namespace cnsdeblur
