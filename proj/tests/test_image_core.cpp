#include "doctest.h"

#include "cnsdeblur/error.hpp"
#include "cnsdeblur/image_io.hpp"
#include "cnsdeblur/metrics.hpp"
#include "oracles.hpp"
#include "png_reference.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace cnsdeblur;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "cnsdeblur_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_pgm(const fs::path& p, int w, int h, int maxval, const std::vector<int>& px)
{
    std::ofstream f(p, std::ios::binary);
    f << "P5\n" << w << " " << h << "\n" << maxval << "\n";
    for (int v : px) {
        if (maxval > 255)
            f.put(static_cast<char>(v >> 8));
        f.put(static_cast<char>(v & 0xff));
    }
}

} // namespace

TEST_SUITE("image_core")
{
    TEST_CASE("plane construction and invariants")
    {
        ImagePlane p(4, 3, 0.25);
        CHECK(p.width() == 4);
        CHECK(p.height() == 3);
        CHECK(p.size() == 12);
        CHECK(p.all_finite());
        CHECK_THROWS_AS(ImagePlane(0, 3), InputError);
        CHECK_THROWS_AS(ImagePlane(2, 2, std::vector<double>(3)), InputError);
        p(1, 2) = std::numeric_limits<double>::quiet_NaN();
        CHECK_FALSE(p.all_finite());
    }

    TEST_CASE("plane arithmetic and crop")
    {
        const ImagePlane a = oracle::random_plane(5, 4, 1), b = oracle::random_plane(5, 4, 2);
        const ImagePlane s = a + b, d = a - b, h = hadamard(a, b), m = 2.0 * a;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 5; ++c) {
                CHECK(s(r, c) == a(r, c) + b(r, c));
                CHECK(d(r, c) == a(r, c) - b(r, c));
                CHECK(h(r, c) == a(r, c) * b(r, c));
                CHECK(m(r, c) == 2.0 * a(r, c));
            }
        const ImagePlane c = a.crop(1, 2, 2, 3);
        CHECK(c.width() == 3);
        CHECK(c.height() == 2);
        CHECK(c(1, 2) == a(2, 4));
        CHECK_THROWS_AS(a.crop(3, 0, 2, 2), InputError);
        CHECK_THROWS_AS(a + ImagePlane(4, 4), InputError);
    }

    TEST_CASE("multichannel image and luminance")
    {
        CHECK_THROWS_AS(MultiChannelImage(std::vector<ImagePlane>{ImagePlane(2, 2), ImagePlane(2, 2)}), InputError);
        CHECK_THROWS_AS(MultiChannelImage(std::vector<ImagePlane>{ImagePlane(2, 2), ImagePlane(2, 2), ImagePlane(3, 2)}),
                        InputError);
        const MultiChannelImage rgb({ImagePlane(2, 2, 1.0), ImagePlane(2, 2, 0.5), ImagePlane(2, 2, 0.0)});
        CHECK(luminance(rgb)(1, 1) == doctest::Approx(0.299 + 0.587 * 0.5).epsilon(1e-15));
        const MultiChannelImage grey(ImagePlane(2, 2, 0.3));
        CHECK(luminance(grey) == grey.channel(0));
    }

    TEST_CASE("kernel invariants")
    {
        CHECK_THROWS_AS(Kernel(2, 3), InputError);
        CHECK_THROWS_AS(Kernel(3, 0), InputError);
        const Kernel d = Kernel::delta(3, 5);
        CHECK(d(1, 2) == 1.0);
        CHECK(d.sum() == 1.0);
        CHECK(d.off_center_mass() == 0.0);
        CHECK_THROWS_AS(Kernel(3, 3).normalized(), NumericalError);

        const Kernel k = oracle::random_kernel(5, 3, 7, 0.0, 1.0);
        CHECK(std::abs(k.normalized().sum() - 1.0) <= 1e-12);
        const Kernel f = k.flipped();
        CHECK(f(0, 0) == k(4, 2));
        CHECK(f.flipped() == k);
        CHECK(Kernel::from_plane(k.as_plane()) == k);
    }

    TEST_CASE("mean_abs and mean_sq")
    {
        CHECK(mean_abs(ImagePlane(3, 3)) == 0.0);
        CHECK(mean_abs(ImagePlane(4, 1, {1, -1, 1, -1})) == 1.0);
        CHECK(mean_sq(ImagePlane(3, 3)) == 0.0);
        CHECK(mean_sq(ImagePlane(2, 1, {2, 2})) == 4.0);

        const ImagePlane a = oracle::random_plane(5, 5, 3, -1.0, 1.0);
        double sa = 0.0, sq = 0.0;
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c) {
                sa += std::abs(a(r, c));
                sq += a(r, c) * a(r, c);
            }
        CHECK(std::abs(mean_abs(a) - sa / 25.0) <= 1e-14);
        CHECK(std::abs(mean_sq(a) - sq / 25.0) <= 1e-14);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const ImagePlane b = oracle::random_plane(7, 6, seed, -2.0, 1.0);
            CHECK(mean_abs(b) <= std::sqrt(mean_sq(b)) + 1e-15);
        }
    }

    TEST_CASE("psnr")
    {
        const ImagePlane a = oracle::random_plane(8, 8, 4);
        CHECK(std::isinf(psnr(a, a)));
        CHECK(psnr(a, a) > 0);
        ImagePlane b = a;
        for (double& v : b.data())
            v += 0.1;
        CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));

        const ImagePlane c = oracle::random_plane(8, 8, 5);
        double mse = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            mse += (a.data()[i] - c.data()[i]) * (a.data()[i] - c.data()[i]);
        mse /= 64.0;
        CHECK(std::abs(psnr(a, c) - 10.0 * std::log10(1.0 / mse)) <= 1e-9);
        CHECK_THROWS_AS(psnr(a, ImagePlane(4, 4)), InputError);
    }

    TEST_CASE("ncc")
    {
        const Kernel a = oracle::random_kernel(5, 5, 11);
        CHECK(ncc(a, a) == doctest::Approx(1.0).epsilon(1e-12));
        Kernel neg = a;
        for (double& v : neg.data())
            v = 3.0 - 2.0 * v;
        CHECK(ncc(a, neg) == doctest::Approx(-1.0).epsilon(1e-12));
        // padding about the center
        Kernel big(7, 7);
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c)
                big(r + 1, c + 1) = a(r, c);
        CHECK(ncc(a, big) == doctest::Approx(ncc(big, big)).epsilon(1e-12));
    }

    TEST_CASE("pgm load: full scale and zero")
    {
        const fs::path white = scratch("white.pgm"), black = scratch("black.pgm");
        write_pgm(white, 4, 3, 255, std::vector<int>(12, 255));
        write_pgm(black, 4, 3, 255, std::vector<int>(12, 0));
        const MultiChannelImage w = load_image(white), b = load_image(black);
        REQUIRE(w.channel_count() == 1);
        CHECK(w.width() == 4);
        CHECK(w.height() == 3);
        for (double v : w.channel(0).data())
            CHECK(v == 1.0);
        for (double v : b.channel(0).data())
            CHECK(v == 0.0);

        const fs::path deep = scratch("deep.pgm");
        write_pgm(deep, 2, 1, 65535, {65535, 32768});
        const MultiChannelImage d = load_image(deep);
        CHECK(d.channel(0)(0, 0) == 1.0);
        CHECK(d.channel(0)(0, 1) == 32768.0 / 65535.0);
    }

    TEST_CASE("png load matches reference bytes")
    {
        pngref::Raw raw{3, 3, 3, {}};
        for (int i = 0; i < 27; ++i)
            raw.bytes.push_back(static_cast<std::uint8_t>((i * 37 + 11) % 256));
        const fs::path p = scratch("known.png");
        pngref::write(p.string(), raw);
        const MultiChannelImage img = load_image(p);
        REQUIRE(img.channel_count() == 3);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    CHECK(img.channel(ch)(r, c) == raw.bytes[(r * 3 + c) * 3 + ch] / 255.0);
    }

    TEST_CASE("save quantization")
    {
        const fs::path p = scratch("q.png");
        save_image(MultiChannelImage(ImagePlane(3, 2, {0.5, 1.7, -0.2, 0.0, 1.0, 0.25})), p);
        const pngref::Raw raw = pngref::read(p.string());
        REQUIRE(raw.channels == 1);
        CHECK(raw.bytes == std::vector<std::uint8_t>{128, 255, 0, 0, 255, 64});
    }

    TEST_CASE("save/load round trip")
    {
        for (const char* ext : {".png", ".pgm"}) {
            const ImagePlane a = oracle::random_plane(17, 9, 21);
            const fs::path p = scratch(std::string("rt") + ext);
            save_image(MultiChannelImage(a), p);
            const MultiChannelImage back = load_image(p);
            CHECK(oracle::max_diff(back.channel(0), a) <= 1.0 / 255.0);
            // already quantized data survives unchanged
            save_image(back, p);
            CHECK(load_image(p) == back);
        }
        const MultiChannelImage rgb({oracle::random_plane(5, 4, 1), oracle::random_plane(5, 4, 2),
                                     oracle::random_plane(5, 4, 3)});
        for (const char* ext : {".png", ".ppm"}) {
            const fs::path p = scratch(std::string("rgb") + ext);
            save_image(rgb, p);
            const MultiChannelImage back = load_image(p);
            REQUIRE(back.channel_count() == 3);
            for (int ch = 0; ch < 3; ++ch)
                CHECK(oracle::max_diff(back.channel(ch), rgb.channel(ch)) <= 1.0 / 255.0);
        }
    }

    TEST_CASE("load errors")
    {
        CHECK_THROWS_AS(load_image(scratch("missing.png")), InputError);
        const fs::path bad = scratch("bad.pgm");
        {
            std::ofstream f(bad);
            f << "P2\n2 2\n255\n0 0 0 0\n";
        }
        CHECK_THROWS_AS(load_image(bad), InputError);
        CHECK_THROWS_AS(save_image(MultiChannelImage(ImagePlane(2, 2)), scratch("x.bmp")), InputError);
    }

    TEST_CASE("kernel text round trip")
    {
        const Kernel k = oracle::random_kernel(3, 5, 9);
        std::stringstream ss;
        write_kernel(ss, k);
        std::string header;
        std::getline(ss, header);
        CHECK(header == "3 5");
        ss.seekg(0);
        CHECK(read_kernel(ss) == k);
        std::istringstream truncated("3 3\n1 2 3\n");
        CHECK_THROWS_AS(read_kernel(truncated), InputError);
    }
}
