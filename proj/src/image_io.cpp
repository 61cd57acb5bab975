#include "cnsdeblur/image_io.hpp"
#include "cnsdeblur/error.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>

namespace cnsdeblur {

namespace {

std::string lower_extension(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

unsigned char quantize(double v)
{
    if (!(v > 0.0))
        return 0;
    if (v >= 1.0)
        return 255;
    return static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

MultiChannelImage planes_from_samples(const std::vector<unsigned>& samples, int width, int height,
                                      int channels, double scale)
{
    std::vector<ImagePlane> planes(static_cast<std::size_t>(channels), ImagePlane(width, height));
    std::size_t i = 0;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int ch = 0; ch < channels; ++ch)
                planes[static_cast<std::size_t>(ch)](r, c) = samples[i++] / scale;
    return MultiChannelImage(std::move(planes));
}

MultiChannelImage load_png(const std::filesystem::path& path)
{
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp)
        throw InputError("cannot open " + path.string());
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw InputError(path.string() + ": not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw InputError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw InputError("libpng initialisation failed");
    }

    std::vector<unsigned char> buffer;
    std::vector<png_bytep> rows;
    int width = 0, height = 0, channels = 0, depth = 0;
    std::string failure;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError(path.string() + ": corrupt PNG data");
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_GRAY)
        channels = 1;
    else if (color == PNG_COLOR_TYPE_RGB)
        channels = 3;
    else
        failure = "unsupported PNG colour type (need grey or RGB without alpha)";
    if (failure.empty() && depth != 8 && depth != 16)
        failure = "unsupported PNG bit depth " + std::to_string(depth);
    if (failure.empty() && png_get_valid(png, info, PNG_INFO_tRNS))
        failure = "unsupported PNG transparency chunk";
    if (!failure.empty()) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError(path.string() + ": " + failure);
    }
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * static_cast<std::size_t>(height));
    rows.resize(static_cast<std::size_t>(height));
    for (int r = 0; r < height; ++r)
        rows[static_cast<std::size_t>(r)] = buffer.data() + rowbytes * static_cast<std::size_t>(r);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    std::vector<unsigned> samples(count);
    if (depth == 8) {
        for (std::size_t i = 0; i < count; ++i)
            samples[i] = buffer[i];
    } else {
        for (std::size_t i = 0; i < count; ++i)
            samples[i] = (static_cast<unsigned>(buffer[2 * i]) << 8) | buffer[2 * i + 1];
    }
    return planes_from_samples(samples, width, height, channels, depth == 8 ? 255.0 : 65535.0);
}

void save_png(const MultiChannelImage& img, const std::filesystem::path& path)
{
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp)
        throw InputError("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw InputError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw InputError("libpng initialisation failed");
    }
    const int w = img.width(), h = img.height(), nc = img.channel_count();
    std::vector<unsigned char> buffer(static_cast<std::size_t>(w) * h * nc);
    std::size_t i = 0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int ch = 0; ch < nc; ++ch)
                buffer[i++] = quantize(img.channel(ch)(r, c));
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int r = 0; r < h; ++r)
        rows[static_cast<std::size_t>(r)] = buffer.data() + static_cast<std::size_t>(r) * w * nc;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw InputError("failed writing " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 nc == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Reads one header token of a PNM file, skipping comments.
long read_pnm_int(std::istream& is)
{
    char ch = 0;
    while (is.get(ch)) {
        if (ch == '#') {
            std::string skip;
            std::getline(is, skip);
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            break;
        }
    }
    if (!is || !std::isdigit(static_cast<unsigned char>(ch)))
        throw InputError("malformed PNM header");
    long value = ch - '0';
    while (is.get(ch) && std::isdigit(static_cast<unsigned char>(ch)))
        value = value * 10 + (ch - '0');
    // the single whitespace after maxval is consumed here
    return value;
}

MultiChannelImage load_pnm(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw InputError("cannot open " + path.string());
    char magic[2] = {0, 0};
    is.read(magic, 2);
    int channels = 0;
    if (magic[0] == 'P' && magic[1] == '5')
        channels = 1;
    else if (magic[0] == 'P' && magic[1] == '6')
        channels = 3;
    else
        throw InputError(path.string() + ": unsupported PNM type (need P5 or P6)");
    const long width = read_pnm_int(is);
    const long height = read_pnm_int(is);
    const long maxval = read_pnm_int(is);
    if (width < 1 || height < 1)
        throw InputError(path.string() + ": bad PNM dimensions");
    if (maxval < 1 || maxval > 65535)
        throw InputError(path.string() + ": unsupported PNM maxval " + std::to_string(maxval));
    const int bytes = maxval < 256 ? 1 : 2;
    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    std::vector<unsigned char> buffer(count * bytes);
    is.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    if (static_cast<std::size_t>(is.gcount()) != buffer.size())
        throw InputError(path.string() + ": truncated PNM data");
    std::vector<unsigned> samples(count);
    for (std::size_t i = 0; i < count; ++i)
        samples[i] = bytes == 1 ? buffer[i] : (static_cast<unsigned>(buffer[2 * i]) << 8) | buffer[2 * i + 1];
    return planes_from_samples(samples, static_cast<int>(width), static_cast<int>(height), channels,
                               static_cast<double>(maxval));
}

void save_pnm(const MultiChannelImage& img, const std::filesystem::path& path, int channels)
{
    if (img.channel_count() != channels)
        throw InputError(path.string() + ": channel count does not match file type");
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw InputError("cannot write " + path.string());
    os << (channels == 1 ? "P5" : "P6") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<unsigned char> buffer(static_cast<std::size_t>(img.width()) * img.height() * channels);
    std::size_t i = 0;
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            for (int ch = 0; ch < channels; ++ch)
                buffer[i++] = quantize(img.channel(ch)(r, c));
    os.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    if (!os)
        throw InputError("failed writing " + path.string());
}

} // namespace

MultiChannelImage load_image(const std::filesystem::path& path)
{
    const std::string ext = lower_extension(path);
    if (ext == ".png")
        return load_png(path);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")
        return load_pnm(path);
    throw InputError(path.string() + ": unsupported image extension");
}

void save_image(const MultiChannelImage& img, const std::filesystem::path& path)
{
    const std::string ext = lower_extension(path);
    if (ext == ".png")
        save_png(img, path);
    else if (ext == ".pgm")
        save_pnm(img, path, 1);
    else if (ext == ".ppm")
        save_pnm(img, path, 3);
    else if (ext == ".pnm")
        save_pnm(img, path, img.channel_count());
    else
        throw InputError(path.string() + ": unsupported image extension");
}

void write_kernel(std::ostream& os, const Kernel& k)
{
    os << k.rows() << ' ' << k.cols() << '\n';
    std::ostringstream line;
    line << std::setprecision(17);
    for (int r = 0; r < k.rows(); ++r) {
        line.str({});
        for (int c = 0; c < k.cols(); ++c)
            line << (c ? " " : "") << k(r, c);
        os << line.str() << '\n';
    }
}

Kernel read_kernel(std::istream& is)
{
    int rows = 0, cols = 0;
    if (!(is >> rows >> cols))
        throw InputError("kernel file: missing \"L M\" header");
    Kernel k(rows, cols);
    for (double& v : k.data())
        if (!(is >> v))
            throw InputError("kernel file: expected " + std::to_string(rows * cols) + " values");
    return k;
}

void save_kernel(const Kernel& k, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os)
        throw InputError("cannot write " + path.string());
    write_kernel(os, k);
}

Kernel load_kernel(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw InputError("cannot open " + path.string());
    return read_kernel(is);
}

} // namespace cnsdeblur
