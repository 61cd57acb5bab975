#include "cnsdeblur/image.hpp"
#include "cnsdeblur/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cnsdeblur {

ImagePlane::ImagePlane(int width, int height, double fill)
    : width_(width), height_(height)
{
    if (width < 1 || height < 1)
        throw InputError("image dimensions must be positive");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

ImagePlane::ImagePlane(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data))
{
    if (width < 1 || height < 1)
        throw InputError("image dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width) * height)
        throw InputError("image data length does not match dimensions");
}

double ImagePlane::clamped(int row, int col) const
{
    row = std::clamp(row, 0, height_ - 1);
    col = std::clamp(col, 0, width_ - 1);
    return (*this)(row, col);
}

bool ImagePlane::all_finite() const
{
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ImagePlane ImagePlane::crop(int row0, int col0, int height, int width) const
{
    if (row0 < 0 || col0 < 0 || row0 + height > height_ || col0 + width > width_)
        throw InputError("crop region outside image");
    ImagePlane out(width, height);
    for (int r = 0; r < height; ++r)
        std::copy_n(&(*this)(row0 + r, col0), width, &out(r, 0));
    return out;
}

ImagePlane& ImagePlane::operator+=(const ImagePlane& o)
{
    if (!same_shape(o))
        throw InputError("image size mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += o.data_[i];
    return *this;
}

ImagePlane& ImagePlane::operator-=(const ImagePlane& o)
{
    if (!same_shape(o))
        throw InputError("image size mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] -= o.data_[i];
    return *this;
}

ImagePlane& ImagePlane::operator*=(double s)
{
    for (double& v : data_)
        v *= s;
    return *this;
}

ImagePlane operator+(ImagePlane a, const ImagePlane& b) { return a += b; }
ImagePlane operator-(ImagePlane a, const ImagePlane& b) { return a -= b; }
ImagePlane operator*(ImagePlane a, double s) { return a *= s; }
ImagePlane operator*(double s, ImagePlane a) { return a *= s; }

ImagePlane hadamard(const ImagePlane& a, const ImagePlane& b)
{
    if (!a.same_shape(b))
        throw InputError("image size mismatch");
    ImagePlane out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] *= bd[i];
    return out;
}

MultiChannelImage::MultiChannelImage(std::vector<ImagePlane> channels)
    : channels_(std::move(channels))
{
    if (channels_.size() != 1 && channels_.size() != 3)
        throw InputError("expected 1 or 3 channels, got " + std::to_string(channels_.size()));
    for (const auto& c : channels_)
        if (!c.same_shape(channels_[0]))
            throw InputError("channel sizes differ");
}

MultiChannelImage::MultiChannelImage(ImagePlane grey)
{
    channels_.push_back(std::move(grey));
}

ImagePlane luminance(const MultiChannelImage& img)
{
    if (img.channel_count() == 1)
        return img.channel(0);
    ImagePlane out(img.width(), img.height());
    auto o = out.data();
    auto r = img.channel(0).data();
    auto g = img.channel(1).data();
    auto b = img.channel(2).data();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    return out;
}

Kernel::Kernel(int rows, int cols, double fill)
    : rows_(rows), cols_(cols)
{
    if (rows < 1 || cols < 1 || rows % 2 == 0 || cols % 2 == 0)
        throw InputError("kernel dimensions must be odd and positive, got "
                         + std::to_string(rows) + "x" + std::to_string(cols));
    data_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

Kernel::Kernel(int rows, int cols, std::vector<double> data)
    : Kernel(rows, cols)
{
    if (data.size() != data_.size())
        throw InputError("kernel data length does not match dimensions");
    data_ = std::move(data);
}

Kernel Kernel::delta(int rows, int cols)
{
    Kernel k(rows, cols);
    k(k.center_row(), k.center_col()) = 1.0;
    return k;
}

double Kernel::sum() const
{
    double s = 0.0;
    for (double v : data_)
        s += v;
    return s;
}

Kernel Kernel::normalized() const
{
    const double s = sum();
    if (!(std::abs(s) > 0.0) || !std::isfinite(s))
        throw NumericalError("kernel has zero or non-finite sum");
    Kernel out = *this;
    for (double& v : out.data_)
        v /= s;
    return out;
}

Kernel Kernel::flipped() const
{
    Kernel out = *this;
    std::reverse(out.data_.begin(), out.data_.end());
    return out;
}

double Kernel::off_center_mass() const
{
    double total = 0.0;
    for (double v : data_)
        total += std::abs(v);
    if (total == 0.0)
        return 0.0;
    return (total - std::abs((*this)(center_row(), center_col()))) / total;
}

ImagePlane Kernel::as_plane() const
{
    return ImagePlane(cols_, rows_, data_);
}

Kernel Kernel::from_plane(const ImagePlane& p)
{
    return Kernel(p.height(), p.width(), std::vector<double>(p.data().begin(), p.data().end()));
}

} // namespace cnsdeblur
