#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cnsdeblur {

//! Single-channel row-major grid of doubles.
class ImagePlane {
public:
    ImagePlane() = default;
    ImagePlane(int width, int height, double fill = 0.0);
    ImagePlane(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(int row, int col) { return data_[static_cast<std::size_t>(row) * width_ + col]; }
    const double& operator()(int row, int col) const { return data_[static_cast<std::size_t>(row) * width_ + col]; }

    //! Replicated (clamped) access, used for Neumann boundaries.
    double clamped(int row, int col) const;

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool same_shape(const ImagePlane& other) const
    {
        return width_ == other.width_ && height_ == other.height_;
    }
    bool all_finite() const;

    ImagePlane crop(int row0, int col0, int height, int width) const;

    ImagePlane& operator+=(const ImagePlane& o);
    ImagePlane& operator-=(const ImagePlane& o);
    ImagePlane& operator*=(double s);

    friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

ImagePlane operator+(ImagePlane a, const ImagePlane& b);
ImagePlane operator-(ImagePlane a, const ImagePlane& b);
ImagePlane operator*(ImagePlane a, double s);
ImagePlane operator*(double s, ImagePlane a);
//! Elementwise product.
ImagePlane hadamard(const ImagePlane& a, const ImagePlane& b);

//! 1 (grey) or 3 (RGB) planes of identical size.
class MultiChannelImage {
public:
    MultiChannelImage() = default;
    explicit MultiChannelImage(std::vector<ImagePlane> channels);
    explicit MultiChannelImage(ImagePlane grey);

    int channel_count() const { return static_cast<int>(channels_.size()); }
    int width() const { return channels_.empty() ? 0 : channels_[0].width(); }
    int height() const { return channels_.empty() ? 0 : channels_[0].height(); }

    const ImagePlane& channel(int i) const { return channels_.at(static_cast<std::size_t>(i)); }
    ImagePlane& channel(int i) { return channels_.at(static_cast<std::size_t>(i)); }
    const std::vector<ImagePlane>& channels() const { return channels_; }

    friend bool operator==(const MultiChannelImage&, const MultiChannelImage&) = default;

private:
    std::vector<ImagePlane> channels_;
};

//! 0.299 R + 0.587 G + 0.114 B, or the single plane for grey images.
ImagePlane luminance(const MultiChannelImage& img);

//! Small odd-sized L x M grid (PSF or inverse PSF).
class Kernel {
public:
    Kernel() = default;
    Kernel(int rows, int cols, double fill = 0.0);
    Kernel(int rows, int cols, std::vector<double> data);

    static Kernel delta(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int center_row() const { return rows_ / 2; }
    int center_col() const { return cols_ / 2; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const double& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    double sum() const;
    //! Copy scaled to unit sum. Throws NumericalError for a zero-sum kernel.
    Kernel normalized() const;
    //! Rotated by 180 degrees.
    Kernel flipped() const;
    //! Fraction of sum(abs(h)) lying off the center element.
    double off_center_mass() const;

    ImagePlane as_plane() const;
    static Kernel from_plane(const ImagePlane& p);

    friend bool operator==(const Kernel&, const Kernel&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

} // namespace cnsdeblur
