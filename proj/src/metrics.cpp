#include "cnsdeblur/metrics.hpp"
#include "cnsdeblur/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cnsdeblur {

double mean_abs(const ImagePlane& a)
{
    double s = 0.0;
    for (double v : a.data())
        s += std::abs(v);
    return a.size() ? s / static_cast<double>(a.size()) : 0.0;
}

double mean_sq(const ImagePlane& a)
{
    double s = 0.0;
    for (double v : a.data())
        s += v * v;
    return a.size() ? s / static_cast<double>(a.size()) : 0.0;
}

double max_abs(const ImagePlane& a)
{
    double m = 0.0;
    for (double v : a.data())
        m = std::max(m, std::abs(v));
    return m;
}

double inner(const ImagePlane& a, const ImagePlane& b)
{
    if (!a.same_shape(b))
        throw InputError("image size mismatch");
    double s = 0.0;
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < ad.size(); ++i)
        s += ad[i] * bd[i];
    return s;
}

namespace {

double psnr_from_mse(double mse)
{
    if (mse == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

} // namespace

double psnr(const ImagePlane& reference, const ImagePlane& test)
{
    if (!reference.same_shape(test))
        throw InputError("psnr: image size mismatch");
    return psnr_from_mse(mean_sq(reference - test));
}

double psnr(const MultiChannelImage& reference, const MultiChannelImage& test)
{
    if (reference.channel_count() != test.channel_count())
        throw InputError("psnr: channel count mismatch");
    double mse = 0.0;
    for (int c = 0; c < reference.channel_count(); ++c) {
        if (!reference.channel(c).same_shape(test.channel(c)))
            throw InputError("psnr: image size mismatch");
        mse += mean_sq(reference.channel(c) - test.channel(c));
    }
    return psnr_from_mse(mse / reference.channel_count());
}

double ncc(const Kernel& a, const Kernel& b)
{
    const int rows = std::max(a.rows(), b.rows());
    const int cols = std::max(a.cols(), b.cols());
    auto pad = [&](const Kernel& k) {
        Kernel out(rows, cols);
        const int r0 = (rows - k.rows()) / 2;
        const int c0 = (cols - k.cols()) / 2;
        for (int r = 0; r < k.rows(); ++r)
            for (int c = 0; c < k.cols(); ++c)
                out(r0 + r, c0 + c) = k(r, c);
        return out;
    };
    const Kernel pa = pad(a);
    const Kernel pb = pad(b);
    const double n = static_cast<double>(pa.size());
    const double ma = pa.sum() / n;
    const double mb = pb.sum() / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double da = pa.data()[i] - ma;
        const double db = pb.data()[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        return (saa == sbb) ? 1.0 : 0.0;
    return sab / std::sqrt(saa * sbb);
}

} // namespace cnsdeblur
