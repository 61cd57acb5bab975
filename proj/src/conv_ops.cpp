#include "cnsdeblur/conv_ops.hpp"
#include "cnsdeblur/error.hpp"

#include <cmath>

namespace cnsdeblur {

namespace {

// Image extended by (rows-1)/2, (cols-1)/2 on each side.
ImagePlane pad(const ImagePlane& img, int pr, int pc, BoundaryMode mode)
{
    ImagePlane out(img.width() + 2 * pc, img.height() + 2 * pr);
    for (int r = 0; r < out.height(); ++r) {
        const int sr = r - pr;
        for (int c = 0; c < out.width(); ++c) {
            const int sc = c - pc;
            if (mode == BoundaryMode::NeumannReplicate)
                out(r, c) = img.clamped(sr, sc);
            else if (sr >= 0 && sr < img.height() && sc >= 0 && sc < img.width())
                out(r, c) = img(sr, sc);
        }
    }
    return out;
}

void check_fits(const ImagePlane& img, const Kernel& k)
{
    if (k.rows() > img.height() || k.cols() > img.width())
        throw InputError("kernel larger than image");
}

// 1-D central difference along a strided line.
template <class Get, class Put>
void diff_line(int n, Get get, Put put)
{
    if (n == 1) {
        put(0, 0.0);
        return;
    }
    put(0, get(1) - get(0));
    for (int i = 1; i < n - 1; ++i)
        put(i, 0.5 * (get(i + 1) - get(i - 1)));
    put(n - 1, get(n - 1) - get(n - 2));
}

// Transpose of diff_line.
template <class Get, class Put>
void diff_line_adjoint(int n, Get get, Put put)
{
    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    if (n > 1) {
        acc[0] -= get(0);
        acc[1] += get(0);
        for (int i = 1; i < n - 1; ++i) {
            acc[static_cast<std::size_t>(i + 1)] += 0.5 * get(i);
            acc[static_cast<std::size_t>(i - 1)] -= 0.5 * get(i);
        }
        acc[static_cast<std::size_t>(n - 1)] += get(n - 1);
        acc[static_cast<std::size_t>(n - 2)] -= get(n - 1);
    }
    for (int i = 0; i < n; ++i)
        put(i, acc[static_cast<std::size_t>(i)]);
}

ImagePlane divergence_form(const ImagePlane& img, double offset, bool guard)
{
    const ImagePlane gx = grad_x(img);
    const ImagePlane gy = grad_y(img);
    ImagePlane fx(img.width(), img.height());
    ImagePlane fy(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double a = gx.data()[i];
        const double b = gy.data()[i];
        const double d = a * a + b * b + offset;
        if (guard && d <= 0.0)
            continue;
        const double s = 1.0 / std::sqrt(d);
        fx.data()[i] = a * s;
        fy.data()[i] = b * s;
    }
    ImagePlane out = grad_x_adjoint(fx);
    out += grad_y_adjoint(fy);
    out *= -1.0;
    return out;
}

} // namespace

ImagePlane conv_same(const ImagePlane& img, const Kernel& k, BoundaryMode mode)
{
    check_fits(img, k);
    const int cr = k.center_row(), cc = k.center_col();
    const ImagePlane p = pad(img, cr, cc, mode);
    ImagePlane out(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r) {
        double* o = &out(r, 0);
        for (int i = 0; i < k.rows(); ++i) {
            const double* src = &p(r + i, 0);
            for (int j = 0; j < k.cols(); ++j) {
                const double w = k(i, j);
                if (w == 0.0)
                    continue;
                const double* s = src + j;
                for (int c = 0; c < img.width(); ++c)
                    o[c] += w * s[c];
            }
        }
    }
    return out;
}

ImagePlane correlate_adjoint(const ImagePlane& img, const Kernel& k, BoundaryMode mode)
{
    return conv_same(img, k.flipped(), mode);
}

Kernel compose_kernels(const Kernel& a, const Kernel& b)
{
    Kernel out(a.rows() + b.rows() - 1, a.cols() + b.cols() - 1);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            for (int u = 0; u < b.rows(); ++u)
                for (int v = 0; v < b.cols(); ++v)
                    out(i + u, j + v) += a(i, j) * b(u, v);
    return out;
}

ImagePlane grad_x(const ImagePlane& img)
{
    ImagePlane out(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r)
        diff_line(
            img.width(), [&](int c) { return img(r, c); }, [&](int c, double v) { out(r, c) = v; });
    return out;
}

ImagePlane grad_y(const ImagePlane& img)
{
    ImagePlane out(img.width(), img.height());
    for (int c = 0; c < img.width(); ++c)
        diff_line(
            img.height(), [&](int r) { return img(r, c); }, [&](int r, double v) { out(r, c) = v; });
    return out;
}

ImagePlane grad_x_adjoint(const ImagePlane& img)
{
    ImagePlane out(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r)
        diff_line_adjoint(
            img.width(), [&](int c) { return img(r, c); }, [&](int c, double v) { out(r, c) = v; });
    return out;
}

ImagePlane grad_y_adjoint(const ImagePlane& img)
{
    ImagePlane out(img.width(), img.height());
    for (int c = 0; c < img.width(); ++c)
        diff_line_adjoint(
            img.height(), [&](int r) { return img(r, c); }, [&](int r, double v) { out(r, c) = v; });
    return out;
}

SecondDerivatives second_derivs(const ImagePlane& img)
{
    SecondDerivatives d{ImagePlane(img.width(), img.height()), ImagePlane(img.width(), img.height()),
                        grad_y(grad_x(img))};
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            const double f = img(r, c);
            d.xx(r, c) = img.clamped(r, c + 1) - 2.0 * f + img.clamped(r, c - 1);
            d.yy(r, c) = img.clamped(r + 1, c) - 2.0 * f + img.clamped(r - 1, c);
        }
    return d;
}

ImagePlane metric_det(const ImagePlane& img)
{
    const ImagePlane gx = grad_x(img);
    const ImagePlane gy = grad_y(img);
    ImagePlane out(img.width(), img.height());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = 1.0 + gx.data()[i] * gx.data()[i] + gy.data()[i] * gy.data()[i];
    return out;
}

ImagePlane saf_operator(const ImagePlane& img)
{
    return divergence_form(img, 1.0, false);
}

ImagePlane saf_pointwise(const ImagePlane& img)
{
    const ImagePlane gx = grad_x(img);
    const ImagePlane gy = grad_y(img);
    const SecondDerivatives d = second_derivs(img);
    ImagePlane out(img.width(), img.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double a = gx.data()[i], b = gy.data()[i];
        const double sigma = 1.0 + a * a + b * b;
        out.data()[i] = ((1.0 + b * b) * d.xx.data()[i] + (1.0 + a * a) * d.yy.data()[i]
                         - 2.0 * a * b * d.xy.data()[i])
                        / (sigma * std::sqrt(sigma));
    }
    return out;
}

ImagePlane tv_operator(const ImagePlane& img, double beta)
{
    if (beta < 0.0)
        throw InputError("TV beta must be non-negative");
    return divergence_form(img, beta, true);
}

ImagePlane apply_regularizer(const ImagePlane& img, const Regularizer& reg)
{
    return reg.kind == Regularizer::Kind::SAF ? saf_pointwise(img) : tv_operator(img, reg.beta);
}

} // namespace cnsdeblur
