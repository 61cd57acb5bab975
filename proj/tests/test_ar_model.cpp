#include "doctest.h"

#include "cnsdeblur/ar_model.hpp"
#include "cnsdeblur/error.hpp"
#include "cnsdeblur/metrics.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace cnsdeblur;

TEST_SUITE("ar_model")
{
    TEST_CASE("select_patch sizes")
    {
        const ImagePlane big(2000, 1500, 0.1);
        const PatchSelection s = select_patch(big, 25, 25);
        CHECK(s.patch.width() == 1250);
        CHECK(s.patch.height() == 1250);
        CHECK_FALSE(s.undersized);

        ImagePlane ramp(2 * 9 * 9, 2 * 9 * 9);
        for (int r = 0; r < ramp.height(); ++r)
            for (int c = 0; c < ramp.width(); ++c)
                ramp(r, c) = r * 1000 + c;
        const PatchSelection exact = select_patch(ramp, 9, 9);
        CHECK(exact.patch == ramp);
        CHECK_FALSE(exact.undersized);

        const ImagePlane small = oracle::random_plane(100, 100, 1);
        const PatchSelection w = select_patch(small, 25, 25);
        CHECK(w.patch == small);
        CHECK(w.undersized);
        CHECK_THROWS_AS(select_patch(ImagePlane(20, 30), 25, 25), InputError);
    }

    TEST_CASE("select_patch is centered")
    {
        ImagePlane img(300, 260);
        for (int r = 0; r < img.height(); ++r)
            for (int c = 0; c < img.width(); ++c)
                img(r, c) = r * 1000 + c;
        const PatchSelection s = select_patch(img, 3, 5); // side max(30, 20) = 30
        CHECK(s.patch.width() == 30);
        CHECK(s.patch.height() == 30);
        CHECK(s.patch(0, 0) == img(115, 135));
    }

    TEST_CASE("extended data matrix layout")
    {
        const ImagePlane three = oracle::random_plane(3, 3, 2);
        const Eigen::MatrixXd one = build_extended(three, 3, 3).materialize();
        REQUIRE(one.rows() == 1);
        for (int i = 0; i < 9; ++i)
            CHECK(one(0, i) == three.data()[static_cast<std::size_t>(i)]);

        CHECK(build_extended(oracle::random_plane(4, 4, 3), 3, 3).rows() == 4);

        const ImagePlane img = oracle::random_plane(10, 10, 4);
        const ExtendedDataMatrix x = build_extended(img, 5, 5);
        REQUIRE(x.rows() == 36);
        const Eigen::MatrixXd m = x.materialize();
        for (int n = 0; n < 6; ++n)
            for (int mm = 0; mm < 6; ++mm)
                for (int i = 0; i < 5; ++i)
                    for (int k = 0; k < 5; ++k) {
                        CHECK(m(n * 6 + mm, i * 5 + k) == img(n + i, mm + k));
                        CHECK(x.row(n * 6 + mm)[static_cast<std::size_t>(i * 5 + k)] == img(n + i, mm + k));
                    }
        const Eigen::MatrixXd g = x.gram();
        CHECK((g - m.transpose() * m).cwiseAbs().maxCoeff() <= 1e-12);

        // non-square orders
        const ImagePlane wide = oracle::random_plane(9, 6, 5);
        const Eigen::MatrixXd mw = build_extended(wide, 3, 5).materialize();
        CHECK(mw.rows() == 4 * 5);
        CHECK(mw(1 * 5 + 2, 1 * 5 + 4) == wide(2, 6));
        CHECK_THROWS_AS(build_extended(wide, 7, 3), InputError);
        CHECK_THROWS_AS(build_extended(wide, 2, 3), InputError);
    }

    TEST_CASE("noise-free recovery on annihilated textures")
    {
        for (int p : {3, 5}) {
            const Kernel a = oracle::symmetric_stencil(p, 5);
            const ImagePlane img = oracle::zero_set_texture(a, 64, 8 * p * p, 7);
            const ArFit fit = estimate_ar(img, p, p);
            CHECK(fit.model.coeffs(p / 2, p / 2) == 1.0);
            CHECK_FALSE(fit.model.degenerate);
            CHECK(oracle::max_diff(fit.model.coeffs, a) <= 1e-6);
        }
    }

    TEST_CASE("constant image is degenerate with a center-only stencil")
    {
        const ArFit fit = estimate_ar(ImagePlane(20, 20, 0.6), 3, 3);
        CHECK(fit.model.degenerate);
        CHECK(fit.model.center_only());
        CHECK(fit.model.coeffs == Kernel::delta(3, 3));
    }

    TEST_CASE("fit never loses to the center-only stencil")
    {
        for (std::uint64_t s = 0; s < 5; ++s) {
            const ImagePlane img = oracle::smooth_plane(40, 30, s) + 0.05 * oracle::random_plane(40, 30, 50 + s);
            const ArFit fit = estimate_ar(img, 5, 3);
            const double trivial = mean_sq(ar_residual(img, Kernel::delta(5, 3)));
            CHECK(fit.residual_msq <= trivial);
            CHECK(fit.residual_msq == doctest::Approx(mean_sq(ar_residual(img, fit.model.coeffs))));
        }
    }

    TEST_CASE("ar_residual matches the window sums")
    {
        const ImagePlane img = oracle::random_plane(9, 7, 8);
        const Kernel a = oracle::random_kernel(3, 5, 9);
        const ImagePlane res = ar_residual(img, a);
        CHECK(res.width() == 5);
        CHECK(res.height() == 5);
        for (int n = 0; n < 5; ++n)
            for (int m = 0; m < 5; ++m) {
                double s = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int k = 0; k < 5; ++k)
                        s += a(i, k) * img(n + i, m + k);
                CHECK(std::abs(res(n, m) - s) <= 1e-14);
            }
    }

    TEST_CASE("shift equivariance on a stationary texture")
    {
        const Kernel a = oracle::symmetric_stencil(3, 6);
        const ImagePlane img = oracle::zero_set_texture(a, 60, 72, 8);
        const Kernel base = estimate_ar(select_patch(img.crop(0, 0, 50, 50), 3, 3).patch, 3, 3).model.coeffs;
        for (auto [dr, dc] : {std::pair{1, 0}, {0, 1}, {3, 2}}) {
            const Kernel shifted = estimate_ar(select_patch(img.crop(dr, dc, 50, 50), 3, 3).patch, 3, 3).model.coeffs;
            CHECK(oracle::max_diff(shifted, base) <= 1e-8);
        }
    }

    TEST_CASE("underdetermined and invalid orders")
    {
        CHECK_THROWS_AS(estimate_ar(oracle::random_plane(4, 4, 1), 3, 3), InputError);
        CHECK_NOTHROW(estimate_ar(oracle::random_plane(5, 5, 1), 3, 3));
        CHECK_THROWS_AS(estimate_ar(oracle::random_plane(9, 9, 1), 4, 3), InputError);
    }

    TEST_CASE("regularized fit with the aerial-photo parameters is accepted as config")
    {
        ArRegularization reg;
        reg.enabled = true;
        reg.lambda = 0.001;
        reg.q_steps = 3;
        reg.eps = 1e-8;
        const ImagePlane img = oracle::smooth_plane(80, 80, 12) + 0.02 * oracle::random_plane(80, 80, 13);
        const ArFit fit = estimate_ar(img, 5, 5, reg);
        CHECK(fit.model.coeffs(2, 2) == 1.0);
        CHECK(fit.model.coeffs.data().size() == 25);
        for (double v : fit.model.coeffs.data())
            CHECK(std::isfinite(v));
    }
}
