#include "doctest.h"

#include "cnsdeblur/denoise.hpp"
#include "cnsdeblur/error.hpp"
#include "cnsdeblur/fixtures.hpp"
#include "cnsdeblur/metrics.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace cnsdeblur;

namespace {

const CascadeOrders kSmall{9, 9, 5, 5, 1e-4};
const CascadeOrders kDenoise{21, 21, 11, 11, 1e-4};

ImagePlane impulsive_fixture(int size)
{
    const SyntheticFixture fx = make_fixture(MultiChannelImage(make_texture("mosaic", size, 21)),
                                             PsfSpec::gaussian(1.0), 5, 5, NoiseSpec::parse("impulsive:0.01"), 77);
    return fx.blurred.channel(0);
}

} // namespace

TEST_SUITE("denoise_cascade")
{
    TEST_CASE("one stage equals the prior filter")
    {
        const ImagePlane x = impulsive_fixture(96);
        const CascadeStage st = prior_filter(x, kSmall);
        const auto [out, stages] = cascade(x, 1, kSmall);
        REQUIRE(stages.size() == 1);
        CHECK(out == st.x_out);
        CHECK(stages[0].psf == st.psf);
        CHECK(std::abs(st.psf.sum() - 1.0) <= 1e-12);
        CHECK(st.x_out.all_finite());
    }

    TEST_CASE("prior filter is the LS inverse kernel applied with replicate borders")
    {
        const ImagePlane x = impulsive_fixture(80);
        const CascadeStage st = prior_filter(x, kSmall);
        CHECK(oracle::max_diff(st.x_out, oracle::conv(x, st.ipsf_prior, true)) <= 1e-12);
        CHECK(st.ipsf_prior.rows() == 5);
    }

    TEST_CASE("stages adapt and stay bounded")
    {
        const ImagePlane x = impulsive_fixture(96);
        const auto [out, stages] = cascade(x, 2, kSmall);
        REQUIRE(stages.size() == 2);
        CHECK(oracle::l1_diff(stages[1].psf, stages[0].psf) > 1e-6);
        CHECK(stages[1].x_out == out);
        // each stage is a linear filter: |out| <= |g|_1 * max|in|
        const ImagePlane* in = &x;
        for (const CascadeStage& st : stages) {
            double peak_in = 0.0, peak_out = 0.0;
            for (double v : in->data())
                peak_in = std::max(peak_in, std::abs(v));
            for (double v : st.x_out.data())
                peak_out = std::max(peak_out, std::abs(v));
            CHECK(peak_out <= oracle::l1(st.ipsf_prior) * peak_in + 1e-12);
            in = &st.x_out;
        }
    }

    TEST_CASE("impulse energy drops")
    {
        const ImagePlane x = impulsive_fixture(128);
        const auto [out, stages] = cascade(x, 2, kDenoise);
        CHECK(oracle::impulse_energy(stages[0].x_out) < oracle::impulse_energy(x));
        CHECK(oracle::impulse_energy(out) < oracle::impulse_energy(x));
    }

    TEST_CASE("deterministic")
    {
        const ImagePlane x = impulsive_fixture(64);
        CHECK(cascade(x, 2, kSmall).first == cascade(x, 2, kSmall).first);
    }

    TEST_CASE("errors")
    {
        CHECK_THROWS_AS(cascade(ImagePlane(64, 64, 0.5), 0, kSmall), InputError);
        CHECK_THROWS_AS(prior_filter(impulsive_fixture(64), CascadeOrders{5, 5, 5, 5, 1e-4}), InputError);
    }
}
