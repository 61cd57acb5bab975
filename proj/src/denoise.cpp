#include "cnsdeblur/denoise.hpp"
#include "cnsdeblur/ar_model.hpp"
#include "cnsdeblur/conv_ops.hpp"
#include "cnsdeblur/error.hpp"
#include "cnsdeblur/ipsf_solver.hpp"
#include "cnsdeblur/psf_cns.hpp"

namespace cnsdeblur {

CascadeStage prior_filter(const ImagePlane& x, const CascadeOrders& orders)
{
    const PatchSelection sel = select_patch(x, orders.p, orders.q);
    const ArFit fit = estimate_ar(sel.patch, orders.p, orders.q);
    CascadeStage stage;
    stage.patch_undersized = sel.undersized;
    stage.psf = estimate_psf(fit.model, orders.l, orders.m).psf;
    stage.ipsf_prior = solve_ls(build_problem(x, stage.psf), orders.svd_cutoff);
    stage.x_out = conv_same(x, stage.ipsf_prior, BoundaryMode::NeumannReplicate);
    return stage;
}

std::pair<ImagePlane, std::vector<CascadeStage>> cascade(const ImagePlane& x, int stages, const CascadeOrders& orders)
{
    if (stages < 1)
        throw InputError("cascade needs at least one stage");
    std::vector<CascadeStage> records;
    ImagePlane cur = x;
    for (int i = 0; i < stages; ++i) {
        records.push_back(prior_filter(cur, orders));
        cur = records.back().x_out;
    }
    return {cur, std::move(records)};
}

} // namespace cnsdeblur
