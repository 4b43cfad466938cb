#include "rollmono/model.hpp"

#include "rollmono/errors.hpp"
#include "rollmono/smooth_model.hpp"

namespace rollmono {

std::string_view to_string(Model m) { return m == Model::Smooth ? "smooth" : "rough"; }

Model parse_model(std::string_view name) {
    if (name == "smooth") return Model::Smooth;
    if (name == "rough") return Model::Rough;
    throw ConfigError("unknown model '" + std::string(name) + "' (expected smooth|rough)");
}

RollingSystem::RollingSystem(Model model, const BodyParams& params)
    : model_(model), params_(params) {
    params_.validate();
    if (model_ == Model::Rough) table_ = std::make_shared<FundamentalMatrixTable>(params_);
}

StateRate RollingSystem::field(const BodyState& s) const {
    return model_ == Model::Smooth ? field_smooth(s, params_) : field_rough(s, params_);
}

FieldFn RollingSystem::field_fn() const {
    if (model_ == Model::Smooth)
        return [p = params_](const BodyState& s) { return field_smooth(s, p); };
    return [p = params_](const BodyState& s) { return field_rough(s, p); };
}

double RollingSystem::energy(const BodyState& s) const {
    return model_ == Model::Smooth ? energy_smooth(s, params_) : energy_rough(s, params_);
}

LinearIntegrals RollingSystem::linear_integrals(const BodyState& s) const {
    if (model_ == Model::Smooth) {
        const SmoothIntegrals f = integrals_smooth(s);
        return {f.p_psi, f.p_phi};
    }
    const RoughIntegrals c = integrals_rough(s, *table_);
    return {c.c1, c.c2};
}

Mat2 RollingSystem::fundamental(double gamma3) const {
    if (!table_) throw ConfigError("fundamental matrix requested for the smooth model");
    return (*table_)(gamma3);
}

}  // namespace rollmono
