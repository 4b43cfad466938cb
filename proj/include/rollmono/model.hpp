// Uniform access to either rolling model: vector field, energy and the two
// integrals linear in M.
#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>

#include "rollmono/core.hpp"
#include "rollmono/odeflow.hpp"
#include "rollmono/rough_model.hpp"

namespace rollmono {

enum class Model { Smooth, Rough };

std::string_view to_string(Model m);
/// Accepts "smooth" or "rough"; throws ConfigError otherwise.
Model parse_model(std::string_view name);

/// Values (j1, j2) of the linear integrals: smooth (p_psi, p_phi), rough
/// (c1, c2). The pairing c1 <-> p_psi, c2 <-> p_phi is used throughout.
struct LinearIntegrals {
    double j1 = 0.0;
    double j2 = 0.0;
};

/// A model bound to body parameters. For the rough model it owns a shared,
/// immutable fundamental-matrix table, so copies are cheap and safe to use
/// from several threads.
class RollingSystem {
public:
    RollingSystem(Model model, const BodyParams& params);

    Model model() const { return model_; }
    const BodyParams& params() const { return params_; }

    StateRate field(const BodyState& s) const;
    FieldFn field_fn() const;
    double energy(const BodyState& s) const;
    LinearIntegrals linear_integrals(const BodyState& s) const;

    /// Rough model only: G(gamma3) from the interpolation table.
    Mat2 fundamental(double gamma3) const;
    const FundamentalMatrixTable* table() const { return table_.get(); }

private:
    Model model_;
    BodyParams params_;
    std::shared_ptr<const FundamentalMatrixTable> table_;
};

}  // namespace rollmono
