#pragma once

#include <string>

#include "scenver/barrier_core.hpp"

namespace scenver {

/// Closed-form benchmark flows used to check the shape of the transition distribution.
///
///   circle:      x = (1, φ),  φ(t) = φ₀ + 0.1 t (wrapped to [0, 2π)),  X = {1} × [0, 2π]
///   decay:       x(t) = x₀ e^{-0.5 t},                                  X = [-1, 1]
///   param_decay: x(t) = θ + (x₀ - θ) e^{-3 t},  θ ∈ {-1.5, 0, 1.5},     X = [-3, 3]
enum class AnalyticVariant { circle, decay, param_decay };

AnalyticVariant parse_analytic_variant(const std::string& name);
std::string to_string(AnalyticVariant v);

/// Exact advance by dt; no integration error.
StateVector analytic_step(AnalyticVariant variant, const StateVector& x, const ParamVector& theta, double dt);

class AnalyticSystem final : public ClosedLoopSystem {
public:
    explicit AnalyticSystem(AnalyticVariant variant) : variant_(variant) {}

    AnalyticVariant variant() const { return variant_; }

    std::string name() const override { return "analytic_" + to_string(variant_); }
    std::size_t state_dim() const override;
    Box state_box() const override;
    ParamSpec param_spec() const override;
    StateVector step(const StateVector& x, const ParamVector& theta, double dt) const override;

private:
    AnalyticVariant variant_;
};

}  // namespace scenver
