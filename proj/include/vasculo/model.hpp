#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vasculo/errors.hpp"

namespace vasculo {

/// Physical constants of the stationary model with pressure p(rho) = (eps/2) rho^2.
///
/// alpha (damping) and delta (relaxation time) do not enter the stationary
/// equations; they are carried so that reports can echo the full parameter set.
struct ModelParams {
    double D = 1.0;
    double chi = 1.0;
    double a = 0.0;
    double b = 0.0;
    double eps = 1.0;
    double alpha = 0.0;
    double delta = 0.0;

    /// Names of fields violating the sign constraints, in declaration order.
    std::vector<std::string> invalid_fields() const {
        std::vector<std::string> bad;
        auto positive = [&](double v, const char* name) {
            if (!(std::isfinite(v) && v > 0.0)) bad.emplace_back(name);
        };
        auto nonneg = [&](double v, const char* name) {
            if (!(std::isfinite(v) && v >= 0.0)) bad.emplace_back(name);
        };
        positive(D, "D");
        positive(chi, "chi");
        nonneg(a, "a");
        nonneg(b, "b");
        positive(eps, "eps");
        nonneg(alpha, "alpha");
        nonneg(delta, "delta");
        return bad;
    }

    void validate() const {
        const auto bad = invalid_fields();
        if (bad.empty()) return;
        std::string msg = "invalid model parameters:";
        for (const auto& f : bad) msg += " " + f;
        throw ValidationError(msg, bad);
    }

    /// beta >= 0 with b = D beta^2.
    double beta() const { return std::sqrt(b / D); }

    /// a chi / (D eps), the production/sensitivity ratio.
    double coupling() const { return a * chi / (D * eps); }

    /// The discriminant a chi/(D eps) - beta^2 that selects the interior solution family.
    double sigma() const { return coupling() - b / D; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

enum class RegimeKind { Degenerate, Subcritical, Supercritical };

inline std::string_view to_string(RegimeKind k) {
    switch (k) {
        case RegimeKind::Degenerate: return "degenerate";
        case RegimeKind::Subcritical: return "subcritical";
        case RegimeKind::Supercritical: return "supercritical";
    }
    return "unknown";
}

struct Regime {
    RegimeKind kind = RegimeKind::Degenerate;
    /// xi (Subcritical) or omega (Supercritical); absent when Degenerate.
    std::optional<double> freq;
    double sigma = 0.0;
    double tolerance = 0.0;

    friend bool operator==(const Regime&, const Regime&) = default;
};

/// Band around sigma = 0 treated as the degenerate case.
inline double classification_tolerance(const ModelParams& p) {
    return 1e-12 * (1.0 + p.coupling() + p.b / p.D);
}

inline Regime classify(const ModelParams& p) {
    p.validate();
    Regime r;
    r.sigma = p.sigma();
    r.tolerance = classification_tolerance(p);
    if (std::fabs(r.sigma) <= r.tolerance) {
        r.kind = RegimeKind::Degenerate;
    } else if (r.sigma < 0.0) {
        r.kind = RegimeKind::Subcritical;
        r.freq = std::sqrt(-r.sigma);
    } else {
        r.kind = RegimeKind::Supercritical;
        r.freq = std::sqrt(r.sigma);
    }
    return r;
}

/// Parses the flat parameter object. alpha and delta default to 0; every
/// other key is required.
inline ModelParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("parameters must be a JSON object", {});
    ModelParams p;
    std::vector<std::string> missing;
    auto take = [&](const char* key, double& dst, bool required) {
        auto it = j.find(key);
        if (it == j.end()) {
            if (required) missing.emplace_back(key);
            return;
        }
        if (!it->is_number()) {
            missing.emplace_back(key);
            return;
        }
        dst = it->get<double>();
    };
    take("D", p.D, true);
    take("chi", p.chi, true);
    take("a", p.a, true);
    take("b", p.b, true);
    take("eps", p.eps, true);
    take("alpha", p.alpha, false);
    take("delta", p.delta, false);
    if (!missing.empty()) {
        std::string msg = "missing or non-numeric parameter:";
        for (const auto& f : missing) msg += " " + f;
        throw ValidationError(msg, missing);
    }
    p.validate();
    return p;
}

inline nlohmann::json to_json(const ModelParams& p) {
    return {{"D", p.D},     {"chi", p.chi},     {"a", p.a},        {"b", p.b},
            {"eps", p.eps}, {"alpha", p.alpha}, {"delta", p.delta}};
}

inline nlohmann::json to_json(const Regime& r, const ModelParams& p) {
    nlohmann::json j;
    j["regime"] = std::string(to_string(r.kind));
    j["sigma"] = r.sigma;
    j["beta"] = p.beta();
    j["freq"] = r.freq ? nlohmann::json(*r.freq) : nlohmann::json(nullptr);
    if (r.kind == RegimeKind::Subcritical) j["xi"] = *r.freq;
    if (r.kind == RegimeKind::Supercritical) j["omega"] = *r.freq;
    return j;
}

}  // namespace vasculo
