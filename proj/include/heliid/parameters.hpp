#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heliid/error.hpp"

namespace heliid {

/// Canonical index of each identifiable derivative. The order is the row
/// order of the identification table and is shared by the optimizers, the
/// search space and every report.
enum class Param : std::size_t {
    X_u, X_a, Y_v, Y_b,
    L_u, L_v, L_b, L_w,
    M_u, M_v, M_a, M_w,
    tau_f, A_b, A_c, B_a, B_d,
    Z_a, Z_b, Z_w, Z_r,
    N_v, N_p, N_w, N_r, N_rfb,
    K_r, K_rfb, tau_s,
    Y_ped, M_col,
    A_lat, A_lon, B_lat, B_lon,
    Z_col, N_ped, N_col, C_lon, D_lat,
};

inline constexpr std::size_t kNumParams = 40;

inline constexpr std::array<std::string_view, kNumParams> kParamNames = {
    "X_u", "X_a", "Y_v", "Y_b",
    "L_u", "L_v", "L_b", "L_w",
    "M_u", "M_v", "M_a", "M_w",
    "tau_f", "A_b", "A_c", "B_a", "B_d",
    "Z_a", "Z_b", "Z_w", "Z_r",
    "N_v", "N_p", "N_w", "N_r", "N_rfb",
    "K_r", "K_rfb", "tau_s",
    "Y_ped", "M_col",
    "A_lat", "A_lon", "B_lat", "B_lon",
    "Z_col", "N_ped", "N_col", "C_lon", "D_lat",
};

inline constexpr std::size_t index_of(Param p) { return static_cast<std::size_t>(p); }

inline std::optional<std::size_t> param_index(std::string_view name)
{
    auto it = std::find(kParamNames.begin(), kParamNames.end(), name);
    if (it == kParamNames.end()) return std::nullopt;
    return static_cast<std::size_t>(it - kParamNames.begin());
}

/// The 40 stability and control derivatives of the hover model, stored flat
/// in canonical order. Values must be finite; the checked constructors
/// enforce it.
class ParameterSet {
public:
    using Vector = std::array<double, kNumParams>;

    ParameterSet() { values_.fill(0.0); }

    explicit ParameterSet(const Vector& values) : values_(values) { validate(); }

    /// Rebuilds a set from a flat decision vector (the optimizer's view).
    static ParameterSet unflatten(std::span<const double> flat)
    {
        if (flat.size() != kNumParams) {
            throw InputError("parameter vector must have 40 entries, got " +
                             std::to_string(flat.size()));
        }
        Vector v{};
        std::copy(flat.begin(), flat.end(), v.begin());
        return ParameterSet(v);
    }

    std::vector<double> flatten() const { return {values_.begin(), values_.end()}; }

    double operator[](Param p) const { return values_[index_of(p)]; }
    double& operator[](Param p) { return values_[index_of(p)]; }
    double at(std::size_t i) const { return values_.at(i); }

    const Vector& values() const { return values_; }

    bool all_finite() const
    {
        return std::all_of(values_.begin(), values_.end(),
                           [](double x) { return std::isfinite(x); });
    }

    void validate() const
    {
        for (std::size_t i = 0; i < kNumParams; ++i) {
            if (!std::isfinite(values_[i])) {
                throw InputError("parameter " + std::string(kParamNames[i]) + " is not finite");
            }
        }
    }

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

private:
    Vector values_;
};

/// Hover derivatives identified on the TREX 550 flight data. Used as the
/// ground truth for synthetic experiments and to size the search bounds.
inline ParameterSet table2_parameters()
{
    return ParameterSet(ParameterSet::Vector{
        -0.32066, 40.21598, -0.93658, -16.1151,
        -0.00121, -0.47665, 133.6111, 0.0,
        0.1, -0.09822, 104.9063, 0.0,
        0.093851, -0.19213, 0.061597, 0.083523, 0.984168,
        8.166105, 1.028478, 0.045724, -1.39101,
        0.009652, -8.23373, 0.0, -8.69927, 42.69381,
        2.350899, -14.5913, 0.134939,
        0.0, 0.0,
        -0.09993, 0.701979, -0.07779, -0.09942,
        -6.05944, -27.4672, -3.22316, -0.09815, 0.793573,
    });
}

/// Derivatives that only matter in forward flight and are zero at hover.
inline constexpr std::array<Param, 5> kForwardFlightParams = {
    Param::L_w, Param::M_w, Param::N_w, Param::Y_ped, Param::M_col,
};

}  // namespace heliid
