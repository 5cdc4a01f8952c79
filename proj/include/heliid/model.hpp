#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "heliid/error.hpp"
#include "heliid/parameters.hpp"
#include "heliid/time_series.hpp"

namespace heliid {

inline constexpr std::size_t kNumStates = 13;
inline constexpr std::size_t kNumInputs = 4;

/// Gravity, m/s^2. A fixed model constant, never identified.
inline constexpr double kGravity = 9.81;

/// Any state magnitude above this ends a simulation as divergent.
inline constexpr double kDivergenceBound = 1e6;

enum class State : std::size_t { u, v, p, q, phi, theta, a, b, w, r, r_fb, c, d };
enum class Input : std::size_t { delta_lat, delta_lon, delta_ped, delta_col };

inline constexpr std::array<std::string_view, kNumStates> kStateNames = {
    "u", "v", "p", "q", "phi", "theta", "a", "b", "w", "r", "r_fb", "c", "d",
};
inline constexpr std::array<std::string_view, kNumInputs> kInputNames = {
    "delta_lat", "delta_lon", "delta_ped", "delta_col",
};

/// States the onboard sensors record; r_fb, c and d are internal.
inline constexpr std::array<State, 10> kMeasurableStates = {
    State::u, State::v, State::p, State::q, State::phi,
    State::theta, State::a, State::b, State::w, State::r,
};

inline constexpr std::size_t idx(State s) { return static_cast<std::size_t>(s); }
inline constexpr std::size_t idx(Input i) { return static_cast<std::size_t>(i); }

inline std::string state_name(State s) { return std::string(kStateNames[idx(s)]); }

inline std::optional<State> state_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kNumStates; ++i) {
        if (kStateNames[i] == name) return static_cast<State>(i);
    }
    return std::nullopt;
}

using StateVector = Eigen::Matrix<double, kNumStates, 1>;
using ControlInput = Eigen::Matrix<double, kNumInputs, 1>;
using StateMatrix = Eigen::Matrix<double, kNumStates, kNumStates>;
using InputMatrix = Eigen::Matrix<double, kNumStates, kNumInputs>;

struct ModelOptions {
    /// The flap rows as printed carry +1 on the a-a diagonal and -1 on b-b.
    /// When set, both diagonals are -1.
    bool flap_sign_symmetric = false;
};

struct SystemMatrices {
    StateMatrix A = StateMatrix::Zero();
    InputMatrix B = InputMatrix::Zero();
};

/// Realizes the hover state-space model x' = A x + B u from the 40
/// derivatives. Cells not listed here are structural zeros.
inline SystemMatrices build_matrices(const ParameterSet& params, const ModelOptions& opts = {})
{
    params.validate();
    using P = Param;
    using S = State;
    using I = Input;

    SystemMatrices m;
    auto A = [&m](S row, S col) -> double& { return m.A(idx(row), idx(col)); };
    auto B = [&m](S row, I col) -> double& { return m.B(idx(row), idx(col)); };

    A(S::u, S::u) = params[P::X_u];
    A(S::u, S::theta) = -kGravity;
    A(S::u, S::a) = params[P::X_a];

    A(S::v, S::v) = params[P::Y_v];
    A(S::v, S::phi) = kGravity;
    A(S::v, S::b) = params[P::Y_b];

    A(S::p, S::u) = params[P::L_u];
    A(S::p, S::v) = params[P::L_v];
    A(S::p, S::b) = params[P::L_b];
    A(S::p, S::w) = params[P::L_w];

    A(S::q, S::u) = params[P::M_u];
    A(S::q, S::v) = params[P::M_v];
    A(S::q, S::a) = params[P::M_a];
    A(S::q, S::w) = params[P::M_w];

    A(S::phi, S::p) = 1.0;
    A(S::theta, S::q) = 1.0;

    A(S::a, S::q) = -params[P::tau_f];
    A(S::a, S::a) = opts.flap_sign_symmetric ? -1.0 : 1.0;
    A(S::a, S::b) = params[P::A_b];
    A(S::a, S::c) = params[P::A_c];

    A(S::b, S::p) = -params[P::tau_f];
    A(S::b, S::a) = params[P::B_a];
    A(S::b, S::b) = -1.0;
    A(S::b, S::d) = params[P::B_d];

    A(S::w, S::a) = params[P::Z_a];
    A(S::w, S::b) = params[P::Z_b];
    A(S::w, S::w) = params[P::Z_w];
    A(S::w, S::r) = params[P::Z_r];

    A(S::r, S::v) = params[P::N_v];
    A(S::r, S::p) = params[P::N_p];
    A(S::r, S::w) = params[P::N_w];
    A(S::r, S::r) = params[P::N_r];
    A(S::r, S::r_fb) = params[P::N_rfb];

    A(S::r_fb, S::r) = params[P::K_r];
    A(S::r_fb, S::r_fb) = params[P::K_rfb];

    A(S::c, S::q) = -params[P::tau_s];
    A(S::c, S::c) = -1.0;

    A(S::d, S::p) = -params[P::tau_s];
    A(S::d, S::d) = -1.0;

    B(S::v, I::delta_ped) = params[P::Y_ped];
    B(S::q, I::delta_col) = params[P::M_col];
    B(S::a, I::delta_lat) = params[P::A_lat];
    B(S::a, I::delta_lon) = params[P::A_lon];
    B(S::b, I::delta_lat) = params[P::B_lat];
    B(S::b, I::delta_lon) = params[P::B_lon];
    B(S::w, I::delta_col) = params[P::Z_col];
    B(S::r, I::delta_ped) = params[P::N_ped];
    B(S::r, I::delta_col) = params[P::N_col];
    B(S::c, I::delta_lon) = params[P::C_lon];
    B(S::d, I::delta_lat) = params[P::D_lat];

    return m;
}

/// x' = A x + B u.
inline StateVector derivative(const SystemMatrices& m, const StateVector& x, const ControlInput& u)
{
    return m.A * x + m.B * u;
}

/// One classical Runge-Kutta step with the input held over the interval.
inline StateVector rk4_step(const SystemMatrices& m, const StateVector& x, const ControlInput& u, double h)
{
    const StateVector k1 = derivative(m, x, u);
    const StateVector k2 = derivative(m, x + 0.5 * h * k1, u);
    const StateVector k3 = derivative(m, x + 0.5 * h * k2, u);
    const StateVector k4 = derivative(m, x + h * k3, u);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// For a linear time-invariant system with a held input, one RK4 step
/// collapses to x+ = Phi x + Gamma u with
///   Phi   = I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24
///   Gamma = h (I + hA/2 + (hA)^2/6 + (hA)^3/24) B.
/// Building it once per model makes long simulations a pair of mat-vecs
/// per sample.
struct Rk4Propagator {
    StateMatrix phi;
    InputMatrix gamma;

    Rk4Propagator(const SystemMatrices& m, double h)
    {
        const StateMatrix hA = h * m.A;
        const StateMatrix hA2 = hA * hA;
        const StateMatrix hA3 = hA2 * hA;
        const StateMatrix I = StateMatrix::Identity();
        phi = I + hA + hA2 / 2.0 + hA3 / 6.0 + hA3 * hA / 24.0;
        gamma = h * (I + hA / 2.0 + hA2 / 6.0 + hA3 / 24.0) * m.B;
    }

    StateVector step(const StateVector& x, const ControlInput& u) const { return phi * x + gamma * u; }
};

inline bool diverged(const StateVector& x)
{
    return !x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound;
}

/// State history sampled at the input timestamps. When a sample trips the
/// divergence guard, integration stops and `states` holds only the samples
/// before it.
struct Trajectory {
    std::vector<StateVector> states;
    bool divergent = false;
};

/// Fixed-step RK4 from x0 with zero-order-hold inputs; states[k] pairs with
/// inputs[k].
inline Trajectory simulate(const SystemMatrices& m, const StateVector& x0,
                           std::span<const ControlInput> inputs, double dt)
{
    if (!(dt > 0.0)) throw InputError("dt must be positive");
    if (!x0.allFinite()) throw InputError("initial state must be finite");

    Trajectory out;
    if (inputs.empty()) return out;
    out.states.reserve(inputs.size());
    if (diverged(x0)) {
        out.divergent = true;
        return out;
    }
    const Rk4Propagator prop(m, dt);
    StateVector x = x0;
    out.states.push_back(x);
    for (std::size_t k = 0; k + 1 < inputs.size(); ++k) {
        x = prop.step(x, inputs[k]);
        if (diverged(x)) {
            out.divergent = true;
            break;
        }
        out.states.push_back(x);
    }
    return out;
}

/// Pulls the four control channels out of a log; absent channels read as 0.
inline std::vector<ControlInput> control_inputs(const TimeSeriesLog& log)
{
    std::vector<ControlInput> u(log.size(), ControlInput::Zero());
    for (std::size_t j = 0; j < kNumInputs; ++j) {
        const std::string name(kInputNames[j]);
        if (!log.has(name)) continue;
        auto ch = log.channel(name);
        for (std::size_t k = 0; k < ch.size(); ++k) u[k](static_cast<Eigen::Index>(j)) = ch[k];
    }
    return u;
}

inline bool has_all_controls(const TimeSeriesLog& log)
{
    for (auto name : kInputNames) {
        if (!log.has(std::string(name))) return false;
    }
    return true;
}

struct SimulatedLog {
    TimeSeriesLog log;
    bool divergent = false;
};

/// Log-level simulation: drives the model with the log's control channels
/// and returns the 13 state channels on the same time grid (truncated if the
/// run diverges).
inline SimulatedLog simulate(const SystemMatrices& m, const StateVector& x0, const TimeSeriesLog& inputs)
{
    const auto u = control_inputs(inputs);
    const Trajectory traj = simulate(m, x0, u, inputs.dt());
    SimulatedLog out{TimeSeriesLog(inputs.sample_rate_hz(), inputs.start_time()), traj.divergent};
    for (std::size_t s = 0; s < kNumStates; ++s) {
        std::vector<double> ch(traj.states.size());
        for (std::size_t k = 0; k < ch.size(); ++k) ch[k] = traj.states[k](static_cast<Eigen::Index>(s));
        out.log.add_channel(std::string(kStateNames[s]), std::move(ch));
    }
    return out;
}

/// First measured sample for channels present in the log, zero otherwise.
inline StateVector initial_state_from(const TimeSeriesLog& log)
{
    StateVector x0 = StateVector::Zero();
    if (log.size() == 0) return x0;
    for (std::size_t s = 0; s < kNumStates; ++s) {
        const std::string name(kStateNames[s]);
        if (log.has(name) && log.is_measured(name)) x0(static_cast<Eigen::Index>(s)) = log.channel(name)[0];
    }
    return x0;
}

}  // namespace heliid
