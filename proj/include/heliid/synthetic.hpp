#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/excitation.hpp"
#include "heliid/model.hpp"
#include "heliid/parameters.hpp"
#include "heliid/rng.hpp"
#include "heliid/time_series.hpp"

namespace heliid {

/// Desk-scale stand-in for a flight test: alternating lateral and
/// longitudinal 3-2-1-1 inputs, simulated through a known model, with white
/// measurement noise sized per channel.
struct SyntheticSpec {
    double duration_s = 30.0;
    double sample_rate_hz = 100.0;
    double amplitude = 0.1;
    /// First pulse train starts here; the next axis follows every `period_s`.
    double first_start_s = 0.5;
    double period_s = 7.5;
    std::vector<Input> axes = {Input::delta_lat, Input::delta_lon};
    /// Noise standard deviation as a fraction of each channel's clean RMS.
    double noise_fraction = 0.01;
    std::uint64_t seed = 1;
    /// Record r_fb, c and d as well (all 13 states measured).
    bool full_state = false;
    ModelOptions model;
};

/// Control channels only: pulse trains cycle through `axes` until the
/// record ends; a train that would overrun the end is dropped.
inline TimeSeriesLog synthetic_inputs(const SyntheticSpec& spec)
{
    if (!(spec.duration_s > 0.0)) throw InputError("duration must be positive");
    if (!(spec.sample_rate_hz > 0.0)) throw InputError("sample rate must be positive");
    if (!(spec.period_s > 0.0) || !(spec.first_start_s >= 0.0)) throw InputError("bad excitation schedule");
    if (spec.axes.empty()) throw InputError("no excitation axes");

    const std::size_t n = samples_for(spec.duration_s, spec.sample_rate_hz);
    if (n < 2) throw InputError("record too short");
    std::vector<std::vector<double>> ch(kNumInputs, std::vector<double>(n, 0.0));

    ExcitationSpec pulse;
    pulse.amplitude = spec.amplitude;
    const auto train = excitation_signal(pulse, spec.sample_rate_hz);
    for (std::size_t i = 0;; ++i) {
        const std::size_t start = samples_for(spec.first_start_s + static_cast<double>(i) * spec.period_s,
                                              spec.sample_rate_hz);
        if (start + train.size() > n) break;
        auto& target = ch[idx(spec.axes[i % spec.axes.size()])];
        for (std::size_t k = 0; k < train.size(); ++k) target[start + k] = train[k];
    }

    TimeSeriesLog log(spec.sample_rate_hz);
    for (std::size_t j = 0; j < kNumInputs; ++j) log.add_channel(std::string(kInputNames[j]), std::move(ch[j]));
    return log;
}

/// Simulates `truth` from rest under `inputs` and adds measurement noise.
/// The returned log holds the recorded states followed by the controls.
inline TimeSeriesLog synthesize(const ParameterSet& truth, const TimeSeriesLog& inputs, const SyntheticSpec& spec)
{
    const auto mats = build_matrices(truth, spec.model);
    const auto sim = simulate(mats, StateVector::Zero(), inputs);
    if (sim.divergent) {
        throw DataError("truth model diverges within the record (state magnitude above " +
                        std::to_string(kDivergenceBound) + ")");
    }
    if (!(spec.noise_fraction >= 0.0)) throw InputError("noise fraction must be non-negative");

    Rng rng = Rng::stream(spec.seed, 0);
    TimeSeriesLog log(inputs.sample_rate_hz(), inputs.start_time());
    for (std::size_t s = 0; s < kNumStates; ++s) {
        const auto state = static_cast<State>(s);
        const bool measurable = spec.full_state ||
                                std::find(kMeasurableStates.begin(), kMeasurableStates.end(), state) !=
                                    kMeasurableStates.end();
        if (!measurable) continue;
        const std::string name(kStateNames[s]);
        auto clean = sim.log.channel(name);
        double sum_sq = 0.0;
        for (double x : clean) sum_sq += x * x;
        const double sigma = spec.noise_fraction * std::sqrt(sum_sq / static_cast<double>(clean.size()));
        std::vector<double> noisy(clean.begin(), clean.end());
        if (sigma > 0.0) {
            for (double& x : noisy) x += rng.normal(0.0, sigma);
        }
        log.add_channel(name, std::move(noisy));
    }
    for (const auto& name : inputs.channel_names()) {
        auto ch = inputs.channel(name);
        log.add_channel(name, {ch.begin(), ch.end()});
    }
    return log;
}

inline TimeSeriesLog synthesize(const ParameterSet& truth, const SyntheticSpec& spec)
{
    return synthesize(truth, synthetic_inputs(spec), spec);
}

}  // namespace heliid
