#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/model.hpp"
#include "heliid/time_series.hpp"

namespace heliid {

struct Pulse {
    int sign;        // +1 or -1
    double seconds;  // > 0
};

/// Piecewise-constant stick excitation on one control axis.
struct ExcitationSpec {
    Input axis = Input::delta_lat;
    double amplitude = 0.1;
    std::vector<Pulse> durations = {{+1, 3.0}, {-1, 2.0}, {+1, 1.0}, {-1, 1.0}};
    double lead_in = 0.0;
    double tail = 0.0;

    void validate() const
    {
        if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw InputError("amplitude must be non-negative");
        if (durations.empty()) throw InputError("excitation needs at least one pulse");
        for (const auto& p : durations) {
            if (p.sign != 1 && p.sign != -1) throw InputError("pulse sign must be +1 or -1");
            if (!(p.seconds > 0.0)) throw InputError("pulse duration must be positive");
        }
        if (!(lead_in >= 0.0) || !(tail >= 0.0)) throw InputError("lead-in and tail must be non-negative");
    }
};

inline std::size_t samples_for(double seconds, double rate_hz)
{
    return static_cast<std::size_t>(std::llround(seconds * rate_hz));
}

/// Sample values of the excited axis alone (lead-in, pulses, tail).
inline std::vector<double> excitation_signal(const ExcitationSpec& spec, double sample_rate_hz)
{
    spec.validate();
    if (!(sample_rate_hz > 0.0)) throw InputError("sample rate must be positive");
    std::vector<double> x(samples_for(spec.lead_in, sample_rate_hz), 0.0);
    for (const auto& p : spec.durations) {
        x.insert(x.end(), samples_for(p.seconds, sample_rate_hz), p.sign * spec.amplitude);
    }
    x.insert(x.end(), samples_for(spec.tail, sample_rate_hz), 0.0);
    return x;
}

/// Four control channels; the chosen axis carries the pulse train, the
/// others stay at zero.
inline TimeSeriesLog generate_3211(const ExcitationSpec& spec, double sample_rate_hz)
{
    auto signal = excitation_signal(spec, sample_rate_hz);
    const std::size_t n = signal.size();
    TimeSeriesLog log(sample_rate_hz);
    for (std::size_t j = 0; j < kNumInputs; ++j) {
        if (j == idx(spec.axis)) {
            log.add_channel(std::string(kInputNames[j]), signal);
        } else {
            log.add_channel(std::string(kInputNames[j]), std::vector<double>(n, 0.0));
        }
    }
    return log;
}

/// Contiguous prefix/suffix split; the prefix holds round(fraction * n)
/// samples. Each side must keep at least two samples.
inline std::pair<TimeSeriesLog, TimeSeriesLog> split_train_validate(const TimeSeriesLog& log, double fraction)
{
    if (log.size() < 4) throw InputError("log must have at least 4 samples to split");
    if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("split fraction must lie in (0, 1)");
    const auto head = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(log.size())));
    if (head < 2 || log.size() - head < 2) {
        throw InputError("split fraction leaves fewer than 2 samples on one side");
    }
    return {log.slice(0, head), log.slice(head, log.size() - head)};
}

/// Appends `tail` after `head`; both must share rate and channel layout.
inline TimeSeriesLog concatenate(const TimeSeriesLog& head, const TimeSeriesLog& tail)
{
    if (head.sample_rate_hz() != tail.sample_rate_hz() || head.channel_names() != tail.channel_names() ||
        head.mask() != tail.mask()) {
        throw InputError("logs differ in rate or channel layout");
    }
    TimeSeriesLog out(head.sample_rate_hz(), head.start_time());
    for (const auto& name : head.channel_names()) {
        auto a = head.channel(name);
        auto b = tail.channel(name);
        std::vector<double> v(a.begin(), a.end());
        v.insert(v.end(), b.begin(), b.end());
        out.add_channel(name, std::move(v), head.is_measured(name));
    }
    return out;
}

}  // namespace heliid
