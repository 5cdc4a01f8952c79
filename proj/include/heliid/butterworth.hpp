#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/time_series.hpp"

namespace heliid {

/// Digital Butterworth low-pass built from the analog prototype with the
/// bilinear transform. The cutoff is prewarped, so the single-pass gain at
/// `cutoff_hz` is exactly -3 dB. Realized as a cascade of second-order
/// sections (plus one first-order section for odd orders) in transposed
/// direct form II.
class ButterworthLowPass {
public:
    struct Section {
        double b0, b1, b2;
        double a1, a2;  // a0 normalized to 1
    };

    ButterworthLowPass(double cutoff_hz, double sample_rate_hz, int order = 2)
    {
        if (!(sample_rate_hz > 0.0)) throw InputError("sample rate must be positive");
        if (!(cutoff_hz > 0.0) || !(cutoff_hz < 0.5 * sample_rate_hz)) {
            throw InputError("cutoff must lie strictly between 0 and the Nyquist frequency");
        }
        if (order < 1 || order > 16) throw InputError("filter order must be in [1, 16]");

        const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
        const double k2 = k * k;
        for (int i = 0; i < order / 2; ++i) {
            const double damping = 2.0 * std::sin((2.0 * i + 1.0) * std::numbers::pi / (2.0 * order));
            const double norm = 1.0 / (1.0 + damping * k + k2);
            const double b0 = k2 * norm;
            sections_.push_back({b0, 2.0 * b0, b0, 2.0 * (k2 - 1.0) * norm, (1.0 - damping * k + k2) * norm});
        }
        if (order % 2 == 1) {
            const double b0 = k / (1.0 + k);
            sections_.push_back({b0, b0, 0.0, (k - 1.0) / (k + 1.0), 0.0});
        }
        order_ = order;
    }

    int order() const { return order_; }
    const std::vector<Section>& sections() const { return sections_; }

    /// Causal single pass. With `settle` the section states start at the
    /// steady state for a constant input equal to the first sample.
    std::vector<double> apply_forward(std::span<const double> x, bool settle = true) const
    {
        std::vector<double> y(x.begin(), x.end());
        if (y.empty()) return y;
        for (const auto& s : sections_) {
            double z1 = 0.0;
            double z2 = 0.0;
            if (settle) {
                z1 = (1.0 - s.b0) * y.front();
                z2 = (s.b2 - s.a2) * y.front();
            }
            for (double& v : y) {
                const double in = v;
                const double out = s.b0 * in + z1;
                z1 = s.b1 * in - s.a1 * out + z2;
                z2 = s.b2 * in - s.a2 * out;
                v = out;
            }
        }
        return y;
    }

    /// Forward-backward pass with odd-reflection padding at both ends; the
    /// result has zero phase and twice the single-pass attenuation in dB.
    std::vector<double> apply_zero_phase(std::span<const double> x) const
    {
        const std::size_t n = x.size();
        if (n < 2) return {x.begin(), x.end()};
        const std::size_t pad = std::min<std::size_t>(3 * static_cast<std::size_t>(order_ + 1), n - 1);

        std::vector<double> ext;
        ext.reserve(n + 2 * pad);
        for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
        ext.insert(ext.end(), x.begin(), x.end());
        for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

        auto fwd = apply_forward(ext);
        std::reverse(fwd.begin(), fwd.end());
        auto bwd = apply_forward(fwd);
        std::reverse(bwd.begin(), bwd.end());
        return {bwd.begin() + static_cast<std::ptrdiff_t>(pad), bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
    }

private:
    std::vector<Section> sections_;
    int order_ = 0;
};

/// Zero-phase low-pass of every measured channel. Unmeasured channels pass
/// through untouched.
inline TimeSeriesLog butterworth_filter(const TimeSeriesLog& log, double cutoff_hz, int order = 2)
{
    const ButterworthLowPass filter(cutoff_hz, log.sample_rate_hz(), order);
    TimeSeriesLog out = log;
    for (const auto& name : log.channel_names()) {
        if (!log.is_measured(name)) continue;
        out.channel_mut(name) = filter.apply_zero_phase(log.channel(name));
    }
    return out;
}

}  // namespace heliid
