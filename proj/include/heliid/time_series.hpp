#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "heliid/error.hpp"

namespace heliid {

/// Uniformly sampled multi-channel record. Channels keep insertion order;
/// the mask names the channels that were actually measured.
class TimeSeriesLog {
public:
    TimeSeriesLog() = default;

    explicit TimeSeriesLog(double sample_rate_hz, double start_time = 0.0)
        : sample_rate_hz_(sample_rate_hz), start_time_(start_time)
    {
        if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
            throw InputError("sample rate must be positive and finite");
        }
    }

    double sample_rate_hz() const { return sample_rate_hz_; }
    double dt() const { return 1.0 / sample_rate_hz_; }
    double start_time() const { return start_time_; }
    double time(std::size_t k) const { return start_time_ + static_cast<double>(k) / sample_rate_hz_; }

    /// Number of samples per channel (0 when there are no channels).
    std::size_t size() const { return values_.empty() ? 0 : values_.front().size(); }
    std::size_t channel_count() const { return names_.size(); }

    void add_channel(std::string name, std::vector<double> values, bool measured = true)
    {
        if (has(name)) throw InputError("duplicate channel '" + name + "'");
        if (!values_.empty() && values.size() != size()) {
            throw InputError("channel '" + name + "' has " + std::to_string(values.size()) +
                             " samples, expected " + std::to_string(size()));
        }
        if (measured) mask_.insert(name);
        names_.push_back(std::move(name));
        values_.push_back(std::move(values));
    }

    bool has(const std::string& name) const
    {
        return std::find(names_.begin(), names_.end(), name) != names_.end();
    }

    std::span<const double> channel(const std::string& name) const { return values_[slot(name)]; }
    std::vector<double>& channel_mut(const std::string& name) { return values_[slot(name)]; }

    const std::vector<std::string>& channel_names() const { return names_; }
    const std::set<std::string>& mask() const { return mask_; }
    bool is_measured(const std::string& name) const { return mask_.count(name) > 0; }

    void set_measured(const std::string& name, bool measured)
    {
        slot(name);
        if (measured) {
            mask_.insert(name);
        } else {
            mask_.erase(name);
        }
    }

    /// Copy of samples [first, first + count), time origin shifted to match.
    TimeSeriesLog slice(std::size_t first, std::size_t count) const
    {
        if (first + count > size()) throw InputError("slice exceeds log length");
        TimeSeriesLog out(sample_rate_hz_, time(first));
        for (std::size_t c = 0; c < names_.size(); ++c) {
            const auto& v = values_[c];
            out.add_channel(names_[c],
                            std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(first),
                                                v.begin() + static_cast<std::ptrdiff_t>(first + count)),
                            is_measured(names_[c]));
        }
        return out;
    }

    /// Checks the log-level invariants: at least two samples, equal channel
    /// lengths, mask drawn from the channel set.
    void validate() const
    {
        if (names_.empty()) throw DataError("log has no channels");
        if (size() < 2) throw DataError("log needs at least 2 samples");
        for (std::size_t c = 0; c < names_.size(); ++c) {
            if (values_[c].size() != size()) throw DataError("ragged channel '" + names_[c] + "'");
        }
        for (const auto& m : mask_) {
            if (!has(m)) throw DataError("mask names unknown channel '" + m + "'");
        }
    }

    friend bool operator==(const TimeSeriesLog&, const TimeSeriesLog&) = default;

private:
    std::size_t slot(const std::string& name) const
    {
        auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) throw DataError("no channel named '" + name + "'");
        return static_cast<std::size_t>(it - names_.begin());
    }

    double sample_rate_hz_ = 1.0;
    double start_time_ = 0.0;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> values_;
    std::set<std::string> mask_;
};

}  // namespace heliid
