#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "heliid/error.hpp"
#include "heliid/parameters.hpp"
#include "heliid/rng.hpp"

namespace heliid {

/// Box bounds on a decision vector. Frozen coordinates are pinned to zero
/// (lower = upper = 0) and never move.
class SearchSpace {
public:
    SearchSpace(std::vector<double> lower, std::vector<double> upper, std::vector<bool> frozen = {})
        : lower_(std::move(lower)), upper_(std::move(upper)), frozen_(std::move(frozen))
    {
        if (lower_.size() != upper_.size() || lower_.empty()) throw InputError("bounds must be non-empty and match");
        if (frozen_.empty()) frozen_.assign(lower_.size(), false);
        if (frozen_.size() != lower_.size()) throw InputError("frozen mask has wrong length");
        for (std::size_t d = 0; d < lower_.size(); ++d) {
            if (!std::isfinite(lower_[d]) || !std::isfinite(upper_[d]) || lower_[d] > upper_[d]) {
                throw InputError("bounds must be finite with lower <= upper");
            }
            if (frozen_[d]) {
                lower_[d] = 0.0;
                upper_[d] = 0.0;
            }
        }
    }

    /// Same symmetric box [-half_width, half_width] in every dimension.
    static SearchSpace cube(std::size_t dims, double half_width)
    {
        return SearchSpace(std::vector<double>(dims, -half_width), std::vector<double>(dims, half_width));
    }

    std::size_t dims() const { return lower_.size(); }
    double lower(std::size_t d) const { return lower_[d]; }
    double upper(std::size_t d) const { return upper_[d]; }
    double range(std::size_t d) const { return upper_[d] - lower_[d]; }
    bool frozen(std::size_t d) const { return frozen_[d]; }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }

    std::vector<std::size_t> free_dims() const
    {
        std::vector<std::size_t> out;
        for (std::size_t d = 0; d < dims(); ++d) {
            if (!frozen_[d]) out.push_back(d);
        }
        return out;
    }

    std::vector<double> midpoint() const
    {
        std::vector<double> m(dims());
        for (std::size_t d = 0; d < dims(); ++d) m[d] = frozen_[d] ? 0.0 : 0.5 * (lower_[d] + upper_[d]);
        return m;
    }

    void clamp(std::span<double> x) const
    {
        for (std::size_t d = 0; d < dims(); ++d) {
            x[d] = frozen_[d] ? 0.0 : std::clamp(x[d], lower_[d], upper_[d]);
        }
    }

    bool contains(std::span<const double> x) const
    {
        if (x.size() != dims()) return false;
        for (std::size_t d = 0; d < dims(); ++d) {
            if (!(x[d] >= lower_[d] && x[d] <= upper_[d])) return false;
            if (frozen_[d] && x[d] != 0.0) return false;
        }
        return true;
    }

    std::vector<double> sample_uniform(Rng& rng) const
    {
        std::vector<double> x(dims());
        for (std::size_t d = 0; d < dims(); ++d) x[d] = frozen_[d] ? 0.0 : rng.uniform(lower_[d], upper_[d]);
        return x;
    }

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<bool> frozen_;
};

struct HelicopterBoundsOptions {
    /// Half-width as a multiple of each reference magnitude.
    double magnitude_factor = 3.0;
    double min_half_width = 1.0;
    /// Let the forward-flight derivatives (zero at hover) move.
    bool free_forward_flight = false;
};

/// Symmetric per-parameter box [-h, h] with h = max(3 |reference|, 1).
/// Forward-flight derivatives are frozen at zero unless freed.
inline SearchSpace helicopter_search_space(const ParameterSet& reference = table2_parameters(),
                                           const HelicopterBoundsOptions& opts = {})
{
    std::vector<double> lo(kNumParams);
    std::vector<double> hi(kNumParams);
    std::vector<bool> frozen(kNumParams, false);
    for (std::size_t i = 0; i < kNumParams; ++i) {
        const double h = std::max(opts.magnitude_factor * std::abs(reference.at(i)), opts.min_half_width);
        lo[i] = -h;
        hi[i] = h;
    }
    if (!opts.free_forward_flight) {
        for (Param p : kForwardFlightParams) frozen[index_of(p)] = true;
    }
    return SearchSpace(std::move(lo), std::move(hi), std::move(frozen));
}

}  // namespace heliid
