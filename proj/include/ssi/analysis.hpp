/*
 * Copyright 2026 The SSI Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#ifndef SSI_ANALYSIS_HPP
#define SSI_ANALYSIS_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>

#include "errors.hpp"

namespace ssi {

/// Online summary of a scalar series v(t): mean, band width and the
/// least-squares slope of v against t. Band width is max - min, which is the
/// same before and after subtracting the mean.
class SeriesStats {
public:
    void add(double t, double v) {
        ++n_;
        const double dt = t - mean_t_;
        mean_t_ += dt / static_cast<double>(n_);
        const double dv = v - mean_v_;
        mean_v_ += dv / static_cast<double>(n_);
        // Welford-style co-moments.
        sxx_ += dt * (t - mean_t_);
        sxv_ += dt * (v - mean_v_);
        svv_ += dv * (v - mean_v_);
        min_ = std::min(min_, v);
        max_ = std::max(max_, v);
    }

    std::size_t count() const noexcept { return n_; }
    double mean() const { require(); return mean_v_; }
    double band() const { require(); return max_ - min_; }
    double min() const { require(); return min_; }
    double max() const { require(); return max_; }
    double variance() const { require(); return svv_ / static_cast<double>(n_); }
    /// Zero when the series has a single point or constant time.
    double slope() const {
        require();
        return sxx_ > 0.0 ? sxv_ / sxx_ : 0.0;
    }

private:
    void require() const {
        if (n_ == 0) throw DomainError("SeriesStats: empty series");
    }

    std::size_t n_ = 0;
    double mean_t_ = 0.0, mean_v_ = 0.0;
    double sxx_ = 0.0, sxv_ = 0.0, svv_ = 0.0;
    double min_ = std::numeric_limits<double>::infinity();
    double max_ = -std::numeric_limits<double>::infinity();
};

inline SeriesStats series_stats(std::span<const double> t, std::span<const double> v) {
    if (t.size() != v.size()) throw ContractViolation("series_stats: length mismatch");
    if (v.empty()) throw DomainError("series_stats: empty series");
    SeriesStats s;
    for (std::size_t i = 0; i < v.size(); ++i) s.add(t[i], v[i]);
    return s;
}

} // namespace ssi

#endif // SSI_ANALYSIS_HPP
