#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace occ {

/// Parameters of the uniform occupancy model: n balls dropped uniformly
/// into m urns, counting urns that end up with exactly d balls.
struct OccupancyParams {
    long long n = 0;  // balls
    long long m = 2;  // urns, m >= 2
    int d = 2;        // target occupancy, d >= 0

    // p = 1/(m-1) is the per-urn probability used when redistributing
    // balls over the m-1 urns other than the selected one.
    double p() const { return 1.0 / static_cast<double>(m - 1); }
    double q() const { return 1.0 - p(); }

    double ratio() const { return static_cast<double>(n) / static_cast<double>(m); }

    void validate() const {
        if (d < 0) throw std::domain_error("occupancy d must be nonnegative");
        if (m < 2) throw std::domain_error("need at least m=2 urns");
        if (n < d) throw std::domain_error("need n >= d balls");
    }
};

}  // namespace occ
