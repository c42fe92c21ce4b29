#pragma once

#include <optional>
#include <vector>

#include "slicesim/common/time.hpp"
#include "slicesim/control/registry.hpp"
#include "slicesim/control/stats.hpp"

namespace slicesim::control {

/// Utilization-watermark policy that moves share from idle slices to busy ones.
struct AutoscalePolicy {
    bool enabled = false;
    double high_watermark = 0.9;
    double low_watermark = 0.5;
    double step = 0.05;
    double min_share = 0.02;
    SimTime evaluation_period = std::chrono::seconds(1);
    SimTime cooldown = std::chrono::seconds(5);

    /// Throws ConfigError.
    void validate() const;
};

/// One evaluation over `stats` (already aggregated over the evaluation
/// period). A slice is busy when its utilization in either direction exceeds
/// the high watermark and idle when both directions sit below the low one.
/// The busiest slice takes `step` from the idlest slice whose shares stay at
/// or above min_share; ties go to settlement order. Returns the two Update
/// commands, or nothing.
std::vector<SliceCommand> autoscale_step(const AutoscalePolicy& policy, const StatsReport& stats,
                                         const SliceRegistry& registry);

/// Feeds stats-period reports into autoscale_step once per evaluation period
/// and enforces the cooldown between shifts.
class Autoscaler {
public:
    explicit Autoscaler(AutoscalePolicy policy = {}) : policy_(policy) {}

    const AutoscalePolicy& policy() const { return policy_; }
    void set_policy(const AutoscalePolicy& p);

    /// `report` covers the stats period ending now.
    std::vector<SliceCommand> on_report(const StatsReport& report, const SliceRegistry& registry);

    std::optional<double> last_shift() const { return last_shift_; }

private:
    AutoscalePolicy policy_;
    std::vector<StatsReport> pending_;
    std::optional<double> last_shift_;
};

}  // namespace slicesim::control
