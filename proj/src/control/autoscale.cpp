#include "slicesim/control/autoscale.hpp"

#include <algorithm>

#include "slicesim/common/error.hpp"

namespace slicesim::control {

void AutoscalePolicy::validate() const {
    if (!(low_watermark >= 0.0 && low_watermark < high_watermark && high_watermark <= 1.0)) {
        throw ConfigError("autoscale watermarks must satisfy 0 <= low < high <= 1");
    }
    if (!(step > 0.0 && step <= 1.0)) throw ConfigError("autoscale step must lie in (0, 1]");
    if (!(min_share >= 0.0 && min_share <= 1.0)) throw ConfigError("autoscale min_share must lie in [0, 1]");
    if (evaluation_period <= SimTime{}) throw ConfigError("autoscale evaluation_period must be positive");
    if (cooldown < SimTime{}) throw ConfigError("autoscale cooldown must not be negative");
}

namespace {

double busy_level(const SliceStats* s) {
    if (!s) return 0.0;
    return std::max(s->utilization(Direction::Downlink), s->utilization(Direction::Uplink));
}

}  // namespace

std::vector<SliceCommand> autoscale_step(const AutoscalePolicy& policy, const StatsReport& stats,
                                         const SliceRegistry& registry) {
    if (!policy.enabled || !registry.slicing_enabled()) return {};
    const auto step = radio::Share::from_fraction(policy.step);
    const auto floor = radio::Share::from_fraction(policy.min_share);
    const auto order = radio::settlement_order(registry.slices());

    const SliceDescriptor* recipient = nullptr;
    double recipient_level = policy.high_watermark;
    for (const auto* s : order) {
        const double level = busy_level(stats.slice(s->slice_id));
        if (level > recipient_level) {
            recipient = s;
            recipient_level = level;
        }
    }
    if (!recipient) return {};

    const SliceDescriptor* donor = nullptr;
    double donor_level = policy.low_watermark;
    for (const auto* s : order) {
        if (s == recipient) continue;
        const double level = busy_level(stats.slice(s->slice_id));
        if (level >= donor_level) continue;
        if (s->dl_share - step < floor || s->ul_share - step < floor) continue;
        donor = s;
        donor_level = level;
    }
    if (!donor) return {};

    auto up = *recipient;
    auto down = *donor;
    up.dl_share = up.dl_share + step;
    up.ul_share = up.ul_share + step;
    down.dl_share = down.dl_share - step;
    down.ul_share = down.ul_share - step;
    // Shrink first so the share sum never exceeds 1 in between.
    return {SliceCommand::update(std::move(down)), SliceCommand::update(std::move(up))};
}

void Autoscaler::set_policy(const AutoscalePolicy& p) {
    p.validate();
    if (p.enabled && !policy_.enabled) pending_.clear();
    policy_ = p;
}

std::vector<SliceCommand> Autoscaler::on_report(const StatsReport& report, const SliceRegistry& registry) {
    if (!policy_.enabled) return {};
    pending_.push_back(report);
    const double span = report.window_end - pending_.front().window_start;
    // Compare in nanoseconds to avoid drift from summing 0.1 s periods.
    if (from_seconds(span) < policy_.evaluation_period) return {};
    const auto merged = merge(pending_);
    pending_.clear();
    const double now = report.window_end;
    if (last_shift_ && from_seconds(now - *last_shift_) < policy_.cooldown) return {};
    auto cmds = autoscale_step(policy_, merged, registry);
    if (!cmds.empty()) last_shift_ = now;
    return cmds;
}

}  // namespace slicesim::control
