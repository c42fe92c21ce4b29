#include "slicesim/apps/video.hpp"

#include <algorithm>

#include "slicesim/common/error.hpp"

namespace slicesim::apps {

void VideoConfig::validate() const {
    if (!(bitrate_bps > 0.0)) throw ConfigError("video bitrate must be positive");
    if (segment_size_bytes <= 0 || packet_size_bytes <= 0) {
        throw ConfigError("video segment and packet sizes must be positive");
    }
    if (!(initial_buffer_s >= 0.0) || !(rebuffer_resume_s >= 0.0)) {
        throw ConfigError("video buffer thresholds must be non-negative");
    }
}

SimTime VideoConfig::segment_interval() const {
    return from_seconds(static_cast<double>(segment_size_bytes) * 8.0 / bitrate_bps);
}

std::string_view to_string(PlayoutState s) {
    switch (s) {
        case PlayoutState::Buffering: return "buffering";
        case PlayoutState::Playing: return "playing";
        case PlayoutState::Stalled: return "stalled";
    }
    return "?";
}

VideoSession VideoSession::start(const VideoConfig& cfg) {
    VideoSession s;
    s.bitrate_bps = cfg.bitrate_bps;
    s.initial_buffer_s = cfg.initial_buffer_s;
    s.rebuffer_resume_s = cfg.rebuffer_resume_s;
    return s;
}

VideoSession video_step(VideoSession s, std::int64_t delivered_bytes, double dt) {
    s.delivered_bytes += delivered_bytes;
    s.buffer_s += static_cast<double>(delivered_bytes) * 8.0 / s.bitrate_bps;
    switch (s.state) {
        case PlayoutState::Playing: {
            const double played = std::min(dt, s.buffer_s);
            s.played_s += played;
            s.buffer_s -= played;
            if (s.buffer_s <= 0.0) {
                s.buffer_s = 0.0;
                s.state = PlayoutState::Stalled;
                ++s.stall_count;
            }
            break;
        }
        case PlayoutState::Stalled:
            s.total_stall_duration_s += dt;
            if (s.buffer_s >= s.rebuffer_resume_s) s.state = PlayoutState::Playing;
            break;
        case PlayoutState::Buffering:
            if (s.buffer_s >= s.initial_buffer_s) s.state = PlayoutState::Playing;
            break;
    }
    return s;
}

std::vector<std::int64_t> VideoServer::next_segment() {
    std::vector<std::int64_t> packets;
    std::int64_t left = cfg_.segment_size_bytes;
    while (left > 0) {
        const std::int64_t n = std::min(left, cfg_.packet_size_bytes);
        packets.push_back(n);
        left -= n;
    }
    return packets;
}

}  // namespace slicesim::apps
