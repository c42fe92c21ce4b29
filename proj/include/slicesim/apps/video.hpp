#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "slicesim/common/time.hpp"

namespace slicesim::apps {

struct VideoConfig {
    double bitrate_bps = 5'000'000.0;
    std::int64_t segment_size_bytes = 62'500;  // 0.1 s at the default bitrate
    std::int64_t packet_size_bytes = 1'500;
    double initial_buffer_s = 2.0;
    double rebuffer_resume_s = 1.0;

    void validate() const;
    SimTime segment_interval() const;
};

enum class PlayoutState { Buffering, Playing, Stalled };

std::string_view to_string(PlayoutState s);

/// Client playout buffer.
struct VideoSession {
    double bitrate_bps = 5'000'000.0;
    double initial_buffer_s = 2.0;
    double rebuffer_resume_s = 1.0;

    double buffer_s = 0.0;
    PlayoutState state = PlayoutState::Buffering;
    int stall_count = 0;
    double total_stall_duration_s = 0.0;
    double played_s = 0.0;
    std::int64_t delivered_bytes = 0;

    static VideoSession start(const VideoConfig& cfg);
};

/// Adds delivered media, plays `dt` seconds if playing, and moves the state
/// machine: Playing -> Stalled when the buffer empties, Buffering/Stalled ->
/// Playing once the start or resume threshold is reached.
VideoSession video_step(VideoSession session, std::int64_t delivered_bytes, double dt);

/// Constant-bitrate source: one segment per interval, split into packets.
class VideoServer {
public:
    explicit VideoServer(VideoConfig cfg) : cfg_(cfg) {}

    /// Packet sizes of the next segment.
    std::vector<std::int64_t> next_segment();
    SimTime interval() const { return cfg_.segment_interval(); }

private:
    VideoConfig cfg_;
};

}  // namespace slicesim::apps
