#pragma once

#include <optional>
#include <string>

namespace richstate {

enum class MediaKind { image, video };

/// Generated content. Media is a typed tag only; no binary payload.
struct ContentBlob {
    std::string text;
    std::string topic_tag;
    std::optional<MediaKind> media;

    bool has_image() const { return media == MediaKind::image; }
    bool has_video() const { return media == MediaKind::video; }

    friend bool operator==(const ContentBlob&, const ContentBlob&) = default;
};

}  // namespace richstate
