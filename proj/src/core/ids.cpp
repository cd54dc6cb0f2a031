#include "richstate/core/ids.hpp"

#include <charconv>

namespace richstate {

char kind_prefix(EntityKind kind) {
    switch (kind) {
    case EntityKind::user: return 'u';
    case EntityKind::post: return 'p';
    case EntityKind::comment: return 'c';
    case EntityKind::thread: return 't';
    case EntityKind::group: return 'g';
    case EntityKind::listing: return 'l';
    case EntityKind::story: return 's';
    case EntityKind::notification: return 'n';
    }
    return '?';
}

std::string to_string(EntityRef ref) {
    return kind_prefix(ref.kind) + std::to_string(ref.value);
}

std::optional<EntityRef> parse_ref(std::string_view text) {
    if (text.size() < 2) return std::nullopt;
    EntityRef ref;
    switch (text.front()) {
    case 'u': ref.kind = EntityKind::user; break;
    case 'p': ref.kind = EntityKind::post; break;
    case 'c': ref.kind = EntityKind::comment; break;
    case 't': ref.kind = EntityKind::thread; break;
    case 'g': ref.kind = EntityKind::group; break;
    case 'l': ref.kind = EntityKind::listing; break;
    case 's': ref.kind = EntityKind::story; break;
    case 'n': ref.kind = EntityKind::notification; break;
    default: return std::nullopt;
    }
    const char* first = text.data() + 1;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, ref.value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return ref;
}

std::optional<UserId> parse_user_id(std::string_view text) {
    auto ref = parse_ref(text);
    if (!ref || ref->kind != EntityKind::user) return std::nullopt;
    return UserId{ref->value};
}

}  // namespace richstate
