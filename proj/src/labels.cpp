#include "gainprint/labels.hpp"

#include <cctype>
#include <string>

namespace gainprint {

namespace {

constexpr std::array<std::string_view, kNumClasses> kAbbrev = {"cm", "ck", "tk", "dg", "kb", "vc"};
constexpr std::array<std::string_view, kNumClasses> kNames = {
    "classical music", "cooking/eating", "crowd talking",
    "dog barking",     "keyboard",       "vacuum/cleaning",
};
constexpr std::array<std::string_view, kNumClasses> kCompact = {
    "classicalmusic", "cookingeating", "crowdtalking", "dogbarking", "keyboard", "vacuumcleaning",
};

}  // namespace

std::string_view label_abbrev(ActivityLabel l) noexcept { return kAbbrev[static_cast<std::size_t>(l)]; }

std::string_view label_name(ActivityLabel l) noexcept { return kNames[static_cast<std::size_t>(l)]; }

std::optional<ActivityLabel> label_from_code(int code) noexcept {
    if (code < 0 || code >= static_cast<int>(kNumClasses)) return std::nullopt;
    return static_cast<ActivityLabel>(code);
}

std::optional<ActivityLabel> parse_label(std::string_view text) {
    std::string key;
    for (char ch : text) {
        if (ch == ' ' || ch == '_' || ch == '-' || ch == '/') continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    if (key.size() == 1 && key[0] >= '0' && key[0] <= '9') return label_from_code(key[0] - '0');
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        if (key == kAbbrev[i] || key == kCompact[i]) return static_cast<ActivityLabel>(i);
    }
    return std::nullopt;
}

}  // namespace gainprint
