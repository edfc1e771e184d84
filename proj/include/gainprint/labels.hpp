#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace gainprint {

/// The six background activities. Integer codes are stable and used in
/// checkpoints, CSV files and confusion matrices.
enum class ActivityLabel : int {
    ClassicalMusic = 0,
    CookingEating = 1,
    CrowdTalking = 2,
    DogBarking = 3,
    Keyboard = 4,
    VacuumCleaning = 5,
};

inline constexpr std::size_t kNumClasses = 6;

inline constexpr std::array<ActivityLabel, kNumClasses> kAllLabels = {
    ActivityLabel::ClassicalMusic, ActivityLabel::CookingEating,
    ActivityLabel::CrowdTalking,   ActivityLabel::DogBarking,
    ActivityLabel::Keyboard,       ActivityLabel::VacuumCleaning,
};

constexpr int label_code(ActivityLabel l) noexcept { return static_cast<int>(l); }

/// Two-letter abbreviation: cm ck tk dg kb vc.
std::string_view label_abbrev(ActivityLabel l) noexcept;

/// Human readable class name used in distribution tables.
std::string_view label_name(ActivityLabel l) noexcept;

/// Accepts the abbreviation, the integer code as text, or the long name
/// (case-insensitive, spaces/underscores ignored).
std::optional<ActivityLabel> parse_label(std::string_view text);

std::optional<ActivityLabel> label_from_code(int code) noexcept;

}  // namespace gainprint
