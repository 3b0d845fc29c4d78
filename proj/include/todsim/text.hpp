#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace todsim {

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

// Collapses every run of whitespace to a single space (does not trim).
std::string collapse_whitespace(std::string_view text);

// Rewrites 12-hour clock expressions ("4PM", "9:30 am") to 24-hour HH:MM.
// Everything else passes through untouched.
std::string canonicalize_times(const std::string& text);

// Slot-value normalization applied at construction time: case-fold, trim,
// collapse internal whitespace, canonicalize times. Entity matching is only
// well-defined over values in this form.
std::string normalize_value(std::string_view text);

// FNV-1a, used as the dataset content digest.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace todsim
