#include "todsim/text.hpp"

#include <cctype>
#include <regex>

namespace todsim {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_run = false;
  for (char c : text) {
    if (is_space(c)) {
      in_run = true;
      continue;
    }
    if (in_run && !out.empty()) out.push_back(' ');
    in_run = false;
    out.push_back(c);
  }
  return out;
}

std::string canonicalize_times(const std::string& text) {
  static const std::regex kClock(R"(\b(\d{1,2})(?::(\d{2}))?\s*([aApP])[mM]\b)");
  std::string out;
  out.reserve(text.size());
  auto begin = std::sregex_iterator(text.begin(), text.end(), kClock);
  auto end = std::sregex_iterator();
  std::size_t last = 0;
  for (auto it = begin; it != end; ++it) {
    const std::smatch& m = *it;
    int hour = std::stoi(m[1].str());
    if (hour > 12) continue;  // "16PM" is not a clock reading
    const std::string minutes = m[2].matched ? m[2].str() : "00";
    const bool pm = m[3].str() == "p" || m[3].str() == "P";
    if (pm && hour != 12) hour += 12;
    if (!pm && hour == 12) hour = 0;
    out.append(text, last, static_cast<std::size_t>(m.position(0)) - last);
    char buf[6];
    std::snprintf(buf, sizeof(buf), "%02d:", hour);
    out.append(buf);
    out.append(minutes);
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
  }
  out.append(text, last, text.size() - last);
  return out;
}

std::string normalize_value(std::string_view text) {
  return canonicalize_times(trim(collapse_whitespace(to_lower(text))));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string(buf);
}

}  // namespace todsim
