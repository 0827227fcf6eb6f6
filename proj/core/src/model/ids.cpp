#include "wfprov/model/ids.hpp"

#include <cctype>

#include "wfprov/model/errors.hpp"

namespace wfprov {

bool is_valid_identifier(std::string_view s) noexcept {
  if (s.empty()) return false;
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || std::iscntrl(c)) return false;
    if (ch == '/' || ch == '\\' || ch == '?' || ch == '#' || ch == '&' || ch == '%' || ch == ',') return false;
  }
  return true;
}

void throw_invalid_identifier(std::string_view value) {
  throw ValidationError("invalid identifier: '" + std::string(value) + "'");
}

}  // namespace wfprov
