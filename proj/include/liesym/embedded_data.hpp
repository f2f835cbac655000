#pragma once

#include <string_view>

namespace liesym::embedded {

extern const std::string_view algebras_txt;
extern const std::string_view catalog_json;

} // namespace liesym::embedded
