#pragma once

#include "liesym/lie_algebra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace liesym {

struct CatalogAlgebra {
    std::string label;
    std::size_t dim = 0;
    std::string brackets;  // as written in the data file
    std::string param;     // empty when the class has no parameter
    std::string range;
};

/// Entries of data/algebras.txt plus the K+A1 sums of the 3-dim classes.
const std::vector<CatalogAlgebra>& algebra_catalog();
const CatalogAlgebra* find_algebra(const std::string& label);
/// Canonical constants of a catalog class at a parameter value. Throws
/// Domain for unknown labels, a missing parameter or one outside its range.
QAlgebra canonical_algebra(const std::string& label, std::optional<Rational> param = std::nullopt);
bool param_in_range(const CatalogAlgebra& a, const Rational& v);

} // namespace liesym
