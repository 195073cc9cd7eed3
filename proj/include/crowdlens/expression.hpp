#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace crowdlens {

struct FeatureVector;

/// Arithmetic expression over the fields of a FeatureVector.
///
/// Grammar (whitespace-insensitive):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | primary
///     primary := number | field | 'recip' '(' expr ')' | '(' expr ')'
///     field   := s | alpha | isolation | socialization | collectivity | x | y
///
/// `x`/`y` are the components of the mean position. The Unicode operators
/// U+2212, U+00D7 and U+00F7 are accepted as aliases of '-', '*' and '/'.
/// Both `recip(e)` and `a / b` guard the denominator: magnitudes below
/// kEpsilon are replaced by +/-kEpsilon, so evaluation is total.
class Expression {
 public:
  static constexpr double kEpsilon = 1e-3;

  /// Throws Error(RegistryParse) with the offending offset.
  static Expression parse(std::string_view source);

  double evaluate(const FeatureVector& v) const;
  const std::string& source() const { return source_; }

  struct Node;

 private:
  Expression(std::string source, std::shared_ptr<const Node> root)
      : source_(std::move(source)), root_(std::move(root)) {}

  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace crowdlens
