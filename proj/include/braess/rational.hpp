#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace braess {

// Exact arbitrary-precision rational. All game quantities (rates, loads,
// latencies, costs) are Rationals; decimals never enter the core model.
using Rational = mpq_class;

// Canonicalized rational from machine integers.
Rational rat(long num, long den = 1);

// Renders as "p/q" with q >= 1, e.g. "2/1", "-3/4". Never decimal.
std::string rat_str(const Rational& value);

// Accepts "p", "p/q", optionally signed. Returns nullopt on malformed input
// or zero denominator.
std::optional<Rational> parse_rational(const std::string& text);

double rat_double(const Rational& value);

}  // namespace braess
