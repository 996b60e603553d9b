#pragma once

#include <functional>
#include <string>

namespace fpe {

/// Compiles a drift expression in the variables x, y into a callable.
/// Grammar: + - * / ^, exp, sin, cos, parentheses, numeric constants, x, y.
/// Throws ConfigError on malformed input.
std::function<double(double, double)> compile_expression(const std::string& src);

} // namespace fpe
