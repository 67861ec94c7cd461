#pragma once

#include <stdexcept>
#include <string>

namespace gcalc {

/// Library failure with a stable machine-readable code.
///
/// Codes are part of the public surface: the CLI maps them onto exit
/// status 2 and echoes them in the JSON error object, so they must not
/// change spelling once released.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Common error codes.
inline constexpr const char* err_zero_element          = "zero-element";
inline constexpr const char* err_not_invertible        = "not-invertible";
inline constexpr const char* err_undecidable_exact     = "undecidable-exact-tier";
inline constexpr const char* err_valuation_not_exact   = "valuation-not-exact";
inline constexpr const char* err_ill_conditioned_order = "ill-conditioned-order";
inline constexpr const char* err_not_alpha_bounded     = "not-alpha-bounded";
inline constexpr const char* err_image_not_compact     = "image-not-compact";
inline constexpr const char* err_support_exact_tier    = "support-exact-tier";
inline constexpr const char* err_family_incomplete     = "family-incomplete";
inline constexpr const char* err_no_witness            = "no-convergence-witness";
inline constexpr const char* err_domain                = "domain";
inline constexpr const char* err_bad_argument          = "bad-argument";
inline constexpr const char* err_not_representable     = "not-representable";
inline constexpr const char* err_quadrature            = "quadrature-no-convergence";
inline constexpr const char* err_parse                 = "parse-error";

/// Syntax failure in the expression reader. Distinguished from Error so the
/// CLI can map it onto exit status 1 rather than 2.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(err_parse, message), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace gcalc
