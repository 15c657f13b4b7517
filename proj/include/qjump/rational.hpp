#ifndef QJUMP_RATIONAL_HPP
#define QJUMP_RATIONAL_HPP

#include <string>
#include <string_view>

#include <gmpxx.h>

namespace qjump {

/// Parse "p/q", an integer, or a decimal string like "0.6180339887" into an
/// exact rational. Decimal digits are taken literally (no float round trip).
mpq_class rational_from_string(std::string_view text);

/// Canonical "p/q" (or plain integer) form.
std::string rational_to_string(const mpq_class& q);

} // namespace qjump

#endif
