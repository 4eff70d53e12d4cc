#pragma once

#include <iosfwd>

namespace sclab::lab {

/// sclab <simulate|scan|detpot|phj|liouville|report> [--config NAME]
///       [--dump-fields] [--section.key=value ...]
/// Exit 0 on success, 1 on configuration or domain errors (and bad usage),
/// 2 on numerical failures such as caustics, leakage or mass drift.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sclab::lab
