#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmrec {

enum class Errc {
    malformed_input,
    no_root,
    unknown_node,
    inconsistent_revisions,
    empty_title,
    empty_query,
    empty_collection,
    empty_scores,
    empty_occurrences,
    no_positive_features,
    empty_model,
    empty_pool,
    no_impressions,
    degenerate_series,
    no_citations,
    unknown_preset,
    invariant_violation,
    malformed_row,
    invalid_config,
    unknown_user,
    io_error,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can branch on the class rather than the message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace mmrec
