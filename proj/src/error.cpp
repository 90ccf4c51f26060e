#include "mmrec/error.hpp"

namespace mmrec {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::malformed_input: return "MalformedInput";
        case Errc::no_root: return "NoRoot";
        case Errc::unknown_node: return "UnknownNode";
        case Errc::inconsistent_revisions: return "InconsistentRevisions";
        case Errc::empty_title: return "EmptyTitle";
        case Errc::empty_query: return "EmptyQuery";
        case Errc::empty_collection: return "EmptyCollection";
        case Errc::empty_scores: return "EmptyScores";
        case Errc::empty_occurrences: return "EmptyOccurrences";
        case Errc::no_positive_features: return "NoPositiveFeatures";
        case Errc::empty_model: return "EmptyModel";
        case Errc::empty_pool: return "EmptyPool";
        case Errc::no_impressions: return "NoImpressions";
        case Errc::degenerate_series: return "DegenerateSeries";
        case Errc::no_citations: return "NoCitations";
        case Errc::unknown_preset: return "UnknownPreset";
        case Errc::invariant_violation: return "InvariantViolation";
        case Errc::malformed_row: return "MalformedRow";
        case Errc::invalid_config: return "InvalidConfig";
        case Errc::unknown_user: return "UnknownUser";
        case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

}  // namespace mmrec
