#pragma once

#include <json.hpp>

#include "taoquant/ingest.hpp"

namespace taoquant::ingest::detail {

/// Parses one snapshot row from its JSON object form. Throws ParseError
/// without positional info; callers add file/row context.
RawSnapshotRow parse_json_row(const nlohmann::json& obj);

}  // namespace taoquant::ingest::detail
