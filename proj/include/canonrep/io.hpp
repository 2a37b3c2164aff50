#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "canonrep/bench.hpp"
#include "canonrep/skorohod.hpp"
#include "canonrep/transport.hpp"

namespace canonrep {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// {"format_version": 1, "dimension": d, "depth": N, "root": node}, node =
/// {"branches": [{"value": [...], "prob": "p/q", "child": node | null}]}.
/// Shared children are written out once per parent (the unfolded tree).
Json process_to_json(const FiniteProcess& p);
/// Structure only; probabilities and depths are checked by validate_process.
FiniteProcess process_from_json(const Json& j);

/// The process layout with an extra "interval": ["lo", "hi"] per branch.
Json representation_to_json(const CellRepresentation& r);
CellRepresentation representation_from_json(const Json& j);

/// {"format_version": 1, "steps": [{"step": n, "sections": [{"history": [...],
///  "pieces": [[[src_lo, src_hi], [tgt_lo, tgt_hi]], ...]}]}]}.
Json transport_to_json(const std::vector<StepTransport>& steps);
std::vector<StepTransport> transport_from_json(const Json& j);

Json value_to_json(const Value& v);
Json path_to_json(const ValuePath& p);
Value value_from_json(const Json& j);
Rational rational_from_json(const Json& j);

Json read_json_file(const std::string& path);
/// Writes `text` to `path`, or to stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);
std::string dump(const Json& j);

/// Round-trip decimal text for doubles.
std::string format_double(double x);

/// Per-path sums of a pair batch: columns m, then d and e coordinates.
std::string sums_csv(const SampleBatch& batch);
/// One row per (path, grid time): m, t, F_t coordinates.
std::string trajectories_csv(const std::vector<EmbeddedPath>& paths);
/// Static plot of t against the first coordinate of F_t for at most 20 paths.
std::string trajectories_svg(const std::vector<EmbeddedPath>& paths, std::size_t max_paths = 20);

}  // namespace canonrep
