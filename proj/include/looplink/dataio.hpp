#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "looplink/hypergraph.hpp"

namespace looplink {

// Hyperlink file: one hyperlink per line, node labels whitespace-separated,
// '#' comment lines and blank lines ignored, LF or CRLF.
struct ParseOptions {
  bool drop_duplicates = false;  // otherwise DuplicateHyperlink
  bool drop_singletons = false;  // otherwise SingletonHyperlink
  std::ostream* warnings = nullptr;
};

Hypergraph parse_hyperlink_file(std::istream& in, const ParseOptions& opts = {});
Hypergraph parse_hyperlink_file(const std::string& path, const ParseOptions& opts = {});

struct SplitSpec {
  std::size_t test_count = 0;  // q hyperlinks deleted as test positives
  std::uint64_t seed = 0;
};

struct Split {
  Hypergraph train;
  std::vector<Hyperlink> test_positives;      // node indices in g's indexing
  std::vector<std::size_t> deleted_indices;   // ascending, into g's hyperlink order
};

// Deletes test_count hyperlinks uniformly at random without replacement.
// The node set and its indexing are preserved in train.
Split split_train_test(const Hypergraph& g, const SplitSpec& spec);

// Records seed, q and the deleted hyperlink indices; enough to reproduce the
// split exactly.
void write_split_manifest(std::ostream& out, const Hypergraph& g, const Split& split,
                          const SplitSpec& spec);

struct NegativeSamplerConfig {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t max_rejections = 0;  // 0 -> 1000 * count
};

// Draws fake hyperlinks: cardinality from the empirical hyperlink cardinality
// distribution of g, then that many distinct nodes degree-proportionally
// without replacement. Results equal to an existing hyperlink or an earlier
// sample are rejected and redrawn; SamplerExhausted past max_rejections.
std::vector<Hyperlink> sample_negative_hyperlinks(const Hypergraph& g,
                                                  const NegativeSamplerConfig& config);

// External baseline scores: one "hyperlink-key<TAB>score" per line, keys as
// produced by Hypergraph::hyperlink_key.
std::unordered_map<std::string, double> read_external_scores(std::istream& in);
std::unordered_map<std::string, double> read_external_scores(const std::string& path);

// Decimal form that parses back to the identical double (printf %.17g).
std::string format_double(double v);

}  // namespace looplink
