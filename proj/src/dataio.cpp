#include "looplink/dataio.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "looplink/errors.hpp"
#include "looplink/rng.hpp"

namespace looplink {

namespace {

bool comment_or_blank(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

Hypergraph parse_hyperlink_file(std::istream& in, const ParseOptions& opts) {
  std::vector<std::vector<std::string>> links;
  std::unordered_set<std::string> seen_keys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (comment_or_blank(line)) continue;

    std::istringstream fields(line);
    std::vector<std::string> labels;
    std::string tok;
    while (fields >> tok) labels.push_back(std::move(tok));

    std::vector<std::string> sorted(labels);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw MalformedLine(line_no, "repeated node label within the hyperlink");
    }
    if (sorted.size() < 2) {
      if (opts.drop_singletons) {
        if (opts.warnings) {
          *opts.warnings << "line " << line_no << ": dropping singleton hyperlink\n";
        }
        continue;
      }
      throw SingletonHyperlink("line " + std::to_string(line_no) +
                               ": hyperlink needs >= 2 distinct nodes");
    }
    std::string key;
    for (const auto& l : sorted) {
      key += l;
      key += '\n';
    }
    if (!seen_keys.insert(key).second) {
      if (opts.drop_duplicates) {
        if (opts.warnings) {
          *opts.warnings << "line " << line_no << ": dropping duplicate hyperlink\n";
        }
        continue;
      }
      throw DuplicateHyperlink("line " + std::to_string(line_no) +
                               ": hyperlink already present");
    }
    links.push_back(std::move(labels));
  }
  return Hypergraph::build({}, links);
}

Hypergraph parse_hyperlink_file(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_hyperlink_file(in, opts);
}

Split split_train_test(const Hypergraph& g, const SplitSpec& spec) {
  const std::size_t m = g.hyperlink_count();
  if (spec.test_count >= m) {
    throw TestCountTooLarge("cannot delete " + std::to_string(spec.test_count) +
                            " of " + std::to_string(m) + " hyperlinks");
  }
  // Partial Fisher-Yates over the index range; the first q slots become the
  // deleted set.
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.test_count; ++i) {
    const std::size_t j = i + uniform_index(rng, m - i);
    std::swap(order[i], order[j]);
  }

  Split split;
  split.deleted_indices.assign(order.begin(), order.begin() + spec.test_count);
  std::sort(split.deleted_indices.begin(), split.deleted_indices.end());

  std::vector<Hyperlink> kept;
  kept.reserve(m - spec.test_count);
  std::size_t next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (next < split.deleted_indices.size() && split.deleted_indices[next] == i) {
      split.test_positives.push_back(g.hyperlink(i));
      ++next;
    } else {
      kept.push_back(g.hyperlink(i));
    }
  }
  split.train = Hypergraph::from_indexed(g.node_labels(), kept);
  return split;
}

void write_split_manifest(std::ostream& out, const Hypergraph& g, const Split& split,
                          const SplitSpec& spec) {
  out << "# looplink split manifest\n";
  out << "seed " << spec.seed << '\n';
  out << "q " << spec.test_count << '\n';
  for (std::size_t idx : split.deleted_indices) {
    out << "deleted " << idx << ' ' << g.hyperlink_key(g.hyperlink(idx)) << '\n';
  }
}

std::vector<Hyperlink> sample_negative_hyperlinks(const Hypergraph& g,
                                                  const NegativeSamplerConfig& config) {
  if (g.hyperlink_count() == 0) {
    throw InsufficientData("sampler needs at least one hyperlink for the "
                           "cardinality distribution");
  }
  if (config.count == 0) return {};
  const std::size_t max_rejections =
      config.max_rejections > 0 ? config.max_rejections : 1000 * config.count;

  const auto degrees = g.degrees();
  const std::size_t n = g.node_count();
  std::vector<double> base_weight(n);
  for (std::size_t i = 0; i < n; ++i) base_weight[i] = static_cast<double>(degrees[i]);

  Rng rng(config.seed);
  std::vector<Hyperlink> out;
  std::unordered_set<Hyperlink, HyperlinkHash> produced;
  std::vector<double> weight(n), cumulative(n);
  std::size_t rejections = 0;
  while (out.size() < config.count) {
    // Cardinality from the empirical distribution: a uniform hyperlink pick.
    const std::size_t k =
        g.hyperlink(uniform_index(rng, g.hyperlink_count())).size();

    weight = base_weight;
    Hyperlink sample;
    sample.reserve(k);
    bool stuck = false;
    for (std::size_t pick = 0; pick < k; ++pick) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += weight[i];
        cumulative[i] = acc;
      }
      if (!(acc > 0.0)) {
        stuck = true;  // fewer than k nodes with positive degree
        break;
      }
      const std::size_t node = weighted_index(rng, cumulative);
      sample.push_back(static_cast<NodeIndex>(node));
      weight[node] = 0.0;
    }
    if (!stuck) {
      std::sort(sample.begin(), sample.end());
      if (!g.contains(sample) && produced.insert(sample).second) {
        out.push_back(std::move(sample));
        continue;
      }
    }
    if (++rejections > max_rejections) {
      throw SamplerExhausted("gave up after " + std::to_string(rejections - 1) +
                             " rejections with " + std::to_string(out.size()) +
                             " of " + std::to_string(config.count) + " samples");
    }
  }
  return out;
}

std::unordered_map<std::string, double> read_external_scores(std::istream& in) {
  std::unordered_map<std::string, double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (comment_or_blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw MalformedLine(line_no, "expected 'hyperlink-key<TAB>score'");
    }
    const std::string key = line.substr(0, tab);
    const std::string rest = line.substr(tab + 1);
    char* end = nullptr;
    const double value = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) {
      throw MalformedLine(line_no, "score is not a number");
    }
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != '\0') throw MalformedLine(line_no, "trailing junk after score");
    if (!scores.emplace(key, value).second) {
      throw MalformedLine(line_no, "duplicate key '" + key + "'");
    }
  }
  return scores;
}

std::unordered_map<std::string, double> read_external_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_external_scores(in);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace looplink
