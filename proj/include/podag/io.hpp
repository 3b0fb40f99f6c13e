#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "podag/graph.hpp"
#include "podag/stats.hpp"

namespace podag {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// CSV (or TSV when the header line contains a tab) with a header of labels.
Dataset parse_dataset(const std::string& text);
Dataset read_dataset(const std::string& path);
std::string format_dataset(const Dataset& d);

/// One `parent<TAB>child` line per directed edge and `a<TAB>b<TAB>u` per
/// undirected edge, sorted by node index.
std::string format_edge_list(const Pdag& g, const std::vector<std::string>& labels);
Pdag parse_edge_list(const std::string& text, const std::vector<std::string>& labels);

/// One comma-separated line of labels per layer, earliest first, and an
/// optional final `unordered:` line.
std::string format_layering(const PartialOrdering& o, const std::vector<std::string>& labels);
/// Throws LabelMismatchError naming unknown or missing labels.
PartialOrdering parse_layering(const std::string& text, const std::vector<std::string>& labels);

/// Maps labels to indices, throwing LabelMismatchError with every unknown label.
std::vector<Node> resolve_labels(const std::vector<std::string>& names,
                                 const std::vector<std::string>& labels);

}  // namespace podag
