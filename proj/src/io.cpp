#include "podag/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "podag/errors.hpp"

namespace podag {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("write to '" + path + "' failed");
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Dataset parse_dataset(const std::string& text) {
    const auto lines = lines_of(text);
    std::size_t li = 0;
    while (li < lines.size() && trim(lines[li]).empty()) ++li;
    if (li == lines.size()) throw FormatError("dataset is empty");
    const char delim = lines[li].find('\t') != std::string::npos ? '\t' : ',';
    std::vector<std::string> labels;
    for (const auto& f : split(lines[li], delim)) labels.push_back(trim(f));
    for (const auto& l : labels) {
        if (l.empty()) throw FormatError("dataset header has an empty label");
    }
    std::vector<std::vector<double>> rows;
    for (++li; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const auto fields = split(lines[li], delim);
        if (fields.size() != labels.size()) {
            throw FormatError("dataset line " + std::to_string(li + 1) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(labels.size()));
        }
        std::vector<double> row;
        for (const auto& f : fields) {
            const std::string t = trim(f);
            double v = 0.0;
            const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
            if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
                throw FormatError("dataset line " + std::to_string(li + 1) + ": bad number '" + t +
                                  "'");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(labels.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < labels.size(); ++c) data(r, c) = rows[r][c];
    }
    return Dataset(std::move(data), std::move(labels));
}

Dataset read_dataset(const std::string& path) { return parse_dataset(read_file(path)); }

std::string format_dataset(const Dataset& d) {
    std::string out;
    for (int c = 0; c < d.m(); ++c) {
        if (c) out += ',';
        out += d.labels()[c];
    }
    out += '\n';
    for (int r = 0; r < d.n(); ++r) {
        for (int c = 0; c < d.m(); ++c) {
            if (c) out += ',';
            out += format_double(d.data()(r, c));
        }
        out += '\n';
    }
    return out;
}

std::vector<Node> resolve_labels(const std::vector<std::string>& names,
                                 const std::vector<std::string>& labels) {
    std::map<std::string, Node> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], static_cast<Node>(i));
    std::vector<Node> out;
    std::vector<std::string> unknown;
    for (const auto& n : names) {
        auto it = index.find(n);
        if (it == index.end()) {
            unknown.push_back(n);
        } else {
            out.push_back(it->second);
        }
    }
    if (!unknown.empty()) {
        std::string msg = "unknown labels:";
        for (const auto& u : unknown) msg += " " + u;
        throw LabelMismatchError(msg);
    }
    return out;
}

std::string format_edge_list(const Pdag& g, const std::vector<std::string>& labels) {
    if (static_cast<int>(labels.size()) != g.size()) throw ArgumentError("label count mismatch");
    std::string out;
    for (const auto& e : g.directed_edges()) out += labels[e.from] + "\t" + labels[e.to] + "\n";
    for (const auto& p : g.undirected_edges()) out += labels[p.a] + "\t" + labels[p.b] + "\tu\n";
    return out;
}

Pdag parse_edge_list(const std::string& text, const std::vector<std::string>& labels) {
    Pdag g(static_cast<int>(labels.size()));
    const auto lines = lines_of(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        auto f = split(lines[li], '\t');
        for (auto& x : f) x = trim(x);
        if (f.size() < 2 || f.size() > 3 || (f.size() == 3 && f[2] != "u")) {
            throw FormatError("edge list line " + std::to_string(li + 1) + " is malformed");
        }
        const auto ids = resolve_labels({f[0], f[1]}, labels);
        try {
            if (f.size() == 3) {
                g.add_undirected(ids[0], ids[1]);
            } else {
                g.add_directed(ids[0], ids[1]);
            }
        } catch (const ArgumentError& e) {
            throw FormatError("edge list line " + std::to_string(li + 1) + ": " + e.what());
        }
    }
    return g;
}

std::string format_layering(const PartialOrdering& o, const std::vector<std::string>& labels) {
    if (static_cast<int>(labels.size()) != o.size()) throw ArgumentError("label count mismatch");
    std::string out;
    for (const auto& layer : o.layers()) {
        for (std::size_t t = 0; t < layer.size(); ++t) out += (t ? "," : "") + labels[layer[t]];
        out += '\n';
    }
    if (!o.unordered().empty()) {
        out += "unordered:";
        for (std::size_t t = 0; t < o.unordered().size(); ++t) {
            out += (t ? "," : "") + labels[o.unordered()[t]];
        }
        out += '\n';
    }
    return out;
}

PartialOrdering parse_layering(const std::string& text, const std::vector<std::string>& labels) {
    std::vector<NodeSet> layers;
    NodeSet unordered;
    std::vector<bool> seen(labels.size(), false);
    std::vector<std::string> duplicate;
    auto take = [&](const std::string& body) {
        std::vector<std::string> names;
        for (const auto& f : split(body, ',')) {
            const std::string t = trim(f);
            if (!t.empty()) names.push_back(t);
        }
        NodeSet ids = resolve_labels(names, labels);
        for (Node v : ids) {
            if (seen[v]) duplicate.push_back(labels[v]);
            seen[v] = true;
        }
        return ids;
    };
    for (const auto& raw : lines_of(text)) {
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.rfind("unordered:", 0) == 0) {
            NodeSet ids = take(line.substr(10));
            unordered.insert(unordered.end(), ids.begin(), ids.end());
        } else {
            layers.push_back(take(line));
        }
    }
    if (!duplicate.empty()) {
        std::string msg = "labels listed twice in the layering:";
        for (const auto& d : duplicate) msg += " " + d;
        throw LabelMismatchError(msg);
    }
    std::string missing;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!seen[i]) missing += " " + labels[i];
    }
    if (!missing.empty()) throw LabelMismatchError("labels missing from the layering:" + missing);
    for (auto& l : layers) l = make_node_set(l);
    return PartialOrdering(static_cast<int>(labels.size()), std::move(layers),
                           make_node_set(unordered));
}

}  // namespace podag
