#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace propkern {

namespace detail {

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

inline bool blank(const std::string& s) {
    return s.find_first_not_of(" \t") == std::string::npos;
}

// Splits on commas and whitespace; every field must parse completely.
template <typename T>
std::vector<T> parse_fields(const std::string& line, const std::string& where) {
    std::vector<T> out;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
        if (*p == ' ' || *p == '\t' || *p == ',') {
            ++p;
            continue;
        }
        T value{};
        std::from_chars_result r;
        if constexpr (std::is_floating_point_v<T>) {
            char* stop = nullptr;
            value = std::strtod(p, &stop);
            r.ptr = stop;
            r.ec = (stop == p) ? std::errc::invalid_argument : std::errc();
        } else {
            r = std::from_chars(p, end, value);
        }
        require(r.ec == std::errc(), where + ": cannot parse '" + line + "'");
        out.push_back(value);
        p = r.ptr;
        if (p < end)
            require(*p == ' ' || *p == '\t' || *p == ',',
                    where + ": cannot parse '" + line + "'");
    }
    return out;
}

template <typename T>
T parse_single(const std::string& line, const std::string& where) {
    const std::vector<T> fields = parse_fields<T>(line, where);
    require(fields.size() == 1, where + ": expected one value, got '" + line + "'");
    return fields[0];
}

inline std::string loc(const std::filesystem::path& file, size_t line_no) {
    return file.filename().string() + ":" + std::to_string(line_no);
}

}  // namespace detail

// ---- TU text format ----------------------------------------------------------
// A database is a directory holding <prefix>_A.txt (edge list "i, j", 1-indexed
// global node ids), <prefix>_graph_indicator.txt (graph id per node),
// <prefix>_node_labels.txt (integer per node, -1 = unlabeled),
// <prefix>_graph_labels.txt (integer per graph), and optionally
// <prefix>_node_attributes.txt (comma-separated reals per node).

inline std::string tu_prefix(const std::filesystem::path& dir) {
    require(std::filesystem::is_directory(dir), dir.string() + " is not a directory");
    std::string prefix;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 6 && name.ends_with("_A.txt")) {
            require(prefix.empty(), dir.string() + " holds more than one *_A.txt");
            prefix = name.substr(0, name.size() - 6);
        }
    }
    require(!prefix.empty(), dir.string() + " holds no *_A.txt edge list");
    return prefix;
}

inline GraphDatabase load_tu_dataset(const std::filesystem::path& dir,
                                     bool symmetrize = false) {
    namespace fs = std::filesystem;
    const std::string prefix = tu_prefix(dir);
    const fs::path a_file = dir / (prefix + "_A.txt");
    const fs::path ind_file = dir / (prefix + "_graph_indicator.txt");
    const fs::path nl_file = dir / (prefix + "_node_labels.txt");
    const fs::path gl_file = dir / (prefix + "_graph_labels.txt");
    const fs::path at_file = dir / (prefix + "_node_attributes.txt");

    // Graph indicator defines N and the graph count.
    std::vector<index_t> graph_of;
    {
        const auto lines = detail::read_lines(ind_file);
        for (size_t i = 0; i < lines.size(); ++i) {
            if (detail::blank(lines[i])) continue;
            graph_of.push_back(
                detail::parse_single<index_t>(lines[i], detail::loc(ind_file, i + 1)));
        }
    }
    const index_t total = static_cast<index_t>(graph_of.size());
    require(total >= 1, ind_file.string() + " lists no nodes");
    index_t num_graphs = 0;
    for (index_t g : graph_of) num_graphs = std::max(num_graphs, g);
    std::vector<index_t> counts(static_cast<size_t>(num_graphs), 0);
    for (size_t i = 0; i < graph_of.size(); ++i) {
        const index_t g = graph_of[i];
        require(g >= 1 && g <= num_graphs,
                detail::loc(ind_file, i + 1) + ": graph id " + std::to_string(g) +
                    " out of range");
        ++counts[static_cast<size_t>(g - 1)];
    }
    for (index_t g = 0; g < num_graphs; ++g)
        require(counts[static_cast<size_t>(g)] > 0,
                ind_file.string() + ": graph ids not contiguous (graph " +
                    std::to_string(g + 1) + " has no nodes)");

    // Global node id -> (graph, local index), in indicator order.
    std::vector<index_t> local_of(static_cast<size_t>(total));
    {
        std::vector<index_t> next(static_cast<size_t>(num_graphs), 0);
        for (index_t u = 0; u < total; ++u)
            local_of[static_cast<size_t>(u)] = next[static_cast<size_t>(graph_of[u] - 1)]++;
    }

    // Node labels.
    std::vector<int> labels;
    {
        const auto lines = detail::read_lines(nl_file);
        for (size_t i = 0; i < lines.size(); ++i) {
            if (detail::blank(lines[i])) continue;
            const int l = detail::parse_single<int>(lines[i], detail::loc(nl_file, i + 1));
            require(l >= kUnlabeled,
                    detail::loc(nl_file, i + 1) + ": node labels must be >= -1");
            labels.push_back(l);
        }
        require(static_cast<index_t>(labels.size()) == total,
                nl_file.string() + ": expected " + std::to_string(total) + " labels, got " +
                    std::to_string(labels.size()));
    }

    // Graph labels.
    std::vector<int> classes;
    {
        const auto lines = detail::read_lines(gl_file);
        for (size_t i = 0; i < lines.size(); ++i) {
            if (detail::blank(lines[i])) continue;
            classes.push_back(detail::parse_single<int>(lines[i], detail::loc(gl_file, i + 1)));
        }
        require(static_cast<index_t>(classes.size()) == num_graphs,
                gl_file.string() + ": expected " + std::to_string(num_graphs) +
                    " graph labels, got " + std::to_string(classes.size()));
    }

    // Optional attributes.
    std::vector<std::vector<double>> attrs;
    index_t attr_dim = 0;
    if (std::filesystem::exists(at_file)) {
        const auto lines = detail::read_lines(at_file);
        for (size_t i = 0; i < lines.size(); ++i) {
            if (detail::blank(lines[i])) continue;
            auto row = detail::parse_fields<double>(lines[i], detail::loc(at_file, i + 1));
            require(!row.empty(), detail::loc(at_file, i + 1) + ": empty attribute row");
            if (attrs.empty()) {
                attr_dim = static_cast<index_t>(row.size());
            } else {
                require(static_cast<index_t>(row.size()) == attr_dim,
                        detail::loc(at_file, i + 1) + ": ragged attribute row (expected " +
                            std::to_string(attr_dim) + " fields, got " +
                            std::to_string(row.size()) + ")");
            }
            attrs.push_back(std::move(row));
        }
        require(static_cast<index_t>(attrs.size()) == total,
                at_file.string() + ": expected " + std::to_string(total) +
                    " attribute rows, got " + std::to_string(attrs.size()));
    }

    // Edges: 1-indexed global ids; both endpoints must live in one graph.
    std::vector<std::vector<Triplet>> edges(static_cast<size_t>(num_graphs));
    {
        const auto lines = detail::read_lines(a_file);
        for (size_t i = 0; i < lines.size(); ++i) {
            if (detail::blank(lines[i])) continue;
            const std::string where = detail::loc(a_file, i + 1);
            const auto pair = detail::parse_fields<index_t>(lines[i], where);
            require(pair.size() == 2, where + ": expected 'i, j'");
            const index_t u = pair[0], v = pair[1];
            require(u >= 1 && u <= total && v >= 1 && v <= total,
                    where + ": edge endpoint out of range");
            const index_t gu = graph_of[static_cast<size_t>(u - 1)];
            const index_t gv = graph_of[static_cast<size_t>(v - 1)];
            require(gu == gv, where + ": edge crosses graphs " + std::to_string(gu) +
                                  " and " + std::to_string(gv));
            const index_t lu = local_of[static_cast<size_t>(u - 1)];
            const index_t lv = local_of[static_cast<size_t>(v - 1)];
            edges[static_cast<size_t>(gu - 1)].push_back({lu, lv, 1.0});
            if (symmetrize) edges[static_cast<size_t>(gu - 1)].push_back({lv, lu, 1.0});
        }
    }

    std::vector<Graph> graphs(static_cast<size_t>(num_graphs));
    for (index_t g = 0; g < num_graphs; ++g) {
        Graph& gr = graphs[static_cast<size_t>(g)];
        gr.n = counts[static_cast<size_t>(g)];
        gr.adjacency =
            CsrMatrix::from_triplets(gr.n, std::move(edges[static_cast<size_t>(g)]));
        gr.labels.assign(static_cast<size_t>(gr.n), kUnlabeled);
        gr.cls = classes[static_cast<size_t>(g)];
        if (attr_dim > 0) gr.attributes = Matrix(gr.n, attr_dim);
    }
    for (index_t u = 0; u < total; ++u) {
        Graph& gr = graphs[static_cast<size_t>(graph_of[static_cast<size_t>(u)] - 1)];
        const index_t lu = local_of[static_cast<size_t>(u)];
        gr.labels[static_cast<size_t>(lu)] = labels[static_cast<size_t>(u)];
        for (index_t c = 0; c < attr_dim; ++c)
            gr.attributes(lu, c) = attrs[static_cast<size_t>(u)][static_cast<size_t>(c)];
    }
    return make_database(std::move(graphs));
}

// Writes a database back out in TU layout. Adjacency weights must be positive
// integers (edge multiplicity); every graph needs a class.
inline void write_tu_dataset(const GraphDatabase& db, const std::filesystem::path& dir,
                             const std::string& prefix = "DS") {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream a(dir / (prefix + "_A.txt"));
    std::ofstream ind(dir / (prefix + "_graph_indicator.txt"));
    std::ofstream nl(dir / (prefix + "_node_labels.txt"));
    std::ofstream gl(dir / (prefix + "_graph_labels.txt"));
    require(a.good() && ind.good() && nl.good() && gl.good(),
            "cannot write TU files under " + dir.string());
    std::ofstream at;
    if (db.attr_dim > 0) {
        at.open(dir / (prefix + "_node_attributes.txt"));
        require(at.good(), "cannot write TU files under " + dir.string());
    }

    index_t base = 1;
    for (size_t gi = 0; gi < db.graphs.size(); ++gi) {
        const Graph& g = db.graphs[gi];
        require(g.cls.has_value(),
                "graph " + std::to_string(gi) + " has no class; TU format requires one");
        gl << *g.cls << "\n";
        const auto& row_ptr = g.adjacency.row_ptr();
        const auto& col = g.adjacency.col_index();
        const auto& val = g.adjacency.values();
        for (index_t u = 0; u < g.n; ++u) {
            ind << (gi + 1) << "\n";
            nl << g.labels[static_cast<size_t>(u)] << "\n";
            if (db.attr_dim > 0) {
                char buf[40];
                for (index_t c = 0; c < db.attr_dim; ++c) {
                    std::snprintf(buf, sizeof buf, "%.17g", g.attributes(u, c));
                    at << (c ? ", " : "") << buf;
                }
                at << "\n";
            }
            for (index_t i = row_ptr[u]; i < row_ptr[u + 1]; ++i) {
                const double w = val[i];
                require(w > 0.0 && w == std::floor(w) && w <= 1e9,
                        "graph " + std::to_string(gi) +
                            ": adjacency weight not representable as edge multiplicity");
                for (index_t rep = 0; rep < static_cast<index_t>(w); ++rep)
                    a << (base + u) << ", " << (base + col[i]) << "\n";
            }
        }
        base += g.n;
    }
}

// ---- portable graymap ---------------------------------------------------------

struct PgmImage {
    index_t width = 0;
    index_t height = 0;
    std::vector<int> pixels;  // row-major, values in [0, maxval]
};

// P2 (ASCII) and P5 (binary) graymaps with maxval up to 255.
inline PgmImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string where = path.filename().string();

    size_t pos = 0;
    auto skip_space = [&] {
        while (pos < data.size()) {
            if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                ++pos;
            } else if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    };
    auto next_int = [&](const char* what) {
        skip_space();
        size_t start = pos;
        while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) ++pos;
        require(pos > start, where + ": malformed header (bad " + std::string(what) + ")");
        long v = 0;
        std::from_chars(data.data() + start, data.data() + pos, v);
        return static_cast<index_t>(v);
    };

    skip_space();
    require(pos + 2 <= data.size() && data[pos] == 'P' &&
                (data[pos + 1] == '2' || data[pos + 1] == '5'),
            where + ": not a P2/P5 graymap");
    const bool binary = data[pos + 1] == '5';
    pos += 2;

    PgmImage img;
    img.width = next_int("width");
    img.height = next_int("height");
    const index_t maxval = next_int("maxval");
    require(img.width >= 1 && img.height >= 1, where + ": bad dimensions");
    require(maxval >= 1 && maxval <= 255, where + ": maxval must lie in [1, 255]");

    const index_t count = img.width * img.height;
    img.pixels.reserve(static_cast<size_t>(count));
    if (binary) {
        require(pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos])),
                where + ": malformed header");
        ++pos;
        require(pos + static_cast<size_t>(count) <= data.size(), where + ": truncated data");
        for (index_t i = 0; i < count; ++i) {
            const int v = static_cast<unsigned char>(data[pos + static_cast<size_t>(i)]);
            require(v <= maxval, where + ": pixel exceeds maxval");
            img.pixels.push_back(v);
        }
    } else {
        for (index_t i = 0; i < count; ++i) {
            skip_space();
            require(pos < data.size(), where + ": truncated data");
            const index_t v = next_int("pixel");
            require(v <= maxval, where + ": pixel exceeds maxval");
            img.pixels.push_back(static_cast<int>(v));
        }
    }
    return img;
}

// ---- label masking --------------------------------------------------------------

// Unlabels exactly floor(fraction * N) nodes, chosen uniformly over the whole
// database. Adjacency, attributes, classes, and the label alphabet stay put.
inline GraphDatabase mask_labels(const GraphDatabase& db, double fraction,
                                 std::uint64_t seed) {
    require(fraction >= 0.0 && fraction <= 1.0, "fraction must lie in [0, 1]");
    for (size_t gi = 0; gi < db.graphs.size(); ++gi)
        for (int l : db.graphs[gi].labels)
            require(l != kUnlabeled,
                    "graph " + std::to_string(gi) + " already has unlabeled nodes");

    const index_t total = db.total_nodes();
    const auto m = static_cast<index_t>(fraction * static_cast<double>(total));
    std::vector<index_t> idx(static_cast<size_t>(total));
    std::iota(idx.begin(), idx.end(), index_t{0});
    Rng rng(seed);
    for (index_t i = 0; i < m; ++i) {
        const index_t j = i + uniform_index(rng, total - i);
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    }

    GraphDatabase out = db;
    std::vector<index_t> offsets{0};
    for (const Graph& g : db.graphs) offsets.push_back(offsets.back() + g.n);
    for (index_t i = 0; i < m; ++i) {
        const index_t u = idx[static_cast<size_t>(i)];
        const auto g = static_cast<size_t>(
            std::upper_bound(offsets.begin(), offsets.end(), u) - offsets.begin() - 1);
        out.graphs[g].labels[static_cast<size_t>(u - offsets[g])] = kUnlabeled;
    }
    return out;
}

// ---- Gram matrix text format ------------------------------------------------------
// Header "propkern-gram v1 n=<n>", then n rows of n space-separated decimals
// with 17 significant digits, which round-trips doubles exactly.

inline void write_kernel(const Matrix& k, const std::filesystem::path& path) {
    require(k.rows() == k.cols(), "kernel matrix must be square");
    const index_t n = k.rows();
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j) {
            require(std::isfinite(k(i, j)), "kernel values must be finite");
            require(std::fabs(k(i, j) - k(j, i)) <=
                        1e-10 * std::max({1.0, std::fabs(k(i, j)), std::fabs(k(j, i))}),
                    "kernel matrix is not symmetric");
        }
    std::ofstream out(path);
    require(out.good(), "cannot write " + path.string());
    out << "propkern-gram v1 n=" << n << "\n";
    char buf[40];
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", k(i, j));
            out << (j ? " " : "") << buf;
        }
        out << "\n";
    }
    require(out.good(), "write failed for " + path.string());
}

inline Matrix read_kernel(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    const std::string where = path.filename().string();
    require(!lines.empty(), where + ": empty file");
    const std::string header = "propkern-gram v1 n=";
    require(lines[0].starts_with(header), where + ": header mismatch");
    index_t n = -1;
    {
        const std::string tail = lines[0].substr(header.size());
        const auto r = std::from_chars(tail.data(), tail.data() + tail.size(), n);
        require(r.ec == std::errc() && r.ptr == tail.data() + tail.size() && n >= 0,
                where + ": header mismatch");
    }
    Matrix k(n, n);
    index_t row = 0;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (detail::blank(lines[i])) continue;
        require(row < n, where + ": more rows than the header declares");
        const auto fields = detail::parse_fields<double>(lines[i], detail::loc(path, i + 1));
        require(static_cast<index_t>(fields.size()) == n,
                detail::loc(path, i + 1) + ": expected " + std::to_string(n) +
                    " values, got " + std::to_string(fields.size()));
        for (index_t j = 0; j < n; ++j) k(row, j) = fields[static_cast<size_t>(j)];
        ++row;
    }
    require(row == n, where + ": expected " + std::to_string(n) + " rows, got " +
                          std::to_string(row));
    return k;
}

// ---- class vectors -----------------------------------------------------------------

inline std::vector<int> read_classes(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    std::vector<int> out;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (detail::blank(lines[i])) continue;
        out.push_back(detail::parse_single<int>(lines[i], detail::loc(path, i + 1)));
    }
    return out;
}

inline void write_classes(const GraphDatabase& db, const std::filesystem::path& path) {
    std::ofstream out(path);
    require(out.good(), "cannot write " + path.string());
    for (size_t gi = 0; gi < db.graphs.size(); ++gi) {
        require(db.graphs[gi].cls.has_value(),
                "graph " + std::to_string(gi) + " has no class");
        out << *db.graphs[gi].cls << "\n";
    }
}

}  // namespace propkern
