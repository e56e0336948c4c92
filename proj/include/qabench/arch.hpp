#pragma once

// Coupling-map model: which physical qubit pairs support a two-qubit gate.
//
// Edges are stored directed (closed under reversal), so a physical coupler
// contributes 2 to n_con. The connectivity ratio divides n_con by the
// directed edge count of the family's fully connected variant.
//
// Ten built-ins over 32 qubits, two families of five:
//   r-family: 8x4 rectangular lattice (aspect ratio 2).
//   s-family: 6x6 lattice with the four corner qubits removed.
// Variant 1 is the fully connected form (grid plus both diagonals of every
// complete unit cell), variant 3 is nearest-neighbor only, variant 2 sits
// in between (diagonals on alternating cells), variants 4 and 5 are two
// sparse sub-grid patterns with equal edge counts but different placement.

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qabench/circuit.hpp"

namespace qabench {

enum class Family { Rectangle, Square, Custom };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Rectangle: return "rectangle";
        case Family::Square: return "square";
        case Family::Custom: return "custom";
    }
    return "?";
}

class Architecture {
  public:
    std::string name;
    std::uint32_t num_qubits = 0;
    Family family = Family::Custom;
    std::uint32_t n_full = 0;

    Architecture() = default;

    // pairs are undirected couplers; the directed closure is built here.
    Architecture(std::string name_, std::uint32_t num_qubits_, Family family_,
                 std::uint32_t n_full_, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs)
        : name(std::move(name_)), num_qubits(num_qubits_), family(family_), n_full(n_full_) {
        for (auto [a, b] : pairs) add_coupler(a, b);
        finalize();
    }

    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }
    std::uint32_t n_con() const { return static_cast<std::uint32_t>(edges_.size()); }

    bool has_edge(std::uint32_t a, std::uint32_t b) const {
        return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(a, b));
    }

    const std::vector<std::vector<std::uint32_t>>& adjacency() const { return adj_; }

    // Throws if any type invariant fails (asymmetry cannot happen by
    // construction; this checks range, self-loops, connectivity, n_full).
    void check() const {
        if (num_qubits == 0) throw Error("architecture '" + name + "': no qubits");
        if (edges_.empty()) throw Error("architecture '" + name + "': no edges");
        if (n_full == 0) throw Error("architecture '" + name + "': n_full is zero");
        if (n_con() > n_full)
            throw Error("architecture '" + name + "': n_con " + std::to_string(n_con()) +
                        " exceeds n_full " + std::to_string(n_full));
        for (auto [a, b] : edges_) {
            if (a >= num_qubits || b >= num_qubits)
                throw Error("architecture '" + name + "': edge endpoint out of range");
            if (a == b) throw Error("architecture '" + name + "': self-loop on qubit " +
                                    std::to_string(a));
        }
        auto comp = component_of(0);
        std::size_t reached = 0;
        for (bool r : comp)
            if (r) ++reached;
        if (reached != num_qubits) {
            std::ostringstream os;
            os << "architecture '" << name << "' is disconnected; component of qubit 0 = {";
            bool first = true;
            for (std::uint32_t q = 0; q < num_qubits; ++q) {
                if (!comp[q]) continue;
                if (!first) os << ",";
                os << q;
                first = false;
            }
            os << "} (" << reached << " of " << num_qubits << " qubits)";
            throw Error(os.str());
        }
    }

  private:
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
    std::vector<std::vector<std::uint32_t>> adj_;

    void add_coupler(std::uint32_t a, std::uint32_t b) {
        edges_.emplace_back(a, b);
        edges_.emplace_back(b, a);
    }

    void finalize() {
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
        adj_.assign(num_qubits, {});
        for (auto [a, b] : edges_)
            if (a < num_qubits && b < num_qubits) adj_[a].push_back(b);
        check();
    }

    std::vector<bool> component_of(std::uint32_t start) const {
        std::vector<bool> seen(num_qubits, false);
        if (start >= num_qubits) return seen;
        std::queue<std::uint32_t> frontier;
        frontier.push(start);
        seen[start] = true;
        while (!frontier.empty()) {
            auto q = frontier.front();
            frontier.pop();
            for (auto r : adj_[q])
                if (!seen[r]) {
                    seen[r] = true;
                    frontier.push(r);
                }
        }
        return seen;
    }
};

inline double connectivity(const Architecture& arch) {
    if (arch.n_full == 0) throw Error("connectivity: n_full is zero");
    return static_cast<double>(arch.n_con()) / static_cast<double>(arch.n_full);
}

// All-pairs hop counts via BFS from every node.
class DistanceMatrix {
  public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(const Architecture& arch) : n_(arch.num_qubits) {
        d_.assign(static_cast<std::size_t>(n_) * n_, unreachable);
        const auto& adj = arch.adjacency();
        std::vector<std::uint32_t> queue(n_);
        for (std::uint32_t s = 0; s < n_; ++s) {
            auto* row = &d_[static_cast<std::size_t>(s) * n_];
            row[s] = 0;
            std::size_t head = 0, tail = 0;
            queue[tail++] = s;
            while (head < tail) {
                auto q = queue[head++];
                for (auto r : adj[q])
                    if (row[r] == unreachable) {
                        row[r] = static_cast<std::uint16_t>(row[q] + 1);
                        queue[tail++] = r;
                    }
            }
            for (std::uint32_t t = 0; t < n_; ++t)
                if (row[t] == unreachable)
                    throw Error("distance_matrix: qubits " + std::to_string(s) + " and " +
                                std::to_string(t) + " are in different components");
        }
    }

    std::uint32_t num_qubits() const { return n_; }
    std::uint16_t at(std::uint32_t a, std::uint32_t b) const {
        return d_[static_cast<std::size_t>(a) * n_ + b];
    }

    static constexpr std::uint16_t unreachable = 0xffff;

  private:
    std::uint32_t n_ = 0;
    std::vector<std::uint16_t> d_;
};

inline DistanceMatrix distance_matrix(const Architecture& arch) { return DistanceMatrix(arch); }

namespace arch_detail {

using PairList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

constexpr std::uint32_t kFamilyFull = 188;

// r-family: 8 columns x 4 rows, qubit id = row*8 + col.
inline std::uint32_t rect_id(std::uint32_t row, std::uint32_t col) { return row * 8 + col; }

inline PairList rect_grid() {
    PairList p;
    for (std::uint32_t r = 0; r < 4; ++r)
        for (std::uint32_t c = 0; c + 1 < 8; ++c) p.emplace_back(rect_id(r, c), rect_id(r, c + 1));
    for (std::uint32_t r = 0; r + 1 < 4; ++r)
        for (std::uint32_t c = 0; c < 8; ++c) p.emplace_back(rect_id(r, c), rect_id(r + 1, c));
    return p;
}

inline void rect_cell_diagonals(PairList& p, std::uint32_t r, std::uint32_t c) {
    p.emplace_back(rect_id(r, c), rect_id(r + 1, c + 1));
    p.emplace_back(rect_id(r, c + 1), rect_id(r + 1, c));
}

// Horizontal rows stay complete; vertical couplers appear only at the given
// columns per row gap.
inline PairList rect_sparse(const std::array<std::vector<std::uint32_t>, 3>& vertical_cols) {
    PairList p;
    for (std::uint32_t r = 0; r < 4; ++r)
        for (std::uint32_t c = 0; c + 1 < 8; ++c) p.emplace_back(rect_id(r, c), rect_id(r, c + 1));
    for (std::uint32_t gap = 0; gap < 3; ++gap)
        for (auto c : vertical_cols[gap]) p.emplace_back(rect_id(gap, c), rect_id(gap + 1, c));
    return p;
}

// s-family: 6x6 lattice minus the four corners, ids row-major over the
// surviving sites. Returns num_qubits for a missing site.
inline std::uint32_t square_id(std::uint32_t row, std::uint32_t col) {
    static const auto table = [] {
        std::array<std::array<std::uint32_t, 6>, 6> t{};
        std::uint32_t next = 0;
        for (std::uint32_t r = 0; r < 6; ++r)
            for (std::uint32_t c = 0; c < 6; ++c) {
                bool corner = (r == 0 || r == 5) && (c == 0 || c == 5);
                t[r][c] = corner ? 32u : next++;
            }
        return t;
    }();
    return table[row][col];
}

inline bool square_site(std::uint32_t row, std::uint32_t col) { return square_id(row, col) < 32; }

inline PairList square_grid() {
    PairList p;
    for (std::uint32_t r = 0; r < 6; ++r)
        for (std::uint32_t c = 0; c + 1 < 6; ++c)
            if (square_site(r, c) && square_site(r, c + 1))
                p.emplace_back(square_id(r, c), square_id(r, c + 1));
    for (std::uint32_t r = 0; r + 1 < 6; ++r)
        for (std::uint32_t c = 0; c < 6; ++c)
            if (square_site(r, c) && square_site(r + 1, c))
                p.emplace_back(square_id(r, c), square_id(r + 1, c));
    return p;
}

inline bool square_cell_complete(std::uint32_t r, std::uint32_t c) {
    return square_site(r, c) && square_site(r, c + 1) && square_site(r + 1, c) &&
           square_site(r + 1, c + 1);
}

inline void square_cell_diagonals(PairList& p, std::uint32_t r, std::uint32_t c) {
    p.emplace_back(square_id(r, c), square_id(r + 1, c + 1));
    p.emplace_back(square_id(r, c + 1), square_id(r + 1, c));
}

inline PairList square_sparse(const std::array<std::vector<std::uint32_t>, 5>& vertical_cols) {
    PairList p;
    for (std::uint32_t r = 0; r < 6; ++r)
        for (std::uint32_t c = 0; c + 1 < 6; ++c)
            if (square_site(r, c) && square_site(r, c + 1))
                p.emplace_back(square_id(r, c), square_id(r, c + 1));
    for (std::uint32_t gap = 0; gap < 5; ++gap)
        for (auto c : vertical_cols[gap])
            if (square_site(gap, c) && square_site(gap + 1, c))
                p.emplace_back(square_id(gap, c), square_id(gap + 1, c));
    return p;
}

inline PairList builtin_pairs(std::string_view name) {
    if (name == "r1") {
        PairList p = rect_grid();
        for (std::uint32_t r = 0; r < 3; ++r)
            for (std::uint32_t c = 0; c < 7; ++c) rect_cell_diagonals(p, r, c);
        return p;
    }
    if (name == "r2") {
        PairList p = rect_grid();
        for (std::uint32_t r = 0; r < 3; ++r)
            for (std::uint32_t c = 0; c < 7; ++c)
                if ((r + c) % 2 == 0) rect_cell_diagonals(p, r, c);
        return p;
    }
    if (name == "r3") return rect_grid();
    if (name == "r4") return rect_sparse({{{0, 2, 4, 6}, {1, 3, 5, 7}, {0, 2, 4, 6}}});
    if (name == "r5") return rect_sparse({{{1, 3, 5, 7}, {0, 2, 4, 6}, {1, 3, 5, 7}}});
    if (name == "s1") {
        PairList p = square_grid();
        for (std::uint32_t r = 0; r < 5; ++r)
            for (std::uint32_t c = 0; c < 5; ++c)
                if (square_cell_complete(r, c)) square_cell_diagonals(p, r, c);
        return p;
    }
    if (name == "s2") {
        PairList p = square_grid();
        for (std::uint32_t r = 0; r < 5; ++r)
            for (std::uint32_t c = 0; c < 5; ++c)
                if ((r + c) % 2 == 1 && square_cell_complete(r, c)) square_cell_diagonals(p, r, c);
        return p;
    }
    if (name == "s3") return square_grid();
    if (name == "s4") return square_sparse({{{1, 3}, {0, 2, 4}, {1, 3, 5}, {0, 2, 4}, {2, 4}}});
    if (name == "s5") return square_sparse({{{2, 4}, {1, 3, 5}, {0, 2, 4}, {1, 3, 5}, {1, 3}}});
    throw Error("unknown architecture '" + std::string(name) + "'");
}

}  // namespace arch_detail

inline std::vector<std::string> builtin_names() {
    return {"r1", "r2", "r3", "r4", "r5", "s1", "s2", "s3", "s4", "s5"};
}

inline Architecture builtin(std::string_view name) {
    auto pairs = arch_detail::builtin_pairs(name);
    Family fam = name[0] == 'r' ? Family::Rectangle : Family::Square;
    return Architecture(std::string(name), 32, fam, arch_detail::kFamilyFull, pairs);
}

inline Family family_from_name(std::string_view s) {
    if (s == "rectangle") return Family::Rectangle;
    if (s == "square") return Family::Square;
    if (s == "custom") return Family::Custom;
    throw Error("unknown family '" + std::string(s) + "'");
}

inline void save_architecture(const Architecture& arch, std::ostream& os) {
    os << "name " << arch.name << "\n";
    os << "num_qubits " << arch.num_qubits << "\n";
    os << "family " << family_name(arch.family) << "\n";
    os << "n_full " << arch.n_full << "\n";
    os << "edges\n";
    for (auto [a, b] : arch.edges())
        if (a < b) os << a << "-" << b << "\n";
}

// Load from the structured text form written by save_architecture.
// Pairs are undirected; a pair listed only in descending order is treated
// as a directed edge missing its reverse: it is symmetrized with a warning.
inline Architecture load_architecture(std::istream& is,
                                      std::vector<std::string>* warnings = nullptr) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };
    std::string name;
    long num_qubits = -1;
    long n_full = -1;
    Family family = Family::Custom;
    bool family_set = false;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> raw;
    bool in_edges = false;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        auto where = [&] { return " (line " + std::to_string(lineno) + ")"; };
        if (!in_edges) {
            if (head == "name") {
                if (!(ls >> name)) throw Error("architecture file: missing name value" + where());
            } else if (head == "num_qubits") {
                if (!(ls >> num_qubits) || num_qubits <= 0)
                    throw Error("architecture file: bad num_qubits" + where());
            } else if (head == "family") {
                std::string f;
                if (!(ls >> f)) throw Error("architecture file: missing family value" + where());
                family = family_from_name(f);
                family_set = true;
            } else if (head == "n_full") {
                if (!(ls >> n_full) || n_full <= 0)
                    throw Error("architecture file: bad n_full" + where());
            } else if (head == "edges") {
                in_edges = true;
            } else {
                throw Error("architecture file: unknown field '" + head + "'" + where());
            }
            continue;
        }
        auto dash = head.find('-');
        if (dash == std::string::npos || dash == 0 || dash + 1 >= head.size())
            throw Error("architecture file: expected edge 'a-b', got '" + head + "'" + where());
        long a = -1, b = -1;
        try {
            a = std::stol(head.substr(0, dash));
            b = std::stol(head.substr(dash + 1));
        } catch (...) {
            throw Error("architecture file: bad edge '" + head + "'" + where());
        }
        if (a < 0 || b < 0 || num_qubits < 0 || a >= num_qubits || b >= num_qubits)
            throw Error("architecture file: edge endpoint out of range in '" + head + "'" +
                        where());
        if (a == b)
            throw Error("architecture file: self-loop '" + head + "'" + where());
        raw.emplace_back(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
    }
    if (name.empty()) throw Error("architecture file: missing name");
    if (num_qubits < 0) throw Error("architecture file: missing num_qubits");
    if (raw.empty()) throw Error("architecture file: no edges");
    if (!family_set) family = Family::Custom;
    if (n_full < 0) n_full = num_qubits * (num_qubits - 1);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> seen_sorted;
    for (auto [a, b] : raw) {
        auto key = std::minmax(a, b);
        auto canon = std::make_pair(key.first, key.second);
        if (std::find(pairs.begin(), pairs.end(), canon) != pairs.end()) {
            warn("duplicate coupler " + std::to_string(a) + "-" + std::to_string(b));
            continue;
        }
        if (a > b &&
            std::find(raw.begin(), raw.end(), canon) == raw.end())
            warn("edge " + std::to_string(a) + "-" + std::to_string(b) +
                 " listed without reverse; treating as undirected");
        pairs.push_back(canon);
    }
    return Architecture(name, static_cast<std::uint32_t>(num_qubits), family,
                        static_cast<std::uint32_t>(n_full), pairs);
}

inline std::string to_dot(const Architecture& arch) {
    std::ostringstream os;
    os << "graph " << arch.name << " {\n";
    for (std::uint32_t q = 0; q < arch.num_qubits; ++q) os << "  " << q << ";\n";
    for (auto [a, b] : arch.edges())
        if (a < b) os << "  " << a << " -- " << b << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace qabench
